"""Pure-python (numpy/LAPACK) implementations of the hot kernels.

Same contracts as the compiled module `_kernels`: a tridiagonal Thomas solve
and the Strang split-step advance.  Selected automatically when the compiled
extension is unavailable; results agree with the compiled path to roundoff.
"""

import numpy as np
from scipy.linalg import solve_banded

BACKEND = "python"


def solve_tridiag(dl, d, du, b):
    """Solve the tridiagonal system with subdiagonal dl, diagonal d, superdiagonal du.

    dl and du have length n-1.  No pivoting is assumed to be needed (all uses
    in this package are diagonally dominant or positive definite).
    """
    n = d.shape[0]
    ab = np.zeros((3, n), dtype=np.result_type(d, b))
    ab[0, 1:] = du
    ab[1, :] = d
    ab[2, :-1] = dl
    return solve_banded((1, 1), ab, b)


def strang_advance(u, pot_phase, alpha, lap_dl, lap_d, lap_du, dt, nsteps, nonlinear):
    """Advance nsteps of Strang splitting for i u_t = -Lap u - V u - |u|^alpha u.

    One step: half phase rotation by exp(i dt/2 (V + |u|^alpha)), full
    Crank-Nicolson solve of the free part, half phase rotation.  Both substeps
    are weighted-L2 isometries, so mass is conserved to solver roundoff.

    Returns (u, steps_done); steps_done < nsteps signals a non-finite value
    (overflow during focusing), with u holding the last finite state.
    """
    n = u.shape[0]
    z = 0.5j * dt
    ab = np.zeros((3, n), dtype=np.complex128)
    ab[0, 1:] = z * lap_du
    ab[1, :] = 1.0 + z * lap_d
    ab[2, :-1] = z * lap_dl
    u = u.astype(np.complex128, copy=True)
    for k in range(nsteps):
        if nonlinear:
            phase = np.exp(z * (pot_phase + np.abs(u) ** alpha))
        else:
            phase = np.exp(z * pot_phase)
        v = phase * u
        rhs = (1.0 - z * lap_d) * v
        rhs[:-1] -= z * lap_du * v[1:]
        rhs[1:] -= z * lap_dl * v[:-1]
        v = solve_banded((1, 1), ab, rhs)
        if nonlinear:
            v = v * np.exp(z * (pot_phase + np.abs(v) ** alpha))
        else:
            v = v * phase
        if not np.all(np.isfinite(v.view(np.float64))):
            return u, k
        u = v
    return u, nsteps
