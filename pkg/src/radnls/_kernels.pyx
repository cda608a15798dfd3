# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: tridiagonal Thomas solve and the Strang advance.

Mirrors `_kernels_py`; the split-step loop runs entirely in C so long
evolutions (1e5+ steps) are not throttled by per-step Python overhead.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, pow, sin

cnp.import_array()

BACKEND = "compiled"


def solve_tridiag(dl, d, du, b):
    if np.iscomplexobj(d) or np.iscomplexobj(b):
        return _solve_tridiag_z(
            np.ascontiguousarray(dl, dtype=np.complex128),
            np.ascontiguousarray(d, dtype=np.complex128),
            np.ascontiguousarray(du, dtype=np.complex128),
            np.ascontiguousarray(b, dtype=np.complex128),
        )
    return _solve_tridiag_d(
        np.ascontiguousarray(dl, dtype=np.float64),
        np.ascontiguousarray(d, dtype=np.float64),
        np.ascontiguousarray(du, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.float64),
    )


def _solve_tridiag_d(const double[::1] dl, const double[::1] d, const double[::1] du, const double[::1] b):
    cdef Py_ssize_t n = d.shape[0]
    out = np.empty(n, dtype=np.float64)
    scratch = np.empty(n, dtype=np.float64)
    cdef double[::1] x = out
    cdef double[::1] cp = scratch
    cdef Py_ssize_t i
    cdef double m
    cp[0] = du[0] / d[0]
    x[0] = b[0] / d[0]
    for i in range(1, n):
        m = d[i] - dl[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = du[i] / m
        x[i] = (b[i] - dl[i - 1] * x[i - 1]) / m
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    return out


def _solve_tridiag_z(const double complex[::1] dl, const double complex[::1] d,
                     const double complex[::1] du, const double complex[::1] b):
    cdef Py_ssize_t n = d.shape[0]
    out = np.empty(n, dtype=np.complex128)
    scratch = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] x = out
    cdef double complex[::1] cp = scratch
    cdef Py_ssize_t i
    cdef double complex m
    cp[0] = du[0] / d[0]
    x[0] = b[0] / d[0]
    for i in range(1, n):
        m = d[i] - dl[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = du[i] / m
        x[i] = (b[i] - dl[i - 1] * x[i - 1]) / m
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    return out


def strang_advance(u, pot_phase, double alpha,
                   lap_dl, lap_d, lap_du,
                   double dt, Py_ssize_t nsteps, bint nonlinear):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] uu = np.array(u, dtype=np.complex128)
    cdef const double[::1] pot = np.ascontiguousarray(pot_phase, dtype=np.float64)
    cdef const double[::1] dl = np.ascontiguousarray(lap_dl, dtype=np.float64)
    cdef const double[::1] dd = np.ascontiguousarray(lap_d, dtype=np.float64)
    cdef const double[::1] du = np.ascontiguousarray(lap_du, dtype=np.float64)
    cdef Py_ssize_t n = uu.shape[0]

    cdef cnp.ndarray[cnp.complex128_t, ndim=1] work = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] cp_arr = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] inv_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] v = work
    cdef double complex[::1] cp = cp_arr
    cdef double complex[::1] invm = inv_arr
    cdef double complex[::1] uv = uu

    cdef double complex z = 0.5j * dt
    cdef double complex m, rhs_i, prev
    cdef double re, im, amp2, theta
    cdef Py_ssize_t i, k

    # Thomas factorization of (1 + z*Lap) is fixed across steps: precompute
    # the modified superdiagonal cp and inverse pivots invm.
    m = 1.0 + z * dd[0]
    invm[0] = 1.0 / m
    cp[0] = z * du[0] * invm[0]
    for i in range(1, n):
        m = 1.0 + z * dd[i] - (z * dl[i - 1]) * cp[i - 1]
        invm[i] = 1.0 / m
        if i < n - 1:
            cp[i] = z * du[i] * invm[i]

    for k in range(nsteps):
        # half-step phase rotation (exact for the diagonal part)
        for i in range(n):
            re = uv[i].real
            im = uv[i].imag
            if nonlinear:
                amp2 = re * re + im * im
                theta = 0.5 * dt * (pot[i] + pow(amp2, 0.5 * alpha))
            else:
                theta = 0.5 * dt * pot[i]
            v[i] = uv[i] * (cos(theta) + 1j * sin(theta))
        # rhs = (1 - z*Lap) v, then in-place Thomas solve
        prev = v[0]
        rhs_i = (1.0 - z * dd[0]) * v[0] - z * du[0] * v[1]
        v[0] = rhs_i * invm[0]
        for i in range(1, n):
            rhs_i = (1.0 - z * dd[i]) * v[i] - z * dl[i - 1] * prev
            if i < n - 1:
                rhs_i = rhs_i - z * du[i] * v[i + 1]
            prev = v[i]
            v[i] = (rhs_i - (z * dl[i - 1]) * v[i - 1]) * invm[i]
        for i in range(n - 2, -1, -1):
            v[i] = v[i] - cp[i] * v[i + 1]
        # second half-step phase
        for i in range(n):
            re = v[i].real
            im = v[i].imag
            if nonlinear:
                amp2 = re * re + im * im
                theta = 0.5 * dt * (pot[i] + pow(amp2, 0.5 * alpha))
            else:
                theta = 0.5 * dt * pot[i]
            v[i] = v[i] * (cos(theta) + 1j * sin(theta))
        # overflow check before committing the step
        ok = True
        for i in range(n):
            re = v[i].real
            im = v[i].imag
            if not (re == re and im == im and -1e150 < re < 1e150 and -1e150 < im < 1e150):
                ok = False
                break
        if not ok:
            return uu, k
        for i in range(n):
            uv[i] = v[i]
    return uu, nsteps
