"""Kernel backend selection: compiled extension if built, numpy fallback otherwise.

Set RADNLS_PURE_PYTHON=1 to force the fallback (used by the benchmark and the
backend-equivalence tests).
"""

import os

if os.environ.get("RADNLS_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
solve_tridiag = _impl.solve_tridiag
strang_advance = _impl.strang_advance


def backend_name() -> str:
    return BACKEND
