"""Optional numba acceleration.

Hot loops are written once in a numba-compatible subset of Python and wrapped
with :func:`kernel`.  Setting ``PHAVAIL_DISABLE_NUMBA=1`` (or running without
numba installed) leaves them as plain Python/numpy functions.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _numba_requested() -> bool:
    return os.environ.get("PHAVAIL_DISABLE_NUMBA", "").strip().lower() in _FALSY


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is an optional speedup
    _numba = None

USE_NUMBA = _numba is not None and _numba_requested()


def kernel(func):
    """Compile ``func`` with ``numba.njit`` when acceleration is enabled.

    The undecorated function stays reachable as ``.py_func`` either way so the
    benchmark and the equivalence tests can call both paths side by side.
    """
    if USE_NUMBA:
        return _numba.njit(cache=True, nogil=True)(func)
    func.py_func = func
    return func
