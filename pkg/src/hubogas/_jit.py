"""Optional numba acceleration.

Set ``HUBOGAS_DISABLE_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.  The flag is read once, at import time.
"""
from __future__ import annotations

import os

_DISABLED = os.environ.get("HUBOGAS_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by HUBOGAS_DISABLE_NUMBA")
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:
    _njit = None
    NUMBA_AVAILABLE = False


def njit(func):
    """Compile ``func`` in nopython mode if numba is enabled, else return it untouched."""
    if NUMBA_AVAILABLE:
        return _njit(cache=True, nogil=True)(func)
    return func


def backend_name() -> str:
    return "numba" if NUMBA_AVAILABLE else "numpy"
