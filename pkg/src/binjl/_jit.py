"""Numba switch.

Setting ``BINJL_DISABLE_NUMBA=1`` (or running without numba installed) turns
``njit`` into a no-op decorator and makes :mod:`binjl.kernels` dispatch to the
pure-numpy implementations.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("BINJL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("disabled by BINJL_DISABLE_NUMBA")
    import numba
    from numba import njit, prange

    # prefer OpenMP; it is safe for concurrent callers and skips the TBB version probe
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]
    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper

    def prange(*args):
        return range(*args)


USE_NUMBA = NUMBA_AVAILABLE
