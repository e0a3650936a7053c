"""Numba switch.

Set ``SLQ_DISABLE_NUMBA=1`` to run every kernel through its numpy fallback.
"""
import os

_disabled = os.environ.get("SLQ_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _njit = None
    HAVE_NUMBA = False


def njit(fn):
    """Compile `fn` with numba when enabled, else return None."""
    if not HAVE_NUMBA:
        return None
    return _njit(cache=True, nogil=True)(fn)
