"""Kernel backend selection.

Hot loops are written twice: an ``@njit`` version and a vectorised numpy
version.  ``MUSCLNU_BACKEND=numpy`` (read once, at import) forces the numpy
path even when numba is importable.
"""
import os

_requested = os.environ.get("MUSCLNU_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"MUSCLNU_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba as _numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency
    _numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _requested == "numba"
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` with caching, or an identity decorator without numba."""
    kwargs.setdefault("cache", True)
    if HAVE_NUMBA:
        return _numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda f: f
