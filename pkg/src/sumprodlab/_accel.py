"""Optional numba acceleration.

Hot kernels are written once in numba-compatible python and decorated with
:func:`njit`. When numba is missing, or ``SUMPRODLAB_NO_NUMBA=1`` is set in
the environment, ``njit`` is the identity and ``USE_NUMBA`` is False; callers
then dispatch to their vectorised numpy fallback instead of running the
(slow) undecorated loops.
"""

import os

_disabled = os.environ.get("SUMPRODLAB_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError("numba disabled by SUMPRODLAB_NO_NUMBA")
    import numba as _numba

    # prefer OpenMP; an outdated TBB only produces a warning at first prange use
    _numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = True
except ImportError:
    _numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if USE_NUMBA:
        kwargs.setdefault("cache", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(f):
        return f

    return wrap


if USE_NUMBA:
    prange = _numba.prange
else:
    prange = range


def set_workers(n):
    """Set the numba thread count (ignored on the numpy path)."""
    if USE_NUMBA and n:
        _numba.set_num_threads(max(1, min(int(n), _numba.config.NUMBA_NUM_THREADS)))


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
