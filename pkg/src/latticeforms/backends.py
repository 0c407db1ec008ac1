"""Numba/numpy backend selection.

The hot kernels in _kernels.py exist in two flavours: a numba @njit loop and a
vectorized numpy fallback.  By default numba is used when importable; set
LATTICEFORMS_BACKEND=numpy to force the fallback (useful for debugging and for
the benchmark comparison) or LATTICEFORMS_BACKEND=numba to insist on numba.
"""

import os
import warnings

_requested = os.environ.get("LATTICEFORMS_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    warnings.warn(
        f"LATTICEFORMS_BACKEND={_requested!r} not recognized "
        "(expected 'numba' or 'numpy'); ignoring"
    )
    _requested = ""

HAVE_NUMBA = False
if _requested != "numpy":
    try:
        from numba import njit as _numba_njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _requested == "numba":
            raise RuntimeError(
                "LATTICEFORMS_BACKEND=numba but numba is not installed"
            )
        HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _requested != "numpy"
BACKEND = "numba" if USE_NUMBA else "numpy"

if USE_NUMBA:
    from numba import njit
else:
    # identity decorator so the same source works without numba
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def _wrap(fn):
            return fn

        return _wrap
