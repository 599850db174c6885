"""Backend selection for the numeric kernels.

QPROP_BACKEND picks the implementation at import time:

* ``numba`` -- require numba, fail loudly if it is missing,
* ``numpy`` -- plain-Python/numpy fallback (no compilation),
* ``auto``  -- numba when importable, fallback otherwise (default).

The kernels in :mod:`qprop._kernels` are written once in nopython-compatible
Python; under the numba backend every kernel is compiled with ``njit`` and
cached on disk, under the fallback they run as ordinary functions.
"""

import os

_ENV_VAR = "QPROP_BACKEND"
_choice = os.environ.get(_ENV_VAR, "auto").strip().lower() or "auto"
if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"{_ENV_VAR} must be one of 'auto', 'numba', 'numpy', got {_choice!r}"
    )

if _choice == "numpy":
    NUMBA_ENABLED = False
else:
    try:
        import numba  # noqa: F401

        NUMBA_ENABLED = True
    except ImportError:
        if _choice == "numba":
            raise
        NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"

if NUMBA_ENABLED:
    from numba import njit

    def jit(func):
        return njit(cache=True, nogil=True)(func)

else:

    def jit(func):
        return func
