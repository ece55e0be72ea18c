"""Compute-backend selection for the hot kernels.

Two interchangeable implementations exist for the dense inner loops:
a numba-jitted path and a pure-numpy path.  The active one is chosen at
import time from the environment:

    KERNELFUSE_BACKEND = auto | numba | numpy   (default: auto)

``auto`` uses numba when importable and falls back to numpy otherwise;
``numba`` fails hard if numba is missing; ``numpy`` forces the fallback
even when numba is installed.  KERNELFUSE_THREADS caps the numba thread
pool.  Both paths are deterministic run to run; they may differ from each
other by float rounding (different summation orders).
"""

import os

_choice = os.environ.get("KERNELFUSE_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"KERNELFUSE_BACKEND must be one of auto/numba/numpy, got {_choice!r}"
    )

HAVE_NUMBA = False
if _choice in ("auto", "numba"):
    try:
        import numba  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise ImportError(
                "KERNELFUSE_BACKEND=numba but numba is not installed "
                "(pip install kernelfuse[accel])"
            )

USE_NUMBA = HAVE_NUMBA and _choice != "numpy"

if USE_NUMBA:
    _threads = os.environ.get("KERNELFUSE_THREADS")
    if _threads:
        import numba

        numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))


def backend_name() -> str:
    """Name of the active backend, 'numba' or 'numpy'."""
    return "numba" if USE_NUMBA else "numpy"
