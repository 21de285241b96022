"""Kernel backend selection.

The hot grid kernels (distance fields, ray-cast reveals, flood fills) exist
twice: a numba @njit implementation and a vectorized pure-numpy one. The
environment variable FRONTIER_SCOUT_NUMBA picks the backend:

    unset / "auto"  use numba when importable, numpy otherwise
    "1"             require numba (ImportError if missing)
    "0"             force the pure-numpy fallback

Both backends produce identical outputs; see benchmarks/backend_bench.py
for the speed comparison.
"""

import os

_FLAG = os.environ.get("FRONTIER_SCOUT_NUMBA", "auto").strip().lower()

try:
    import numba  # noqa: F401
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

if _FLAG in ("1", "true", "yes"):
    if not HAS_NUMBA:
        raise ImportError("FRONTIER_SCOUT_NUMBA=1 but numba is not installed")
    DEFAULT_BACKEND = "numba"
elif _FLAG in ("0", "false", "no"):
    DEFAULT_BACKEND = "numpy"
else:
    DEFAULT_BACKEND = "numba" if HAS_NUMBA else "numpy"
