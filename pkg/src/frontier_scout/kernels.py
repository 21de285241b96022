"""Backend-dispatched grid kernels.

Import-time selection follows backend.DEFAULT_BACKEND (env var
FRONTIER_SCOUT_NUMBA). set_backend() rebinds at runtime; it exists for the
cross-backend tests and the benchmark script.
"""

from . import _kernels_np
from .backend import DEFAULT_BACKEND, HAS_NUMBA

SQRT2 = _kernels_np.SQRT2
NEIGHBORS_8 = _kernels_np.NEIGHBORS_8

_BACKENDS = {"numpy": _kernels_np}
if HAS_NUMBA:
    from . import _kernels_nb

    _BACKENDS["numba"] = _kernels_nb

_active = DEFAULT_BACKEND


def set_backend(name):
    """Select 'numpy' or 'numba'. Returns the previously active name."""
    global _active, line_cells, reachable_mask, distance_field, visible_cells
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {sorted(_BACKENDS)}")
    prev = _active
    mod = _BACKENDS[name]
    line_cells = mod.line_cells
    reachable_mask = mod.reachable_mask
    distance_field = mod.distance_field
    visible_cells = mod.visible_cells
    _active = name
    return prev


def active_backend():
    return _active


set_backend(DEFAULT_BACKEND)
