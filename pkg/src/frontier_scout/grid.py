"""Occupancy grid types: 3D voxel grid, projected 2D map, sizing rule.

Conventions used throughout the package:
  - 2D maps are indexed [row, col]; row 0 is the top (north) edge, rows
    grow southward, cols grow eastward. World x maps to cols, y to rows.
  - Cell centers carry the world coordinate: world = origin +
    (col + 0.5, row + 0.5) * resolution.
  - Cell states are uint8 arrays with FREE=0 < UNKNOWN=1 < OCCUPIED=2;
    the ordering is load-bearing for conservative downsampling.
"""

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import kernels
from .errors import InconsistentPoseError


class CellState(IntEnum):
    FREE = 0
    UNKNOWN = 1
    OCCUPIED = 2


FREE = int(CellState.FREE)
UNKNOWN = int(CellState.UNKNOWN)
OCCUPIED = int(CellState.OCCUPIED)


def _freeze(cells):
    cells = np.ascontiguousarray(cells, dtype=np.uint8)
    cells.setflags(write=False)
    return cells


@dataclass(frozen=True)
class GridMap2D:
    """Dense 2D occupancy map. Immutable after construction."""

    cells: np.ndarray  # (rows, cols) uint8 of CellState values
    resolution: float  # meters per cell
    origin: tuple[float, float]  # world (x, y) of the top-left cell corner

    def __post_init__(self):
        object.__setattr__(self, "cells", _freeze(self.cells))
        if self.cells.ndim != 2 or self.cells.shape[0] < 1 or self.cells.shape[1] < 1:
            raise ValueError("GridMap2D needs at least 1x1 cells")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.cells.max(initial=0) > OCCUPIED:
            raise ValueError("cell values must be FREE, UNKNOWN, or OCCUPIED")

    @property
    def rows(self):
        return self.cells.shape[0]

    @property
    def cols(self):
        return self.cells.shape[1]

    def in_bounds(self, row, col):
        return 0 <= row < self.rows and 0 <= col < self.cols

    def free_mask(self):
        return self.cells == FREE

    def unknown_mask(self):
        return self.cells == UNKNOWN

    def occupied_mask(self):
        return self.cells == OCCUPIED

    def cell_to_world(self, row, col):
        return (
            self.origin[0] + (col + 0.5) * self.resolution,
            self.origin[1] + (row + 0.5) * self.resolution,
        )

    def world_to_cell(self, x, y):
        return (
            int(math.floor((y - self.origin[1]) / self.resolution)),
            int(math.floor((x - self.origin[0]) / self.resolution)),
        )

    def with_cells(self, cells):
        return GridMap2D(cells, self.resolution, self.origin)


@dataclass(frozen=True)
class VoxelGrid3D:
    """Dense 3D occupancy grid, indexed [ix, iy, iz]."""

    cells: np.ndarray  # (nx, ny, nz) uint8 of CellState values
    resolution: float
    origin: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "cells", _freeze(self.cells))
        if self.cells.ndim != 3 or min(self.cells.shape) < 1:
            raise ValueError("VoxelGrid3D needs at least 1x1x1 cells")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.cells.max(initial=0) > OCCUPIED:
            raise ValueError("cell values must be FREE, UNKNOWN, or OCCUPIED")

    @property
    def dims(self):
        return self.cells.shape


@dataclass(frozen=True)
class MapExtent:
    """Realizable map size: size_m = downsample_factor * size_cells * grid_resolution."""

    size_m: float
    size_cells: int
    grid_resolution: float
    downsample_factor: int


@dataclass(frozen=True)
class Pose2D:
    """Cell index plus the world coordinate of its center."""

    cell: tuple[int, int]  # (row, col)
    world: tuple[float, float]  # (x, y) meters

    @classmethod
    def from_cell(cls, grid_map, row, col):
        if not grid_map.in_bounds(row, col):
            raise ValueError(f"cell ({row}, {col}) outside map bounds")
        return cls((row, col), grid_map.cell_to_world(row, col))

    @classmethod
    def from_world(cls, grid_map, x, y):
        row, col = grid_map.world_to_cell(x, y)
        return cls.from_cell(grid_map, row, col)


def compute_map_extent(size_cells, grid_resolution, desired_size_m):
    """Pick the integer downsample factor realizing desired_size_m best.

    k minimizes |desired_size_m - k * size_cells * grid_resolution| over
    positive integers; ties go to the smaller k (finer map).
    """
    if size_cells <= 0 or grid_resolution <= 0 or desired_size_m <= 0:
        raise ValueError("size_cells, grid_resolution, and desired_size_m must be positive")
    span = size_cells * grid_resolution
    q = desired_size_m / span
    best_k, best_gap = None, None
    for k in sorted({max(1, math.floor(q) - 1), max(1, math.floor(q)),
                     max(1, math.ceil(q)), max(1, math.ceil(q) + 1)}):
        gap = abs(desired_size_m - k * span)
        if best_gap is None or gap < best_gap:
            best_k, best_gap = k, gap
    return MapExtent(
        size_m=best_k * span,
        size_cells=int(size_cells),
        grid_resolution=float(grid_resolution),
        downsample_factor=best_k,
    )


def project_to_2d(grid, clearance_band, robot):
    """Collapse a voxel grid to a 2D map over a z clearance band.

    A column is Occupied if any band voxel is Occupied, Free if all are
    Free, Unknown otherwise. Free cells not 8-connected to the robot are
    then demoted to Unknown (free means reachable); the robot cell itself
    is forced Free.
    """
    nx, ny, nz = grid.dims
    z_lo, z_hi = clearance_band
    if not (0.0 <= z_lo < z_hi <= nz * grid.resolution):
        raise ValueError("clearance band must lie within the grid z extent")
    centers = (np.arange(nz) + 0.5) * grid.resolution
    band = (centers >= z_lo) & (centers <= z_hi)
    if not band.any():
        raise ValueError("clearance band contains no voxel centers")

    sel = grid.cells[:, :, band]
    occ_any = (sel == OCCUPIED).any(axis=2)
    free_all = (sel == FREE).all(axis=2)
    column = np.where(occ_any, OCCUPIED, np.where(free_all, FREE, UNKNOWN))
    cells = column.T.astype(np.uint8)  # [row=iy, col=ix]

    r, c = robot.cell
    if not (0 <= r < ny and 0 <= c < nx):
        raise ValueError("robot cell outside the grid footprint")
    if cells[r, c] == OCCUPIED:
        raise InconsistentPoseError(f"robot cell ({r}, {c}) projects to an occupied column")
    cells[r, c] = FREE

    reach = kernels.reachable_mask(cells == FREE, r, c)
    cells[(cells == FREE) & ~reach] = UNKNOWN
    return GridMap2D(cells, grid.resolution, (grid.origin[0], grid.origin[1]))


def downsample(grid_map, k):
    """Collapse k x k blocks with priority Occupied > Unknown > Free."""
    if k < 1:
        raise ValueError("downsample factor must be >= 1")
    rows, cols = grid_map.rows, grid_map.cols
    if rows % k or cols % k:
        raise ValueError(f"map dims ({rows}, {cols}) not divisible by k={k}")
    blocks = grid_map.cells.reshape(rows // k, k, cols // k, k)
    return GridMap2D(blocks.max(axis=(1, 3)), grid_map.resolution * k, grid_map.origin)


def crop_window(grid_map, center, size_cells):
    """Fixed-size window centered on a pose or (row, col); pads Unknown."""
    if size_cells < 1:
        raise ValueError("window size must be >= 1")
    row, col = getattr(center, "cell", center)
    r0 = row - size_cells // 2
    c0 = col - size_cells // 2
    out = np.full((size_cells, size_cells), UNKNOWN, dtype=np.uint8)
    sr0, sr1 = max(r0, 0), min(r0 + size_cells, grid_map.rows)
    sc0, sc1 = max(c0, 0), min(c0 + size_cells, grid_map.cols)
    if sr0 < sr1 and sc0 < sc1:
        out[sr0 - r0:sr1 - r0, sc0 - c0:sc1 - c0] = grid_map.cells[sr0:sr1, sc0:sc1]
    origin = (
        grid_map.origin[0] + c0 * grid_map.resolution,
        grid_map.origin[1] + r0 * grid_map.resolution,
    )
    return GridMap2D(out, grid_map.resolution, origin)
