"""Grid kernels versus independent oracles, plus numpy/numba parity."""

import numpy as np
import pytest

from conftest import dijkstra, frac_line, random_cells
from frontier_scout import kernels
from frontier_scout.backend import HAS_NUMBA


def bfs_reachable(free, sr, sc):
    h, w = free.shape
    reach = np.zeros((h, w), dtype=bool)
    if not free[sr, sc]:
        return reach
    reach[sr, sc] = True
    stack = [(sr, sc)]
    while stack:
        r, c = stack.pop()
        for dr, dc in kernels.NEIGHBORS_8:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and free[nr, nc] and not reach[nr, nc]:
                reach[nr, nc] = True
                stack.append((nr, nc))
    return reach


def visible_oracle(occupied, r0, c0, radius):
    h, w = occupied.shape
    vis = np.zeros((h, w), dtype=bool)
    for r in range(h):
        for c in range(w):
            if (r - r0) ** 2 + (c - c0) ** 2 > radius * radius:
                continue
            for rr, cc in frac_line(r0, c0, r, c):
                vis[rr, cc] = True
                if occupied[rr, cc]:
                    break
    return vis


def test_line_endpoints_and_steps():
    rng = np.random.default_rng(0)
    for _ in range(300):
        r0, c0, r1, c1 = rng.integers(-40, 40, size=4)
        line = kernels.line_cells(int(r0), int(c0), int(r1), int(c1))
        assert tuple(line[0]) == (r0, c0)
        assert tuple(line[-1]) == (r1, c1)
        assert len(line) == max(abs(r1 - r0), abs(c1 - c0)) + 1
        for a, b in zip(line[:-1], line[1:]):
            dr, dc = abs(int(b[0] - a[0])), abs(int(b[1] - a[1]))
            assert max(dr, dc) == 1, "consecutive line cells must be 8-adjacent"


def test_line_matches_rational_dda():
    rng = np.random.default_rng(1)
    endpoints = [(0, 0, 5, 2), (0, 0, -7, 3), (2, 2, 2, 2), (0, 0, 1, -9)]
    endpoints += [tuple(int(v) for v in rng.integers(-64, 64, size=4))
                  for _ in range(400)]
    for r0, c0, r1, c1 in endpoints:
        got = [tuple(map(int, cell)) for cell in kernels.line_cells(r0, c0, r1, c1)]
        assert got == frac_line(r0, c0, r1, c1)


def test_distance_field_matches_dijkstra():
    rng = np.random.default_rng(2)
    for i in range(40):
        cells = random_cells(rng, 24, 31, p_free=0.7, p_unknown=0.0)
        free = cells == 0
        sr, sc = rng.integers(0, 24), rng.integers(0, 31)
        free[sr, sc] = i % 5 != 0  # every fifth source sits on a wall
        got = kernels.distance_field(free, int(sr), int(sc))
        want = dijkstra(free, int(sr), int(sc))
        assert np.array_equal(got, want), "distance field must match Dijkstra exactly"
        assert np.all(np.isinf(got[~free]))


def test_reachable_matches_bfs():
    rng = np.random.default_rng(3)
    for _ in range(40):
        free = random_cells(rng, 30, 22, p_free=0.55, p_unknown=0.0) == 0
        sr, sc = int(rng.integers(0, 30)), int(rng.integers(0, 22))
        assert np.array_equal(kernels.reachable_mask(free, sr, sc),
                              bfs_reachable(free, sr, sc))


def test_visible_cells_matches_ray_walk():
    rng = np.random.default_rng(4)
    for radius in (2.0, 2.5, 4.0, 5.0):
        for _ in range(8):
            occupied = random_cells(rng, 21, 21, p_free=0.75, p_unknown=0.0) == 2
            r0, c0 = int(rng.integers(0, 21)), int(rng.integers(0, 21))
            got = kernels.visible_cells(occupied, r0, c0, radius)
            assert np.array_equal(got, visible_oracle(occupied, r0, c0, radius))


def test_visibility_stops_at_first_wall():
    occupied = np.zeros((5, 9), dtype=bool)
    occupied[2, 4] = True
    vis = kernels.visible_cells(occupied, 2, 0, 8.0)
    assert vis[2, 4], "the blocking wall itself is revealed"
    assert not vis[2, 5:].any(), "cells behind the wall stay hidden"
    assert vis[2, :5].all()


@pytest.mark.skipif(not HAS_NUMBA, reason="numba backend unavailable")
def test_backend_parity():
    rng = np.random.default_rng(5)
    prev = kernels.active_backend()
    try:
        for _ in range(10):
            free = random_cells(rng, 40, 40, p_free=0.6, p_unknown=0.0) == 0
            occupied = random_cells(rng, 40, 40, p_free=0.8, p_unknown=0.0) == 2
            r, c = int(rng.integers(0, 40)), int(rng.integers(0, 40))
            r1, c1 = int(rng.integers(-50, 90)), int(rng.integers(-50, 90))
            outs = {}
            for backend in ("numpy", "numba"):
                kernels.set_backend(backend)
                outs[backend] = (
                    kernels.distance_field(free, r, c),
                    kernels.reachable_mask(free, r, c),
                    kernels.visible_cells(occupied, r, c, 6.5),
                    kernels.line_cells(r, c, r1, c1),
                )
            for a, b in zip(outs["numpy"], outs["numba"]):
                assert np.array_equal(a, b), "backends must agree bit for bit"
    finally:
        kernels.set_backend(prev)


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("cuda")
