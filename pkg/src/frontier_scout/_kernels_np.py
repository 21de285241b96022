"""Vectorized numpy implementations of the hot grid kernels.

All kernels operate in cell units on boolean masks; callers scale by map
resolution. The numba twin in _kernels_nb.py must produce identical output
(asserted in tests), so any change here needs the same change there.

Line discretization is a half-up DDA: for a segment of L = max(|dr|, |dc|)
steps, the cell at step s is (r0 + floor(s*dr/L + 0.5), c0 + floor(s*dc/L + 0.5)).
"""

import numpy as np

SQRT2 = float(np.sqrt(2.0))

# relaxation / neighbor order: N, NE, E, SE, S, SW, W, NW
NEIGHBORS_8 = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def line_cells(r0, c0, r1, c1):
    """Cells of the discretized segment from (r0,c0) to (r1,c1), inclusive."""
    dr = r1 - r0
    dc = c1 - c0
    n = max(abs(dr), abs(dc))
    if n == 0:
        return np.array([[r0, c0]], dtype=np.int64)
    s = np.arange(n + 1, dtype=np.float64)
    rows = r0 + np.floor(s * dr / n + 0.5).astype(np.int64)
    cols = c0 + np.floor(s * dc / n + 0.5).astype(np.int64)
    return np.stack([rows, cols], axis=1)


def _shifted(a, dr, dc, fill):
    out = np.full_like(a, fill)
    h, w = a.shape
    sr0, sr1 = max(dr, 0), min(h + dr, h)
    tr0, tr1 = max(-dr, 0), min(h - dr, h)
    out[sr0:sr1, max(dc, 0):min(w + dc, w)] = a[tr0:tr1, max(-dc, 0):min(w - dc, w)]
    return out


def reachable_mask(free, seed_r, seed_c):
    """8-connected reachability over free cells from the seed cell."""
    reach = np.zeros_like(free, dtype=np.bool_)
    if not free[seed_r, seed_c]:
        return reach
    reach[seed_r, seed_c] = True
    while True:
        grown = reach.copy()
        for dr, dc in NEIGHBORS_8:
            grown |= _shifted(reach, dr, dc, False)
        grown &= free
        if np.array_equal(grown, reach):
            return reach
        reach = grown


def distance_field(free, src_r, src_c):
    """8-connected geodesic distances (cells) from the source over free cells.

    Axis moves cost 1, diagonal moves sqrt(2); unreachable and non-free
    cells are +inf. Bellman relaxation to fixpoint; the float result is
    bit-identical to the Dijkstra twin (both compute the min over ordered
    path sums).
    """
    dist = np.full(free.shape, np.inf, dtype=np.float64)
    if not free[src_r, src_c]:
        return dist
    dist[src_r, src_c] = 0.0
    while True:
        new = dist.copy()
        for dr, dc in NEIGHBORS_8:
            cost = SQRT2 if dr != 0 and dc != 0 else 1.0
            np.minimum(new, _shifted(dist, dr, dc, np.inf) + cost, out=new)
        new[~free] = np.inf
        new[src_r, src_c] = 0.0
        if np.array_equal(new, dist):
            return dist
        dist = new


def visible_cells(occupied, r0, c0, radius_cells):
    """Ray-cast visibility mask from (r0, c0).

    Targets are the in-bounds cells whose center lies within radius_cells
    of the robot cell center. Each target's DDA line is walked from the
    robot; cells are visible up to and including the first occupied cell.
    """
    h, w = occupied.shape
    vis = np.zeros((h, w), dtype=np.bool_)
    rad = min(int(np.floor(radius_cells)), max(h, w))
    dr = np.arange(-rad, rad + 1, dtype=np.int64)
    drr, dcc = np.meshgrid(dr, dr, indexing="ij")
    in_radius = drr * drr + dcc * dcc <= radius_cells * radius_cells
    tr = r0 + drr[in_radius]
    tc = c0 + dcc[in_radius]
    inb = (tr >= 0) & (tr < h) & (tc >= 0) & (tc < w)
    tr, tc = tr[inb], tc[inb]
    if tr.size == 0:
        return vis

    seg_r = (tr - r0).astype(np.float64)
    seg_c = (tc - c0).astype(np.float64)
    lens = np.maximum(np.abs(tr - r0), np.abs(tc - c0))
    lens_safe = np.maximum(lens, 1).astype(np.float64)
    smax = int(lens.max())
    s = np.minimum(np.arange(smax + 1, dtype=np.int64)[None, :], lens[:, None])
    s = s.astype(np.float64)
    pos_r = r0 + np.floor(s * seg_r[:, None] / lens_safe[:, None] + 0.5).astype(np.int64)
    pos_c = c0 + np.floor(s * seg_c[:, None] / lens_safe[:, None] + 0.5).astype(np.int64)

    occ_at = occupied[pos_r, pos_c]
    blocked = np.zeros_like(occ_at)
    blocked[:, 1:] = np.logical_or.accumulate(occ_at, axis=1)[:, :-1]
    keep = ~blocked
    vis[pos_r[keep], pos_c[keep]] = True
    return vis
