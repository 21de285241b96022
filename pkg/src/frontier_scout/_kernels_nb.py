"""Numba @njit implementations of the hot grid kernels.

Loop twins of _kernels_np.py. The two backends must stay bit-identical:
same cost constants, same half-up DDA arithmetic (s * d / L grouping),
same radius comparison. Tests assert equality on random inputs.
"""

import math

import numpy as np
from numba import njit

SQRT2 = math.sqrt(2.0)


@njit(cache=True)
def line_cells(r0, c0, r1, c1):
    dr = r1 - r0
    dc = c1 - c0
    n = max(abs(dr), abs(dc))
    out = np.empty((n + 1, 2), dtype=np.int64)
    if n == 0:
        out[0, 0] = r0
        out[0, 1] = c0
        return out
    for s in range(n + 1):
        out[s, 0] = r0 + int(math.floor(s * float(dr) / n + 0.5))
        out[s, 1] = c0 + int(math.floor(s * float(dc) / n + 0.5))
    return out


@njit(cache=True)
def reachable_mask(free, seed_r, seed_c):
    h, w = free.shape
    reach = np.zeros((h, w), dtype=np.bool_)
    if not free[seed_r, seed_c]:
        return reach
    stack_r = np.empty(h * w, dtype=np.int64)
    stack_c = np.empty(h * w, dtype=np.int64)
    top = 0
    stack_r[top] = seed_r
    stack_c[top] = seed_c
    top += 1
    reach[seed_r, seed_c] = True
    while top > 0:
        top -= 1
        r = stack_r[top]
        c = stack_c[top]
        for dr in range(-1, 2):
            for dc in range(-1, 2):
                if dr == 0 and dc == 0:
                    continue
                nr = r + dr
                nc = c + dc
                if 0 <= nr < h and 0 <= nc < w and free[nr, nc] and not reach[nr, nc]:
                    reach[nr, nc] = True
                    stack_r[top] = nr
                    stack_c[top] = nc
                    top += 1
    return reach


@njit(cache=True)
def distance_field(free, src_r, src_c):
    """Dijkstra over the 8-connected grid, lazy-deletion binary heap."""
    h, w = free.shape
    dist = np.full((h, w), np.inf, dtype=np.float64)
    if not free[src_r, src_c]:
        return dist
    n = h * w
    cap = 8 * n + 8
    heap_d = np.empty(cap, dtype=np.float64)
    heap_i = np.empty(cap, dtype=np.int64)
    size = 0

    dist[src_r, src_c] = 0.0
    heap_d[0] = 0.0
    heap_i[0] = src_r * w + src_c
    size = 1

    while size > 0:
        d0 = heap_d[0]
        idx = heap_i[0]
        size -= 1
        heap_d[0] = heap_d[size]
        heap_i[0] = heap_i[size]
        # sift down
        pos = 0
        while True:
            child = 2 * pos + 1
            if child >= size:
                break
            if child + 1 < size and heap_d[child + 1] < heap_d[child]:
                child += 1
            if heap_d[child] < heap_d[pos]:
                heap_d[pos], heap_d[child] = heap_d[child], heap_d[pos]
                heap_i[pos], heap_i[child] = heap_i[child], heap_i[pos]
                pos = child
            else:
                break

        r = idx // w
        c = idx % w
        if d0 > dist[r, c]:
            continue
        for dr in range(-1, 2):
            for dc in range(-1, 2):
                if dr == 0 and dc == 0:
                    continue
                nr = r + dr
                nc = c + dc
                if nr < 0 or nr >= h or nc < 0 or nc >= w or not free[nr, nc]:
                    continue
                cost = SQRT2 if dr != 0 and dc != 0 else 1.0
                nd = d0 + cost
                if nd < dist[nr, nc]:
                    dist[nr, nc] = nd
                    # push, sift up
                    pos = size
                    heap_d[pos] = nd
                    heap_i[pos] = nr * w + nc
                    size += 1
                    while pos > 0:
                        parent = (pos - 1) // 2
                        if heap_d[pos] < heap_d[parent]:
                            heap_d[pos], heap_d[parent] = heap_d[parent], heap_d[pos]
                            heap_i[pos], heap_i[parent] = heap_i[parent], heap_i[pos]
                            pos = parent
                        else:
                            break
    return dist


@njit(cache=True)
def visible_cells(occupied, r0, c0, radius_cells):
    h, w = occupied.shape
    vis = np.zeros((h, w), dtype=np.bool_)
    rad = min(int(math.floor(radius_cells)), max(h, w))
    rad2 = radius_cells * radius_cells
    for dr in range(-rad, rad + 1):
        for dc in range(-rad, rad + 1):
            if dr * dr + dc * dc > rad2:
                continue
            tr = r0 + dr
            tc = c0 + dc
            if tr < 0 or tr >= h or tc < 0 or tc >= w:
                continue
            n = max(abs(dr), abs(dc))
            nf = float(max(n, 1))
            for s in range(n + 1):
                pr = r0 + int(math.floor(s * float(dr) / nf + 0.5))
                pc = c0 + int(math.floor(s * float(dc) / nf + 0.5))
                vis[pr, pc] = True
                if occupied[pr, pc]:
                    break
    return vis
