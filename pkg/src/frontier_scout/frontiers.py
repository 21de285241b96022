"""Frontier detection, clustering, goal projection, and candidate assembly.

A frontier is a free cell with at least one unknown 8-neighbor. Clusters
are maximal 8-connected sets of frontier cells; each contributes one
candidate (the member nearest the cluster centroid). Route-equivalent
candidates are merged by geodesic proximity, and the terminal goal joins
the list when it is visible and reachable.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoCandidatesError
from .grid import FREE, OCCUPIED

FRONTIER = "frontier"
TERMINAL_GOAL = "terminal_goal"
GOAL_PROJECTION = "goal_projection"

IN_MAP_GOAL = "in_map_goal"
BORDER_PROJECTION = "border_projection"
WALL_PROJECTION = "wall_projection"


@dataclass(frozen=True)
class FrontierCluster:
    id: int
    cells: frozenset  # of (row, col)
    centroid: tuple[float, float]
    representative: tuple[int, int]


@dataclass(frozen=True)
class Candidate:
    id: int
    cell: tuple[int, int]
    world: tuple[float, float]
    source_kind: str  # FRONTIER | TERMINAL_GOAL | GOAL_PROJECTION
    cluster_id: int | None = None


@dataclass(frozen=True)
class GoalMark:
    cell: tuple[int, int]
    kind: str  # IN_MAP_GOAL | BORDER_PROJECTION | WALL_PROJECTION


def detect_frontiers(grid_map):
    """Free cells with >= 1 unknown 8-neighbor (out of bounds is not unknown)."""
    unknown = grid_map.unknown_mask()
    near_unknown = np.zeros_like(unknown)
    for dr, dc in kernels.NEIGHBORS_8:
        h, w = unknown.shape
        sr0, sr1 = max(dr, 0), min(h + dr, h)
        sc0, sc1 = max(dc, 0), min(w + dc, w)
        near_unknown[sr0:sr1, sc0:sc1] |= unknown[max(-dr, 0):min(h - dr, h),
                                                  max(-dc, 0):min(w - dc, w)]
    mask = grid_map.free_mask() & near_unknown
    rows, cols = np.nonzero(mask)
    return {(int(r), int(c)) for r, c in zip(rows, cols)}


def cluster_frontiers(frontiers):
    """Partition frontier cells into maximal 8-connected clusters.

    Clusters are ordered by their row-major smallest member. The
    representative is the member nearest the centroid (ties: smallest
    row, then col).
    """
    remaining = set(frontiers)
    components = []
    for start in sorted(remaining):
        if start not in remaining:
            continue
        comp = []
        stack = [start]
        remaining.discard(start)
        while stack:
            r, c = stack.pop()
            comp.append((r, c))
            for dr, dc in kernels.NEIGHBORS_8:
                nb = (r + dr, c + dc)
                if nb in remaining:
                    remaining.discard(nb)
                    stack.append(nb)
        components.append(comp)

    clusters = []
    for cid, comp in enumerate(components):
        cr = sum(r for r, _ in comp) / len(comp)
        cc = sum(c for _, c in comp) / len(comp)
        rep = min(comp, key=lambda cell: ((cell[0] - cr) ** 2 + (cell[1] - cc) ** 2,
                                          cell[0], cell[1]))
        clusters.append(FrontierCluster(cid, frozenset(comp), (cr, cc), rep))
    return clusters


def goal_projection(grid_map, robot, goal_world):
    """Locate the goal inside the map, or project it toward the robot's view.

    In-window goals are marked directly. Otherwise the discretized line
    from the robot toward the goal is marched: leaving the window yields a
    border projection at the last in-window cell, hitting an occupied cell
    yields a wall projection at the last non-occupied cell.
    """
    if grid_map.cells[robot.cell] != FREE:
        raise ValueError("robot cell must be free")
    gr, gc = grid_map.world_to_cell(*goal_world)
    if grid_map.in_bounds(gr, gc):
        return GoalMark((gr, gc), IN_MAP_GOAL)

    line = kernels.line_cells(robot.cell[0], robot.cell[1], gr, gc)
    mark = robot.cell
    for r, c in line[1:]:
        r, c = int(r), int(c)
        if not grid_map.in_bounds(r, c):
            return GoalMark(mark, BORDER_PROJECTION)
        if grid_map.cells[r, c] == OCCUPIED:
            return GoalMark(mark, WALL_PROJECTION)
        mark = (r, c)
    return GoalMark(mark, BORDER_PROJECTION)


def deduplicate(candidates, grid_map, d_min, goal_mark):
    """Merge route-equivalent candidates (geodesic distance <= d_min).

    Groups are the transitive closure of pairwise proximity through free
    cells; the survivor is the member nearest the goal mark (ties: lowest
    id). Terminal-goal candidates always survive.
    """
    if d_min < 0:
        raise ValueError("d_min must be >= 0")
    n = len(candidates)
    if n <= 1:
        return list(candidates)

    free = grid_map.free_mask()
    res = grid_map.resolution
    fields = {}
    for cand in candidates:
        fields[cand.id] = kernels.distance_field(free, cand.cell[0], cand.cell[1])

    # union-find over pairwise geodesic proximity
    parent = {c.id: c.id for c in candidates}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, a in enumerate(candidates):
        for b in candidates[i + 1:]:
            d = fields[a.id][b.cell] * res
            if d <= d_min:
                parent[find(a.id)] = find(b.id)

    groups = {}
    for cand in candidates:
        groups.setdefault(find(cand.id), []).append(cand)

    def goal_gap(cand):
        dr = cand.cell[0] - goal_mark.cell[0]
        dc = cand.cell[1] - goal_mark.cell[1]
        return (dr * dr + dc * dc, cand.id)

    keep = set()
    for members in groups.values():
        terminals = [c for c in members if c.source_kind == TERMINAL_GOAL]
        if terminals:
            keep.update(c.id for c in terminals)
        else:
            keep.add(min(members, key=goal_gap).id)
    return [c for c in candidates if c.id in keep]


def generate_candidates(grid_map, robot, goal_world, d_min):
    """Full subgoal pipeline: detect, cluster, dedup, append terminal goal.

    Returns (candidates, goal_mark) with candidate ids renumbered 0..m-1
    (the terminal goal, when present, takes the last id). Raises
    NoCandidatesError when nothing is scoreable.
    """
    if grid_map.cells[robot.cell] != FREE:
        raise ValueError("robot cell must be free")
    clusters = cluster_frontiers(detect_frontiers(grid_map))
    mark = goal_projection(grid_map, robot, goal_world)

    cands = [
        Candidate(
            id=cl.id,
            cell=cl.representative,
            world=grid_map.cell_to_world(*cl.representative),
            source_kind=FRONTIER,
            cluster_id=cl.id,
        )
        for cl in clusters
    ]
    cands = deduplicate(cands, grid_map, d_min, mark)

    gr, gc = grid_map.world_to_cell(*goal_world)
    if grid_map.in_bounds(gr, gc) and grid_map.cells[gr, gc] == FREE:
        reach = kernels.reachable_mask(grid_map.free_mask(), robot.cell[0], robot.cell[1])
        if reach[gr, gc]:
            cands.append(Candidate(
                id=-1,
                cell=(gr, gc),
                world=grid_map.cell_to_world(gr, gc),
                source_kind=TERMINAL_GOAL,
            ))

    if not cands:
        raise NoCandidatesError("no frontier clusters and the goal is not reachable")

    renumbered = [
        Candidate(i, c.cell, c.world, c.source_kind, c.cluster_id)
        for i, c in enumerate(cands)
    ]
    return renumbered, mark
