"""Frontier detection, clustering, goal projection, dedup, and the
assembled candidate list, checked against definitional oracles."""

import numpy as np
import pytest

from conftest import dijkstra, random_cells
from frontier_scout import (
    BORDER_PROJECTION,
    FREE,
    FRONTIER,
    IN_MAP_GOAL,
    OCCUPIED,
    TERMINAL_GOAL,
    UNKNOWN,
    WALL_PROJECTION,
    Candidate,
    GoalMark,
    GridMap2D,
    NoCandidatesError,
    Pose2D,
    cluster_frontiers,
    deduplicate,
    detect_frontiers,
    generate_candidates,
    goal_projection,
    parse_string,
)
from frontier_scout.kernels import NEIGHBORS_8


def frontier_oracle(cells):
    """The definition, as a double loop: free cell with an unknown 8-neighbor."""
    h, w = cells.shape
    out = set()
    for r in range(h):
        for c in range(w):
            if cells[r, c] != FREE:
                continue
            for dr, dc in NEIGHBORS_8:
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w and cells[nr, nc] == UNKNOWN:
                    out.add((r, c))
                    break
    return out


class TestDetect:
    def test_matches_definition_on_random_maps(self):
        rng = np.random.default_rng(20)
        for _ in range(60):
            h, w = int(rng.integers(1, 40)), int(rng.integers(1, 40))
            cells = random_cells(rng, h, w)
            gm = GridMap2D(cells, 0.5, (0, 0))
            assert detect_frontiers(gm) == frontier_oracle(cells)

    def test_all_free_has_no_frontiers(self):
        gm = GridMap2D(np.full((6, 6), FREE, np.uint8), 1.0, (0, 0))
        assert detect_frontiers(gm) == set()

    def test_single_unknown_corner(self):
        cells = np.full((3, 3), FREE, np.uint8)
        cells[0, 0] = UNKNOWN
        gm = GridMap2D(cells, 1.0, (0, 0))
        assert detect_frontiers(gm) == {(0, 1), (1, 0), (1, 1)}

    def test_map_edge_is_not_unknown(self):
        # free cells on the border have out-of-bounds neighbors only
        cells = np.full((3, 3), FREE, np.uint8)
        cells[2, 2] = OCCUPIED
        gm = GridMap2D(cells, 1.0, (0, 0))
        assert detect_frontiers(gm) == set()


class TestClusters:
    def test_empty(self):
        assert cluster_frontiers(set()) == []

    def test_diagonal_pair_is_one_cluster(self):
        out = cluster_frontiers({(0, 0), (1, 1)})
        assert len(out) == 1
        assert out[0].cells == frozenset({(0, 0), (1, 1)})

    def test_l_shape_centroid_and_representative(self):
        out = cluster_frontiers({(0, 0), (1, 0), (2, 0), (2, 1), (2, 2)})
        assert len(out) == 1
        assert out[0].centroid == (1.4, 0.6)
        assert out[0].representative == (1, 0)  # ties with (2,1); smaller row wins

    def test_partition_maximality_and_order(self):
        rng = np.random.default_rng(21)
        for _ in range(40):
            cells = random_cells(rng, 25, 25)
            frontiers = detect_frontiers(GridMap2D(cells, 1.0, (0, 0)))
            clusters = cluster_frontiers(frontiers)

            union = set()
            for cl in clusters:
                assert cl.cells, "clusters are nonempty"
                assert not (union & cl.cells), "clusters are disjoint"
                union |= cl.cells
                assert connected_8(cl.cells)
            assert union == frontiers, "clusters cover every frontier cell"

            # maximality: no two clusters touch
            for i, a in enumerate(clusters):
                for b in clusters[i + 1:]:
                    assert not adjacent_8(a.cells, b.cells)

            # id order follows the row-major smallest member
            mins = [min(cl.cells) for cl in clusters]
            assert mins == sorted(mins)
            assert [cl.id for cl in clusters] == list(range(len(clusters)))

            for cl in clusters:
                assert cl.representative in cl.cells
                best = min((cell[0] - cl.centroid[0]) ** 2 +
                           (cell[1] - cl.centroid[1]) ** 2 for cell in cl.cells)
                got = ((cl.representative[0] - cl.centroid[0]) ** 2 +
                       (cl.representative[1] - cl.centroid[1]) ** 2)
                assert got == pytest.approx(best, abs=0)


def connected_8(cells):
    cells = set(cells)
    start = next(iter(cells))
    seen = {start}
    stack = [start]
    while stack:
        r, c = stack.pop()
        for dr, dc in NEIGHBORS_8:
            nb = (r + dr, c + dc)
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return seen == cells


def adjacent_8(a, b):
    return any((r + dr, c + dc) in b for r, c in a for dr, dc in NEIGHBORS_8)


class TestGoalProjection:
    @staticmethod
    def open_map(h=7, w=9):
        return GridMap2D(np.full((h, w), FREE, np.uint8), 1.0, (0, 0))

    def test_goal_inside_window(self):
        gm = self.open_map()
        robot = Pose2D.from_cell(gm, 3, 3)
        mark = goal_projection(gm, robot, gm.cell_to_world(5, 7))
        assert mark == GoalMark((5, 7), IN_MAP_GOAL)

    def test_goal_inside_window_on_wall_still_in_map(self):
        cells = np.full((5, 5), FREE, np.uint8)
        cells[4, 4] = OCCUPIED
        gm = GridMap2D(cells, 1.0, (0, 0))
        mark = goal_projection(gm, Pose2D.from_cell(gm, 0, 0), gm.cell_to_world(4, 4))
        assert mark.kind == IN_MAP_GOAL

    def test_border_projection_due_east(self):
        gm = self.open_map()
        robot = Pose2D.from_cell(gm, 3, 3)
        far_east = (100.0, robot.world[1])
        mark = goal_projection(gm, robot, far_east)
        assert mark == GoalMark((3, 8), BORDER_PROJECTION)

    def test_border_projection_diagonal(self):
        gm = self.open_map(7, 7)
        robot = Pose2D.from_cell(gm, 3, 3)
        mark = goal_projection(gm, robot, (-50.0, -50.0))
        assert mark == GoalMark((0, 0), BORDER_PROJECTION)

    def test_wall_projection_stops_before_wall(self):
        cells = np.full((5, 9), FREE, np.uint8)
        cells[2, 4] = OCCUPIED
        gm = GridMap2D(cells, 1.0, (0, 0))
        robot = Pose2D.from_cell(gm, 2, 2)
        mark = goal_projection(gm, robot, (100.0, robot.world[1]))
        assert mark == GoalMark((2, 3), WALL_PROJECTION)

    def test_robot_must_be_free(self):
        cells = np.full((3, 3), FREE, np.uint8)
        cells[1, 1] = OCCUPIED
        gm = GridMap2D(cells, 1.0, (0, 0))
        with pytest.raises(ValueError):
            goal_projection(gm, Pose2D((1, 1), gm.cell_to_world(1, 1)), (99.0, 99.0))


def cand(cid, cell, gm, kind=FRONTIER):
    return Candidate(cid, cell, gm.cell_to_world(*cell), kind)


class TestDeduplicate:
    def test_d_min_zero_is_identity(self):
        gm = GridMap2D(np.full((5, 5), FREE, np.uint8), 1.0, (0, 0))
        cands = [cand(0, (1, 1), gm), cand(1, (1, 2), gm), cand(2, (3, 3), gm)]
        mark = GoalMark((4, 4), IN_MAP_GOAL)
        assert deduplicate(cands, gm, 0.0, mark) == cands

    def test_single_pair_keeps_goal_closer(self):
        gm = GridMap2D(np.full((5, 7), FREE, np.uint8), 0.5, (0, 0))
        mark = GoalMark((2, 6), IN_MAP_GOAL)
        a, b = cand(0, (2, 2), gm), cand(1, (2, 3), gm)
        out = deduplicate([a, b], gm, 3 * 0.5, mark)
        assert out == [b]

    def test_corridor_chain_merges_transitively(self):
        # three candidates on one corridor, pairwise geodesic 2 cells; with
        # d_min = 2.5 cells the far pair (4 cells apart) still merges through
        # the middle one
        cells = np.full((3, 9), OCCUPIED, np.uint8)
        cells[1, :] = FREE
        gm = GridMap2D(cells, 1.0, (0, 0))
        mark = GoalMark((1, 8), IN_MAP_GOAL)
        cands = [cand(0, (1, 2), gm), cand(1, (1, 4), gm), cand(2, (1, 6), gm)]
        out = deduplicate(cands, gm, 2.5, mark)
        assert [c.id for c in out] == [2]

    def test_walls_break_equivalence(self):
        # same cells, but a wall between them forces the long way around
        cells = np.full((5, 5), FREE, np.uint8)
        cells[0:4, 2] = OCCUPIED
        gm = GridMap2D(cells, 1.0, (0, 0))
        mark = GoalMark((0, 4), IN_MAP_GOAL)
        cands = [cand(0, (0, 1), gm), cand(1, (0, 3), gm)]
        out = deduplicate(cands, gm, 3.0, mark)
        assert len(out) == 2, "geodesic, not euclidean, proximity decides"

    def test_terminal_goal_survives(self):
        gm = GridMap2D(np.full((5, 5), FREE, np.uint8), 1.0, (0, 0))
        mark = GoalMark((0, 0), IN_MAP_GOAL)
        frontier = cand(0, (2, 2), gm)           # closer to the mark
        terminal = cand(1, (2, 3), gm, TERMINAL_GOAL)
        out = deduplicate([frontier, terminal], gm, 5.0, mark)
        assert [c.source_kind for c in out] == [TERMINAL_GOAL]

    def test_matches_group_oracle_on_random_maps(self):
        rng = np.random.default_rng(22)
        checked = 0
        while checked < 30:
            cells = random_cells(rng, 18, 18, p_free=0.6, p_unknown=0.25)
            gm = GridMap2D(cells, 0.5, (0, 0))
            reps = sorted(cl.representative for cl in
                          cluster_frontiers(detect_frontiers(gm)))
            if not 2 <= len(reps) <= 10:
                continue
            checked += 1
            cands = [cand(i, cell, gm) for i, cell in enumerate(reps)]
            mark = GoalMark((int(rng.integers(0, 18)), int(rng.integers(0, 18))),
                            IN_MAP_GOAL)
            d_min = float(rng.choice([0.5, 1.0, 1.5, 2.5]))

            out = deduplicate(cands, gm, d_min, mark)
            assert set(c.id for c in out) == dedup_oracle(cands, gm, d_min, mark)
            assert deduplicate(out, gm, d_min, mark) == out, "dedup is idempotent"
            assert len(out) <= len(cands)


def dedup_oracle(cands, gm, d_min, mark):
    free = gm.free_mask()
    n = len(cands)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            i = parent[i]
        return i

    for i in range(n):
        field = dijkstra(free, *cands[i].cell)
        for j in range(i + 1, n):
            if field[cands[j].cell] * gm.resolution <= d_min:
                parent[find(i)] = find(j)

    keep = set()
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(cands[i])
    for members in groups.values():
        best = min(members, key=lambda c: ((c.cell[0] - mark.cell[0]) ** 2 +
                                           (c.cell[1] - mark.cell[1]) ** 2, c.id))
        keep.add(best.id)
    return keep


OFFICE = (
    "####################\n"
    "#..R...............#\n"
    "##.###.###.###.#####\n"
    "????????????????????\n"
)


class TestGenerateCandidates:
    def test_office_fixture_yields_one_candidate_per_doorway(self):
        am = parse_string(OFFICE, resolution=1.0)
        gm = am.map
        robot = Pose2D.from_cell(gm, *am.robot)
        goal_world = gm.cell_to_world(3, 10)  # somewhere in the unexplored south
        cands, mark = generate_candidates(gm, robot, goal_world, d_min=3.0)
        assert mark == GoalMark((3, 10), IN_MAP_GOAL)
        assert [c.cell for c in cands] == [(2, 2), (2, 6), (2, 10), (2, 14)]
        assert [c.id for c in cands] == [0, 1, 2, 3]
        assert all(c.source_kind == FRONTIER for c in cands)

    def test_fully_known_map_yields_terminal_goal_only(self):
        cells = np.full((6, 6), FREE, np.uint8)
        cells[3, :4] = OCCUPIED
        gm = GridMap2D(cells, 1.0, (0, 0))
        robot = Pose2D.from_cell(gm, 1, 1)
        cands, mark = generate_candidates(gm, robot, gm.cell_to_world(5, 1), 3.0)
        assert len(cands) == 1
        assert cands[0].source_kind == TERMINAL_GOAL
        assert cands[0].cell == (5, 1)
        assert mark.kind == IN_MAP_GOAL

    def test_unreachable_goal_on_known_map_raises(self):
        cells = np.full((5, 5), FREE, np.uint8)
        cells[2, :] = OCCUPIED  # full wall, no frontiers, goal cut off
        gm = GridMap2D(cells, 1.0, (0, 0))
        robot = Pose2D.from_cell(gm, 0, 0)
        with pytest.raises(NoCandidatesError):
            generate_candidates(gm, robot, gm.cell_to_world(4, 4), 3.0)

    def test_single_unknown_region_north(self):
        cells = np.full((6, 6), FREE, np.uint8)
        cells[0:2, :] = UNKNOWN
        gm = GridMap2D(cells, 1.0, (0, 0))
        robot = Pose2D.from_cell(gm, 4, 2)
        cands, _ = generate_candidates(gm, robot, gm.cell_to_world(4, 4), 0.0)
        frontier_cands = [c for c in cands if c.source_kind == FRONTIER]
        assert len(frontier_cands) == 1
        assert frontier_cands[0].cell[0] == 2, "boundary row below the unknown block"

    def test_ids_contiguous_terminal_last_on_random_maps(self):
        rng = np.random.default_rng(23)
        from frontier_scout.kernels import reachable_mask

        runs = 0
        while runs < 40:
            cells = random_cells(rng, 20, 20, p_free=0.6, p_unknown=0.25)
            gm = GridMap2D(cells, 0.5, (0, 0))
            free_at = np.argwhere(gm.free_mask())
            if free_at.size == 0:
                continue
            rr, cc = free_at[rng.integers(0, len(free_at))]
            robot = Pose2D.from_cell(gm, int(rr), int(cc))
            goal_cell = (int(rng.integers(0, 20)), int(rng.integers(0, 20)))
            goal_world = gm.cell_to_world(*goal_cell)
            try:
                cands, mark = generate_candidates(gm, robot, goal_world, 1.0)
            except NoCandidatesError:
                continue
            runs += 1

            assert [c.id for c in cands] == list(range(len(cands)))
            kinds = [c.source_kind for c in cands]
            assert kinds.count(TERMINAL_GOAL) <= 1
            if TERMINAL_GOAL in kinds:
                assert kinds[-1] == TERMINAL_GOAL, "terminal goal takes the last id"

            # terminal goal appears iff free + reachable through free space
            reach = reachable_mask(gm.free_mask(), int(rr), int(cc))
            expect_terminal = (gm.cells[goal_cell] == FREE) and bool(reach[goal_cell])
            assert (TERMINAL_GOAL in kinds) == expect_terminal

            frontier_set = detect_frontiers(gm)
            for c in cands:
                if c.source_kind == FRONTIER:
                    assert c.cell in frontier_set
