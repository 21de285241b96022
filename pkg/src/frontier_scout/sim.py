"""Deterministic grid-world: ray-cast reveal, plan-score-move loop, benchmark.

The hidden true map is revealed by line-of-sight ray casting; planning
alternates between a direct dash to the goal when it is known reachable
and scored frontier selection otherwise. All motion is 8-connected with
axis cost = resolution and diagonal cost = sqrt(2) * resolution.
"""

import hashlib
import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import kernels
from .beliefs import aggregate
from .errors import NoCandidatesError, ScorerFailureError
from .frontiers import (IN_MAP_GOAL, Candidate, detect_frontiers,
                        generate_candidates)
from .grid import (FREE, UNKNOWN, GridMap2D, Pose2D, compute_map_extent,
                   crop_window, downsample)
from .render import parse_string
from .scoring import ScorerConfig, make_scorer, make_snapshot

logger = logging.getLogger(__name__)

SQRT2 = kernels.SQRT2


@dataclass(frozen=True)
class TrueMap:
    """Fully known ground-truth map with its start and goal cells."""

    grid: GridMap2D
    start: tuple[int, int]
    goal: tuple[int, int]


@dataclass(frozen=True)
class EpisodeConfig:
    map_path: str
    resolution: float = 0.5
    sensor_radius: float = 2.5
    window_cells: int = 48
    window_meters: float = 24.0
    n_samples: int = 3
    scorer: ScorerConfig = field(default_factory=ScorerConfig)
    d_min: float | None = None
    max_steps: int = 500
    replan_interval: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.resolution <= 0:
            raise ValueError("resolution must be > 0")
        if self.sensor_radius <= 0:
            raise ValueError("sensor_radius must be > 0")
        if self.window_cells < 1:
            raise ValueError("window_cells must be >= 1")
        if self.window_meters <= 0:
            raise ValueError("window_meters must be > 0")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.d_min is not None and self.d_min < 0:
            raise ValueError("d_min must be >= 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.replan_interval < 1:
            raise ValueError("replan_interval must be >= 1")


@dataclass(frozen=True)
class StepReport:
    """One scored planning step: what the scorer saw and what it decided."""

    move_index: int
    digest: dict
    samples: list
    report: object


@dataclass(frozen=True)
class EpisodeResult:
    reached_goal: bool
    path: list
    path_length_m: float
    steps: int
    revisit_ratio: float
    per_step_reports: list
    scorer_calls: int
    failure: str | None = None


def load_true_map(path, resolution=0.5):
    """Read a ground-truth map file ('#', '.', 'R' start, 'G' goal)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    am = parse_string(text, resolution)
    if bool(am.map.unknown_mask().any()):
        raise ValueError("true map contains unknown cells")
    if am.candidates:
        raise ValueError("true map must not contain candidate markers")
    if am.goal_mark is None or am.goal_mark.kind != IN_MAP_GOAL:
        raise ValueError("true map needs exactly one in-map goal marker 'G'")
    start, goal = am.robot, am.goal_mark.cell
    reach = kernels.reachable_mask(am.map.free_mask(), start[0], start[1])
    if not reach[goal]:
        raise ValueError("start and goal are not connected through free space")
    return TrueMap(am.map, start, goal)


def reveal(true_map, known, robot, radius):
    """Merge all line-of-sight visible true cells into the known map.

    Rays stop at (and include) the first occupied cell; knowledge is
    monotone because unseen cells keep their previous state.
    """
    grid = true_map.grid
    if grid.cells[robot] != FREE:
        raise ValueError("robot cell must be free on the true map")
    radius_cells = radius / grid.resolution
    visible = kernels.visible_cells(
        grid.occupied_mask(), int(robot[0]), int(robot[1]), radius_cells)
    merged = np.where(visible, grid.cells, known.cells)
    return known.with_cells(merged)


def plan_path(known, frm, to):
    """Shortest 8-connected path through known-free cells, or [].

    Ties are broken by neighbor order N, NE, E, SE, S, SW, W, NW while
    descending the distance-to-target field.
    """
    frm = (int(frm[0]), int(frm[1]))
    to = (int(to[0]), int(to[1]))
    if known.cells[frm] != FREE or known.cells[to] != FREE:
        return []
    if frm == to:
        return [frm]
    free = known.free_mask()
    dist = kernels.distance_field(free, to[0], to[1])
    if not np.isfinite(dist[frm]):
        return []
    path = [frm]
    cur = frm
    while cur != to:
        best_val = np.inf
        best_cell = None
        for dr, dc in kernels.NEIGHBORS_8:
            nr, nc = cur[0] + dr, cur[1] + dc
            if not known.in_bounds(nr, nc) or not free[nr, nc]:
                continue
            val = (SQRT2 if dr != 0 and dc != 0 else 1.0) + dist[nr, nc]
            if val < best_val:
                best_val = val
                best_cell = (nr, nc)
        cur = best_cell
        path.append(cur)
    return path


def _is_frontier_cell(known, cell):
    if known.cells[cell] != FREE:
        return False
    r, c = cell
    for dr, dc in kernels.NEIGHBORS_8:
        nr, nc = r + dr, c + dc
        if known.in_bounds(nr, nc) and known.cells[nr, nc] == UNKNOWN:
            return True
    return False


def _nearest_frontier(known, robot):
    """Closest global frontier by geodesic distance (ties: smallest cell)."""
    frontiers = detect_frontiers(known)
    if not frontiers:
        return None
    dist = kernels.distance_field(known.free_mask(), int(robot[0]), int(robot[1]))
    best = None
    best_d = np.inf
    for cell in sorted(frontiers):
        d = dist[cell]
        if np.isfinite(d) and d < best_d:
            best, best_d = cell, d
    return best


def _snapshot_digest(snapshot, anchor, scale):
    return {
        "map_sha256": hashlib.sha256(snapshot.map_text.encode("utf-8")).hexdigest(),
        "map_text": snapshot.map_text,
        "robot": list(snapshot.robot_cell),
        "goal_mark": {"cell": list(snapshot.goal_cell), "kind": snapshot.goal_kind},
        "candidates": [
            {"id": c.id, "cell": list(c.cell), "source": c.source_kind}
            for c in snapshot.candidates
        ],
        "window_anchor": list(anchor),
        "window_scale": scale,
    }


def run_episode(config, scorer=None):
    """Run one exploration episode; never raises for in-episode failures."""
    true_map = load_true_map(config.map_path, config.resolution)
    res = true_map.grid.resolution
    if config.sensor_radius < SQRT2 * res:
        raise ValueError("sensor_radius must cover the robot's 8-neighborhood")

    extent = compute_map_extent(config.window_cells, res, config.window_meters)
    k = extent.downsample_factor
    wspan = config.window_cells * k
    if scorer is None:
        scorer = make_scorer(replace(config.scorer, n_samples=config.n_samples))
    want_image = (config.scorer.kind == "vlm"
                  and config.scorer.prompt_format == "image")

    goal = true_map.goal
    goal_world = true_map.grid.cell_to_world(*goal)
    robot = true_map.start
    known = GridMap2D(
        np.full(true_map.grid.cells.shape, UNKNOWN, dtype=np.uint8),
        res, true_map.grid.origin)
    known = reveal(true_map, known, robot, config.sensor_radius)

    path = [robot]
    length_m = 0.0
    reports = []
    scorer_calls = 0
    target = None
    route = []
    since_replan = 0
    reached = False
    failure = None

    def scored_replan():
        nonlocal scorer_calls
        anchor = (robot[0] - wspan // 2, robot[1] - wspan // 2)
        win = crop_window(known, robot, wspan)
        if k > 1:
            win = downsample(win, k)
        rwin = (wspan // 2) // k
        if win.cells[rwin, rwin] != FREE:
            # max-pooling can swallow the robot cell into a wall block;
            # the robot standing there proves the block is enterable
            cells = win.cells.copy()
            cells[rwin, rwin] = FREE
            win = win.with_cells(cells)
        win_res = win.resolution
        d_min = config.d_min if config.d_min is not None else 3.0 * win_res
        cands, mark = generate_candidates(
            win, Pose2D.from_cell(win, rwin, rwin), goal_world, d_min)
        if any(c.cell == (rwin, rwin) for c in cands):
            # coarse windows (k > 1) can leave the robot's own block as a
            # frontier; it cannot be drawn under the robot marker nor is
            # it a useful move, so it is dropped and ids are re-packed
            kept = [c for c in cands if c.cell != (rwin, rwin)]
            if not kept:
                raise NoCandidatesError("only candidate sits under the robot")
            cands = [Candidate(i, c.cell, c.world, c.source_kind, c.cluster_id)
                     for i, c in enumerate(kept)]
        snapshot = make_snapshot(
            win, (rwin, rwin), cands, mark, want_image=want_image,
            goal_world=goal_world, true_map=true_map.grid, true_goal_cell=goal)
        samples = scorer(snapshot)
        scorer_calls += 1
        selected, report = aggregate(
            samples, cands, win.cell_to_world(rwin, rwin))
        reports.append(StepReport(
            move_index=len(path) - 1,
            digest=_snapshot_digest(snapshot, anchor, k),
            samples=samples,
            report=report,
        ))
        chosen = next(c for c in cands if c.id == selected)
        return (anchor[0] + chosen.cell[0] * k + k // 2,
                anchor[1] + chosen.cell[1] * k + k // 2)

    while True:
        if robot == goal:
            reached = True
            break
        if len(path) - 1 >= config.max_steps:
            failure = "step limit reached"
            break

        nxt = None
        if known.cells[goal] == FREE:
            direct = plan_path(known, robot, goal)
            if direct:
                nxt = direct[1]

        if nxt is None:
            stale = (
                target is None
                or not route
                or robot == target
                or (target != goal and not _is_frontier_cell(known, target))
                or any(known.cells[cell] != FREE for cell in route)
                or since_replan >= config.replan_interval
            )
            if stale:
                try:
                    target = scored_replan()
                except NoCandidatesError:
                    target = None
                except ScorerFailureError as exc:
                    failure = f"scorer failure: {exc}"
                    break
                if target == robot:
                    target = None
                if target is None:
                    target = _nearest_frontier(known, robot)
                if target is None:
                    failure = "goal unreachable"
                    break
                route = plan_path(known, robot, target)[1:]
                since_replan = 0
                if not route:
                    failure = "goal unreachable"
                    break
            nxt = route.pop(0)

        dr, dc = nxt[0] - robot[0], nxt[1] - robot[1]
        length_m += res * (SQRT2 if dr != 0 and dc != 0 else 1.0)
        robot = nxt
        path.append(robot)
        since_replan += 1
        known = reveal(true_map, known, robot, config.sensor_radius)

    revisit = (len(path) - len(set(path))) / len(path)
    return EpisodeResult(
        reached_goal=reached,
        path=path,
        path_length_m=length_m,
        steps=len(path) - 1,
        revisit_ratio=revisit,
        per_step_reports=reports,
        scorer_calls=scorer_calls,
        failure=failure,
    )


@dataclass(frozen=True)
class BenchmarkRow:
    name: str
    episodes: int
    successes: int
    success_rate: float
    mean_path_m: float
    std_path_m: float
    mean_revisit: float
    mean_steps: float


def run_benchmark(corpus, configs):
    """Run every config over every map; per-map seed = config seed + index.

    Path/revisit/step statistics cover successful episodes only (failed
    episodes still count against the success rate). std is the sample
    standard deviation (ddof=1), 0.0 for fewer than two successes.
    """
    corpus = [str(p) for p in corpus]
    if not corpus:
        raise ValueError("benchmark corpus is empty")
    rows = []
    for name, cfg in configs:
        results = []
        for i, map_path in enumerate(corpus):
            episode_cfg = replace(cfg, map_path=map_path, seed=cfg.seed + i)
            result = run_episode(episode_cfg)
            if result.failure:
                logger.warning("episode on %s failed: %s", map_path, result.failure)
            results.append(result)
        ok = [r for r in results if r.reached_goal]
        lengths = np.array([r.path_length_m for r in ok], dtype=np.float64)
        rows.append(BenchmarkRow(
            name=name,
            episodes=len(results),
            successes=len(ok),
            success_rate=len(ok) / len(results),
            mean_path_m=float(lengths.mean()) if ok else 0.0,
            std_path_m=float(lengths.std(ddof=1)) if len(ok) >= 2 else 0.0,
            mean_revisit=float(np.mean([r.revisit_ratio for r in ok])) if ok else 0.0,
            mean_steps=float(np.mean([r.steps for r in ok])) if ok else 0.0,
        ))
    return rows


def render_benchmark_table(rows):
    """Fixed-format text table; identical rows give identical bytes."""
    header = (f"{'algorithm':<20} {'path_m':>18} {'success':>8} "
              f"{'revisit':>8} {'steps':>8}")
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.name:<20} {row.mean_path_m:>8.3f} +- {row.std_path_m:<7.3f} "
            f"{row.success_rate:>8.3f} {row.mean_revisit:>8.3f} "
            f"{row.mean_steps:>8.1f}")
    return "\n".join(lines) + "\n"


def benchmark_rows_to_json(rows):
    return [
        {
            "name": r.name,
            "episodes": r.episodes,
            "successes": r.successes,
            "success_rate": r.success_rate,
            "mean_path_m": r.mean_path_m,
            "std_path_m": r.std_path_m,
            "mean_revisit": r.mean_revisit,
            "mean_steps": r.mean_steps,
        }
        for r in rows
    ]


def _sample_to_json(sample):
    return {
        "beliefs": {str(i): p for i, p in sample.beliefs.items()},
        "justifications": {str(i): t for i, t in sample.justifications.items()},
        "raw": sample.raw,
    }


def _report_to_json(report):
    return {
        "normalized": {str(i): p for i, p in report.normalized.items()},
        "median": {str(i): p for i, p in report.median.items()},
        "mad": {str(i): p for i, p in report.mad.items()},
        "selected_id": report.selected_id,
        "samples_used": report.samples_used,
    }


def episode_log(config, result):
    """Schema-1 episode document: config echo, steps, reports, moves."""
    return {
        "schema": 1,
        "config": asdict(config),
        "reached_goal": result.reached_goal,
        "failure": result.failure,
        "steps": result.steps,
        "path_length_m": result.path_length_m,
        "revisit_ratio": result.revisit_ratio,
        "scorer_calls": result.scorer_calls,
        "path": [list(cell) for cell in result.path],
        "step_reports": [
            {
                "move_index": sr.move_index,
                "digest": sr.digest,
                "samples": [_sample_to_json(s) for s in sr.samples],
                "report": _report_to_json(sr.report),
            }
            for sr in result.per_step_reports
        ],
    }
