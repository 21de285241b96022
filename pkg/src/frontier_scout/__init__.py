"""VLM-guided frontier exploration on 2D occupancy grids.

Pipeline: project/maintain an occupancy grid, extract frontier subgoal
candidates, have a scorer (VLM or deterministic oracle) assign beliefs,
aggregate repeated samples robustly (median + MAD), and walk toward the
winner inside a deterministic grid-world simulator.
"""

from .backend import DEFAULT_BACKEND, HAS_NUMBA
from .beliefs import (BeliefReport, aggregate, mad, median_beliefs, normalize,
                      select_subgoal)
from .errors import (InconsistentPoseError, MapParseError, NoCandidatesError,
                     SampleRejectedError, ScorerFailureError)
from .frontiers import (BORDER_PROJECTION, FRONTIER, GOAL_PROJECTION,
                        IN_MAP_GOAL, TERMINAL_GOAL, WALL_PROJECTION, Candidate,
                        FrontierCluster, GoalMark, cluster_frontiers,
                        deduplicate, detect_frontiers, generate_candidates,
                        goal_projection)
from .grid import (FREE, OCCUPIED, UNKNOWN, CellState, GridMap2D, MapExtent,
                   Pose2D, VoxelGrid3D, compute_map_extent, crop_window,
                   downsample, project_to_2d)
from .render import AnnotatedMap, parse_string, render_image, render_string
from .scoring import (DEVELOPER_PROMPT, PlanningSnapshot, ScoreSample,
                      ScorerConfig, build_prompt, distance_oracle_beliefs,
                      greedy_euclidean_beliefs, make_scorer, make_snapshot,
                      parse_score_response, score, uniform_beliefs)
from .sim import (BenchmarkRow, EpisodeConfig, EpisodeResult, StepReport,
                  TrueMap, episode_log, load_true_map, plan_path, reveal,
                  run_benchmark, run_episode)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedMap", "BORDER_PROJECTION", "BeliefReport", "BenchmarkRow",
    "Candidate", "CellState", "DEFAULT_BACKEND", "DEVELOPER_PROMPT",
    "EpisodeConfig", "EpisodeResult", "FREE", "FRONTIER", "FrontierCluster",
    "GOAL_PROJECTION", "GoalMark", "GridMap2D", "HAS_NUMBA", "IN_MAP_GOAL",
    "TERMINAL_GOAL", "WALL_PROJECTION",
    "InconsistentPoseError", "MapExtent", "MapParseError", "NoCandidatesError",
    "OCCUPIED", "PlanningSnapshot", "Pose2D", "SampleRejectedError",
    "ScoreSample", "ScorerConfig", "ScorerFailureError", "StepReport",
    "TrueMap", "UNKNOWN", "VoxelGrid3D", "aggregate", "build_prompt",
    "cluster_frontiers", "compute_map_extent", "crop_window", "deduplicate",
    "detect_frontiers", "distance_oracle_beliefs", "downsample", "episode_log",
    "generate_candidates", "goal_projection", "greedy_euclidean_beliefs",
    "load_true_map", "mad", "make_scorer", "make_snapshot", "median_beliefs",
    "normalize", "parse_score_response", "parse_string", "plan_path",
    "project_to_2d", "render_image", "render_string", "reveal", "run_benchmark",
    "run_episode", "score", "select_subgoal", "uniform_beliefs",
]
