"""Candidate scoring: prompt construction, response validation, oracles.

The scorer ranks candidate subgoals; it never emits actions. A VLM
behind an OpenAI-compatible endpoint is one backend; the deterministic
oracles (uniform, greedy_euclidean, distance_oracle) stand in for it
offline. One score() call returns n independent samples for the
aggregation stage.
"""

import json
import math
from dataclasses import dataclass

from . import kernels, vlm
from .errors import SampleRejectedError, ScorerFailureError
from .frontiers import BORDER_PROJECTION, IN_MAP_GOAL, WALL_PROJECTION
from .render import AnnotatedMap, render_image, render_string

SCORER_KINDS = ("vlm", "distance_oracle", "greedy_euclidean", "uniform")

# Instruction prompt sent as the developer message on every request.
DEVELOPER_PROMPT = """\
# Identity

You are an expert in robotic navigation. Your job is to guide a mobile robot through an unfamiliar indoor environment, helping it reach a specified goal location using as few steps as possible.

# Task

For every step, given the context, you must:

- **Assign a belief value** (between 0 and 1) to each candidate move. This value reflects your confidence that this move is **strictly better**—meaning, more likely to reach the goal in fewer steps—compared to the other options.
- **Briefly justify** your belief value for each move.

# Workflow

## High-Level Problem-Solving Strategy

1. **Carefully evaluate each candidate move:**
   - Does it bring the robot closer to the goal without leading to a dead end (which would require backtracking)?
   - Is there any risk that this move leads to a dead end or gets trapped in a room?
   - Are there any visible or likely obstacles blocking progress in the direction of the goal?

2. **Compare all candidate moves:**
   - Explicitly compare the most promising candidates, focusing on enclosure risk, progress toward the goal, and likelihood of being blocked by walls or room boundaries.
   - If two candidates seem equally promising, prefer the one closer to the robot.

3. **Assign a belief value** to each candidate move, ensuring that the values **sum to exactly 1**.

---

## 1. Candidate Move Evaluation

For each candidate move, do the following:

- **Explicit Wall Tracing:**
  - Describe all the visible walls adjacent to each candidate and their immediate surroundings.

- **Path Feasibility Check:**
  - Is there a continuous open path from the candidate to the goal, or are there known walls that likely block it?

- **Enclosure Check:**
  - Does the candidate appear to be in an enclosed area or room (i.e., surrounded on 3 or more sides by walls or boundaries)?

- **Corridor/Room/Door Classification:**
  - For each candidate, classify whether it is in a likely corridor, open space, or a room, and briefly explain your reasoning.

- **Progress Toward Goal:**
  - Does this move reduce the distance to the goal or its projection?

- **Uncertainty/Risk Reporting:**
  - Explicitly note if there is ambiguity in the environment or if the candidate may risk getting trapped.

---

## 2. Candidate Move Comparison

- **Explicitly compare** the most promising candidates in terms of enclosure risk, progress toward the goal, and likelihood of being blocked.
- If several candidates are similarly promising, prefer the one closer to the robot's current position.

---

## 3. Belief Assignment

- For each candidate, **assign a belief value** (between 0 and 1) reflecting your confidence, grounded in your reasoning above.
- All belief values **must sum to exactly 1**.

# Provided Context

You will be provided, at each step:

- A **partially revealed grid map** (see legend below).
- **Robot position**: (row, col)
- **Goal (or goal projection) position**: (row, col)
- **Candidate moves**: Dictionary of candidate next-step coordinates.

**Grid map legend**:

- **Gray / "?"**: Unknown (unexplored)
- **White / "."**: Free space (navigable)
- **Black / "#"**: Wall (obstacle)
- **Green / "G"**: Goal
- **Red / "R"**: Robot
- **Yellow / "C"**: Frontier (boundary between explored/unexplored)
- **Light Green / "P"**: Goal projection (estimated direction)
- **Light Green / "K"**: Goal projection onto wall

**Tip:**
If any aspect of the candidate's local geometry is ambiguous, or if there is uncertainty about potential passages, say so explicitly and adjust your confidence accordingly.
"""

REPLY_FORMAT_INSTRUCTION = (
    "Reply with a JSON array only: one object per candidate, each of the form "
    '{"candidate_id": <int>, "belief": <float between 0 and 1>, '
    '"justification": "<short text>"}. Beliefs must sum to 1. '
    "Do not wrap the array in prose."
)

MARK_PHRASES = {
    IN_MAP_GOAL: "Goal position",
    BORDER_PROJECTION: "Goal projection position (estimated direction, on the window border)",
    WALL_PROJECTION: "Goal projection position (onto a wall)",
}


@dataclass(frozen=True)
class ScorerConfig:
    kind: str = "uniform"
    n_samples: int = 3
    endpoint_url: str = "https://api.openai.com/v1/chat/completions"
    model_name: str = "gpt-4.1"
    temperature: float | None = None
    max_retries: int = 2
    timeout: float = 60.0
    softmax_lambda: float = 0.5
    prompt_format: str = "image"
    record_dir: str | None = None
    replay_dir: str | None = None

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise ValueError(f"unknown scorer kind {self.kind!r}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.softmax_lambda <= 0:
            raise ValueError("softmax_lambda must be > 0")
        if self.prompt_format not in ("image", "string"):
            raise ValueError("prompt_format must be 'image' or 'string'")


@dataclass(frozen=True)
class ScoreSample:
    """One validated scorer response: beliefs and justifications by id."""

    beliefs: dict
    justifications: dict
    raw: str = ""

    def __post_init__(self):
        for p in self.beliefs.values():
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"belief {p!r} outside [0, 1]")
        total = math.fsum(self.beliefs.values())
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"beliefs sum to {total!r}, not 1")


@dataclass(frozen=True)
class PlanningSnapshot:
    """Everything one planning step hands to the scorer.

    goal_world / true_map / true_goal_cell carry ground truth for the
    oracle scorers; the VLM path never sees them.
    """

    annotated_map: AnnotatedMap
    map_text: str
    map_image: bytes | None
    robot_cell: tuple[int, int]
    goal_cell: tuple[int, int]
    goal_kind: str
    candidates: list
    goal_world: tuple[float, float] | None = None
    true_map: object = None
    true_goal_cell: tuple[int, int] | None = None

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("snapshot needs at least one candidate")


def make_snapshot(window_map, robot_cell, candidates, goal_mark, want_image=True,
                  goal_world=None, true_map=None, true_goal_cell=None):
    """Render an AnnotatedMap and bundle the snapshot.

    A projection mark that degenerates onto the robot cell is dropped
    from the rendering (the robot marker wins); its coordinates still
    reach the prompt through goal_cell/goal_kind.
    """
    robot_cell = (int(robot_cell[0]), int(robot_cell[1]))
    mark = goal_mark if goal_mark.cell != robot_cell else None
    am = AnnotatedMap(window_map, robot_cell, mark, list(candidates))
    text = render_string(am)
    image = render_image(am) if want_image else None
    return PlanningSnapshot(
        annotated_map=am,
        map_text=text,
        map_image=image,
        robot_cell=robot_cell,
        goal_cell=goal_mark.cell,
        goal_kind=goal_mark.kind,
        candidates=list(candidates),
        goal_world=goal_world,
        true_map=true_map,
        true_goal_cell=true_goal_cell,
    )


def build_prompt(snapshot, format="image"):
    """Build (developer_text, user_text, image_bytes | None) for one query."""
    if format not in ("image", "string"):
        raise ValueError("format must be 'image' or 'string'")
    parts = []
    if format == "string":
        parts.append("Current partially revealed grid map:\n\n```\n"
                     + snapshot.map_text + "```")
    else:
        parts.append("The current partially revealed grid map is provided "
                     "as the attached image.")
    parts.append(f"Robot position: ({snapshot.robot_cell[0]}, {snapshot.robot_cell[1]})")
    parts.append(f"{MARK_PHRASES[snapshot.goal_kind]}: "
                 f"({snapshot.goal_cell[0]}, {snapshot.goal_cell[1]})")
    moves = ", ".join(f"{c.id}: ({c.cell[0]}, {c.cell[1]})"
                      for c in snapshot.candidates)
    parts.append("Candidate moves: {" + moves + "}")
    parts.append(REPLY_FORMAT_INSTRUCTION)
    user_text = "\n\n".join(parts)
    image = snapshot.map_image if format == "image" else None
    if format == "image" and image is None:
        raise ValueError("snapshot has no image but format='image'")
    return DEVELOPER_PROMPT, user_text, image


def _first_json_array(text):
    """First well-formed JSON array anywhere in the text, or None."""
    decoder = json.JSONDecoder()
    start = text.find("[")
    while start != -1:
        try:
            value, _ = decoder.raw_decode(text, start)
        except ValueError:
            value = None
        if isinstance(value, list):
            return value
        start = text.find("[", start + 1)
    return None


def parse_score_response(text, expected_ids):
    """Validate one raw scorer reply into a ScoreSample.

    Tolerates surrounding prose; the first well-formed JSON array wins.
    Ids must match expected_ids exactly, beliefs must lie in [0, 1], and
    the belief sum must land in [0.9, 1.1] (then renormalized to 1).
    """
    expected = set(int(i) for i in expected_ids)
    arr = _first_json_array(text)
    if arr is None:
        raise SampleRejectedError("no JSON array found in the response")

    beliefs = {}
    justifications = {}
    for item in arr:
        if not isinstance(item, dict):
            raise SampleRejectedError("array items must be objects")
        if "candidate_id" not in item or "belief" not in item:
            raise SampleRejectedError("item missing candidate_id or belief")
        cid = item["candidate_id"]
        if isinstance(cid, bool) or not isinstance(cid, int):
            raise SampleRejectedError(f"candidate_id {cid!r} is not an integer")
        if cid in beliefs:
            raise SampleRejectedError(f"candidate_id {cid} appears twice")
        p = item["belief"]
        if isinstance(p, bool) or not isinstance(p, (int, float)):
            raise SampleRejectedError(f"belief {p!r} is not a number")
        p = float(p)
        if not (0.0 <= p <= 1.0):
            raise SampleRejectedError(f"belief {p} outside [0, 1]")
        beliefs[cid] = p
        justifications[cid] = str(item.get("justification", ""))

    if set(beliefs) != expected:
        missing = sorted(expected - set(beliefs))
        extra = sorted(set(beliefs) - expected)
        raise SampleRejectedError(
            f"candidate ids mismatch (missing {missing}, extra {extra})")
    total = math.fsum(beliefs.values())
    if not (0.9 <= total <= 1.1):
        raise SampleRejectedError(f"beliefs sum to {total}, outside [0.9, 1.1]")
    beliefs = {cid: p / total for cid, p in beliefs.items()}
    return ScoreSample(beliefs=beliefs, justifications=justifications, raw=text)


def softmax_from_distances(dists, lam):
    """Beliefs proportional to exp(-lam * d); inf distances get belief 0.

    All-inf input falls back to uniform.
    """
    ids = sorted(dists)
    finite = [dists[i] for i in ids if math.isfinite(dists[i])]
    if not finite:
        return {i: 1.0 / len(ids) for i in ids}
    shift = min(finite)
    weights = {
        i: math.exp(-lam * (dists[i] - shift)) if math.isfinite(dists[i]) else 0.0
        for i in ids
    }
    total = math.fsum(weights.values())
    return {i: w / total for i, w in weights.items()}


def uniform_beliefs(candidates):
    return {c.id: 1.0 / len(candidates) for c in candidates}


def greedy_euclidean_beliefs(candidates, goal_world, lam):
    """Softmax over negative straight-line distance to the goal, meters."""
    dists = {
        c.id: math.hypot(c.world[0] - goal_world[0], c.world[1] - goal_world[1])
        for c in candidates
    }
    return softmax_from_distances(dists, lam)


def distance_oracle_beliefs(true_map, candidates, goal_cell, lam):
    """Softmax over negative true-map geodesic distance to the goal, meters.

    Candidates are located on the true map by their world coordinates, so
    the beliefs follow the candidate regardless of list order. Unreachable
    candidates take belief 0 (uniform if all are unreachable).
    """
    field_cells = kernels.distance_field(
        true_map.free_mask(), int(goal_cell[0]), int(goal_cell[1]))
    res = true_map.resolution
    dists = {}
    for c in candidates:
        r, col = true_map.world_to_cell(*c.world)
        if true_map.in_bounds(r, col):
            dists[c.id] = float(field_cells[r, col]) * res
        else:
            dists[c.id] = math.inf
    return softmax_from_distances(dists, lam)


def _deterministic_sample(snapshot, config):
    kind = config.kind
    if kind == "uniform":
        beliefs = uniform_beliefs(snapshot.candidates)
        note = "uniform prior"
    elif kind == "greedy_euclidean":
        goal_world = snapshot.goal_world
        if goal_world is None:
            goal_world = snapshot.annotated_map.map.cell_to_world(*snapshot.goal_cell)
        beliefs = greedy_euclidean_beliefs(
            snapshot.candidates, goal_world, config.softmax_lambda)
        note = "straight-line distance to goal"
    elif kind == "distance_oracle":
        if snapshot.true_map is None or snapshot.true_goal_cell is None:
            raise ValueError("distance_oracle needs true_map and true_goal_cell")
        beliefs = distance_oracle_beliefs(
            snapshot.true_map, snapshot.candidates,
            snapshot.true_goal_cell, config.softmax_lambda)
        note = "true-map geodesic distance to goal"
    else:
        raise ValueError(f"not a deterministic scorer kind: {kind!r}")
    just = {c.id: note for c in snapshot.candidates}
    return ScoreSample(beliefs=beliefs, justifications=just, raw="")


def _score_vlm(snapshot, config):
    developer, user, image = build_prompt(snapshot, config.prompt_format)
    png = vlm.ppm_to_png(image) if image is not None else None
    body = vlm.build_chat_body(config, developer, user, png)
    expected = {c.id for c in snapshot.candidates}

    samples = [None] * config.n_samples
    errors = []
    for index in range(config.n_samples):
        last = None
        for _ in range(config.max_retries + 1):
            try:
                text = vlm.request_chat(config, body, index)
                samples[index] = parse_score_response(text, expected)
                last = None
                break
            except (SampleRejectedError, vlm.TransportError) as exc:
                last = exc
        if last is not None:
            errors.append((index, last))
    valid = [s for s in samples if s is not None]
    if errors or len(valid) < math.ceil(config.n_samples / 2):
        raise ScorerFailureError(
            f"{len(errors)} of {config.n_samples} scorer requests failed",
            partial=valid,
            request_errors=[(i, str(e)) for i, e in errors])
    return samples


def score(snapshot, config):
    """Produce exactly n_samples validated ScoreSamples for one snapshot."""
    if config.kind == "vlm":
        return _score_vlm(snapshot, config)
    sample = _deterministic_sample(snapshot, config)
    return [sample] * config.n_samples


def make_scorer(config):
    """Bind a ScorerConfig into a snapshot -> samples callable."""
    return lambda snapshot: score(snapshot, config)
