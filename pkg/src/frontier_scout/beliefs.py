"""Robust aggregation of repeated scorer samples.

Per candidate i with sampled beliefs p_i1..p_in:

    b_i   = median_j p_ij
    b^_i  = b_i / sum_l b_l        (uniform when the sum is zero)
    MAD_i = median_j |p_ij - b_i|

The subgoal is the argmax of b^. MAD is diagnostic only; it never
changes the selection.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)

TIE_EPS = 1e-12


@dataclass(frozen=True)
class BeliefReport:
    """Aggregation outcome for one planning step, keyed by candidate id.

    median and mad may be empty when select_subgoal is called without
    sample-level context; the aggregate() pipeline always fills them.
    """

    normalized: dict
    selected_id: int
    median: dict = field(default_factory=dict)
    mad: dict = field(default_factory=dict)
    samples_used: int = 0

    def __post_init__(self):
        if self.selected_id not in self.normalized:
            raise ValueError("selected_id missing from normalized beliefs")
        best = max(self.normalized.values())
        if best - self.normalized[self.selected_id] > TIE_EPS:
            raise ValueError("selected_id does not attain the maximum belief")


def _belief_matrix(samples):
    """Stack per-sample belief dicts into (n_samples, n_ids) by sorted id."""
    if not samples:
        raise ValueError("need at least one sample")
    idset = set(samples[0].beliefs)
    for s in samples[1:]:
        if set(s.beliefs) != idset:
            raise ValueError("samples disagree on the candidate id set")
    ids = sorted(idset)
    mat = np.array([[s.beliefs[i] for i in ids] for s in samples], dtype=np.float64)
    return ids, mat


def median_beliefs(samples):
    """Per-candidate median belief; even sample counts take the midpoint."""
    ids, mat = _belief_matrix(samples)
    med = np.median(mat, axis=0)
    return {i: float(v) for i, v in zip(ids, med)}


def normalize(beliefs):
    ids = sorted(beliefs)
    total = float(sum(beliefs[i] for i in ids))
    if total == 0.0:
        logger.warning("all median beliefs are zero; falling back to uniform")
        return {i: 1.0 / len(ids) for i in ids}
    return {i: beliefs[i] / total for i in ids}


def mad(samples, medians=None):
    """Median absolute deviation of each candidate's samples around b_i."""
    ids, mat = _belief_matrix(samples)
    if medians is None:
        med = np.median(mat, axis=0)
    else:
        med = np.array([medians[i] for i in ids], dtype=np.float64)
    dev = np.median(np.abs(mat - med), axis=0)
    return {i: float(v) for i, v in zip(ids, dev)}


def select_subgoal(normalized, candidates, robot, medians=None, mads=None,
                   samples_used=0):
    """Argmax of normalized belief.

    Beliefs within 1e-12 of the maximum tie-break by Euclidean world
    distance from the candidate to the robot, then by smaller id.
    robot: Pose2D or a bare (x, y) world point.
    Returns (selected_id, BeliefReport).
    """
    by_id = {c.id: c for c in candidates}
    if set(by_id) != set(normalized) or not normalized:
        raise ValueError("candidates and beliefs must cover the same ids")
    rx, ry = getattr(robot, "world", robot)
    best = max(normalized.values())

    def key(cid):
        cx, cy = by_id[cid].world
        return ((cx - rx) ** 2 + (cy - ry) ** 2, cid)

    tied = [cid for cid in sorted(normalized) if best - normalized[cid] <= TIE_EPS]
    winner = min(tied, key=key)
    report = BeliefReport(
        normalized=dict(normalized),
        selected_id=winner,
        median=dict(medians) if medians else {},
        mad=dict(mads) if mads else {},
        samples_used=samples_used,
    )
    return winner, report


def aggregate(samples, candidates, robot):
    """Full median / normalize / MAD / argmax pipeline for one step."""
    med = median_beliefs(samples)
    norm = normalize(med)
    total = math.fsum(norm.values())
    if abs(total - 1.0) > 1e-9:
        raise AssertionError(f"normalized beliefs sum to {total!r}")
    dev = mad(samples, med)
    logger.debug("belief MAD per candidate: %s", dev)
    return select_subgoal(norm, candidates, robot, medians=med, mads=dev,
                          samples_used=len(samples))
