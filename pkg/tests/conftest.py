import heapq
import math
import pathlib
from fractions import Fraction

import numpy as np
import pytest

from frontier_scout import FREE, OCCUPIED, UNKNOWN
from frontier_scout.kernels import NEIGHBORS_8, SQRT2

FIXTURES = pathlib.Path(__file__).parent / "fixtures"
REPO = pathlib.Path(__file__).parent.parent


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def repo_root():
    return REPO


def random_cells(rng, rows, cols, p_free=0.55, p_unknown=0.25):
    """Ternary occupancy array with the given state mix."""
    u = rng.random((rows, cols))
    cells = np.full((rows, cols), OCCUPIED, dtype=np.uint8)
    cells[u < p_free + p_unknown] = UNKNOWN
    cells[u < p_free] = FREE
    return cells


def dijkstra(free, sr, sc):
    """Reference 8-connected geodesic field (cells; diagonals cost sqrt 2)."""
    h, w = free.shape
    dist = np.full((h, w), np.inf)
    if not free[sr, sc]:
        return dist
    dist[sr, sc] = 0.0
    pq = [(0.0, sr, sc)]
    while pq:
        d, r, c = heapq.heappop(pq)
        if d > dist[r, c]:
            continue
        for dr, dc in NEIGHBORS_8:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and free[nr, nc]:
                nd = d + (SQRT2 if dr and dc else 1.0)
                if nd < dist[nr, nc]:
                    dist[nr, nc] = nd
                    heapq.heappush(pq, (nd, nr, nc))
    return dist


def frac_line(r0, c0, r1, c1):
    """Half-up DDA in exact rational arithmetic."""
    dr, dc = r1 - r0, c1 - c0
    n = max(abs(dr), abs(dc))
    if n == 0:
        return [(r0, c0)]
    half = Fraction(1, 2)
    return [
        (r0 + math.floor(Fraction(s * dr, n) + half),
         c0 + math.floor(Fraction(s * dc, n) + half))
        for s in range(n + 1)
    ]


# --- acceptance summary -------------------------------------------------
# test_acceptance.py names its tests test_criterion_<n>_<slug>; collect
# their outcomes and print one line per criterion at the end of the run.

_criteria = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[name] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[2])):
        outcome = _criteria[name]
        mark = "PASS" if outcome == "passed" else outcome.upper()
        label = " ".join(name.split("_")[2:])
        terminalreporter.write_line(f"[{mark}] criterion {label}")
