"""Bit-exact map serialization: character grids and P6 portable pixmaps.

Legend (string / image):
    '?' (90,90,90)     unknown
    '.' (200,200,200)  free
    '#' (0,0,0)        occupied
    'R' (220,30,30)    robot
    'G' (30,160,30)    goal inside the window
    'C' (240,220,40)   candidate subgoal
    'P' (140,220,140)  goal projection on the window border
    'K' (140,220,140)  goal projection onto a wall

Annotation precedence when cells collide: R > G/P/K > C > base cell.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import MapParseError
from .frontiers import (
    BORDER_PROJECTION,
    FRONTIER,
    IN_MAP_GOAL,
    WALL_PROJECTION,
    Candidate,
    GoalMark,
)
from .grid import FREE, OCCUPIED, UNKNOWN, GridMap2D

BASE_CHARS = {UNKNOWN: "?", FREE: ".", OCCUPIED: "#"}
MARK_CHARS = {IN_MAP_GOAL: "G", BORDER_PROJECTION: "P", WALL_PROJECTION: "K"}

COLORS = {
    "?": (90, 90, 90),
    ".": (200, 200, 200),
    "#": (0, 0, 0),
    "R": (220, 30, 30),
    "G": (30, 160, 30),
    "C": (240, 220, 40),
    "P": (140, 220, 140),
    "K": (140, 220, 140),
}


@dataclass(frozen=True)
class AnnotatedMap:
    """A map plus the overlays the scorer sees."""

    map: GridMap2D
    robot: tuple[int, int]
    goal_mark: GoalMark | None = None
    candidates: list[Candidate] = field(default_factory=list)

    def __post_init__(self):
        m = self.map
        taken = {}
        for name, cell in self._annotation_cells():
            if not m.in_bounds(*cell):
                raise ValueError(f"{name} cell {cell} outside map bounds")
            prev = taken.get(cell)
            if prev is not None and {prev, name} != {"goal", "candidate"}:
                raise ValueError(f"{name} and {prev} collide at {cell}")
            taken[cell] = name

    def _annotation_cells(self):
        yield "robot", self.robot
        if self.goal_mark is not None:
            yield "goal", self.goal_mark.cell
        for cand in self.candidates:
            yield "candidate", cand.cell


def _char_grid(am):
    grid = [[BASE_CHARS[v] for v in row] for row in am.map.cells]
    for cand in am.candidates:
        grid[cand.cell[0]][cand.cell[1]] = "C"
    if am.goal_mark is not None:
        r, c = am.goal_mark.cell
        grid[r][c] = MARK_CHARS[am.goal_mark.kind]
    grid[am.robot[0]][am.robot[1]] = "R"
    return grid


def render_string(am):
    """Newline-terminated character grid; identical input gives identical bytes."""
    return "".join("".join(row) + "\n" for row in _char_grid(am))


def render_image(am, cell_px=8, candidate_colors=None):
    """P6 portable pixmap, each cell a cell_px x cell_px solid block.

    candidate_colors optionally overrides the candidate RGB per id (used
    for belief shading); it never repaints cells hidden by R/G/P/K.
    """
    if cell_px < 1:
        raise ValueError("cell_px must be >= 1")
    grid = _char_grid(am)
    rows, cols = am.map.rows, am.map.cols
    img = np.zeros((rows, cols, 3), dtype=np.uint8)
    for r in range(rows):
        for c in range(cols):
            img[r, c] = COLORS[grid[r][c]]
    if candidate_colors:
        for cand in am.candidates:
            color = candidate_colors.get(cand.id)
            r, c = cand.cell
            if color is not None and grid[r][c] == "C":
                img[r, c] = color
    img = img.repeat(cell_px, axis=0).repeat(cell_px, axis=1)
    header = f"P6\n{cols * cell_px} {rows * cell_px}\n255\n".encode("ascii")
    return header + img.tobytes()


def parse_string(text, resolution=1.0, origin=(0.0, 0.0)):
    """Inverse of render_string (up to annotation precedence).

    Annotation characters parse to a Free base cell. Requires a
    rectangular grid and exactly one 'R'. Candidate ids are assigned
    row-major from 0.
    """
    lines = text.splitlines()
    if not lines or not lines[0]:
        raise MapParseError("empty map text", 1, 1)
    width = len(lines[0])

    cells = np.full((len(lines), width), UNKNOWN, dtype=np.uint8)
    robot = None
    mark = None
    cand_cells = []
    base = {"?": UNKNOWN, ".": FREE, "#": OCCUPIED}
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MapParseError(
                f"ragged row: expected {width} characters, got {len(line)}",
                r + 1, min(len(line), width) + 1)
        for c, ch in enumerate(line):
            if ch in base:
                cells[r, c] = base[ch]
                continue
            cells[r, c] = FREE
            if ch == "R":
                if robot is not None:
                    raise MapParseError("multiple robot markers", r + 1, c + 1)
                robot = (r, c)
            elif ch in ("G", "P", "K"):
                if mark is not None:
                    raise MapParseError("multiple goal markers", r + 1, c + 1)
                kind = {"G": IN_MAP_GOAL, "P": BORDER_PROJECTION, "K": WALL_PROJECTION}[ch]
                mark = GoalMark((r, c), kind)
            elif ch == "C":
                cand_cells.append((r, c))
            else:
                raise MapParseError(f"unknown map character {ch!r}", r + 1, c + 1)
    if robot is None:
        raise MapParseError("no robot marker", 1, 1)

    grid_map = GridMap2D(cells, resolution, origin)
    candidates = [
        Candidate(i, cell, grid_map.cell_to_world(*cell), FRONTIER)
        for i, cell in enumerate(cand_cells)
    ]
    return AnnotatedMap(grid_map, robot, mark, candidates)
