#!/usr/bin/env python3
"""Produce the committed golden files under tests/fixtures/.

Goldens pin the exact bytes of text renders, P6 images, one episode
log, and one replay frame. Tests compare fresh output against these
files byte for byte, so regenerate only when the output format is
deliberately changed.
"""

import json
import os
import shutil
import sys
import tempfile

import numpy as np

from frontier_scout import (
    BORDER_PROJECTION,
    FREE,
    IN_MAP_GOAL,
    OCCUPIED,
    UNKNOWN,
    WALL_PROJECTION,
    AnnotatedMap,
    Candidate,
    GoalMark,
    GridMap2D,
    cli,
    render_image,
    render_string,
)

FIXTURES = os.path.join("tests", "fixtures")


def small_known_map():
    cells = np.full((10, 10), FREE, dtype=np.uint8)
    cells[0, :] = OCCUPIED
    cells[-1, :] = OCCUPIED
    cells[:, 0] = OCCUPIED
    cells[:, -1] = OCCUPIED
    cells[4:6, 4:6] = OCCUPIED
    cells[1:4, 6:9] = UNKNOWN
    return GridMap2D(cells, 0.5, (0.0, 0.0))


def write(path, data):
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode) as fh:
        fh.write(data)
    print(f"wrote {path} ({os.path.getsize(path)} bytes)")


def main():
    os.makedirs(FIXTURES, exist_ok=True)
    gm = small_known_map()

    goal_map = AnnotatedMap(
        map=gm,
        robot=(2, 2),
        goal_mark=GoalMark((7, 7), IN_MAP_GOAL),
        candidates=[
            Candidate(0, (4, 6), gm.cell_to_world(4, 6), "frontier"),
            Candidate(1, (6, 3), gm.cell_to_world(6, 3), "frontier"),
        ],
    )
    write(os.path.join(FIXTURES, "golden_goal.txt"), render_string(goal_map))
    write(os.path.join(FIXTURES, "golden_goal.ppm"),
          render_image(goal_map, cell_px=4))

    proj_map = AnnotatedMap(
        map=gm,
        robot=(8, 2),
        goal_mark=GoalMark((0, 5), BORDER_PROJECTION),
        candidates=[Candidate(0, (6, 6), gm.cell_to_world(6, 6), "frontier")],
    )
    write(os.path.join(FIXTURES, "golden_border.txt"), render_string(proj_map))
    write(os.path.join(FIXTURES, "golden_border.ppm"),
          render_image(proj_map, cell_px=4))

    wall_map = AnnotatedMap(
        map=gm,
        robot=(2, 2),
        goal_mark=GoalMark((3, 4), WALL_PROJECTION),
        candidates=[],
    )
    write(os.path.join(FIXTURES, "golden_wall.txt"), render_string(wall_map))

    # an episode log plus the first replay frame, produced end to end
    tmp = tempfile.mkdtemp()
    try:
        log_path = os.path.join(tmp, "log.json")
        rc = cli.main(["run", "maps/fixtures/sideroom_a.txt",
                       "--scorer", "distance_oracle", "--out", log_path])
        if rc != 0:
            print("episode run failed", file=sys.stderr)
            return 1
        shutil.copy(log_path, os.path.join(FIXTURES, "replay_log.json"))
        print(f"wrote {FIXTURES}/replay_log.json")

        frames = os.path.join(tmp, "frames")
        rc = cli.main(["replay", log_path, "--out", frames])
        if rc != 0:
            print("replay failed", file=sys.stderr)
            return 1
        for ext in ("ppm", "txt"):
            src = os.path.join(frames, f"step_000.{ext}")
            shutil.copy(src, os.path.join(FIXTURES, f"replay_step_000.{ext}"))
            print(f"wrote {FIXTURES}/replay_step_000.{ext}")
    finally:
        shutil.rmtree(tmp)

    with open(os.path.join(FIXTURES, "replay_log.json")) as fh:
        log = json.load(fh)
    print(f"log: {len(log['step_reports'])} scored steps, "
          f"reached={log['reached_goal']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
