"""Command-line entry point: run, bench, render, score, replay.

Configuration is a JSON document with optional fields mirroring
EpisodeConfig/ScorerConfig plus a render section; unknown fields are
rejected by name. Flags beat config fields, config fields beat defaults.
Exit codes: 0 success, 1 usage/config/parse error, 2 run or scorer
failure.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys

from .beliefs import aggregate
from .errors import MapParseError, NoCandidatesError, ScorerFailureError
from .frontiers import IN_MAP_GOAL, Candidate, generate_candidates
from .grid import Pose2D
from .render import AnnotatedMap, parse_string, render_image, render_string
from .scoring import (SCORER_KINDS, ScorerConfig, make_snapshot, score)
from .sim import (EpisodeConfig, _report_to_json, _sample_to_json,
                  benchmark_rows_to_json, episode_log, render_benchmark_table,
                  run_benchmark, run_episode)

logger = logging.getLogger(__name__)

CANDIDATE_COLOR = (240, 220, 40)
DEFAULT_ALGORITHMS = ("greedy_euclidean", "distance_oracle")

EPISODE_FIELDS = {f.name for f in dataclasses.fields(EpisodeConfig)} - {"scorer"}
SCORER_FIELDS = {f.name for f in dataclasses.fields(ScorerConfig)}
RENDER_FIELDS = {"cell_px", "format"}
TOP_FIELDS = EPISODE_FIELDS | {"scorer", "render", "algorithms"}


class ConfigError(ValueError):
    """Bad usage or bad config; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this CLI reserves 2 for
    # run/scorer failures, so usage errors are rerouted to ConfigError
    def error(self, message):
        raise ConfigError(message)


def _check_keys(doc, allowed, where):
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        names = ", ".join(repr(k) for k in unknown)
        raise ConfigError(f"unknown config field(s) {names} in {where}")


def load_config_doc(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except ValueError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _check_keys(doc, TOP_FIELDS, "config")
    _check_keys(doc.get("scorer", {}), SCORER_FIELDS, "config.scorer")
    _check_keys(doc.get("render", {}), RENDER_FIELDS, "config.render")
    return doc


def build_scorer_config(doc, args):
    fields = dict(doc.get("scorer", {}))
    if getattr(args, "scorer", None):
        fields["kind"] = args.scorer
    if getattr(args, "format", None) in ("image", "string"):
        fields["prompt_format"] = args.format
    try:
        return ScorerConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"scorer config: {exc}")


def build_episode_config(doc, args):
    fields = {k: doc[k] for k in doc if k in EPISODE_FIELDS}
    if getattr(args, "map", None):
        fields["map_path"] = args.map
    if getattr(args, "seed", None) is not None:
        fields["seed"] = args.seed
    if "map_path" not in fields:
        raise ConfigError("map_path is required (config field or MAP argument)")
    fields["scorer"] = build_scorer_config(doc, args)
    try:
        return EpisodeConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"episode config: {exc}")


def _render_options(doc, args):
    opts = dict(doc.get("render", {}))
    cell_px = opts.get("cell_px", 8)
    if getattr(args, "cell_px", None) is not None:
        cell_px = args.cell_px
    fmt = opts.get("format", "image")
    if getattr(args, "format", None):
        fmt = args.format
    if not isinstance(cell_px, int) or cell_px < 1:
        raise ConfigError("cell_px must be a positive integer")
    return cell_px, fmt


def cmd_run(args):
    doc = load_config_doc(args.config)
    config = build_episode_config(doc, args)
    try:
        result = run_episode(config)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"map_path: {exc}")
    out_path = args.out or "episode_log.json"
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(episode_log(config, result), fh, indent=1, sort_keys=True)
    print(f"reached={result.reached_goal} "
          f"path_length_m={result.path_length_m:.3f} "
          f"steps={result.steps} scorer_calls={result.scorer_calls}")
    if result.reached_goal:
        return 0
    print(f"failure: {result.failure}")
    return 2


def cmd_bench(args):
    doc = load_config_doc(args.config)
    corpus_dir = args.corpus
    if not os.path.isdir(corpus_dir):
        raise ConfigError(f"corpus directory not found: {corpus_dir}")
    corpus = sorted(
        os.path.join(corpus_dir, name)
        for name in os.listdir(corpus_dir)
        if name.endswith(".txt")
    )
    if not corpus:
        print(f"error: corpus {corpus_dir} contains no .txt maps", file=sys.stderr)
        return 1

    algorithms = doc.get("algorithms", list(DEFAULT_ALGORITHMS))
    if (not isinstance(algorithms, list) or not algorithms
            or any(a not in SCORER_KINDS for a in algorithms)):
        raise ConfigError(f"algorithms must be a non-empty list from {SCORER_KINDS}")

    base_doc = dict(doc)
    base_doc.setdefault("map_path", corpus[0])
    base = build_episode_config(base_doc, args)
    configs = [
        (kind, dataclasses.replace(
            base, scorer=dataclasses.replace(base.scorer, kind=kind)))
        for kind in algorithms
    ]
    rows = run_benchmark(corpus, configs)
    table = render_benchmark_table(rows)
    print(table, end="")
    if args.out:
        with open(args.out + ".txt", "w", encoding="utf-8") as fh:
            fh.write(table)
        with open(args.out + ".json", "w", encoding="utf-8") as fh:
            json.dump(benchmark_rows_to_json(rows), fh, indent=1, sort_keys=True)
    return 0


def cmd_render(args):
    doc = load_config_doc(args.config)
    cell_px, fmt = _render_options(args=args, doc=doc)
    resolution = doc.get("resolution", 0.5)
    try:
        with open(args.map, encoding="utf-8") as fh:
            am = parse_string(fh.read(), resolution)
    except OSError as exc:
        raise ConfigError(f"cannot read map: {exc}")
    except MapParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if fmt == "text":
        text = render_string(am)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            print(text, end="")
    else:
        if not args.out:
            raise ConfigError("--out is required for image output")
        with open(args.out, "wb") as fh:
            fh.write(render_image(am, cell_px))
    return 0


def cmd_score(args):
    doc = load_config_doc(args.config)
    scorer_cfg = build_scorer_config(doc, args)
    resolution = doc.get("resolution", 0.5)
    try:
        with open(args.map, encoding="utf-8") as fh:
            am = parse_string(fh.read(), resolution)
    except OSError as exc:
        raise ConfigError(f"cannot read map: {exc}")
    except MapParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if am.goal_mark is None:
        raise ConfigError("map has no goal marker (G, P, or K)")

    goal_world = am.map.cell_to_world(*am.goal_mark.cell)
    robot = Pose2D.from_cell(am.map, *am.robot)
    if am.candidates:
        cands, mark = am.candidates, am.goal_mark
    else:
        d_min = doc.get("d_min") or 3.0 * am.map.resolution
        try:
            cands, mark = generate_candidates(am.map, robot, goal_world, d_min)
        except NoCandidatesError as exc:
            raise ConfigError(f"map yields no candidates: {exc}")

    fully_known = not bool(am.map.unknown_mask().any())
    if scorer_cfg.kind == "distance_oracle" and not fully_known:
        raise ConfigError("distance_oracle needs a fully known map")
    snapshot = make_snapshot(
        am.map, am.robot, cands, mark,
        want_image=(scorer_cfg.kind == "vlm"
                    and scorer_cfg.prompt_format == "image"),
        goal_world=goal_world,
        true_map=am.map if fully_known else None,
        true_goal_cell=mark.cell if mark.kind == IN_MAP_GOAL else None,
    )
    try:
        samples = score(snapshot, scorer_cfg)
    except ScorerFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for index, message in exc.request_errors:
            print(f"  request {index}: {message}", file=sys.stderr)
        return 2
    selected, report = aggregate(samples, cands, robot.world)

    by_id = {c.id: c for c in cands}
    print(f"{'id':>3} {'cell':>10} {'b_hat':>8} {'mad':>8}  justification")
    for cid in sorted(report.normalized):
        cell = by_id[cid].cell
        excerpt = samples[0].justifications.get(cid, "")[:60]
        print(f"{cid:>3} {str(cell):>10} {report.normalized[cid]:>8.4f} "
              f"{report.mad.get(cid, 0.0):>8.4f}  {excerpt}")
    print(f"selected: {selected}")
    if args.out:
        document = {
            "schema": 1,
            "report": _report_to_json(report),
            "samples": [_sample_to_json(s) for s in samples],
            "candidates": [
                {"id": c.id, "cell": list(c.cell), "source": c.source_kind}
                for c in cands
            ],
        }
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(document, fh, indent=1, sort_keys=True)
    return 0


def _shade(belief):
    return tuple(
        int(round(255 + (component - 255) * belief))
        for component in CANDIDATE_COLOR
    )


def cmd_replay(args):
    try:
        with open(args.log, encoding="utf-8") as fh:
            log = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read log: {exc}")
    except ValueError as exc:
        raise ConfigError(f"log is not valid JSON: {exc}")
    if not isinstance(log, dict) or log.get("schema") != 1:
        print(f"error: unsupported log schema {log.get('schema')!r}",
              file=sys.stderr)
        return 1
    cell_px = args.cell_px if args.cell_px is not None else 8
    os.makedirs(args.out, exist_ok=True)

    for step_no, step in enumerate(log.get("step_reports", [])):
        try:
            digest = step["digest"]
            base = parse_string(digest["map_text"])
            cands = [
                Candidate(d["id"], tuple(d["cell"]),
                          base.map.cell_to_world(*d["cell"]), d["source"])
                for d in digest["candidates"]
            ]
            am = AnnotatedMap(base.map, tuple(digest["robot"]),
                              base.goal_mark, cands)
            normalized = step["report"]["normalized"]
            mads = step["report"]["mad"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"log step {step_no} is malformed: {exc}")
        colors = {int(cid): _shade(b) for cid, b in normalized.items()}
        frame = render_image(am, cell_px, candidate_colors=colors)
        with open(os.path.join(args.out, f"step_{step_no:03d}.ppm"), "wb") as fh:
            fh.write(frame)
        lines = [
            f"{cid}\t{normalized[cid]:.6f}\t{mads.get(cid, 0.0):.6f}"
            for cid in sorted(normalized, key=int)
        ]
        sidecar = "\n".join(lines) + "\n"
        with open(os.path.join(args.out, f"step_{step_no:03d}.txt"), "w",
                  encoding="utf-8") as fh:
            fh.write(sidecar)
    return 0


def build_parser():
    parser = _Parser(prog="frontier-scout",
                     description="Frontier exploration with scored subgoals.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one exploration episode")
    p.add_argument("map", nargs="?", help="true-map text file")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--scorer", choices=SCORER_KINDS)
    p.add_argument("--format", choices=("image", "string"))
    p.add_argument("--out", help="episode log path (default episode_log.json)")
    p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("bench", help="benchmark scorers over a map corpus")
    p.add_argument("corpus", help="directory of true-map .txt files")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output prefix for .txt and .json tables")
    p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("render", help="render a map file to text or image")
    p.add_argument("map")
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "image"))
    p.add_argument("--cell-px", dest="cell_px", type=int)
    p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("score", help="score one snapshot map")
    p.add_argument("map")
    p.add_argument("--config")
    p.add_argument("--scorer", choices=SCORER_KINDS)
    p.add_argument("--format", choices=("image", "string"))
    p.add_argument("--out", help="write the full report document here")
    p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("replay", help="render an episode log to image frames")
    p.add_argument("log")
    p.add_argument("--out", required=True)
    p.add_argument("--cell-px", dest="cell_px", type=int)
    p.add_argument("--verbose", action="store_true")

    return parser


COMMANDS = {
    "run": cmd_run,
    "bench": cmd_bench,
    "render": cmd_render,
    "score": cmd_score,
    "replay": cmd_replay,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
