"""``foon`` command line: merge, search, compare, stats, validate, export-dot.

Exit codes: 0 ok, 1 goal unsatisfiable or not found, 2 parse/validation
error, 3 bad arguments, 4 unknown motion under a strict rate table.
"""
from __future__ import annotations

import argparse
import json
import sys
from enum import IntEnum
from pathlib import Path

from .core import FOONGraph, GoalSpec, MotionRateTable, UnknownMotionError
from .dot import to_dot
from .merge import merge_files, merge_units
from .metrics import compare
from .parser import (
    ParseError,
    load_kitchen,
    load_motion_rates,
    load_subgraph,
    parse_subgraph,
    read_text,
    serialize_subgraph,
)
from .search import GoalNotFoundError, SearchPolicy, UnsatisfiableGoalError, resolve


class ExitCode(IntEnum):
    OK = 0
    GOAL = 1
    PARSE = 2
    USAGE = 3
    UNKNOWN_MOTION = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _expand_inputs(paths) -> list:
    files = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            files.extend(sorted(path.glob("*.foon"), key=lambda p: p.name))
        elif path.is_file():
            files.append(path)
        else:
            raise UsageError(f"no such file or directory: {raw}")
    return files


def _require_file(path):
    if path is None:
        return None
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    return path


def _load_graph(path) -> FOONGraph:
    # a hand-edited file may repeat a unit; keep the first copy
    return merge_units(FOONGraph(), load_subgraph(_require_file(path)))[0]


def _load_rates(args, required=False) -> MotionRateTable:
    if args.motions is None:
        if required:
            raise UsageError("a motion rate file (-m) is required for this algorithm")
        table = MotionRateTable()
    else:
        table = load_motion_rates(_require_file(args.motions))
    if args.default_rate is not None and not 0.0 <= args.default_rate <= 1.0:
        raise UsageError("--default-rate must lie in [0, 1]")
    return table.with_options(default_rate=args.default_rate, strict=args.strict_rates)


def _goal(text) -> GoalSpec:
    try:
        return GoalSpec.parse(text)
    except ValueError as err:
        raise UsageError(f"bad goal {text!r}: {err}") from None


def cmd_merge(args, out) -> int:
    graph, report = merge_files(_expand_inputs(args.inputs))
    _write(args.output, serialize_subgraph(graph.units))
    print(report, file=out)
    return ExitCode.OK


def _search_args(p):
    p.add_argument("-f", "--foon", required=True, help="universal FOON file")
    p.add_argument("-k", "--kitchen", required=True, help="kitchen file")
    p.add_argument("-m", "--motions", help="motion success-rate file")
    p.add_argument("-g", "--goal", required=True, help='goal as "name" or "name|state1,state2"')
    rates = p.add_mutually_exclusive_group()
    rates.add_argument("--strict-rates", action="store_true",
                       help="fail on motions missing from the rate file")
    rates.add_argument("--default-rate", type=float, help="rate used for unlisted motions")
    p.add_argument("--depth-start", type=int, default=0, help="initial ids depth bound")


def cmd_search(args, out) -> int:
    if args.depth_start < 0:
        raise UsageError("--depth-start must be nonnegative")
    policy = SearchPolicy.from_name(args.algorithm, args.depth_start)
    rates = _load_rates(args, required=policy.algorithm == "gbfs_rate")
    goal = _goal(args.goal)
    graph = _load_graph(args.foon)
    kitchen = load_kitchen(_require_file(args.kitchen))
    report = resolve(graph, goal, kitchen, rates, policy)
    units = report.tree.functional_units()
    if args.output:
        _write(args.output, serialize_subgraph(units))
    if args.dot:
        _write(args.dot, to_dot(units, rates if len(rates) else None, name="task_tree"))
    if args.json:
        _write(args.json, json.dumps(report_dict(report), indent=2) + "\n")
    rate = "n/a" if report.avg_success_rate is None else f"{report.avg_success_rate:.2f}"
    print(f"{report.algorithm} {goal} units={report.unit_count} avg_rate={rate} "
          f"expansions={report.expansions}", file=out)
    return ExitCode.OK


def report_dict(report) -> dict:
    return {
        "algorithm": report.algorithm,
        "goal": str(report.goal),
        "goal_node": report.tree.goal_node.label(),
        "unit_count": report.unit_count,
        "avg_success_rate": report.avg_success_rate,
        "expansions": report.expansions,
        "restarts": report.restarts,
        "max_frontier": report.max_frontier,
        "final_depth_bound": report.final_depth_bound,
        "mean_branching": report.mean_branching,
        "units": list(report.tree.units),
        "status": "ok",
    }


def cmd_compare(args, out) -> int:
    rates = _load_rates(args, required=True)
    goal = _goal(args.goal)
    graph = _load_graph(args.foon)
    kitchen = load_kitchen(_require_file(args.kitchen))
    table = compare(graph, goal, kitchen, rates)
    out.write(table.render())
    if args.json:
        _write(args.json, table.to_json())
    if any(row.status == "ok" for row in table.rows):
        return ExitCode.OK
    if any(row.status == "unknown_motion" for row in table.rows):
        return ExitCode.UNKNOWN_MOTION
    return ExitCode.GOAL


def graph_stats(units) -> dict:
    graph = FOONGraph(tuple(units))
    text = serialize_subgraph(graph.units)
    return {
        "units": len(graph),
        "objects": len(graph.objects()),
        "motions": len(graph.motions()),
        "lines": text.count("\n"),
    }


def cmd_stats(args, out) -> int:
    units = load_subgraph(_require_file(args.foon))
    graph, report = merge_units(FOONGraph(), units)
    for key, value in graph_stats(graph.units).items():
        print(f"{key}: {value}", file=out)
    if report.duplicates_dropped:
        print(f"duplicates: {report.duplicates_dropped}", file=out)
    return ExitCode.OK


def validate_text(text: str, file: str) -> list:
    """Diagnostics for a subgraph file; empty when it is valid."""
    try:
        units = parse_subgraph(text, file)
    except ParseError as err:
        return [str(err)]
    problems = []
    first = {}
    for i, unit in enumerate(units):
        ident = unit.identity()
        if ident in first:
            problems.append(f"{file}: unit {i + 1} duplicates unit {first[ident] + 1}")
        else:
            first[ident] = i
    return problems


def cmd_validate(args, out) -> int:
    path = _require_file(args.file)
    problems = validate_text(read_text(path), str(path))
    for line in problems:
        print(line, file=sys.stderr)
    if problems:
        return ExitCode.PARSE
    print(f"{path}: ok", file=out)
    return ExitCode.OK


def cmd_export_dot(args, out) -> int:
    units = load_subgraph(_require_file(args.foon))
    rates = load_motion_rates(_require_file(args.motions)) if args.motions else None
    _write(args.output, to_dot(units, rates))
    return ExitCode.OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="foon", description="FOON merging and task-tree retrieval")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("merge", help="merge subgraph files into a universal FOON")
    p.add_argument("-i", "--inputs", nargs="+", required=True, help="files or directories")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("search", help="retrieve a task tree")
    _search_args(p)
    p.add_argument("-a", "--algorithm", required=True,
                   choices=["bfs", "ids", "gbfs-rate", "gbfs-count"])
    p.add_argument("-o", "--output", help="task tree as FOON text")
    p.add_argument("--dot", help="task tree as DOT")
    p.add_argument("--json", help="search report as JSON")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("compare", help="run all four algorithms on one goal")
    _search_args(p)
    p.add_argument("--json", help="comparison table as JSON")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("stats", help="summarize a FOON file")
    p.add_argument("-f", "--foon", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", help="check a FOON file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export-dot", help="render a FOON file as DOT")
    p.add_argument("-f", "--foon", required=True)
    p.add_argument("-m", "--motions")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return int(args.func(args, out))
    except UsageError as err:
        print(err, file=sys.stderr)
        return ExitCode.USAGE
    except ParseError as err:
        print(err, file=sys.stderr)
        return ExitCode.PARSE
    except (GoalNotFoundError, UnsatisfiableGoalError) as err:
        print(f"foon: {err}", file=sys.stderr)
        return ExitCode.GOAL
    except UnknownMotionError as err:
        print(f"foon: {err}", file=sys.stderr)
        return ExitCode.UNKNOWN_MOTION
    except OSError as err:
        print(f"foon: {err}", file=sys.stderr)
        return ExitCode.USAGE


if __name__ == "__main__":
    sys.exit(main())
