"""``imds`` command line: check, compile, generate and render.

Exit status: 0 when everything requested holds (or the command succeeded),
1 when a checked property is violated, 2 on any tool error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .core import DEFAULT_LIMIT, StateSpaceExceeded, build_lts
from .lang import SpecError, load_system
from .render import render_sequence_diagram
from .report import InvalidTrace, Report, load_witness
from .routes import (
    compile_to_imds,
    dump_plans,
    generate_all_behaviors,
    generate_identical_fleet,
    generate_similar_behavior,
    load_env_graph,
    load_plans,
)
from .verify import (
    DEADLOCK_FREE_CTL,
    NotADeadlockWitness,
    TerminationPredicate,
    check_deadlock_free_ctl,
    check_partial_deadlock,
    check_termination,
    check_total_deadlock,
    classify_deadlock,
)

OK, VIOLATED, ERROR = 0, 1, 2


class ToolError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ToolError(f"{path}: {exc.strerror or exc}") from None


def _load(path: str):
    try:
        return load_system(_read(path))
    except SpecError as exc:
        raise ToolError(exc.diagnostics.format(path)) from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def run_check(args) -> int:
    system, diags = _load(args.spec)
    for d in diags.warnings:
        print(d.format(args.spec), file=sys.stderr)
    try:
        lts = build_lts(system, args.limit)
    except StateSpaceExceeded as exc:
        raise ToolError(str(exc)) from None
    total = check_total_deadlock(lts)
    classified = []
    for w in total.witnesses:
        try:
            classified.append(replace(w, classification=classify_deadlock(lts, w)))
        except NotADeadlockWitness:
            classified.append(w)
    total.witnesses = classified
    verdicts = [total, check_partial_deadlock(lts), check_deadlock_free_ctl(lts)]
    if args.terminate:
        names = [a.strip() for a in args.terminate.split(",") if a.strip()]
        try:
            verdicts.append(check_termination(lts, TerminationPredicate.of(names)))
        except ValueError as exc:
            raise ToolError(str(exc)) from None
    report = Report(
        Path(args.spec).name,
        lts.num_nodes,
        lts.num_edges,
        verdicts,
        [d.message for d in diags.warnings],
        informational=frozenset([DEADLOCK_FREE_CTL]),
    )
    text = report.dumps_json() if args.format == "json" else report.dumps_text()
    _write(args.report, text)
    return report.exit_status


def run_compile(args) -> int:
    g = _topology(args.topology)
    plans = []
    for p in args.plans:
        plans += _plans(p)
    try:
        src = compile_to_imds(g, plans)
    except ValueError as exc:
        raise ToolError(str(exc)) from None
    _write(args.output, src)
    return OK


def _topology(path: str):
    try:
        return load_env_graph(_read(path))
    except ValueError as exc:
        raise ToolError(f"{path}: {exc}") from None


def _plans(path: str):
    try:
        return load_plans(_read(path))
    except ValueError as exc:
        raise ToolError(f"{path}: {exc}") from None


def run_generate(args) -> int:
    g = _topology(args.topology)
    try:
        if args.all:
            if not args.start:
                raise ToolError("--all needs --start")
            plans = generate_all_behaviors(g, args.start, robot=args.robot)
            plans = [p.renamed(f"{args.robot}{i}") for i, p in enumerate(plans, 1)]
        elif args.similar:
            target = args.to or args.start
            if not target:
                raise ToolError("--similar needs --to")
            plans = [generate_similar_behavior(p, target) for p in _plans(args.similar)]
        else:
            plan_file, count = args.fleet
            try:
                n = int(count)
            except ValueError:
                raise ToolError(f"fleet size {count!r} is not an integer") from None
            plans = generate_identical_fleet(_plans(plan_file)[0], n, args.robot)
    except (KeyError, ValueError) as exc:
        raise ToolError(str(exc)) from None
    _write(args.output, dump_plans(plans))
    return OK


def run_render(args) -> int:
    system, _ = _load(args.spec)
    try:
        data = json.loads(_read(args.witness))
    except json.JSONDecodeError as exc:
        raise ToolError(f"{args.witness}: {exc}") from None
    try:
        w = load_witness(data, system, args.index, args.property)
        diagram = render_sequence_diagram(system, w.prefix, w.cycle)
    except InvalidTrace as exc:
        raise ToolError(f"invalid trace: {exc}") from None
    _write(args.output, diagram.text())
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify deadlock and termination properties")
    p.add_argument("spec")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="node limit (default %(default)s)")
    p.add_argument("--terminate", metavar="A1,A2", help="agents whose termination must be inevitable")
    p.add_argument("--report", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=run_check)

    p = sub.add_parser("compile", help="compile route plans to an IMDS specification")
    p.add_argument("topology")
    p.add_argument("plans", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=run_compile)

    p = sub.add_parser("generate", help="generate route plans")
    p.add_argument("topology")
    p.add_argument("--start")
    p.add_argument("--robot", default="ROBOT", help="robot name prefix")
    p.add_argument("-o", "--output")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--all", action="store_true", help="every acyclic route from --start")
    mode.add_argument("--similar", metavar="PLAN", help="rotate PLAN to start at --to")
    mode.add_argument("--fleet", nargs=2, metavar=("PLAN", "N"), help="N copies of PLAN")
    p.add_argument("--to", metavar="C2")
    p.set_defaults(func=run_generate)

    p = sub.add_parser("render", help="draw a witness as a sequence diagram")
    p.add_argument("witness", help="JSON report or witness file")
    p.add_argument("spec")
    p.add_argument("--index", type=int, default=0, help="which witness (default first)")
    p.add_argument("--property", help="only consider witnesses of this property")
    p.add_argument("-o", "--output")
    p.set_defaults(func=run_render)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ToolError as exc:
        print(f"imds: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
