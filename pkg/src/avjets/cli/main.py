"""Command-line entry point.

    avjets verify SUITE [--order N] [--seed S] [--samples K] [--cutoff C]
                        [--m-range LO..HI] [--rep NAME]... [--atlas FILE]
                        [--format text|json] [--out FILE]
    avjets compute TASK.json [--format text|json] [--out FILE]
    avjets parse {rep,atlas} FILE [--param name=value]... [--format text|json] [--out FILE]

Exit codes: 0 pass, 1 verification failure, 2 usage, parse or validation error.
The default seed comes from the AVJETS_SEED environment variable (else 0).
Structured (json) output leaves out timings so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from avjets.cli.formats import (
    dumps,
    parse_atlas,
    parse_rep,
    read_json,
    serialize_atlas,
    serialize_rep,
)
from avjets.cli.suites import SUITES, SuiteConfig, parse_m_range, run_suite
from avjets.cli.tasks import render_result, run_task
from avjets.errors import AVError, ParseError, ValidationFailed

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "AVJETS_SEED"


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV}={raw!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avjets", description="Exact checks for jet modules and AV-modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", metavar="FILE", help="also write the structured (json) report here")

    v = sub.add_parser("verify", help="run a named verification suite")
    v.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    v.add_argument("--order", type=int, help="truncation order N")
    v.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or 0)")
    v.add_argument("--samples", type=int)
    v.add_argument("--cutoff", type=int, help="degree cutoff")
    v.add_argument("--m-range", default="-2..3", help="parameter range for the rank 2 families")
    v.add_argument("--rep", action="append", default=[],
                   help="representation: built-in name like rho(1), or FILE.json[:m=1]")
    v.add_argument("--atlas", metavar="FILE", help="atlas file (default: the projective line)")
    output_flags(v)

    c = sub.add_parser("compute", help="run one computation from a task file")
    c.add_argument("task", help="task file (JSON)")
    output_flags(c)

    p = sub.add_parser("parse", help="parse, validate and re-serialize a file")
    p.add_argument("kind", choices=("rep", "atlas"))
    p.add_argument("file")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    output_flags(p)
    return parser


def _emit(text: str, structured: dict, args) -> None:
    data = json.dumps(structured, indent=2, sort_keys=True, default=str) + "\n"
    sys.stdout.write(data if args.format == "json" else text.rstrip("\n") + "\n")
    if args.out:
        Path(args.out).write_text(data)


def cmd_verify(args) -> int:
    cfg = SuiteConfig(
        suite=args.suite,
        order=args.order,
        seed=_default_seed() if args.seed is None else args.seed,
        samples=args.samples,
        cutoff=args.cutoff,
        output_format=args.format,
        m_range=parse_m_range(args.m_range),
        reps=tuple(args.rep),
        atlas=args.atlas,
    )
    report = run_suite(cfg)
    _emit(report.to_text(), report.to_dict(include_timing=False), args)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_compute(args) -> int:
    path = Path(args.task)
    result = run_task(read_json(path), str(path), path.parent)
    _emit(render_result(result), result, args)
    return EXIT_PASS


def cmd_parse(args) -> int:
    params = {}
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep:
            raise ParseError(f"--param expects NAME=VALUE, got {item!r}")
        params[key] = value
    data = read_json(args.file)
    if args.kind == "rep":
        out = serialize_rep(parse_rep(data, params, args.file))
    else:
        if params:
            raise ParseError("atlas files take no parameters")
        out = serialize_atlas(parse_atlas(data, args.file))
    _emit(dumps(out), out, args)
    return EXIT_PASS


COMMANDS = {"verify": cmd_verify, "compute": cmd_compute, "parse": cmd_parse}


def _glue_negative_values(argv):
    """Let ``--m-range -2..3`` through: argparse would take -2..3 for an option."""
    out = []
    argv = list(argv)
    i = 0
    while i < len(argv):
        if argv[i] == "--m-range" and i + 1 < len(argv):
            out.append(f"--m-range={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        return COMMANDS[args.command](args)
    except ValidationFailed as exc:
        print(f"avjets: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(exc.report.to_text(), file=sys.stderr)
        return EXIT_USAGE
    except (AVError, ValueError) as exc:
        print(f"avjets: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
