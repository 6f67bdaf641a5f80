"""Command-line front end.

Subcommands::

    run      simulate a model and write its interval (or point) orbit
    case     reproduce the published tables and compare
    diverge  compare point orbits of two extensions of the same model
    list     show the built-in case studies

Exit codes: 0 success, 1 a case comparison failed, 2 usage/parse/config
error, 3 evaluation error. Every error prints one line starting ``error:``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import casebook, formats
from .interval import DecimalLiteral, DecimalParseError
from .model import ModelError, load_model, parse_model
from .simulator import (
    SimulationConfig,
    SimulationError,
    divergence_index,
    parse_input_spec,
    run_interval,
    run_point,
)

EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_EVAL = 3

_MODES = {"degenerate": "degenerate-nearest", "tight": "tight-enclosure"}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE) -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(message.replace("\n", " "))


def _model_from(text: Optional[str], path: Optional[str], flag: str):
    if (text is None) == (path is None):
        raise CliError(f"give exactly one of --{flag} or --{flag}-file")
    try:
        if text is not None:
            return parse_model(text)
        return load_model(path)
    except ModelError as exc:
        raise CliError(f"model: {exc}") from exc
    except OSError as exc:
        raise CliError(f"cannot read model file: {exc}") from exc


def _config(args, model) -> SimulationConfig:
    try:
        return SimulationConfig(
            model=model,
            horizon=args.n,
            x0=DecimalLiteral(args.x0),
            input=parse_input_spec(args.input),
            noise=parse_input_spec(args.noise),
            interval_mode=_MODES[getattr(args, "mode", "degenerate")],
        )
    except (ValueError, DecimalParseError) as exc:
        raise CliError(str(exc)) from exc


def _emit(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8", newline="\n")


def _note(line: str, output: Optional[str]) -> None:
    # Keep stdout clean when the data itself goes to stdout.
    stream = sys.stderr if output in (None, "-") else sys.stdout
    print(line, file=stream)


def cmd_run(args) -> int:
    model = _model_from(args.model, args.model_file, "model")
    cfg = _config(args, model)
    hexf = args.hex_floats
    try:
        if args.point:
            values = run_point(cfg)
        else:
            points = run_interval(cfg)
    except SimulationError as exc:
        raise CliError(f"evaluation failed at {exc}", EXIT_EVAL) from exc
    if args.point:
        writer = formats.point_orbit_json if args.format == "json" else formats.point_orbit_csv
        _emit(writer(values, hexf), args.output)
        _note(f"n={len(values)} value={formats.fmt_float(values[-1], hexf)}", args.output)
        return 0
    writer = formats.orbit_json if args.format == "json" else formats.orbit_csv
    _emit(writer(points, hexf), args.output)
    last = points[-1]
    _note(
        f"n={last.n} width={formats.fmt_float(last.width, hexf)} "
        f"midpoint={formats.fmt_float(last.midpoint, hexf)}",
        args.output,
    )
    return 0


def cmd_case(args) -> int:
    if args.selector == "all":
        if args.x0 is not None:
            raise CliError("--x0 needs a single case, not 'all'")
        instances = casebook.list_cases()
    else:
        try:
            case = casebook.get_case(args.selector)
        except casebook.UnknownCaseError:
            known = ", ".join(c.case_id for c in casebook.CASES)
            raise CliError(f"unknown case {args.selector!r} (known: {known}, all)")
        instances = [i for i in casebook.list_cases() if i.case_id == case.case_id]
        if args.x0 is not None:
            instances = [i for i in instances if i.x0 == args.x0]
            if not instances:
                raise CliError(f"case {case.case_id} has no tabulated x0={args.x0}")
    reports = casebook.run_all(instances, jobs=args.jobs)
    means = casebook.mean_midpoint_differences(reports)
    if args.format == "json":
        text = formats.report_json(reports, args.hex_floats, {"mean_midpoint_diff": means})
    else:
        text = formats.report_csv(reports, args.hex_floats)
    _emit(text, args.output)
    rows = [r for rep in reports for r in rep.rows]
    failed = [r for r in rows if not r.passed]
    _note(f"{len(rows) - len(failed)}/{len(rows)} rows pass", args.output)
    for r in failed:
        case_id, x0, n = r.reference.key
        _note(f"fail: {case_id} x0={x0} n={n}: {'; '.join(r.failures)}", args.output)
    return EXIT_FAIL if failed else 0


def cmd_diverge(args) -> int:
    ma = _model_from(args.model_a, args.model_a_file, "model-a")
    mb = _model_from(args.model_b, args.model_b_file, "model-b")
    lags_a = (ma.max_lag_y, ma.max_lag_u, ma.max_lag_e)
    lags_b = (mb.max_lag_y, mb.max_lag_u, mb.max_lag_e)
    if lags_a != lags_b:
        raise CliError(f"models have different lags: {lags_a} vs {lags_b}")
    if not args.threshold >= 0:
        raise CliError("--threshold must be non-negative")
    try:
        a = run_point(_config(args, ma))
        b = run_point(_config(args, mb))
    except SimulationError as exc:
        raise CliError(f"evaluation failed at {exc}", EXIT_EVAL) from exc
    _emit(formats.series_csv(a, b, args.hex_floats), args.output)
    idx = divergence_index(a, b, args.threshold)
    _note(f"divergence index: {idx if idx is not None else 'none'}", args.output)
    return 0


def cmd_list(args) -> int:
    for case in casebook.CASES:
        params = " ".join(f"{k}={v}" for k, v in case.parameters)
        print(f"{case.case_id}: {case.title}")
        print(f"  model: {case.model_source}")
        print(f"  x0: {', '.join(case.initial_conditions)}  input: {case.input_spec}"
              + (f"  {params}" if params else ""))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--hex-floats", action="store_true",
                        help="write floats as lossless hex significands")
    common.add_argument("-o", "--output", help="output file (default: stdout)")

    sim = _Parser(add_help=False)
    sim.add_argument("--x0", required=True, help="initial output, decimal")
    sim.add_argument("--n", type=int, required=True, help="horizon N")
    sim.add_argument("--input", default="zero",
                     help="zero | const:<v> | step:<amp>:<start> | file:<path>")
    sim.add_argument("--noise", default="zero", help="noise signal, same syntax")

    p = _Parser(prog="narmax-interval",
                description="Interval simulation of polynomial NARMAX models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", parents=[common, sim], help="simulate a model")
    run.add_argument("--model", help='model text, e.g. "y(k) = 0.5*y(k-1)"')
    run.add_argument("--model-file", help="path to a model file")
    run.add_argument("--mode", choices=sorted(_MODES), default="degenerate",
                     help="enclosure of decimal inputs (default: degenerate)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--point", action="store_true",
                     help="plain binary64 orbit instead of enclosures")
    run.set_defaults(func=cmd_run)

    case = sub.add_parser("case", parents=[common], help="reproduce published tables")
    case.add_argument("selector", help="logistic | sine | flexible | all")
    case.add_argument("--x0", help="restrict to one tabulated initial condition")
    case.add_argument("--format", choices=("csv", "json"), default="csv")
    case.add_argument("--jobs", type=int, default=1, help="parallel case runs")
    case.set_defaults(func=cmd_case)

    div = sub.add_parser("diverge", parents=[common, sim],
                         help="point-orbit divergence of two model forms")
    div.add_argument("--model-a")
    div.add_argument("--model-a-file")
    div.add_argument("--model-b")
    div.add_argument("--model-b-file")
    div.add_argument("--threshold", type=float, default=0.5)
    div.set_defaults(func=cmd_diverge)

    lst = sub.add_parser("list", help="list built-in cases")
    lst.set_defaults(func=cmd_list)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
