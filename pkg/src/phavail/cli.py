"""``phavail`` command-line entry point.

Exit status: 0 success, 1 usage error, 2 configuration/model error,
3 verification failure.
"""

import argparse
import sys
from dataclasses import replace

from .config import read_model_config
from .errors import ConfigError, PhavailError
from .report import (
    availability_columns,
    columns_to_csv,
    columns_to_svg,
    reliability_columns,
    sensitivity_csv,
    sensitivity_tables,
    steady_state_table,
    write_atomic,
)
from .verify import CLOSED_FORM_TOL, checks_table, run_verification

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _values(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("values must be positive")
    return vals


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", required=True, help="model configuration JSON (bundled: cchp.json)")
    common.add_argument("--csv", help="write CSV here instead of stdout")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--t-start", type=float)
    grid.add_argument("--t-stop", type=float)
    grid.add_argument("--points", type=int)
    grid.add_argument("--log", action="store_true", help="logarithmic time spacing")
    grid.add_argument("--svg", help="also write an SVG line chart")

    parser = _Parser(prog="phavail", description="Availability of repairable systems with Lindley failure times.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("availability", parents=[common, grid], help="Lindley vs exponential A(t) curves")
    sub.add_parser("reliability", parents=[common, grid], help="curves with and without repair")
    sub.add_parser("steady-state", parents=[common], help="long-run availability table")

    sens = sub.add_parser("sensitivity", parents=[common], help="long-run availability sensitivity tables")
    sens.add_argument("--param", choices=["lambda", "mu"], help="default: both")
    sens.add_argument("--values", type=_values, help="comma-separated rates (default: nominal x 0.5,1,1.5,2)")
    sens.add_argument("--component", help="restrict to one component label")

    ver = sub.add_parser("verify", parents=[common], help="cross-check closed forms, CTMC and Monte Carlo")
    ver.add_argument("--seed", type=int, default=42)
    ver.add_argument("--reps", type=int, default=200)
    ver.add_argument("--horizon", type=float, default=1e5)
    ver.add_argument("--tol", type=float, default=CLOSED_FORM_TOL, help="closed-form vs CTMC tolerance")
    return parser


def _emit(text, path):
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _curves(args, cfg, columns, title, ylabel):
    opts = cfg.grid
    if args.t_start is not None:
        opts = replace(opts, t_start=args.t_start)
    if args.t_stop is not None:
        opts = replace(opts, t_stop=args.t_stop)
    if args.points is not None:
        opts = replace(opts, points=args.points)
    if args.log:
        opts = replace(opts, log_spacing=True)
    cols = columns(cfg.model, opts.grid())
    _emit(columns_to_csv(cols), args.csv)
    if args.svg:
        write_atomic(args.svg, columns_to_svg(cols, title, ylabel))
    return EXIT_OK


def _run(args):
    cfg = read_model_config(args.model)
    model = cfg.model
    if args.command == "availability":
        return _curves(args, cfg, availability_columns, f"{model.name}: Lindley vs exponential availability", "availability")
    if args.command == "reliability":
        return _curves(args, cfg, reliability_columns, f"{model.name}: with and without repair", "availability / reliability")
    if args.command == "steady-state":
        table = steady_state_table(model)
        _emit(table.to_csv() if args.csv else table.render(), args.csv)
        return EXIT_OK
    if args.command == "sensitivity":
        params = (args.param,) if args.param else ("lambda", "mu")
        tables = sensitivity_tables(model, params, args.values, args.component)
        if args.csv:
            _emit(sensitivity_csv(tables), args.csv)
        else:
            _emit("\n".join(t.render() for t in tables), None)
        return EXIT_OK
    if args.command == "verify":
        checks = run_verification(model, tol=args.tol, seed=args.seed, replications=args.reps, horizon=args.horizon)
        table = checks_table(model, checks)
        _emit(table.to_csv() if args.csv else table.render(), args.csv)
        return EXIT_VERIFY if any(c.status == "FAIL" for c in checks) else EXIT_OK
    raise AssertionError(args.command)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"phavail: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhavailError as exc:
        print(f"phavail: model error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
