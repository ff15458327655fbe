"""Command-line entry point: ``sfsfd {optimize,sample,discrepancy,benchmark}``.

Every command accepts ``--config FILE``, a JSON object whose keys mirror the
long flag names (``"a_initial"`` or ``"a-initial"``).  Values from the file
become defaults; flags given on the command line always win.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import baselines, bench, spectral
from .discrepancy import VARIANTS, as_design, centered_l2_discrepancy
from .optimizer import ObjectiveSpec, run_sfsfd


class CommandError(Exception):
    """A failure that should end the process with a diagnostic, not a traceback."""


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _int_list(text):
    try:
        return [_positive_int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _seed_list(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [_nonneg_int(t) for t in text.split(",") if t.strip()]


def _method_list(text):
    methods = [t.strip() for t in text.split(",") if t.strip()]
    for m in methods:
        if m not in bench.METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {m!r}; choose from {bench.METHODS}")
    return methods


def _add_common(p):
    p.add_argument("--config", help="JSON file of default flag values")
    p.add_argument("--seed", type=_nonneg_int)
    p.add_argument("--out", help="output path")


def build_parser():
    parser = argparse.ArgumentParser(prog="sfsfd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimize a pmf for n-point designs in d dimensions")
    _add_common(p)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--d", type=_positive_int)
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--budget", type=_positive_int, help="max objective evaluations")
    p.add_argument("--a-initial", type=_positive_int)
    p.add_argument("--a-growth-period", type=_positive_int)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--trace", help="JSON-lines trace path (default: <out>.trace.jsonl)")
    p.set_defaults(func=cmd_optimize, seed=0, m=10, budget=1000, a_initial=50,
                   a_growth_period=10, variant="classical", out="sfsfd_pdf.json")

    p = sub.add_parser("sample", help="write a design as headerless CSV")
    _add_common(p)
    p.add_argument("--method", choices=("sfsfd", "lhs", "sobol", "uniform"))
    p.add_argument("--pdf", help="pmf JSON from 'optimize' (method sfsfd)")
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--d", type=_positive_int)
    p.add_argument("--sobol-mode", choices=baselines.SOBOL_MODES)
    p.add_argument("--unscrambled", action="store_true", help="same as --sobol-mode unscrambled")
    p.set_defaults(func=cmd_sample, seed=0, sobol_mode="shift")

    p = sub.add_parser("discrepancy", help="print the centered L2 discrepancy of a design file")
    p.add_argument("design", nargs="?", help="headerless CSV, one point per row")
    p.add_argument("--config", help="JSON file of default flag values")
    p.add_argument("--variant", choices=VARIANTS)
    p.set_defaults(func=cmd_discrepancy, variant="classical")

    p = sub.add_parser("benchmark", help="run the method x d x n x seed grid")
    _add_common(p)
    p.add_argument("--preset", choices=tuple(bench.PRESETS))
    p.add_argument("--methods", type=_method_list)
    p.add_argument("--dims", type=_int_list)
    p.add_argument("--sizes", type=_int_list)
    p.add_argument("--seeds", type=_seed_list, help="e.g. 0..9 or 0,1,2")
    p.add_argument("--budget", type=_positive_int)
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--a-initial", type=_positive_int)
    p.add_argument("--a-growth-period", type=_positive_int)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--sobol-mode", choices=baselines.SOBOL_MODES)
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--no-svg", action="store_true")
    p.set_defaults(func=cmd_benchmark, preset="desk", out="sfsfd_benchmark",
                   workers=int(os.environ.get("SFSFD_WORKERS", "1")))
    return parser


def _config_defaults(path, parser):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {path}: {exc}")
    if not isinstance(raw, dict):
        parser.error(f"config {path} must hold a JSON object")
    known = {a.dest for a in parser._actions}
    defaults = {}
    for key, value in raw.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in known or dest in ("config", "func", "command"):
            parser.error(f"config {path}: unknown option {key!r}")
        action = next(a for a in parser._actions if a.dest == dest)
        if action.type is not None and isinstance(value, str):
            try:
                value = action.type(value)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                parser.error(f"config {path}: bad value for {key!r}: {exc}")
        if action.choices is not None and value not in action.choices:
            parser.error(f"config {path}: {key!r} must be one of {list(action.choices)}")
        defaults[dest] = value
    return defaults


def _subparser(parser, command):
    return parser._subparsers._group_actions[0].choices[command]


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        subparser = _subparser(parser, args.command)
        subparser.set_defaults(**_config_defaults(args.config, subparser))
        args = parser.parse_args(argv)
    return parser, args


def _require(parser, args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        _subparser(parser, args.command).error(f"missing required option(s): {', '.join(missing)}")


# ---------------------------------------------------------------------------
# commands


def cmd_optimize(args, parser):
    _require(parser, args, "n", "d")
    spec = ObjectiveSpec(
        n=args.n,
        d=args.d,
        m=args.m,
        a_initial=args.a_initial,
        a_growth_period=args.a_growth_period,
        max_iterations=args.budget,
        seed=args.seed,
        variant=args.variant,
    )
    masses, trace = run_sfsfd(spec)
    if not np.isfinite(trace.rescored_objective):
        raise CommandError("objective estimate is not finite")
    meta = {
        "n": spec.n,
        "d": spec.d,
        "seed": spec.seed,
        "objective_value": trace.rescored_objective,
        "best_iterate_objective": trace.best_objective,
        "initial_objective": trace.initial_objective,
        "evaluations": len(trace.iterates),
        "budget": spec.max_iterations,
        "a_initial": spec.a_initial,
        "a_growth_period": spec.a_growth_period,
        "variant": spec.variant,
    }
    spectral.write_pdf(args.out, masses, trace.best_angles, meta)
    trace_path = args.trace or os.path.splitext(args.out)[0] + ".trace.jsonl"
    trace.write_jsonl(trace_path)
    print(f"{trace.rescored_objective:.10g}")
    return 0


def cmd_sample(args, parser):
    _require(parser, args, "method", "n", "d")
    mode = "unscrambled" if args.unscrambled else args.sobol_mode
    config = bench.GridConfig(sobol_mode=mode)
    masses = None
    if args.method == "sfsfd":
        if not args.pdf:
            _subparser(parser, "sample").error("--method sfsfd needs --pdf FILE")
        try:
            masses, _, _ = spectral.read_pdf(args.pdf)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            raise CommandError(f"cannot load pdf {args.pdf}: {exc}") from exc
    design = bench.generate_design(args.method, args.n, args.d, args.seed, config, masses)
    text = "".join(",".join(repr(float(v)) for v in row) + "\n" for row in design)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def read_design_csv(path):
    """Parse a headerless CSV design; errors name the offending line."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = [float(cell) for cell in line.strip().split(",")]
            except ValueError as exc:
                raise CommandError(f"{path}:{lineno}: non-numeric value ({exc})") from exc
            if rows and len(row) != len(rows[0]):
                raise CommandError(
                    f"{path}:{lineno}: expected {len(rows[0])} columns, found {len(row)}"
                )
            bad = [v for v in row if not 0.0 <= v <= 1.0]
            if bad:
                raise CommandError(f"{path}:{lineno}: coordinate {bad[0]!r} outside [0, 1]")
            rows.append(row)
    if not rows:
        raise CommandError(f"{path}: design file is empty")
    return as_design(rows)


def cmd_discrepancy(args, parser):
    _require(parser, args, "design")
    try:
        design = read_design_csv(args.design)
    except OSError as exc:
        raise CommandError(f"cannot read {args.design}: {exc}") from exc
    print(f"{centered_l2_discrepancy(design, args.variant):.10g}")
    return 0


def cmd_benchmark(args, parser):
    preset = bench.PRESETS[args.preset]
    base = preset["config"]
    config = bench.GridConfig(
        m=args.m or base.m,
        budget=args.budget or base.budget,
        a_initial=args.a_initial or base.a_initial,
        a_growth_period=args.a_growth_period or base.a_growth_period,
        variant=args.variant or base.variant,
        sobol_mode=args.sobol_mode or base.sobol_mode,
    )
    methods = args.methods or preset["methods"]
    dims = args.dims or preset["dims"]
    sizes = args.sizes or preset["sizes"]
    if args.seeds is not None:
        seeds = args.seeds
    elif args.seed is not None:
        seeds = [args.seed]
    else:
        seeds = preset["seeds"]
    if not seeds:
        raise CommandError("--seeds is empty")
    for d in dims:
        if "sobol" in methods and d > baselines.max_sobol_dimension():
            raise CommandError(f"d={d} exceeds the Sobol table ({baselines.max_sobol_dimension()})")

    os.makedirs(args.out, exist_ok=True)
    store = os.path.join(args.out, "records.jsonl")

    def progress(rec):
        status = "FAILED " + rec.error if rec.error else f"{rec.discrepancy:.6g}"
        print(f"{rec.method:>7} d={rec.d:<3} n={rec.n:<4} seed={rec.seed:<3} {status}",
              file=sys.stderr)

    records = bench.run_grid(methods, dims, sizes, seeds, config, store=store,
                             workers=args.workers, progress=progress)
    cells = bench.aggregate(records)
    formats = ("csv",) if args.no_svg else ("csv", "svg")
    paths = bench.emit_report(cells, args.out, formats)
    failed = [r for r in records if not r.ok]
    for path in paths:
        print(path)
    if failed:
        print(f"{len(failed)} cell(s) failed", file=sys.stderr)
        return 1
    return 0


def main(argv=None):
    parser, args = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        return args.func(args, parser)
    except CommandError as exc:
        print(f"sfsfd {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"sfsfd {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
