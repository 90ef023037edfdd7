"""Command-line entry point.

Subcommands:
    run        execute a single experiment from a spec file
    sweep      run a Cartesian grid of field overrides over a spec file
    narma-gen  write a NARMA input/target dataset to CSV
    figure     turn results into plot-ready tabular text

Exit codes: 0 success, 2 spec error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import PulseRcError, SpecError
from .harness import (
    ExperimentSpec,
    emit_figure_data,
    emit_pearson_table_from_file,
    parse_spec_file,
    run_experiment,
    run_sweep,
    write_records,
)
from .tasks import NarmaConfig, gen_narma


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pulserc",
        description="Delay-based reservoir computing benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single experiment from a spec file")
    _add_spec_overrides(p_run)

    p_sweep = sub.add_parser("sweep", help="run a grid of experiments")
    _add_spec_overrides(p_sweep)
    p_sweep.add_argument(
        "--axis", action="append", default=[], metavar="FIELD=V1,V2,...",
        help="sweep axis; repeat for a Cartesian product")

    p_gen = sub.add_parser("narma-gen", help="emit a NARMA dataset to CSV")
    p_gen.add_argument("--order", type=int, default=2)
    p_gen.add_argument("--length", type=int, default=3000)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--low", type=float, default=0.0)
    p_gen.add_argument("--high", type=float, default=0.5)
    p_gen.add_argument("--compat-narma-sum", action="store_true")
    p_gen.add_argument("--out", required=True)

    p_fig = sub.add_parser("figure", help="emit figure data from results")
    p_fig.add_argument("--figure", required=True,
                       choices=("pearson_vs_N", "prediction_trace"))
    p_fig.add_argument("--records", help="results file (pearson_vs_N)")
    p_fig.add_argument("--spec", help="spec file to (re)run (prediction_trace)")
    p_fig.add_argument("--out", required=True)

    return parser


def _add_spec_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spec", required=True, help="experiment spec file")
    p.add_argument("--out", help="results file (overrides the spec's)")
    p.add_argument("--seed", type=int, help="override base seed")
    p.add_argument("--replications", type=int, help="override replication count")
    p.add_argument("--threads", type=int, default=1,
                   help="concurrent sweep points (results are identical)")
    p.add_argument("--compat-narma-sum", action="store_true",
                   help="use the N-term NARMA sum convention")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "narma-gen":
            return _cmd_narma_gen(args)
        return _cmd_figure(args)
    except SpecError as exc:
        print(f"pulserc: spec error: {exc}", file=sys.stderr)
        return 2
    except (PulseRcError, OSError) as exc:
        print(f"pulserc: error: {exc}", file=sys.stderr)
        return 3


def _load_spec(args) -> ExperimentSpec:
    spec = parse_spec_file(args.spec)
    overrides = {}
    if args.out is not None:
        overrides["out"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.replications is not None:
        overrides["replications"] = args.replications
    if args.compat_narma_sum:
        overrides["compat_narma_sum"] = True
    if overrides:
        spec = replace(spec, **overrides)
        spec.validate()
    return spec


def _cmd_run(args) -> int:
    spec = _load_spec(args)
    record = run_experiment(spec)
    write_records(spec.out, spec, [], [record])
    print(f"{spec.task} order={spec.order} V={spec.num_nodes}: "
          f"pearson {record.pearson_mean:.4f} +- {record.pearson_std:.4f}, "
          f"nrmse {record.nrmse_mean:.4f} +- {record.nrmse_std:.4f} "
          f"({record.duration_s:.2f}s, {spec.replications} reps) -> {spec.out}")
    return 0


def _cmd_sweep(args) -> int:
    spec = _load_spec(args)
    axes = [_parse_axis(a) for a in args.axis]
    records = run_sweep(spec, axes, out_path=spec.out, threads=args.threads)
    total = sum(r.duration_s for r in records)
    print(f"{len(records)} experiment(s) -> {spec.out} ({total:.2f}s)")
    return 0


def _parse_axis(text: str) -> tuple[str, list[float]]:
    if "=" not in text:
        raise SpecError(f"axis must look like FIELD=V1,V2,..., got {text!r}")
    name, _, rest = text.partition("=")
    try:
        values = [float(p) for p in rest.split(",") if p.strip()]
    except ValueError as exc:
        raise SpecError(f"axis {name.strip()!r}: {exc}") from exc
    if not values:
        raise SpecError(f"axis {name.strip()!r} has no values")
    return name.strip(), values


def _cmd_narma_gen(args) -> int:
    cfg = NarmaConfig(order=args.order, length=args.length, seed=args.seed,
                      input_low=args.low, input_high=args.high)
    ds = gen_narma(cfg, compat_sum=args.compat_narma_sum)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(f"# NARMA-{cfg.order} length={cfg.length} seed={cfg.seed}\n")
        fh.write("u,y\n")
        for u, y in zip(ds.inputs, ds.targets):
            fh.write(f"{float(u)!r},{float(y)!r}\n")
    print(f"NARMA-{cfg.order} dataset ({cfg.length} rows) -> {args.out}")
    return 0


def _cmd_figure(args) -> int:
    if args.figure == "pearson_vs_N":
        if not args.records:
            raise SpecError("figure pearson_vs_N needs --records")
        emit_pearson_table_from_file(args.records, args.out)
    else:
        if not args.spec:
            raise SpecError("figure prediction_trace needs --spec")
        spec = parse_spec_file(args.spec)
        record = run_experiment(spec)
        emit_figure_data([record], "prediction_trace", args.out)
    print(f"{args.figure} -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
