"""Command-line entry point: one subcommand per experiment plus field tools.

Precedence for parameters: built-in defaults, then --config key=value file,
then explicit command-line flags.  Exit status is 0 when every enabled
check passes, 1 when a check fails, 2 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .errors import GplabError
from .experiments import (
    EXPERIMENTS,
    build_config,
    emit_plotdata,
    parse_config_text,
    run,
)
from .field import l2_norm, read_snapshot


def _add_experiment_parsers(sub):
    for name, info in EXPERIMENTS.items():
        p = sub.add_parser(name, help=f"run the {name} experiment")
        for key, par in info["schema"].items():
            flag = "--" + key.replace("_", "-")
            if par.type is bool:
                p.add_argument(flag, dest=key, default=None,
                               choices=("true", "false"))
            else:
                p.add_argument(flag, dest=key, default=None, type=str)
        p.set_defaults(experiment=name)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gplab",
        description="Numerical laboratory for the condensate normal-form system",
    )
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--seed", default="0", help="64-bit seed for all randomness")
    ap.add_argument("--jobs", default="1", help="worker processes for scans")
    ap.add_argument("--config", default=None, help="key=value config file")
    sub = ap.add_subparsers(dest="command", required=True)
    _add_experiment_parsers(sub)

    pd = sub.add_parser("field-dump", help="print a field snapshot header and data")
    pd.add_argument("path")
    pd.add_argument("--head", type=int, default=8)

    pf = sub.add_parser("field-diff", help="compare two field snapshots")
    pf.add_argument("path_a")
    pf.add_argument("path_b")
    pf.add_argument("--tol", type=float, default=0.0)

    pp = sub.add_parser("plot", help="emit plot data and images for a finished run")
    pp.add_argument("kind", choices=("slope", "decay", "cauchy", "energy"))
    return ap


def _cmd_field_dump(args) -> int:
    f, t = read_snapshot(args.path)
    print(f"n={f.grid.n} r_max={f.grid.r_max:.17g} rep={f.rep} t={t:.17g}")
    print(f"l2_norm={l2_norm(f):.17g}")
    nodes = f.grid.r if f.rep == "physical" else f.grid.rho
    for j in range(min(args.head, f.grid.n)):
        v = f.data[j]
        print(f"  {nodes[j]:.10g}  {v.real:+.10e} {v.imag:+.10e}j")
    return 0


def _cmd_field_diff(args) -> int:
    fa, ta = read_snapshot(args.path_a)
    fb, tb = read_snapshot(args.path_b)
    if fa.grid != fb.grid or fa.rep != fb.rep:
        print("incompatible snapshots (grid or representation differ)")
        return 1
    d = fa.data - fb.data
    linf = float(np.abs(d).max())
    rel = l2_norm(fa.with_data(d)) / max(l2_norm(fa), 1e-300)
    print(f"dt={ta - tb:.17g} linf={linf:.17g} rel_l2={rel:.17g}")
    if args.tol > 0.0:
        return 0 if rel <= args.tol else 1
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "field-dump":
            return _cmd_field_dump(args)
        if args.command == "field-diff":
            return _cmd_field_diff(args)
        if args.command == "plot":
            for path in emit_plotdata(args.out, args.kind):
                print(path)
            return 0
        overrides = {}
        if args.config:
            raw = parse_config_text(open(args.config).read())
            exp = raw.pop("experiment", args.experiment)
            if exp != args.experiment:
                print(f"config file is for {exp!r}, not {args.experiment!r}",
                      file=sys.stderr)
                return 2
            for k in ("seed", "jobs", "output_dir"):
                raw.pop(k, None)
            overrides.update(raw)
        schema = EXPERIMENTS[args.experiment]["schema"]
        for key in schema:
            val = getattr(args, key, None)
            if val is not None:
                overrides[key] = val
        config = build_config(args.experiment, overrides, seed=int(args.seed),
                              output_dir=args.out, jobs=int(args.jobs))
        report = run(config)
        for c in report.checks:
            status = "PASS" if c.passed else "FAIL"
            val = c.value if isinstance(c.value, str) else f"{c.value:.6g}"
            print(f"[{status}] {c.name}: {val}  ({c.tolerance})")
        print(f"report: {config.output_dir}/report.json "
              f"({report.wall_time_s:.2f}s, version {report.version})")
        return 0 if report.passed else 1
    except GplabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
