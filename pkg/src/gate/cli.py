"""Command-line front door: run scenarios, compare runs, sweep parameters."""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import params as params_mod
from . import trajectory as traj_mod
from .checks import sanity_check_simple_policy, sanity_check_spliced_utility
from .planner import MODES, NaNObjectiveError, SolverSettings, solve

log = logging.getLogger("gate")

MODE_ALIASES = {"det": "deterministic", "ext": "externality",
                "unc": "uncertainty"}


def _configure_logging() -> None:
    level = os.environ.get("GATE_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")


def _load_config(path: str, strict: bool) -> params_mod.ParameterSet:
    with open(path) as fh:
        doc = json.load(fh)
    p, load_violations = params_mod.from_document(doc)
    hard = load_violations if strict else []
    hard += params_mod.validate(p, "permissive")
    if hard:
        for v in hard:
            print(f"config error - {v}", file=sys.stderr)
        raise SystemExit(1)
    warnings = params_mod.validate(p, "strict")
    if not strict:
        warnings = warnings + load_violations
    for v in warnings:
        log.warning("outside documented range: %s", v)
    if strict and params_mod.validate(p, "strict"):
        for v in params_mod.validate(p, "strict"):
            print(f"config error (strict) - {v}", file=sys.stderr)
        raise SystemExit(1)
    return p


def _settings_from_args(args) -> SolverSettings:
    settings = SolverSettings()
    if args.max_iterations is not None:
        settings.max_iterations = args.max_iterations
    if args.grad_tol is not None:
        settings.grad_tol = args.grad_tol
    if args.dt is not None:
        settings.dt = args.dt
    if args.learning_rate is not None:
        settings.learning_rate = args.learning_rate
    return settings


def cmd_run(args) -> int:
    p = _load_config(args.config, args.strict)
    mode = MODE_ALIASES.get(args.mode, args.mode)
    settings = _settings_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        result = solve(p, mode, settings)
    except NaNObjectiveError as exc:
        print(f"solver aborted on NaN objective: {exc}", file=sys.stderr)
        print(json.dumps(exc.dump, indent=2), file=sys.stderr)
        return 2

    traj = traj_mod.from_result(result, p, settings.dt)
    manifest = traj_mod.build_manifest(p, mode, settings)
    manifest = traj_mod.write_run(out_dir, traj, manifest, result.diagnostics)

    if args.checks:
        for report in (sanity_check_simple_policy(p, result, settings),
                       sanity_check_spliced_utility(p, result, settings)):
            print(report)

    s = manifest.summary
    print(f"run {manifest.run_id} mode={mode} "
          f"{'converged' if s['converged'] else 'NOT CONVERGED'} "
          f"after {s['iterations']} iterations (V={s['value']:.9g})")
    print(f"  final f = {s['final_f']:.4f}"
          + (f"; f>=0.5 in year {s['year_f_half']:.0f}" if s["year_f_half"] is not None else "; f<0.5 in window")
          + (f"; f=1 in year {s['year_f_full']:.0f}" if s["year_f_full"] is not None else "; f<1 in window"))
    print(f"  peak annual output growth = {s['peak_growth']:.4%}")
    print(f"  outputs in {out_dir}")
    return 0


def cmd_compare(args) -> int:
    frame = traj_mod.compare_runs([Path(d) for d in args.runs])
    if frame.attrs.get("truncated"):
        log.warning("planning horizons differ; comparison truncated to the common window")
    out = Path(args.out) if args.out else None
    if out:
        frame.to_csv(out, index=False, float_format="%.17g")
        print(f"comparison written to {out}")
    with_pandas_width(frame, args.series)
    return 0


def with_pandas_width(frame, series_filter=None) -> None:
    import pandas as pd

    cols = ["year"] + [c for c in frame.columns
                       if series_filter is None or c.startswith(series_filter)]
    cols = list(dict.fromkeys(cols))
    with pd.option_context("display.width", 200, "display.max_columns", 50,
                           "display.float_format", lambda x: f"{x:.6g}"):
        print(frame[cols].to_string(index=False, max_rows=30))


def _parse_grid(spec: str) -> list[float]:
    """Grid specs: 'a,b,c' | 'lo:hi:n' (linear) | 'log:lo:hi:n'."""
    if spec.startswith("log:"):
        lo, hi, n = spec[4:].split(":")
        return list(np.geomspace(float(lo), float(hi), int(n)))
    if ":" in spec:
        lo, hi, n = spec.split(":")
        return list(np.linspace(float(lo), float(hi), int(n)))
    return [float(x) for x in spec.split(",")]


def _sweep_point(base_doc, name, value, mode, settings, out_dir, theta_init):
    from dataclasses import replace  # local to keep workers import-light

    doc = dict(base_doc)
    doc[name] = value
    p, _ = params_mod.from_document(doc)
    errs = params_mod.validate(p, "permissive")
    if errs:
        raise ValueError("; ".join(map(str, errs)))
    result = solve(p, mode, settings, theta_init=theta_init)
    traj = traj_mod.from_result(result, p, settings.dt)
    manifest = traj_mod.build_manifest(p, mode, settings)
    point_dir = out_dir / f"{name}={value:.8g}"
    traj_mod.write_run(point_dir, traj, manifest, result.diagnostics)
    summary = traj_mod.summarize(traj)
    summary[name] = value
    theta_next = result.schedule.logits[0] if result.schedule.n_states == 1 else None
    return summary, theta_next


def cmd_sweep(args) -> int:
    p = _load_config(args.config, args.strict)
    name = args.param
    if name not in params_mod.FIELD_NAMES:
        print(f"unknown parameter {name!r}", file=sys.stderr)
        return 1
    grid = _parse_grid(args.grid)
    if args.strict:
        meta = params_mod.PARAM_TABLE.get(name)
        if meta and meta.lo is not None:
            bad = [v for v in grid if not meta.lo <= v <= meta.hi]
            if bad:
                print(f"grid points outside documented range for {name}: {bad}",
                      file=sys.stderr)
                return 1
    mode = MODE_ALIASES.get(args.mode, args.mode)
    settings = _settings_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    base_doc = p.to_document()

    summaries: list[dict] = []
    failures: list[tuple[float, str]] = []
    if args.jobs > 1:
        # parallel points cannot chain warm starts; each uses the default
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = {pool.submit(_sweep_point, base_doc, name, v, mode,
                                   settings, out_dir, None): v for v in grid}
            for fut in concurrent.futures.as_completed(futures):
                v = futures[fut]
                try:
                    summary, _ = fut.result()
                    summaries.append(summary)
                except Exception as exc:  # point failure: record, continue
                    failures.append((v, str(exc)))
        summaries.sort(key=lambda s: s[name])
    else:
        theta = None
        for v in grid:
            try:
                summary, theta = _sweep_point(base_doc, name, v, mode,
                                              settings, out_dir, theta)
                summaries.append(summary)
            except Exception as exc:
                failures.append((v, str(exc)))
                theta = None

    import pandas as pd

    frame = pd.DataFrame(summaries)
    frame.to_csv(out_dir / "sweep.csv", index=False, float_format="%.17g")
    print(frame.to_string(index=False))
    for v, msg in failures:
        print(f"point {name}={v} failed: {msg}", file=sys.stderr)
    print(f"sweep outputs in {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gate", description="AI-and-growth scenario solver")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_args(sp):
        sp.add_argument("--mode", default="det",
                        choices=sorted(set(MODES) | set(MODE_ALIASES)))
        sp.add_argument("--max-iterations", type=int, default=None)
        sp.add_argument("--grad-tol", type=float, default=None)
        sp.add_argument("--learning-rate", type=float, default=None)
        sp.add_argument("--dt", type=float, default=None)
        sp.add_argument("--strict", action="store_true",
                        help="treat documented-range violations as errors")

    run = sub.add_parser("run", help="solve one scenario and persist outputs")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default="gate-run")
    run.add_argument("--checks", action="store_true",
                     help="also run the optimizer sanity checks")
    add_solver_args(run)
    run.set_defaults(func=cmd_run)

    comp = sub.add_parser("compare", help="align and difference completed runs")
    comp.add_argument("runs", nargs="+")
    comp.add_argument("--out", default=None)
    comp.add_argument("--series", default=None,
                      help="only print columns starting with this prefix")
    comp.set_defaults(func=cmd_compare)

    sweep = sub.add_parser("sweep", help="solve across a parameter grid")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--param", required=True)
    sweep.add_argument("--grid", required=True,
                       help="'a,b,c' | 'lo:hi:n' | 'log:lo:hi:n'")
    sweep.add_argument("--out", default="gate-sweep")
    sweep.add_argument("--jobs", type=int, default=1)
    add_solver_args(sweep)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
