"""Trajectory records, CSV/manifest persistence, and run comparison.

One CSV row per (scenario, year) with a fixed, documented column set;
floats are written at 17 significant digits so regression fixtures
round-trip bit-faithfully.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .params import ParameterSet, document_digest
from .planner import SolveResult, SolverSettings

CSV_COLUMNS = [
    "year", "scenario_id", "scenario_prob",
    "Y", "growth", "c", "f", "C", "CT", "Q", "H", "S", "K",
    "share_consumption", "share_capital", "share_compute",
    "share_hardware_rd", "share_software_rd",
    "share_training", "share_inference",
]

HEADLINE_SERIES = ["Y", "growth", "f", "C", "CT",
                   "share_consumption", "share_capital", "share_compute",
                   "share_hardware_rd", "share_software_rd",
                   "share_training", "share_inference"]


@dataclass
class ScenarioPath:
    """Reported series for one scenario, cut to the planning horizon."""

    scenario_id: int
    prob: float
    zeta: float
    series: dict[str, np.ndarray]
    info_states: np.ndarray

    @property
    def n_years(self) -> int:
        return len(self.series["Y"])


@dataclass
class Trajectory:
    """Exportable record of a solved run."""

    mode: str
    tau_plan: int
    scenarios: list[ScenarioPath]
    value: float
    converged: bool
    iterations: int
    grad_norm: float

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for sc in self.scenarios:
            for t in range(sc.n_years):
                row = {"year": t, "scenario_id": sc.scenario_id,
                       "scenario_prob": sc.prob}
                for name in CSV_COLUMNS[3:]:
                    row[name] = float(sc.series[name][t])
                out.append(row)
        return out


def from_result(result: SolveResult, p: ParameterSet,
                dt: float = 1.0) -> Trajectory:
    """Cut solver paths to the planning window and derive display series."""
    n_report = min(int(round(p.tau_plan / dt)), result.n_periods)
    scenarios = []
    for sid, path in enumerate(result.paths):
        y = np.asarray(path.output)
        growth = np.zeros_like(y)
        growth[1:] = y[1:] / y[:-1] - 1.0
        series = {
            "Y": y, "growth": growth,
            "c": np.asarray(path.consumption_pc),
            "f": np.asarray(path.f), "C": np.asarray(path.c),
            "CT": np.asarray(path.c_t), "Q": np.asarray(path.q),
            "H": np.asarray(path.h), "S": np.asarray(path.s),
            "K": np.asarray(path.k),
            "share_consumption": np.asarray(path.out_shares)[:, 0],
            "share_capital": np.asarray(path.out_shares)[:, 1],
            "share_compute": np.asarray(path.out_shares)[:, 2],
            "share_hardware_rd": np.asarray(path.out_shares)[:, 3],
            "share_software_rd": np.asarray(path.out_shares)[:, 4],
            "share_training": np.asarray(path.comp_shares)[:, 0],
            "share_inference": np.asarray(path.comp_shares)[:, 1],
        }
        series = {k: v[:n_report].copy() for k, v in series.items()}
        scenarios.append(ScenarioPath(
            scenario_id=sid, prob=float(result.scenario_probs[sid]),
            zeta=float(result.scenario_zetas[sid]), series=series,
            info_states=np.asarray(path.info_state)[:n_report].copy()))
    return Trajectory(result.mode, n_report, scenarios, result.value,
                      result.converged, result.iterations, result.grad_norm)


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(traj: Trajectory, path: Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in traj.rows():
            writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def read_csv(path: Path) -> dict[int, dict[str, np.ndarray]]:
    """Per-scenario series keyed by scenario id."""
    with Path(path).open() as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    out: dict[int, dict[str, list[float]]] = {}
    for row in rows:
        sid = int(row["scenario_id"])
        bucket = out.setdefault(sid, {c: [] for c in CSV_COLUMNS if c != "scenario_id"})
        for c in bucket:
            bucket[c].append(float(row[c]))
    return {sid: {c: np.array(vals) for c, vals in series.items()}
            for sid, series in out.items()}


@dataclass
class RunManifest:
    """Identifies a run: config digest, mode, solver settings, outputs."""

    run_id: str
    mode: str
    config: dict[str, Any]
    solver_settings: dict[str, Any]
    created_at: float = field(default_factory=time.time)
    outputs: dict[str, str] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)

    def to_document(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id, "mode": self.mode, "config": self.config,
            "solver_settings": self.solver_settings,
            "created_at": self.created_at, "outputs": self.outputs,
            "summary": self.summary,
        }

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "RunManifest":
        return cls(run_id=doc["run_id"], mode=doc["mode"], config=doc["config"],
                   solver_settings=doc["solver_settings"],
                   created_at=doc.get("created_at", 0.0),
                   outputs=doc.get("outputs", {}), summary=doc.get("summary", {}))


def build_manifest(p: ParameterSet, mode: str, settings: SolverSettings) -> RunManifest:
    config = p.to_document()
    digest = document_digest(config, {"mode": mode,
                                      "solver": settings.to_document()})
    return RunManifest(run_id=digest, mode=mode, config=config,
                       solver_settings=settings.to_document())


def summarize(traj: Trajectory, dt: float = 1.0) -> dict[str, Any]:
    """Headline numbers printed after a run.

    Years where automation first reaches a threshold are scenario-0
    (highest-probability path in deterministic runs) and None when the
    threshold is not reached inside the planning window.
    """
    sc = traj.scenarios[0]
    f = sc.series["f"]
    growth = sc.series["growth"]

    def first_year(threshold: float) -> Optional[float]:
        hits = np.nonzero(f >= threshold - 1e-12)[0]
        return float(hits[0] * dt) if hits.size else None

    return {
        "value": traj.value,
        "converged": traj.converged,
        "iterations": traj.iterations,
        "grad_norm": traj.grad_norm,
        "final_f": float(f[-1]),
        "year_f_half": first_year(0.5),
        "year_f_full": first_year(1.0),
        "peak_growth": float(np.max(growth[1:])) if len(growth) > 1 else math.nan,
    }


def write_run(out_dir: Path, traj: Trajectory, manifest: RunManifest,
              diagnostics: list) -> RunManifest:
    """Persist a run directory: trajectory.csv, manifest.json, diagnostics.jsonl."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(traj, out_dir / "trajectory.csv")
    with (out_dir / "diagnostics.jsonl").open("w") as fh:
        for rec in diagnostics:
            fh.write(json.dumps(rec.to_document()) + "\n")
    manifest.outputs = {"trajectory": "trajectory.csv",
                        "diagnostics": "diagnostics.jsonl"}
    manifest.summary = summarize(traj)
    with (out_dir / "manifest.json").open("w") as fh:
        json.dump(manifest.to_document(), fh, indent=2)
    return manifest


def load_run(run_dir: Path) -> tuple[RunManifest, dict[int, dict[str, np.ndarray]]]:
    run_dir = Path(run_dir)
    with (run_dir / "manifest.json").open() as fh:
        manifest = RunManifest.from_document(json.load(fh))
    series = read_csv(run_dir / "trajectory.csv")
    return manifest, series


def compare_runs(run_dirs: list[Path], labels: Optional[list[str]] = None):
    """Aligned per-year table of headline series across runs.

    Returns a pandas DataFrame with one value column per run and a
    difference column per run pair for each series; mismatched horizons
    are truncated to the common window.
    """
    import pandas as pd

    if len(run_dirs) < 2:
        raise ValueError("need at least two runs to compare")
    labels = labels or [Path(d).name for d in run_dirs]
    seen: dict[str, int] = {}
    unique = []
    for label in labels:
        seen[label] = seen.get(label, 0) + 1
        unique.append(label if seen[label] == 1 else f"{label}#{seen[label]}")
    labels = unique
    loaded = [load_run(d) for d in run_dirs]
    horizons = [len(series[0]["year"]) for _, series in loaded]
    horizon = min(horizons)
    truncated = len(set(horizons)) > 1

    data: dict[str, Any] = {"year": np.arange(horizon)}
    for name in HEADLINE_SERIES:
        for label, (_, series) in zip(labels, loaded):
            data[f"{name}[{label}]"] = series[0][name][:horizon]
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                diff = (series_of(loaded[i][1], name, horizon)
                        - series_of(loaded[j][1], name, horizon))
                data[f"d({name})[{labels[i]}-{labels[j]}]"] = diff
    frame = pd.DataFrame(data)
    frame.attrs["truncated"] = truncated
    return frame


def series_of(series: dict[int, dict[str, np.ndarray]], name: str,
              horizon: int) -> np.ndarray:
    return series[0][name][:horizon]
