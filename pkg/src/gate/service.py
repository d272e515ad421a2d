"""Local HTTP backend for the interactive sandbox.

Endpoints under /api/v1: submit parameter documents for solving, poll
job status, stream per-iteration progress, fetch trajectories, persist
named scenarios, and compare them. Jobs run on a bounded thread pool;
the registry is the only synchronized structure, and scenario stores
reuse the CLI's on-disk manifest + trajectory format so the two
front-ends interoperate.
"""

from __future__ import annotations

import argparse
import json
import queue
import shutil
import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse, StreamingResponse

from . import params as params_mod
from . import trajectory as traj_mod
from .planner import (MODES, IterationRecord, NaNObjectiveError,
                      SolverSettings, solve)

PROGRESS_DONE = {"event": "done"}


class Job:
    def __init__(self, job_id: str, mode: str, p: params_mod.ParameterSet,
                 settings: SolverSettings, warnings: list[str]):
        self.id = job_id
        self.mode = mode
        self.params = p
        self.settings = settings
        self.warnings = warnings
        self.status = "queued"
        self.error: Optional[str] = None
        self.iteration = 0
        self.value: Optional[float] = None
        self.result = None
        self.trajectory: Optional[traj_mod.Trajectory] = None
        self.progress_log: list[dict] = []
        self.subscribers: list[queue.SimpleQueue] = []
        self.lock = threading.Lock()

    def publish(self, record: IterationRecord) -> None:
        doc = record.to_document()
        with self.lock:
            self.status = "running"
            self.iteration = record.iteration
            self.value = record.value
            self.progress_log.append(doc)
            subs = list(self.subscribers)
        for q in subs:
            q.put(doc)

    def finish(self, status: str, error: Optional[str] = None) -> None:
        with self.lock:
            self.status = status
            self.error = error
            subs = list(self.subscribers)
            self.subscribers.clear()
        for q in subs:
            q.put(PROGRESS_DONE)

    def snapshot(self) -> dict[str, Any]:
        with self.lock:
            doc = {"job_id": self.id, "mode": self.mode, "status": self.status,
                   "warnings": self.warnings}
            if self.status == "running":
                doc["iteration"] = self.iteration
                doc["value"] = self.value
            if self.status == "failed":
                doc["error"] = self.error
            if self.status == "done" and self.trajectory is not None:
                doc["summary"] = traj_mod.summarize(self.trajectory)
        return doc


class Session:
    """Job registry plus the on-disk scenario store."""

    def __init__(self, data_dir: Path, workers: Optional[int] = None):
        self.data_dir = Path(data_dir)
        self.scenario_dir = self.data_dir / "scenarios"
        self.scenario_dir.mkdir(parents=True, exist_ok=True)
        self.jobs: dict[str, Job] = {}
        self.lock = threading.Lock()
        self.pool = ThreadPoolExecutor(max_workers=workers or _default_workers())

    def submit(self, doc: dict[str, Any], mode: str,
               settings: SolverSettings) -> tuple[Optional[Job], list[params_mod.Violation]]:
        p, load_violations = params_mod.from_document(doc)
        hard = params_mod.validate(p, "permissive")
        if hard:
            return None, hard + load_violations
        warnings = [str(v) for v in params_mod.validate(p, "strict") + load_violations]
        job = Job(uuid.uuid4().hex[:12], mode, p, settings, warnings)
        with self.lock:
            self.jobs[job.id] = job
        self.pool.submit(self._run, job)
        return job, []

    def _run(self, job: Job) -> None:
        try:
            result = solve(job.params, job.mode, job.settings,
                           progress=job.publish)
            job.result = result
            job.trajectory = traj_mod.from_result(result, job.params,
                                                  job.settings.dt)
            job.finish("done")
        except NaNObjectiveError as exc:
            job.finish("failed", f"NaN objective: {exc} {json.dumps(exc.dump)}")
        except Exception as exc:  # surfaced verbatim to the UI
            job.finish("failed", str(exc))

    def get(self, job_id: str) -> Job:
        with self.lock:
            job = self.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return job

    # -- scenario store ----------------------------------------------------
    def scenario_path(self, name: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in name)
        return self.scenario_dir / safe

    def save_scenario(self, name: str, job: Job) -> None:
        target = self.scenario_path(name)
        if target.exists():
            raise HTTPException(409, f"scenario {name!r} already exists")
        manifest = traj_mod.build_manifest(job.params, job.mode, job.settings)
        tmp = Path(tempfile.mkdtemp(dir=self.scenario_dir))
        try:
            traj_mod.write_run(tmp, job.trajectory, manifest,
                               job.result.diagnostics)
            (tmp / "name.txt").write_text(name)
            tmp.rename(target)
        except Exception:
            shutil.rmtree(tmp, ignore_errors=True)
            raise

    def list_scenarios(self) -> list[dict[str, Any]]:
        out = []
        for path in sorted(self.scenario_dir.iterdir()):
            if not (path / "manifest.json").exists():
                continue
            manifest, _ = traj_mod.load_run(path)
            out.append({"name": (path / "name.txt").read_text()
                        if (path / "name.txt").exists() else path.name,
                        "run_id": manifest.run_id, "mode": manifest.mode,
                        "summary": manifest.summary})
        return out

    def scenario_dirs(self, names: list[str]) -> list[Path]:
        dirs = []
        for name in names:
            path = self.scenario_path(name)
            if not (path / "manifest.json").exists():
                raise HTTPException(404, f"unknown scenario {name!r}")
            dirs.append(path)
        return dirs


def _default_workers() -> int:
    import os

    return os.cpu_count() or 2


def trajectory_document(traj: traj_mod.Trajectory) -> dict[str, Any]:
    return {
        "mode": traj.mode,
        "tau_plan": traj.tau_plan,
        "value": traj.value,
        "converged": traj.converged,
        "columns": traj_mod.CSV_COLUMNS,
        "scenarios": [{
            "scenario_id": sc.scenario_id,
            "prob": sc.prob,
            "zeta": sc.zeta,
            "series": {k: [float(x) for x in v] for k, v in sc.series.items()},
            "info_states": [int(x) for x in sc.info_states],
        } for sc in traj.scenarios],
    }


def create_app(data_dir: Optional[Path] = None,
               workers: Optional[int] = None) -> FastAPI:
    session = Session(data_dir or Path(tempfile.mkdtemp(prefix="gate-")),
                      workers)
    app = FastAPI(title="gate-service")
    app.state.session = session

    @app.get("/api/v1/schema")
    def schema() -> dict:
        return params_mod.schema_document()

    @app.post("/api/v1/solve", status_code=202)
    def submit(body: dict) -> JSONResponse:
        doc = body.get("config", {})
        mode = body.get("mode", "deterministic")
        mode = {"det": "deterministic", "ext": "externality",
                "unc": "uncertainty"}.get(mode, mode)
        if mode not in MODES:
            raise HTTPException(422, f"mode must be one of {MODES}")
        settings = SolverSettings()
        for key, value in body.get("solver", {}).items():
            if not hasattr(settings, key):
                raise HTTPException(422, f"unknown solver setting {key!r}")
            setattr(settings, key, type(getattr(settings, key))(value))
        job, violations = session.submit(doc, mode, settings)
        if job is None:
            return JSONResponse(status_code=422, content={
                "violations": [{"field": v.field, "message": v.message}
                               for v in violations]})
        return JSONResponse(status_code=202, content={
            "job_id": job.id, "warnings": job.warnings})

    @app.get("/api/v1/jobs/{job_id}")
    def job_status(job_id: str) -> dict:
        return session.get(job_id).snapshot()

    @app.get("/api/v1/jobs/{job_id}/trajectory")
    def job_trajectory(job_id: str) -> dict:
        job = session.get(job_id)
        if job.status != "done":
            raise HTTPException(409, f"job {job_id} is {job.status}, not done")
        return trajectory_document(job.trajectory)

    @app.get("/api/v1/jobs/{job_id}/progress")
    def job_progress(job_id: str) -> StreamingResponse:
        job = session.get(job_id)

        def stream():
            q: queue.SimpleQueue = queue.SimpleQueue()
            with job.lock:
                backlog = list(job.progress_log)
                live = job.status in ("queued", "running")
                if live:
                    job.subscribers.append(q)
            for doc in backlog:
                yield json.dumps(doc) + "\n"
            while live:
                doc = q.get()
                if doc is PROGRESS_DONE or doc.get("event") == "done":
                    break
                yield json.dumps(doc) + "\n"

        return StreamingResponse(stream(), media_type="application/x-ndjson")

    @app.post("/api/v1/scenarios", status_code=201)
    def save_scenario(body: dict) -> dict:
        name, job_id = body.get("name"), body.get("job_id")
        if not name or not job_id:
            raise HTTPException(422, "need 'name' and 'job_id'")
        job = session.get(job_id)
        if job.status != "done":
            raise HTTPException(409, f"job {job_id} is {job.status}, not done")
        session.save_scenario(name, job)
        return {"name": name, "job_id": job_id}

    @app.get("/api/v1/scenarios")
    def list_scenarios() -> list:
        return session.list_scenarios()

    @app.get("/api/v1/scenarios/{name}/trajectory")
    def scenario_trajectory(name: str) -> dict:
        path = session.scenario_dirs([name])[0]
        _, series = traj_mod.load_run(path)
        return {"name": name,
                "scenarios": [{"scenario_id": sid,
                               "series": {k: list(map(float, v))
                                          for k, v in s.items()}}
                              for sid, s in series.items()]}

    @app.get("/api/v1/compare")
    def compare(names: str) -> dict:
        wanted = [n for n in names.split(",") if n]
        if len(wanted) < 2:
            raise HTTPException(422, "need at least two scenario names")
        dirs = session.scenario_dirs(wanted)
        frame = traj_mod.compare_runs(dirs, labels=wanted)
        return {"names": wanted,
                "truncated": bool(frame.attrs.get("truncated", False)),
                "columns": list(frame.columns),
                "rows": [list(map(float, row)) for row in frame.to_numpy()]}

    return app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gate-service")
    parser.add_argument("--bind", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8731)
    parser.add_argument("--data-dir", default=None)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(Path(args.data_dir) if args.data_dir else None,
                     args.workers)
    uvicorn.run(app, host=args.bind, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
