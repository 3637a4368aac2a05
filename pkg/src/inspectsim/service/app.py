"""FastAPI application wrapping the simulator.

Submissions validate the scenario up front (invalid work is never queued),
then execute on a bounded worker pool in submission order.  Results are the
same files the CLI emits, served from the run's directory.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import FileResponse

from inspectsim import experiment
from inspectsim.domain import ScenarioError, scenario_from_dict, validate_scenario
from inspectsim.service import schemas
from inspectsim.service.store import RunStore, UnknownRunError

DEFAULT_DATA_DIR = "inspectsim_data"
DEFAULT_WORKERS = 2


def _execute(store: RunStore, run_id: str) -> None:
    record = store.get(run_id)
    store.mark_running(run_id)
    try:
        scenario = validate_scenario(scenario_from_dict(record.scenario))
        results = experiment.run_study(
            scenario,
            record.study,
            out_dir=store.run_dir(run_id),
            sweep_sizes=record.sweep_sizes,
        )
        store.mark_done(run_id, results)
    except Exception as exc:  # surfaced via the record, not the worker
        store.mark_failed(run_id, f"{type(exc).__name__}: {exc}")


def create_app(data_dir: str | Path | None = None, workers: int | None = None) -> FastAPI:
    data_dir = Path(data_dir or os.environ.get("INSPECTSIM_DATA_DIR", DEFAULT_DATA_DIR))
    workers = workers or int(os.environ.get("INSPECTSIM_WORKERS", DEFAULT_WORKERS))
    store = RunStore(data_dir)
    executor = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="inspectsim-run")

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        executor.shutdown(wait=True)

    app = FastAPI(title="inspectsim run service", lifespan=lifespan)
    app.state.store = store

    @app.post("/api/runs", response_model=schemas.SubmitRunResponse)
    def submit_run(request: schemas.SubmitRunRequest) -> schemas.SubmitRunResponse:
        try:
            scenario = scenario_from_dict(request.scenario)
            validate_scenario(scenario)
            if request.study == "sweep" and request.sweep_sizes:
                for n in request.sweep_sizes:
                    if n < 1 or n >= len(scenario.persons):
                        raise ScenarioError(
                            "sweep_sizes", str(n), "team size out of range for the staff"
                        )
        except ScenarioError as exc:
            raise HTTPException(
                status_code=422,
                detail=[{"field": f"{exc.entity}.{exc.field}".strip("."), "message": exc.message}],
            ) from exc
        record = store.create(
            scenario=request.scenario,
            study=request.study,
            label=request.label,
            sweep_sizes=request.sweep_sizes,
        )
        executor.submit(_execute, store, record.id)
        return schemas.SubmitRunResponse(id=record.id)

    @app.get("/api/runs", response_model=list[schemas.RunSummary])
    def list_runs(state: Optional[str] = None, study: Optional[str] = None):
        return [r.to_dict() for r in store.list(state=state, study=study)]

    @app.get("/api/runs/{run_id}", response_model=schemas.RunRecordModel)
    def get_run(run_id: str):
        try:
            return store.get(run_id).to_dict()
        except UnknownRunError:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")

    @app.get("/api/runs/{run_id}/results.csv")
    def get_results_csv(run_id: str):
        try:
            record = store.get(run_id)
        except UnknownRunError:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
        if record.state != "done":
            raise HTTPException(status_code=409, detail=f"run is {record.state}, not done")
        path = store.run_dir(run_id) / "results.csv"
        if not path.exists():
            raise HTTPException(status_code=404, detail="results file missing")
        return FileResponse(path, media_type="text/csv")

    @app.get("/api/presets", response_model=list[schemas.PresetModel])
    def list_presets():
        from inspectsim.domain import scenario_to_dict

        return [
            schemas.PresetModel(
                name=p.name,
                description=p.description,
                study=p.study,
                scenario=scenario_to_dict(p.scenario()),
            )
            for p in experiment.PRESETS.values()
        ]

    return app
