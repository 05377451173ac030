"""HTTP facade over the pipeline for the browser UI and scripted clients.

Stateless computation behind an in-memory session store. Errors travel as a
JSON envelope {code, message, path}; no stack traces cross the wire.
"""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__, bbn
from .errors import (InferenceError, ModelParseError, ModelValidationError,
                     NetworkError, PipelineError, ThemisError)
from .model import model_fingerprint, model_from_json, model_to_json, validate_model
from .pipeline import (PipelineConfig, compute_intervention_index, run_pipeline,
                       run_to_json, what_if)

SAMPLE_CAP = 10000


class SessionState:
    """Loaded models and runs; single-writer, multi-reader."""

    def __init__(self):
        self._lock = threading.Lock()
        self._models = {}
        self._runs = {}

    def put_model(self, model) -> str:
        model_id = model_fingerprint(model)[:16]
        with self._lock:
            self._models[model_id] = model
        return model_id

    def get_model(self, model_id: str):
        with self._lock:
            return self._models.get(model_id)

    def list_models(self) -> list:
        with self._lock:
            items = list(self._models.items())
        return [{"model_id": mid,
                 "region_name": m.region_name,
                 "parameters": len(m.parameters),
                 "actors": len(m.actors),
                 "horizon_years": m.horizon_years}
                for mid, m in items]

    def put_run(self, run) -> None:
        with self._lock:
            self._runs[run.run_id] = run

    def get_run(self, run_id: str):
        with self._lock:
            return self._runs.get(run_id)

    def list_runs(self) -> list:
        with self._lock:
            runs = list(self._runs.values())
        return [{"run_id": r.run_id, "parent_run_id": r.parent_run_id,
                 "theory": r.theory, "seed": r.config.seed}
                for r in runs]


def _final_network(run):
    """Mapped scenario network for the last horizon year, if still in memory."""
    nets = (run.internals or {}).get("year_networks") or {}
    if not nets:
        return None
    return nets[max(nets)]


def _error(status: int, code: str, message: str, path: str = "") -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": code, "message": message, "path": path})


def create_app(state: Optional[SessionState] = None) -> FastAPI:
    app = FastAPI(title="themis", version=__version__)
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    store = state if state is not None else SessionState()
    app.state.store = store

    @app.exception_handler(ThemisError)
    async def _themis_error(request: Request, exc: ThemisError):
        path = str(request.url.path)
        if isinstance(exc, (ModelValidationError, ModelParseError, NetworkError)):
            return _error(422, "model_invalid", str(exc), path)
        if isinstance(exc, PipelineError):
            return _error(422, "pipeline_error", str(exc), path)
        if isinstance(exc, InferenceError):
            return _error(422, "inference_error", str(exc), path)
        return _error(400, "bad_request", str(exc), path)

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/api/models")
    def list_models():
        return {"models": store.list_models()}

    @app.post("/api/models", status_code=201)
    def post_model(doc: dict):
        model = model_from_json(doc)
        validate_model(model)
        model_id = store.put_model(model)
        return {"model_id": model_id, "region_name": model.region_name}

    @app.get("/api/models/{model_id}")
    def get_model(model_id: str, request: Request):
        model = store.get_model(model_id)
        if model is None:
            return _error(404, "not_found", f"unknown model {model_id!r}",
                          str(request.url.path))
        return {"model_id": model_id, "model": model_to_json(model)}

    @app.get("/api/runs")
    def list_runs():
        return {"runs": store.list_runs()}

    @app.post("/api/runs")
    def post_run(body: dict, request: Request):
        model_id = body.get("model_id")
        model = store.get_model(model_id) if model_id else None
        if model is None:
            return _error(404, "not_found", f"unknown model {model_id!r}",
                          str(request.url.path))
        config = PipelineConfig.from_json(body.get("config") or {})
        if config.samples > SAMPLE_CAP:
            return _error(422, "config_error",
                          f"samples capped at {SAMPLE_CAP} over HTTP; "
                          "use the CLI for larger jobs",
                          str(request.url.path))
        run = run_pipeline(model, config)
        store.put_run(run)
        return run_to_json(run, include_timestamps=True)

    @app.post("/api/runs/{run_id}/whatif")
    def post_whatif(run_id: str, body: dict, request: Request):
        parent = store.get_run(run_id)
        if parent is None:
            return _error(404, "not_found", f"unknown run {run_id!r}",
                          str(request.url.path))
        edits = body.get("edits")
        if not isinstance(edits, list):
            return _error(422, "bad_edit", "body must carry an edits list",
                          str(request.url.path))
        child = what_if(parent, edits)
        store.put_run(child)
        return run_to_json(child, include_timestamps=True)

    @app.get("/api/runs/{run_id}")
    def get_run(run_id: str, request: Request):
        run = store.get_run(run_id)
        if run is None:
            return _error(404, "not_found", f"unknown run {run_id!r}",
                          str(request.url.path))
        return run_to_json(run, include_timestamps=True)

    @app.get("/api/runs/{run_id}/report")
    def get_report(run_id: str, request: Request,
                   tripwire: Optional[float] = None):
        run = store.get_run(run_id)
        if run is None:
            return _error(404, "not_found", f"unknown run {run_id!r}",
                          str(request.url.path))
        if tripwire is not None and not 0.0 <= tripwire <= 1.0:
            return _error(422, "config_error", "tripwire must be in [0, 1]",
                          str(request.url.path))
        report = compute_intervention_index(run, tripwire)
        return {"run_id": report.run_id,
                "years": list(report.years),
                "index_series": list(report.index_series),
                "tripwire_threshold": report.tripwire_threshold,
                "tripwire_years": list(report.tripwire_years),
                "top_drivers": {str(y): [[r, d] for r, d in drivers]
                                for y, drivers in report.top_drivers.items()}}

    @app.get("/api/runs/{run_id}/sensitivity/{root}")
    def get_sensitivity(run_id: str, root: str, request: Request):
        run = store.get_run(run_id)
        if run is None:
            return _error(404, "not_found", f"unknown run {run_id!r}",
                          str(request.url.path))
        net = _final_network(run)
        if net is None:
            return _error(422, "pipeline_error",
                          "run record lacks in-memory network state",
                          str(request.url.path))
        if root not in {n.id for n in net.roots()}:
            return _error(404, "not_found", f"unknown root node {root!r}",
                          str(request.url.path))
        pairs = bbn.sensitivity(net, root, (-0.2, -0.1, 0.0, 0.1, 0.2))
        return {"run_id": run_id, "root": root,
                "sweep": [[d, p] for d, p in pairs]}

    @app.get("/api/runs/{run_id}/network")
    def get_network(run_id: str, request: Request):
        run = store.get_run(run_id)
        if run is None:
            return _error(404, "not_found", f"unknown run {run_id!r}",
                          str(request.url.path))
        net = _final_network(run)
        if net is None:
            return _error(422, "pipeline_error",
                          "run record lacks in-memory network state",
                          str(request.url.path))
        marginals = {node.id: bbn.infer(net, node.id).p("true")
                     for node in net.nodes}
        return {"run_id": run_id, "network": net.to_json(),
                "marginals": marginals}

    return app
