"""HTTP facade over the engine: project storage, run execution, retrieval.

JSON over HTTP, in-memory store with per-project write serialization.  Runs
bind to an immutable revision snapshot; identical (revision, sampling config)
requests are served from a cache so repeat reports are byte-identical.  Runs
above the synchronous threshold are accepted with 202 and polled.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from .io import ParseError, parse_problem
from .model import Problem, ValidationError
from .smaa import IncompatibleElicitation, SamplingConfig, run_smaa

SYNC_SAMPLE_LIMIT = 100_000


class RunRequest(BaseModel):
    samples: int = Field(default=10_000, ge=1)
    seed: int = 0


@dataclass
class Project:
    id: str
    problem: Problem
    document: dict[str, Any]
    revision: int = 1
    lock: threading.Lock = field(default_factory=threading.Lock)


@dataclass
class RunRecord:
    id: str
    project_id: str
    revision: int
    samples: int
    seed: int
    status: str = "pending"           # pending | done | failed
    report_text: Optional[str] = None
    error: Optional[str] = None


class Store:
    def __init__(self) -> None:
        self.projects: dict[str, Project] = {}
        self.runs: dict[str, RunRecord] = {}
        self.report_cache: dict[tuple[str, int, int, int], str] = {}
        self.lock = threading.Lock()


def _error(status: int, code: str, message: str, path: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "path": path},
    )


def create_app(store: Optional[Store] = None) -> FastAPI:
    app = FastAPI(title="outrank", version="1")
    st = store or Store()
    app.state.store = st

    @app.exception_handler(ValidationError)
    async def _validation_handler(request: Request, exc: ValidationError):
        return _error(422, "invalid-problem", "; ".join(exc.errors), str(request.url.path))

    @app.exception_handler(ParseError)
    async def _parse_handler(request: Request, exc: ParseError):
        return _error(400, "bad-document", str(exc), str(request.url.path))

    @app.post("/api/projects")
    async def create_project(request: Request):
        raw = await _json_body(request)
        problem = parse_problem(_with_fractions(raw))
        project = Project(id=uuid.uuid4().hex[:12], problem=problem, document=raw)
        with st.lock:
            st.projects[project.id] = project
        return {"id": project.id, "revision": project.revision}

    @app.get("/api/projects/{project_id}")
    async def get_project(project_id: str):
        project = st.projects.get(project_id)
        if project is None:
            return _error(404, "not-found", f"no project {project_id}", f"/api/projects/{project_id}")
        return {
            "id": project.id,
            "revision": project.revision,
            "document": project.document,
        }

    @app.put("/api/projects/{project_id}/elicitation")
    async def put_elicitation(project_id: str, request: Request):
        project = st.projects.get(project_id)
        if project is None:
            return _error(404, "not-found", f"no project {project_id}",
                          f"/api/projects/{project_id}/elicitation")
        patch = await _json_body(request)
        allowed = {"decks", "thresholds", "interactions"}
        unknown = set(patch) - allowed
        if unknown:
            return _error(400, "bad-request", f"unknown elicitation sections: {sorted(unknown)}",
                          f"/api/projects/{project_id}/elicitation")
        with project.lock:
            document = dict(project.document)
            document.update({k: patch[k] for k in allowed if k in patch})
            problem = parse_problem(_with_fractions(document))
            project.document = document
            project.problem = problem
            project.revision += 1
            return {"id": project.id, "revision": project.revision}

    @app.post("/api/projects/{project_id}/runs")
    async def create_run(project_id: str, body: RunRequest):
        project = st.projects.get(project_id)
        if project is None:
            return _error(404, "not-found", f"no project {project_id}",
                          f"/api/projects/{project_id}/runs")
        with project.lock:
            revision = project.revision
            problem = project.problem
        record = RunRecord(
            id=uuid.uuid4().hex[:12],
            project_id=project_id,
            revision=revision,
            samples=body.samples,
            seed=body.seed,
        )
        with st.lock:
            st.runs[record.id] = record
        if body.samples > SYNC_SAMPLE_LIMIT:
            thread = threading.Thread(
                target=_execute_run, args=(st, record, problem), daemon=True
            )
            thread.start()
            return JSONResponse(status_code=202, content={"runId": record.id, "status": "pending"})
        _execute_run(st, record, problem)
        if record.status == "failed":
            return _error(422, "incompatible-elicitation", record.error or "run failed",
                          f"/api/projects/{project_id}/runs")
        return {"runId": record.id, "status": record.status}

    @app.get("/api/runs/{run_id}")
    async def get_run(run_id: str):
        record = st.runs.get(run_id)
        if record is None:
            return _error(404, "not-found", f"no run {run_id}", f"/api/runs/{run_id}")
        if record.status != "done":
            code = 200 if record.status == "pending" else 422
            return JSONResponse(status_code=code, content={
                "runId": record.id, "status": record.status, "error": record.error,
            })
        return Response(content=record.report_text, media_type="application/json")

    @app.get("/api/runs/{run_id}/nodes/{node_id}")
    async def get_run_node(run_id: str, node_id: str):
        record = st.runs.get(run_id)
        if record is None:
            return _error(404, "not-found", f"no run {run_id}", f"/api/runs/{run_id}/nodes/{node_id}")
        if record.status != "done":
            return _error(409, "not-ready", f"run is {record.status}",
                          f"/api/runs/{run_id}/nodes/{node_id}")
        doc = json.loads(record.report_text or "{}")
        node = doc.get("nodes", {}).get(node_id)
        if node is None:
            return _error(404, "not-found", f"no node {node_id} in run {run_id}",
                          f"/api/runs/{run_id}/nodes/{node_id}")
        return {
            "runId": record.id,
            "node": node_id,
            "sampleCount": doc["sampleCount"],
            "masterSeed": doc["masterSeed"],
            **node,
        }

    return app


async def _json_body(request: Request) -> dict[str, Any]:
    try:
        return json.loads(await request.body())
    except json.JSONDecodeError as exc:
        raise ParseError(f"body: {exc.msg}") from exc


def _with_fractions(raw: dict[str, Any]) -> dict[str, Any]:
    """Re-parse a JSON object tree so numeric leaves become exact rationals."""
    from fractions import Fraction

    return json.loads(json.dumps(raw), parse_float=Fraction, parse_int=int)


def _execute_run(st: Store, record: RunRecord, problem: Problem) -> None:
    key = (record.project_id, record.revision, record.samples, record.seed)
    with st.lock:
        cached = st.report_cache.get(key)
    if cached is not None:
        record.report_text = cached
        record.status = "done"
        return
    try:
        config = SamplingConfig(sample_count=record.samples, master_seed=record.seed)
        report = run_smaa(problem, config)
        from .io import write_report

        text = write_report(report, problem, format="json")
    except IncompatibleElicitation as exc:
        record.status = "failed"
        record.error = str(exc)
        return
    except Exception as exc:  # surfaced as a failed run, not a 500
        record.status = "failed"
        record.error = f"{type(exc).__name__}: {exc}"
        return
    with st.lock:
        st.report_cache[key] = text
    record.report_text = text
    record.status = "done"
