"""HTTP service exposing the engine; all computation delegates to the core modules.

Wire errors use a fixed shape: {"code": ..., "message": ..., "details": ...}
with code in VALIDATION / NOT_FOUND / CONFLICT / CONVERGENCE / INTERNAL,
mapped to 400 / 404 / 409 / 422 / 500.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from munidss import assessment, planning
from munidss.domain import ImpactEstimate, Project
from munidss.errors import EngineError, ValidationError
from munidss.influence import build_matrix, total_influence_closed, total_influence_series
from munidss.storage import ProjectStore, payload_to_project, project_to_payload

_STATUS = {
    "VALIDATION": 400,
    "NOT_FOUND": 404,
    "CONFLICT": 409,
    "CONVERGENCE": 422,
    "INTERNAL": 500,
}


def _error_body(code: str, message: str, details: Any = None) -> dict:
    body: dict[str, Any] = {"code": code, "message": message}
    if details is not None:
        body["details"] = details
    return body


def _influence_for(project: Project, method: str, k: int | None):
    matrix = build_matrix(project)
    if method == "series":
        return total_influence_series(matrix, k)
    if method == "closed":
        return total_influence_closed(matrix)
    raise ValidationError(f"unknown influence method {method!r}; use 'series' or 'closed'")


def rating_payload(r: assessment.Rating) -> dict:
    return {
        "target_id": r.target_id,
        "entries": [
            {
                "indicator_id": e.indicator_id,
                "rank": e.rank,
                "total_impact": e.total_impact,
                "direct_impact": e.direct_impact,
                "relevance": e.relevance,
                "criticality": e.criticality.token,
            }
            for e in r.entries
        ],
    }


def network_payload(network: planning.SemanticNetwork) -> dict:
    return {
        "schema_version": network.schema_version,
        "nodes": [
            {
                "id": n.id,
                "type": n.type.value,
                "label": n.label,
                "value": n.value,
                "ref": n.ref,
            }
            for n in network.nodes
        ],
        "edges": [
            {"type": e.type.value, "source": e.source, "sink": e.sink, "weight": e.weight}
            for e in network.edges
        ],
    }


def coverage_payload(report: planning.CoverageReport) -> dict:
    return {
        "missing": sorted(k.value for k in report.missing),
        "duplicates": sorted(k.value for k in report.duplicates),
        "complete": report.complete,
    }


def create_app(data_dir, ui_dir=None) -> FastAPI:
    store = ProjectStore(data_dir)
    app = FastAPI(title="munidss", openapi_url=None)
    # the workbench bundle may be served from any static host
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(EngineError)
    async def engine_error(request: Request, exc: EngineError):
        details = None
        if isinstance(exc, ValidationError) and exc.violations:
            details = [
                {"code": v.code, "message": v.message, "where": v.where} for v in exc.violations
            ]
        if getattr(exc, "rho_estimate", None) is not None:
            details = {"rho_estimate": exc.rho_estimate}
        return JSONResponse(
            status_code=_STATUS.get(exc.api_code, 500),
            content=_error_body(exc.api_code, str(exc), details),
        )

    @app.exception_handler(RequestValidationError)
    async def request_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_body("VALIDATION", "malformed request body"),
        )

    @app.get("/api/v1/projects/{project_id}")
    def get_project(project_id: str):
        return project_to_payload(store.get(project_id))

    @app.put("/api/v1/projects/{project_id}")
    def put_project(project_id: str, payload: dict = Body(...)):
        project = payload_to_project(payload)
        if project.id != project_id:
            raise ValidationError(
                f"payload id {project.id!r} does not match URL id {project_id!r}"
            )
        return project_to_payload(store.put(project))

    @app.post("/api/v1/projects/{project_id}/estimates")
    def post_estimates(project_id: str, payload: dict = Body(...)):
        if not isinstance(payload.get("revision"), int) or isinstance(payload.get("revision"), bool):
            raise ValidationError("body must carry the integer revision that was read")
        items = payload.get("estimates")
        if not isinstance(items, list):
            raise ValidationError("body must carry an 'estimates' array")
        for key in payload:
            if key not in {"revision", "estimates"}:
                raise ValidationError(f"unknown field {key!r} in estimate batch")
        batch = []
        for i, item in enumerate(items):
            if not isinstance(item, dict) or set(item) != {"expert_id", "source", "sink", "value"}:
                raise ValidationError(
                    f"estimates[{i}] must have exactly expert_id, source, sink, value"
                )
            value = item["value"]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"estimates[{i}].value must be a number")
            batch.append(
                ImpactEstimate(
                    expert_id=str(item["expert_id"]),
                    source=str(item["source"]),
                    sink=str(item["sink"]),
                    value=float(value),
                )
            )
        return project_to_payload(store.upsert_estimates(project_id, payload["revision"], batch))

    @app.get("/api/v1/projects/{project_id}/influence")
    def get_influence(project_id: str, method: str = "series", k: int | None = None):
        project = store.get(project_id)
        total = _influence_for(project, method, k)
        return {
            "node_order": list(total.node_order),
            "method": total.method,
            "k": total.k,
            "rho_estimate": total.rho_estimate,
            "entries": [[float(v) for v in row] for row in total.entries],
        }

    @app.get("/api/v1/projects/{project_id}/ratings/{target_id}")
    def get_rating(project_id: str, target_id: str):
        project = store.get(project_id)
        total = total_influence_series(build_matrix(project))
        return rating_payload(assessment.rating(project, total, target_id))

    @app.post("/api/v1/projects/{project_id}/whatif")
    def post_whatif(project_id: str, payload: dict = Body(...)):
        deltas = payload.get("deltas")
        if not isinstance(deltas, dict):
            raise ValidationError("body must carry a 'deltas' object of indicator shocks")
        for key in payload:
            if key != "deltas":
                raise ValidationError(f"unknown field {key!r} in what-if request")
        scenario = {}
        for node, delta in deltas.items():
            if isinstance(delta, bool) or not isinstance(delta, (int, float)):
                raise ValidationError(f"shock for {node!r} must be a number")
            scenario[node] = float(delta)
        project = store.get(project_id)
        total = total_influence_series(build_matrix(project))
        return {"deltas": assessment.what_if(project, total, scenario)}

    @app.get("/api/v1/projects/{project_id}/coverage")
    def get_coverage(project_id: str):
        store.get(project_id)  # 404 for unknown projects
        documents = store.portfolio_for(project_id)
        return coverage_payload(planning.portfolio_coverage(documents))

    @app.get("/api/v1/projects/{project_id}/network")
    def get_network(project_id: str):
        project = store.get(project_id)
        return network_payload(planning.build_semantic_network(project))

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
