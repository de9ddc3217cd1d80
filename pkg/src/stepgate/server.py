"""Read-only HTTP API over a run store, plus the dashboard's static assets.

Every mutation path is closed: any non-GET request is answered 405 by
middleware before routing, and handlers only ever read files that the
CLI writes atomically, so responses are always complete snapshots.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .core import Project
from .errors import StepgateError, UnknownMetric
from .metrics import compare_runs
from .project import SCHEMA_VERSION
from .views import step_views

STATIC_DIR = Path(__file__).parent / "dashboard_static"

_PLACEHOLDER = """<!doctype html>
<html><head><title>stepgate dashboard</title></head>
<body><h1>stepgate dashboard</h1>
<p>Frontend assets are not built. The JSON API is live under <code>/api/</code>.</p>
</body></html>
"""


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"schema_version": SCHEMA_VERSION, "error": message})


def create_app(store_root: str | Path) -> FastAPI:
    store_root = Path(store_root)
    app = FastAPI(title="stepgate dashboard", docs_url=None, redoc_url=None, openapi_url=None)

    @app.middleware("http")
    async def read_only_guard(request: Request, call_next):
        if request.method != "GET":
            return _error(405, f"read-only API: {request.method} is not allowed")
        try:
            return await call_next(request)
        except UnknownMetric as exc:
            return _error(404, str(exc))
        except StepgateError as exc:
            return _error(500, str(exc))

    @app.exception_handler(StarletteHTTPException)
    async def http_error(request: Request, exc: StarletteHTTPException):
        return _error(exc.status_code, str(exc.detail))

    def load() -> Project:
        return Project.load(store_root)

    @app.get("/api/project")
    def api_project():
        project = load()
        return {
            "schema_version": SCHEMA_VERSION,
            "name": project.manifest.name,
            "step_order": project.manifest.step_names(),
            "metric_registry": [m.to_json_dict() for m in project.registry.defs()],
        }

    @app.get("/api/steps")
    def api_steps():
        project = load()
        return {
            "schema_version": SCHEMA_VERSION,
            "steps": [v.to_json_dict() for v in step_views(project)],
        }

    @app.get("/api/steps/{name}/runs")
    def api_step_runs(name: str):
        project = load()
        if name not in project.manifest.step_names():
            return _error(404, f"unknown step {name!r}")
        runs = project.store.runs_for_step(name)
        runs.reverse()  # newest first
        return {
            "schema_version": SCHEMA_VERSION,
            "step": name,
            "runs": [r.to_json_dict() for r in runs],
        }

    @app.get("/api/runs/{run_id}")
    def api_run(run_id: str):
        project = load()
        record = project.store.find_run(run_id)
        if record is None:
            return _error(404, f"unknown run {run_id!r}")
        return {"schema_version": SCHEMA_VERSION, "run": record.to_json_dict()}

    @app.get("/api/compare")
    def api_compare(metric: str = "", runs: str = ""):
        project = load()
        if not metric:
            return _error(404, "missing ?metric= query parameter")
        run_ids = [r for r in runs.split(",") if r]
        records = []
        for run_id in run_ids:
            record = project.store.find_run(run_id)
            if record is None:
                return _error(404, f"unknown run {run_id!r}")
            records.append(record)
        _, definition = project.registry.parse_key(metric)  # raises UnknownMetric -> 404
        pairs = compare_runs(records, metric, project.registry)
        return {
            "schema_version": SCHEMA_VERSION,
            "metric": metric,
            "direction": definition.direction.value,
            "pairs": [[run_id, value] for run_id, value in pairs],
        }

    @app.get("/")
    def index():
        index_file = STATIC_DIR / "index.html"
        if index_file.is_file():
            return FileResponse(index_file)
        return HTMLResponse(_PLACEHOLDER)

    assets_dir = STATIC_DIR / "assets"
    if assets_dir.is_dir():
        app.mount("/assets", StaticFiles(directory=assets_dir), name="assets")

    return app


def serve(store_root: str | Path, port: int = 7777, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(create_app(store_root), host=host, port=port, log_level="warning")
