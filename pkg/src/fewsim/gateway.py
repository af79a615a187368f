"""REST gateway over the middleware, consumed by the web UI and scripts.

All responses use one envelope: ``{"status": "ok", "payload": ...}`` or
``{"status": "error", "error": {"code", "message"}}``. Simulation never
runs inside a request handler; POST /api/cases returns 202 with a polling
URL.
"""

from __future__ import annotations

import math
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse

from . import indices as ix
from . import middleware as mw
from .branches import BranchError
from .dataset import StudyAreaDataset


def _ok(payload, status_code: int = 200) -> JSONResponse:
    return JSONResponse({"status": "ok", "payload": payload}, status_code=status_code)


def _err(code: str, message: str, status_code: int) -> JSONResponse:
    return JSONResponse({"status": "error", "error": {"code": code, "message": message}},
                        status_code=status_code)


def _clean(obj):
    """NaN is not valid JSON; flagged values travel as null."""
    if isinstance(obj, float) and math.isnan(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_clean(v) for v in obj]
    return obj


def create_app(dataset: StudyAreaDataset, manager: mw.JobManager,
               static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="fewsim gateway")
    store = manager.store

    @app.exception_handler(mw.UnknownCaseError)
    async def _unknown(request: Request, exc: mw.UnknownCaseError):
        return _err("not_found", str(exc), 404)

    @app.exception_handler(BranchError)
    async def _branch(request: Request, exc: BranchError):
        return _err("not_found", str(exc), 404)

    @app.exception_handler(mw.DuplicateCaseError)
    async def _dup(request: Request, exc: mw.DuplicateCaseError):
        return _err("duplicate_case", str(exc), 409)

    @app.exception_handler(mw.CaseBusyError)
    async def _busy(request: Request, exc: mw.CaseBusyError):
        return _err("case_busy", str(exc), 409)

    @app.exception_handler(mw.MiddlewareError)
    async def _bad(request: Request, exc: mw.MiddlewareError):
        return _err("invalid_request", str(exc), 400)

    @app.get("/api/branches")
    def branches():
        return _ok(dataset.tree.to_dict())

    @app.get("/api/climate-files")
    def climate_files():
        return _ok(sorted(dataset.climate_files))

    @app.post("/api/cases", status_code=202)
    def create_case(body: dict):
        config = mw.CaseConfig.from_dict(body)
        record = manager.submit_case(config)
        return _ok({"job": record.to_dict(),
                    "poll": f"/api/cases/{config.case_name}/status"}, 202)

    @app.get("/api/cases")
    def list_cases():
        out = []
        for name in store.list_cases():
            man = store.read_manifest(name)
            out.append({"case_name": name, "job": man["job"],
                        "config": man["config"]})
        return _ok(out)

    @app.get("/api/cases/{name}")
    def get_case(name: str):
        man = store.read_manifest(name)
        done = [s for s in man["scenarios"] if store.has_result(name, s)]
        return _ok({**man, "completed_scenarios": done})

    @app.put("/api/cases/{name}")
    def edit_case(name: str, body: dict):
        adjustments = [mw.VariableAdjustment(**a) for a in body.get("adjustments", [])]
        record = manager.edit_case(name, adjustments, body.get("climate_file"))
        return _ok({"job": record.to_dict(),
                    "poll": f"/api/cases/{name}/status"})

    @app.delete("/api/cases/{name}")
    def delete_case(name: str):
        manager.delete_case(name)
        return _ok({"deleted": name})

    @app.get("/api/cases/{name}/status")
    def case_status(name: str):
        return _ok(manager.job_record(name).to_dict())

    def _find(scenario: str):
        return store.find_result(scenario)

    @app.get("/api/scenarios/{name}/timeseries")
    def timeseries(name: str, branch: str, from_year: int | None = None,
                   to_year: int | None = None, resource: str | None = None,
                   resolution: str = "annual"):
        dataset.tree.resolve(branch)
        result = _find(name)
        return _ok(mw.query_timeseries(result, branch, from_year, to_year,
                                       resolution, resource))

    @app.get("/api/scenarios/{name}/composition")
    def composition(name: str, branch: str, year: int):
        dataset.tree.resolve(branch)
        result = _find(name)
        return _ok(mw.query_composition(result, branch, year, dataset))

    @app.get("/api/compare")
    def compare(base: str, scenarios: str, branch: str, year: int):
        """Connected-dot payload: per-node percent difference vs base."""
        base_result = _find(base)
        names = [s for s in scenarios.split(",") if s]
        node = dataset.tree.resolve(branch)
        nodes = [node] if not isinstance(node, list) else node
        children = dataset.tree.children_of(branch)
        rows = []
        for n in (nodes + children):
            if n.id not in base_result.series:
                continue
            b = _annual_value(base_result, n.id, year)
            row = {"branch": n.id, "label": n.label, "base_value": b, "scenarios": []}
            for sname in names:
                v = _annual_value(_find(sname), n.id, year)
                pct = None if b == 0 else (v - b) / abs(b) * 100.0
                row["scenarios"].append({"name": sname, "value": v, "pct_diff": pct})
            rows.append(row)
        return _ok({"base": base, "branch": branch, "year": year, "rows": rows})

    @app.get("/api/compare/timeline")
    def compare_timeline(base: str, scenarios: str, branch: str):
        dataset.tree.resolve(branch)
        base_result = _find(base)
        bq = mw.query_timeseries(base_result, branch)
        series = []
        for sname in [s for s in scenarios.split(",") if s]:
            q = mw.query_timeseries(_find(sname), branch)
            diffs = [None if b == 0 else (v - b) / abs(b) * 100.0
                     for v, b in zip(q["values"], bq["values"])]
            series.append({"name": sname, "years": q["years"],
                           "values": q["values"], "pct_diff": diffs})
        return _ok({"base": base, "branch": branch, "unit": bq["unit"],
                    "base_series": {"years": bq["years"], "values": bq["values"]},
                    "series": series})

    @app.get("/api/indices")
    def indices_endpoint(scenarios: str, year: int,
                         mode: str | None = Query(None, alias="as")):
        out = []
        for sname in [s for s in scenarios.split(",") if s]:
            result = _find(sname)
            vec = ix.compute_indices(result, dataset, year)
            entry = {"scenario": sname, "year": year,
                     "values": _clean(vec.values()),
                     "flagged": vec.flagged()}
            if mode == "deltas":
                base_result = _find(f"{result.climate}_base")
                base_vec = ix.compute_indices(base_result, dataset, year)
                entry["deltas"] = _clean(ix.index_deltas(vec, base_vec))
            out.append(entry)
        return _ok(out)

    if static_dir is not None and Path(static_dir).exists():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def _annual_value(result, branch: str, year: int) -> float:
    q = mw.query_timeseries(result, branch, from_year=year, to_year=year)
    if not q["values"]:
        raise mw.MiddlewareError(f"year {year} outside results for {branch!r}")
    return float(q["values"][0])
