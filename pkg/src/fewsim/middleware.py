"""Scenario middleware: grid expansion, naming, async execution, storage.

Cases live in a file-backed document store, one JSON document per
scenario result, under ``<data_dir>/cases/<case_name>/``. Submission is
asynchronous: it validates, persists the case manifest, queues the
scenario runs on a bounded worker pool and returns immediately; partial
results are queryable as each scenario finishes.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from . import coupling
from . import fmlm as fm
from .coupling import ScenarioResult, ScenarioSpec
from .dataset import StudyAreaDataset
from .series import MonthlySeries


class MiddlewareError(ValueError):
    pass


class DuplicateCaseError(MiddlewareError):
    pass


class UnknownCaseError(MiddlewareError):
    pass


class CaseBusyError(MiddlewareError):
    pass


@dataclass
class VariableAdjustment:
    key: str
    lower_pct: float
    upper_pct: float
    step_pct: float

    def validate(self) -> None:
        if self.step_pct <= 0:
            raise MiddlewareError(f"{self.key}: step must be > 0")
        if self.upper_pct < self.lower_pct:
            raise MiddlewareError(f"{self.key}: upper bound below lower bound")
        span = self.upper_pct - self.lower_pct
        steps = span / self.step_pct
        if abs(steps - round(steps)) > 1e-9:
            raise MiddlewareError(
                f"{self.key}: range {span} not divisible by step {self.step_pct}")
        if self.lower_pct <= 0 <= self.upper_pct:
            offset = -self.lower_pct / self.step_pct
            if abs(offset - round(offset)) > 1e-9:
                raise MiddlewareError(
                    f"{self.key}: value grid must contain 0 when the bounds straddle it")

    def values(self) -> list[float]:
        n = int(round((self.upper_pct - self.lower_pct) / self.step_pct)) + 1
        return [self.lower_pct + i * self.step_pct for i in range(n)]


@dataclass
class CaseConfig:
    case_name: str
    climate_file: str
    adjustments: list[VariableAdjustment] = field(default_factory=list)

    def validate(self, dataset: StudyAreaDataset | None = None) -> None:
        if not self.case_name:
            raise MiddlewareError("case name must be non-empty")
        if not self.climate_file:
            raise MiddlewareError("climate file must be non-empty")
        seen = set()
        for adj in self.adjustments:
            adj.validate()
            if adj.key in seen:
                raise MiddlewareError(f"duplicate adjustment for {adj.key!r}")
            seen.add(adj.key)
        if dataset is not None:
            if self.climate_file not in dataset.climate_files:
                raise MiddlewareError(f"unknown climate file {self.climate_file!r}")
            adjustable = dataset.tree.adjustable_variables()
            for adj in self.adjustments:
                if adj.key not in adjustable:
                    raise MiddlewareError(f"variable {adj.key!r} is not adjustable")

    def to_dict(self) -> dict:
        return {"case_name": self.case_name, "climate_file": self.climate_file,
                "adjustments": [asdict(a) for a in self.adjustments]}

    @classmethod
    def from_dict(cls, d: dict) -> "CaseConfig":
        return cls(d["case_name"], d["climate_file"],
                   [VariableAdjustment(**a) for a in d["adjustments"]])


def scenario_name(climate: str, deltas: list[float]) -> str:
    """Fig-6-style name: `<climate>_<d1><d2>...` with two-digit unsigned
    percents, '-' prefix on negatives; the all-zero scenario is `_base`."""
    if all(d == 0 for d in deltas):
        return f"{climate}_base"
    parts = []
    for d in deltas:
        v = int(round(abs(d)))
        parts.append(("-" if d < 0 else "") + f"{v:02d}")
    return f"{climate}_{''.join(parts)}"


def expand_scenario_grid(config: CaseConfig) -> list[ScenarioSpec]:
    """Cartesian product of the per-variable value grids, base included
    exactly once, in deterministic lexicographic order (base first)."""
    config.validate()
    keys = [a.key for a in config.adjustments]
    grids = [a.values() for a in config.adjustments]
    specs: list[ScenarioSpec] = []
    seen: set[str] = set()

    base = ScenarioSpec(scenario_name(config.climate_file, [0.0] * len(keys)),
                        config.climate_file, {k: 0.0 for k in keys})
    specs.append(base)
    seen.add(base.scenario_name)

    for combo in product(*grids) if grids else []:
        name = scenario_name(config.climate_file, list(combo))
        if name in seen:
            continue
        seen.add(name)
        specs.append(ScenarioSpec(name, config.climate_file,
                                  dict(zip(keys, [float(c) for c in combo]))))
    return specs


# ---------------------------------------------------------------------------
# persistence

def _atomic_write_json(path: Path, payload: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


class CaseStore:
    """File-backed document store keyed by case name; write-once scenario
    documents, atomic manifest updates. Safe under concurrent workers."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir)
        (self.root / "cases").mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()

    def case_dir(self, case_name: str) -> Path:
        return self.root / "cases" / case_name

    def exists(self, case_name: str) -> bool:
        return (self.case_dir(case_name) / "manifest.json").exists()

    def list_cases(self) -> list[str]:
        return sorted(p.name for p in (self.root / "cases").iterdir()
                      if (p / "manifest.json").exists())

    def write_manifest(self, case_name: str, manifest: dict) -> None:
        with self._lock:
            d = self.case_dir(case_name)
            d.mkdir(parents=True, exist_ok=True)
            (d / "scenarios").mkdir(exist_ok=True)
            _atomic_write_json(d / "manifest.json", manifest)

    def read_manifest(self, case_name: str) -> dict:
        path = self.case_dir(case_name) / "manifest.json"
        if not path.exists():
            raise UnknownCaseError(f"unknown case {case_name!r}")
        with open(path) as fh:
            return json.load(fh)

    def write_result(self, case_name: str, result: ScenarioResult) -> None:
        path = self.case_dir(case_name) / "scenarios" / f"{result.scenario_name}.json"
        _atomic_write_json(path, result.to_dict())

    def has_result(self, case_name: str, scenario: str) -> bool:
        return (self.case_dir(case_name) / "scenarios" / f"{scenario}.json").exists()

    def read_result(self, case_name: str, scenario: str) -> ScenarioResult:
        path = self.case_dir(case_name) / "scenarios" / f"{scenario}.json"
        if not path.exists():
            raise UnknownCaseError(
                f"no result for scenario {scenario!r} in case {case_name!r}")
        with open(path) as fh:
            return ScenarioResult.from_dict(json.load(fh))

    def find_result(self, scenario: str) -> ScenarioResult:
        """Locate a scenario result in any case."""
        for case in self.list_cases():
            if self.has_result(case, scenario):
                return self.read_result(case, scenario)
        raise UnknownCaseError(f"no result for scenario {scenario!r}")

    def delete_result(self, case_name: str, scenario: str) -> None:
        path = self.case_dir(case_name) / "scenarios" / f"{scenario}.json"
        if path.exists():
            path.unlink()

    def delete_case(self, case_name: str) -> None:
        import shutil
        d = self.case_dir(case_name)
        if not d.exists():
            raise UnknownCaseError(f"unknown case {case_name!r}")
        shutil.rmtree(d)


# ---------------------------------------------------------------------------
# jobs

JOB_STATUSES = ("queued", "in_progress", "finished", "failed")


@dataclass
class JobRecord:
    case_name: str
    status: str
    total: int
    completed: int
    failed_scenario: str | None = None
    error: str | None = None
    created_at: float = 0.0
    finished_at: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "JobRecord":
        return cls(**d)


class JobManager:
    """Runs scenario grids on a bounded worker pool with status tracking."""

    def __init__(self, dataset: StudyAreaDataset, store: CaseStore,
                 workers: int | None = None,
                 coefficients: fm.FmlmCoefficients | None = None):
        self.dataset = dataset
        self.store = store
        self.pool = ThreadPoolExecutor(max_workers=workers or os.cpu_count() or 4)
        self._lock = threading.RLock()
        self._futures: dict[str, list] = {}
        self.runs_executed = 0
        self._coefs = coefficients or fm.dataset_coefficients(dataset)

    # -- manifest helpers

    def _write(self, config: CaseConfig, job: JobRecord, scenarios: list[str]) -> None:
        self.store.write_manifest(config.case_name, {
            "config": config.to_dict(),
            "job": job.to_dict(),
            "scenarios": scenarios,
        })

    def job_record(self, case_name: str) -> JobRecord:
        return JobRecord.from_dict(self.store.read_manifest(case_name)["job"])

    def case_config(self, case_name: str) -> CaseConfig:
        return CaseConfig.from_dict(self.store.read_manifest(case_name)["config"])

    def scenario_names(self, case_name: str) -> list[str]:
        return list(self.store.read_manifest(case_name)["scenarios"])

    def _update_job(self, case_name: str, **changes) -> JobRecord:
        with self._lock:
            man = self.store.read_manifest(case_name)
            man["job"].update(changes)
            self.store.write_manifest(case_name, man)
            return JobRecord.from_dict(man["job"])

    # -- operations

    def submit_case(self, config: CaseConfig) -> JobRecord:
        config.validate(self.dataset)
        if self.store.exists(config.case_name):
            raise DuplicateCaseError(f"case {config.case_name!r} already exists")
        specs = expand_scenario_grid(config)
        job = JobRecord(config.case_name, "queued", len(specs), 0,
                        created_at=time.time())
        self._write(config, job, [s.scenario_name for s in specs])
        return self._enqueue(config.case_name, specs)

    def edit_case(self, case_name: str, adjustments: list[VariableAdjustment],
                  climate_file: str | None = None) -> JobRecord:
        job = self.job_record(case_name)
        if job.status == "in_progress":
            raise CaseBusyError(f"case {case_name!r} is in progress")
        old = self.case_config(case_name)
        config = CaseConfig(case_name, climate_file or old.climate_file,
                            list(adjustments))
        config.validate(self.dataset)
        specs = expand_scenario_grid(config)
        new_names = {s.scenario_name for s in specs}
        for stale in set(self.scenario_names(case_name)) - new_names:
            self.store.delete_result(case_name, stale)
        to_run = [s for s in specs
                  if not self.store.has_result(case_name, s.scenario_name)]
        done = len(specs) - len(to_run)
        job = JobRecord(case_name, "queued", len(specs), done,
                        created_at=time.time())
        self._write(config, job, [s.scenario_name for s in specs])
        if not to_run:
            return self._update_job(case_name, status="finished",
                                    finished_at=time.time())
        return self._enqueue(case_name, to_run)

    def delete_case(self, case_name: str) -> None:
        job = self.job_record(case_name)
        if job.status == "in_progress":
            raise CaseBusyError(f"case {case_name!r} is in progress")
        self.store.delete_case(case_name)

    def _enqueue(self, case_name: str, specs: list[ScenarioSpec]) -> JobRecord:
        record = self._update_job(case_name, status="in_progress")
        futures = [self.pool.submit(self._run_one, case_name, spec)
                   for spec in specs]
        with self._lock:
            self._futures[case_name] = futures
        return record

    def _run_one(self, case_name: str, spec: ScenarioSpec) -> None:
        try:
            result = coupling.run_scenario(self.dataset, spec, self._coefs)
            with self._lock:
                self.runs_executed += 1
            self.store.write_result(case_name, result)
            with self._lock:
                job = self.job_record(case_name)
                done = job.completed + 1
                changes = {"completed": done}
                if job.status != "failed" and done >= job.total:
                    changes["status"] = "finished"
                    changes["finished_at"] = time.time()
                self._update_job(case_name, **changes)
        except Exception as exc:  # result documents for other scenarios survive
            self._update_job(case_name, status="failed",
                             failed_scenario=spec.scenario_name,
                             error=str(exc), finished_at=time.time())

    def wait(self, case_name: str, timeout: float = 300.0) -> JobRecord:
        deadline = time.time() + timeout
        with self._lock:
            futures = list(self._futures.get(case_name, []))
        for f in futures:
            f.result(timeout=max(0.0, deadline - time.time()))
        return self.job_record(case_name)

    def shutdown(self) -> None:
        self.pool.shutdown(wait=True)


# ---------------------------------------------------------------------------
# aggregation and queries

def aggregate_annual(series: MonthlySeries, kind: str) -> tuple[list[int], np.ndarray]:
    """Monthly -> annual: flows sum over each year, everything else means."""
    if series.start_month != 1 or len(series) % 12 != 0:
        raise MiddlewareError("series does not span whole years")
    years = list(range(series.start_year, series.start_year + len(series) // 12))
    m = series.values.reshape(-1, 12)
    if kind == "flow":
        return years, m.sum(axis=1)
    if kind in ("stock", "intensity", "share"):
        return years, m.mean(axis=1)
    raise MiddlewareError(f"unknown series kind {kind!r}")


def _year_indices(result: ScenarioResult, year: int) -> list[int]:
    s = next(iter(result.series.values()))
    base = (year - s.start_year) * 12
    if base < 0 or base + 12 > len(s):
        raise MiddlewareError(f"year {year} outside results")
    return list(range(base, base + 12))


def query_timeseries(result: ScenarioResult, branch: str,
                     from_year: int | None = None, to_year: int | None = None,
                     resolution: str = "annual",
                     resource: str | None = None) -> dict:
    """Annual (default) or monthly series for one branch, optionally
    restricted to one supply resource for water branches."""
    if branch not in result.series:
        raise UnknownCaseError(f"no series for branch {branch!r}")
    series = result.series[branch]
    kind = result.series_kind[branch]

    if resource is not None and branch.startswith("water/demand"):
        if resource not in result.alloc_sources:
            raise MiddlewareError(f"unknown resource {resource!r}")
        si = result.alloc_sources.index(resource)
        cols = _branch_demand_columns(result, branch)
        values = result.delivered[:, si, cols].sum(axis=1)
        series = MonthlySeries(series.start_year, series.start_month, values,
                               series.unit)

    if resolution == "monthly":
        years = [series.start_year + i // 12 for i in range(len(series))]
        months = [(i % 12) + 1 for i in range(len(series))]
        data = {"years": years, "months": months, "values": series.values.tolist()}
    elif resolution == "annual":
        years, vals = aggregate_annual(series, kind)
        data = {"years": years, "values": vals.tolist()}
    else:
        raise MiddlewareError(f"unknown resolution {resolution!r}")

    if from_year is not None or to_year is not None:
        lo = from_year if from_year is not None else -10**9
        hi = to_year if to_year is not None else 10**9
        keep = [i for i, y in enumerate(data["years"]) if lo <= y <= hi]
        data = {k: [v[i] for i in keep] for k, v in data.items()}

    return {"branch": branch, "scenario": result.scenario_name,
            "unit": series.unit, "kind": kind, "resolution": resolution,
            "resource": resource, **data}


def _branch_demand_columns(result: ScenarioResult, branch: str) -> list[int]:
    ids = result.alloc_demands
    if branch == "water/demand":
        return list(range(len(ids)))
    if branch == "water/demand/agriculture":
        return [ids.index(d) for d in result.district_ids]
    leaf = branch.rsplit("/", 1)[-1]
    if leaf in ids:
        return [ids.index(leaf)]
    raise MiddlewareError(f"branch {branch!r} has no allocation columns")


def query_composition(result: ScenarioResult, branch: str, year: int,
                      dataset: StudyAreaDataset | None = None) -> dict:
    """Input (per-source) and output (per-destination) breakdowns for the
    Sankey-style views, summed over the 12 months of ``year``."""
    idx = _year_indices(result, year)
    inputs: dict[str, float] = {}
    outputs: dict[str, float] = {}

    if branch.startswith("water/supply/"):
        sid = branch.rsplit("/", 1)[-1]
        si = result.alloc_sources.index(sid)
        for di, did in enumerate(result.alloc_demands):
            v = float(result.delivered[idx, si, di].sum())
            if v > 0:
                outputs[did] = v
    elif branch.startswith("water/demand") or branch == "water/supply":
        if branch == "water/supply":
            for si, sid in enumerate(result.alloc_sources):
                outputs[sid] = float(result.delivered[idx, si, :].sum())
        else:
            cols = _branch_demand_columns(result, branch)
            for si, sid in enumerate(result.alloc_sources):
                v = float(result.delivered[np.ix_(idx, [si], cols)].sum())
                if v > 0:
                    inputs[sid] = v
    elif branch == "energy/demand/water_infrastructure" and dataset is not None:
        for si, sid in enumerate(result.alloc_sources):
            kwh = dataset.energy.water_kWh_per_m3.get(sid, 0.0)
            v = float(result.delivered[idx, si, :].sum()) * kwh / 1e6
            if v > 0:
                inputs[sid] = v
    elif branch in ("energy/supply", "energy/demand"):
        if branch == "energy/supply":
            for pi, pid in enumerate(result.plant_ids):
                v = float(result.generation[idx, pi].sum())
                if v > 0:
                    inputs[pid] = v
        else:
            for label in ("residential", "commercial", "industrial",
                          "water_infrastructure"):
                s = result.series[f"energy/demand/{label}"]
                outputs[label] = float(s.values[idx].sum())
    elif branch.startswith("food/districts/"):
        did = branch.rsplit("/", 1)[-1]
        di_alloc = result.alloc_demands.index(did)
        for si, sid in enumerate(result.alloc_sources):
            v = float(result.delivered[idx, si, di_alloc].sum())
            if v > 0:
                inputs[sid] = v
        s = next(iter(result.series.values()))
        yi = year - s.start_year
        dI = result.district_ids.index(did)
        for ci, crop in enumerate(result.crop_names):
            v = float(result.production[yi, dI, ci])
            if v > 0:
                outputs[crop] = v
    elif branch.startswith("food/crops/"):
        crop = branch.rsplit("/", 1)[-1]
        s = next(iter(result.series.values()))
        yi = year - s.start_year
        ci = result.crop_names.index(crop)
        for dI, did in enumerate(result.district_ids):
            v = float(result.production[yi, dI, ci])
            if v > 0:
                inputs[did] = v

    def fractions(d: dict[str, float]) -> dict[str, float]:
        total = sum(d.values())
        return {k: v / total for k, v in d.items()} if total > 0 else {}

    return {"branch": branch, "scenario": result.scenario_name, "year": year,
            "inputs": inputs, "outputs": outputs,
            "input_fractions": fractions(inputs),
            "output_fractions": fractions(outputs)}


def export_results_csv(store: CaseStore, case_name: str, path: str | Path,
                       scenarios: list[str] | None = None) -> None:
    """CSV `scenario,branch,year,variable,value,unit` of annual values."""
    import csv as _csv
    man = store.read_manifest(case_name)
    names = scenarios or man["scenarios"]
    with open(path, "w", newline="") as fh:
        w = _csv.writer(fh)
        w.writerow(["scenario", "branch", "year", "variable", "value", "unit"])
        for name in names:
            if not store.has_result(case_name, name):
                continue
            result = store.read_result(case_name, name)
            for branch, series in sorted(result.series.items()):
                kind = result.series_kind[branch]
                years, vals = aggregate_annual(series, kind)
                variable = _branch_variable(branch)
                for y, v in zip(years, vals):
                    w.writerow([name, branch, y, variable, repr(float(v)), series.unit])


def _branch_variable(branch: str) -> str:
    if branch.startswith("water/supply"):
        return "delivery"
    if branch.startswith("water"):
        return "consumption"
    if branch.startswith("energy/supply"):
        return "generation"
    if branch == "energy/emissions":
        return "emissions"
    if branch.startswith("energy"):
        return "demand"
    return "production"
