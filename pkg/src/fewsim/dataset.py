"""Study-area dataset: water network, crops, plants, demand structure, climate.

The bundled dataset is synthetic but structurally faithful to the study
region: four water supply sources (CAP, SRP, groundwater, reclaimed/WWTP),
twelve irrigation districts, six crops, and a mixed in-area/out-of-area
power plant fleet.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .branches import BranchTree
from .series import DEFAULT_HORIZON, Horizon, MonthlySeries

FUELS = ("coal", "natural_gas", "uranium", "solar", "wind", "hydro")
RENEWABLE_FUELS = ("solar", "wind", "hydro")

CROPS = ("alfalfa_hay", "barley", "upland_cotton", "corn", "spring_durum_wheat", "vegetables")


class DatasetError(ValueError):
    """Base for dataset loading/validation failures."""


class MissingFileError(DatasetError):
    pass


class SchemaError(DatasetError):
    pass


class HorizonError(DatasetError):
    pass


@dataclass
class ClimateBlock:
    """One contiguous block of climate forcing (historical or simulated)."""

    tmean_C: MonthlySeries
    precip_mm: MonthlySeries
    population: MonthlySeries
    price_index: dict[str, MonthlySeries]
    yield_index: dict[str, MonthlySeries]

    def annual_mean_temp(self, year: int) -> float:
        return float(np.mean(self.tmean_C.year_slice(year)))

    def annual_precip(self, year: int) -> float:
        return float(np.sum(self.precip_mm.year_slice(year)))


@dataclass
class ClimateFile:
    name: str
    sim: ClimateBlock      # covers the simulation horizon
    history: ClimateBlock  # pre-run block used only for model fitting

    def block_for(self, year: int, horizon: Horizon) -> ClimateBlock:
        return self.sim if horizon.contains_year(year) else self.history


@dataclass
class CropDef:
    name: str
    kc: list[float]                 # 12 monthly crop coefficients
    base_yield_t_per_ha: float
    irrigated: bool = True

    def validate(self) -> None:
        if len(self.kc) != 12:
            raise SchemaError(f"crop {self.name!r}: kc must have 12 entries")
        if self.base_yield_t_per_ha < 0:
            raise SchemaError(f"crop {self.name!r}: negative base yield")


@dataclass
class District:
    id: str
    label: str
    cropland_ha: float
    base_efficiency: float
    allowed_crops: list[str]
    exclusive_crops: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.cropland_ha < 0:
            raise SchemaError(f"district {self.id!r}: negative cropland")
        if not 0 < self.base_efficiency <= 1:
            raise SchemaError(f"district {self.id!r}: efficiency outside (0, 1]")


@dataclass
class WaterSource:
    id: str
    label: str
    residual: bool = False
    availability: MonthlySeries | None = None  # None for the residual source
    monthly_cap_m3: float | None = None        # optional cap on the residual


@dataclass
class WaterDemandNode:
    id: str
    sector: str  # municipal | industrial | native_american | power | agricultural
    priority: int
    preferences: list[str]  # source ids, most preferred first


@dataclass
class WaterNetwork:
    sources: list[WaterSource]
    demands: list[WaterDemandNode]

    def __post_init__(self):
        self._sources = {s.id: s for s in self.sources}
        self._demands = {d.id: d for d in self.demands}

    def source(self, sid: str) -> WaterSource:
        return self._sources[sid]

    def demand(self, did: str) -> WaterDemandNode:
        return self._demands[did]

    def validate(self) -> None:
        residuals = [s for s in self.sources if s.residual]
        if len(residuals) != 1:
            raise SchemaError(f"water network needs exactly one residual source, got {len(residuals)}")
        for d in self.demands:
            if d.priority < 1:
                raise SchemaError(f"demand {d.id!r}: priority must be >= 1")
            if not d.preferences:
                raise SchemaError(f"demand {d.id!r}: unreachable (no eligible sources)")
            for sid in d.preferences:
                if sid not in self._sources:
                    raise SchemaError(f"demand {d.id!r}: unknown source {sid!r}")


@dataclass
class Plant:
    id: str
    label: str
    in_area: bool
    fuel: str
    capacity_MW: float
    merit_rank: int
    emission_factor_t_per_GWh: float
    water_factor_m3_per_GWh: float
    loss_fraction: float = 0.0

    def validate(self) -> None:
        if self.fuel not in FUELS:
            raise SchemaError(f"plant {self.id!r}: unknown fuel {self.fuel!r}")
        if self.capacity_MW <= 0:
            raise SchemaError(f"plant {self.id!r}: capacity must be > 0")
        if not 0 <= self.loss_fraction < 1:
            raise SchemaError(f"plant {self.id!r}: loss fraction outside [0, 1)")
        if self.fuel in RENEWABLE_FUELS and self.emission_factor_t_per_GWh != 0:
            raise SchemaError(f"plant {self.id!r}: renewable plant with nonzero emission factor")


@dataclass
class PlantCatalog:
    plants: list[Plant]

    def validate(self) -> None:
        ranks = [p.merit_rank for p in self.plants]
        if len(set(ranks)) != len(ranks):
            raise SchemaError("plant merit ranks are not unique")
        for p in self.plants:
            p.validate()

    def by_merit(self) -> list[Plant]:
        return sorted(self.plants, key=lambda p: p.merit_rank)


@dataclass
class EnergyDemandStructure:
    # per-capita monthly final demand, kWh/person/month
    residential_kWh_pc: float
    commercial_kWh_pc: float
    industrial_kWh_pc: float
    # water infrastructure energy intensity per source, kWh/m3 delivered
    water_kWh_per_m3: dict[str, float]

    def validate(self) -> None:
        for name in ("residential_kWh_pc", "commercial_kWh_pc", "industrial_kWh_pc"):
            if getattr(self, name) < 0:
                raise SchemaError(f"energy demand: {name} must be >= 0")
        for sid, v in self.water_kWh_per_m3.items():
            if v < 0:
                raise SchemaError(f"energy demand: water intensity for {sid!r} must be >= 0")


@dataclass
class WaterIntensities:
    municipal_m3_pc: float
    industrial_m3_pc: float
    native_american_m3_pc: float


@dataclass
class CouplingParams:
    loss_fraction: float = 0.05
    reserve_margin: float = 0.15
    load_factor: float = 0.55
    single_pass: bool = False
    max_iterations: int = 10
    tolerance: float = 1e-6


@dataclass
class StudyAreaDataset:
    name: str
    horizon: Horizon
    tree: BranchTree
    climate_files: dict[str, ClimateFile]
    crops: list[CropDef]
    districts: list[District]
    water: WaterNetwork
    plants: PlantCatalog
    energy: EnergyDemandStructure
    water_intensities: WaterIntensities
    coupling: CouplingParams
    fmlm_coefficients_file: str | None = None
    fmlm_panel_file: str | None = None
    fmlm_base_crop: str = "corn"
    path: Path | None = None

    def crop_names(self) -> list[str]:
        return [c.name for c in self.crops]

    def crop(self, name: str) -> CropDef:
        for c in self.crops:
            if c.name == name:
                return c
        raise KeyError(name)

    def district(self, did: str) -> District:
        for d in self.districts:
            if d.id == did:
                return d
        raise KeyError(did)

    def validate(self) -> None:
        if len(self.water.sources) != 4:
            raise SchemaError(f"expected exactly 4 supply sources, got {len(self.water.sources)}")
        if len(self.crops) != 6:
            raise SchemaError(f"expected exactly 6 crops, got {len(self.crops)}")
        if len(self.districts) != 12:
            raise SchemaError(f"expected 12 irrigation districts, got {len(self.districts)}")
        self.water.validate()
        self.plants.validate()
        self.energy.validate()
        for c in self.crops:
            c.validate()
        for d in self.districts:
            d.validate()
            for crop in d.allowed_crops + d.exclusive_crops:
                if crop not in self.crop_names():
                    raise SchemaError(f"district {d.id!r}: unknown crop {crop!r}")
        for name, cf in self.climate_files.items():
            for label, series in _climate_series(cf.sim):
                if not series.covers(self.horizon):
                    raise HorizonError(
                        f"climate file {name!r}: {label} does not cover the "
                        f"{self.horizon.n_months}-month horizon (has {len(series)})")
                if label == "precip_mm" and np.any(series.values < 0):
                    raise SchemaError(f"climate file {name!r}: negative precipitation")
        for s in self.water.sources:
            if not s.residual:
                if s.availability is None:
                    raise SchemaError(f"source {s.id!r}: non-residual source needs availability")
                if not s.availability.covers(self.horizon):
                    raise HorizonError(f"source {s.id!r}: availability does not cover horizon")


def _climate_series(block: ClimateBlock):
    yield "tmean_C", block.tmean_C
    yield "precip_mm", block.precip_mm
    yield "population", block.population
    for crop, s in block.price_index.items():
        yield f"price_index[{crop}]", s
    for crop, s in block.yield_index.items():
        yield f"yield_index[{crop}]", s


# ---------------------------------------------------------------------------
# loading

def _read_climate_csv(path: Path, horizon: Horizon, history: Horizon,
                      crops: list[str], name: str) -> ClimateFile:
    if not path.exists():
        raise MissingFileError(f"climate file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"year", "month", "tmean_C", "precip_mm", "population"}
        cols = set(reader.fieldnames or ())
        missing = required - cols
        if missing:
            raise SchemaError(f"climate file {name!r}: missing columns {sorted(missing)}")
        rows = list(reader)

    def block(h: Horizon) -> ClimateBlock:
        n = h.n_months
        tmean = np.full(n, np.nan)
        precip = np.full(n, np.nan)
        pop = np.full(n, np.nan)
        price = {c: np.full(n, np.nan) for c in crops}
        yld = {c: np.full(n, np.nan) for c in crops}
        for row in rows:
            y, m = int(row["year"]), int(row["month"])
            if not (1 <= m <= 12):
                raise SchemaError(f"climate file {name!r}: month {m} outside 1..12")
            idx = (y - h.start_year) * 12 + (m - h.start_month)
            if idx < 0 or idx >= n:
                continue
            tmean[idx] = float(row["tmean_C"])
            precip[idx] = float(row["precip_mm"])
            pop[idx] = float(row["population"])
            for c in crops:
                price[c][idx] = float(row[f"price_{c}"])
                yld[c][idx] = float(row[f"yield_{c}"])
        for label, arr in [("tmean_C", tmean), ("precip_mm", precip), ("population", pop)]:
            if np.any(np.isnan(arr)):
                got = int(np.sum(~np.isnan(arr)))
                raise HorizonError(
                    f"climate file {name!r}: {label} covers {got} of {n} months "
                    f"for block starting {h.start_year}")
        mk = lambda arr, unit: MonthlySeries(h.start_year, h.start_month, arr, unit)
        return ClimateBlock(
            tmean_C=mk(tmean, "dimensionless"),
            precip_mm=mk(precip, "dimensionless"),
            population=mk(pop, "persons"),
            price_index={c: mk(price[c], "dimensionless") for c in crops},
            yield_index={c: mk(yld[c], "dimensionless") for c in crops},
        )

    return ClimateFile(name=name, sim=block(horizon), history=block(history))


def load_dataset(path: str | Path) -> StudyAreaDataset:
    """Load and fully validate a study-area dataset from a directory."""
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise MissingFileError(f"dataset manifest not found: {manifest_path}")
    with open(manifest_path) as fh:
        man = json.load(fh)

    try:
        hz = man["horizon"]
        horizon = Horizon(hz["start_year"], hz["start_month"], hz["end_year"], hz["end_month"])
        hist = man["history"]
        history = Horizon(hist["start_year"], hist["start_month"], hist["end_year"], hist["end_month"])
        tree = BranchTree.from_dict(man["branch_tree"])
        crops = [CropDef(**c) for c in man["crops"]]
        districts = [District(**d) for d in man["districts"]]
        sources = []
        for s in man["water_network"]["sources"]:
            avail = s.get("availability")
            sources.append(WaterSource(
                id=s["id"], label=s["label"], residual=s.get("residual", False),
                availability=MonthlySeries.from_dict(avail) if avail else None,
                monthly_cap_m3=s.get("monthly_cap_m3"),
            ))
        demands = [WaterDemandNode(**d) for d in man["water_network"]["demands"]]
        water = WaterNetwork(sources=sources, demands=demands)
        plants = PlantCatalog([Plant(**p) for p in man["plants"]])
        energy = EnergyDemandStructure(**man["energy_demand"])
        wint = WaterIntensities(**man["water_intensities"])
        coupling = CouplingParams(**man.get("coupling", {}))
        fmlm = man.get("fmlm", {})
    except KeyError as exc:
        raise SchemaError(f"manifest missing field {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise SchemaError(f"manifest field mismatch: {exc}") from exc

    crop_names = [c.name for c in crops]
    climate_files = {
        name: _read_climate_csv(path / fname, horizon, history, crop_names, name)
        for name, fname in man["climate_files"].items()
    }

    ds = StudyAreaDataset(
        name=man.get("name", path.name),
        horizon=horizon,
        tree=tree,
        climate_files=climate_files,
        crops=crops,
        districts=districts,
        water=water,
        plants=plants,
        energy=energy,
        water_intensities=wint,
        coupling=coupling,
        fmlm_coefficients_file=fmlm.get("coefficients_file"),
        fmlm_panel_file=fmlm.get("panel_file"),
        fmlm_base_crop=fmlm.get("base_crop", "corn"),
        path=path,
    )
    ds.validate()
    return ds


def serialize_manifest(ds: StudyAreaDataset) -> dict:
    """Inverse of the manifest portion of load_dataset (climate stays in CSV)."""
    return {
        "name": ds.name,
        "horizon": {
            "start_year": ds.horizon.start_year, "start_month": ds.horizon.start_month,
            "end_year": ds.horizon.end_year, "end_month": ds.horizon.end_month,
        },
        "history": {
            "start_year": 1990, "start_month": 1,
            "end_year": ds.horizon.start_year - 1, "end_month": 12,
        },
        "climate_files": {name: f"climate_{name}.csv" for name in ds.climate_files},
        "branch_tree": ds.tree.to_dict(),
        "crops": [vars(c) for c in ds.crops],
        "districts": [vars(d) for d in ds.districts],
        "water_network": {
            "sources": [
                {
                    "id": s.id, "label": s.label, "residual": s.residual,
                    "availability": s.availability.to_dict() if s.availability else None,
                    "monthly_cap_m3": s.monthly_cap_m3,
                }
                for s in ds.water.sources
            ],
            "demands": [vars(d) for d in ds.water.demands],
        },
        "plants": [vars(p) for p in ds.plants.plants],
        "energy_demand": vars(ds.energy),
        "water_intensities": vars(ds.water_intensities),
        "coupling": vars(ds.coupling),
        "fmlm": {
            "coefficients_file": ds.fmlm_coefficients_file,
            "panel_file": ds.fmlm_panel_file,
            "base_crop": ds.fmlm_base_crop,
        },
    }


def bundled_dataset_path() -> Path:
    """Location of the dataset shipped with the package."""
    return Path(__file__).parent / "data" / "studyarea"
