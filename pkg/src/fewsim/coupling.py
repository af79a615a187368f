"""Coupled scenario execution: food -> water -> energy each month.

Two link quantities are exchanged inside each month: the electricity the
water infrastructure needs to move the month's deliveries, and the water
the power plants need to cool the month's generation. The month is
committed once both links change by less than the relative tolerance, or
after the iteration cap (which sets a warning flag on the result).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import energy as en
from . import fmlm as fm
from . import water as wa
from .dataset import PlantCatalog, StudyAreaDataset
from .series import MonthlySeries


class CouplingError(ValueError):
    pass


def link_energy_for_water(allocation: wa.AllocationMatrix,
                          kwh_per_m3: dict[str, float]) -> float:
    """GWh needed to deliver the month's water (delegates to energy model)."""
    return en.water_infrastructure_demand(allocation, kwh_per_m3)


def link_water_for_energy(generation_GWh: dict[str, float],
                          catalog: PlantCatalog) -> float:
    """m3 of cooling water implied by generation; in-area plants only."""
    total = 0.0
    for plant in catalog.plants:
        if plant.in_area:
            gen = generation_GWh.get(plant.id, 0.0)
            if gen < 0:
                raise CouplingError(f"negative generation for plant {plant.id!r}")
            total += gen * plant.water_factor_m3_per_GWh
    return total


@dataclass
class ScenarioResult:
    scenario_name: str
    climate: str
    deltas: dict[str, float]
    warning: bool
    iteration_counts: list[int]
    max_link_residual: float
    series: dict[str, MonthlySeries]
    series_kind: dict[str, str]
    # allocation record, month-major
    alloc_sources: list[str]
    alloc_demands: list[str]
    delivered: np.ndarray        # (M, S, D) m3
    water_demand: np.ndarray     # (M, D) m3
    unmet: np.ndarray            # (M, D) m3
    # dispatch record
    plant_ids: list[str]
    generation: np.ndarray       # (M, P) GWh
    plant_emissions: np.ndarray  # (M, P) tCO2
    unserved: np.ndarray         # (M,) GWh
    reserve_ok: np.ndarray       # (M,) bool
    # food record, year-major
    district_ids: list[str]
    crop_names: list[str]
    crop_areas: np.ndarray       # (Y, D, J) ha
    production: np.ndarray       # (Y, D, J) tonne

    def to_dict(self) -> dict:
        return {
            "scenario_name": self.scenario_name,
            "climate": self.climate,
            "deltas": self.deltas,
            "warning": self.warning,
            "iteration_counts": self.iteration_counts,
            "max_link_residual": self.max_link_residual,
            "series": {k: {**s.to_dict(), "kind": self.series_kind[k]}
                       for k, s in self.series.items()},
            "alloc_sources": self.alloc_sources,
            "alloc_demands": self.alloc_demands,
            "delivered": self.delivered.tolist(),
            "water_demand": self.water_demand.tolist(),
            "unmet": self.unmet.tolist(),
            "plant_ids": self.plant_ids,
            "generation": self.generation.tolist(),
            "plant_emissions": self.plant_emissions.tolist(),
            "unserved": self.unserved.tolist(),
            "reserve_ok": self.reserve_ok.astype(int).tolist(),
            "district_ids": self.district_ids,
            "crop_names": self.crop_names,
            "crop_areas": self.crop_areas.tolist(),
            "production": self.production.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioResult":
        series = {}
        kinds = {}
        for k, sd in d["series"].items():
            kinds[k] = sd["kind"]
            series[k] = MonthlySeries(sd["start_year"], sd["start_month"],
                                      np.array(sd["values"]), sd["unit"])
        return cls(
            scenario_name=d["scenario_name"], climate=d["climate"],
            deltas=dict(d["deltas"]), warning=d["warning"],
            iteration_counts=list(d["iteration_counts"]),
            max_link_residual=d["max_link_residual"],
            series=series, series_kind=kinds,
            alloc_sources=list(d["alloc_sources"]),
            alloc_demands=list(d["alloc_demands"]),
            delivered=np.array(d["delivered"]),
            water_demand=np.array(d["water_demand"]),
            unmet=np.array(d["unmet"]),
            plant_ids=list(d["plant_ids"]),
            generation=np.array(d["generation"]),
            plant_emissions=np.array(d["plant_emissions"]),
            unserved=np.array(d["unserved"]),
            reserve_ok=np.array(d["reserve_ok"], dtype=bool),
            district_ids=list(d["district_ids"]),
            crop_names=list(d["crop_names"]),
            crop_areas=np.array(d["crop_areas"]),
            production=np.array(d["production"]),
        )


@dataclass
class ScenarioSpec:
    scenario_name: str
    climate_file: str
    deltas: dict[str, float] = field(default_factory=dict)


def _rel_change(new: float, old: float) -> float:
    return abs(new - old) / max(abs(new), abs(old), 1.0)


def run_scenario(dataset: StudyAreaDataset, spec: ScenarioSpec,
                 coefficients: fm.FmlmCoefficients | None = None) -> ScenarioResult:
    """Execute one scenario over the full horizon.

    Deterministic: identical inputs give bit-identical results. Months are
    strictly sequential; the previous month's committed link values seed
    the next month's fixed-point iteration.
    """
    if spec.climate_file not in dataset.climate_files:
        raise CouplingError(f"unknown climate file {spec.climate_file!r}")
    adjustable = dataset.tree.adjustable_variables()
    for key in spec.deltas:
        if key not in adjustable:
            raise CouplingError(f"delta for non-adjustable variable {key!r}")
    climate = dataset.climate_files[spec.climate_file]
    horizon = dataset.horizon
    params = dataset.coupling
    if coefficients is None:
        coefficients = fm.dataset_coefficients(dataset)

    wue = spec.deltas.get("municipal_wue", 0.0)
    eue = spec.deltas.get("household_eue", 0.0)
    ie = spec.deltas.get("irrigation_ie", 0.0)

    network = dataset.water
    catalog = dataset.plants
    wint = dataset.water_intensities
    kwh_per_m3 = dataset.energy.water_kWh_per_m3

    source_ids = [s.id for s in network.sources]
    demand_ids = [d.id for d in network.demands]
    district_ids = [d.id for d in dataset.districts]
    crop_names = dataset.crop_names()
    plant_ids = [p.id for p in catalog.plants]
    M = horizon.n_months
    Y = len(horizon.years)
    S, D, P, J = len(source_ids), len(demand_ids), len(plant_ids), len(crop_names)

    delivered = np.zeros((M, S, D))
    water_demand = np.zeros((M, D))
    unmet = np.zeros((M, D))
    generation = np.zeros((M, P))
    plant_emissions = np.zeros((M, P))
    unserved = np.zeros(M)
    reserve_ok = np.zeros(M, dtype=bool)
    crop_areas = np.zeros((Y, len(district_ids), J))
    production = np.zeros((Y, len(district_ids), J))

    energy_sectors = np.zeros((M, 4))  # residential, commercial, industrial, water infra
    total_net_demand = np.zeros(M)
    emissions_total = np.zeros(M)

    iteration_counts: list[int] = []
    max_residual = 0.0
    warning = False

    # link state carried across months as the iteration seed
    pp_water = 0.0
    wi_energy = 0.0

    avail_by_source = {
        s.id: s.availability for s in network.sources if not s.residual
    }

    for yi, year in enumerate(horizon.years):
        # annual crop decision, held constant within the year
        year_areas = {}
        for di, did in enumerate(district_ids):
            areas = fm.project_crop_areas(coefficients, dataset, climate, did, year)
            year_areas[did] = areas
            crop_areas[yi, di, :] = [areas[c] for c in crop_names]

        for month in range(1, 13):
            idx = horizon.index_of(year, month)
            pop = climate.sim.population.at(year, month)
            tmean = climate.sim.tmean_C.at(year, month)
            precip = climate.sim.precip_mm.at(year, month)
            availability = {sid: s.at(year, month) for sid, s in avail_by_source.items()}

            base_demands = {
                "municipal": wa.municipal_demand(pop, wint.municipal_m3_pc, wue),
                "industrial": pop * wint.industrial_m3_pc,
                "native_american": pop * wint.native_american_m3_pc,
            }
            for did in district_ids:
                base_demands[did] = wa.irrigation_demand(
                    dataset, did, year_areas[did], tmean, precip, month, ie)

            alloc = disp = None
            em_per_plant: dict[str, float] = {}
            em_total = 0.0
            sd = None
            residual = np.inf
            iters = 0
            max_iters = 1 if params.single_pass else params.max_iterations
            while iters < max_iters:
                iters += 1
                demands = dict(base_demands)
                demands["power_plants"] = pp_water
                alloc = wa.allocate_water(network, demands, availability)
                wi_new = link_energy_for_water(alloc, kwh_per_m3)
                sd = en.sector_demand(dataset, pop, eue)
                sd.water_infrastructure_GWh = wi_new
                disp = en.dispatch(catalog, sd.total_GWh, params.loss_fraction,
                                   params.reserve_margin, year, month,
                                   params.load_factor)
                em_per_plant, em_total = en.emissions(disp.generation_GWh, catalog)
                pp_new = link_water_for_energy(disp.generation_GWh, catalog)
                residual = max(_rel_change(wi_new, wi_energy),
                               _rel_change(pp_new, pp_water))
                wi_energy, pp_water = wi_new, pp_new
                if params.single_pass or residual < params.tolerance:
                    break

            iteration_counts.append(iters)
            if not params.single_pass and residual >= params.tolerance:
                warning = True
            if not params.single_pass:
                max_residual = max(max_residual, min(residual, np.inf))

            # commit the month
            for si, sid in enumerate(alloc.sources):
                delivered[idx, si, :] = alloc.delivered[si, :]
            water_demand[idx, :] = alloc.demand
            unmet[idx, :] = alloc.unmet
            for pi, pid in enumerate(plant_ids):
                generation[idx, pi] = disp.generation_GWh[pid]
                plant_emissions[idx, pi] = em_per_plant[pid]
            unserved[idx] = disp.unserved_GWh
            reserve_ok[idx] = disp.reserve_ok
            energy_sectors[idx, :] = (sd.residential_GWh, sd.commercial_GWh,
                                      sd.industrial_GWh, sd.water_infrastructure_GWh)
            total_net_demand[idx] = sd.total_GWh
            emissions_total[idx] = em_total

        # annual production after the year's allocations are known
        yidx = [horizon.index_of(year, m) for m in range(1, 13)]
        for di, did in enumerate(district_ids):
            dj = demand_ids.index(did)
            dem = water_demand[yidx, dj].sum()
            um = unmet[yidx, dj].sum()
            unmet_fraction = um / dem if dem > 0 else 0.0
            yld = {c: float(np.mean(climate.sim.yield_index[c].year_slice(year)))
                   for c in crop_names}
            prod = wa.crop_production(dataset, did, year_areas[did], yld, unmet_fraction)
            production[yi, di, :] = [prod[c] for c in crop_names]

    series, kinds = _build_series(
        dataset, horizon, source_ids, demand_ids, district_ids, crop_names,
        plant_ids, delivered, water_demand, unmet, generation, energy_sectors,
        total_net_demand, emissions_total, production)

    return ScenarioResult(
        scenario_name=spec.scenario_name,
        climate=spec.climate_file,
        deltas=dict(spec.deltas),
        warning=warning,
        iteration_counts=iteration_counts,
        max_link_residual=float(max_residual if np.isfinite(max_residual) else 0.0),
        series=series,
        series_kind=kinds,
        alloc_sources=source_ids,
        alloc_demands=demand_ids,
        delivered=delivered,
        water_demand=water_demand,
        unmet=unmet,
        plant_ids=plant_ids,
        generation=generation,
        plant_emissions=plant_emissions,
        unserved=unserved,
        reserve_ok=reserve_ok,
        district_ids=district_ids,
        crop_names=crop_names,
        crop_areas=crop_areas,
        production=production,
    )


def _build_series(dataset, horizon, source_ids, demand_ids, district_ids,
                  crop_names, plant_ids, delivered, water_demand, unmet,
                  generation, energy_sectors, total_net_demand,
                  emissions_total, production):
    sy, sm = horizon.start_year, horizon.start_month
    series: dict[str, MonthlySeries] = {}
    kinds: dict[str, str] = {}

    def add(branch: str, values: np.ndarray, unit: str, kind: str = "flow"):
        series[branch] = MonthlySeries(sy, sm, np.asarray(values, dtype=float), unit)
        kinds[branch] = kind

    for si, sid in enumerate(source_ids):
        add(f"water/supply/{sid}", delivered[:, si, :].sum(axis=1), "m3_per_month")
    add("water/supply", delivered.sum(axis=(1, 2)), "m3_per_month")

    for di, did in enumerate(demand_ids):
        if did in district_ids:
            add(f"water/demand/agriculture/{did}", delivered[:, :, di].sum(axis=1), "m3_per_month")
        else:
            add(f"water/demand/{did}", delivered[:, :, di].sum(axis=1), "m3_per_month")
    ag_cols = [demand_ids.index(d) for d in district_ids]
    add("water/demand/agriculture", delivered[:, :, ag_cols].sum(axis=(1, 2)), "m3_per_month")
    add("water/demand", delivered.sum(axis=(1, 2)), "m3_per_month")

    for label, col in zip(("residential", "commercial", "industrial", "water_infrastructure"),
                          range(4)):
        add(f"energy/demand/{label}", energy_sectors[:, col], "GWh_per_month")
    add("energy/demand", total_net_demand, "GWh_per_month")
    for pi, pid in enumerate(plant_ids):
        add(f"energy/supply/{pid}", generation[:, pi], "GWh_per_month")
    add("energy/supply", generation.sum(axis=1), "GWh_per_month")
    add("energy/emissions", emissions_total, "tonne")

    # annual food quantities spread evenly across months so flow aggregation
    # recovers the annual totals
    M = horizon.n_months
    for di, did in enumerate(district_ids):
        monthly = np.repeat(production[:, di, :].sum(axis=1) / 12.0, 12)[:M]
        add(f"food/districts/{did}", monthly, "tonne")
    for ci, crop in enumerate(crop_names):
        monthly = np.repeat(production[:, :, ci].sum(axis=1) / 12.0, 12)[:M]
        add(f"food/crops/{crop}", monthly, "tonne")
    add("food/production", np.repeat(production.sum(axis=(1, 2)) / 12.0, 12)[:M], "tonne")
    return series, kinds
