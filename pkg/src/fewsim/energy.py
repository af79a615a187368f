"""Energy sector: activity-driven demand, merit-order dispatch, emissions.

Dispatch is monthly energy (GWh), not hourly: each plant contributes up
to capacity_MW x hours-in-month, filled in merit-rank order against net
demand grossed up for transmission and distribution losses. The reserve
margin is a reported diagnostic against an implied peak, never enforced.
"""

from __future__ import annotations

import calendar
from dataclasses import dataclass

from .dataset import PlantCatalog, RENEWABLE_FUELS, StudyAreaDataset
from .water import AllocationMatrix

KWH_PER_GWH = 1e6


class EnergyError(ValueError):
    pass


def hours_in_month(year: int, month: int) -> int:
    return calendar.monthrange(year, month)[1] * 24


@dataclass
class SectorDemand:
    residential_GWh: float
    commercial_GWh: float
    industrial_GWh: float
    water_infrastructure_GWh: float = 0.0

    @property
    def total_GWh(self) -> float:
        return (self.residential_GWh + self.commercial_GWh
                + self.industrial_GWh + self.water_infrastructure_GWh)


def sector_demand(dataset: StudyAreaDataset, population: float,
                  eue_delta_pct: float = 0.0) -> SectorDemand:
    """Monthly final demand per sector; EUE gains scale residential only."""
    if not -100.0 <= eue_delta_pct <= 100.0:
        raise EnergyError(f"eue_delta_pct {eue_delta_pct} outside [-100, 100]")
    e = dataset.energy
    res = population * e.residential_kWh_pc / KWH_PER_GWH * (1.0 - eue_delta_pct / 100.0)
    com = population * e.commercial_kWh_pc / KWH_PER_GWH
    ind = population * e.industrial_kWh_pc / KWH_PER_GWH
    return SectorDemand(res, com, ind)


def water_infrastructure_demand(allocation: AllocationMatrix,
                                kwh_per_m3: dict[str, float]) -> float:
    """Electricity (GWh) to convey, pump and treat the month's deliveries."""
    total = 0.0
    for sid in allocation.sources:
        total += allocation.delivered_from(sid) * kwh_per_m3.get(sid, 0.0)
    return total / KWH_PER_GWH


@dataclass
class DispatchResult:
    generation_GWh: dict[str, float]  # plant id -> GWh
    unserved_GWh: float
    gross_GWh: float
    reserve_ok: bool

    @property
    def total_generation_GWh(self) -> float:
        return sum(self.generation_GWh.values())


def dispatch(catalog: PlantCatalog, net_demand_GWh: float, loss_fraction: float,
             reserve_margin: float, year: int, month: int,
             load_factor: float = 0.55) -> DispatchResult:
    """Fill plants in merit-rank order against loss-grossed demand."""
    if net_demand_GWh < 0:
        raise EnergyError("net demand must be >= 0")
    if not 0.0 <= loss_fraction < 1.0:
        raise EnergyError("loss fraction must be in [0, 1)")
    gross = net_demand_GWh / (1.0 - loss_fraction)
    hours = hours_in_month(year, month)

    generation: dict[str, float] = {}
    left = gross
    for plant in catalog.by_merit():
        capability = plant.capacity_MW * hours / 1000.0  # GWh
        gen = min(left, capability)
        generation[plant.id] = gen
        left -= gen
    unserved = max(0.0, left)

    total_capacity = sum(p.capacity_MW for p in catalog.plants)
    implied_peak_MW = gross * 1000.0 / (hours * load_factor)
    reserve_ok = total_capacity >= implied_peak_MW * (1.0 + reserve_margin)
    return DispatchResult(generation, unserved, gross, reserve_ok)


def emissions(generation_GWh: dict[str, float],
              catalog: PlantCatalog) -> tuple[dict[str, float], float]:
    """Per-plant and total tCO2 for a month of generation."""
    per_plant = {}
    total = 0.0
    for plant in catalog.plants:
        t = generation_GWh.get(plant.id, 0.0) * plant.emission_factor_t_per_GWh
        per_plant[plant.id] = t
        total += t
    return per_plant, total


def renewable_generation(generation_GWh: dict[str, float],
                         catalog: PlantCatalog) -> float:
    return sum(generation_GWh.get(p.id, 0.0) for p in catalog.plants
               if p.fuel in RENEWABLE_FUELS)


def imported_generation(generation_GWh: dict[str, float],
                        catalog: PlantCatalog) -> float:
    return sum(generation_GWh.get(p.id, 0.0) for p in catalog.plants
               if not p.in_area)
