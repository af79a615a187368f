"""Sustainability indices: ten [0,1] ratios per scenario-year.

Water: regional/agricultural/district groundwater reliance, M&I and
district surface reliance. Energy: renewable share, import dependence.
Food: agricultural water impact, agricultural energy share, agricultural
emission share. A 0/0 ratio is flagged (NaN), never silently zero.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .coupling import ScenarioResult
from .dataset import RENEWABLE_FUELS, StudyAreaDataset

EPSILON = 1e-9

INDEX_NAMES = (
    "regional_gw_reliance",
    "ag_gw_reliance",
    "mi_surface_reliance",
    "district_gw_reliance",
    "district_surface_reliance",
    "renewable_share",
    "import_dependence",
    "ag_water_impact",
    "ag_energy_share",
    "ag_emission_share",
)

SURFACE_SOURCES = ("cap", "srp")


class IndexError_(ValueError):
    pass


@dataclass
class IndexVector:
    scenario: str
    year: int
    regional_gw_reliance: float
    ag_gw_reliance: float
    mi_surface_reliance: float
    district_gw_reliance: float
    district_surface_reliance: float
    renewable_share: float
    import_dependence: float
    ag_water_impact: float
    ag_energy_share: float
    ag_emission_share: float

    def values(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in INDEX_NAMES}

    def flagged(self) -> dict[str, bool]:
        return {name: math.isnan(getattr(self, name)) for name in INDEX_NAMES}

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.nan  # undefined, flagged
    # numerators are sub-aggregates of their denominators, so anything
    # outside [0, 1] is float summation drift
    return min(1.0, max(0.0, num / den))


def compute_indices(result: ScenarioResult, dataset: StudyAreaDataset,
                    year: int) -> IndexVector:
    s = next(iter(result.series.values()))
    first = s.start_year
    if not (first <= year < first + len(s) // 12):
        raise IndexError_(f"year {year} outside horizon of results")
    base = (year - first) * 12
    months = slice(base, base + 12)

    sources = result.alloc_sources
    demands = result.alloc_demands
    gw = sources.index("groundwater")
    surface = [sources.index(s) for s in SURFACE_SOURCES if s in sources]
    ag_cols = [demands.index(d) for d in result.district_ids]
    mi_cols = [demands.index(d) for d in ("municipal", "industrial") if d in demands]

    delivered = result.delivered[months]  # (12, S, D)
    total = float(delivered.sum())
    gw_total = float(delivered[:, gw, :].sum())

    ag_delivered = delivered[:, :, ag_cols]
    ag_total = float(ag_delivered.sum())
    ag_gw = float(ag_delivered[:, gw, :].sum())
    ag_surface = float(ag_delivered[:, surface, :].sum())

    mi_total = float(delivered[:, :, mi_cols].sum())
    mi_surface = float(delivered[:, surface, :][:, :, mi_cols].sum())

    # district variants: per-district ratios, weighted by district deliveries
    d_gw = _weighted_district_ratio(ag_delivered, gw_rows=[gw])
    d_surface = _weighted_district_ratio(ag_delivered, gw_rows=surface)

    gen = result.generation[months]  # (12, P)
    gen_total = float(gen.sum())
    renew = 0.0
    imported = 0.0
    for pi, pid in enumerate(result.plant_ids):
        plant = next(p for p in dataset.plants.plants if p.id == pid)
        g = float(gen[:, pi].sum())
        if plant.fuel in RENEWABLE_FUELS:
            renew += g
        if not plant.in_area:
            imported += g

    energy_total = float(result.series["energy/demand"].values[months].sum())
    gw_kwh = dataset.energy.water_kWh_per_m3.get("groundwater", 0.0)
    ag_pump_energy = ag_gw * gw_kwh / 1e6  # GWh
    ag_energy_share = _ratio(ag_pump_energy, energy_total)

    emissions_total = float(result.series["energy/emissions"].values[months].sum())
    if math.isnan(ag_energy_share) or emissions_total == 0.0:
        ag_emission_share = math.nan
    else:
        # emissions prorated by the agricultural energy share
        ag_emission_share = (ag_energy_share * emissions_total) / emissions_total

    return IndexVector(
        scenario=result.scenario_name,
        year=year,
        regional_gw_reliance=_ratio(gw_total, total),
        ag_gw_reliance=_ratio(ag_gw, ag_total),
        mi_surface_reliance=_ratio(mi_surface, mi_total),
        district_gw_reliance=d_gw,
        district_surface_reliance=d_surface,
        renewable_share=_ratio(renew, gen_total),
        import_dependence=_ratio(imported, gen_total),
        ag_water_impact=_ratio(ag_total, total),
        ag_energy_share=ag_energy_share,
        ag_emission_share=ag_emission_share,
    )


def _weighted_district_ratio(ag_delivered: np.ndarray, gw_rows: list[int]) -> float:
    """Delivery-weighted average of per-district source-share ratios."""
    totals = ag_delivered.sum(axis=(0, 1))       # per district
    shares = ag_delivered[:, gw_rows, :].sum(axis=(0, 1))
    weight_total = float(totals.sum())
    if weight_total == 0.0:
        return math.nan
    # weighted average of (share_d / total_d) with weights total_d collapses
    # to sum(share) / sum(total), restricted to districts with deliveries
    return _ratio(float(shares.sum()), weight_total)


def index_deltas(vector: IndexVector, base: IndexVector) -> dict[str, float]:
    """Proportional difference per index vs the base scenario."""
    if vector.year != base.year:
        raise IndexError_(f"mismatched years {vector.year} vs {base.year}")
    out = {}
    for name in INDEX_NAMES:
        v, b = getattr(vector, name), getattr(base, name)
        if math.isnan(v) or math.isnan(b):
            out[name] = math.nan
        else:
            out[name] = (v - b) / max(abs(b), EPSILON)
    return out


def export_indices_csv(vectors: list[IndexVector], path: str | Path) -> None:
    """CSV `scenario,year,index,value,flagged`."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario", "year", "index", "value", "flagged"])
        for vec in vectors:
            flags = vec.flagged()
            for name, value in vec.values().items():
                w.writerow([vec.scenario, vec.year, name,
                            "" if flags[name] else repr(value), int(flags[name])])
