"""Water sector: monthly demands and priority-based source allocation.

Irrigation demand uses a crop-coefficient surrogate: net requirement is
Kc x reference ET minus effective precipitation, converted to volume and
divided by district irrigation efficiency. Allocation is a deterministic
greedy over (priority class, per-demand source preference) with a
proportional split among equal-priority requests on a constrained source;
the single residual source (groundwater) absorbs any remainder reachable
from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import StudyAreaDataset, WaterNetwork


class WaterError(ValueError):
    pass


# Mean extraterrestrial radiation by month (MJ/m2/day) near 33.5 N, used by
# the Hargreaves-type reference ET estimate. Diurnal range fixed at 12 C
# since the forcing carries monthly means only.
_RA_MJ = (15.0, 19.0, 24.6, 30.6, 34.8, 36.6, 35.8, 32.6, 27.4, 21.4, 16.2, 13.8)
_DIURNAL_RANGE_C = 12.0
_DAYS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)

EFFECTIVE_PRECIP_FRACTION = 0.75


def reference_et0_mm(tmean_C: float, month: int) -> float:
    """Monthly reference evapotranspiration (mm) from mean temperature."""
    ra_mm_day = _RA_MJ[month - 1] / 2.45  # MJ/m2/day -> mm/day equivalent
    per_day = 0.0023 * ra_mm_day * math.sqrt(_DIURNAL_RANGE_C) * max(0.0, tmean_C + 17.8)
    return per_day * _DAYS[month - 1]


def effective_precip_mm(precip_mm: float) -> float:
    return EFFECTIVE_PRECIP_FRACTION * precip_mm


def municipal_demand(population: float, per_capita_m3: float,
                     wue_delta_pct: float = 0.0) -> float:
    """Population-driven demand; WUE gains scale it down linearly."""
    if not -100.0 <= wue_delta_pct <= 100.0:
        raise WaterError(f"wue_delta_pct {wue_delta_pct} outside [-100, 100]")
    return population * per_capita_m3 * (1.0 - wue_delta_pct / 100.0)


def gross_irrigation_m3(net_m3: float, base_efficiency: float,
                        ie_delta_pct: float = 0.0) -> float:
    """Gross withdrawal for a net crop requirement.

    Efficiency gains enter as a divisor: the net crop need is fixed and a
    better system withdraws less.
    """
    return net_m3 / base_efficiency / (1.0 + ie_delta_pct / 100.0)


def irrigation_demand(dataset: StudyAreaDataset, district_id: str,
                      crop_areas: dict[str, float], tmean_C: float,
                      precip_mm: float, month: int,
                      ie_delta_pct: float = 0.0) -> float:
    """Monthly gross irrigation demand (m3) for one district."""
    district = dataset.district(district_id)
    et0 = reference_et0_mm(tmean_C, month)
    effp = effective_precip_mm(precip_mm)
    net_m3 = 0.0
    for crop, area_ha in crop_areas.items():
        try:
            kc = dataset.crop(crop).kc[month - 1]
        except KeyError:
            raise WaterError(f"unknown crop coefficient for {crop!r}") from None
        net_mm = max(0.0, kc * et0 - effp)
        net_m3 += area_ha * net_mm * 10.0  # 1 mm over 1 ha = 10 m3
    return gross_irrigation_m3(net_m3, district.base_efficiency, ie_delta_pct)


def crop_production(dataset: StudyAreaDataset, district_id: str,
                    crop_areas: dict[str, float],
                    yield_index: dict[str, float],
                    unmet_fraction: float = 0.0) -> dict[str, float]:
    """Annual production (tonne) per crop; deficit irrigation scales yield
    down in proportion to the district's unmet irrigation fraction."""
    factor = max(0.0, 1.0 - unmet_fraction)
    out = {}
    for crop, area_ha in crop_areas.items():
        base = dataset.crop(crop).base_yield_t_per_ha
        out[crop] = area_ha * base * yield_index.get(crop, 1.0) * factor
    return out


@dataclass
class AllocationMatrix:
    """Per-month source x demand deliveries (m3) plus unmet demand."""

    sources: list[str]
    demands: list[str]
    delivered: np.ndarray   # (S, D)
    demand: np.ndarray      # (D,)
    unmet: np.ndarray       # (D,)

    def delivered_to(self, demand_id: str) -> float:
        return float(self.delivered[:, self.demands.index(demand_id)].sum())

    def delivered_from(self, source_id: str) -> float:
        return float(self.delivered[self.sources.index(source_id), :].sum())

    def get(self, source_id: str, demand_id: str) -> float:
        return float(self.delivered[self.sources.index(source_id),
                                    self.demands.index(demand_id)])

    def total_delivered(self) -> float:
        return float(self.delivered.sum())

    def to_dict(self) -> dict:
        return {
            "sources": self.sources,
            "demands": self.demands,
            "delivered": self.delivered.tolist(),
            "demand": self.demand.tolist(),
            "unmet": self.unmet.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AllocationMatrix":
        return cls(list(d["sources"]), list(d["demands"]),
                   np.array(d["delivered"]), np.array(d["demand"]),
                   np.array(d["unmet"]))


def allocate_water(network: WaterNetwork, demands: dict[str, float],
                   availability: dict[str, float]) -> AllocationMatrix:
    """Allocate sources to demands for one month.

    ``availability`` maps non-residual source ids to their monthly supply;
    the residual source draws on its optional cap or is unlimited.
    Demands are served in ascending priority number; within a demand,
    sources are drawn in its preference order; equal-priority demands
    requesting the same constrained source at the same preference depth
    split it in proportion to their outstanding demand.
    """
    source_ids = [s.id for s in network.sources]
    demand_ids = [d.id for d in network.demands]
    S, D = len(source_ids), len(demand_ids)
    sidx = {s: i for i, s in enumerate(source_ids)}

    avail = np.zeros(S)
    for s in network.sources:
        if s.residual:
            avail[sidx[s.id]] = s.monthly_cap_m3 if s.monthly_cap_m3 is not None else math.inf
        else:
            avail[sidx[s.id]] = availability[s.id]
            if avail[sidx[s.id]] < 0:
                raise WaterError(f"negative availability for source {s.id!r}")

    want = np.array([max(0.0, float(demands.get(d, 0.0))) for d in demand_ids])
    if not np.all(np.isfinite(want)):
        raise WaterError("non-finite demand")
    delivered = np.zeros((S, D))
    remaining = want.copy()

    for priority in sorted({d.priority for d in network.demands}):
        members = [i for i, d in enumerate(network.demands) if d.priority == priority]
        max_depth = max((len(network.demands[i].preferences) for i in members), default=0)
        for depth in range(max_depth):
            requests: dict[int, list[int]] = {}
            for i in members:
                prefs = network.demands[i].preferences
                if remaining[i] > 0 and depth < len(prefs):
                    requests.setdefault(sidx[prefs[depth]], []).append(i)
            for si, takers in requests.items():
                total_req = sum(remaining[i] for i in takers)
                if total_req <= 0 or avail[si] <= 0:
                    continue
                ratio = 1.0 if avail[si] >= total_req else avail[si] / total_req
                granted = 0.0
                for i in takers:
                    give = remaining[i] * ratio
                    delivered[si, i] += give
                    remaining[i] -= give
                    granted += give
                avail[si] -= granted
                if avail[si] < 0:  # guard against rounding drift
                    avail[si] = 0.0

    unmet = np.maximum(remaining, 0.0)
    return AllocationMatrix(source_ids, demand_ids, delivered, want, unmet)
