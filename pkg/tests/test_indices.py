import csv
import math

import numpy as np
import pytest

from fewsim import indices
from fewsim.coupling import ScenarioResult
from fewsim.indices import (INDEX_NAMES, compute_indices, export_indices_csv,
                            index_deltas)
from fewsim.series import MonthlySeries


def _fixture_result(delivered, generation, plant_ids, name="fix",
                    net_GWh=None, emissions_t=None):
    """One-year result with hand-chosen allocation and dispatch tables."""
    sources = ["cap", "srp", "groundwater", "wwtp"]
    demands = ["municipal", "industrial", "d1", "d2"]
    M = 12
    delivered = np.asarray(delivered, dtype=float)
    generation = np.asarray(generation, dtype=float)
    served = delivered.sum(axis=1)
    net = np.full(M, 100.0) if net_GWh is None else np.asarray(net_GWh, float)
    em = np.zeros(M) if emissions_t is None else np.asarray(emissions_t, float)
    series = {
        "energy/demand": MonthlySeries(2022, 1, net, "GWh_per_month"),
        "energy/emissions": MonthlySeries(2022, 1, em, "tonne"),
    }
    return ScenarioResult(
        scenario_name=name, climate="ssp245", deltas={}, warning=False,
        iteration_counts=[1] * M, max_link_residual=0.0, series=series,
        series_kind={k: "flow" for k in series},
        alloc_sources=sources, alloc_demands=demands,
        delivered=delivered, water_demand=served, unmet=np.zeros_like(served),
        plant_ids=plant_ids, generation=generation,
        plant_emissions=np.zeros_like(generation), unserved=np.zeros(M),
        reserve_ok=np.ones(M, dtype=bool), district_ids=["d1", "d2"],
        crop_names=["c"], crop_areas=np.ones((1, 2, 1)),
        production=np.ones((1, 2, 1)))


def _delivered(entries):
    """entries: (source_idx, demand_idx, m3) applied to every month."""
    d = np.zeros((12, 4, 4))
    for si, di, v in entries:
        d[:, si, di] = v
    return d


def test_hand_built_water_ratios(dataset):
    # cap 60 to municipal, groundwater 40 to district d1
    delivered = _delivered([(0, 0, 60.0), (2, 2, 40.0)])
    gen = np.zeros((12, 1))
    r = _fixture_result(delivered, gen, ["solar_agua"])
    v = compute_indices(r, dataset, 2022)
    assert v.regional_gw_reliance == pytest.approx(0.4)
    assert v.ag_gw_reliance == pytest.approx(1.0)
    assert v.mi_surface_reliance == pytest.approx(1.0)
    assert v.ag_water_impact == pytest.approx(0.4)
    assert v.district_gw_reliance == pytest.approx(1.0)
    assert v.district_surface_reliance == pytest.approx(0.0)


def test_all_renewable_generation_scores_one(dataset):
    delivered = _delivered([(0, 0, 60.0), (2, 2, 40.0)])
    gen = np.full((12, 2), 50.0)
    r = _fixture_result(delivered, gen, ["solar_agua", "wind_dry_lake"])
    v = compute_indices(r, dataset, 2022)
    assert v.renewable_share == pytest.approx(1.0)
    assert v.import_dependence == pytest.approx(0.0)


def test_import_dependence_counts_out_of_area(dataset):
    delivered = _delivered([(0, 0, 60.0)])
    gen = np.column_stack([np.full(12, 30.0), np.full(12, 10.0)])
    r = _fixture_result(delivered, gen, ["gas_cc_west", "gas_out_sw"])
    v = compute_indices(r, dataset, 2022)
    assert v.import_dependence == pytest.approx(0.25)
    assert v.renewable_share == pytest.approx(0.0)


def test_zero_denominators_are_flagged_nan(dataset):
    # no agricultural deliveries and no generation at all
    delivered = _delivered([(0, 0, 60.0)])
    gen = np.zeros((12, 1))
    r = _fixture_result(delivered, gen, ["solar_agua"])
    v = compute_indices(r, dataset, 2022)
    flags = v.flagged()
    assert flags["ag_gw_reliance"]
    assert flags["district_gw_reliance"]
    assert flags["renewable_share"]
    assert flags["import_dependence"]
    assert flags["ag_emission_share"]
    assert not flags["regional_gw_reliance"]


def test_year_outside_results_rejected(dataset):
    r = _fixture_result(_delivered([(0, 0, 1.0)]), np.zeros((12, 1)), ["solar_agua"])
    with pytest.raises(indices.IndexError_):
        compute_indices(r, dataset, 2030)


def test_regional_reliance_decomposes_over_demands(dataset, rng):
    # sum over demand categories of (category share x category gw share)
    # reconstructs the regional ratio
    delivered = rng.uniform(0, 100, (12, 4, 4))
    r = _fixture_result(delivered, np.full((12, 1), 10.0), ["solar_agua"])
    v = compute_indices(r, dataset, 2022)
    total = delivered.sum()
    acc = 0.0
    for di in range(4):
        cat = delivered[:, :, di].sum()
        acc += (cat / total) * (delivered[:, 2, di].sum() / cat)
    assert abs(v.regional_gw_reliance - acc) < 1e-9


def test_base_run_indices_in_unit_interval(dataset, base_result):
    for year in (2022, 2030, 2040, 2050):
        v = compute_indices(base_result, dataset, year)
        for name, value in v.values().items():
            if not math.isnan(value):
                assert -1e-12 <= value <= 1.0 + 1e-12, (name, year, value)
        # the bundled system always has some thermal generation
        assert 0.0 < v.renewable_share < 1.0
        assert 0.0 < v.import_dependence < 1.0


def test_index_deltas_zero_against_self(dataset, base_result):
    v = compute_indices(base_result, dataset, 2030)
    d = index_deltas(v, v)
    for name in INDEX_NAMES:
        assert d[name] == 0.0 or math.isnan(d[name])
    with pytest.raises(indices.IndexError_):
        other = compute_indices(base_result, dataset, 2031)
        index_deltas(other, v)


def test_index_deltas_proportional(dataset):
    a = _fixture_result(_delivered([(0, 0, 60.0), (2, 2, 40.0)]),
                        np.full((12, 1), 10.0), ["solar_agua"], name="a")
    b = _fixture_result(_delivered([(0, 0, 80.0), (2, 2, 20.0)]),
                        np.full((12, 1), 10.0), ["solar_agua"], name="b")
    va = compute_indices(a, dataset, 2022)
    vb = compute_indices(b, dataset, 2022)
    d = index_deltas(vb, va)
    assert d["regional_gw_reliance"] == pytest.approx((0.2 - 0.4) / 0.4)


def test_export_indices_csv(dataset, base_result, tmp_path):
    vectors = [compute_indices(base_result, dataset, y) for y in (2030, 2050)]
    out = tmp_path / "indices.csv"
    export_indices_csv(vectors, out)
    rows = list(csv.DictReader(open(out)))
    assert len(rows) == 2 * len(INDEX_NAMES)
    for row in rows:
        if row["flagged"] == "1":
            assert row["value"] == ""
        else:
            assert 0.0 <= float(row["value"]) <= 1.0
