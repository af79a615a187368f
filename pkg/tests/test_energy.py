import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fewsim import energy, water
from fewsim.dataset import Plant, PlantCatalog, WaterDemandNode, WaterNetwork, WaterSource


def _plant(pid, rank, cap, fuel="natural_gas", in_area=True, ef=400.0, wf=1000.0):
    if fuel in ("solar", "wind", "hydro"):
        ef = 0.0
    return Plant(pid, pid, in_area, fuel, cap, rank, ef, wf)


@pytest.fixture()
def catalog():
    return PlantCatalog([
        _plant("sun", 1, 200.0, fuel="solar", wf=0.0),
        _plant("gas_a", 2, 500.0),
        _plant("coal", 3, 800.0, fuel="coal", ef=950.0, wf=2300.0),
        _plant("import_gas", 4, 1000.0, in_area=False),
    ])


def test_hours_in_month():
    assert energy.hours_in_month(2022, 1) == 744
    assert energy.hours_in_month(2022, 2) == 672
    assert energy.hours_in_month(2024, 2) == 696  # leap year


def test_sector_demand_scaling(dataset):
    base = energy.sector_demand(dataset, 1e6)
    e = dataset.energy
    assert base.residential_GWh == pytest.approx(e.residential_kWh_pc)
    assert base.commercial_GWh == pytest.approx(e.commercial_kWh_pc)
    eue = energy.sector_demand(dataset, 1e6, eue_delta_pct=20.0)
    assert eue.residential_GWh == pytest.approx(base.residential_GWh * 0.8, rel=1e-12)
    # efficiency program leaves the other sectors alone
    assert eue.commercial_GWh == base.commercial_GWh
    assert eue.industrial_GWh == base.industrial_GWh
    with pytest.raises(energy.EnergyError):
        energy.sector_demand(dataset, 1e6, eue_delta_pct=-150.0)


def test_water_infrastructure_demand_hand_value():
    net = WaterNetwork(
        [WaterSource("cap", "cap"), WaterSource("gw", "gw", residual=True)],
        [WaterDemandNode("d1", "municipal", 1, ["cap", "gw"])])
    alloc = water.allocate_water(net, {"d1": 3e6}, {"cap": 2e6})
    # 2e6 m3 * 3 kWh/m3 + 1e6 m3 * 1.5 kWh/m3 = 7.5 GWh
    got = energy.water_infrastructure_demand(alloc, {"cap": 3.0, "gw": 1.5})
    assert got == pytest.approx(7.5, rel=1e-12)


def test_dispatch_merit_order(catalog):
    # January 2022: 744 h. solar capability 148.8 GWh, gas_a 372 GWh.
    result = energy.dispatch(catalog, net_demand_GWh=380.0, loss_fraction=0.05,
                             reserve_margin=0.15, year=2022, month=1)
    gross = 380.0 / 0.95
    assert result.gross_GWh == pytest.approx(gross)
    assert result.generation_GWh["sun"] == pytest.approx(148.8)
    assert result.generation_GWh["gas_a"] == pytest.approx(gross - 148.8)
    assert result.generation_GWh["coal"] == 0.0
    assert result.unserved_GWh == 0.0


def test_dispatch_unserved_when_capacity_short(catalog):
    big = 4000.0
    result = energy.dispatch(catalog, big, 0.05, 0.15, 2022, 6)
    cap_total = sum(p.capacity_MW for p in catalog.plants)
    capability = cap_total * energy.hours_in_month(2022, 6) / 1000.0
    assert result.total_generation_GWh == pytest.approx(capability)
    assert result.unserved_GWh == pytest.approx(big / 0.95 - capability)


def test_dispatch_reserve_diagnostic(catalog):
    # implied peak = gross*1000/(hours*0.55); 2500 MW of capacity
    ok = energy.dispatch(catalog, 500.0, 0.05, 0.15, 2022, 1)
    assert ok.reserve_ok
    tight = energy.dispatch(catalog, 1000.0, 0.05, 0.15, 2022, 1)
    implied = tight.gross_GWh * 1000.0 / (744 * 0.55)
    assert tight.reserve_ok == (2500.0 >= implied * 1.15)


def test_dispatch_rejects_bad_inputs(catalog):
    with pytest.raises(energy.EnergyError):
        energy.dispatch(catalog, -1.0, 0.05, 0.15, 2022, 1)
    with pytest.raises(energy.EnergyError):
        energy.dispatch(catalog, 1.0, 1.0, 0.15, 2022, 1)


@given(st.floats(0, 5000), st.floats(0, 0.4))
@settings(max_examples=100, deadline=None)
def test_dispatch_energy_balance(demand, loss):
    catalog = PlantCatalog([
        _plant("sun", 1, 200.0, fuel="solar", wf=0.0),
        _plant("gas_a", 2, 500.0),
        _plant("coal", 3, 800.0, fuel="coal"),
    ])
    result = energy.dispatch(catalog, demand, loss, 0.15, 2030, 7)
    assert result.total_generation_GWh + result.unserved_GWh == pytest.approx(
        result.gross_GWh, abs=1e-9 * max(1.0, result.gross_GWh))
    # no plant above capability, merit order monotone
    hours = energy.hours_in_month(2030, 7)
    filled_after_gap = False
    for p in catalog.by_merit():
        gen = result.generation_GWh[p.id]
        assert 0.0 <= gen <= p.capacity_MW * hours / 1000.0 + 1e-9
        if gen > 0:
            assert not filled_after_gap
        if gen < p.capacity_MW * hours / 1000.0 - 1e-9:
            filled_after_gap = True


def test_emissions_per_plant(catalog):
    gen = {"sun": 100.0, "gas_a": 50.0, "coal": 10.0}
    per_plant, total = energy.emissions(gen, catalog)
    assert per_plant["sun"] == 0.0
    assert per_plant["gas_a"] == pytest.approx(50.0 * 400.0)
    assert per_plant["coal"] == pytest.approx(10.0 * 950.0)
    assert total == pytest.approx(sum(per_plant.values()))


def test_renewable_and_import_tallies(catalog):
    gen = {"sun": 100.0, "gas_a": 50.0, "coal": 10.0, "import_gas": 5.0}
    assert energy.renewable_generation(gen, catalog) == pytest.approx(100.0)
    assert energy.imported_generation(gen, catalog) == pytest.approx(5.0)


def test_bundled_catalog_merit_ranks(dataset):
    ranks = [p.merit_rank for p in dataset.plants.by_merit()]
    assert ranks == sorted(ranks)
    assert len(set(ranks)) == len(ranks)
    renewables = [p for p in dataset.plants.plants if p.fuel in ("solar", "wind", "hydro")]
    assert all(p.emission_factor_t_per_GWh == 0.0 for p in renewables)
