"""Deterministic generator for the bundled synthetic study-area dataset.

The numbers here are plausible magnitudes for a hot semi-arid metro
region, not calibrated values; the structure (4 supply sources, 12
irrigation districts, 6 crops, mixed in/out-of-area plant fleet) is what
matters. Regenerating with the same seed reproduces the files byte for
byte.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from . import fmlm as fm
from .branches import BranchNode, BranchTree, VariableDef
from .dataset import (CROPS, CouplingParams, CropDef, District,
                      EnergyDemandStructure, Plant, PlantCatalog,
                      StudyAreaDataset, WaterDemandNode, WaterIntensities,
                      WaterNetwork, WaterSource, bundled_dataset_path,
                      serialize_manifest)
from .series import Horizon, MonthlySeries

SEED = 20240501

HORIZON = Horizon(2022, 1, 2050, 12)
HISTORY = Horizon(1990, 1, 2021, 12)

# monthly climatology: mean temperature (C) and precipitation (mm)
TMEAN_CLIM = (12.0, 14.0, 17.5, 21.5, 26.5, 31.5, 34.5, 33.5, 30.0, 23.5, 16.5, 11.5)
PRECIP_CLIM = (22.0, 20.0, 25.0, 7.0, 3.0, 2.0, 25.0, 30.0, 15.0, 14.0, 15.0, 22.0)

WARMING_PER_YEAR = {"ssp245": 0.020, "ssp585": 0.045}
DRYING_PER_YEAR = {"ssp245": 0.000, "ssp585": 0.003}  # fractional precip loss

POP_2022 = 4.8e6
POP_GROWTH = 1.013

CROP_DEFS = [
    CropDef("alfalfa_hay", [0.60, 0.75, 0.90, 1.00, 1.05, 1.05, 1.00, 1.00, 0.95, 0.85, 0.70, 0.60], 20.0),
    CropDef("barley", [0.90, 1.05, 1.10, 0.80, 0.30, 0.10, 0.10, 0.10, 0.10, 0.25, 0.55, 0.80], 5.0),
    CropDef("upland_cotton", [0.10, 0.10, 0.20, 0.45, 0.80, 1.10, 1.20, 1.15, 0.90, 0.55, 0.20, 0.10], 1.5),
    CropDef("corn", [0.15, 0.20, 0.45, 0.80, 1.10, 1.15, 1.05, 0.70, 0.35, 0.20, 0.15, 0.15], 10.0),
    CropDef("spring_durum_wheat", [0.70, 0.95, 1.10, 1.05, 0.60, 0.20, 0.10, 0.10, 0.10, 0.15, 0.35, 0.55], 6.0),
    CropDef("vegetables", [1.00, 1.00, 0.90, 0.70, 0.45, 0.25, 0.25, 0.35, 0.60, 0.85, 1.00, 1.05], 30.0),
]

_NON_COTTON = [c for c in CROPS if c != "upland_cotton"]

DISTRICTS = [
    District("roosevelt", "Roosevelt Irrigation District", 5200.0, 0.80, list(_NON_COTTON)),
    District("new_magma", "New Magma Irrigation District", 3100.0, 0.75, list(CROPS),
             exclusive_crops=["upland_cotton"]),
    District("salt_river_valley", "Salt River Valley WUA", 3400.0, 0.80, list(_NON_COTTON)),
    District("buckeye", "Buckeye Water District", 2600.0, 0.72, list(_NON_COTTON)),
    District("arlington", "Arlington Canal District", 1500.0, 0.70, list(_NON_COTTON)),
    District("adaman", "Adaman Mutual Water District", 1100.0, 0.74, list(_NON_COTTON)),
    District("queen_creek", "Queen Creek Irrigation District", 2300.0, 0.78, list(_NON_COTTON)),
    District("chandler_heights", "Chandler Heights Citrus District", 900.0, 0.76, list(_NON_COTTON)),
    District("maricopa_garden", "Maricopa Garden Farms District", 1300.0, 0.73, list(_NON_COTTON)),
    District("peninsula", "Peninsula Horowitz District", 800.0, 0.71, list(_NON_COTTON)),
    District("st_johns", "St. Johns Irrigation District", 1200.0, 0.75, list(_NON_COTTON)),
    District("tonopah", "Tonopah Irrigation District", 1700.0, 0.70, list(_NON_COTTON)),
]

# surface districts prefer SRP or CAP first; the rest pump groundwater only
_DISTRICT_PREFS = {
    "roosevelt": ["srp", "groundwater"],
    "new_magma": ["cap", "groundwater"],
    "salt_river_valley": ["srp", "groundwater"],
    "buckeye": ["groundwater"],
    "arlington": ["groundwater"],
    "adaman": ["groundwater"],
    "queen_creek": ["cap", "groundwater"],
    "chandler_heights": ["groundwater"],
    "maricopa_garden": ["groundwater"],
    "peninsula": ["groundwater"],
    "st_johns": ["srp", "groundwater"],
    "tonopah": ["groundwater"],
}

PLANTS = [
    Plant("solar_agua", "Agua Caliente Solar", True, "solar", 650.0, 1, 0.0, 100.0),
    Plant("wind_dry_lake", "Dry Lake Wind", True, "wind", 300.0, 2, 0.0, 10.0),
    Plant("hydro_srp", "SRP Hydro Stations", True, "hydro", 250.0, 3, 0.0, 0.0),
    Plant("nuclear_pv", "Palo Verde Nuclear", True, "uranium", 3900.0, 4, 0.0, 2700.0),
    Plant("gas_cc_west", "West Valley Combined Cycle", True, "natural_gas", 1100.0, 5, 450.0, 950.0),
    Plant("gas_cc_east", "East Valley Combined Cycle", True, "natural_gas", 900.0, 6, 450.0, 950.0),
    Plant("gas_out_sw", "Southwest Gas Import", False, "natural_gas", 900.0, 7, 470.0, 0.0),
    Plant("gas_peak_north", "North Peaker", True, "natural_gas", 500.0, 8, 560.0, 1100.0),
    Plant("coal_cholla", "Cholla-style Coal", True, "coal", 800.0, 9, 1000.0, 2000.0),
    Plant("gas_peak_south", "South Peaker", True, "natural_gas", 400.0, 10, 560.0, 1100.0),
    Plant("coal_out_ne", "Northeast Coal Import", False, "coal", 1000.0, 11, 1050.0, 0.0),
    Plant("solar_out", "Desert Solar Import", False, "solar", 500.0, 12, 0.0, 0.0),
    Plant("gas_out_ca", "California Gas Import", False, "natural_gas", 700.0, 13, 470.0, 0.0),
    Plant("wind_out_nm", "New Mexico Wind Import", False, "wind", 400.0, 14, 0.0, 0.0),
    Plant("coal_out_far", "Far Coal Import", False, "coal", 800.0, 15, 1050.0, 0.0),
]

ENERGY_DEMAND = EnergyDemandStructure(
    residential_kWh_pc=400.0,
    commercial_kWh_pc=320.0,
    industrial_kWh_pc=280.0,
    water_kWh_per_m3={"cap": 3.0, "srp": 0.2, "groundwater": 1.5, "wwtp": 1.8},
)

WATER_INTENSITIES = WaterIntensities(
    municipal_m3_pc=9.0,
    industrial_m3_pc=1.2,
    native_american_m3_pc=0.5,
)

SRP_PATTERN = (0.80, 0.80, 0.90, 1.00, 1.15, 1.25, 1.30, 1.25, 1.10, 0.95, 0.85, 0.80)
SRP_BASE_M3 = 45e6
CAP_M3 = 18e6
WWTP_M3 = 10e6

# "true" crop-share coefficients used to generate the historical panel;
# corn is the base category
TRUE_INTERCEPTS = {
    "alfalfa_hay": 1.15,
    "barley": -0.25,
    "upland_cotton": -0.45,
    "spring_durum_wheat": -0.30,
    "vegetables": 1.00,
}
OWN_PRICE_BETA = 0.8
OWN_YIELD_BETA = 0.5


def _population(year: int, month: int) -> float:
    frac = (year + (month - 1) / 12.0) - 2022.0
    return POP_2022 * POP_GROWTH ** frac


def _climate_rows(name: str, rng: np.random.Generator) -> list[dict]:
    rows = []
    warm = WARMING_PER_YEAR[name]
    dry = DRYING_PER_YEAR[name]
    n_years = HORIZON.end_year - HISTORY.start_year + 1
    # per-crop smooth index paths over the full 1990-2050 span
    years = np.arange(HISTORY.start_year, HORIZON.end_year + 1)
    t = years - 2022
    price_paths = {}
    yield_paths = {}
    trends = {"alfalfa_hay": (0.002, 0.003), "barley": (0.001, 0.004),
              "upland_cotton": (-0.002, -0.004), "corn": (0.001, 0.004),
              "spring_durum_wheat": (0.000, 0.002), "vegetables": (0.003, 0.002)}
    for crop in CROPS:
        ptrend, ytrend = trends[crop]
        pnoise = rng.normal(0.0, 0.015, n_years)
        ynoise = rng.normal(0.0, 0.010, n_years)
        price_paths[crop] = 1.0 + ptrend * t + np.cumsum(pnoise) * 0.1
        yield_paths[crop] = np.maximum(0.2, 1.0 + ytrend * t + np.cumsum(ynoise) * 0.1)
    for yi, year in enumerate(years):
        for month in range(1, 13):
            tm = (TMEAN_CLIM[month - 1] + warm * (year - 1990)
                  + rng.normal(0.0, 0.4))
            pr = max(0.0, PRECIP_CLIM[month - 1]
                     * (1.0 - dry * max(0, year - 2022))
                     * rng.lognormal(0.0, 0.25))
            row = {
                "year": year, "month": month,
                "tmean_C": round(tm, 3),
                "precip_mm": round(pr, 3),
                "population": round(_population(year, month), 1),
            }
            for crop in CROPS:
                row[f"price_{crop}"] = round(float(price_paths[crop][yi]), 4)
                row[f"yield_{crop}"] = round(float(yield_paths[crop][yi]), 4)
            rows.append(row)
    return rows


def _build_tree() -> BranchTree:
    nodes: list[BranchNode] = []

    def add(id_, sector, label, children=(), variables=()):
        nodes.append(BranchNode(id_, sector, label, list(children), list(variables)))

    district_ids = [d.id for d in DISTRICTS]
    add("water", "water", "Water", ["water/supply", "water/demand"])
    add("water/supply", "water", "Water Supply",
        [f"water/supply/{s}" for s in ("cap", "srp", "groundwater", "wwtp")])
    add("water/supply/cap", "water", "CAP Aqueduct")
    add("water/supply/srp", "water", "SRP Reservoir System")
    add("water/supply/groundwater", "water", "Groundwater")
    add("water/supply/wwtp", "water", "Reclaimed (WWTP)")
    add("water/demand", "water", "Water Demand",
        ["water/demand/municipal", "water/demand/industrial",
         "water/demand/native_american", "water/demand/power_plants",
         "water/demand/agriculture"])
    add("water/demand/municipal", "water", "Municipal",
        variables=[
            VariableDef("municipal_wue", "percent", "intensity", 0.0, adjustable=True),
            VariableDef("municipal_water_intensity", "dimensionless", "intensity",
                        WATER_INTENSITIES.municipal_m3_pc),
        ])
    add("water/demand/industrial", "water", "Industrial",
        variables=[VariableDef("industrial_water_intensity", "dimensionless",
                               "intensity", WATER_INTENSITIES.industrial_m3_pc)])
    add("water/demand/native_american", "water", "Native American",
        variables=[VariableDef("native_american_water_intensity", "dimensionless",
                               "intensity", WATER_INTENSITIES.native_american_m3_pc)])
    add("water/demand/power_plants", "water", "Power Plants")
    add("water/demand/agriculture", "water", "Agriculture",
        [f"water/demand/agriculture/{d}" for d in district_ids],
        variables=[VariableDef("irrigation_ie", "percent", "intensity", 0.0,
                               adjustable=True)])
    for d in DISTRICTS:
        add(f"water/demand/agriculture/{d.id}", "water", d.label)

    plant_ids = [p.id for p in PLANTS]
    add("energy", "energy", "Energy", ["energy/demand", "energy/supply", "energy/emissions"])
    add("energy/demand", "energy", "Energy Demand",
        ["energy/demand/residential", "energy/demand/commercial",
         "energy/demand/industrial", "energy/demand/water_infrastructure"])
    add("energy/demand/residential", "energy", "Residential",
        variables=[
            VariableDef("household_eue", "percent", "intensity", 0.0, adjustable=True),
            VariableDef("residential_energy_intensity", "dimensionless", "intensity",
                        ENERGY_DEMAND.residential_kWh_pc),
        ])
    add("energy/demand/commercial", "energy", "Commercial",
        variables=[VariableDef("commercial_energy_intensity", "dimensionless",
                               "intensity", ENERGY_DEMAND.commercial_kWh_pc)])
    add("energy/demand/industrial", "energy", "Industrial",
        variables=[VariableDef("industrial_energy_intensity", "dimensionless",
                               "intensity", ENERGY_DEMAND.industrial_kWh_pc)])
    add("energy/demand/water_infrastructure", "energy", "Water Infrastructure")
    add("energy/supply", "energy", "Generation",
        [f"energy/supply/{p}" for p in plant_ids])
    for p in PLANTS:
        add(f"energy/supply/{p.id}", "energy", p.label)
    add("energy/emissions", "energy", "Emissions")

    add("food", "food", "Food", ["food/districts", "food/crops", "food/production"])
    add("food/districts", "food", "Irrigation Districts",
        [f"food/districts/{d}" for d in district_ids])
    for d in DISTRICTS:
        add(f"food/districts/{d.id}", "food", d.label)
    add("food/crops", "food", "Crops", [f"food/crops/{c}" for c in CROPS])
    for c in CROPS:
        add(f"food/crops/{c}", "food", c.replace("_", " ").title())
    add("food/production", "food", "Total Production")
    return BranchTree(nodes)


def _water_network() -> WaterNetwork:
    months = HORIZON.n_months
    pattern = np.tile(SRP_PATTERN, months // 12 + 1)[:months]
    srp = MonthlySeries(HORIZON.start_year, 1, SRP_BASE_M3 * pattern, "m3_per_month")
    cap = MonthlySeries.constant(CAP_M3, HORIZON, "m3_per_month")
    wwtp = MonthlySeries.constant(WWTP_M3, HORIZON, "m3_per_month")
    sources = [
        WaterSource("cap", "CAP Aqueduct", availability=cap),
        WaterSource("srp", "SRP Reservoir System", availability=srp),
        WaterSource("groundwater", "Groundwater", residual=True),
        WaterSource("wwtp", "Reclaimed (WWTP)", availability=wwtp),
    ]
    demands = [
        WaterDemandNode("municipal", "municipal", 1, ["srp", "cap", "wwtp", "groundwater"]),
        WaterDemandNode("native_american", "native_american", 1, ["cap", "groundwater"]),
        WaterDemandNode("power_plants", "power", 2, ["wwtp"]),
        WaterDemandNode("industrial", "industrial", 2, ["cap", "wwtp", "groundwater"]),
    ]
    for d in DISTRICTS:
        demands.append(WaterDemandNode(d.id, "agricultural", 3, _DISTRICT_PREFS[d.id]))
    return WaterNetwork(sources, demands)


def _true_betas(crops: list[str], predictors: list[str]) -> np.ndarray:
    betas = np.zeros((len(crops) - 1, len(predictors)))
    pidx = {p: k for k, p in enumerate(predictors)}
    for j, crop in enumerate(crops[1:]):
        betas[j, pidx["intercept"]] = TRUE_INTERCEPTS[crop]
        betas[j, pidx[f"price_lag_{crop}"]] = OWN_PRICE_BETA
        betas[j, pidx[f"yield_lag_{crop}"]] = OWN_YIELD_BETA
    return betas


def _historical_panel(ds: StudyAreaDataset, rng: np.random.Generator,
                      crops_ordered: list[str], predictors: list[str]) -> fm.SharePanel:
    betas = _true_betas(crops_ordered, predictors)
    coefs = fm.FmlmCoefficients(crops_ordered, predictors, betas)
    climate = ds.climate_files["ssp245"]
    districts, years, X, Y = [], [], [], []
    for year in range(HISTORY.start_year + 1, HISTORY.end_year + 1):
        x = fm.build_predictors(climate, ds.crop_names(), year, ds.horizon)
        p = fm.fmlm_predict(coefs, x)
        for d in ds.districts:
            noisy = np.maximum(1e-6, p + rng.normal(0.0, 0.01, len(p)))
            noisy /= noisy.sum()
            districts.append(d.id)
            years.append(year)
            X.append(x)
            Y.append(noisy)
    return fm.SharePanel(districts, years, np.array(X), np.array(Y))


def generate(out_dir: str | Path | None = None, fit_iterations: int = 1500) -> Path:
    """Write the full dataset; returns the output directory."""
    out = Path(out_dir) if out_dir is not None else bundled_dataset_path()
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)

    climate_rows = {name: _climate_rows(name, rng) for name in ("ssp245", "ssp585")}
    for name, rows in climate_rows.items():
        with open(out / f"climate_{name}.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
            w.writeheader()
            w.writerows(rows)

    ds = StudyAreaDataset(
        name="studyarea-synthetic",
        horizon=HORIZON,
        tree=_build_tree(),
        climate_files=dict.fromkeys(climate_rows),  # names only; parsed on load
        crops=[CropDef(c.name, list(c.kc), c.base_yield_t_per_ha) for c in CROP_DEFS],
        districts=[District(d.id, d.label, d.cropland_ha, d.base_efficiency,
                            list(d.allowed_crops), list(d.exclusive_crops))
                   for d in DISTRICTS],
        water=_water_network(),
        plants=PlantCatalog(list(PLANTS)),
        energy=ENERGY_DEMAND,
        water_intensities=WATER_INTENSITIES,
        coupling=CouplingParams(),
        fmlm_coefficients_file="fmlm_coefficients.csv",
        fmlm_panel_file="fmlm_panel.csv",
        fmlm_base_crop="corn",
        path=out,
    )
    with open(out / "manifest.json", "w") as fh:
        json.dump(serialize_manifest(ds), fh, indent=1, sort_keys=True)

    # reload so climate is parsed exactly as consumers will see it
    from .dataset import load_dataset
    ds = load_dataset(out)

    crops_ordered = ["corn"] + [c for c in ds.crop_names() if c != "corn"]
    predictors = fm.predictor_names(ds.crop_names())
    panel = _historical_panel(ds, rng, crops_ordered, predictors)
    fm.save_panel(panel, crops_ordered, predictors, out / "fmlm_panel.csv")
    fit = fm.fmlm_fit(panel, crops_ordered, predictors, max_iter=fit_iterations)
    fm.save_coefficients(fit.coefficients, out / "fmlm_coefficients.csv")
    return out


if __name__ == "__main__":
    path = generate()
    print(f"dataset written to {path}")
