"""Regenerates the synthetic sample panel (panel.csv).

Five countries, 1990-2020, monetary values in billions of current US$.
Each country exercises a different deduction source:

    CHN  every secondary component (rollup for RDM, EPCL, EPDL)
    USA  GNI and depletion share only (delta_gni RDM, bridged EPCL/EPDL)
    IND  RDM components rolled up, EPCL/EPDL measured
    ESP  RDM, EPCL, EPDL measured
    DEU  depletion share for RDM, EPCL/EPDL components rolled up
"""
import csv
import math
import random

YEARS = range(1990, 2021)
rng = random.Random(20200101)

GDP_PATH = {
    "CHN": (361.0, 14688.0),
    "USA": (5963.0, 20937.0),
    "IND": (321.0, 2668.0),
    "ESP": (535.0, 1281.0),
    "DEU": (1772.0, 3889.0),
}
CPI_BASE = {"CHN": 35.0, "USA": 52.0, "IND": 18.0, "ESP": 48.0, "DEU": 60.0}
CPI_RATE = {"CHN": 0.045, "USA": 0.024, "IND": 0.072, "ESP": 0.028, "DEU": 0.017}
TEMP = {"CHN": 6.9, "USA": 8.6, "IND": 24.1, "ESP": 13.8, "DEU": 8.9}
CO2 = {"CHN": (2173000.0, 10668000.0), "USA": (4844000.0, 4713000.0),
       "IND": (563000.0, 2442000.0), "ESP": (212000.0, 214000.0),
       "DEU": (940000.0, 644000.0)}

RDM_PARTS = {
    "CULTIVATED_LAND_DEPLETION": 0.22,
    "ENERGY_CONSUMPTION_REDUCTION": 0.38,
    "WATER_CONSUMPTION_REDUCTION": 0.12,
    "FRESHWATER_FISHING_DEPLETION": 0.05,
    "LIVE_WOOD_ACCUMULATION": 0.13,
    "ADDITIONAL_FOREST_LAND_VALUE": 0.10,
}
EPCL_PARTS = {"POLLUTION_ACTUAL_GOVERNANCE": 0.7, "POLLUTION_VIRTUAL_GOVERNANCE": 0.3}
EPDL_PARTS = {
    "FIXED_ASSET_ACCELERATED_DEPRECIATION": 0.45,
    "HUMAN_HEALTH_LOSS": 0.4,
    "NATURAL_DISASTER_LOSS": 0.15,
}

rows = []


def emit(country, indicator, unit, values):
    for year, v in zip(YEARS, values):
        rows.append((country, indicator, unit, year, f"{v:.4f}"))


def path(start, end, wobble):
    n = len(YEARS) - 1
    out = []
    for k in range(n + 1):
        base = start * (end / start) ** (k / n)
        out.append(base * (1.0 + rng.uniform(-wobble, wobble)))
    return out


def split(total, shares):
    return {name: [t * w * (1.0 + rng.uniform(-0.05, 0.05)) for t in total] for name, w in shares.items()}


for country, (g0, g1) in GDP_PATH.items():
    gdp = path(g0, g1, 0.02)
    gni = [g * (0.975 + rng.uniform(-0.005, 0.005)) for g in gdp]
    depletion_pct = [max(0.2, 3.5 - 0.06 * k + rng.uniform(-0.3, 0.3)) for k in range(len(gdp))]
    rdm = [g * d / 100.0 for g, d in zip(gni, depletion_pct)]
    epcl = [g * (0.012 + rng.uniform(-0.001, 0.001)) for g in gdp]
    epdl = [g * (0.018 + rng.uniform(-0.002, 0.002)) for g in gdp]

    emit(country, "GDP", "usd_bn", gdp)
    emit(country, "CPI", "index", [CPI_BASE[country] * math.exp(CPI_RATE[country] * k) * (1 + rng.uniform(-0.01, 0.01)) for k in range(len(gdp))])
    emit(country, "SURFACE_TEMP", "celsius", [TEMP[country] + 0.025 * k + rng.uniform(-0.35, 0.35) for k in range(len(gdp))])
    emit(country, "CO2", "kt", path(*CO2[country], 0.03))

    if country == "CHN":
        for name, vals in {**split(rdm, RDM_PARTS), **split(epcl, EPCL_PARTS), **split(epdl, EPDL_PARTS)}.items():
            emit(country, name, "usd_bn", vals)
    elif country == "USA":
        emit(country, "GNI", "usd_bn", gni)
        emit(country, "NRD_PCT_GNI", "percent of GNI", depletion_pct)
    elif country == "IND":
        for name, vals in split(rdm, RDM_PARTS).items():
            emit(country, name, "usd_bn", vals)
        emit(country, "EPCL", "usd_bn", epcl)
        emit(country, "EPDL", "usd_bn", epdl)
    elif country == "ESP":
        emit(country, "RDM", "usd_bn", rdm)
        emit(country, "EPCL", "usd_bn", epcl)
        emit(country, "EPDL", "usd_bn", epdl)
    elif country == "DEU":
        emit(country, "GNI", "usd_bn", gni)
        emit(country, "NRD_PCT_GNI", "percent of GNI", depletion_pct)
        for name, vals in {**split(epcl, EPCL_PARTS), **split(epdl, EPDL_PARTS)}.items():
            emit(country, name, "usd_bn", vals)

with open("panel.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["country", "indicator", "unit", "year", "value"])
    w.writerows(rows)
