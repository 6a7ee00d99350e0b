#!/usr/bin/env python3
"""Writes the bundled mini-WDI fixture (synthetic values in WDI layout).

    python3 tools/make_fixtures.py [outdir]

Output is fully determined by the seed below.
"""
import csv
import sys
from pathlib import Path

import numpy as np

SEED = 20240611
YEARS = list(range(1960, 2021))

ECONOMIES = [
    ("Albania", "ALB"), ("Angola", "AGO"), ("Argentina", "ARG"), ("Bangladesh", "BGD"),
    ("Benin", "BEN"), ("Bolivia", "BOL"), ("Botswana", "BWA"), ("Brazil", "BRA"),
    ("Cambodia", "KHM"), ("Cameroon", "CMR"), ("Chile", "CHL"), ("Colombia", "COL"),
    ("Cote d'Ivoire", "CIV"), ("Ecuador", "ECU"), ("Egypt, Arab Rep.", "EGY"), ("Ethiopia", "ETH"),
    ("Ghana", "GHA"), ("Guatemala", "GTM"), ("Honduras", "HND"), ("India", "IND"),
    ("Indonesia", "IDN"), ("Kenya", "KEN"), ("Lao PDR", "LAO"), ("Madagascar", "MDG"),
    ("Malawi", "MWI"), ("Mexico", "MEX"), ("Mongolia", "MNG"), ("Morocco", "MAR"),
    ("Mozambique", "MOZ"), ("Nepal", "NPL"), ("Nicaragua", "NIC"), ("Nigeria", "NGA"),
    ("Pakistan", "PAK"), ("Peru", "PER"), ("Philippines", "PHL"), ("Senegal", "SEN"),
    ("Tanzania", "TZA"), ("Thailand", "THA"), ("Uganda", "UGA"), ("Vietnam", "VNM"),
]

INDICATORS = [
    ("GDP per capita (constant 2015 US$)", "NY.GDP.PCAP.KD"),
    ("Urban population (% of total population)", "SP.URB.TOTL.IN.ZS"),
    ("Population in the largest city (% of urban population)", "EN.URB.LCTY.UR.ZS"),
    ("Access to clean fuels and technologies for cooking, urban (% of urban population)", "EG.CFT.ACCS.UR.ZS"),
    ("Access to clean fuels and technologies for cooking, rural (% of rural population)", "EG.CFT.ACCS.RU.ZS"),
    ("Access to electricity (% of population)", "EG.ELC.ACCS.ZS"),
    ("Life expectancy at birth, total (years)", "SP.DYN.LE00.IN"),
    ("Population growth (annual %)", "SP.POP.GROW"),
    ("Forest area (% of land area)", "AG.LND.FRST.ZS"),
    ("Agriculture, forestry, and fishing, value added (% of GDP)", "NV.AGR.TOTL.ZS"),
    ("Unemployment, total (% of total labor force)", "SL.UEM.TOTL.ZS"),
    ("Renewable energy consumption (% of total final energy consumption)", "EG.FEC.RNEW.ZS"),
]


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def simulate(rng):
    e, t = len(ECONOMIES), len(YEARS)
    yr = (np.array(YEARS) - 1990) / 30.0
    base = rng.uniform(6.0, 9.5, size=(e, 1))
    growth = rng.uniform(0.2, 1.2, size=(e, 1))
    log_gdp = base + growth * yr + 0.05 * rng.standard_normal((e, t))

    z = (log_gdp - 7.8) / 0.8
    urban = 100 * sigmoid(0.9 * z + 0.4 * rng.standard_normal((e, 1)) + 0.15 * rng.standard_normal((e, t)))
    largest_city = np.clip(urban * 0.9 + 2.0 + 0.3 * rng.standard_normal((e, t)), 0, 100)
    cft_urban = 100 * sigmoid(1.6 * z + 0.8 + 0.35 * rng.standard_normal((e, t)))
    cft_rural = 100 * sigmoid(1.6 * z - 1.2 + 0.35 * rng.standard_normal((e, t)))
    electricity = 100 * sigmoid(1.2 * z + 1.0 + 0.4 * rng.standard_normal((e, t)))
    life = 50 + 0.15 * cft_rural + 0.05 * electricity + 1.5 * rng.standard_normal((e, t))
    pop_growth = rng.uniform(0.5, 3.5, size=(e, 1)) - 0.6 * yr + 0.3 * rng.standard_normal((e, t))
    forest = np.clip(rng.uniform(5, 70, size=(e, 1)) - 4 * yr + 1.0 * rng.standard_normal((e, t)), 0, 100)
    agri = np.clip(45 * np.exp(-0.35 * (log_gdp - 6.0)) + 1.5 * rng.standard_normal((e, t)), 0.5, 100)
    unemployment = np.clip(rng.uniform(2, 15, size=(e, 1)) + 1.2 * rng.standard_normal((e, t)), 0.1, 100)
    renewables = np.clip(90 - 0.5 * electricity - 0.2 * cft_urban + 4 * rng.standard_normal((e, t)), 0, 100)

    # Per-capita emissions driven by the two clean-cooking series and urbanization.
    u_r, u_u, u_p = cft_rural / 100, cft_urban / 100, urban / 100
    co2 = (0.4 + 2.2 * u_r ** 2 + 1.6 * np.tanh(2.5 * u_u) + 1.8 * np.sin(2.0 * u_p)
           + 0.25 * rng.standard_normal((e, t)))
    co2 = np.clip(co2, 0.05, None)

    values = [np.exp(log_gdp), urban, largest_city, cft_urban, cft_rural, electricity, life,
              pop_growth, forest, agri, unemployment, renewables]
    return values, co2


def with_missingness(rng, values):
    out = []
    years = np.array(YEARS)
    for k, v in enumerate(values):
        v = v.copy()
        early = years < 2000
        mask = np.zeros_like(v, dtype=bool)
        mask[:, early] = rng.uniform(size=(v.shape[0], early.sum())) < 0.6
        mask[:, ~early] = rng.uniform(size=(v.shape[0], (~early).sum())) < 0.04
        if INDICATORS[k][1] == "SL.UEM.TOTL.ZS":
            # Sparse survey-based series: exceeds the missingness cap.
            mask[:, ~early] |= rng.uniform(size=(v.shape[0], (~early).sum())) < 0.6
        v[mask] = np.nan
        out.append(v)
    return out


def fmt(x):
    return "" if np.isnan(x) else f"{x:.6g}"


def main():
    outdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "fixtures"
    outdir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    values, co2 = simulate(rng)
    values = with_missingness(rng, values)

    with open(outdir / "mini_wdi.csv", "w", newline="") as f:
        f.write('"Data Source","Synthetic fixture in World Development Indicators layout (not World Bank data)",\n')
        f.write('"Last Updated Date","2024-06-11",\n')
        w = csv.writer(f, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        w.writerow(["Country Name", "Country Code", "Indicator Name", "Indicator Code"] + [str(y) for y in YEARS])
        for ei, (name, code) in enumerate(ECONOMIES):
            for k, (iname, icode) in enumerate(INDICATORS):
                w.writerow([name, code, iname, icode] + [fmt(x) for x in values[k][ei]])

    with open(outdir / "emissions.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["code", "year", "value"])
        for ei, (_, code) in enumerate(ECONOMIES):
            for ti, year in enumerate(YEARS):
                if 2000 <= year <= 2020:
                    w.writerow([code, year, f"{co2[ei, ti]:.6g}"])


if __name__ == "__main__":
    main()
