#!/usr/bin/env python3
"""Writes the three Sydney preset scenario directories.

Table-level parameters (tax schedule, LVR, mortgage-income regression, rate
ranges, calibrated h) are the published period values. The distributions and
monthly series are synthetic stand-ins shaped like the public ABS / HILDA /
FIRB aggregates: census-style brackets, smooth rate paths inside the
published ranges, linear demographic growth.

Usage: tools/make_presets.py [presets_dir]
"""
import math
import sys
from pathlib import Path

MONTHS = 30


def ym(year, month, k):
    t = year * 12 + (month - 1) + k
    return f"{t // 12:04d}-{t % 12 + 1:02d}"


def write_series(path, start, values):
    with open(path, "w") as f:
        f.write("year_month,value\n")
        for k, v in enumerate(values):
            f.write(f"{ym(*start, k)},{v:.10g}\n")


def write_brackets(path, lowers, masses):
    total = sum(masses)
    vals = [float(f"{m / total:.12g}") for m in masses]
    vals[-1] = 1.0 - sum(vals[:-1])  # exact unit total after rounding
    with open(path, "w") as f:
        f.write("lower_bound,mass\n")
        for lo, m in zip(lowers, vals):
            f.write(f"{lo:.10g},{m:.12g}\n")


def rate_path(points):
    """Piecewise-linear path through (month, percent) knots, as fractions."""
    out = []
    for k in range(MONTHS):
        for (a, ra), (b, rb) in zip(points, points[1:]):
            if a <= k <= b:
                w = (k - a) / (b - a) if b > a else 0.0
                out.append((ra + w * (rb - ra)) / 100.0)
                break
    return out


# Weekly household income brackets (census style); masses for the 2016 shape.
INCOME_LOWER = [0, 150, 300, 400, 500, 650, 800, 1000, 1250, 1500, 1750, 2000, 2500, 3000, 3500, 4000]
INCOME_MASS = [2.0, 3.0, 4.5, 4.5, 6.0, 6.5, 8.0, 9.0, 8.5, 8.0, 7.5, 11.0, 8.0, 5.5, 3.5, 4.5]

# Non-housing net wealth, AUD stock (negative bracket for indebted households).
WEALTH_LOWER = [-50000, 0, 10000, 25000, 50000, 100000, 150000, 250000, 400000, 600000, 1000000]
WEALTH_MASS = [4.0, 12.0, 10.0, 11.0, 13.0, 12.0, 12.0, 11.0, 8.0, 5.0, 2.0]

# Weekly rent paid.
RENT_LOWER = [0, 100, 200, 300, 350, 400, 450, 550, 650, 750, 950]
RENT_MASS = [2.0, 5.0, 10.0, 11.0, 12.0, 13.0, 16.0, 12.0, 8.0, 7.0, 4.0]

# Monthly mortgage repayment.
MORTGAGE_LOWER = [0, 300, 600, 1000, 1400, 1800, 2400, 3000, 4000, 5000]
MORTGAGE_MASS = [3.0, 5.0, 8.0, 11.0, 13.0, 17.0, 16.0, 13.0, 8.0, 6.0]

PERIODS = {
    "sydney-2006": dict(
        start=(2006, 7),
        h=0.45,
        tax="6000:0.15 25000:0.30 75000:0.40 150000:0.45",
        lvr=0.725,
        phi_b=689.53,
        phi_i=0.81,
        rates=[(0, 7.55), (8, 7.80), (14, 8.30), (24, 9.45), (29, 7.30)],
        households=1.64e6,
        household_growth=1700.0,
        dwellings=1.60e6,
        construction=1500.0,
        overseas_per_month=250.0,
        money=0.72,  # nominal level relative to 2016
        price_mean=330000.0,
    ),
    "sydney-2011": dict(
        start=(2011, 7),
        h=-0.10,
        tax="6000:0.15 37000:0.30 80000:0.37 180000:0.45",
        lvr=0.675,
        phi_b=1072.1,
        phi_i=0.75,
        rates=[(0, 7.79), (6, 7.30), (12, 7.05), (18, 6.20), (24, 5.95), (29, 5.53)],
        households=1.78e6,
        household_growth=2200.0,
        dwellings=1.74e6,
        construction=1900.0,
        overseas_per_month=450.0,
        money=0.86,
        price_mean=380000.0,
    ),
    "sydney-2016": dict(
        start=(2016, 7),
        h=0.65,
        tax="18200:0.19 37000:0.325 87000:0.37 180000:0.45",
        lvr=0.60,
        phi_b=1141.7,
        phi_i=0.80,
        rates=[(0, 5.35), (6, 5.20), (12, 5.25), (20, 5.10), (29, 4.95)],
        households=2.00e6,
        household_growth=3000.0,
        dwellings=1.96e6,
        construction=2600.0,
        overseas_per_month=900.0,
        money=1.0,
        price_mean=500000.0,
    ),
}


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "presets")
    for name, p in PERIODS.items():
        d = root / name
        d.mkdir(parents=True, exist_ok=True)
        start = p["start"]
        money = p["money"]
        write_series(d / "mortgage_rate_series.csv", start, rate_path(p["rates"]))
        write_series(d / "household_count_series.csv", start,
                     [p["households"] + k * p["household_growth"] for k in range(MONTHS)])
        # Seasonal construction: completions bunch up before the financial year end.
        write_series(d / "construction_series.csv", start,
                     [p["construction"] * (1.0 + 0.15 * math.cos(2 * math.pi * (k - 11) / 12)) for k in range(MONTHS)])
        write_series(d / "overseas_capacity_series.csv", start,
                     [p["overseas_per_month"] * k for k in range(MONTHS)])
        write_brackets(d / "income_dist.csv", [round(x * money) for x in INCOME_LOWER], INCOME_MASS)
        write_brackets(d / "wealth_dist.csv", [round(x * money) for x in WEALTH_LOWER], WEALTH_MASS)
        write_brackets(d / "rent_dist.csv", [round(x * money) for x in RENT_LOWER], RENT_MASS)
        write_brackets(d / "mortgage_dist.csv", [round(x * money) for x in MORTGAGE_LOWER], MORTGAGE_MASS)

        conf = f"""# Greater Sydney, {start[0]}-{start[0] + 3} period.
# Table-level values are the published ones; distributions and series are
# synthetic (see tools/make_presets.py).
name = {name}
calendar_start = {ym(*start, 0)}
calendar_months = 30
equilibration_months = 26
scale_factor = 10
trend_aptitude = {p['h']}

initial_price_mean = {p['price_mean']:.0f}
initial_price_sigma = 0.4
initial_dwelling_count = {p['dwellings']:.0f}
# Leaves the developer about 1.5% of the stock at the start.
investor_stock_share = 0.33

tax_brackets = {p['tax']}
house_owning_expense_rate = 0.042
purchase_tax_rate = 0.05
mortgage_duration_months = 360
lvr_mean = {p['lvr']}
lvr_halfwidth = 0.125
mortgage_income_coeff = {p['phi_b']}
mortgage_income_exponent = {p['phi_i']}
mortgage_income_unit = 1000

mortgage_rate_series = mortgage_rate_series.csv
household_count_series = household_count_series.csv
construction_series = construction_series.csv
overseas_capacity_series = overseas_capacity_series.csv

income_dist = income_dist.csv
income_dist_basis = weekly
wealth_dist = wealth_dist.csv
wealth_dist_basis = stock
rent_dist = rent_dist.csv
rent_dist_basis = weekly
mortgage_dist = mortgage_dist.csv
mortgage_dist_basis = monthly
"""
        (d / "scenario.conf").write_text(conf)
        print(f"wrote {d}")


if __name__ == "__main__":
    main()
