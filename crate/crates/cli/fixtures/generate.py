"""Regenerates the synthetic fixtures in this directory (deterministic)."""
import csv
import datetime as dt
import math
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
CODES = ["M01AB", "M01AE", "N02BA", "N02BE", "N05B", "N05C", "R03", "R06"]


def smooth_process(rng, n, es_weeks):
    """Draw from a unit-variance ES process with lengthscale `es_weeks` on a weekly grid."""
    t = np.arange(n, dtype=float)
    r = np.abs(t[:, None] - t[None, :])
    k = np.exp(-0.5 * (r / es_weeks) ** 2)
    chol = np.linalg.cholesky(k + 1e-8 * np.eye(n))
    return chol @ rng.standard_normal(n)


def weekly_sales(rng, weeks=200):
    start = dt.date(2014, 1, 6)
    base = {"M01AB": 30, "M01AE": 25, "N02BA": 20, "N02BE": 160, "N05B": 60, "N05C": 8, "R03": 40, "R06": 18}
    cols = {}
    for c in CODES:
        b = base[c]
        f = smooth_process(rng, weeks, es_weeks=20.0)
        cols[c] = np.maximum(b + 0.2 * b * f + rng.normal(0, 0.01 * b, weeks), 0.0)
    with open(os.path.join(HERE, "weekly_sales.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["datum"] + CODES)
        for t in range(weeks):
            d = start + dt.timedelta(days=7 * t)
            w.writerow([f"{d.month}/{d.day}/{d.year}"] + [f"{cols[c][t]:.2f}" for c in CODES])


def transactions(rng, days=546):
    start = dt.date(2016, 1, 4)
    brands = [("Diclofenac", 4.0, 0.0), ("Aceclofenac", 2.0, 1.3), ("Cetirizine", 3.0, 2.6)]
    with open(os.path.join(HERE, "transactions.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["date", "time", "brand", "quantity"])
        for k in range(days):
            d = start + dt.timedelta(days=k)
            for name, rate, phase in brands:
                lam = rate * (1.0 + 0.4 * math.sin(2 * math.pi * k / 182.0 + phase))
                n = rng.poisson(max(lam, 0.1))
                if n == 0:
                    continue
                hour = int(rng.integers(8, 21))
                w.writerow([d.isoformat(), f"{hour:02d}:{int(rng.integers(0, 60)):02d}", name, n])
            if k == 100:
                w.writerow([d.isoformat(), "12:00", "Diclofenac", "abc"])
    with open(os.path.join(HERE, "atc_mapping.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["brand", "atc_code"])
        w.writerows([["Diclofenac", "M01AB"], ["Aceclofenac", "M01AB"], ["Cetirizine", "R06"]])


if __name__ == "__main__":
    rng = np.random.default_rng(20240607)
    weekly_sales(rng)
    transactions(rng)
