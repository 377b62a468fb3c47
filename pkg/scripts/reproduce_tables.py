"""Recompute the validation statistics from the shipped Table 1 fixture.

    python scripts/reproduce_tables.py [--fixtures DIR]
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

from refracto.stats import ci_from_summary, mean_sd, paired_t_test, pearson_r

ROOT = Path(__file__).resolve().parent.parent


def load_table1(directory: Path) -> dict[str, np.ndarray]:
    with open(directory / "table1.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in ("sample", "standard", "prototype")}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fixtures", type=Path, default=ROOT / "fixtures")
    args = ap.parse_args()

    t = load_table1(args.fixtures)
    print("descriptive (mean +- sd)")
    for name in ("standard", "prototype"):
        m, sd = mean_sd(t[name])
        print(f"  {name:<10} {m:.2f} +- {sd:.2f}")

    r = paired_t_test(t["standard"], t["prototype"])
    print("paired t-test")
    print(f"  t={r.t_value:.3f} df={r.df} p={r.p_two_sided:.3f}")
    print(f"  mean_diff={r.mean_diff:.4f} sd_diff={r.sd_diff:.3f} cohens_d={r.cohens_d:.3f}")
    print(f"  95% CI of the difference ({r.ci_low:.2f}, {r.ci_high:.2f})")
    print(f"linearity r={pearson_r(t['standard'], t['prototype']):.4f}")

    err = np.abs(t["prototype"] - t["standard"])
    print("mean |prototype - standard| by band")
    for lo, hi in ((0.1, 5), (6, 25), (30, 60)):
        sel = (t["sample"] >= lo) & (t["sample"] <= hi)
        print(f"  {lo:>4g}-{hi:<3g} n={sel.sum():<2d} {err[sel].mean():.4f}")

    lo, hi = ci_from_summary(7.2, 0.1, 50, 0.95)
    print(f"repeatability (7.2, sd 0.1, n 50) 95% CI ({lo:.2f}, {hi:.2f})")


if __name__ == "__main__":
    main()
