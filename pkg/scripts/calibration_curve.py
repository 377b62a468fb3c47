"""Position versus Brix over the usable range, with a one- and two-segment fit.

Prints the residual of each fit so the benefit of the regime breakpoint can be
judged, and optionally writes the (index1, brix) pairs as CSV.
"""

from __future__ import annotations

import argparse
import csv

import numpy as np

from refracto.calibration import build_model, position_to_concentration, simulated_points


def main() -> None:
    ap = argparse.ArgumentParser(description="calibration curve study")
    ap.add_argument("--breakpoint", type=float, default=17.0)
    ap.add_argument("--stop", type=float, default=50.0)
    ap.add_argument("--step", type=float, default=0.5)
    ap.add_argument("--out")
    args = ap.parse_args()

    brix = np.arange(0.0, args.stop + args.step / 2, args.step)
    pts = simulated_points(brix)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["position", "brix"])
            w.writerows(pts)

    for label, bps in (("single line", ()), (f"split at {args.breakpoint:g}", (args.breakpoint,))):
        model = build_model(pts, bps)
        res = np.array([position_to_concentration(model, p) - b for p, b in pts])
        print(f"{label:<14} max|res|={np.abs(res).max():.4f} rms={np.sqrt(np.mean(res**2)):.4f} Brix")
        for s in model.segments:
            print(f"    [{s.lo:7.1f}, {s.hi:7.1f}] slope={s.slope:.6f} Brix/px r2={s.r_squared:.6f}")


if __name__ == "__main__":
    main()
