"""Boundary-detection and Brix error versus sensor noise.

Sweeps noise_sd over a grid and, for each Brix, reports the fraction of seeded
frames whose index1 stays within 5 px of the noiseless detection and whose
displayed Brix stays within 0.1. Writes CSV to stdout or --out.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from refracto.calibration import build_model, measure, simulated_points
from refracto.dsp_pipeline import PipelineConfig, process_frame
from refracto.errors import OutOfCalibratedRangeError, WeakSignalError
from refracto.sensor_sim import SimScenario, synth_frame


def main() -> None:
    ap = argparse.ArgumentParser(description="noise robustness sweep")
    ap.add_argument("--noise", type=float, nargs="+", default=[0.0, 0.01, 0.02, 0.05, 0.1, 0.2])
    ap.add_argument("--brix", type=float, nargs="+", default=[2.0, 7.2, 15.0, 30.0, 50.0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--burr-rate", type=float, default=5.0)
    ap.add_argument("--out")
    args = ap.parse_args()

    cfg = PipelineConfig()
    model = build_model(
        simulated_points(np.linspace(0, 17, 35)) + simulated_points(np.linspace(17.5, 50, 14)), (17.0,)
    )
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["noise_sd", "brix", "trials", "within_5px", "within_0.1_brix", "index1_sd", "weak", "out_of_range"])
    for sd in args.noise:
        for b in args.brix:
            ref = process_frame(synth_frame(SimScenario(brix=b, noise_sd_volts=0.0, burr_rate=0.0)), cfg).index1
            idx, good_px, good_brix, weak, outside = [], 0, 0, 0, 0
            for seed in range(args.trials):
                frame = synth_frame(SimScenario(brix=b, seed=seed, noise_sd_volts=sd, burr_rate=args.burr_rate))
                det = process_frame(frame, cfg)
                if det.accepted:
                    idx.append(det.index1)
                    good_px += abs(det.index1 - ref) <= 5
                try:
                    m = measure(frame, model, cfg)
                except WeakSignalError:
                    weak += 1
                    continue
                except OutOfCalibratedRangeError:
                    outside += 1
                    continue
                good_brix += abs(m.brix_final - b) <= 0.1
            n = args.trials
            w.writerow([sd, b, n, good_px / n, good_brix / n, f"{np.std(idx, ddof=1):.3f}" if len(idx) > 1 else "", weak, outside])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
