"""Command-line entry point: simulate, process, calibrate, stats, oversample-demo.

Exit status is 0 on success, 1 on a runtime or domain error and 2 on a usage
error.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from refracto import calibration as cal
from refracto import stats
from refracto.capture import read_capture, write_capture
from refracto.config import RunConfig, load_config
from refracto.dsp_pipeline import filter_stages, process_frame
from refracto.errors import RefractoError
from refracto.oversampling import dc_sweep, required_sampling_rate, rms
from refracto.sensor_sim import PRESET_NAMES, Level, preset_scenario, synth_frame

PROG = "refracto"


class UsageError(Exception):
    pass


def _load_run_config(path) -> RunConfig:
    return load_config(path) if path else RunConfig()


def _out(args, text: str):
    print(text, file=args.stdout)


# simulate -------------------------------------------------------------------

def cmd_simulate(args) -> int:
    rc = _load_run_config(args.config)
    overrides = {
        k: v
        for k, v in {
            "brix": args.brix,
            "seed": args.seed,
            "noise_sd_volts": args.noise_sd,
            "burr_rate": args.burr_rate,
            "led_level": args.led_level,
            "integration_time_us": args.integration_time,
            "temperature_c": args.temperature,
        }.items()
        if v is not None
    }
    scenario = preset_scenario(args.scenario, base=rc.sim, **overrides)
    frame = synth_frame(scenario, rc.geometry)
    write_capture(frame, args.out)
    _out(args, f"wrote {args.out} ({len(frame)} pixels, {scenario.level.name}, brix={scenario.brix})")
    return 0


# process --------------------------------------------------------------------

def _write_stages_csv(frame, cfg, path):
    st = filter_stages(frame, cfg)
    cols = [st.raw, st.deburred, st.smoothed, st.difference]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["pixel", "raw", "deburred", "smoothed", "difference"])
        for i in range(len(st.raw)):
            w.writerow([i] + [repr(float(c[i])) if i < len(c) else "" for c in cols])


def _process_one(path, model, cfg) -> tuple[str, bool]:
    try:
        frame = read_capture(path)
        if model is None:
            det = process_frame(frame, cfg)
            if det.level is not Level.NORMAL:
                return f"{path}: {det.level.name}", True
            verdict = "accepted" if det.accepted else "rejected"
            return (
                f"{path}: NORMAL index1={det.index1} max_diff={det.max_diff_volts:.4f} {verdict}",
                True,
            )
        m = cal.measure(frame, model, cfg)
        if m.level is not Level.NORMAL:
            return f"{path}: {m.level.name}", True
        return (
            f"{path}: NORMAL index1={m.position} brix_raw={m.brix_raw:.2f} "
            f"brix={m.brix_final:.2f} temperature_c={m.temperature_c:g}",
            True,
        )
    except (RefractoError, OSError, ValueError) as exc:
        return f"{path}: error: {exc}", False


def cmd_process(args) -> int:
    rc = _load_run_config(args.config)
    model = cal.load_model(args.model) if args.model else None
    if args.stages_csv:
        if len(args.captures) != 1:
            raise UsageError("--stages-csv needs exactly one capture")
        _write_stages_csv(read_capture(args.captures[0]), rc.pipeline, args.stages_csv)

    if len(args.captures) == 1:
        results = [_process_one(args.captures[0], model, rc.pipeline)]
    else:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda p: _process_one(p, model, rc.pipeline), args.captures))
    ok = True
    for line, good in results:
        print(line, file=args.stdout if good else args.stderr)
        ok &= good
    return 0 if ok else 1


# calibrate ------------------------------------------------------------------

def _read_points(path) -> list[tuple[float, float]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if rows and rows[0][0].strip().lower() == "position":
        rows = rows[1:]
    try:
        return [(float(r[0]), float(r[1])) for r in rows]
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: expected numeric position,brix rows ({exc})") from None


def _parse_range(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(s) for s in text.split(":"))
    except ValueError:
        raise UsageError(f"--from-simulator expects START:STOP:STEP, got {text!r}") from None
    return np.round(np.arange(start, stop + step / 2, step), 10)


def cmd_calibrate(args) -> int:
    rc = _load_run_config(args.config)
    if bool(args.points) == bool(args.from_simulator):
        raise UsageError("give exactly one of --points or --from-simulator")
    if args.points:
        points = _read_points(args.points)
    else:
        points = cal.simulated_points(_parse_range(args.from_simulator), rc.geometry, rc.pipeline, rc.sim)
    breakpoints = args.breakpoint if args.breakpoint is not None else list(cal.DEFAULT_BREAKPOINTS)
    model = cal.build_model(points, breakpoints)
    model = replace(model, temp_coeff=args.temp_coeff, temp_ref_c=args.temp_ref)
    if args.water:
        model = cal.calibrate_zero([read_capture(p) for p in args.water], model, rc.pipeline)
    if (args.reference_slope is None) != (args.prototype_slope is None):
        raise UsageError("--reference-slope and --prototype-slope go together")
    if args.reference_slope is not None:
        model = replace(model, k2=cal.compute_k2(args.reference_slope, args.prototype_slope))
    cal.save_model(model, args.out)
    _out(args, f"wrote {args.out}: {len(model.segments)} segment(s), c0={model.c0:.4f}, k2={model.k2:.6g}")
    for s in model.segments:
        _out(args, f"  [{s.lo:g}, {s.hi:g}] slope={s.slope:.6g} intercept={s.intercept:.6g} r2={s.r_squared:.6f}")
    return 0


# stats ----------------------------------------------------------------------

def _read_columns(path, names: str | None):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, body = rows[0], rows[1:]
    if names:
        wanted = [s.strip() for s in names.split(",")]
        missing = [w for w in wanted if w not in header]
        if missing:
            raise ValueError(f"{path}: no column(s) {missing}; have {header}")
        idx = [header.index(w) for w in wanted]
    else:
        idx = list(range(len(header)))
    try:
        cols = {header[i]: [float(r[i]) for r in body] for i in idx}
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: non-numeric data ({exc})") from None
    return cols


def cmd_stats(args) -> int:
    if not (args.paired or args.summary or args.ci_summary):
        raise UsageError("stats needs --paired FILE, --summary FILE or --ci-summary MEAN SD N")
    if args.paired:
        cols = _read_columns(args.paired, args.columns)
        if len(cols) < 2:
            raise ValueError("paired test needs two columns")
        (name_a, a), (name_b, b) = list(cols.items())[-2:]
        r = stats.paired_t_test(a, b, args.level)
        _out(args, f"paired t-test: {name_a} vs {name_b} (n={r.n})")
        for key, val in [
            ("mean_a", r.mean_a), ("sd_a", r.sd_a), ("mean_b", r.mean_b), ("sd_b", r.sd_b),
            ("mean_diff", r.mean_diff), ("sd_diff", r.sd_diff), ("t", r.t_value),
        ]:
            _out(args, f"{key}={val:.3f}")
        _out(args, f"df={r.df}")
        _out(args, f"p={r.p_two_sided:.3f}")
        _out(args, f"cohens_d={r.cohens_d:.3f}")
        _out(args, f"ci_level={r.level:g}")
        _out(args, f"ci_low={r.ci_low:.2f}")
        _out(args, f"ci_high={r.ci_high:.2f}")
        _out(args, f"pearson_r={stats.pearson_r(a, b):.4f}")
    if args.summary:
        for name, xs in _read_columns(args.summary, args.columns).items():
            m, sd = stats.mean_sd(xs)
            lo, hi = stats.confidence_interval(xs, args.level)
            rsd = stats.rsd_percent(xs) if m != 0 else float("nan")
            _out(args, f"{name}: n={len(xs)} mean={m:.4f} sd={sd:.4f} rsd%={rsd:.3f} ci=({lo:.4f}, {hi:.4f})")
    if args.ci_summary:
        mean, sd, n = args.ci_summary
        lo, hi = stats.ci_from_summary(float(mean), float(sd), int(n), args.level)
        _out(args, f"ci_low={lo:.2f}")
        _out(args, f"ci_high={hi:.2f}")
    return 0


# oversample-demo ------------------------------------------------------------

def cmd_oversample(args) -> int:
    rc = _load_run_config(args.config)
    cfg = rc.oversample
    changes = {
        k: v
        for k, v in {
            "extra_bits_w": args.extra_bits,
            "adc_bits": args.adc_bits,
            "dither_amp_lsb": args.dither_lsb,
            "seed": args.seed,
            "base_rate_hz": args.base_rate,
        }.items()
        if v is not None
    }
    cfg = replace(cfg, **changes)
    sweep = dc_sweep(cfg, args.points)
    names = sweep.dtype.names
    fh = open(args.out, "w", newline="") if args.out else args.stdout
    try:
        w = csv.writer(fh)
        w.writerow(names)
        for row in sweep:
            w.writerow([repr(float(row[n])) if sweep.dtype[n].kind == "f" else int(row[n]) for n in names])
    finally:
        if args.out:
            fh.close()
    report = args.stdout if args.out else args.stderr
    base_rms, enh_rms = rms(sweep["base_error_lsb"]), rms(sweep["enhanced_error_lsb"])
    print(f"f_os={required_sampling_rate(cfg):g} Hz (4^{cfg.extra_bits_w} x {cfg.base_rate_hz:g})", file=report)
    print(f"rms_base_lsb={base_rms:.4f} rms_enhanced_lsb={enh_rms:.4f} ratio={enh_rms / base_rms:.4f}", file=report)
    return 0


# wiring -----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Critical-angle refractometer toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="synthesize a capture file")
    s.add_argument("--scenario", default="normal", choices=PRESET_NAMES)
    s.add_argument("--brix", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--noise-sd", type=float)
    s.add_argument("--burr-rate", type=float)
    s.add_argument("--led-level", type=float)
    s.add_argument("--integration-time", type=float)
    s.add_argument("--temperature", type=float)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("process", help="detect the boundary (and Brix with --model)")
    s.add_argument("captures", nargs="+")
    s.add_argument("--model")
    s.add_argument("--config")
    s.add_argument("--stages-csv", help="write pixel,raw,deburred,smoothed,difference CSV")
    s.set_defaults(func=cmd_process)

    s = sub.add_parser("calibrate", help="fit a calibration model")
    s.add_argument("--points", help="CSV of position,brix rows")
    s.add_argument("--from-simulator", metavar="START:STOP:STEP",
                   help="take exact (index1, brix) pairs from noiseless simulated frames")
    s.add_argument("--water", nargs="*", default=[], help="pure-water captures for the zero offset")
    s.add_argument("--breakpoint", type=float, action="append", help="Brix breakpoint (repeatable)")
    s.add_argument("--reference-slope", type=float)
    s.add_argument("--prototype-slope", type=float)
    s.add_argument("--temp-coeff", type=float, default=0.0)
    s.add_argument("--temp-ref", type=float, default=20.0)
    s.add_argument("--config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("stats", help="paired t-test, summaries and intervals over CSV")
    s.add_argument("--paired", metavar="CSV")
    s.add_argument("--summary", metavar="CSV")
    s.add_argument("--ci-summary", nargs=3, metavar=("MEAN", "SD", "N"))
    s.add_argument("--columns", help="comma-separated column names")
    s.add_argument("--level", type=float, default=0.95)
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("oversample-demo", help="DC sweep CSV of dithered oversampling")
    s.add_argument("--extra-bits", type=int)
    s.add_argument("--adc-bits", type=int)
    s.add_argument("--dither-lsb", type=float)
    s.add_argument("--base-rate", type=float)
    s.add_argument("--points", type=int, default=1000)
    s.add_argument("--seed", type=int)
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_oversample)
    return p


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    args.stdout, args.stderr = stdout, stderr
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{PROG} {args.command}: usage error: {exc}", file=stderr)
        return 2
    except (RefractoError, LookupError, OSError, ValueError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"{PROG} {args.command}: error: {msg}", file=stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
