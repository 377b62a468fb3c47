"""Piecewise-linear position -> Brix calibration, zero offset and display scale.

The measurement chain is

    C_m = f(P) - c0
    C_f = k2 * (C_m + temp_coeff * (T - temp_ref_c))

with ``f`` a set of independently fitted least-squares lines, one per Brix
regime. Segments are half-open ``[lo, hi)`` except the last, which is closed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from refracto.dsp_pipeline import PipelineConfig, process_frame
from refracto.errors import (
    CalibrationInputError,
    DegenerateFitError,
    DomainError,
    InsufficientCalibrationDataError,
    ModelFormatError,
    OutOfCalibratedRangeError,
    WeakSignalError,
)
from refracto.sensor_sim import Level, PixelFrame, SimGeometry, SimScenario, synth_frame

MODEL_VERSION = 1
DEFAULT_BREAKPOINTS = (17.0,)


@dataclass(frozen=True)
class LinearSegment:
    lo: float
    hi: float
    slope: float  # Brix per pixel
    intercept: float
    r_squared: float = 1.0

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"segment needs lo < hi, got [{self.lo}, {self.hi}]")
        if not 0.0 <= self.r_squared <= 1.0:
            raise DomainError(f"r_squared must lie in [0, 1], got {self.r_squared}")

    def __call__(self, p: float) -> float:
        return self.slope * p + self.intercept


@dataclass(frozen=True)
class CalibrationModel:
    segments: tuple[LinearSegment, ...]
    c0: float = 0.0
    k2: float = 1.0
    temp_coeff: float = 0.0  # Brix per degree C
    temp_ref_c: float = 20.0

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise InsufficientCalibrationDataError("model needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if a.hi != b.lo:
                raise DomainError(
                    f"segments must be sorted and contiguous: [{a.lo}, {a.hi}) then [{b.lo}, {b.hi})"
                )
        if not self.k2 > 0:
            raise DomainError(f"k2 must be positive, got {self.k2}")

    @property
    def lo(self) -> float:
        return self.segments[0].lo

    @property
    def hi(self) -> float:
        return self.segments[-1].hi

    def segment_for(self, p: float) -> LinearSegment:
        last = len(self.segments) - 1
        for i, seg in enumerate(self.segments):
            if seg.lo <= p < seg.hi or (i == last and p == seg.hi):
                return seg
        raise OutOfCalibratedRangeError(
            f"position {p} outside calibrated range [{self.lo}, {self.hi}]"
        )


@dataclass(frozen=True)
class Measurement:
    level: Level
    brix_final: float | None = None
    brix_raw: float | None = None
    position: int | None = None
    temperature_c: float | None = None


def fit_linear_segment(points: Iterable[tuple[float, float]]) -> LinearSegment:
    """Ordinary least squares of Brix on position."""
    pts = [(float(p), float(b)) for p, b in points]
    positions = [p for p, _ in pts]
    if len(pts) < 2 or len(set(positions)) < 2:
        raise DegenerateFitError("need at least two distinct positions to fit a line")
    n = len(pts)
    mp = math.fsum(positions) / n
    mb = math.fsum(b for _, b in pts) / n
    sxx = math.fsum((p - mp) ** 2 for p in positions)
    sxy = math.fsum((p - mp) * (b - mb) for p, b in pts)
    slope = sxy / sxx
    intercept = mb - slope * mp
    sst = math.fsum((b - mb) ** 2 for _, b in pts)
    if sst == 0:
        r2 = 1.0
    else:
        sse = math.fsum((b - (slope * p + intercept)) ** 2 for p, b in pts)
        r2 = min(1.0, max(0.0, 1.0 - sse / sst))
    return LinearSegment(min(positions), max(positions), slope, intercept, r2)


def build_model(
    points: Iterable[tuple[float, float]],
    breakpoints: Sequence[float] = DEFAULT_BREAKPOINTS,
) -> CalibrationModel:
    """Fit one line per Brix regime and join the segments at midpoints.

    Group ``i`` holds points with ``breakpoints[i-1] < brix <= breakpoints[i]``,
    so a point sitting exactly on a breakpoint belongs to the lower regime.
    Adjacent segments meet halfway between the last position of one group and
    the first position of the next.
    """
    pts = sorted(((float(p), float(b)) for p, b in points), key=lambda t: t[1])
    edges = sorted(float(b) for b in breakpoints)
    groups: list[list[tuple[float, float]]] = [[] for _ in range(len(edges) + 1)]
    for p, b in pts:
        groups[sum(b > e for e in edges)].append((p, b))

    fits = []
    for i, g in enumerate(groups):
        if len({p for p, _ in g}) < 2:
            raise InsufficientCalibrationDataError(
                f"calibration group {i} has {len(g)} point(s); need two distinct positions"
            )
        fits.append(fit_linear_segment(g))

    fits.sort(key=lambda s: s.lo)
    segments = []
    for i, seg in enumerate(fits):
        lo = seg.lo if i == 0 else (fits[i - 1].hi + seg.lo) / 2
        hi = seg.hi if i == len(fits) - 1 else (seg.hi + fits[i + 1].lo) / 2
        segments.append(replace(seg, lo=lo, hi=hi))
    return CalibrationModel(tuple(segments))


def position_to_concentration(model: CalibrationModel, p: float) -> float:
    return model.segment_for(p)(p) - model.c0


def finalize(c_m: float, model: CalibrationModel, temperature_c: float) -> float:
    return model.k2 * (c_m + model.temp_coeff * (temperature_c - model.temp_ref_c))


def compute_k2(reference_slope: float, prototype_slope: float) -> float:
    if prototype_slope == 0:
        raise DomainError("prototype slope is zero; k2 undefined")
    return reference_slope / prototype_slope


def calibrate_zero(
    water_frames: Sequence[PixelFrame],
    model: CalibrationModel,
    cfg: PipelineConfig = PipelineConfig(),
) -> CalibrationModel:
    """Return ``model`` with c0 set so the given pure-water frames read zero."""
    if not water_frames:
        raise CalibrationInputError("zero calibration needs at least one water frame")
    raw = replace(model, c0=0.0)
    readings = []
    for i, frame in enumerate(water_frames):
        det = process_frame(frame, cfg)
        if det.level is not Level.NORMAL:
            raise CalibrationInputError(f"water frame {i} has level {det.level.value}")
        if not det.accepted:
            raise CalibrationInputError(f"water frame {i}: edge below threshold")
        readings.append(position_to_concentration(raw, det.index1))
    return replace(model, c0=math.fsum(readings) / len(readings))


def measure(
    frame: PixelFrame,
    model: CalibrationModel,
    cfg: PipelineConfig = PipelineConfig(),
) -> Measurement:
    det = process_frame(frame, cfg)
    if det.level is not Level.NORMAL:
        return Measurement(level=det.level, temperature_c=frame.temperature_c)
    if not det.accepted:
        raise WeakSignalError(
            f"max difference {det.max_diff_volts:.3f} V <= threshold {cfg.diff_threshold} V;"
            " light intensity too low"
        )
    c_m = position_to_concentration(model, det.index1)
    return Measurement(
        level=det.level,
        brix_final=finalize(c_m, model, frame.temperature_c),
        brix_raw=c_m,
        position=det.index1,
        temperature_c=frame.temperature_c,
    )


def simulated_points(
    brix_values: Iterable[float],
    geom: SimGeometry | None = None,
    cfg: PipelineConfig = PipelineConfig(),
    scenario: SimScenario | None = None,
) -> list[tuple[int, float]]:
    """(index1, Brix) pairs from noiseless simulator frames."""
    base = replace(scenario or SimScenario(), noise_sd_volts=0.0, burr_rate=0.0)
    out = []
    for b in brix_values:
        det = process_frame(synth_frame(replace(base, brix=float(b)), geom), cfg)
        if not det.accepted:
            raise CalibrationInputError(f"no accepted edge for simulated Brix {b}")
        out.append((det.index1, float(b)))
    return out


# persistence ---------------------------------------------------------------

_MODEL_KEYS = {"version", "segments", "c0", "k2", "temp_coeff", "temp_ref_c"}
_SEGMENT_KEYS = {"lo", "hi", "slope", "intercept", "r_squared"}


def model_to_dict(model: CalibrationModel) -> dict:
    return {
        "version": MODEL_VERSION,
        "segments": [asdict(s) for s in model.segments],
        "c0": model.c0,
        "k2": model.k2,
        "temp_coeff": model.temp_coeff,
        "temp_ref_c": model.temp_ref_c,
    }


def _number(doc: dict, key: str, where: str) -> float:
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ModelFormatError(f"{where}{key} must be a number, got {v!r}")
    return float(v)


def model_from_dict(doc: dict) -> CalibrationModel:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    keys = set(doc)
    if keys - _MODEL_KEYS:
        raise ModelFormatError(f"unknown model field(s): {sorted(keys - _MODEL_KEYS)}")
    if _MODEL_KEYS - keys:
        raise ModelFormatError(f"missing model field(s): {sorted(_MODEL_KEYS - keys)}")
    if doc["version"] != MODEL_VERSION:
        raise ModelFormatError(
            f"unsupported model version {doc['version']!r}, expected {MODEL_VERSION}"
        )
    if not isinstance(doc["segments"], list):
        raise ModelFormatError("segments must be a list")
    segments = []
    for i, s in enumerate(doc["segments"]):
        if not isinstance(s, dict) or set(s) != _SEGMENT_KEYS:
            raise ModelFormatError(
                f"segment {i} must have exactly the fields {sorted(_SEGMENT_KEYS)}"
            )
        values = {k: _number(s, k, f"segment {i}: ") for k in _SEGMENT_KEYS}
        try:
            segments.append(LinearSegment(**values))
        except DomainError as exc:
            raise ModelFormatError(f"segment {i}: {exc}") from exc
    try:
        return CalibrationModel(
            tuple(segments),
            c0=_number(doc, "c0", ""),
            k2=_number(doc, "k2", ""),
            temp_coeff=_number(doc, "temp_coeff", ""),
            temp_ref_c=_number(doc, "temp_ref_c", ""),
        )
    except (DomainError, InsufficientCalibrationDataError) as exc:
        raise ModelFormatError(str(exc)) from exc


def save_model(model: CalibrationModel, path) -> None:
    text = json.dumps(model_to_dict(model), indent=2) + "\n"
    Path(path).write_text(text)


def load_model(path) -> CalibrationModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(doc)
