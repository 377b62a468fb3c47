"""Burr removal, smoothing and virtual dark-bright boundary detection.

Index bookkeeping follows the left-anchored conventions throughout:

    y[n] = mean(x[n+1 .. n+M])          len(y) = len(x) - M
    z[n] = y[n+dx] - y[n]               len(z) = len(y) - dx

so ``z[n]`` depends on raw pixels ``n+1 .. n+dx+M`` and ``index1 = n`` is
reported as is. The physical boundary sits about ``dx/2 + (M+1)/2`` pixels to
the right; that constant offset is left for the calibration to absorb.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from refracto.errors import (
    AmbiguousLevelError,
    DomainError,
    NoRisingEdgeError,
    SizeError,
)
from refracto.sensor_sim import DEFAULT_FULL_SCALE, DEFAULT_PIXEL_COUNT, Level, PixelFrame

MAD_TO_SD = 1.4826
EMPTY_MEAN_FRACTION = 0.8
EMPTY_RANGE_FRACTION = 0.05


@dataclass(frozen=True)
class PipelineConfig:
    window_m: int = 20
    step_dx: int = 80
    scan_start: int = 100
    scan_end: int = 1800
    diff_threshold: float = 2.0  # volts
    outlier_window: int = 3  # Hampel half-window
    outlier_k: float = 3.0
    level_slope_min: float = 1e-3  # volts per pixel
    pixel_count: int = DEFAULT_PIXEL_COUNT
    full_scale_volts: float = DEFAULT_FULL_SCALE

    def __post_init__(self):
        if self.window_m < 1 or self.step_dx < 1:
            raise DomainError("window_m and step_dx must be >= 1")
        if not 0 <= self.scan_start < self.scan_end:
            raise DomainError("need 0 <= scan_start < scan_end")
        if self.scan_end + self.step_dx + self.window_m > self.pixel_count:
            raise DomainError(
                "scan_end + step_dx + window_m exceeds pixel_count "
                f"({self.scan_end + self.step_dx + self.window_m} > {self.pixel_count})"
            )
        if self.diff_threshold < 0:
            raise DomainError("diff_threshold must be >= 0")
        if self.outlier_window < 0 or self.outlier_k < 0:
            raise DomainError("outlier_window and outlier_k must be >= 0")
        if self.level_slope_min <= 0 or self.full_scale_volts <= 0:
            raise DomainError("level_slope_min and full_scale_volts must be positive")

    @property
    def center_offset(self) -> float:
        """Distance from index1 to the centre of the difference window."""
        return self.step_dx / 2 + (self.window_m + 1) / 2


class EdgePeak(NamedTuple):
    index1: int
    max_diff: float
    accepted: bool


@dataclass(frozen=True)
class BoundaryDetection:
    level: Level
    index1: int | None = None
    max_diff_volts: float | None = None
    accepted: bool = False


def _as_1d(values) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise SizeError("expected a one-dimensional sequence")
    return x


def remove_outliers(voltages, cfg: PipelineConfig = PipelineConfig()) -> np.ndarray:
    """Hampel filter.

    A sample is replaced by the median of its ``2*h+1`` neighbourhood when it
    deviates from that median by more than ``k * 1.4826 * MAD``. Neighbourhoods
    are truncated at the ends of the array. Zero MAD with zero deviation is
    left alone; zero MAD with any deviation is replaced.
    """
    x = _as_1d(voltages)
    h = cfg.outlier_window
    width = 2 * h + 1
    if len(x) < width:
        raise SizeError(f"need at least {width} samples for Hampel window, got {len(x)}")
    if h == 0:
        return x.copy()

    med = np.empty_like(x)
    mad = np.empty_like(x)
    win = sliding_window_view(x, width)
    centre = np.median(win, axis=1)
    med[h:len(x) - h] = centre
    mad[h:len(x) - h] = np.median(np.abs(win - centre[:, None]), axis=1)
    for i in (*range(h), *range(len(x) - h, len(x))):
        nb = x[max(0, i - h):i + h + 1]
        m = np.median(nb)
        med[i] = m
        mad[i] = np.median(np.abs(nb - m))

    out = x.copy()
    bad = np.abs(x - med) > cfg.outlier_k * MAD_TO_SD * mad
    out[bad] = med[bad]
    return out


def moving_average(voltages, window_m: int = 20) -> np.ndarray:
    x = _as_1d(voltages)
    if window_m < 1:
        raise DomainError("window_m must be >= 1")
    if len(x) < window_m + 1:
        raise SizeError(f"need at least {window_m + 1} samples, got {len(x)}")
    # y[n] averages x[n+1 .. n+M]
    return np.convolve(x[1:], np.full(window_m, 1.0 / window_m), mode="valid")


def first_difference(y, step_dx: int = 80) -> np.ndarray:
    y = _as_1d(y)
    if step_dx < 1:
        raise DomainError("step_dx must be >= 1")
    if len(y) < step_dx + 1:
        raise SizeError(f"need at least {step_dx + 1} samples, got {len(y)}")
    return y[step_dx:] - y[:-step_dx]


def detect_boundary(z, cfg: PipelineConfig = PipelineConfig()) -> EdgePeak:
    """Position of the largest positive difference in ``[scan_start, scan_end]``.

    Ties go to the smallest index. Only rising differences (z > 0) qualify.
    """
    z = _as_1d(z)
    if cfg.scan_end >= len(z):
        raise SizeError(
            f"scan window ends at {cfg.scan_end} but difference has {len(z)} samples"
        )
    window = z[cfg.scan_start:cfg.scan_end + 1]
    k = int(np.argmax(window))
    peak = float(window[k])
    if not peak > 0:
        raise NoRisingEdgeError(
            f"no rising edge in pixels [{cfg.scan_start}, {cfg.scan_end}]"
        )
    return EdgePeak(cfg.scan_start + k, peak, peak > cfg.diff_threshold)


def _lsq_slope(y: np.ndarray) -> float:
    x = np.arange(len(y), dtype=float)
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def classify_level(frame: PixelFrame, cfg: PipelineConfig = PipelineConfig()) -> Level:
    v = frame.voltages if isinstance(frame, PixelFrame) else _as_1d(frame)
    head = v[:cfg.scan_start]
    if len(head) < 2:
        raise SizeError(f"need at least {max(cfg.scan_start, 2)} pixels to classify level")
    fs = cfg.full_scale_volts
    if head.mean() >= EMPTY_MEAN_FRACTION * fs and np.ptp(head) <= EMPTY_RANGE_FRACTION * fs:
        return Level.EMPTY
    slope = _lsq_slope(head)
    if slope <= -cfg.level_slope_min:
        return Level.VERY_LOW
    if slope >= cfg.level_slope_min:
        return Level.NORMAL
    raise AmbiguousLevelError(
        f"first {len(head)} pixels: mean {head.mean():.3f} V, slope {slope:.2e} V/px"
    )


@dataclass(frozen=True)
class FilterStages:
    raw: np.ndarray
    deburred: np.ndarray
    smoothed: np.ndarray
    difference: np.ndarray


def filter_stages(frame: PixelFrame, cfg: PipelineConfig = PipelineConfig()) -> FilterStages:
    raw = frame.voltages if isinstance(frame, PixelFrame) else _as_1d(frame)
    deburred = remove_outliers(raw, cfg)
    smoothed = moving_average(deburred, cfg.window_m)
    return FilterStages(raw, deburred, smoothed, first_difference(smoothed, cfg.step_dx))


def process_frame(frame: PixelFrame, cfg: PipelineConfig = PipelineConfig()) -> BoundaryDetection:
    """Level check, then Hampel -> moving average -> difference -> argmax.

    Empty and VeryLow frames return a level-only result.
    """
    if len(frame) != cfg.pixel_count:
        raise SizeError(f"frame has {len(frame)} pixels, config expects {cfg.pixel_count}")
    level = classify_level(frame, cfg)
    if level is not Level.NORMAL:
        return BoundaryDetection(level=level)
    stages = filter_stages(frame, cfg)
    peak = detect_boundary(stages.difference, cfg)
    return BoundaryDetection(level, peak.index1, peak.max_diff, peak.accepted)
