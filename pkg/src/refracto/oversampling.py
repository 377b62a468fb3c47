"""Dithered oversampling and accumulate-and-shift decimation.

To gain ``w`` bits, take ``4**w`` conversions of the input plus uniform dither,
sum them and shift right by ``w``. The ideal ADC truncates, so a zero-mean
dither leaves every conversion half an LSB low on average; when dithering, the
accumulator is seeded with ``4**w / 2`` to cancel that before the shift.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from refracto.errors import DomainError


@dataclass(frozen=True)
class OversampleConfig:
    base_rate_hz: float = 1000.0
    extra_bits_w: int = 2
    adc_bits: int = 12
    full_scale_volts: float = 3.3
    dither_amp_lsb: float = 1.0  # peak-to-peak; 0 disables dither
    seed: int = 0

    def __post_init__(self):
        if self.extra_bits_w < 0:
            raise DomainError("extra_bits_w must be >= 0")
        if self.adc_bits < 1:
            raise DomainError("adc_bits must be >= 1")
        if self.full_scale_volts <= 0 or self.base_rate_hz <= 0:
            raise DomainError("full_scale_volts and base_rate_hz must be positive")
        if self.dither_amp_lsb < 0:
            raise DomainError("dither_amp_lsb must be >= 0")
        if self.extra_bits_w > 0 and 0 < self.dither_amp_lsb < 1:
            raise DomainError("dither must span at least 1 LSB when oversampling (or be 0)")

    @property
    def lsb_volts(self) -> float:
        return self.full_scale_volts / 2**self.adc_bits

    @property
    def samples_per_output(self) -> int:
        return 4**self.extra_bits_w


def required_sampling_rate(cfg: OversampleConfig) -> float:
    return 4**cfg.extra_bits_w * cfg.base_rate_hz


def quantize(v, adc_bits: int = 12, full_scale_volts: float = 3.3):
    """Ideal truncating ADC, saturating at both ends. Scalars in, int out."""
    top = 2**adc_bits - 1
    codes = np.clip(np.floor(np.asarray(v, dtype=float) / full_scale_volts * 2**adc_bits), 0, top)
    codes = codes.astype(np.int64)
    return int(codes) if codes.ndim == 0 else codes


def oversample_decimate(true_volts: float, cfg: OversampleConfig, rng=None) -> int:
    """One enhanced code on the ``adc_bits + w`` scale.

    ``rng`` defaults to a fresh generator seeded from ``cfg.seed``.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    n = cfg.samples_per_output
    v = np.full(n, float(true_volts))
    dithered = cfg.dither_amp_lsb > 0
    if dithered:
        v += (rng.random(n) - 0.5) * cfg.dither_amp_lsb * cfg.lsb_volts
    total = int(quantize(v, cfg.adc_bits, cfg.full_scale_volts).sum())
    if dithered:
        total += n >> 1
    return total >> cfg.extra_bits_w


def dc_sweep(cfg: OversampleConfig, n_points: int = 1000, base_code: int | None = None):
    """Sweep ``n_points`` DC levels evenly across one base LSB.

    Returns a structured record per point: true volts, plain (w=0, no dither)
    code, enhanced code and both reconstruction errors in base LSB. One
    generator seeded from ``cfg.seed`` drives the whole sweep.
    """
    if base_code is None:
        base_code = 2 ** (cfg.adc_bits - 1)
    lsb = cfg.lsb_volts
    rng = np.random.default_rng(cfg.seed)
    frac = (np.arange(n_points) + 0.5) / n_points
    rows = []
    scale = 2**cfg.extra_bits_w
    for f in frac:
        v = (base_code + f) * lsb
        plain = quantize(v, cfg.adc_bits, cfg.full_scale_volts)
        enhanced = oversample_decimate(v, cfg, rng)
        rows.append((v, plain, enhanced, v / lsb - plain, v / lsb - enhanced / scale))
    return np.array(
        rows,
        dtype=[
            ("true_volts", float),
            ("base_code", np.int64),
            ("enhanced_code", np.int64),
            ("base_error_lsb", float),
            ("enhanced_error_lsb", float),
        ],
    )


def rms(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.mean(x * x)))
