"""Synthetic 1-D CMOS line-sensor frames for a critical-angle refractometer.

The optical model is deliberately small:

    n(B)   = 1.3330 + 1.427e-3 * B                  linear sucrose model
    theta  = arcsin(n / n_prism)                    critical angle
    p      = pixel_ref + slope * (theta - theta_ref)
    V(x)   = V_lo(x) + A * logistic((x - p) / s)    Normal liquid level

``A`` is proportional to ``led_level * integration_time_us`` and saturates at
the sensor rail. ``s`` is derived from ``transition_width_px``, which is the
10-90 % rise distance of the transition zone. ``V_lo(x)`` is the dark level
plus a short stray-light ramp at the start of the array, which is what makes a
Normal frame rise over its first 100 pixels.

Randomness comes from one ``numpy.random.default_rng(seed)`` (PCG64) per
``synth_frame`` call, drawn in a fixed order: white noise, burr count, burr
positions, burr amplitudes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from refracto.errors import DomainError, NoTotalReflectionError, OutOfRangeError

WATER_INDEX = 1.3330
INDEX_PER_BRIX = 1.427e-3
BRIX_MAX = 85.0

DEFAULT_N_PRISM = 1.75
DEFAULT_PIXEL_COUNT = 2496
DEFAULT_FULL_SCALE = 3.3

DARK_VOLTS = 0.1
STRAY_VOLTS = 0.3
STRAY_DECAY_PX = 30.0
VOLTS_PER_LED_US = 2.25e-3  # amplitude gain: 0.75 LED at 1600 us -> 2.7 V
EMPTY_FRACTION = 0.97
DROOP_VOLTS = 1.2
DROOP_DECAY_PX = 60.0

# logistic 10 %..90 % distance in units of its scale
_RISE_10_90 = 2.0 * math.log(9.0)


class Level(enum.Enum):
    NORMAL = "Normal"
    VERY_LOW = "VeryLow"
    EMPTY = "Empty"


@dataclass(frozen=True)
class SimGeometry:
    n_prism: float = DEFAULT_N_PRISM
    angle_to_pixel_slope: float = 25000.0  # pixels per radian
    theta_ref: float = math.asin(WATER_INDEX / DEFAULT_N_PRISM)
    pixel_ref: float = 200.0
    pixel_count: int = DEFAULT_PIXEL_COUNT
    full_scale_volts: float = DEFAULT_FULL_SCALE

    def __post_init__(self):
        if not self.n_prism > 1.0:
            raise DomainError(f"n_prism must exceed 1, got {self.n_prism}")
        if self.pixel_count < 2:
            raise DomainError(f"pixel_count must be >= 2, got {self.pixel_count}")
        if not self.full_scale_volts > 0:
            raise DomainError("full_scale_volts must be positive")


@dataclass(frozen=True)
class SimScenario:
    brix: float = 7.2
    level: Level = Level.NORMAL
    led_level: float = 0.75
    integration_time_us: float = 1600.0
    transition_width_px: float = 40.0
    noise_sd_volts: float = 0.01
    burr_rate: float = 5.0
    burr_amp_volts: float = 1.0
    seed: int = 0
    temperature_c: float = 20.0

    def __post_init__(self):
        if not 0.0 <= self.brix <= BRIX_MAX:
            raise DomainError(f"brix must lie in [0, {BRIX_MAX}], got {self.brix}")
        if not 0.0 <= self.led_level <= 1.0:
            raise DomainError(f"led_level must lie in [0, 1], got {self.led_level}")
        if not self.transition_width_px > 0:
            raise DomainError("transition_width_px must be positive")
        if self.noise_sd_volts < 0 or self.burr_rate < 0 or self.burr_amp_volts < 0:
            raise DomainError("noise_sd_volts, burr_rate and burr_amp_volts must be >= 0")
        if self.integration_time_us < 0:
            raise DomainError("integration_time_us must be >= 0")
        if not isinstance(self.level, Level):
            object.__setattr__(self, "level", Level(self.level))


@dataclass(frozen=True, eq=False)
class PixelFrame:
    """One capture: per-pixel voltages plus acquisition metadata."""

    voltages: np.ndarray
    integration_time_us: float
    led_level: float
    temperature_c: float = 20.0

    def __post_init__(self):
        v = np.array(self.voltages, dtype=float)
        if v.ndim != 1:
            raise DomainError("voltages must be one-dimensional")
        v.setflags(write=False)
        object.__setattr__(self, "voltages", v)

    def __len__(self):
        return len(self.voltages)

    def __eq__(self, other):
        if not isinstance(other, PixelFrame):
            return NotImplemented
        return (
            self.integration_time_us == other.integration_time_us
            and self.led_level == other.led_level
            and self.temperature_c == other.temperature_c
            and np.array_equal(self.voltages, other.voltages)
        )

    __hash__ = None


def brix_to_refractive_index(brix: float) -> float:
    if not 0.0 <= brix <= BRIX_MAX:
        raise DomainError(f"brix must lie in [0, {BRIX_MAX}], got {brix}")
    return WATER_INDEX + INDEX_PER_BRIX * brix


def critical_angle(n_sample: float, n_prism: float) -> float:
    """Critical angle of total internal reflection, in radians."""
    if n_sample <= 0 or n_prism <= 0:
        raise DomainError("refractive indices must be positive")
    if n_sample > n_prism:
        raise NoTotalReflectionError(
            f"sample index {n_sample} exceeds prism index {n_prism}"
        )
    return math.asin(n_sample / n_prism)


def boundary_pixel(theta_c: float, geom: SimGeometry) -> float:
    if not 0.0 < theta_c <= math.pi / 2:
        raise DomainError(f"theta_c must lie in (0, pi/2], got {theta_c}")
    p = geom.pixel_ref + geom.angle_to_pixel_slope * (theta_c - geom.theta_ref)
    if not 0.0 <= p <= geom.pixel_count - 1:
        raise OutOfRangeError(
            f"boundary at pixel {p:.1f} is outside [0, {geom.pixel_count - 1}]"
        )
    return p


def brix_to_pixel(brix: float, geom: SimGeometry) -> float:
    n = brix_to_refractive_index(brix)
    return boundary_pixel(critical_angle(n, geom.n_prism), geom)


def signal_amplitude(scenario: SimScenario) -> float:
    """Rise height of the transition before the rail clamp."""
    return VOLTS_PER_LED_US * scenario.led_level * scenario.integration_time_us


def noiseless_curve(scenario: SimScenario, geom: SimGeometry, clamp: bool = True) -> np.ndarray:
    """Deterministic part of a frame (no white noise, no burrs)."""
    x = np.arange(geom.pixel_count, dtype=float)
    fs = geom.full_scale_volts

    if scenario.level is Level.EMPTY:
        base = np.full(geom.pixel_count, EMPTY_FRACTION * fs)
    else:
        p = brix_to_pixel(scenario.brix, geom)
        scale = scenario.transition_width_px / _RISE_10_90
        amp = signal_amplitude(scenario)
        if clamp:
            amp = min(amp, fs)
        base = DARK_VOLTS + amp / (1.0 + np.exp(-(x - p) / scale))
        if scenario.level is Level.NORMAL:
            base = base + STRAY_VOLTS * -np.expm1(-x / STRAY_DECAY_PX)
        else:
            base = base + DROOP_VOLTS * np.exp(-x / DROOP_DECAY_PX)

    if clamp:
        base = np.clip(base, 0.0, fs)
    return base


def synth_frame(scenario: SimScenario, geom: SimGeometry | None = None) -> PixelFrame:
    geom = geom or SimGeometry()
    rng = np.random.default_rng(scenario.seed)
    v = noiseless_curve(scenario, geom)

    if scenario.noise_sd_volts > 0:
        v = v + rng.normal(0.0, scenario.noise_sd_volts, geom.pixel_count)
    n_burrs = rng.poisson(scenario.burr_rate) if scenario.burr_rate > 0 else 0
    if n_burrs:
        pos = rng.integers(0, geom.pixel_count, n_burrs)
        # 1 - U[0,1) keeps amplitudes in (0, burr_amp]
        amp = scenario.burr_amp_volts * (1.0 - rng.random(n_burrs))
        np.add.at(v, pos, amp)

    v = np.clip(v, 0.0, geom.full_scale_volts)
    return PixelFrame(
        voltages=v,
        integration_time_us=scenario.integration_time_us,
        led_level=scenario.led_level,
        temperature_c=scenario.temperature_c,
    )


_PRESETS = {
    "normal": {},
    "empty": {"level": Level.EMPTY},
    "very-low": {"level": Level.VERY_LOW},
    # rise of ~1.1 V; peak difference stays below the 2 V default threshold
    "weak-led": {"led_level": 0.3},
    "t160": {"integration_time_us": 160.0},
    "t800": {"integration_time_us": 800.0},
    "t1600": {"integration_time_us": 1600.0},
}

PRESET_NAMES = tuple(_PRESETS)


def preset_scenario(name: str, base: SimScenario | None = None, **overrides) -> SimScenario:
    """Named scenario mirroring the level, LED and integration-time curves.

    Presets start from ``base`` (the ``SimScenario`` defaults if omitted:
    Brix 7.2, LED 0.75, 1600 us, 40 px transition, 0.01 V noise, 5 burrs per
    frame of up to 1 V). Keyword overrides are applied last.
    """
    try:
        fields = _PRESETS[name]
    except KeyError:
        raise LookupError(
            f"unknown scenario {name!r}; choose from {', '.join(PRESET_NAMES)}"
        ) from None
    return replace(base or SimScenario(), **{**fields, **overrides})
