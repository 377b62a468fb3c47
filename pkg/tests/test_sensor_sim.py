import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refracto.errors import DomainError, NoTotalReflectionError, OutOfRangeError
from refracto.sensor_sim import (
    Level,
    SimGeometry,
    SimScenario,
    boundary_pixel,
    brix_to_pixel,
    brix_to_refractive_index,
    critical_angle,
    noiseless_curve,
    preset_scenario,
    synth_frame,
)

GEOM = SimGeometry()
QUIET = dict(noise_sd_volts=0.0, burr_rate=0.0)


def test_refractive_index_model():
    assert brix_to_refractive_index(0) == pytest.approx(1.3330, abs=1e-15)
    assert brix_to_refractive_index(10) == pytest.approx(1.34727, abs=1e-12)


def test_refractive_index_monotone_sweep():
    values = [brix_to_refractive_index(b) for b in range(0, 86)]
    assert all(b > a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("brix", [-0.1, 85.01, 200])
def test_refractive_index_domain(brix):
    with pytest.raises(DomainError):
        brix_to_refractive_index(brix)


def test_critical_angle_examples():
    assert critical_angle(1.5, 1.5) == pytest.approx(math.pi / 2)
    assert critical_angle(0.75, 1.5) == pytest.approx(math.pi / 6, abs=1e-15)


def test_critical_angle_against_mpmath():
    mpmath.mp.dps = 40
    for n, n0 in [(1.3330, 1.51), (1.3330, 1.75), (1.4186, 1.75), (1.0, 1.0001)]:
        expected = float(mpmath.asin(mpmath.mpf(n) / mpmath.mpf(n0)))
        assert critical_angle(n, n0) == pytest.approx(expected, abs=1e-12)


def test_critical_angle_errors():
    with pytest.raises(NoTotalReflectionError):
        critical_angle(1.6, 1.5)
    with pytest.raises(DomainError):
        critical_angle(0.0, 1.5)
    with pytest.raises(DomainError):
        critical_angle(1.0, -1.5)


def test_boundary_pixel_affine():
    g = SimGeometry(angle_to_pixel_slope=2000.0, theta_ref=1.0, pixel_ref=600.0)
    assert boundary_pixel(1.0, g) == 600.0
    assert boundary_pixel(1.1, g) == pytest.approx(800.0)


def test_boundary_pixel_out_of_array():
    g = SimGeometry(angle_to_pixel_slope=2000.0, theta_ref=1.0, pixel_ref=600.0)
    with pytest.raises(OutOfRangeError):
        boundary_pixel(1.0 - 0.31, g)
    with pytest.raises(OutOfRangeError):
        boundary_pixel(1.5, replace(g, angle_to_pixel_slope=5000.0))
    with pytest.raises(DomainError):
        boundary_pixel(0.0, g)


def test_boundary_monotone_in_brix():
    pixels = [brix_to_pixel(b, GEOM) for b in np.linspace(0, 60, 601)]
    assert all(b > a for a, b in zip(pixels, pixels[1:]))


def test_zero_noise_frame_is_the_noiseless_curve():
    sc = SimScenario(brix=7.2, **QUIET)
    frame = synth_frame(sc, GEOM)
    assert np.array_equal(frame.voltages, noiseless_curve(sc, GEOM))
    p = brix_to_pixel(7.2, GEOM)
    steepest = int(np.argmax(np.gradient(frame.voltages)))
    assert abs(steepest - p) <= 0.5


def test_frame_shape_and_metadata():
    sc = SimScenario(temperature_c=23.5, led_level=0.6, integration_time_us=800)
    frame = synth_frame(sc)
    assert len(frame) == 2496
    assert frame.temperature_c == 23.5
    assert frame.led_level == 0.6
    assert frame.integration_time_us == 800


def test_same_seed_same_frame():
    sc = SimScenario(seed=42, burr_rate=10)
    assert synth_frame(sc) == synth_frame(sc)
    assert synth_frame(sc) != synth_frame(replace(sc, seed=43))


def test_empty_plateau_over_seeds():
    fs = GEOM.full_scale_volts
    for seed in range(100):
        head = synth_frame(preset_scenario("empty", seed=seed)).voltages[:100]
        assert head.mean() >= 0.8 * fs
        assert np.ptp(head) <= 0.05 * fs


def test_very_low_strictly_decreasing_head():
    head = noiseless_curve(preset_scenario("very-low"), GEOM)[:100]
    assert np.all(np.diff(head) < 0)


def test_amplitude_is_product_of_led_and_integration():
    a = SimScenario(led_level=0.8, integration_time_us=800, **QUIET)
    b = replace(a, led_level=0.4, integration_time_us=1600)
    np.testing.assert_allclose(
        noiseless_curve(a, GEOM, clamp=False), noiseless_curve(b, GEOM, clamp=False), atol=1e-9, rtol=0
    )


def test_amplitude_saturates_at_rail():
    sc = SimScenario(led_level=1.0, integration_time_us=5000, **QUIET)
    v = synth_frame(sc).voltages
    assert v.max() == GEOM.full_scale_volts


@settings(max_examples=60, deadline=None)
@given(
    brix=st.floats(0, 60),
    led=st.floats(0, 1),
    t=st.sampled_from([160.0, 800.0, 1600.0, 4000.0]),
    noise=st.floats(0, 0.5),
    burr_rate=st.floats(0, 50),
    level=st.sampled_from(list(Level)),
    seed=st.integers(0, 2**32 - 1),
)
def test_voltages_stay_within_rails(brix, led, t, noise, burr_rate, level, seed):
    sc = SimScenario(
        brix=brix, led_level=led, integration_time_us=t, noise_sd_volts=noise,
        burr_rate=burr_rate, level=level, seed=seed,
    )
    v = synth_frame(sc).voltages
    assert v.min() >= 0.0
    assert v.max() <= GEOM.full_scale_volts


def test_normal_head_rises_in_almost_all_frames():
    x = np.arange(100.0)
    rising = 0
    for seed in range(1000):
        head = synth_frame(SimScenario(seed=seed)).voltages[:100]
        rising += np.polyfit(x, head, 1)[0] > 0
    assert rising >= 990


def test_presets():
    assert preset_scenario("t1600").integration_time_us == 1600
    assert preset_scenario("t160").integration_time_us == 160
    assert preset_scenario("empty").level is Level.EMPTY
    assert preset_scenario("very-low").level is Level.VERY_LOW
    assert preset_scenario("normal", brix=12.0).brix == 12.0
    with pytest.raises(LookupError):
        preset_scenario("dim")


def test_weak_led_preset_falls_below_threshold():
    from refracto.dsp_pipeline import PipelineConfig, process_frame

    cfg = PipelineConfig()
    for seed in range(20):
        det = process_frame(synth_frame(preset_scenario("weak-led", seed=seed)), cfg)
        assert det.level is Level.NORMAL
        assert det.max_diff_volts < cfg.diff_threshold
        assert not det.accepted


@pytest.mark.parametrize(
    "kwargs",
    [dict(brix=-1), dict(brix=90), dict(led_level=1.5), dict(transition_width_px=0), dict(noise_sd_volts=-0.1), dict(burr_rate=-1)],
)
def test_scenario_invariants(kwargs):
    with pytest.raises(DomainError):
        SimScenario(**kwargs)


@pytest.mark.parametrize("kwargs", [dict(n_prism=1.0), dict(pixel_count=1), dict(full_scale_volts=0)])
def test_geometry_invariants(kwargs):
    with pytest.raises(DomainError):
        SimGeometry(**kwargs)
