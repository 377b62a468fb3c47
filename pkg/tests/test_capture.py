import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refracto.capture import HEADER, format_capture, parse_capture, read_capture, write_capture
from refracto.errors import (
    CaptureParseError,
    CaptureVersionError,
    CountMismatchError,
    DuplicateKeyError,
    MissingKeyError,
    NonNumericSampleError,
    UnknownKeyError,
)
from refracto.sensor_sim import PixelFrame, SimScenario, synth_frame


def small_text(**override):
    meta = dict(integration_time_us="1600.0", led_level="0.75", temperature_c="20.0", pixels="3")
    meta.update(override)
    lines = [HEADER] + [f"{k}={v}" for k, v in meta.items()] + ["0.1", "0.2", "0.3"]
    return "\n".join(lines) + "\n"


def test_header_line(tmp_path):
    path = tmp_path / "f.rcap"
    write_capture(synth_frame(SimScenario()), path)
    assert path.read_text().splitlines()[0] == "# refracto-capture v1"


def test_round_trip(tmp_path):
    frame = synth_frame(SimScenario(seed=9, temperature_c=22.25, led_level=0.6))
    path = tmp_path / "f.rcap"
    write_capture(frame, path)
    back = read_capture(path)
    assert back == frame
    assert back.integration_time_us == frame.integration_time_us
    assert back.led_level == frame.led_level
    assert back.temperature_c == frame.temperature_c
    assert np.array_equal(back.voltages, frame.voltages)


def test_rewrite_is_byte_identical(tmp_path):
    frame = synth_frame(SimScenario(seed=2))
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    write_capture(frame, a)
    write_capture(frame, b)
    write_capture(read_capture(a), c)
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 3.3), min_size=1, max_size=50), st.floats(-20, 80))
def test_text_round_trip_is_lossless(values, temp):
    frame = PixelFrame(np.array(values), 800.0, 0.5, temperature_c=temp)
    text = format_capture(frame)
    assert format_capture(parse_capture(text)) == text


def test_small_valid_text():
    frame = parse_capture(small_text())
    assert list(frame.voltages) == [0.1, 0.2, 0.3]


@pytest.mark.parametrize(
    "text, error, line",
    [
        (small_text().replace("v1", "v2"), CaptureVersionError, 1),
        ("hello\n", CaptureVersionError, 1),
        ("", CaptureVersionError, 1),
        (small_text(pixels="4"), CountMismatchError, None),
        (small_text(pixels="2"), CountMismatchError, None),
        (small_text().replace("led_level=0.75\n", ""), MissingKeyError, None),
        (small_text().replace("pixels=3", "pixels=3\npixels=3"), DuplicateKeyError, 6),
        (small_text().replace("pixels=3", "pixels=3\ngain=2"), UnknownKeyError, 6),
        (small_text().replace("0.2", "zero point two"), NonNumericSampleError, 7),
        (small_text().replace("0.2", "nan"), NonNumericSampleError, 7),
        (small_text(led_level="bright"), CaptureParseError, 3),
    ],
)
def test_parse_errors_name_the_line(text, error, line):
    with pytest.raises(error) as info:
        parse_capture(text, path="x.rcap")
    assert isinstance(info.value.line, int)
    if line is not None:
        assert info.value.line == line
    assert f"x.rcap:{info.value.line}" in str(info.value)


def test_declared_2496_with_2495_samples(tmp_path):
    text = format_capture(synth_frame(SimScenario()))
    truncated = text.rsplit("\n", 2)[0] + "\n"
    with pytest.raises(CountMismatchError):
        parse_capture(truncated)


def test_write_failure_names_path(tmp_path):
    with pytest.raises(OSError, match="missing"):
        write_capture(synth_frame(SimScenario()), tmp_path / "missing" / "f.rcap")
