"""Plain-text capture files.

    # refracto-capture v1
    integration_time_us=1600.0
    led_level=0.75
    temperature_c=20.0
    pixels=2496
    0.1
    0.10996...
    ...

Floats are written with ``repr`` so a read/write cycle is lossless and
rewriting a frame gives byte-identical output.
"""

from __future__ import annotations

import math
from pathlib import Path

from refracto.errors import (
    CaptureParseError,
    CaptureVersionError,
    CountMismatchError,
    DuplicateKeyError,
    MissingKeyError,
    NonNumericSampleError,
    UnknownKeyError,
)
from refracto.sensor_sim import PixelFrame

FORMAT_VERSION = 1
HEADER = f"# refracto-capture v{FORMAT_VERSION}"
METADATA_KEYS = ("integration_time_us", "led_level", "temperature_c", "pixels")


def format_capture(frame: PixelFrame) -> str:
    lines = [
        HEADER,
        f"integration_time_us={float(frame.integration_time_us)!r}",
        f"led_level={float(frame.led_level)!r}",
        f"temperature_c={float(frame.temperature_c)!r}",
        f"pixels={len(frame)}",
    ]
    lines.extend(repr(float(v)) for v in frame.voltages)
    return "\n".join(lines) + "\n"


def write_capture(frame: PixelFrame, path) -> None:
    path = Path(path)
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(format_capture(frame))
    except OSError as exc:
        raise OSError(f"cannot write capture {path}: {exc.strerror or exc}") from exc


def parse_capture(text: str, path=None) -> PixelFrame:
    lines = text.splitlines()
    if not lines:
        raise CaptureVersionError("empty file, expected capture header", 1, path)
    head = lines[0].strip()
    if head != HEADER:
        if head.startswith("# refracto-capture"):
            raise CaptureVersionError(
                f"unsupported capture version {head.split()[-1]!r}", 1, path
            )
        raise CaptureVersionError(f"expected header {HEADER!r}, got {head!r}", 1, path)

    meta: dict[str, float] = {}
    i = 1
    while i < len(lines) and "=" in lines[i]:
        lineno = i + 1
        key, _, value = (s.strip() for s in lines[i].partition("="))
        if key not in METADATA_KEYS:
            raise UnknownKeyError(f"unknown metadata key {key!r}", lineno, path)
        if key in meta:
            raise DuplicateKeyError(f"duplicate metadata key {key!r}", lineno, path)
        try:
            meta[key] = int(value) if key == "pixels" else float(value)
        except ValueError:
            raise CaptureParseError(f"bad value for {key}: {value!r}", lineno, path) from None
        i += 1
    for key in METADATA_KEYS:
        if key not in meta:
            raise MissingKeyError(f"missing metadata key {key!r}", i + 1, path)

    samples = []
    for j in range(i, len(lines)):
        s = lines[j].strip()
        if not s:
            continue
        try:
            v = float(s)
        except ValueError:
            raise NonNumericSampleError(f"non-numeric sample {s!r}", j + 1, path) from None
        if not math.isfinite(v):
            raise NonNumericSampleError(f"non-finite sample {s!r}", j + 1, path)
        samples.append(v)

    if len(samples) != meta["pixels"]:
        raise CountMismatchError(
            f"declared pixels={meta['pixels']} but found {len(samples)} samples",
            len(lines),
            path,
        )
    return PixelFrame(
        voltages=samples,
        integration_time_us=meta["integration_time_us"],
        led_level=meta["led_level"],
        temperature_c=meta["temperature_c"],
    )


def read_capture(path) -> PixelFrame:
    path = Path(path)
    return parse_capture(path.read_text(encoding="ascii"), path)
