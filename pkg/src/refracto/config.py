"""Flat ``key=value`` run configuration.

Keys are ``section.field`` where section is one of ``pipeline``, ``sim``,
``geometry``, ``oversample`` or ``output``, and field is a field of the
matching dataclass. ``#`` starts a comment. Unknown keys and values that break
a dataclass invariant are rejected when the file is loaded.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from refracto.dsp_pipeline import PipelineConfig
from refracto.errors import ConfigError, RefractoError
from refracto.oversampling import OversampleConfig
from refracto.sensor_sim import Level, SimGeometry, SimScenario


@dataclass(frozen=True)
class RunConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    sim: SimScenario = field(default_factory=SimScenario)
    geometry: SimGeometry = field(default_factory=SimGeometry)
    oversample: OversampleConfig = field(default_factory=OversampleConfig)
    output_dir: str | None = None


_SECTIONS = {
    "pipeline": PipelineConfig,
    "sim": SimScenario,
    "geometry": SimGeometry,
    "oversample": OversampleConfig,
}


def _convert(cls, name: str, raw: str, lineno: int):
    default = next(f.default for f in dataclasses.fields(cls) if f.name == name)
    try:
        if isinstance(default, Level):
            return Level(raw)
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false"):
                raise ValueError(raw)
            return raw.lower() == "true"
        if isinstance(default, int):
            return int(raw)
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {name}: {raw!r}", lineno) from None


def parse_config(text: str) -> RunConfig:
    values: dict[str, dict] = {s: {} for s in _SECTIONS}
    lines_of: dict[str, int] = {}
    output_dir = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {line!r}", lineno)
        key, _, raw = (s.strip() for s in line.partition("="))
        if key in lines_of:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        lines_of[key] = lineno
        section, _, name = key.partition(".")
        if key == "output.dir":
            output_dir = raw
            continue
        cls = _SECTIONS.get(section)
        if cls is None or name not in {f.name for f in dataclasses.fields(cls)}:
            raise ConfigError(f"unknown key {key!r}", lineno)
        values[section][name] = _convert(cls, name, raw, lineno)

    built = {}
    for section, cls in _SECTIONS.items():
        try:
            built[section] = cls(**values[section])
        except (RefractoError, ValueError) as exc:
            lines = sorted(lines_of[f"{section}.{k}"] for k in values[section])
            raise ConfigError(f"[{section}] {exc}", lines[0] if lines else None) from exc
    return RunConfig(output_dir=output_dir, **built)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())
