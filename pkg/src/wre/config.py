"""Run configuration: every tunable of the pipeline in one place.

Defaults are the study values: Europe/Paris corpus timezone, peak windows
6-9 AM radio / 6-11 PM TV, conflict cutoff at local midnight on
2023-10-07, VAD minimum 0.50, gender bounds 0.20/0.80, face height minimum
0.10, ad exclusion on.

A config file in simple ``key = value`` form (same keys as the CLI flags,
``#`` comments) overrides the defaults; CLI flags override the file.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from datetime import datetime
from pathlib import Path
from typing import IO
from zoneinfo import ZoneInfo

from .ingest import BundlePaths
from .metrics import BreakMode
from .model import Medium

ALL_TABLES = ("table1", "table2", "table3", "table4", "table5", "table6")
OUTPUT_FORMATS = ("aligned", "delimited", "structured")


@dataclass(frozen=True)
class RunConfig:
    inputs: Path | None = None  # bundle directory; individual paths override
    programs: Path | None = None
    reports: Path | None = None
    breaks: Path | None = None
    segments: Path | None = None
    utterances: Path | None = None
    faces: Path | None = None
    names: Path | None = None
    stoplist: Path | None = None

    timezone: str = "Europe/Paris"
    peak_tv: tuple[int, int] = (18, 23)
    peak_radio: tuple[int, int] = (6, 9)
    conflict_cutoff: str = "2023-10-07T00:00"  # local corpus time when naive

    vad_min: float = 0.50
    gender_low: float = 0.20
    gender_high: float = 0.80
    face_min_height: float = 0.10
    face_female_threshold: float = 0.50

    ad_mode: str = "exclude_breaks"  # exclude_breaks | only_breaks | raw
    group_by: tuple[str, ...] = ("medium", "audience")
    output_format: str = "aligned"
    tables: tuple[str, ...] = ALL_TABLES
    min_population: int = 100
    out_dir: Path | None = None

    def __post_init__(self):
        for name in ("vad_min", "gender_low", "gender_high",
                     "face_min_height", "face_female_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} out of [0, 1]: {value}")
        for name in ("peak_tv", "peak_radio"):
            start, end = getattr(self, name)
            if not (0 <= start < end <= 24):
                raise ValueError(f"{name} window {start}-{end} ill-formed")
        if self.ad_mode not in [m.value for m in BreakMode]:
            raise ValueError(f"unknown ad_mode {self.ad_mode!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output_format {self.output_format!r}")
        for table in self.tables:
            if table not in ALL_TABLES:
                raise ValueError(f"unknown table {table!r}")

    @property
    def tz(self) -> ZoneInfo:
        return ZoneInfo(self.timezone)

    @property
    def peak_windows(self) -> dict[Medium, tuple[int, int]]:
        return {Medium.TV: self.peak_tv, Medium.RADIO: self.peak_radio}

    @property
    def cutoff(self) -> datetime:
        value = datetime.fromisoformat(self.conflict_cutoff)
        if value.tzinfo is None:
            value = value.replace(tzinfo=self.tz)
        return value

    @property
    def break_mode(self) -> BreakMode:
        return BreakMode(self.ad_mode)

    def bundle_paths(self) -> BundlePaths:
        if self.inputs is not None:
            base = BundlePaths.for_dir(self.inputs)
        else:
            missing = [name for name in ("programs", "reports", "breaks", "segments",
                                         "utterances", "faces", "names")
                       if getattr(self, name) is None]
            if missing:
                raise ValueError(f"no --inputs directory and missing paths: {missing}")
            base = BundlePaths(self.programs, self.reports, self.breaks, self.segments,
                               self.utterances, self.faces, self.names)
            return base
        overrides = {name: getattr(self, name) for name
                     in ("programs", "reports", "breaks", "segments",
                         "utterances", "faces", "names")
                     if getattr(self, name) is not None}
        return replace(base, **overrides) if overrides else base


_PATH_KEYS = {"inputs", "programs", "reports", "breaks", "segments", "utterances",
              "faces", "names", "stoplist", "out_dir"}
_FLOAT_KEYS = {"vad_min", "gender_low", "gender_high", "face_min_height",
               "face_female_threshold"}
_INT_KEYS = {"min_population"}
_TUPLE_KEYS = {"group_by", "tables"}
_WINDOW_KEYS = {"peak_tv", "peak_radio"}


def _coerce(key: str, raw: str):
    if key in _PATH_KEYS:
        return Path(raw)
    if key in _FLOAT_KEYS:
        return float(raw)
    if key in _INT_KEYS:
        return int(raw)
    if key in _TUPLE_KEYS:
        return tuple(part.strip() for part in raw.split(",") if part.strip())
    if key in _WINDOW_KEYS:
        start, end = raw.split("-")
        return (int(start), int(end))
    return raw


def parse_config_file(stream: IO[str]) -> dict:
    """``key = value`` lines; keys may use ``-`` or ``_``. Unknown keys are
    rejected so typos fail loudly."""
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def build_config(file_values: dict | None = None, cli_values: dict | None = None) -> RunConfig:
    """Defaults, overridden by the config file, overridden by CLI flags."""
    merged: dict = {}
    for layer in (file_values or {}, cli_values or {}):
        merged.update({k: v for k, v in layer.items() if v is not None})
    return RunConfig(**merged)
