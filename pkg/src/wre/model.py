"""Domain types shared across the engine, time-interval arithmetic and
program-level classifications (audience slot, conflict period).

All timecodes are integer milliseconds on half-open intervals
[start_ms, end_ms). Wall-clock times are stored as timezone-aware datetimes;
slot and cutoff rules are evaluated in the corpus timezone (Europe/Paris by
default). Every type here is an immutable value and every operation a pure
function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, time, timedelta
from enum import Enum
from math import fsum
from typing import Iterable, Sequence
from zoneinfo import ZoneInfo

DEFAULT_CORPUS_TZ = ZoneInfo("Europe/Paris")

# Peak windows as local (start_hour, end_hour): 6-9 AM radio, 6-11 PM TV.
DEFAULT_PEAK_WINDOWS: dict["Medium", tuple[int, int]] = {}

DEFAULT_CONFLICT_CUTOFF = datetime(2023, 10, 7, 0, 0, tzinfo=DEFAULT_CORPUS_TZ)


@dataclass(frozen=True, order=True)
class TimeInterval:
    """Half-open span [start_ms, end_ms) on a media timeline. Never empty."""

    start_ms: int
    end_ms: int

    def __post_init__(self):
        if self.start_ms < 0:
            raise ValueError(f"negative interval start: {self.start_ms}")
        if self.end_ms <= self.start_ms:
            raise ValueError(f"empty or inverted interval [{self.start_ms}, {self.end_ms})")

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    @property
    def midpoint_ms(self) -> int:
        return (self.start_ms + self.end_ms) // 2

    def contains_point(self, t_ms: int) -> bool:
        return self.start_ms <= t_ms < self.end_ms

    def contains(self, other: "TimeInterval") -> bool:
        return self.start_ms <= other.start_ms and other.end_ms <= self.end_ms

    def overlaps(self, other: "TimeInterval") -> bool:
        return self.start_ms < other.end_ms and other.start_ms < self.end_ms

    def intersect(self, other: "TimeInterval") -> "TimeInterval | None":
        start = max(self.start_ms, other.start_ms)
        end = min(self.end_ms, other.end_ms)
        if start < end:
            return TimeInterval(start, end)
        return None

    def overlap_ms(self, other: "TimeInterval") -> int:
        return max(0, min(self.end_ms, other.end_ms) - max(self.start_ms, other.start_ms))


def normalize_intervals(intervals: Iterable[TimeInterval]) -> list[TimeInterval]:
    """Union of intervals as a sorted list of disjoint intervals.

    Adjacent intervals ([a,b) followed by [b,c)) are merged.
    """
    ordered = sorted(intervals, key=lambda iv: (iv.start_ms, iv.end_ms))
    merged: list[TimeInterval] = []
    for iv in ordered:
        if merged and iv.start_ms <= merged[-1].end_ms:
            if iv.end_ms > merged[-1].end_ms:
                merged[-1] = TimeInterval(merged[-1].start_ms, iv.end_ms)
        else:
            merged.append(iv)
    return merged


def total_duration_ms(intervals: Iterable[TimeInterval]) -> int:
    return sum(iv.duration_ms for iv in intervals)


def interval_subtract(base: TimeInterval, cuts: Iterable[TimeInterval]) -> list[TimeInterval]:
    """Remove ``cuts`` from ``base``.

    Cuts may overlap each other; they are normalized internally. The result
    is sorted, disjoint, contained in ``base``, and its total duration equals
    duration(base) minus duration(union(cuts) clipped to base).
    """
    result: list[TimeInterval] = []
    cursor = base.start_ms
    for cut in normalize_intervals(cuts):
        clipped = base.intersect(cut)
        if clipped is None:
            continue
        if cursor < clipped.start_ms:
            result.append(TimeInterval(cursor, clipped.start_ms))
        cursor = max(cursor, clipped.end_ms)
    if cursor < base.end_ms:
        result.append(TimeInterval(cursor, base.end_ms))
    return result


def interval_intersect_all(base: TimeInterval, others: Iterable[TimeInterval]) -> list[TimeInterval]:
    """Union of ``others`` clipped to ``base``, sorted and disjoint."""
    out: list[TimeInterval] = []
    for iv in normalize_intervals(others):
        clipped = base.intersect(iv)
        if clipped is not None:
            out.append(clipped)
    return out


class Medium(Enum):
    TV = "tv"
    RADIO = "radio"


class ChannelStatus(Enum):
    PUBLIC = "public"
    PRIVATE = "private"


class ProgramCategory(Enum):
    NEWS = "news"
    ENTERTAINMENT = "entertainment"
    MAGAZINE_DOCUMENTARY = "magazine_documentary"
    SPORT = "sport"


class AudienceSlot(Enum):
    HIGH = "high"
    LOW = "low"


class ConflictPeriod(Enum):
    BEFORE = "before"
    AFTER = "after"


class SegmentLabel(Enum):
    MALE_SPEECH = "male"
    FEMALE_SPEECH = "female"
    MUSIC = "music"
    NOISE = "noise"


class ReportRole(Enum):
    PRESENTER = "presenter"
    JOURNALIST = "journalist"
    POLITICAL_GUEST = "political_guest"
    EXPERT = "expert"
    OTHER = "other"


class MetricKind(Enum):
    WPR = "wpr"  # manual presence, weight = person count
    WSR = "wsr"  # speech time, weight = gendered seconds
    WQR = "wqr"  # first-name references, weight = hit count
    WFR = "wfr"  # on-screen faces, weight = face count


DEFAULT_PEAK_WINDOWS.update({Medium.RADIO: (6, 9), Medium.TV: (18, 23)})


@dataclass(frozen=True)
class Program:
    """One broadcast: channel metadata, wall-clock bounds and the position of
    the program inside its media file."""

    program_id: str
    channel_id: str
    medium: Medium
    status: ChannelStatus
    category: ProgramCategory
    start_utc: datetime
    end_utc: datetime
    media_id: str
    media_span: TimeInterval

    def __post_init__(self):
        if self.start_utc.tzinfo is None or self.end_utc.tzinfo is None:
            raise ValueError(f"program {self.program_id}: naive wall-clock timestamps")
        if self.end_utc <= self.start_utc:
            raise ValueError(f"program {self.program_id}: end_utc <= start_utc")
        wall_ms = round((self.end_utc - self.start_utc).total_seconds() * 1000)
        if abs(wall_ms - self.media_span.duration_ms) > 1000:
            raise ValueError(
                f"program {self.program_id}: media span {self.media_span.duration_ms} ms "
                f"does not match wall-clock duration {wall_ms} ms (tolerance 1 s)"
            )

    @property
    def duration_ms(self) -> int:
        return self.media_span.duration_ms


@dataclass(frozen=True)
class SpeechSegment:
    """A labeled audio span. Music spans include singing voice and are
    excluded from speech-time metrics."""

    media_id: str
    span: TimeInterval
    label: SegmentLabel


@dataclass(frozen=True)
class Utterance:
    """A transcribed text span, as emitted by the transcriber."""

    media_id: str
    span: TimeInterval
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("utterance text empty after trimming")


@dataclass(frozen=True)
class FaceObservation:
    """One detected face at one sampled frame."""

    media_id: str
    frame_ms: int
    height_ratio: float
    female_score: float

    def __post_init__(self):
        if self.frame_ms < 0:
            raise ValueError(f"negative frame timestamp: {self.frame_ms}")
        if not 0.0 < self.height_ratio <= 1.0:
            raise ValueError(f"height_ratio out of (0, 1]: {self.height_ratio}")
        if not 0.0 <= self.female_score <= 1.0:
            raise ValueError(f"female_score out of [0, 1]: {self.female_score}")


@dataclass(frozen=True)
class ChannelReport:
    """Manually reported speaking characters for one program and role."""

    program_id: str
    role: ReportRole
    male_count: int
    female_count: int

    def __post_init__(self):
        if self.male_count < 0 or self.female_count < 0:
            raise ValueError(f"report {self.program_id}/{self.role.value}: negative count")


@dataclass(frozen=True)
class NameRecord:
    """Aggregated first-name statistics: population count and female
    attribution probability."""

    name: str
    total_count: int
    female_prob: float

    def __post_init__(self):
        if self.total_count <= 0:
            raise ValueError(f"name {self.name!r}: non-positive total_count")
        if not 0.0 <= self.female_prob <= 1.0:
            raise ValueError(f"name {self.name!r}: female_prob out of [0, 1]")


@dataclass(frozen=True)
class MetricValue:
    """One representation estimate with its aggregation weight.

    ``female_pct`` is None exactly when the metric is undefined (zero weight:
    no gendered speech, no qualifying faces, no hits, no reported persons).
    male_pct is implied: the two percentages add up to 100. The weight makes
    group-level merging exact (a weighted mean, never an average of
    averages).
    """

    kind: MetricKind
    female_pct: float | None
    weight: float

    def __post_init__(self):
        if self.female_pct is None:
            if self.weight != 0:
                raise ValueError("undefined metric must carry zero weight")
        else:
            if not 0.0 <= self.female_pct <= 100.0:
                raise ValueError(f"female_pct out of [0, 100]: {self.female_pct}")
            if self.weight <= 0:
                raise ValueError("defined metric must carry positive weight")

    @classmethod
    def undefined(cls, kind: MetricKind) -> "MetricValue":
        return cls(kind, None, 0.0)

    @classmethod
    def from_amounts(cls, kind: MetricKind, female: float, total: float,
                     weight: float | None = None) -> "MetricValue":
        """Metric from raw female/total amounts; undefined when total is 0."""
        if total <= 0:
            return cls.undefined(kind)
        return cls(kind, 100.0 * female / total, total if weight is None else weight)

    @property
    def defined(self) -> bool:
        return self.female_pct is not None

    @property
    def male_pct(self) -> float | None:
        return None if self.female_pct is None else 100.0 - self.female_pct


def merge_metrics(values: Sequence[MetricValue]) -> MetricValue:
    """Weight-exact merge: the weighted mean of the defined inputs.

    Undefined inputs contribute nothing. Commutative and associative up to
    floating-point rounding (compensated summation keeps serial and parallel
    reductions in agreement).
    """
    kinds = {v.kind for v in values}
    if len(kinds) > 1:
        raise ValueError(f"cannot merge metrics of mixed kinds: {sorted(k.value for k in kinds)}")
    defined = [v for v in values if v.defined]
    if not defined:
        if not kinds:
            raise ValueError("cannot merge an empty collection without a kind")
        return MetricValue.undefined(kinds.pop())
    weight = fsum(v.weight for v in defined)
    mass = fsum(v.female_pct * v.weight for v in defined)
    return MetricValue(defined[0].kind, mass / weight, weight)


def classify_audience(program: Program,
                      tz: ZoneInfo = DEFAULT_CORPUS_TZ,
                      windows: dict[Medium, tuple[int, int]] | None = None) -> AudienceSlot:
    """High iff at least half of the program overlaps the medium's peak
    window (ties resolve to High). Windows are local wall-clock hours."""
    if windows is None:
        windows = DEFAULT_PEAK_WINDOWS
    start_hour, end_hour = windows[program.medium]
    duration = (program.end_utc - program.start_utc).total_seconds()
    local_start = program.start_utc.astimezone(tz)
    local_end = program.end_utc.astimezone(tz)

    overlap = 0.0
    day = local_start.date()
    last_day = local_end.date()
    while day <= last_day:
        w_start = datetime.combine(day, time(start_hour), tzinfo=tz)
        w_end = datetime.combine(day, time(end_hour), tzinfo=tz)
        lo = max(program.start_utc, w_start)
        hi = min(program.end_utc, w_end)
        if lo < hi:
            overlap += (hi - lo).total_seconds()
        day = day + timedelta(days=1)
    return AudienceSlot.HIGH if 2.0 * overlap >= duration else AudienceSlot.LOW


def classify_conflict_period(program: Program,
                             cutoff_utc: datetime = DEFAULT_CONFLICT_CUTOFF) -> ConflictPeriod:
    """After iff the program starts at or past the cutoff (closed on the
    After side)."""
    return ConflictPeriod.AFTER if program.start_utc >= cutoff_utc else ConflictPeriod.BEFORE


def round_half_away(value: float, decimals: int = 1) -> float:
    """Round half away from zero (report-table style, unlike banker's
    rounding)."""
    scale = 10 ** decimals
    return math.copysign(math.floor(abs(value) * scale + 0.5), value) / scale
