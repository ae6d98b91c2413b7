"""Fusion of utterances with speaker-gender segments.

Computes per-utterance voice-activity and gender ratios, classifies the
utterance's speaker gender, and selects the statistical population for the
quotation-effects analysis (utterances with at least one first name, a
minimum voice activity ratio, and a non-ambiguous speaker gender).
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Mapping, Sequence
from zoneinfo import ZoneInfo

from .errors import MediaMismatch, UndefinedRatio
from .ingest import CorpusBundle
from .model import (
    DEFAULT_CONFLICT_CUTOFF,
    DEFAULT_CORPUS_TZ,
    Medium,
    Program,
    SegmentLabel,
    SpeechSegment,
    Utterance,
    classify_audience,
    classify_conflict_period,
)
from .namex import UtteranceNameStats
from .stats import AnalysisRow

DEFAULT_VAD_MIN = 0.50
DEFAULT_GENDER_LOW = 0.20
DEFAULT_GENDER_HIGH = 0.80


class SpeakerGenderClass(Enum):
    MOSTLY_MALE = "mostly_male"
    MOSTLY_FEMALE = "mostly_female"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class UtteranceAlignment:
    """Durations partitioning the utterance span by segment label. The five
    fields always sum exactly to the span duration."""

    utterance: Utterance
    male_ms: int
    female_ms: int
    music_ms: int
    noise_ms: int
    unlabeled_ms: int

    @property
    def span_ms(self) -> int:
        return self.utterance.span.duration_ms

    @property
    def vad_ratio(self) -> float:
        return (self.male_ms + self.female_ms) / self.span_ms

    @property
    def female_speech_ratio(self) -> float | None:
        gendered = self.male_ms + self.female_ms
        if gendered == 0:
            return None
        return self.female_ms / gendered


def align_utterance(utterance: Utterance, segments: Sequence[SpeechSegment]) -> UtteranceAlignment:
    """Overlap length between the utterance span and each segment label.

    ``segments`` must be sorted, non-overlapping, and on the utterance's
    media timeline (the ingest invariants).
    """
    span = utterance.span
    per_label = {label: 0 for label in SegmentLabel}
    # Skip segments that end at or before the utterance start.
    starts = [seg.span.start_ms for seg in segments]
    idx = bisect_left(starts, span.start_ms)
    if idx > 0 and segments[idx - 1].span.end_ms > span.start_ms:
        idx -= 1
    for seg in segments[idx:]:
        if seg.media_id != utterance.media_id:
            raise MediaMismatch(
                f"segment media {seg.media_id!r} != utterance media {utterance.media_id!r}")
        if seg.span.start_ms >= span.end_ms:
            break
        per_label[seg.label] += span.overlap_ms(seg.span)
    labeled = sum(per_label.values())
    return UtteranceAlignment(
        utterance=utterance,
        male_ms=per_label[SegmentLabel.MALE_SPEECH],
        female_ms=per_label[SegmentLabel.FEMALE_SPEECH],
        music_ms=per_label[SegmentLabel.MUSIC],
        noise_ms=per_label[SegmentLabel.NOISE],
        unlabeled_ms=span.duration_ms - labeled,
    )


def classify_speaker_gender(alignment: UtteranceAlignment,
                            low: float = DEFAULT_GENDER_LOW,
                            high: float = DEFAULT_GENDER_HIGH) -> SpeakerGenderClass:
    """Mostly-male below ``low``, mostly-female above ``high``, ambiguous
    between; both comparisons strict, so the boundary values are ambiguous."""
    ratio = alignment.female_speech_ratio
    if ratio is None:
        raise UndefinedRatio("no gendered speech overlaps the utterance")
    if ratio < low:
        return SpeakerGenderClass.MOSTLY_MALE
    if ratio > high:
        return SpeakerGenderClass.MOSTLY_FEMALE
    return SpeakerGenderClass.AMBIGUOUS


def _program_for_midpoint(programs: Sequence[Program], midpoint_ms: int) -> Program | None:
    for program in programs:
        if program.media_span.contains_point(midpoint_ms):
            return program
    return None


def select_stats_population(bundle: CorpusBundle,
                            name_stats: Mapping[Utterance, UtteranceNameStats],
                            *,
                            vad_min: float = DEFAULT_VAD_MIN,
                            gender_low: float = DEFAULT_GENDER_LOW,
                            gender_high: float = DEFAULT_GENDER_HIGH,
                            tz: ZoneInfo = DEFAULT_CORPUS_TZ,
                            peak_windows: dict[Medium, tuple[int, int]] | None = None,
                            conflict_cutoff: datetime = DEFAULT_CONFLICT_CUTOFF) -> list[AnalysisRow]:
    """Analysis rows for utterances that carry at least one name hit, reach
    the minimum voice activity ratio, and have a non-ambiguous speaker
    gender. Each row carries the response (mean female name probability) and
    the seven categorical factors.

    Utterances attach to the program whose media span contains their
    midpoint. Output is deterministic: sorted by (program_id, start_ms).
    """
    media_to_programs: dict[str, list[Program]] = {}
    for program in bundle.programs.values():
        media_to_programs.setdefault(program.media_id, []).append(program)

    program_factors: dict[str, tuple[str, str, str, str, str, str]] = {}

    def factors_of(program: Program) -> tuple[str, str, str, str, str, str]:
        cached = program_factors.get(program.program_id)
        if cached is None:
            cached = (
                program.medium.value,
                program.channel_id,
                program.status.value,
                program.category.value,
                classify_audience(program, tz, peak_windows).value,
                classify_conflict_period(program, conflict_cutoff).value,
            )
            program_factors[program.program_id] = cached
        return cached

    keyed: list[tuple[tuple[str, int], AnalysisRow]] = []
    for utt, stats in name_stats.items():
        if not stats.hits:
            continue
        segments = bundle.segments.get(utt.media_id, [])
        alignment = align_utterance(utt, segments)
        if alignment.vad_ratio < vad_min:
            continue
        if alignment.female_speech_ratio is None:
            continue
        gender = classify_speaker_gender(alignment, gender_low, gender_high)
        if gender is SpeakerGenderClass.AMBIGUOUS:
            continue
        program = _program_for_midpoint(media_to_programs.get(utt.media_id, []),
                                        utt.span.midpoint_ms)
        if program is None:
            continue
        medium, channel, status, category, audience, conflict = factors_of(program)
        row = AnalysisRow(
            y=stats.mean_female_prob,
            medium=medium, channel=channel, status=status, category=category,
            audience=audience, conflict=conflict, speaker_gender=gender.value,
        )
        keyed.append(((program.program_id, utt.span.start_ms), row))
    keyed.sort(key=lambda item: item[0])
    return [row for _, row in keyed]
