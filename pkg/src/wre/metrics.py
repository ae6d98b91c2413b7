"""The four representation estimates over arbitrary program subsets, with
commercial-break exclusion and group-by aggregation.

Attribution rules, one per descriptor granularity: speech segments are
clipped to the evaluated spans by overlap, faces attach by frame timestamp,
utterances attach by midpoint. Groups with no defined metric are emitted
with an explicit undefined marker rather than omitted, so report tables show
coverage gaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from math import fsum
from typing import Mapping, Sequence
from zoneinfo import ZoneInfo

from .ingest import CorpusBundle
from .model import (
    DEFAULT_CONFLICT_CUTOFF,
    DEFAULT_CORPUS_TZ,
    ChannelReport,
    FaceObservation,
    Medium,
    MetricKind,
    MetricValue,
    Program,
    SegmentLabel,
    SpeechSegment,
    TimeInterval,
    Utterance,
    classify_audience,
    classify_conflict_period,
    interval_intersect_all,
    interval_subtract,
    merge_metrics,
)
from .namex import UtteranceNameStats

DEFAULT_FACE_MIN_HEIGHT = 0.10
DEFAULT_FACE_FEMALE_THRESHOLD = 0.50


class BreakMode(Enum):
    EXCLUDE_BREAKS = "exclude_breaks"
    ONLY_BREAKS = "only_breaks"
    RAW = "raw"


class AdContext(Enum):
    IN_PROGRAM = "in_program"
    IN_BREAK = "in_break"


GROUP_DIMENSIONS = ("medium", "status", "category", "audience", "conflict",
                    "channel", "ad_context")


@dataclass(frozen=True)
class GroupKey:
    """Values of the grouping dimensions; unset fields are marginalized
    over."""

    medium: str | None = None
    status: str | None = None
    category: str | None = None
    audience: str | None = None
    conflict: str | None = None
    channel: str | None = None
    ad_context: str | None = None

    def sort_key(self) -> tuple[str, ...]:
        return tuple((getattr(self, dim) or "") for dim in GROUP_DIMENSIONS)


@dataclass(frozen=True)
class GroupResult:
    key: GroupKey
    wpr: MetricValue | None
    wsr: MetricValue | None
    wqr: MetricValue | None
    wfr: MetricValue | None

    def metric(self, kind: MetricKind) -> MetricValue | None:
        return getattr(self, kind.value)


def effective_spans(program: Program, breaks: Sequence[TimeInterval],
                    mode: BreakMode) -> list[TimeInterval]:
    """Spans of the program's media timeline to evaluate: the media span
    minus breaks, only the breaks, or the raw span."""
    if mode is BreakMode.RAW:
        return [program.media_span]
    if mode is BreakMode.EXCLUDE_BREAKS:
        return interval_subtract(program.media_span, breaks)
    return interval_intersect_all(program.media_span, breaks)


def compute_wsr(segments: Sequence[SpeechSegment],
                spans: Sequence[TimeInterval]) -> MetricValue:
    """Female share of gendered speech time, segments clipped to the spans.
    Music (including singing voice) and noise are excluded from both sides.
    Weight is the gendered duration in seconds."""
    female_ms = 0
    male_ms = 0
    for seg in segments:
        if seg.label is SegmentLabel.FEMALE_SPEECH:
            female_ms += _overlap_with_spans(seg.span, spans)
        elif seg.label is SegmentLabel.MALE_SPEECH:
            male_ms += _overlap_with_spans(seg.span, spans)
    total = female_ms + male_ms
    if total == 0:
        return MetricValue.undefined(MetricKind.WSR)
    return MetricValue(MetricKind.WSR, 100.0 * female_ms / total, total / 1000.0)


def _overlap_with_spans(span: TimeInterval, spans: Sequence[TimeInterval]) -> int:
    return sum(span.overlap_ms(s) for s in spans)


def _point_in_spans(t_ms: int, spans: Sequence[TimeInterval]) -> bool:
    return any(s.contains_point(t_ms) for s in spans)


def compute_wfr(faces: Sequence[FaceObservation], spans: Sequence[TimeInterval],
                min_height: float = DEFAULT_FACE_MIN_HEIGHT,
                female_threshold: float = DEFAULT_FACE_FEMALE_THRESHOLD) -> MetricValue:
    """Female share of qualifying faces: frame inside the spans and height
    at least ``min_height``. A face counts female iff its score is strictly
    above ``female_threshold`` (ties go male, keeping the rare tie
    deterministic). Weight is the qualifying face count."""
    female = 0
    total = 0
    for face in faces:
        if face.height_ratio < min_height:
            continue
        if not _point_in_spans(face.frame_ms, spans):
            continue
        total += 1
        if face.female_score > female_threshold:
            female += 1
    if total == 0:
        return MetricValue.undefined(MetricKind.WFR)
    return MetricValue(MetricKind.WFR, 100.0 * female / total, float(total))


def compute_wqr(name_stats: Mapping[Utterance, UtteranceNameStats],
                spans: Sequence[TimeInterval]) -> MetricValue:
    """Quotation rate over the hits of utterances whose midpoint lies in the
    spans (an utterance straddling a boundary belongs where its midpoint
    falls). Weight is the hit count."""
    probs: list[float] = []
    for utt, stats in name_stats.items():
        if not stats.hits:
            continue
        if not _point_in_spans(utt.span.midpoint_ms, spans):
            continue
        probs.extend(h.female_prob for h in stats.hits)
    if not probs:
        return MetricValue.undefined(MetricKind.WQR)
    return MetricValue(MetricKind.WQR, 100.0 * fsum(probs) / len(probs), float(len(probs)))


def compute_wpr(reports: Sequence[ChannelReport]) -> MetricValue:
    """Female share of manually reported speaking characters, summed across
    all roles and programs. Weight is the person count."""
    female = sum(r.female_count for r in reports)
    total = female + sum(r.male_count for r in reports)
    if total == 0:
        return MetricValue.undefined(MetricKind.WPR)
    return MetricValue(MetricKind.WPR, 100.0 * female / total, float(total))


@dataclass(frozen=True)
class ProgramMetrics:
    """Per-program metric values for one ad context, the unit that group
    aggregation merges."""

    program: Program
    ad_context: AdContext | None
    wpr: MetricValue
    wsr: MetricValue
    wqr: MetricValue
    wfr: MetricValue | None  # None for radio: the modality does not apply


def _utterance_stats_for_media(name_stats: Mapping[Utterance, UtteranceNameStats],
                               bundle: CorpusBundle) -> dict[str, dict[Utterance, UtteranceNameStats]]:
    per_media: dict[str, dict[Utterance, UtteranceNameStats]] = {}
    for utt, stats in name_stats.items():
        per_media.setdefault(utt.media_id, {})[utt] = stats
    return per_media


def program_metrics(program: Program, bundle: CorpusBundle,
                    name_stats: Mapping[Utterance, UtteranceNameStats],
                    mode: BreakMode = BreakMode.EXCLUDE_BREAKS,
                    *,
                    ad_context: AdContext | None = None,
                    reports_by_program: Mapping[str, list[ChannelReport]] | None = None,
                    media_name_stats: Mapping[str, dict[Utterance, UtteranceNameStats]] | None = None,
                    min_height: float = DEFAULT_FACE_MIN_HEIGHT,
                    female_threshold: float = DEFAULT_FACE_FEMALE_THRESHOLD) -> ProgramMetrics:
    """All four metrics for one program on its effective spans. Manual
    presence is undefined in break context: channel reports cover whole
    programs and cannot be split around advertisements."""
    spans = effective_spans(program, bundle.breaks.get(program.media_id, []), mode)
    segments = bundle.segments.get(program.media_id, [])
    faces = bundle.faces.get(program.media_id, [])
    if media_name_stats is not None:
        stats = media_name_stats.get(program.media_id, {})
    else:
        stats = {u: s for u, s in name_stats.items() if u.media_id == program.media_id}
    if reports_by_program is not None:
        reports = reports_by_program.get(program.program_id, [])
    else:
        reports = [r for r in bundle.reports if r.program_id == program.program_id]

    in_break = ad_context is AdContext.IN_BREAK
    wpr = MetricValue.undefined(MetricKind.WPR) if in_break else compute_wpr(reports)
    wsr = compute_wsr(segments, spans)
    wqr = compute_wqr(stats, spans)
    wfr = None
    if program.medium is Medium.TV:
        wfr = compute_wfr(faces, spans, min_height, female_threshold)
    return ProgramMetrics(program=program, ad_context=ad_context,
                          wpr=wpr, wsr=wsr, wqr=wqr, wfr=wfr)


def aggregate(bundle: CorpusBundle,
              dims: Sequence[str],
              mode: BreakMode = BreakMode.EXCLUDE_BREAKS,
              *,
              name_stats: Mapping[Utterance, UtteranceNameStats] | None = None,
              tz: ZoneInfo = DEFAULT_CORPUS_TZ,
              peak_windows: dict[Medium, tuple[int, int]] | None = None,
              conflict_cutoff: datetime = DEFAULT_CONFLICT_CUTOFF,
              min_height: float = DEFAULT_FACE_MIN_HEIGHT,
              female_threshold: float = DEFAULT_FACE_FEMALE_THRESHOLD,
              weighting: str = "weighted",
              programs: Sequence[Program] | None = None) -> list[GroupResult]:
    """One GroupResult per observed key, in deterministic order.

    Group metrics are weight-exact merges of per-program metrics (a weighted
    mean over each metric's natural weight), so merging is associative and
    never an average of averages. ``weighting="unweighted"`` switches to a
    plain mean of per-program percentages (weight = number of defined
    programs) for sensitivity checks.

    When ``dims`` contains "ad_context", every program contributes once per
    context: its breaks-excluded content and its break content.
    """
    for dim in dims:
        if dim not in GROUP_DIMENSIONS:
            raise ValueError(f"unknown grouping dimension {dim!r} "
                             f"(valid: {', '.join(GROUP_DIMENSIONS)})")
    if weighting not in ("weighted", "unweighted"):
        raise ValueError(f"unknown weighting {weighting!r}")
    if name_stats is None:
        from .namex import build_name_stats
        name_stats = build_name_stats(bundle.utterances, bundle.lexicon)

    reports_by_program: dict[str, list[ChannelReport]] = {}
    for rep in bundle.reports:
        reports_by_program.setdefault(rep.program_id, []).append(rep)
    media_name_stats = _utterance_stats_for_media(name_stats, bundle)

    contexts: list[AdContext | None]
    if "ad_context" in dims:
        contexts = [AdContext.IN_PROGRAM, AdContext.IN_BREAK]
    else:
        contexts = [None]

    selected = bundle.programs.values() if programs is None else programs
    groups: dict[GroupKey, list[ProgramMetrics]] = {}
    for program in selected:
        values = {
            "medium": program.medium.value,
            "status": program.status.value,
            "category": program.category.value,
            "audience": classify_audience(program, tz, peak_windows).value,
            "conflict": classify_conflict_period(program, conflict_cutoff).value,
            "channel": program.channel_id,
        }
        for context in contexts:
            context_mode = mode
            if context is AdContext.IN_PROGRAM:
                context_mode = BreakMode.EXCLUDE_BREAKS
            elif context is AdContext.IN_BREAK:
                context_mode = BreakMode.ONLY_BREAKS
            pm = program_metrics(program, bundle, name_stats, context_mode,
                                 ad_context=context,
                                 reports_by_program=reports_by_program,
                                 media_name_stats=media_name_stats,
                                 min_height=min_height,
                                 female_threshold=female_threshold)
            key = GroupKey(**{dim: (context.value if dim == "ad_context" else values[dim])
                              for dim in dims})
            groups.setdefault(key, []).append(pm)

    results = []
    for key in sorted(groups, key=GroupKey.sort_key):
        members = groups[key]
        results.append(GroupResult(
            key=key,
            wpr=_merge_group([pm.wpr for pm in members], MetricKind.WPR, weighting),
            wsr=_merge_group([pm.wsr for pm in members], MetricKind.WSR, weighting),
            wqr=_merge_group([pm.wqr for pm in members], MetricKind.WQR, weighting),
            wfr=_merge_group([pm.wfr for pm in members if pm.wfr is not None],
                             MetricKind.WFR, weighting, absent_ok=True),
        ))
    return results


def _merge_group(values: list[MetricValue], kind: MetricKind, weighting: str,
                 absent_ok: bool = False) -> MetricValue | None:
    if not values:
        return None if absent_ok else MetricValue.undefined(kind)
    if weighting == "unweighted":
        defined = [v.female_pct for v in values if v.defined]
        if not defined:
            return MetricValue.undefined(kind)
        return MetricValue(kind, fsum(defined) / len(defined), float(len(defined)))
    return merge_metrics(values)
