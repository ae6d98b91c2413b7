"""Gender-representation estimators for broadcast corpora.

Computes women presence (manual reports), speech time, first-name quotation
and face exposure rates from precomputed descriptor streams, with
commercial-break exclusion, group-by aggregation, and a statistical model of
the effects influencing references to women.
"""

from .model import (  # noqa: F401
    AudienceSlot,
    ChannelReport,
    ChannelStatus,
    ConflictPeriod,
    FaceObservation,
    Medium,
    MetricKind,
    MetricValue,
    NameRecord,
    Program,
    ProgramCategory,
    ReportRole,
    SegmentLabel,
    SpeechSegment,
    TimeInterval,
    Utterance,
    classify_audience,
    classify_conflict_period,
    interval_subtract,
    merge_metrics,
)

__version__ = "0.1.0"
