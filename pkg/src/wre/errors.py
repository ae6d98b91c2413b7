"""Exception hierarchy shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class ParseError(EngineError):
    """Input file could not be parsed. Carries source name and line number."""

    def __init__(self, message: str, *, source: str = "", line: int | None = None):
        self.source = source
        self.line = line
        loc = source
        if line is not None:
            loc = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{loc}: {message}" if loc else message)


class MalformedRecord(ParseError):
    """Record has wrong arity or a non-numeric field."""


class SchemaViolation(ParseError):
    """Record violates the canonical schema (missing/extra fields, out-of-range values)."""


class InvalidEnum(SchemaViolation):
    """Unknown enumeration token."""


class NonMonotoneTimes(SchemaViolation):
    """End timestamp not strictly after start timestamp."""


class DuplicateProgramId(SchemaViolation):
    """Same program_id appears twice."""


class OverlappingSegments(ParseError):
    """Two speech segments of one media overlap."""


class DanglingReference(EngineError):
    """Cross-reference points at an entity that does not exist."""


class MediaMismatch(EngineError):
    """Descriptors from different media timelines were combined."""


class UndefinedRatio(EngineError):
    """A gender ratio was requested where no gendered speech exists."""


class SingleLevelFactor(EngineError):
    """A categorical factor has fewer than two observed levels."""


class RankDeficient(EngineError):
    """Design matrix does not have full column rank."""


class ZeroVariance(EngineError):
    """Response has zero total variance; F statistic undefined."""


class InvalidSpec(EngineError):
    """Synthetic corpus parameters are infeasible or ill-formed."""
