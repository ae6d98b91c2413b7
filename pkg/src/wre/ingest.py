"""Parsing and validation of all external inputs.

Canonical formats:

* names DB: ``;``-separated text with header, columns
  ``sexe;preusuel;annais;nombre`` (sex code 1=male / 2=female, rare-name
  sentinel rows skipped). Mirrors the public INSEE first-names export.
* programs.csv, reports.csv, breaks.csv: comma-separated with header,
  timestamps ISO-8601 with explicit offset.
* segments.jsonl, utterances.jsonl, faces.jsonl: one JSON record per line
  with exactly the fields of the corresponding domain type (snake_case keys,
  integer milliseconds, decimal fractions for ratios).

All parsers are strict and fail fast with a location; semantic findings
(program with no descriptors, ...) accumulate as warnings in
:func:`validate_bundle`. Silent data loss would bias the estimators.
"""

from __future__ import annotations

import csv
import io
import json
import unicodedata
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import IO, Iterable, Mapping

from .errors import (
    DanglingReference,
    DuplicateProgramId,
    InvalidEnum,
    MalformedRecord,
    NonMonotoneTimes,
    OverlappingSegments,
    SchemaViolation,
)
from .model import (
    ChannelReport,
    ChannelStatus,
    FaceObservation,
    Medium,
    NameRecord,
    Program,
    ProgramCategory,
    ReportRole,
    SegmentLabel,
    SpeechSegment,
    TimeInterval,
    Utterance,
)

NAME_DB_HEADER = ["sexe", "preusuel", "annais", "nombre"]
RARE_NAME_SENTINEL = "_PRENOMS_RARES"

PROGRAMS_HEADER = ["program_id", "channel_id", "medium", "status", "category",
                   "start_utc", "end_utc", "media_id", "media_start_ms", "media_end_ms"]
REPORTS_HEADER = ["program_id", "role", "male_count", "female_count"]
BREAKS_HEADER = ["media_id", "start_ms", "end_ms"]

SEGMENT_FIELDS = {"media_id", "start_ms", "end_ms", "label"}
UTTERANCE_FIELDS = {"media_id", "start_ms", "end_ms", "text"}
FACE_FIELDS = {"media_id", "frame_ms", "height_ratio", "female_score"}


def canonical_name(raw: str) -> str:
    """Canonical form of a first name: NFC, then each hyphen-separated part
    gets an uppercase initial and lowercase remainder ("jean-PIERRE" ->
    "Jean-Pierre"). Accents are significant."""
    nfc = unicodedata.normalize("NFC", raw.strip())
    parts = [p[:1].upper() + p[1:].lower() for p in nfc.split("-")]
    return "-".join(parts)


@dataclass(frozen=True)
class NameLexicon:
    """Lookup from canonical first name to its aggregated record."""

    records: Mapping[str, NameRecord]

    def __len__(self) -> int:
        return len(self.records)

    def get(self, token: str) -> NameRecord | None:
        return self.records.get(canonical_name(token))

    def __contains__(self, token: str) -> bool:
        return canonical_name(token) in self.records


def parse_name_db(stream: IO[str], source: str = "names") -> NameLexicon:
    """Aggregate the name database across years and sexes into one record
    per canonical name."""
    male: dict[str, int] = {}
    female: dict[str, int] = {}
    first = True
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\n").rstrip("\r")
        if first:
            first = False
            # Header row; tolerate cosmetic variations but require 4 columns.
            if len(line.split(";")) != 4:
                raise MalformedRecord("header must have 4 ';'-separated columns",
                                      source=source, line=lineno)
            continue
        if not line:
            continue
        fields = line.split(";")
        if len(fields) != 4:
            raise MalformedRecord(f"expected 4 fields, got {len(fields)}",
                                  source=source, line=lineno)
        sex_code, raw_name, _year, count_str = fields
        if raw_name == RARE_NAME_SENTINEL:
            continue
        if sex_code not in ("1", "2"):
            raise MalformedRecord(f"sex code must be 1 or 2, got {sex_code!r}",
                                  source=source, line=lineno)
        try:
            count = int(count_str)
        except ValueError:
            raise MalformedRecord(f"non-numeric count {count_str!r}",
                                  source=source, line=lineno) from None
        if count < 0:
            raise MalformedRecord(f"negative count {count}", source=source, line=lineno)
        name = canonical_name(raw_name)
        if not name:
            raise MalformedRecord("empty name", source=source, line=lineno)
        bucket = male if sex_code == "1" else female
        bucket[name] = bucket.get(name, 0) + count

    records: dict[str, NameRecord] = {}
    for name in sorted(set(male) | set(female)):
        m = male.get(name, 0)
        f = female.get(name, 0)
        total = m + f
        if total == 0:
            continue
        records[name] = NameRecord(name=name, total_count=total, female_prob=f / total)
    return NameLexicon(records)


def _read_csv(stream: IO[str], header: list[str], source: str):
    reader = csv.reader(stream)
    rows = iter(reader)
    try:
        got = next(rows)
    except StopIteration:
        raise MalformedRecord("missing header row", source=source, line=1) from None
    if got != header:
        raise SchemaViolation(f"header mismatch: expected {header}, got {got}",
                              source=source, line=1)
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRecord(f"expected {len(header)} fields, got {len(row)}",
                                  source=source, line=lineno)
        yield lineno, row


def _parse_enum(enum_cls, token: str, what: str, source: str, lineno: int):
    try:
        return enum_cls(token)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise InvalidEnum(f"unknown {what} {token!r} (valid: {valid})",
                          source=source, line=lineno) from None


def _parse_int(token: str, what: str, source: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise MalformedRecord(f"non-numeric {what} {token!r}",
                              source=source, line=lineno) from None


def _parse_timestamp(token: str, what: str, source: str, lineno: int) -> datetime:
    try:
        value = datetime.fromisoformat(token.replace("Z", "+00:00"))
    except ValueError:
        raise MalformedRecord(f"invalid {what} timestamp {token!r}",
                              source=source, line=lineno) from None
    if value.tzinfo is None:
        raise SchemaViolation(f"{what} timestamp {token!r} lacks a UTC offset",
                              source=source, line=lineno)
    return value


def parse_programs(stream: IO[str], source: str = "programs.csv") -> dict[str, Program]:
    programs: dict[str, Program] = {}
    for lineno, row in _read_csv(stream, PROGRAMS_HEADER, source):
        (program_id, channel_id, medium_tok, status_tok, category_tok,
         start_tok, end_tok, media_id, mstart_tok, mend_tok) = row
        medium = _parse_enum(Medium, medium_tok, "medium", source, lineno)
        status = _parse_enum(ChannelStatus, status_tok, "status", source, lineno)
        category = _parse_enum(ProgramCategory, category_tok, "category", source, lineno)
        start_utc = _parse_timestamp(start_tok, "start_utc", source, lineno)
        end_utc = _parse_timestamp(end_tok, "end_utc", source, lineno)
        if end_utc <= start_utc:
            raise NonMonotoneTimes(f"program {program_id}: end_utc <= start_utc",
                                   source=source, line=lineno)
        if program_id in programs:
            raise DuplicateProgramId(f"duplicate program_id {program_id!r}",
                                     source=source, line=lineno)
        mstart = _parse_int(mstart_tok, "media_start_ms", source, lineno)
        mend = _parse_int(mend_tok, "media_end_ms", source, lineno)
        try:
            program = Program(program_id=program_id, channel_id=channel_id,
                              medium=medium, status=status, category=category,
                              start_utc=start_utc, end_utc=end_utc,
                              media_id=media_id, media_span=TimeInterval(mstart, mend))
        except ValueError as exc:
            raise SchemaViolation(str(exc), source=source, line=lineno) from None
        programs[program_id] = program
    return programs


def parse_reports(stream: IO[str], source: str = "reports.csv") -> list[ChannelReport]:
    reports: list[ChannelReport] = []
    seen: set[tuple[str, ReportRole]] = set()
    for lineno, row in _read_csv(stream, REPORTS_HEADER, source):
        program_id, role_tok, male_tok, female_tok = row
        role = _parse_enum(ReportRole, role_tok, "role", source, lineno)
        male_count = _parse_int(male_tok, "male_count", source, lineno)
        female_count = _parse_int(female_tok, "female_count", source, lineno)
        if male_count < 0 or female_count < 0:
            raise SchemaViolation("negative count", source=source, line=lineno)
        key = (program_id, role)
        if key in seen:
            raise SchemaViolation(f"duplicate report for ({program_id}, {role.value})",
                                  source=source, line=lineno)
        seen.add(key)
        reports.append(ChannelReport(program_id=program_id, role=role,
                                     male_count=male_count, female_count=female_count))
    return reports


def parse_breaks(stream: IO[str], source: str = "breaks.csv") -> dict[str, list[TimeInterval]]:
    breaks: dict[str, list[TimeInterval]] = {}
    for lineno, row in _read_csv(stream, BREAKS_HEADER, source):
        media_id, start_tok, end_tok = row
        start_ms = _parse_int(start_tok, "start_ms", source, lineno)
        end_ms = _parse_int(end_tok, "end_ms", source, lineno)
        try:
            interval = TimeInterval(start_ms, end_ms)
        except ValueError as exc:
            raise SchemaViolation(str(exc), source=source, line=lineno) from None
        breaks.setdefault(media_id, []).append(interval)
    for media_id in breaks:
        breaks[media_id].sort(key=lambda iv: (iv.start_ms, iv.end_ms))
    return breaks


def _read_jsonl(stream: IO[str], fields: set[str], source: str):
    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"invalid JSON: {exc.msg}", source=source, line=lineno) from None
        if not isinstance(record, dict):
            raise SchemaViolation("record must be a JSON object", source=source, line=lineno)
        missing = fields - record.keys()
        extra = record.keys() - fields
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"missing {sorted(missing)}")
            if extra:
                parts.append(f"unexpected {sorted(extra)}")
            raise SchemaViolation("; ".join(parts), source=source, line=lineno)
        yield lineno, record


def _require_int(record: dict, key: str, source: str, lineno: int) -> int:
    value = record[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise SchemaViolation(f"{key} must be an integer, got {value!r}",
                              source=source, line=lineno)
    return value


def _require_str(record: dict, key: str, source: str, lineno: int) -> str:
    value = record[key]
    if not isinstance(value, str):
        raise SchemaViolation(f"{key} must be a string, got {value!r}",
                              source=source, line=lineno)
    return value


def _require_number(record: dict, key: str, source: str, lineno: int) -> float:
    value = record[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(f"{key} must be a number, got {value!r}",
                              source=source, line=lineno)
    return float(value)


def _span(record: dict, source: str, lineno: int) -> TimeInterval:
    start_ms = _require_int(record, "start_ms", source, lineno)
    end_ms = _require_int(record, "end_ms", source, lineno)
    try:
        return TimeInterval(start_ms, end_ms)
    except ValueError as exc:
        raise SchemaViolation(str(exc), source=source, line=lineno) from None


def parse_segments(stream: IO[str], source: str = "segments.jsonl") -> dict[str, list[SpeechSegment]]:
    segments: dict[str, list[SpeechSegment]] = {}
    for lineno, record in _read_jsonl(stream, SEGMENT_FIELDS, source):
        media_id = _require_str(record, "media_id", source, lineno)
        span = _span(record, source, lineno)
        label_tok = _require_str(record, "label", source, lineno)
        label = _parse_enum(SegmentLabel, label_tok, "label", source, lineno)
        segments.setdefault(media_id, []).append(
            SpeechSegment(media_id=media_id, span=span, label=label))
    for media_id, segs in segments.items():
        segs.sort(key=lambda s: (s.span.start_ms, s.span.end_ms))
        for prev, cur in zip(segs, segs[1:]):
            if cur.span.start_ms < prev.span.end_ms:
                raise OverlappingSegments(
                    f"media {media_id}: segments [{prev.span.start_ms},{prev.span.end_ms}) "
                    f"and [{cur.span.start_ms},{cur.span.end_ms}) overlap",
                    source=source)
    return segments


def parse_utterances(stream: IO[str], source: str = "utterances.jsonl") -> dict[str, list[Utterance]]:
    utterances: dict[str, list[Utterance]] = {}
    for lineno, record in _read_jsonl(stream, UTTERANCE_FIELDS, source):
        media_id = _require_str(record, "media_id", source, lineno)
        span = _span(record, source, lineno)
        text = _require_str(record, "text", source, lineno)
        if not text.strip():
            raise SchemaViolation("text empty after trimming", source=source, line=lineno)
        utterances.setdefault(media_id, []).append(
            Utterance(media_id=media_id, span=span, text=text))
    for media_id in utterances:
        utterances[media_id].sort(key=lambda u: (u.span.start_ms, u.span.end_ms))
    return utterances


def parse_faces(stream: IO[str], source: str = "faces.jsonl") -> dict[str, list[FaceObservation]]:
    faces: dict[str, list[FaceObservation]] = {}
    for lineno, record in _read_jsonl(stream, FACE_FIELDS, source):
        media_id = _require_str(record, "media_id", source, lineno)
        frame_ms = _require_int(record, "frame_ms", source, lineno)
        height_ratio = _require_number(record, "height_ratio", source, lineno)
        female_score = _require_number(record, "female_score", source, lineno)
        try:
            face = FaceObservation(media_id=media_id, frame_ms=frame_ms,
                                   height_ratio=height_ratio, female_score=female_score)
        except ValueError as exc:
            raise SchemaViolation(str(exc), source=source, line=lineno) from None
        faces.setdefault(media_id, []).append(face)
    for media_id in faces:
        faces[media_id].sort(key=lambda f: f.frame_ms)
    return faces


@dataclass(frozen=True)
class CorpusBundle:
    """All parsed inputs of one corpus. Immutable after validation."""

    programs: dict[str, Program]
    reports: list[ChannelReport]
    breaks: dict[str, list[TimeInterval]]
    segments: dict[str, list[SpeechSegment]]
    utterances: dict[str, list[Utterance]]
    faces: dict[str, list[FaceObservation]]
    lexicon: NameLexicon

    def media_ids(self) -> set[str]:
        return {p.media_id for p in self.programs.values()}

    def programs_for_media(self, media_id: str) -> list[Program]:
        return [p for p in self.programs.values() if p.media_id == media_id]


@dataclass
class ValidationReport:
    counts: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return True  # fatal problems raise; a report means the bundle is usable


def validate_bundle(bundle: CorpusBundle) -> ValidationReport:
    """Cross-reference checks. Raises DanglingReference on fatal problems;
    accumulates semantic warnings. Never mutates the bundle."""
    report = ValidationReport()
    known_media = bundle.media_ids()

    for rep in bundle.reports:
        if rep.program_id not in bundle.programs:
            raise DanglingReference(
                f"report references unknown program {rep.program_id!r}")
    for kind, per_media in (("segments", bundle.segments),
                            ("utterances", bundle.utterances),
                            ("faces", bundle.faces),
                            ("breaks", bundle.breaks)):
        for media_id in per_media:
            if media_id not in known_media:
                raise DanglingReference(
                    f"{kind} reference media {media_id!r} not linked to any program")

    reported = {rep.program_id for rep in bundle.reports}
    for program in bundle.programs.values():
        media = program.media_id
        if not bundle.utterances.get(media):
            report.warnings.append(f"program {program.program_id}: no utterances")
        if not bundle.segments.get(media):
            report.warnings.append(f"program {program.program_id}: no speech segments")
        if program.medium is Medium.TV and not bundle.faces.get(media):
            report.warnings.append(f"program {program.program_id}: TV program without faces")
        if program.program_id not in reported:
            report.warnings.append(f"program {program.program_id}: no channel report")

    report.counts = {
        "programs": len(bundle.programs),
        "reports": len(bundle.reports),
        "media": len(known_media),
        "segments": sum(len(v) for v in bundle.segments.values()),
        "utterances": sum(len(v) for v in bundle.utterances.values()),
        "faces": sum(len(v) for v in bundle.faces.values()),
        "breaks": sum(len(v) for v in bundle.breaks.values()),
        "lexicon_names": len(bundle.lexicon),
    }
    return report


# --- serialization (canonical formats; synthgen writes through these) ---

def serialize_name_db(lexicon: NameLexicon, stream: IO[str]) -> None:
    stream.write(";".join(NAME_DB_HEADER) + "\n")
    for name in sorted(lexicon.records):
        record = lexicon.records[name]
        female = round(record.female_prob * record.total_count)
        male = record.total_count - female
        if male:
            stream.write(f"1;{name};XXXX;{male}\n")
        if female:
            stream.write(f"2;{name};XXXX;{female}\n")


def serialize_programs(programs: Mapping[str, Program], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(PROGRAMS_HEADER)
    for program in programs.values():
        writer.writerow([
            program.program_id, program.channel_id, program.medium.value,
            program.status.value, program.category.value,
            program.start_utc.isoformat(), program.end_utc.isoformat(),
            program.media_id, program.media_span.start_ms, program.media_span.end_ms,
        ])


def serialize_reports(reports: Iterable[ChannelReport], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(REPORTS_HEADER)
    for rep in reports:
        writer.writerow([rep.program_id, rep.role.value, rep.male_count, rep.female_count])


def serialize_breaks(breaks: Mapping[str, list[TimeInterval]], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(BREAKS_HEADER)
    for media_id in sorted(breaks):
        for iv in breaks[media_id]:
            writer.writerow([media_id, iv.start_ms, iv.end_ms])


def _write_jsonl(stream: IO[str], records: Iterable[dict]) -> None:
    for record in records:
        stream.write(json.dumps(record, ensure_ascii=False) + "\n")


def serialize_segments(segments: Mapping[str, list[SpeechSegment]], stream: IO[str]) -> None:
    _write_jsonl(stream, ({"media_id": s.media_id, "start_ms": s.span.start_ms,
                           "end_ms": s.span.end_ms, "label": s.label.value}
                          for media_id in sorted(segments) for s in segments[media_id]))


def serialize_utterances(utterances: Mapping[str, list[Utterance]], stream: IO[str]) -> None:
    _write_jsonl(stream, ({"media_id": u.media_id, "start_ms": u.span.start_ms,
                           "end_ms": u.span.end_ms, "text": u.text}
                          for media_id in sorted(utterances) for u in utterances[media_id]))


def serialize_faces(faces: Mapping[str, list[FaceObservation]], stream: IO[str]) -> None:
    _write_jsonl(stream, ({"media_id": f.media_id, "frame_ms": f.frame_ms,
                           "height_ratio": f.height_ratio, "female_score": f.female_score}
                          for media_id in sorted(faces) for f in faces[media_id]))


# --- bundle-level file I/O ---

@dataclass(frozen=True)
class BundlePaths:
    programs: Path
    reports: Path
    breaks: Path
    segments: Path
    utterances: Path
    faces: Path
    names: Path

    @classmethod
    def for_dir(cls, root: str | Path) -> "BundlePaths":
        root = Path(root)
        return cls(programs=root / "programs.csv", reports=root / "reports.csv",
                   breaks=root / "breaks.csv", segments=root / "segments.jsonl",
                   utterances=root / "utterances.jsonl", faces=root / "faces.jsonl",
                   names=root / "names.csv")

    def all_files(self) -> list[Path]:
        return [self.programs, self.reports, self.breaks, self.segments,
                self.utterances, self.faces, self.names]


def write_bundle(bundle: CorpusBundle, paths: BundlePaths | str | Path) -> BundlePaths:
    if not isinstance(paths, BundlePaths):
        Path(paths).mkdir(parents=True, exist_ok=True)
        paths = BundlePaths.for_dir(paths)
    with open(paths.programs, "w", encoding="utf-8", newline="") as fh:
        serialize_programs(bundle.programs, fh)
    with open(paths.reports, "w", encoding="utf-8", newline="") as fh:
        serialize_reports(bundle.reports, fh)
    with open(paths.breaks, "w", encoding="utf-8", newline="") as fh:
        serialize_breaks(bundle.breaks, fh)
    with open(paths.segments, "w", encoding="utf-8") as fh:
        serialize_segments(bundle.segments, fh)
    with open(paths.utterances, "w", encoding="utf-8") as fh:
        serialize_utterances(bundle.utterances, fh)
    with open(paths.faces, "w", encoding="utf-8") as fh:
        serialize_faces(bundle.faces, fh)
    with open(paths.names, "w", encoding="utf-8") as fh:
        serialize_name_db(bundle.lexicon, fh)
    return paths


def read_bundle(paths: BundlePaths | str | Path) -> CorpusBundle:
    if not isinstance(paths, BundlePaths):
        paths = BundlePaths.for_dir(paths)
    with open(paths.programs, encoding="utf-8", newline="") as fh:
        programs = parse_programs(fh, source=str(paths.programs))
    with open(paths.reports, encoding="utf-8", newline="") as fh:
        reports = parse_reports(fh, source=str(paths.reports))
    with open(paths.breaks, encoding="utf-8", newline="") as fh:
        breaks = parse_breaks(fh, source=str(paths.breaks))
    with open(paths.segments, encoding="utf-8") as fh:
        segments = parse_segments(fh, source=str(paths.segments))
    with open(paths.utterances, encoding="utf-8") as fh:
        utterances = parse_utterances(fh, source=str(paths.utterances))
    with open(paths.faces, encoding="utf-8") as fh:
        faces = parse_faces(fh, source=str(paths.faces))
    with open(paths.names, encoding="utf-8") as fh:
        lexicon = parse_name_db(fh, source=str(paths.names))
    return CorpusBundle(programs=programs, reports=reports, breaks=breaks,
                        segments=segments, utterances=utterances, faces=faces,
                        lexicon=lexicon)


def lexicon_from_counts(counts: Mapping[str, tuple[int, int]]) -> NameLexicon:
    """Build a lexicon from {name: (male_count, female_count)} pairs.
    Convenience for fixtures and generated corpora."""
    records: dict[str, NameRecord] = {}
    for raw, (male, female) in counts.items():
        name = canonical_name(raw)
        total = male + female
        records[name] = NameRecord(name=name, total_count=total, female_prob=female / total)
    return NameLexicon(dict(sorted(records.items())))


def lexicon_to_text(lexicon: NameLexicon) -> str:
    buf = io.StringIO()
    serialize_name_db(lexicon, buf)
    return buf.getvalue()
