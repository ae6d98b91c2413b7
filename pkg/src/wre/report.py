"""Report tables: the layouts the engine publishes, in aligned-text,
delimited and structured forms.

Six templates:

* table1 - TV content inside programs vs inside commercial breaks, per
  automatic descriptor.
* table2 - women % by medium and audience slot.
* table3 - women % by medium and channel status.
* table4 - TV women % per program category.
* table5 - women % difference in news after the conflict cutoff, by medium
  and status.
* table6 - women first-name % by speaker gender, medium and audience slot
  (from the statistical population).

Percentages are rendered to one decimal, half away from zero; cells without
a defined value render as a dash. Rendering is a pure function of the table
value, so a delimited report parsed back re-renders byte-identically.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from math import fsum
from typing import Mapping, Sequence

from .config import RunConfig
from .ingest import CorpusBundle
from .metrics import GroupResult, aggregate
from .model import Medium, MetricKind, round_half_away
from .stats import AnalysisRow

DASH = "-"

TABLE_TITLES = {
    "table1": "Automatic women presence (%) in TV program content vs in-show advertisements",
    "table2": "Women (%) by medium and audience slot",
    "table3": "Women (%) by medium and channel status",
    "table4": "TV women (%) per program category",
    "table5": "Women (%) difference in news programs after the conflict cutoff",
    "table6": "Women first-name (%) by speaker gender, medium and audience slot",
}

_CATEGORY_LABELS = (("entertainment", "Entertainment"),
                    ("news", "News"),
                    ("magazine_documentary", "Magazine/Documentary"),
                    ("sport", "Sport"))
_MEDIUM_LABELS = {"radio": "Radio", "tv": "TV"}
_METRIC_COLUMNS = (("Manual", MetricKind.WPR), ("Speech", MetricKind.WSR),
                   ("Name", MetricKind.WQR), ("Face", MetricKind.WFR))


@dataclass(frozen=True)
class Table:
    table_id: str
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


def fmt_pct(value: float | None) -> str:
    if value is None:
        return DASH
    return f"{round_half_away(value, 1):.1f}"


def fmt_diff(value: float | None) -> str:
    if value is None:
        return DASH
    rounded = round_half_away(value, 1)
    if rounded > 0:
        return f"+{rounded:.1f}"
    return f"{rounded:.1f}"


def _metric_pct(result: GroupResult | None, kind: MetricKind) -> float | None:
    if result is None:
        return None
    metric = result.metric(kind)
    if metric is None or not metric.defined:
        return None
    return metric.female_pct


def _index_results(results: Sequence[GroupResult], *dims: str) -> dict[tuple, GroupResult]:
    return {tuple(getattr(r.key, d) for d in dims): r for r in results}


def build_table1(bundle: CorpusBundle,
                 name_stats: Mapping, cfg: RunConfig) -> Table:
    tv = [p for p in bundle.programs.values() if p.medium is Medium.TV]
    results = aggregate(bundle, ("ad_context",), name_stats=name_stats,
                        tz=cfg.tz, peak_windows=cfg.peak_windows,
                        conflict_cutoff=cfg.cutoff, programs=tv,
                        min_height=cfg.face_min_height,
                        female_threshold=cfg.face_female_threshold)
    by_context = _index_results(results, "ad_context")
    rows = []
    for label, kind in (("Speech %", MetricKind.WSR),
                        ("Face %", MetricKind.WFR),
                        ("First Names %", MetricKind.WQR)):
        rows.append((label,
                     fmt_pct(_metric_pct(by_context.get(("in_program",)), kind)),
                     fmt_pct(_metric_pct(by_context.get(("in_break",)), kind))))
    return Table("table1", TABLE_TITLES["table1"],
                 ("Descriptor", "TV program", "Advertisements"), tuple(rows))


def _medium_split_table(table_id: str, second_dim: str, second_labels: Sequence[tuple[str, str]],
                        bundle: CorpusBundle, name_stats: Mapping, cfg: RunConfig) -> Table:
    results = aggregate(bundle, ("medium", second_dim), mode=cfg.break_mode,
                        name_stats=name_stats, tz=cfg.tz,
                        peak_windows=cfg.peak_windows, conflict_cutoff=cfg.cutoff,
                        min_height=cfg.face_min_height,
                        female_threshold=cfg.face_female_threshold)
    indexed = _index_results(results, "medium", second_dim)
    rows = []
    for medium in ("radio", "tv"):
        for value, label in second_labels:
            result = indexed.get((medium, value))
            rows.append((_MEDIUM_LABELS[medium], label,
                         *(fmt_pct(_metric_pct(result, kind))
                           for _, kind in _METRIC_COLUMNS)))
    header = ("Media", {"audience": "Audience", "status": "Chan. status"}[second_dim],
              *(name for name, _ in _METRIC_COLUMNS))
    return Table(table_id, TABLE_TITLES[table_id], header, tuple(rows))


def build_table2(bundle, name_stats, cfg: RunConfig) -> Table:
    return _medium_split_table("table2", "audience",
                               (("low", "low"), ("high", "high")),
                               bundle, name_stats, cfg)


def build_table3(bundle, name_stats, cfg: RunConfig) -> Table:
    return _medium_split_table("table3", "status",
                               (("private", "private"), ("public", "public")),
                               bundle, name_stats, cfg)


def build_table4(bundle: CorpusBundle, name_stats: Mapping, cfg: RunConfig) -> Table:
    tv = [p for p in bundle.programs.values() if p.medium is Medium.TV]
    results = aggregate(bundle, ("category",), mode=cfg.break_mode,
                        name_stats=name_stats, tz=cfg.tz,
                        peak_windows=cfg.peak_windows, conflict_cutoff=cfg.cutoff,
                        programs=tv, min_height=cfg.face_min_height,
                        female_threshold=cfg.face_female_threshold)
    indexed = _index_results(results, "category")
    rows = []
    for value, label in _CATEGORY_LABELS:
        result = indexed.get((value,))
        rows.append((label, *(fmt_pct(_metric_pct(result, kind))
                              for _, kind in _METRIC_COLUMNS)))
    return Table("table4", TABLE_TITLES["table4"],
                 ("Program type", *(name for name, _ in _METRIC_COLUMNS)), tuple(rows))


def build_table5(bundle: CorpusBundle, name_stats: Mapping, cfg: RunConfig) -> Table:
    news = [p for p in bundle.programs.values() if p.category.value == "news"]
    results = aggregate(bundle, ("medium", "status", "conflict"), mode=cfg.break_mode,
                        name_stats=name_stats, tz=cfg.tz,
                        peak_windows=cfg.peak_windows, conflict_cutoff=cfg.cutoff,
                        programs=news, min_height=cfg.face_min_height,
                        female_threshold=cfg.face_female_threshold)
    indexed = _index_results(results, "medium", "status", "conflict")
    rows = []
    for medium in ("radio", "tv"):
        for status in ("private", "public"):
            cells = []
            for _, kind in _METRIC_COLUMNS:
                before = _metric_pct(indexed.get((medium, status, "before")), kind)
                after = _metric_pct(indexed.get((medium, status, "after")), kind)
                cells.append(fmt_diff(None if before is None or after is None
                                      else after - before))
            rows.append((_MEDIUM_LABELS[medium], status, *cells))
    return Table("table5", TABLE_TITLES["table5"],
                 ("Media", "Chan. status", *(name for name, _ in _METRIC_COLUMNS)),
                 tuple(rows))


def build_table6(population: Sequence[AnalysisRow]) -> Table:
    groups: dict[tuple[str, str, str], list[float]] = {}
    for row in population:
        key = (row.medium, row.audience, row.speaker_gender)
        groups.setdefault(key, []).append(row.y)

    def mean_pct(medium: str, audience: str, gender: str) -> float | None:
        ys = groups.get((medium, audience, gender))
        if not ys:
            return None
        return 100.0 * fsum(ys) / len(ys)

    rows = []
    for medium in ("radio", "tv"):
        for audience in ("low", "high"):
            rows.append((_MEDIUM_LABELS[medium], audience.capitalize(),
                         fmt_pct(mean_pct(medium, audience, "mostly_female")),
                         fmt_pct(mean_pct(medium, audience, "mostly_male"))))
    return Table("table6", TABLE_TITLES["table6"],
                 ("Media", "Audience", "Female speaker", "Male speaker"), tuple(rows))


def build_table(template: str, bundle: CorpusBundle, name_stats: Mapping,
                cfg: RunConfig, population: Sequence[AnalysisRow]) -> Table:
    if template == "table1":
        return build_table1(bundle, name_stats, cfg)
    if template == "table2":
        return build_table2(bundle, name_stats, cfg)
    if template == "table3":
        return build_table3(bundle, name_stats, cfg)
    if template == "table4":
        return build_table4(bundle, name_stats, cfg)
    if template == "table5":
        return build_table5(bundle, name_stats, cfg)
    if template == "table6":
        return build_table6(population)
    raise ValueError(f"unknown table template {template!r}")


# --- rendering ---

def render_aligned(table: Table) -> str:
    widths = [len(col) for col in table.columns]
    for row in table.rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [table.title,
             "  ".join(col.ljust(widths[i]) for i, col in enumerate(table.columns)).rstrip(),
             "  ".join("-" * w for w in widths)]
    for row in table.rows:
        lines.append("  ".join(cell.ljust(widths[i])
                               for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def render_delimited(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["#table", table.table_id, table.title])
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow(row)
    return buf.getvalue()


def render_structured(table: Table) -> str:
    return json.dumps({"table": table.table_id, "title": table.title,
                       "columns": list(table.columns),
                       "rows": [list(r) for r in table.rows]},
                      ensure_ascii=False, indent=2) + "\n"


def parse_delimited(text: str) -> Table:
    reader = csv.reader(io.StringIO(text))
    meta = next(reader)
    if len(meta) != 3 or meta[0] != "#table":
        raise ValueError("not a delimited report: missing #table header")
    columns = tuple(next(reader))
    rows = tuple(tuple(row) for row in reader if row)
    return Table(table_id=meta[1], title=meta[2], columns=columns, rows=rows)


RENDERERS = {
    "aligned": render_aligned,
    "delimited": render_delimited,
    "structured": render_structured,
}

EXTENSIONS = {"aligned": "txt", "delimited": "csv", "structured": "json"}


def render(table: Table, output_format: str) -> str:
    return RENDERERS[output_format](table)
