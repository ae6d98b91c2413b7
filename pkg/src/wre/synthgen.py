"""Seeded synthetic-corpus generator.

Produces canonical bundle files with configurable ground-truth rates and a
manifest recording the exact realized counts and durations per
(medium, status, category, slot) cell and ad context. Amounts are
constructed, not sampled post hoc, so the engine's recomputation must match
the manifest exactly; rate targets are hit to within one rounding unit of
the relevant weight.

The bundled fixture lexicon keeps tests hermetic: a curated set of names
with known attribution fractions plus a grid of synthetic names whose
female probability is k/grid, which lets the generator plant any response
value on the grid.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta
from math import floor, fsum
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from zoneinfo import ZoneInfo

from .errors import InvalidSpec
from .ingest import CorpusBundle, NameLexicon, lexicon_from_counts, write_bundle
from .model import (
    ChannelReport,
    ChannelStatus,
    FaceObservation,
    Medium,
    Program,
    ProgramCategory,
    ReportRole,
    SegmentLabel,
    SpeechSegment,
    TimeInterval,
    Utterance,
    interval_subtract,
)

Cell = tuple[str, str, str, str]  # (medium, status, category, slot) tokens

MEDIA_TOKENS = tuple(sorted(m.value for m in Medium))
STATUS_TOKENS = tuple(sorted(s.value for s in ChannelStatus))
CATEGORY_TOKENS = tuple(sorted(c.value for c in ProgramCategory))
SLOT_TOKENS = ("high", "low")

ALL_CELLS: tuple[Cell, ...] = tuple(
    (m, s, c, a)
    for m in MEDIA_TOKENS for s in STATUS_TOKENS
    for c in CATEGORY_TOKENS for a in SLOT_TOKENS
)

CELL_DIMS = ("medium", "status", "category", "audience")
OVERRIDE_DIMS = CELL_DIMS + ("conflict", "speaker_gender")

METRIC_KEYS = ("wpr", "wsr", "wqr", "wfr")

ROLES = tuple(ReportRole)

_TZ = ZoneInfo("Europe/Paris")

POP_UTT_MS = 4_000
QUOTE_UTT_MS = 3_000
QUOTE_SLOT_MS = 4_000
QUOTE_EVERY_MS = 20_000
FACE_EVERY_MS = 5_000
BREAK_LEN_MS = 60_000

HALLUCINATION_DECOY = "Sous-titrage réalisé par la communauté d'Amara.org"
LOWERCASE_DECOY = "on reprend dans un instant."

CURATED_NAME_COUNTS: dict[str, tuple[int, int]] = {
    # name: (male_count, female_count); probabilities are exact fractions
    "Claude": (880, 120),
    "Camille": (450, 550),
    "Dominique": (700, 300),
    "Sacha": (750, 250),
    "Charlie": (650, 350),
    "Morgan": (800, 200),
    "Lou": (300, 700),
    "Alix": (400, 600),
    "Andrea": (500, 500),
    "Marie": (2, 998),
    "Zoé": (0, 100),
    "Léa": (0, 100),
    "Anne": (10, 990),
    "Julie": (5, 995),
    "Sophie": (2, 998),
    "Isabelle": (1, 999),
    "Ségolène": (0, 100),
    "Vladimir": (1000, 0),
    "Gazi": (100, 0),
    "Mustafa": (1000, 0),
    "Kemal": (100, 0),
    "Bachar": (100, 0),
    "Benyamin": (100, 0),
    "Jean": (995, 5),
    "Pierre": (998, 2),
    "Jean-Pierre": (1000, 0),
    "Nicolas": (996, 4),
    "François": (998, 2),
    "Emmanuel": (990, 10),
    "Michel": (980, 20),
    "Philippe": (999, 1),
    "Thomas": (997, 3),
    "Antoine": (999, 1),
    "Hugo": (998, 2),
    "Louis": (995, 5),
    "Niagara": (0, 50),
    "Tennessee": (40, 10),
    "Wagner": (50, 0),
}


def grid_name(k: int) -> str:
    return f"Nomo{k:03d}"


def fixture_lexicon(grid: int = 200) -> NameLexicon:
    """Curated names plus synthetic grid names with female probability
    k/grid for k in 0..grid."""
    counts = dict(CURATED_NAME_COUNTS)
    for k in range(grid + 1):
        counts[grid_name(k)] = ((grid - k) * 5, k * 5)
    return lexicon_from_counts(counts)


@dataclass(frozen=True)
class RateOverride:
    """Overrides the rate targets of every cell matching ``match`` (a subset
    of the cell dimensions); ``context`` restricts to program or break
    content, None applies to both."""

    match: tuple[tuple[str, str], ...]
    rates: tuple[tuple[str, float], ...]
    context: str | None = None  # "program" | "break" | None


@dataclass(frozen=True)
class MeanOverride:
    """Planted response mean for population rows whose factor profile
    matches (dims from medium/status/category/audience/conflict/
    speaker_gender); the last matching override wins."""

    match: tuple[tuple[str, str], ...]
    mean: float


@dataclass(frozen=True)
class PlantedEffects:
    """Ground-truth effects for the statistical population: dedicated
    utterances with unambiguous speaker gender, full voice activity and a
    single name hit whose probability realizes the planted mean."""

    rows_per_program: int = 0  # must be even; half female-, half male-voiced
    base_mean: float = 0.33
    overrides: tuple[MeanOverride, ...] = ()
    wobble_steps: int = 4  # within-group spread, +-steps/grid, zero-sum


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    programs_per_cell: int = 2
    cells: tuple[Cell, ...] = ALL_CELLS
    program_rates: tuple[tuple[str, float], ...] = (
        ("wpr", 41.0), ("wsr", 33.0), ("wqr", 31.0), ("wfr", 38.0))
    break_rates: tuple[tuple[str, float], ...] | None = None
    rate_overrides: tuple[RateOverride, ...] = ()
    break_density: float = 0.0  # fraction of TV program duration in breaks
    break_density_per_channel: tuple[tuple[str, float], ...] = ()
    channels_per_group: int = 2
    program_minutes: int = 30
    persons_per_program: int = 5
    planted: PlantedEffects | None = None
    grid: int = 200


def _validate_spec(spec: SynthSpec) -> None:
    if spec.programs_per_cell < 0:
        raise InvalidSpec("programs_per_cell must be >= 0")
    if not 5 <= spec.program_minutes <= 180:
        raise InvalidSpec("program_minutes must be in [5, 180] so generated "
                          "start times realize their audience slot")
    if not 0.0 <= spec.break_density <= 0.3:
        raise InvalidSpec("break_density must be in [0, 0.3]")
    if spec.channels_per_group < 1:
        raise InvalidSpec("channels_per_group must be >= 1")
    if spec.persons_per_program < 0:
        raise InvalidSpec("persons_per_program must be >= 0")
    if not 10 <= spec.grid <= 1000:
        raise InvalidSpec("grid must be in [10, 1000]")
    for cell in spec.cells:
        m, s, c, a = cell
        if (m not in MEDIA_TOKENS or s not in STATUS_TOKENS
                or c not in CATEGORY_TOKENS or a not in SLOT_TOKENS):
            raise InvalidSpec(f"unknown cell {cell}")
    for rates in [spec.program_rates, spec.break_rates or ()]:
        for key, pct in rates:
            if key not in METRIC_KEYS:
                raise InvalidSpec(f"unknown metric {key!r}")
            if not 0.0 <= pct <= 100.0:
                raise InvalidSpec(f"{key} target {pct} out of [0, 100]")
    for ov in spec.rate_overrides:
        if ov.context not in (None, "program", "break"):
            raise InvalidSpec(f"unknown override context {ov.context!r}")
        for dim, _ in ov.match:
            if dim not in CELL_DIMS:
                raise InvalidSpec(f"unknown override dimension {dim!r}")
        for key, pct in ov.rates:
            if key not in METRIC_KEYS or not 0.0 <= pct <= 100.0:
                raise InvalidSpec(f"bad override rate {key}={pct}")
    planted = spec.planted
    if planted is not None:
        if planted.rows_per_program < 0 or planted.rows_per_program % 2:
            raise InvalidSpec("rows_per_program must be even and >= 0")
        if not 0.0 <= planted.base_mean <= 1.0:
            raise InvalidSpec("base_mean must be in [0, 1]")
        for ov in planted.overrides:
            if not 0.0 <= ov.mean <= 1.0:
                raise InvalidSpec(f"planted mean {ov.mean} out of [0, 1]")
            for dim, _ in ov.match:
                if dim not in OVERRIDE_DIMS:
                    raise InvalidSpec(f"unknown planted dimension {dim!r}")
        if planted.wobble_steps < 0:
            raise InvalidSpec("wobble_steps must be >= 0")


def round_half_up(x: float) -> int:
    return int(floor(x + 0.5))


def distribute(total: int, capacities: Sequence[int]) -> list[int]:
    """Deterministic proportional integer allocation of ``total`` over
    ``capacities`` (largest remainder, then first-fit for capped leftovers).
    Requires 0 <= total <= sum(capacities)."""
    cap_sum = sum(capacities)
    if total < 0 or total > cap_sum:
        raise ValueError(f"cannot distribute {total} over capacity {cap_sum}")
    if cap_sum == 0:
        return [0] * len(capacities)
    shares = [total * c // cap_sum for c in capacities]
    remainder = total - sum(shares)
    order = sorted(range(len(capacities)),
                   key=lambda i: (-(total * capacities[i] % cap_sum), i))
    for i in order:
        if remainder == 0:
            break
        if shares[i] < capacities[i]:
            shares[i] += 1
            remainder -= 1
    i = 0
    while remainder > 0:  # some proportional winners were capped
        if shares[i] < capacities[i]:
            shares[i] += 1
            remainder -= 1
        i = (i + 1) % len(capacities)
    return shares


def grid_values_for_mean(target: float, n: int, grid: int, wobble_steps: int) -> list[int]:
    """n grid numerators in [0, grid] whose mean is the closest grid-sum
    approximation of ``target`` (error at most 1/(2*grid*n)), with a
    zero-sum wobble pattern providing within-group variance."""
    total = round_half_up(target * grid * n)
    total = min(max(total, 0), grid * n)
    base = total // n
    extra = total - base * n
    values = [base + 1 if i < extra else base for i in range(n)]
    if wobble_steps > 0:
        step = 0
        for i in range(0, n - 1, 2):
            w = step % wobble_steps + 1
            if values[i] + w <= grid and values[i + 1] - w >= 0:
                values[i] += w
                values[i + 1] -= w
            step += 1
    return values


# --- internal layout records ---

@dataclass
class _QuoteSlot:
    media_id: str
    span: TimeInterval
    n_hits: int
    cell: Cell
    context: str


@dataclass
class _PopSlot:
    media_id: str
    span: TimeInterval
    gender: str  # "mostly_female" | "mostly_male"
    group: tuple  # (cell, conflict, gender)


@dataclass
class _FillerArea:
    media_id: str
    start_ms: int
    gendered_ms: int
    music_ms: int
    noise_ms: int
    cell: Cell
    context: str


@dataclass
class _FaceArea:
    media_id: str
    frames: list[int]
    cell: Cell
    context: str


@dataclass
class _Ledger:
    wsr_female_ms: int = 0
    wsr_male_ms: int = 0
    wfr_female: int = 0
    wfr_total: int = 0
    wqr_probs: list[float] = field(default_factory=list)
    wpr_female: int = 0
    wpr_total: int = 0

    def to_manifest(self) -> dict:
        out: dict = {}
        if self.wsr_female_ms + self.wsr_male_ms:
            out["wsr"] = {"female_ms": self.wsr_female_ms, "male_ms": self.wsr_male_ms}
        if self.wfr_total:
            out["wfr"] = {"female": self.wfr_female, "total": self.wfr_total}
        if self.wqr_probs:
            out["wqr"] = {"hits": len(self.wqr_probs), "female_mass": fsum(self.wqr_probs)}
        if self.wpr_total:
            out["wpr"] = {"female": self.wpr_female, "total": self.wpr_total}
        return out


def _match_applies(match: Iterable[tuple[str, str]], profile: Mapping[str, str]) -> bool:
    return all(profile.get(dim) == value for dim, value in match)


def _resolve_rates(spec: SynthSpec, cell: Cell, context: str) -> dict[str, float]:
    rates = dict(spec.program_rates)
    if context == "break" and spec.break_rates is not None:
        rates = dict(spec.break_rates)
    profile = dict(zip(CELL_DIMS, cell))
    for ov in spec.rate_overrides:
        if ov.context is not None and ov.context != context:
            continue
        if _match_applies(ov.match, profile):
            rates.update(ov.rates)
    return rates


def _resolve_mean(planted: PlantedEffects, profile: Mapping[str, str]) -> float:
    mean = planted.base_mean
    for ov in planted.overrides:
        if _match_applies(ov.match, profile):
            mean = ov.mean
    return mean


def _slot_start_hour(medium: str, slot: str, rng: random.Random) -> tuple[int, int]:
    if slot == "high":
        hour = 19 + rng.randrange(3) if medium == "tv" else 6 + rng.randrange(2)
    else:
        hour = 11 + rng.randrange(3)
    return hour, rng.choice((0, 30))


def generate(spec: SynthSpec, outdir: str | Path) -> tuple[CorpusBundle, dict]:
    """Generate a corpus on disk. Deterministic for a given seed: produces
    byte-identical files. Returns the in-memory bundle and the ground-truth
    manifest (also written as manifest.json)."""
    _validate_spec(spec)
    rng = random.Random(spec.seed)
    lexicon = fixture_lexicon(spec.grid)
    duration_ms = spec.program_minutes * 60_000

    density_by_channel = dict(spec.break_density_per_channel)

    programs: dict[str, Program] = {}
    breaks: dict[str, list[TimeInterval]] = {}
    segments: dict[str, list[SpeechSegment]] = {}
    utterances: dict[str, list[Utterance]] = {}
    faces: dict[str, list[FaceObservation]] = {}
    reports: list[ChannelReport] = []

    quote_slots: list[_QuoteSlot] = []
    pop_slots: list[_PopSlot] = []
    filler_areas: list[_FillerArea] = []
    face_areas: list[_FaceArea] = []
    program_cells: dict[str, Cell] = {}

    planted = spec.planted
    pop_groups: dict[tuple, int] = {}  # (cell, conflict, gender) -> row count

    idx = 0
    for cell in sorted(spec.cells):
        medium, status, category, slot = cell
        for j in range(spec.programs_per_cell):
            program_id = f"p{idx:05d}"
            media_id = f"m{idx:05d}"
            channel_id = f"{medium}_{status}_{idx % spec.channels_per_group}"
            conflict = "before" if j % 2 == 0 else "after"
            month, base_day = (5, 5) if conflict == "before" else (10, 10)
            day = base_day + rng.randrange(14)
            hour, minute = _slot_start_hour(medium, slot, rng)
            start_local = datetime(2023, month, day, hour, minute, tzinfo=_TZ)
            program = Program(
                program_id=program_id, channel_id=channel_id,
                medium=Medium(medium), status=ChannelStatus(status),
                category=ProgramCategory(category),
                start_utc=start_local,
                end_utc=start_local + timedelta(milliseconds=duration_ms),
                media_id=media_id, media_span=TimeInterval(0, duration_ms))
            programs[program_id] = program
            program_cells[program_id] = cell

            density = density_by_channel.get(channel_id,
                                             spec.break_density if medium == "tv" else 0.0)
            media_breaks: list[TimeInterval] = []
            if density > 0:
                total_break = round_half_up(duration_ms * density)
                n_breaks = max(1, total_break // BREAK_LEN_MS)
                blen = total_break // n_breaks
                if blen < 5_000:
                    raise InvalidSpec("break density too low for one 5 s break")
                for b in range(n_breaks):
                    anchor = duration_ms * (b + 1) // (n_breaks + 1)
                    media_breaks.append(TimeInterval(anchor, anchor + blen))
                media_breaks = sorted(media_breaks, key=lambda iv: iv.start_ms)
                for prev, cur in zip(media_breaks, media_breaks[1:]):
                    if cur.start_ms < prev.end_ms:
                        raise InvalidSpec("break density too high: breaks overlap")
                if media_breaks[-1].end_ms > duration_ms:
                    raise InvalidSpec("break extends past program end")
                breaks[media_id] = media_breaks

            # population rows for this program, alternating gender
            pop_queue: list[tuple[str, tuple]] = []
            if planted and planted.rows_per_program:
                for r in range(planted.rows_per_program):
                    gender = "mostly_female" if r % 2 == 0 else "mostly_male"
                    group = (cell, conflict, gender)
                    pop_queue.append((gender, group))
                    pop_groups[group] = pop_groups.get(group, 0) + 1

            regions = {
                "program": interval_subtract(TimeInterval(0, duration_ms), media_breaks),
                "break": media_breaks,
            }
            for context in ("program", "break"):
                for r_i, region in enumerate(regions[context]):
                    cursor = region.start_ms
                    if context == "program":
                        while pop_queue and cursor + POP_UTT_MS <= region.end_ms:
                            gender, group = pop_queue.pop(0)
                            pop_slots.append(_PopSlot(
                                media_id=media_id,
                                span=TimeInterval(cursor, cursor + POP_UTT_MS),
                                gender=gender, group=group))
                            cursor += POP_UTT_MS
                    remaining = region.end_ms - cursor
                    n_quotes = remaining // QUOTE_EVERY_MS
                    for q in range(n_quotes):
                        start = cursor + q * QUOTE_SLOT_MS
                        quote_slots.append(_QuoteSlot(
                            media_id=media_id,
                            span=TimeInterval(start, start + QUOTE_UTT_MS),
                            n_hits=q % 3 + 1, cell=cell, context=context))
                    cursor += n_quotes * QUOTE_SLOT_MS
                    remaining = region.end_ms - cursor
                    filler_areas.append(_FillerArea(
                        media_id=media_id, start_ms=cursor,
                        gendered_ms=remaining * 60 // 100,
                        music_ms=remaining * 20 // 100,
                        noise_ms=remaining * 10 // 100,
                        cell=cell, context=context))
                    if medium == "tv":
                        length = region.duration_ms
                        frames = [region.start_ms + 2_500 + f * FACE_EVERY_MS
                                  for f in range(length // FACE_EVERY_MS)]
                        face_areas.append(_FaceArea(media_id=media_id, frames=frames,
                                                    cell=cell, context=context))
                    if context == "program" and r_i == 0 and region.duration_ms >= 10_000:
                        utterances.setdefault(media_id, []).extend([
                            Utterance(media_id=media_id,
                                      span=TimeInterval(region.start_ms + 100,
                                                        region.start_ms + 1_600),
                                      text=HALLUCINATION_DECOY),
                            Utterance(media_id=media_id,
                                      span=TimeInterval(region.start_ms + 1_700,
                                                        region.start_ms + 3_200),
                                      text=LOWERCASE_DECOY),
                        ])
            if pop_queue:
                raise InvalidSpec(
                    f"program {program_id} too short for {planted.rows_per_program} "
                    "population rows")
            idx += 1

    # --- phase 2: per-(cell, context) exact amount allocation ---

    ledgers: dict[tuple[Cell, str], _Ledger] = {}

    def ledger(cell: Cell, context: str) -> _Ledger:
        return ledgers.setdefault((cell, context), _Ledger())

    # population response values per (cell, conflict, gender) group
    pop_values: dict[tuple, list[int]] = {}
    if planted:
        for group in sorted(pop_groups, key=lambda g: (g[0], g[1], g[2])):
            cell, conflict, gender = group
            profile = dict(zip(CELL_DIMS, cell))
            profile["conflict"] = conflict
            profile["speaker_gender"] = gender
            target = _resolve_mean(planted, profile)
            pop_values[group] = grid_values_for_mean(
                target, pop_groups[group], spec.grid, planted.wobble_steps)

    pop_value_cursor: dict[tuple, int] = {g: 0 for g in pop_groups}

    # WSR: female milliseconds per filler area
    filler_by_key: dict[tuple[Cell, str], list[_FillerArea]] = {}
    for area in filler_areas:
        filler_by_key.setdefault((area.cell, area.context), []).append(area)
    pop_by_cell: dict[Cell, list[_PopSlot]] = {}
    for slot in pop_slots:
        pop_by_cell.setdefault(slot.group[0], []).append(slot)

    filler_female_ms: dict[int, int] = {}  # id(area) -> female ms
    for key in sorted(filler_by_key, key=lambda k: (k[0], k[1])):
        cell, context = key
        rates = _resolve_rates(spec, cell, context)
        areas = filler_by_key[key]
        capacities = [a.gendered_ms for a in areas]
        pop_f = pop_m = 0
        if context == "program":
            for slot in pop_by_cell.get(cell, []):
                if slot.gender == "mostly_female":
                    pop_f += slot.span.duration_ms
                else:
                    pop_m += slot.span.duration_ms
        total_gendered = sum(capacities) + pop_f + pop_m
        if total_gendered == 0:
            continue
        female_target = round_half_up(rates["wsr"] / 100.0 * total_gendered)
        filler_female = min(max(female_target - pop_f, 0), sum(capacities))
        for area, fem in zip(areas, distribute(filler_female, capacities)):
            filler_female_ms[id(area)] = fem

    # WFR: female faces per face area
    faces_by_key: dict[tuple[Cell, str], list[_FaceArea]] = {}
    for area in face_areas:
        faces_by_key.setdefault((area.cell, area.context), []).append(area)
    face_female: dict[int, int] = {}
    for key in sorted(faces_by_key, key=lambda k: (k[0], k[1])):
        cell, context = key
        rates = _resolve_rates(spec, cell, context)
        areas = faces_by_key[key]
        capacities = [len(a.frames) for a in areas]
        total = sum(capacities)
        if total == 0:
            continue
        female_target = round_half_up(rates["wfr"] / 100.0 * total)
        for area, fem in zip(areas, distribute(female_target, capacities)):
            face_female[id(area)] = fem

    # WQR: grid numerators per quote-slot hit
    quotes_by_key: dict[tuple[Cell, str], list[_QuoteSlot]] = {}
    for slot in quote_slots:
        quotes_by_key.setdefault((slot.cell, slot.context), []).append(slot)
    quote_hit_values: dict[int, list[int]] = {}
    for key in sorted(quotes_by_key, key=lambda k: (k[0], k[1])):
        cell, context = key
        rates = _resolve_rates(spec, cell, context)
        slots = quotes_by_key[key]
        n_filler_hits = sum(s.n_hits for s in slots)
        pop_num = 0
        n_pop_hits = 0
        if context == "program":
            for group, values in pop_values.items():
                if group[0] == cell:
                    pop_num += sum(values)
                    n_pop_hits += len(values)
        total_hits = n_filler_hits + n_pop_hits
        if total_hits == 0:
            continue
        mass_target = round_half_up(rates["wqr"] / 100.0 * total_hits * spec.grid)
        filler_num = min(max(mass_target - pop_num, 0), n_filler_hits * spec.grid)
        flat = distribute(filler_num, [spec.grid] * n_filler_hits)
        pos = 0
        for slot in slots:
            quote_hit_values[id(slot)] = flat[pos:pos + slot.n_hits]
            pos += slot.n_hits

    # WPR: female persons per program
    programs_by_cell: dict[Cell, list[str]] = {}
    for program_id, cell in program_cells.items():
        programs_by_cell.setdefault(cell, []).append(program_id)
    program_female_persons: dict[str, int] = {}
    if spec.persons_per_program > 0:
        for cell in sorted(programs_by_cell):
            rates = _resolve_rates(spec, cell, "program")
            ids = programs_by_cell[cell]
            total = spec.persons_per_program * len(ids)
            female_target = round_half_up(rates["wpr"] / 100.0 * total)
            for program_id, fem in zip(ids, distribute(
                    female_target, [spec.persons_per_program] * len(ids))):
                program_female_persons[program_id] = fem

    # --- phase 3: emission ---

    for slot in pop_slots:
        cell = slot.group[0]
        values = pop_values[slot.group]
        k = values[pop_value_cursor[slot.group]]
        pop_value_cursor[slot.group] += 1
        name = grid_name(k)
        utterances.setdefault(slot.media_id, []).append(
            Utterance(media_id=slot.media_id, span=slot.span, text=f"{name} intervient."))
        label = (SegmentLabel.FEMALE_SPEECH if slot.gender == "mostly_female"
                 else SegmentLabel.MALE_SPEECH)
        segments.setdefault(slot.media_id, []).append(
            SpeechSegment(media_id=slot.media_id, span=slot.span, label=label))
        led = ledger(cell, "program")
        led.wqr_probs.append(k / spec.grid)
        if label is SegmentLabel.FEMALE_SPEECH:
            led.wsr_female_ms += slot.span.duration_ms
        else:
            led.wsr_male_ms += slot.span.duration_ms

    for slot in quote_slots:
        values = quote_hit_values[id(slot)]
        names = [grid_name(k) for k in values]
        text = ", ".join(names) + " arrivent." if len(names) > 1 else f"{names[0]} arrive."
        utterances.setdefault(slot.media_id, []).append(
            Utterance(media_id=slot.media_id, span=slot.span, text=text))
        led = ledger(slot.cell, slot.context)
        led.wqr_probs.extend(k / spec.grid for k in values)

    for area in filler_areas:
        led = ledger(area.cell, area.context)
        cursor = area.start_ms
        female_ms = filler_female_ms.get(id(area), 0)
        male_ms = area.gendered_ms - female_ms
        for length, label in ((female_ms, SegmentLabel.FEMALE_SPEECH),
                              (male_ms, SegmentLabel.MALE_SPEECH),
                              (area.music_ms, SegmentLabel.MUSIC),
                              (area.noise_ms, SegmentLabel.NOISE)):
            if length > 0:
                segments.setdefault(area.media_id, []).append(SpeechSegment(
                    media_id=area.media_id,
                    span=TimeInterval(cursor, cursor + length), label=label))
                cursor += length
        led.wsr_female_ms += female_ms
        led.wsr_male_ms += male_ms

    for area in face_areas:
        led = ledger(area.cell, area.context)
        fem = face_female.get(id(area), 0)
        for f_i, frame in enumerate(area.frames):
            female = f_i < fem
            score = round(0.80 + 0.15 * rng.random(), 6) if female else \
                round(0.05 + 0.15 * rng.random(), 6)
            faces.setdefault(area.media_id, []).append(FaceObservation(
                media_id=area.media_id, frame_ms=frame,
                height_ratio=0.5, female_score=score))
        led.wfr_female += fem
        led.wfr_total += len(area.frames)
        if len(area.frames) >= 4:  # sub-height decoys, filtered by the engine
            for offset in (1_200, 3_700):
                faces[area.media_id].append(FaceObservation(
                    media_id=area.media_id, frame_ms=area.frames[0] + offset,
                    height_ratio=0.05,
                    female_score=round(0.4 + 0.2 * rng.random(), 6)))

    if spec.persons_per_program > 0:
        for program_id in programs:
            fem = program_female_persons[program_id]
            cell = program_cells[program_id]
            per_role: dict[ReportRole, list[int]] = {}
            for person in range(spec.persons_per_program):
                role = ROLES[person % len(ROLES)]
                counts = per_role.setdefault(role, [0, 0])
                counts[0 if person >= fem else 1] += 1  # first `fem` are female
            for role in ROLES:
                if role in per_role:
                    male, female = per_role[role]
                    reports.append(ChannelReport(program_id=program_id, role=role,
                                                 male_count=male, female_count=female))
            led = ledger(cell, "program")
            led.wpr_female += fem
            led.wpr_total += spec.persons_per_program

    for media_id in segments:
        segments[media_id].sort(key=lambda s: (s.span.start_ms, s.span.end_ms))
    for media_id in utterances:
        utterances[media_id].sort(key=lambda u: (u.span.start_ms, u.span.end_ms))
    for media_id in faces:
        faces[media_id].sort(key=lambda f: f.frame_ms)

    bundle = CorpusBundle(programs=programs, reports=reports, breaks=breaks,
                          segments=segments, utterances=utterances, faces=faces,
                          lexicon=lexicon)
    outdir = Path(outdir)
    paths = write_bundle(bundle, outdir)

    manifest = {
        "seed": spec.seed,
        "spec": asdict(spec),
        "grid": spec.grid,
        "cells": {
            "|".join(cell): {
                context: ledgers[(cell, context)].to_manifest()
                for context in ("program", "break") if (cell, context) in ledgers
            }
            for cell in sorted({c for c, _ in ledgers})
        },
        "population": {
            "|".join((*group[0], group[1], group[2])): {
                "rows": pop_groups[group],
                "numerator_sum": sum(pop_values[group]),
                "y_sum": fsum(k / spec.grid for k in pop_values[group]),
            }
            for group in sorted(pop_groups, key=lambda g: (g[0], g[1], g[2]))
        },
        "files": sorted(p.name for p in paths.all_files()),
    }
    with open(outdir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")
    return bundle, manifest


def spec_from_json(data: dict) -> SynthSpec:
    """Build a SynthSpec from parsed JSON (the CLI's --spec file)."""
    kwargs = dict(data)
    if "cells" in kwargs:
        kwargs["cells"] = tuple(tuple(c) for c in kwargs["cells"])
    for key in ("program_rates", "break_rates"):
        if kwargs.get(key) is not None:
            kwargs[key] = tuple((k, float(v)) for k, v in dict(kwargs[key]).items())
    if "rate_overrides" in kwargs:
        kwargs["rate_overrides"] = tuple(
            RateOverride(match=tuple((d, v) for d, v in dict(ov["match"]).items()),
                         rates=tuple((k, float(v)) for k, v in dict(ov["rates"]).items()),
                         context=ov.get("context"))
            for ov in kwargs["rate_overrides"])
    if "break_density_per_channel" in kwargs:
        kwargs["break_density_per_channel"] = tuple(
            (k, float(v)) for k, v in dict(kwargs["break_density_per_channel"]).items())
    if kwargs.get("planted") is not None:
        p = dict(kwargs["planted"])
        if "overrides" in p:
            p["overrides"] = tuple(
                MeanOverride(match=tuple((d, v) for d, v in dict(ov["match"]).items()),
                             mean=float(ov["mean"]))
                for ov in p["overrides"])
        kwargs["planted"] = PlantedEffects(**p)
    return SynthSpec(**kwargs)
