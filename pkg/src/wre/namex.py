"""Lexicometric estimator of oral references to women.

Transcriber hallucination filtering, first-name token extraction, and
per-utterance gender-attribution statistics. Counting rules:

* a token is a candidate iff its first character is uppercase, at least one
  later character is lowercase (rejects acronyms and single capitals), and
  its canonical form exists in the lexicon;
* among maximal runs of consecutive candidate tokens separated only by
  whitespace, only the first is counted ("Gazi Mustafa Kemal" counts once);
  punctuation between tokens breaks a run ("Marie, Vladimir" counts both);
* hyphenated compounds are single tokens looked up whole ("Jean-Pierre");
* each counted hit contributes the lexicon's female attribution probability,
  so gender-neutral names enter fractionally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import fsum
from typing import IO, Iterable, Mapping

from .ingest import NameLexicon, canonical_name
from .model import MetricKind, MetricValue, Utterance

HALLUCINATION_RE = re.compile(r"^\W*sous-titr(age|es par)", re.IGNORECASE)


def is_hallucination(text: str) -> bool:
    """True iff the text matches the anchored caption-credit pattern
    (case-insensitive) and must be dropped."""
    return HALLUCINATION_RE.search(text) is not None


@dataclass(frozen=True)
class Token:
    """One whitespace-delimited token with edge punctuation stripped into
    separator metadata. ``start`` is the character offset of ``surface`` in
    the original text."""

    surface: str
    start: int
    lead: str   # punctuation between the previous token and this one
    trail: str  # punctuation attached after this token


_CHUNK_RE = re.compile(r"\S+")


def tokenize(text: str) -> list[Token]:
    """Split on whitespace, keeping offsets. Leading/trailing punctuation of
    each chunk becomes separator metadata; chunks that are pure punctuation
    attach to the next token's lead (they still break candidate runs)."""
    tokens: list[Token] = []
    pending_lead = ""
    for match in _CHUNK_RE.finditer(text):
        chunk = match.group()
        begin = 0
        end = len(chunk)
        while begin < end and not chunk[begin].isalnum():
            begin += 1
        while end > begin and not chunk[end - 1].isalnum():
            end -= 1
        if begin == end:  # pure punctuation
            pending_lead += chunk
            continue
        tokens.append(Token(surface=chunk[begin:end],
                            start=match.start() + begin,
                            lead=pending_lead + chunk[:begin],
                            trail=chunk[end:]))
        pending_lead = ""
    if pending_lead and tokens:
        last = tokens[-1]
        tokens[-1] = Token(surface=last.surface, start=last.start,
                           lead=last.lead, trail=last.trail + pending_lead)
    return tokens


@dataclass(frozen=True)
class NameHit:
    surface: str
    female_prob: float
    char_offset: int


@dataclass(frozen=True)
class UtteranceNameStats:
    hits: tuple[NameHit, ...]

    @property
    def mean_female_prob(self) -> float | None:
        if not self.hits:
            return None
        return fsum(h.female_prob for h in self.hits) / len(self.hits)


def _is_candidate(token: Token, lexicon: NameLexicon, stoplist: frozenset[str]) -> bool:
    surface = token.surface
    if not surface[0].isupper():
        return False
    if not any(c.islower() for c in surface[1:]):
        return False
    name = canonical_name(surface)
    if name in stoplist:
        return False
    return name in lexicon


def extract_names(utterance: Utterance, lexicon: NameLexicon,
                  stoplist: frozenset[str] = frozenset()) -> UtteranceNameStats:
    """Extract counted first-name hits from an utterance that already passed
    the hallucination filter."""
    hits: list[NameHit] = []
    prev_candidate = False
    prev_trail = ""
    for token in tokenize(utterance.text):
        candidate = _is_candidate(token, lexicon, stoplist)
        if candidate:
            in_run = prev_candidate and prev_trail == "" and token.lead == ""
            if not in_run:
                record = lexicon.get(token.surface)
                hits.append(NameHit(surface=token.surface,
                                    female_prob=record.female_prob,
                                    char_offset=token.start))
        prev_candidate = candidate
        prev_trail = token.trail
    return UtteranceNameStats(hits=tuple(hits))


def wqr(hits: Iterable[NameHit]) -> MetricValue:
    """Female-name probability mass over hit count, as a percentage. The
    weight is the hit count; undefined when there are no hits."""
    hits = list(hits)
    if not hits:
        return MetricValue.undefined(MetricKind.WQR)
    mass = fsum(h.female_prob for h in hits)
    return MetricValue(MetricKind.WQR, 100.0 * mass / len(hits), float(len(hits)))


def load_stoplist(stream: IO[str]) -> frozenset[str]:
    """Optional stop-list: one canonical name per line, UTF-8. Empty by
    default; the automatic path retains all detected first names."""
    names = set()
    for line in stream:
        line = line.strip()
        if line and not line.startswith("#"):
            names.add(canonical_name(line))
    return frozenset(names)


def build_name_stats(utterances_by_media: Mapping[str, list[Utterance]],
                     lexicon: NameLexicon,
                     stoplist: frozenset[str] = frozenset()) -> dict[Utterance, UtteranceNameStats]:
    """Hallucination-filter then extract names for every utterance of a
    corpus. Dropped utterances are absent from the result."""
    stats: dict[Utterance, UtteranceNameStats] = {}
    for media_id in utterances_by_media:
        for utt in utterances_by_media[media_id]:
            if is_hallucination(utt.text):
                continue
            stats[utt] = extract_names(utt, lexicon, stoplist)
    return stats
