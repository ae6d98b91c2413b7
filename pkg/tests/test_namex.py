import random
from math import fsum

import pytest
from hypothesis import given, strategies as st

from wre.model import MetricKind, TimeInterval, Utterance
from wre.namex import (
    NameHit,
    build_name_stats,
    extract_names,
    is_hallucination,
    load_stoplist,
    tokenize,
    wqr,
)

# Expected values verified against a reference regex engine for the anchored,
# case-insensitive pattern ^\W*sous-titr(age|es par).
HALLUCINATION_CASES = [
    ("Sous-titrage Société Radio-Canada", True),
    ("— sous-titres par la communauté", True),
    ("Le sous-titrage est activé", False),
    ("sous-titrage", True),
    ("SOUS-TITRAGE ST' 501", True),
    ("...sous-titres par Amara.org", True),
    ("  Sous-Titrage MFP.", True),
    ("*** sous-titrage fourni", True),
    ("Il a parlé du sous-titrage", False),
    ("soustitrage absent", False),
    ("sous-titres activés", False),
    ("sous-titrespar X", False),
    ("«Sous-titrage»", True),
    ("1 sous-titrage", False),
    ("_sous-titrage", False),
    ("—— SOUS-TITRES PAR RED BEE MEDIA", True),
    ("bonjour à tous", False),
    ("Sous-titres par la RTBF", True),
    ("sous titrage", False),
    ("é sous-titrage", False),
]


@pytest.mark.parametrize("text,dropped", HALLUCINATION_CASES)
def test_hallucination_filter(text, dropped):
    assert is_hallucination(text) is dropped


def utt(text, start=0, end=10_000, media="m1"):
    return Utterance(media_id=media, span=TimeInterval(start, end), text=text)


class TestTokenize:
    def test_punctuation_recorded_as_separators(self):
        tokens = tokenize("Bonjour, Marie !")
        assert [t.surface for t in tokens] == ["Bonjour", "Marie"]
        assert tokens[0].trail == ","
        assert tokens[1].trail == "!"

    def test_empty_text(self):
        assert tokenize("") == []

    def test_hyphen_not_a_separator(self):
        tokens = tokenize("Jean-Pierre")
        assert [t.surface for t in tokens] == ["Jean-Pierre"]

    def test_offsets_point_into_original(self):
        text = "  «Marie» parle"
        tokens = tokenize(text)
        for token in tokens:
            assert text[token.start:token.start + len(token.surface)] == token.surface

    def test_standalone_punctuation_breaks_adjacency(self):
        tokens = tokenize("Marie — Vladimir")
        assert tokens[1].lead == "—"


class TestExtractNames:
    def test_consecutive_run_counts_first_only(self, lexicon):
        stats = extract_names(utt("Gazi Mustafa Kemal est arrivé"), lexicon)
        assert [h.surface for h in stats.hits] == ["Gazi"]

    def test_acronym_excluded(self, lexicon):
        stats = extract_names(utt("CLAUDE est là"), lexicon)
        assert stats.hits == ()

    def test_lowercase_excluded(self, lexicon):
        stats = extract_names(utt("claude est là"), lexicon)
        assert stats.hits == ()

    def test_punctuation_breaks_run(self, lexicon):
        stats = extract_names(utt("Marie, Vladimir"), lexicon)
        assert [h.surface for h in stats.hits] == ["Marie", "Vladimir"]
        assert stats.mean_female_prob == pytest.approx(0.499, abs=1e-12)

    def test_whitespace_run_collapses(self, lexicon):
        stats = extract_names(utt("Marie Vladimir"), lexicon)
        assert [h.surface for h in stats.hits] == ["Marie"]

    def test_sentence_boundary_breaks_run(self, lexicon):
        stats = extract_names(utt("Marie. Vladimir est venu"), lexicon)
        assert [h.surface for h in stats.hits] == ["Marie", "Vladimir"]

    def test_non_lexicon_token_breaks_run(self, lexicon):
        stats = extract_names(utt("Marie Dupont Vladimir"), lexicon)
        assert [h.surface for h in stats.hits] == ["Marie", "Vladimir"]

    def test_hyphenated_compound_looked_up_whole(self, lexicon):
        stats = extract_names(utt("Jean-Pierre est venu"), lexicon)
        assert [h.surface for h in stats.hits] == ["Jean-Pierre"]
        assert stats.hits[0].female_prob == 0.0

    def test_char_offsets(self, lexicon):
        text = "Avec Marie, Vladimir"
        stats = extract_names(utt(text), lexicon)
        for hit in stats.hits:
            assert text[hit.char_offset:hit.char_offset + len(hit.surface)] == hit.surface

    def test_stoplist_hook(self, lexicon):
        import io
        stoplist = load_stoplist(io.StringIO("wagner\n# comment\n"))
        stats = extract_names(utt("Wagner et Marie"), lexicon, stoplist)
        assert [h.surface for h in stats.hits] == ["Marie"]

    def test_neutral_name_probability(self, lexicon):
        stats = extract_names(utt("Claude est venu"), lexicon)
        assert stats.hits[0].female_prob == 0.12


class TestWqr:
    def test_symmetric_probs(self):
        value = wqr([NameHit("A", 1.0, 0), NameHit("B", 0.0, 2)])
        assert value.female_pct == 50.0
        assert value.weight == 2.0

    def test_single_neutral_name(self):
        value = wqr([NameHit("Claude", 0.12, 0)])
        assert value.female_pct == pytest.approx(12.0, abs=1e-12)

    def test_three_probs_mean(self):
        value = wqr([NameHit("A", 1.0, 0), NameHit("B", 0.0, 2), NameHit("C", 0.12, 4)])
        assert value.female_pct == pytest.approx(100 * (1.0 + 0.0 + 0.12) / 3, abs=1e-12)

    def test_empty_undefined(self):
        value = wqr([])
        assert not value.defined and value.kind is MetricKind.WQR


name_texts = st.lists(
    st.sampled_from(["Marie", "Vladimir", "Claude", "Camille", "bonjour", "ACRO",
                     "et", "Gazi", "Mustafa", "la", "Jean-Pierre", "。"]),
    min_size=0, max_size=10).map(lambda words: " ".join(words))


@given(text=name_texts)
def test_hits_bounded_by_tokens_and_uppercase(text):
    from wre.synthgen import fixture_lexicon
    lexicon = fixture_lexicon()
    if not text.strip():
        return
    stats = extract_names(utt(text), lexicon)
    tokens = tokenize(text)
    assert len(stats.hits) <= len(tokens)
    for hit in stats.hits:
        assert hit.surface[0].isupper()


@given(text=name_texts)
def test_extraction_idempotent_on_surfaces(text):
    from wre.synthgen import fixture_lexicon
    lexicon = fixture_lexicon()
    if not text.strip():
        return
    stats = extract_names(utt(text), lexicon)
    if not stats.hits:
        return
    rejoined = ", ".join(h.surface for h in stats.hits)
    again = extract_names(utt(rejoined), lexicon)
    assert [h.surface for h in again.hits] == [h.surface for h in stats.hits]


def test_corpus_wqr_is_hit_weighted_mean_and_permutation_invariant(lexicon):
    rng = random.Random(42)
    pool = ["Marie", "Vladimir", "Claude", "Camille", "Zoé", "Dominique", "Sacha"]
    utterances = []
    for i in range(50):
        names = rng.sample(pool, rng.randint(1, 4))
        utterances.append(utt(", ".join(names), start=i * 1000, end=i * 1000 + 900))
    per_utt = [extract_names(u, lexicon) for u in utterances]
    all_hits = [h for s in per_utt for h in s.hits]
    corpus = wqr(all_hits)

    weighted = fsum(wqr(s.hits).female_pct * len(s.hits) for s in per_utt if s.hits)
    total = sum(len(s.hits) for s in per_utt)
    assert corpus.female_pct == pytest.approx(weighted / total, abs=1e-9)

    shuffled = per_utt[:]
    rng.shuffle(shuffled)
    corpus2 = wqr([h for s in shuffled for h in s.hits])
    assert corpus2.female_pct == pytest.approx(corpus.female_pct, abs=1e-9)
    assert corpus2.weight == corpus.weight


def test_build_name_stats_drops_hallucinations(lexicon):
    utterances = {"m1": [utt("Sous-titrage ST Marie", start=0, end=1000),
                         utt("Marie parle", start=1000, end=2000)]}
    stats = build_name_stats(utterances, lexicon)
    assert len(stats) == 1
    (kept,) = stats
    assert kept.text == "Marie parle"
