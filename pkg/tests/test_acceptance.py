"""Acceptance suite: one test per acceptance criterion, at the stated
tolerance. Each prints one PASS line; a failure surfaces as the test's
failure line."""

import io
import math
import random
import time

import numpy as np
import pytest
from scipy import integrate
from scipy import special as sp_special

from wre.align import select_stats_population
from wre.config import RunConfig
from wre.ingest import parse_name_db, read_bundle, write_bundle
from wre.metrics import BreakMode, aggregate, program_metrics
from wre.model import (
    Medium,
    TimeInterval,
    interval_intersect_all,
    interval_subtract,
    total_duration_ms,
)
from wre.namex import build_name_stats, extract_names, is_hallucination, wqr
from wre.report import Table, build_table, render_aligned
from wre.stats import (
    FACTOR_NAMES,
    AnalysisRow,
    build_design,
    f_sf,
    group_means,
    ols_fit,
    one_way_anova,
)
from wre.synthgen import ALL_CELLS, SynthSpec, fixture_lexicon, generate
from wre.model import Utterance

from tablefixtures import (
    TABLE1_EXPECTED_ROWS,
    TABLE4_EXPECTED_ROWS,
    TABLE6_EXPECTED_ROWS,
    table1_spec,
    table4_spec,
    table6_spec,
)
from test_namex import HALLUCINATION_CASES


def report_pass(name):
    print(f"ACCEPTANCE {name}: PASS")


# --- criterion 1: name-rule golden suite -----------------------------------

# (text, expected hit surfaces, expected hit probabilities)
# Rules covered: lowercase exclusion, all-caps exclusion, consecutive-run
# single count, gender-attribution probability mapping.
NAME_RULE_CASES = [
    # consecutive-run single count
    ("Gazi Mustafa Kemal est arrivé", ["Gazi"], [0.0]),
    ("Mustafa Kemal", ["Mustafa"], [0.0]),
    ("Gazi, Mustafa, Kemal", ["Gazi", "Mustafa", "Kemal"], [0.0, 0.0, 0.0]),
    ("Marie Vladimir", ["Marie"], [0.998]),
    ("Marie, Vladimir", ["Marie", "Vladimir"], [0.998, 0.0]),
    ("Marie. Vladimir", ["Marie", "Vladimir"], [0.998, 0.0]),
    ("Marie; Vladimir", ["Marie", "Vladimir"], [0.998, 0.0]),
    ("Marie : Vladimir", ["Marie", "Vladimir"], [0.998, 0.0]),
    ("Marie — Vladimir", ["Marie", "Vladimir"], [0.998, 0.0]),
    ("(Marie) Vladimir", ["Marie", "Vladimir"], [0.998, 0.0]),
    ("Claude Camille Dominique", ["Claude"], [0.12]),
    ("Claude, Camille, Dominique", ["Claude", "Camille", "Dominique"],
     [0.12, 0.55, 0.3]),
    ("Dominique Sacha Charlie parlent", ["Dominique"], [0.3]),
    ("Dominique, Sacha Charlie", ["Dominique", "Sacha"], [0.3, 0.25]),
    ("Anne Marie", ["Anne"], [0.99]),
    ("Anne et Marie", ["Anne", "Marie"], [0.99, 0.998]),
    ("Jean Pierre", ["Jean"], [0.005]),
    ("Jean, Pierre", ["Jean", "Pierre"], [0.005, 0.002]),
    ("Jean-Pierre Pierre", ["Jean-Pierre"], [0.0]),
    ("Hugo Lou", ["Hugo"], [0.002]),
    ("Hugo, Lou", ["Hugo", "Lou"], [0.002, 0.7]),
    ("Benyamin Bachar", ["Benyamin"], [0.0]),
    ("Vladimir, Benyamin et Bachar", ["Vladimir", "Benyamin", "Bachar"],
     [0.0, 0.0, 0.0]),
    ("Vladimir Poutine et Marie", ["Vladimir", "Marie"], [0.0, 0.998]),
    ("Tennessee Williams, Andrea", ["Tennessee", "Andrea"], [0.2, 0.5]),
    # all-caps exclusion (acronyms)
    ("CLAUDE est là", [], []),
    ("MARIE est venue", [], []),
    ("ZOÉ chante", [], []),
    ("JEAN-PIERRE arrive", [], []),
    ("Le OU la Claude", ["Claude"], [0.12]),
    ("RATP Marie", ["Marie"], [0.998]),
    ("A Marie", ["Marie"], [0.998]),
    # lowercase exclusion (common nouns)
    ("claude est là", [], []),
    ("bonjour marie", [], []),
    ("zoé chante", [], []),
    ("jean-pierre arrive", [], []),
    ("léa et Léa", ["Léa"], [1.0]),
    ("pierre qui roule, Pierre", ["Pierre"], [0.002]),
    # gender attribution mapping and lookup rules
    ("Claude est là", ["Claude"], [0.12]),
    ("Camille", ["Camille"], [0.55]),
    ("Camille ?", ["Camille"], [0.55]),
    ("«Marie»", ["Marie"], [0.998]),
    ("Zoé chante", ["Zoé"], [1.0]),
    ("Ségolène répond à Nicolas", ["Ségolène", "Nicolas"], [1.0, 0.004]),
    ("Jean-Pierre arrive", ["Jean-Pierre"], [0.0]),
    ("Anne-Marie arrive", [], []),          # compound not in lexicon
    ("Marie-Antoinette règne", [], []),
    ("Niagara Falls", ["Niagara"], [1.0]),
    ("Wagner intervient", ["Wagner"], [0.0]),
    ("Bonjour Marie", ["Marie"], [0.998]),
    ("L'ami Claude", ["Claude"], [0.12]),
    ("McDonald Marie", ["Marie"], [0.998]),
    ("Le président François parle", ["François"], [0.002]),
]


def test_criterion_name_rules():
    assert len(NAME_RULE_CASES) >= 50
    lexicon = fixture_lexicon()
    start = time.perf_counter()
    for text, surfaces, probs in NAME_RULE_CASES:
        utterance = Utterance(media_id="m", span=TimeInterval(0, 1000), text=text)
        stats = extract_names(utterance, lexicon)
        assert [h.surface for h in stats.hits] == surfaces, text
        assert [h.female_prob for h in stats.hits] == probs, text
    # probability mapping terminates in the quotation metric: Claude -> 12.0
    utterance = Utterance(media_id="m", span=TimeInterval(0, 1000), text="Claude est là")
    value = wqr(extract_names(utterance, lexicon).hits)
    assert value.female_pct == pytest.approx(12.0, abs=1e-12)
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"name-rule suite took {elapsed:.3f}s"
    report_pass("name-rule suite (50-case golden fixtures)")


def test_criterion_hallucination_filter():
    assert len(HALLUCINATION_CASES) >= 20
    start = time.perf_counter()
    for text, dropped in HALLUCINATION_CASES:
        assert is_hallucination(text) is dropped, text
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"hallucination suite took {elapsed:.3f}s"
    report_pass("hallucination filter (20-case fixtures)")


# --- criterion 3: synthetic-corpus exactness --------------------------------

def assert_engine_matches_manifest(bundle_dir, manifest):
    bundle = read_bundle(bundle_dir)
    name_stats = build_name_stats(bundle.utterances, bundle.lexicon)
    seen_cells = set()
    for mode, context in ((BreakMode.EXCLUDE_BREAKS, "program"),
                          (BreakMode.ONLY_BREAKS, "break")):
        results = aggregate(bundle, ("medium", "status", "category", "audience"),
                            mode=mode, name_stats=name_stats)
        for result in results:
            key = "|".join([result.key.medium, result.key.status,
                            result.key.category, result.key.audience])
            truth = manifest["cells"][key].get(context)
            if truth is None:
                assert context == "break"
                assert result.wsr is None or not result.wsr.defined
                continue
            seen_cells.add((key, context))
            if "wsr" in truth:
                female, male = truth["wsr"]["female_ms"], truth["wsr"]["male_ms"]
                assert result.wsr.weight == (female + male) / 1000.0  # exact
                assert result.wsr.female_pct == pytest.approx(
                    100.0 * female / (female + male), rel=1e-9, abs=1e-9)
            if "wqr" in truth:
                assert result.wqr.weight == truth["wqr"]["hits"]  # exact count
                assert result.wqr.female_pct == pytest.approx(
                    100.0 * truth["wqr"]["female_mass"] / truth["wqr"]["hits"],
                    rel=1e-9, abs=1e-9)
            if "wfr" in truth:
                assert result.wfr.weight == truth["wfr"]["total"]  # exact count
                assert result.wfr.female_pct == pytest.approx(
                    100.0 * truth["wfr"]["female"] / truth["wfr"]["total"],
                    rel=1e-9, abs=1e-9)
            if "wpr" in truth and context == "program":
                assert result.wpr.weight == truth["wpr"]["total"]  # exact count
                assert result.wpr.female_pct == pytest.approx(
                    100.0 * truth["wpr"]["female"] / truth["wpr"]["total"],
                    rel=1e-9, abs=1e-9)
    for key, contexts in manifest["cells"].items():
        for context in contexts:
            assert (key, context) in seen_cells, (key, context)


def test_criterion_synthetic_corpus_exactness(tmp_path):
    start = time.perf_counter()
    for seed, kwargs in ((3, dict(programs_per_cell=2, cells=ALL_CELLS[:8],
                                  break_density=0.06)),
                         (99, dict(programs_per_cell=16, break_density=0.08))):
        out = tmp_path / f"bundle{seed}"
        _, manifest = generate(SynthSpec(seed=seed, **kwargs), out)
        assert_engine_matches_manifest(out, manifest)
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"512-program end-to-end took {elapsed:.1f}s"
    report_pass(f"synthetic-corpus exactness (512 programs in {elapsed:.1f}s)")


# --- criterion 4: table reproduction ----------------------------------------

def render_fixture(tmp_path, spec, template):
    generate(spec, tmp_path)
    bundle = read_bundle(tmp_path)
    cfg = RunConfig()
    name_stats = build_name_stats(bundle.utterances, bundle.lexicon)
    population = select_stats_population(bundle, name_stats)
    return build_table(template, bundle, name_stats, cfg, population)


def test_criterion_table_reproduction(tmp_path):
    table1 = render_fixture(tmp_path / "t1", table1_spec(), "table1")
    assert table1.rows == TABLE1_EXPECTED_ROWS
    expected1 = Table(table1.table_id, table1.title, table1.columns,
                      TABLE1_EXPECTED_ROWS)
    assert render_aligned(table1) == render_aligned(expected1)

    table4 = render_fixture(tmp_path / "t4", table4_spec(), "table4")
    assert table4.rows == TABLE4_EXPECTED_ROWS
    assert table4.rows[3] == ("Sport", "21.5", "11.4", "10.9", "12.0")

    table6 = render_fixture(tmp_path / "t6", table6_spec(), "table6")
    assert table6.rows == TABLE6_EXPECTED_ROWS
    expected6 = Table(table6.table_id, table6.title, table6.columns,
                      TABLE6_EXPECTED_ROWS)
    assert render_aligned(table6) == render_aligned(expected6)
    report_pass("table reproduction (planted rates render byte-identical)")


# --- criterion 5: statistics oracle equivalence ------------------------------

def test_criterion_statistics_oracles():
    rng = np.random.default_rng(2024)
    levels_pool = ["a", "b", "c", "d", "e", "f"]
    for _ in range(100):
        n_levels = int(rng.integers(2, 6))
        n = int(rng.integers(n_levels + 2, 1001))
        labels = [levels_pool[i] for i in rng.integers(0, n_levels, size=n)]
        if len(set(labels)) < 2:
            continue
        ys = rng.random(n)
        rows = [AnalysisRow(y=float(ys[i]), medium="tv", channel="c", status="public",
                            category=labels[i], audience="high", conflict="before",
                            speaker_gender="mostly_male") for i in range(n)]
        result = one_way_anova(rows, "category")

        # brute-force oracle: direct sums over fitted values
        arr = np.array(ys)
        lab = np.array(labels)
        grand = arr.mean()
        fitted = np.array([arr[lab == g].mean() for g in lab])
        ss_effect = float(((fitted - grand) ** 2).sum())
        ss_residual = float(((arr - fitted) ** 2).sum())
        ss_total = float(((arr - grand) ** 2).sum())
        assert result.ss_effect == pytest.approx(ss_effect, rel=1e-8, abs=1e-12)
        assert result.ss_residual == pytest.approx(ss_residual, rel=1e-8)
        assert result.ss_total == pytest.approx(ss_total, rel=1e-8)
        f_ref = (ss_effect / result.df_effect) / (ss_residual / result.df_residual)
        assert result.f_stat == pytest.approx(f_ref, rel=1e-8)
        assert result.eta_squared == pytest.approx(ss_effect / ss_total, rel=1e-8)

        design, response, _ = build_design(rows, "category")
        fit = ols_fit(design, response)
        residual = response - design @ fit.coefficients
        assert float(np.max(np.abs(design.T @ residual))) <= \
            1e-8 * max(1.0, float(np.linalg.norm(response)))
        assert fit.rss == pytest.approx(result.ss_residual, rel=1e-8)

    # F tail at (F=1, df 1, 2) against a numerical-integration oracle
    def f_pdf(x, d1, d2):
        return (math.exp((d1 / 2) * math.log(d1 * x) + (d2 / 2) * math.log(d2)
                         - ((d1 + d2) / 2) * math.log(d1 * x + d2))
                / (x * sp_special.beta(d1 / 2, d2 / 2)))

    oracle, _ = integrate.quad(f_pdf, 1.0, np.inf, args=(1, 2))
    assert f_sf(1.0, 1, 2) == pytest.approx(oracle, abs=1e-6)
    assert f_sf(1.0, 1, 2) == pytest.approx(0.4226, abs=1e-4)
    report_pass("statistics oracle equivalence (100 randomized datasets)")


# --- criterion 6: planted-effect recovery ------------------------------------

def test_criterion_planted_effect_recovery(tmp_path):
    from wre.synthgen import MeanOverride, PlantedEffects
    spec = SynthSpec(
        seed=77, programs_per_cell=10,
        cells=(("tv", "public", "news", "high"), ("tv", "private", "news", "low"),
               ("radio", "public", "news", "high"), ("radio", "private", "news", "low")),
        planted=PlantedEffects(
            rows_per_program=250, base_mean=0.33,
            overrides=(MeanOverride((("speaker_gender", "mostly_female"),), 0.369),
                       MeanOverride((("speaker_gender", "mostly_male"),), 0.282))))
    generate(spec, tmp_path)
    bundle = read_bundle(tmp_path)
    name_stats = build_name_stats(bundle.utterances, bundle.lexicon)
    rows = select_stats_population(bundle, name_stats)
    assert len(rows) == 10_000
    means = group_means(rows, "speaker_gender")
    assert means["mostly_female"] == pytest.approx(0.369, abs=0.005)
    assert means["mostly_male"] == pytest.approx(0.282, abs=0.005)
    gender = one_way_anova(rows, "speaker_gender")
    assert gender.p_value < 0.05

    # randomized-label null: all seven eta-squared below 0.01 in >= 99/100 seeds
    level_sets = {
        "medium": ("tv", "radio"), "channel": tuple(f"ch{i}" for i in range(8)),
        "status": ("public", "private"),
        "category": ("news", "entertainment", "magazine_documentary", "sport"),
        "audience": ("high", "low"), "conflict": ("before", "after"),
        "speaker_gender": ("mostly_male", "mostly_female"),
    }
    good = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        ys = rng.random(10_000)
        cols = {f: rng.choice(lv, size=10_000) for f, lv in level_sets.items()}
        null_rows = [AnalysisRow(y=float(ys[i]),
                                 **{f: str(cols[f][i]) for f in FACTOR_NAMES})
                     for i in range(10_000)]
        etas = [one_way_anova(null_rows, f).eta_squared for f in FACTOR_NAMES]
        if all(e < 0.01 for e in etas):
            good += 1
    assert good >= 99, f"null calibration: only {good}/100 seeds clean"
    report_pass(f"planted-effect recovery (10k rows; null {good}/100 clean)")


# --- criterion 7: interval properties ----------------------------------------

def test_criterion_interval_properties(tmp_path):
    rng = random.Random(424242)
    for _ in range(10_000):
        start = rng.randrange(0, 1_000_000)
        base = TimeInterval(start, start + rng.randrange(1, 500_000))
        cuts = []
        for _ in range(rng.randrange(0, 8)):
            cut_start = rng.randrange(0, 1_200_000)
            cuts.append(TimeInterval(cut_start, cut_start + rng.randrange(1, 400_000)))
        result = interval_subtract(base, cuts)
        removed = total_duration_ms(interval_intersect_all(base, cuts))
        assert total_duration_ms(result) + removed == base.duration_ms
        for prev, cur in zip(result, result[1:]):
            assert prev.end_ms <= cur.start_ms
        for piece in result:
            assert base.contains(piece)

    # ad-exclusion weight identity on randomized bundles
    for seed in (1, 2, 3):
        out = tmp_path / f"b{seed}"
        generate(SynthSpec(seed=seed, programs_per_cell=1, cells=ALL_CELLS[8:16],
                           break_density=0.04 + 0.02 * seed), out)
        bundle = read_bundle(out)
        name_stats = build_name_stats(bundle.utterances, bundle.lexicon)
        for program in bundle.programs.values():
            if program.medium is not Medium.TV:
                continue
            excl = program_metrics(program, bundle, name_stats, BreakMode.EXCLUDE_BREAKS)
            only = program_metrics(program, bundle, name_stats, BreakMode.ONLY_BREAKS)
            raw = program_metrics(program, bundle, name_stats, BreakMode.RAW)
            assert excl.wsr.weight + only.wsr.weight == pytest.approx(
                raw.wsr.weight, abs=1e-9)
            assert excl.wfr.weight + only.wfr.weight == pytest.approx(
                raw.wfr.weight, abs=1e-9)
    report_pass("interval properties (10k randomized subtract cases)")


# --- criterion 8: ingest round-trip ------------------------------------------

def test_criterion_ingest_round_trip(tmp_path):
    for seed in range(100):
        n_cells = 1 + seed % 3
        offset = seed % (len(ALL_CELLS) - n_cells)
        spec = SynthSpec(seed=seed, programs_per_cell=1,
                         cells=ALL_CELLS[offset:offset + n_cells],
                         break_density=0.05 if seed % 2 else 0.0,
                         program_minutes=6 + seed % 10)
        out = tmp_path / f"s{seed}"
        bundle, _ = generate(spec, out)
        reread = read_bundle(out)
        assert reread == bundle, f"seed {seed}"
        again = tmp_path / f"s{seed}_again"
        write_bundle(reread, again)
        for name in ("programs.csv", "reports.csv", "breaks.csv", "segments.jsonl",
                     "utterances.jsonl", "faces.jsonl", "names.csv"):
            assert (out / name).read_bytes() == (again / name).read_bytes(), \
                f"seed {seed}: {name}"

    # lexicon order-independence under row shuffling
    source = (tmp_path / "s0" / "names.csv").read_text(encoding="utf-8").splitlines()
    header, rows = source[0], source[1:]
    baseline = parse_name_db(io.StringIO("\n".join([header, *rows]) + "\n"))
    for seed in (7, 8, 9):
        shuffled = rows[:]
        random.Random(seed).shuffle(shuffled)
        relexed = parse_name_db(io.StringIO("\n".join([header, *shuffled]) + "\n"))
        assert relexed.records == baseline.records
    report_pass("ingest round-trip (100 randomized bundles)")
