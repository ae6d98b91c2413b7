from datetime import datetime, timedelta

import pytest
from hypothesis import given, strategies as st

from wre.model import (
    AudienceSlot,
    ConflictPeriod,
    Medium,
    MetricKind,
    MetricValue,
    TimeInterval,
    classify_audience,
    classify_conflict_period,
    interval_intersect_all,
    interval_subtract,
    merge_metrics,
    normalize_intervals,
    round_half_away,
    total_duration_ms,
)

from conftest import PARIS, make_program


def iv(a, b):
    return TimeInterval(a, b)


class TestTimeInterval:
    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            TimeInterval(5, 5)
        with pytest.raises(ValueError):
            TimeInterval(10, 5)
        with pytest.raises(ValueError):
            TimeInterval(-1, 5)

    def test_half_open_point_membership(self):
        span = iv(10, 20)
        assert span.contains_point(10)
        assert not span.contains_point(20)

    def test_overlap_ms(self):
        assert iv(0, 10).overlap_ms(iv(5, 15)) == 5
        assert iv(0, 10).overlap_ms(iv(10, 20)) == 0


class TestIntervalSubtract:
    def test_single_interior_cut(self):
        assert interval_subtract(iv(0, 100_000), [iv(10_000, 20_000)]) == \
            [iv(0, 10_000), iv(20_000, 100_000)]

    def test_identity_on_empty_cuts(self):
        assert interval_subtract(iv(0, 100_000), []) == [iv(0, 100_000)]

    def test_full_cover_yields_empty(self):
        assert interval_subtract(iv(0, 60_000), [iv(0, 60_000)]) == []

    def test_overlapping_cuts_are_normalized(self):
        result = interval_subtract(iv(0, 100), [iv(10, 40), iv(30, 60), iv(50, 55)])
        assert result == [iv(0, 10), iv(60, 100)]

    def test_cuts_outside_base_ignored(self):
        assert interval_subtract(iv(50, 100), [iv(0, 40), iv(120, 130)]) == [iv(50, 100)]


intervals_st = st.builds(
    lambda a, d: TimeInterval(a, a + d),
    st.integers(min_value=0, max_value=500_000),
    st.integers(min_value=1, max_value=100_000),
)


@given(base=intervals_st, cuts=st.lists(intervals_st, max_size=12))
def test_subtract_conserves_duration(base, cuts):
    result = interval_subtract(base, cuts)
    cut_in_base = total_duration_ms(interval_intersect_all(base, cuts))
    assert total_duration_ms(result) + cut_in_base == base.duration_ms


@given(base=intervals_st, cuts=st.lists(intervals_st, max_size=12))
def test_subtract_sorted_disjoint_contained(base, cuts):
    result = interval_subtract(base, cuts)
    for prev, cur in zip(result, result[1:]):
        assert prev.end_ms <= cur.start_ms
    for piece in result:
        assert base.contains(piece)


@given(items=st.lists(intervals_st, max_size=12))
def test_normalize_is_disjoint_union(items):
    merged = normalize_intervals(items)
    for prev, cur in zip(merged, merged[1:]):
        assert prev.end_ms < cur.start_ms  # adjacency merged too
    covered = set()
    for span in items:
        covered.update(range(span.start_ms, min(span.end_ms, span.start_ms + 2000)))
    for t in covered:
        assert any(m.contains_point(t) for m in merged)


class TestClassifyAudience:
    def test_tv_evening_is_high(self):
        program = make_program(start=datetime(2023, 5, 15, 19, 0, tzinfo=PARIS))
        assert classify_audience(program) is AudienceSlot.HIGH

    def test_radio_morning_is_high(self):
        program = make_program(medium=Medium.RADIO,
                               start=datetime(2023, 5, 15, 7, 0, tzinfo=PARIS))
        assert classify_audience(program) is AudienceSlot.HIGH

    def test_half_overlap_tie_goes_high(self):
        program = make_program(start=datetime(2023, 5, 15, 17, 30, tzinfo=PARIS))
        overlap = 30 * 60  # 18:00-18:30 of an 17:30-18:30 program
        assert 2 * overlap == 60 * 60
        assert classify_audience(program) is AudienceSlot.HIGH

    def test_afternoon_tv_is_low(self):
        program = make_program(start=datetime(2023, 5, 15, 14, 0, tzinfo=PARIS))
        assert classify_audience(program) is AudienceSlot.LOW

    def test_radio_evening_is_low(self):
        program = make_program(medium=Medium.RADIO,
                               start=datetime(2023, 5, 15, 19, 0, tzinfo=PARIS))
        assert classify_audience(program) is AudienceSlot.LOW

    def test_utc_and_local_agree(self):
        local = make_program(start=datetime(2023, 5, 15, 19, 0, tzinfo=PARIS))
        utc = make_program(start=local.start_utc.astimezone(tz=None).astimezone(PARIS))
        assert classify_audience(local) is classify_audience(utc)

    @given(hour=st.integers(0, 23), minute=st.integers(0, 59),
           total_minutes=st.integers(2, 360), medium=st.sampled_from(list(Medium)))
    def test_split_metamorphic(self, hour, minute, total_minutes, medium):
        # If both halves classify identically, the whole program agrees.
        start = datetime(2023, 5, 15, hour, minute, tzinfo=PARIS)
        half = total_minutes // 2
        whole = make_program(medium=medium, start=start, minutes=total_minutes)
        first = make_program(medium=medium, start=start, minutes=half)
        second = make_program(medium=medium, start=start + timedelta(minutes=half),
                              minutes=total_minutes - half)
        a, b = classify_audience(first), classify_audience(second)
        if a is b:
            assert classify_audience(whole) is a


class TestClassifyConflict:
    def test_day_before_cutoff(self):
        program = make_program(start=datetime(2023, 10, 6, 23, 0, tzinfo=PARIS))
        assert classify_conflict_period(program) is ConflictPeriod.BEFORE

    def test_cutoff_instant_is_after(self):
        program = make_program(start=datetime(2023, 10, 7, 0, 0, tzinfo=PARIS))
        assert classify_conflict_period(program) is ConflictPeriod.AFTER

    def test_may_is_before(self):
        program = make_program(start=datetime(2023, 5, 15, 12, 0, tzinfo=PARIS))
        assert classify_conflict_period(program) is ConflictPeriod.BEFORE

    def test_custom_cutoff(self):
        program = make_program(start=datetime(2023, 5, 15, 12, 0, tzinfo=PARIS))
        cutoff = datetime(2023, 5, 1, tzinfo=PARIS)
        assert classify_conflict_period(program, cutoff) is ConflictPeriod.AFTER


class TestMetricValue:
    def test_bounds_enforced(self):
        with pytest.raises(ValueError):
            MetricValue(MetricKind.WSR, 101.0, 10.0)
        with pytest.raises(ValueError):
            MetricValue(MetricKind.WSR, 50.0, 0.0)
        with pytest.raises(ValueError):
            MetricValue(MetricKind.WSR, None, 3.0)

    def test_male_pct_implied(self):
        value = MetricValue(MetricKind.WSR, 30.0, 10.0)
        assert value.male_pct == 70.0

    def test_from_amounts_undefined_on_zero_total(self):
        value = MetricValue.from_amounts(MetricKind.WQR, 0.0, 0.0)
        assert not value.defined and value.weight == 0.0

    def test_merge_weighted_mean(self):
        a = MetricValue(MetricKind.WSR, 100.0, 10.0)
        b = MetricValue(MetricKind.WSR, 0.0, 90.0)
        merged = merge_metrics([a, b])
        assert merged.female_pct == pytest.approx(10.0, abs=1e-12)
        assert merged.weight == 100.0

    def test_merge_skips_undefined(self):
        a = MetricValue(MetricKind.WFR, 40.0, 5.0)
        merged = merge_metrics([a, MetricValue.undefined(MetricKind.WFR)])
        assert merged == a

    def test_merge_mixed_kinds_rejected(self):
        with pytest.raises(ValueError):
            merge_metrics([MetricValue(MetricKind.WSR, 10.0, 1.0),
                           MetricValue(MetricKind.WFR, 10.0, 1.0)])

    @given(pcts=st.lists(st.floats(0, 100), min_size=1, max_size=8),
           weights=st.lists(st.floats(0.001, 1000), min_size=8, max_size=8))
    def test_merge_stays_in_bounds(self, pcts, weights):
        values = [MetricValue(MetricKind.WQR, p, w) for p, w in zip(pcts, weights)]
        merged = merge_metrics(values)
        assert 0.0 <= merged.female_pct <= 100.0


def test_round_half_away():
    assert round_half_away(21.45) == 21.5
    assert round_half_away(21.44999) == 21.4
    assert round_half_away(-2.35) == -2.4
    assert round_half_away(0.05) == 0.1
    assert round_half_away(0.0) == 0.0
