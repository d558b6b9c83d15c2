from collections import Counter
from fractions import Fraction

import pytest

from souvlaki.census import (CensusTable, LimitLevelSampler, level_count,
                             limit_level_probability, ownership_count,
                             ownership_weight_tail_bound,
                             paper_weight_tail_bound, root_level_probability,
                             summability_certificate, tv_distance_from_counts,
                             volume_left, _weight_ratio)
from souvlaki.topology import LEFT_ONLY, MeatballSpec, materialize_meatball


def test_volume_values():
    assert [volume_left(k) for k in (1, 2, 3)] == [14, 860, 23310]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_volume_matches_enumeration(k):
    assert materialize_meatball(MeatballSpec(k), LEFT_ONLY).n == volume_left(k)


def test_level_identity_to_30():
    for k in range(1, 31):
        assert sum(level_count(k, i) for i in range(k + 1)) == volume_left(k)


def test_root_level_probability_values():
    assert root_level_probability(1, 2, 7) == Fraction(686, 6706)
    assert root_level_probability(2, 2, 7) == Fraction(6020, 6706)
    assert root_level_probability(1, 1, 7) == 1


def test_ratio_is_n_independent():
    want = Fraction(14 * 7, 860)
    for n in range(2, 7):
        p1 = root_level_probability(1, n, 7)
        p2 = root_level_probability(2, n, 7)
        assert p1 / p2 == want == Fraction(98, 860)


def test_probabilities_sum_to_one():
    for n in (1, 2, 5):
        assert sum(root_level_probability(k, n, 7) for k in range(1, n + 1)) == 1


def test_ownership_counts():
    assert ownership_count(1, 7) == 14
    assert ownership_count(2, 7) == 860 + 7 * 36 * 1 == 1112


def test_ownership_census_on_tn2(tn2):
    by_level = Counter(2 - len(v.owner) + 1 for v in tn2.labels)
    assert by_level[1] == 14 * 49
    assert by_level[2] == 1112 * 7
    # total matches the ownership accounting with no leftover correction
    assert tn2.n == sum(ownership_count(k, 7) * 7 ** (2 - k + 1) for k in (1, 2))


def test_conditional_root_law_tn2(tn2):
    # vertices inside some left piece are exactly the copy-free ones
    counts = Counter(2 - len(v.owner) + 1 for v in tn2.labels if v.copy is None)
    total = sum(counts.values())
    for k in (1, 2):
        assert Fraction(counts[k], total) == root_level_probability(k, 2, 7)


def test_summability_certificate():
    k0 = summability_certificate(7)
    assert k0 == 26
    assert _weight_ratio(k0 - 1, 7) >= 1 > _weight_ratio(k0, 7)
    # monotone decrease of the ratio (exact spot sweep)
    prev = None
    for j in range(1, 80):
        r = _weight_ratio(j, 7)
        if prev is not None:
            assert r < prev
        prev = r


def test_tail_bounds_dominate_partial_tails():
    for J in (26, 30, 40):
        tail = sum(Fraction(volume_left(j), 7 ** j) for j in range(J + 1, J + 40))
        assert tail < paper_weight_tail_bound(J, 7)
        tail_u = sum(Fraction(ownership_count(j, 7), 7 ** j) for j in range(J + 1, J + 40))
        assert tail_u < ownership_weight_tail_bound(J, 7)


def test_limit_interval_nesting_and_shrinking():
    tols = [Fraction(1, 10 ** e) for e in (3, 6, 9)]
    prev = None
    for tol in tols:
        lo, hi = limit_level_probability(2, 7, tol)
        assert 0 < lo <= hi and hi - lo < tol
        if prev is not None:
            assert prev[0] <= lo and hi <= prev[1]
        prev = (lo, hi)


def test_finite_probability_enters_limit_interval():
    # p_{k,n} decreases to p_k (partial-sum denominators grow), so it enters
    # the enclosure at some finite n and never undershoots it
    lo, hi = limit_level_probability(3, 7, Fraction(1, 10 ** 12))
    prev = None
    entered = None
    for n in range(3, 601, 3):
        p = root_level_probability(3, n, 7)
        if prev is not None:
            assert p < prev
        prev = p
        if entered is None and p <= hi:
            entered = n
    assert entered is not None and prev >= lo


def test_limit_normalization():
    tol = Fraction(1, 10 ** 8)
    mids = []
    for k in range(1, 120):
        lo, hi = limit_level_probability(k, 7, tol)
        mids.append((lo + hi) / 2)
    assert abs(sum(mids) - 1) < Fraction(1, 10 ** 3)


def test_dominant_first_term_for_huge_d():
    lo, hi = limit_level_probability(1, 10 ** 6, Fraction(1, 10 ** 6))
    assert lo > Fraction(99, 100)


def test_census_table():
    t = CensusTable.build(7, 10)
    assert t.volumes[:2] == [14, 860]
    assert t.owned[1] == 1112
    assert t.paper_cumulative[-1] == sum(t.paper_weights)


def test_sampler_determinism_and_tv():
    s1 = LimitLevelSampler(7, seed=123)
    s2 = LimitLevelSampler(7, seed=123)
    a = [s1.sample() for _ in range(500)]
    b = [s2.sample() for _ in range(500)]
    assert a == b
    counts = LimitLevelSampler(7, seed=9).sample_many(40_000)
    assert tv_distance_from_counts(counts, 7) < 0.02
