import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kendalltau as scipy_kendalltau

from benchrank.ranking import (
    Direction,
    TiePolicy,
    argsort_argsort,
    check_ranking,
    is_strict,
    kendall_distance,
    kendall_distance_naive,
    kendall_tau,
    normalized_kendall_distance,
    rank_columns,
    rank_from_scores,
    reverse_ranking,
)
from oracles import average_rank, concordance_counts, discordant_pairs

permutations = st.integers(1, 8).flatmap(lambda n: st.permutations(list(range(1, n + 1))))


def perm_pair(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.permutations(list(range(1, n + 1))), st.permutations(list(range(1, n + 1)))
        )
    )


@pytest.mark.parametrize(
    "scores, direction, policy, expected",
    [
        ([0.3, 0.1, 0.0], Direction.LOWER, TiePolicy.STABLE, [3, 2, 1]),
        ([5.0], Direction.HIGHER, TiePolicy.FRACTIONAL, [1]),
        ([2.0, 2.0, 1.0], Direction.HIGHER, TiePolicy.FRACTIONAL, [1.5, 1.5, 3]),
        ([2.0, 2.0, 1.0], Direction.HIGHER, TiePolicy.COMPETITION, [1, 1, 3]),
        ([2.0, 2.0, 1.0], Direction.HIGHER, TiePolicy.STABLE, [1, 2, 3]),
        ([1.0, 1.0, 1.0], "lower", "stable", [1, 2, 3]),
    ],
)
def test_rank_from_scores_examples(scores, direction, policy, expected):
    assert rank_from_scores(scores, direction, policy).tolist() == expected


def test_rank_from_scores_errors():
    with pytest.raises(ValueError, match="non-empty"):
        rank_from_scores([])
    with pytest.raises(ValueError, match="index 2"):
        rank_from_scores([1.0, 2.0, float("nan")])
    with pytest.raises(ValueError, match="direction"):
        rank_from_scores([1.0], "sideways")


@settings(max_examples=200)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=12))
def test_fractional_ranks_match_oracle_and_sum(scores):
    for higher in (True, False):
        direction = Direction.HIGHER if higher else Direction.LOWER
        r = rank_from_scores(scores, direction, TiePolicy.FRACTIONAL)
        assert r.tolist() == average_rank(scores, higher)
        n = len(scores)
        assert r.sum() == n * (n + 1) / 2


@settings(max_examples=200)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=12))
def test_rank_invariant_under_monotone_transforms(scores):
    s = np.array(scores)
    for policy in TiePolicy:
        base = rank_from_scores(s, Direction.HIGHER, policy)
        # strictly increasing transforms preserve order and ties exactly
        assert np.array_equal(rank_from_scores(s * 3.0 + 7.0, Direction.HIGHER, policy), base) or _collides(s)
        assert np.array_equal(rank_from_scores(np.arctan(s), Direction.HIGHER, policy), base) or _collides(s)
        # a strictly decreasing transform turns HIGHER into LOWER
        assert np.array_equal(rank_from_scores(-s, Direction.LOWER, policy), base)


def _collides(s):
    # float rounding of the transform can merge distinct neighbours
    return len(set(np.arctan(s))) != len(set(s)) or len(set(s * 3.0 + 7.0)) != len(set(s))


def test_rank_columns_matches_vector_version(rng):
    m = rng.integers(0, 4, size=(6, 5)).astype(float)
    for policy in TiePolicy:
        for direction in Direction:
            cols = rank_columns(m, direction, policy)
            for j in range(m.shape[1]):
                assert np.array_equal(cols[:, j], rank_from_scores(m[:, j], direction, policy))


@pytest.mark.parametrize(
    "values, expected",
    [([13, 12, 11], [3, 2, 1]), ([5], [1]), ([2, 2, 1], [2, 3, 1])],
)
def test_argsort_argsort(values, expected):
    assert argsort_argsort(values).tolist() == expected


def test_argsort_argsort_nan():
    with pytest.raises(ValueError):
        argsort_argsort([1.0, float("nan")])


@pytest.mark.parametrize(
    "a, b, d",
    [([1, 2, 3], [1, 2, 3], 0), ([1, 2, 3, 4], [4, 3, 2, 1], 6), ([1, 2, 3], [2, 1, 3], 1)],
)
def test_kendall_distance_examples(a, b, d):
    assert kendall_distance(a, b) == d


def test_kendall_distance_errors():
    with pytest.raises(ValueError, match="same length"):
        kendall_distance([1, 2], [1, 2, 3])
    with pytest.raises(ValueError, match="ties"):
        kendall_distance([1.5, 1.5, 3], [1, 2, 3])


@pytest.mark.parametrize(
    "a, b, expected",
    [([1, 2, 3, 4], [4, 3, 2, 1], 1.0), ([1, 2, 3], [1, 2, 3], 0.0), ([1, 2, 3], [1, 3, 2], 1 / 3)],
)
def test_normalized_kendall_distance(a, b, expected):
    assert normalized_kendall_distance(a, b) == pytest.approx(expected, abs=1e-15)
    # independent pair count
    n = len(a)
    assert discordant_pairs(a, b) / (n * (n - 1) / 2) == pytest.approx(expected)


def test_normalized_needs_two_systems():
    with pytest.raises(ValueError):
        normalized_kendall_distance([1], [1])


def test_kendall_fast_equals_oracle_exhaustive_small():
    for n in range(1, 6):
        perms = list(itertools.permutations(range(1, n + 1)))
        for a in perms:
            for b in perms:
                assert kendall_distance(a, b) == discordant_pairs(a, b)


def test_kendall_fast_equals_oracle_random_large(rng):
    for _ in range(300):
        n = int(rng.integers(2, 65))
        a, b = rng.permutation(n) + 1, rng.permutation(n) + 1
        assert kendall_distance(a, b) == kendall_distance_naive(a, b)


@settings(max_examples=300)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(*[st.permutations(list(range(1, n + 1)))] * 3)))
def test_kendall_is_a_metric(triple):
    a, b, c = triple
    dab, dba = kendall_distance(a, b), kendall_distance(b, a)
    assert dab == dba
    assert (dab == 0) == (list(a) == list(b))
    assert kendall_distance(a, c) <= dab + kendall_distance(b, c)
    n = len(a)
    assert 0 <= dab <= n * (n - 1) // 2


@pytest.mark.parametrize(
    "a, b, expected",
    [([1, 2, 3], [1, 2, 3], 1.0), ([1, 2, 3], [3, 2, 1], -1.0), ([1, 2, 3, 4], [1, 2, 4, 3], 2 / 3)],
)
def test_kendall_tau_examples(a, b, expected):
    assert kendall_tau(a, b) == pytest.approx(expected, abs=1e-15)


def test_kendall_tau_degenerate():
    with pytest.raises(ValueError, match="degenerate"):
        kendall_tau([2, 2, 2], [1, 2, 3])


@settings(max_examples=300)
@given(perm_pair())
def test_tau_equals_distance_formula_on_strict(pair):
    a, b = pair
    n = len(a)
    if n < 2:
        return
    d = kendall_distance(a, b)
    assert kendall_tau(a, b) == pytest.approx(1 - 4 * d / (n * (n - 1)), abs=1e-12)


@settings(max_examples=300)
@given(st.integers(2, 10).flatmap(lambda n: st.tuples(st.lists(st.integers(0, 3), min_size=n, max_size=n),
                                                       st.lists(st.integers(0, 3), min_size=n, max_size=n))))
def test_tau_b_with_ties_matches_oracles(pair):
    a, b = pair
    if len(set(a)) == 1 or len(set(b)) == 1:
        with pytest.raises(ValueError):
            kendall_tau(a, b)
        return
    c, d, ta, tb = concordance_counts(a, b)
    expected = (c - d) / np.sqrt((c + d + ta) * (c + d + tb))
    got = kendall_tau(a, b)
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(scipy_kendalltau(a, b).statistic, abs=1e-12)
    assert -1 <= got <= 1


def test_check_ranking_and_is_strict():
    assert is_strict([2, 1, 3])
    assert not is_strict([1.5, 1.5, 3])
    check_ranking([1.5, 1.5, 3])
    with pytest.raises(ValueError):
        check_ranking([1, 1, 3])
    with pytest.raises(ValueError):
        check_ranking([1.5, 1.5, 3], strict=True)


def test_reverse_ranking():
    assert reverse_ranking([1, 3, 2]).tolist() == [3, 1, 2]
