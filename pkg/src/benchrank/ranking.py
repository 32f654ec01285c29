"""Rank vectors, Kendall distance and Kendall tau.

A ranking over ``N`` systems is a 1-D numpy array ``r`` where ``r[i]`` is the
rank of system ``i``; rank 1 is the best system. Tied systems may share an
average (fractional) rank, e.g. ``[1.5, 1.5, 3]``.
"""

from __future__ import annotations

from enum import Enum
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

__all__ = [
    "Direction",
    "TiePolicy",
    "rank_from_scores",
    "rank_columns",
    "argsort_argsort",
    "is_strict",
    "check_ranking",
    "kendall_distance",
    "kendall_distance_naive",
    "normalized_kendall_distance",
    "kendall_tau",
    "reverse_ranking",
]


class Direction(str, Enum):
    """Optimization direction of a task metric."""

    HIGHER = "higher"
    LOWER = "lower"

    @classmethod
    def parse(cls, value: "Direction | str") -> "Direction":
        if isinstance(value, Direction):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown direction {value!r}; use 'higher' or 'lower'") from None


class TiePolicy(str, Enum):
    """How equal scores are ranked.

    ``FRACTIONAL`` gives tied systems their average rank, ``COMPETITION``
    gives them the smallest rank of the group and ``STABLE`` breaks ties by
    system index (lower index ranks first).
    """

    FRACTIONAL = "fractional"
    COMPETITION = "competition"
    STABLE = "stable"

    @classmethod
    def parse(cls, value: "TiePolicy | str") -> "TiePolicy":
        if isinstance(value, TiePolicy):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"unknown tie policy {value!r}; use 'fractional', 'competition' or 'stable'"
            ) from None


_RANKDATA_METHOD = {
    TiePolicy.FRACTIONAL: "average",
    TiePolicy.COMPETITION: "min",
    TiePolicy.STABLE: "ordinal",
}


def _finite_vector(values, what: str = "scores") -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{what} must be non-empty")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValueError(f"{what} contain a non-finite value at index {int(bad[0])}")
    return arr


def _finalize(ranks: np.ndarray, tie_policy: TiePolicy) -> np.ndarray:
    if tie_policy is TiePolicy.FRACTIONAL:
        return ranks.astype(float)
    return ranks.astype(np.int64)


def rank_from_scores(
    scores: Sequence[float],
    direction: Direction | str = Direction.HIGHER,
    tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL,
) -> np.ndarray:
    """Rank systems by their score on a single task or instance.

    >>> rank_from_scores([0.3, 0.1, 0.0], "lower", "stable").tolist()
    [3, 2, 1]
    >>> rank_from_scores([2.0, 2.0, 1.0]).tolist()
    [1.5, 1.5, 3.0]
    """
    arr = _finite_vector(scores)
    direction = Direction.parse(direction)
    tie_policy = TiePolicy.parse(tie_policy)
    key = -arr if direction is Direction.HIGHER else arr
    return _finalize(rankdata(key, method=_RANKDATA_METHOD[tie_policy]), tie_policy)


def rank_columns(
    scores: np.ndarray,
    direction: Direction | str = Direction.HIGHER,
    tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL,
) -> np.ndarray:
    """Rank every column of an ``(N, M)`` score matrix over its ``N`` rows.

    Column ``m`` of the result equals ``rank_from_scores(scores[:, m], ...)``.
    """
    arr = np.asarray(scores, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError(f"expected a non-empty (N, M) matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        n, m = np.argwhere(~np.isfinite(arr))[0]
        raise ValueError(f"non-finite score at row {n}, column {m}")
    direction = Direction.parse(direction)
    tie_policy = TiePolicy.parse(tie_policy)
    key = -arr if direction is Direction.HIGHER else arr
    if arr.shape[1] == 0:
        return _finalize(np.empty_like(arr), tie_policy)
    return _finalize(rankdata(key, method=_RANKDATA_METHOD[tie_policy], axis=0), tie_policy)


def argsort_argsort(values: Sequence[float]) -> np.ndarray:
    """Ranks of ``values`` in ascending order, ties broken by index.

    The smallest value receives rank 1.

    >>> argsort_argsort([13, 12, 11]).tolist()
    [3, 2, 1]
    >>> argsort_argsort([2, 2, 1]).tolist()
    [2, 3, 1]
    """
    arr = _finite_vector(values, "values")
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=np.int64)
    ranks[order] = np.arange(1, arr.size + 1)
    return ranks


def is_strict(ranking) -> bool:
    """True if ``ranking`` is a permutation of ``1..N``."""
    r = np.asarray(ranking)
    if r.ndim != 1 or r.size == 0:
        return False
    return bool(np.array_equal(np.sort(r), np.arange(1, r.size + 1)))


def check_ranking(ranking, *, strict: bool = False) -> np.ndarray:
    """Validate a rank vector and return it as an array.

    Non-strict rankings must hold average ranks, so their sum is
    ``N(N+1)/2``.
    """
    r = np.asarray(ranking, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise ValueError("a ranking must be a non-empty 1-D sequence")
    n = r.size
    if strict:
        if not is_strict(r):
            raise ValueError("ranking has ties or is not a permutation of 1..N; resolve ties first")
        return np.asarray(ranking).astype(np.int64)
    if not np.all(np.isfinite(r)) or r.min() < 1 or r.max() > n:
        raise ValueError(f"ranks must lie in [1, {n}]")
    if not np.isclose(r.sum(), n * (n + 1) / 2):
        raise ValueError("ranks do not sum to N(N+1)/2; not an average-rank assignment")
    return r


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"rankings must have the same length, got {a.shape} and {b.shape}")
    return a, b


def _count_inversions(seq: list) -> int:
    # bottom-up merge sort; counts pairs i < j with seq[i] > seq[j]
    n = len(seq)
    src = list(seq)
    dst = [0] * n
    inversions = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if src[i] <= src[j]:
                    dst[k] = src[i]
                    i += 1
                else:
                    dst[k] = src[j]
                    inversions += mid - i
                    j += 1
                k += 1
            dst[k : k + mid - i] = src[i:mid]
            k += mid - i
            dst[k : k + hi - j] = src[j:hi]
        src, dst = dst, src
        width *= 2
    return inversions


def kendall_distance(a, b) -> int:
    """Number of system pairs ordered oppositely by two strict rankings.

    Runs in ``O(N log N)``: systems are sorted by ``a`` and the inversions of
    ``b`` read in that order are counted with a merge sort.
    """
    a, b = _pair(a, b)
    a = check_ranking(a, strict=True)
    b = check_ranking(b, strict=True)
    order = np.argsort(a)
    return _count_inversions(b[order].tolist())


def kendall_distance_naive(a, b) -> int:
    """``O(N^2)`` pair enumeration of the Kendall distance; reference oracle."""
    a, b = _pair(a, b)
    n = a.size
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if (a[i] - a[j]) * (b[i] - b[j]) < 0:
                count += 1
    return count


def normalized_kendall_distance(a, b) -> float:
    """Kendall distance divided by the number of pairs ``N(N-1)/2``."""
    a, b = _pair(a, b)
    n = a.size
    if n < 2:
        raise ValueError("normalized Kendall distance needs at least two systems")
    return kendall_distance(a, b) / (n * (n - 1) / 2)


def kendall_tau(a, b) -> float:
    """Kendall tau-b correlation between two (possibly tied) rank vectors."""
    a, b = _pair(a, b)
    a = a.astype(float)
    b = b.astype(float)
    iu = np.triu_indices(a.size, k=1)
    da = np.sign(a[:, None] - a[None, :])[iu]
    db = np.sign(b[:, None] - b[None, :])[iu]
    prod = da * db
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    tied_a_only = int(np.count_nonzero((da == 0) & (db != 0)))
    tied_b_only = int(np.count_nonzero((db == 0) & (da != 0)))
    denom = (concordant + discordant + tied_a_only) * (concordant + discordant + tied_b_only)
    if denom == 0:
        raise ValueError("degenerate ranking: all ranks tied in at least one input")
    return (concordant - discordant) / float(np.sqrt(denom))


def reverse_ranking(ranking) -> np.ndarray:
    """Mirror a rank vector: best becomes worst."""
    r = np.asarray(ranking)
    return (r.size + 1) - r
