"""Exact Kemeny consensus for small numbers of systems.

Used as the reference against which Borda is checked. Both solvers work on
the pairwise preference matrix ``P`` where ``P[i, j]`` is the number of
input rankings placing system ``i`` above system ``j`` (a tie counts 0.5 in
each direction). Placing ``i`` above ``j`` in the consensus costs ``P[j, i]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .aggregation import borda, validate_rankings
from .ranking import kendall_distance

__all__ = [
    "KemenySolution",
    "preference_matrix",
    "kemeny_objective",
    "kemeny_brute_force",
    "kemeny_branch_bound",
    "kemeny_exact",
    "borda_approx_ratio",
]

_CHUNK = 40320  # 8!


@dataclass(frozen=True)
class KemenySolution:
    """``co_optima_count`` is ``None`` when the solver does not enumerate ties."""

    consensus: np.ndarray
    objective: int
    optimal: bool
    co_optima_count: int | None


def preference_matrix(rankings: Sequence) -> np.ndarray:
    rs = validate_rankings(rankings)
    arr = np.column_stack(rs)  # (N, T)
    above = (arr[:, None, :] < arr[None, :, :]).sum(axis=2)
    tied = (arr[:, None, :] == arr[None, :, :]).sum(axis=2)
    pref = above + 0.5 * tied
    np.fill_diagonal(pref, 0.0)
    if np.all(pref == np.round(pref)):
        return pref.astype(np.int64)
    return pref


def kemeny_objective(candidate, rankings: Sequence) -> int:
    """Total Kendall distance from a strict candidate to every input ranking."""
    rs = validate_rankings(rankings, strict=True)
    cand = np.asarray(candidate)
    if cand.size != rs[0].size:
        raise ValueError(f"candidate ranks {cand.size} systems, inputs rank {rs[0].size}")
    return int(sum(kendall_distance(cand, r) for r in rs))


def _check_size(n: int, n_max: int, hint: str) -> None:
    if n > n_max:
        raise ValueError(f"{n} systems exceeds n_max={n_max}; {hint}")


def kemeny_brute_force(rankings: Sequence, n_max: int = 10) -> KemenySolution:
    """Enumerate all ``N!`` rank vectors and keep the best one.

    Among co-optimal consensus rankings, the lexicographically smallest rank
    vector is returned.
    """
    rs = validate_rankings(rankings, strict=True)
    n = rs[0].size
    _check_size(n, n_max, "use branch-and-bound or Borda")
    pref = preference_matrix(rs)
    pairs = list(itertools.combinations(range(n), 2))
    # itertools.permutations yields rank vectors in lexicographic order
    perms = itertools.permutations(range(1, n + 1))
    best_obj = None
    best = None
    count = 0
    while True:
        chunk = np.array(list(itertools.islice(perms, _CHUNK)), dtype=np.int8)
        if chunk.size == 0:
            break
        obj = np.zeros(len(chunk), dtype=np.int64)
        for i, j in pairs:
            i_above = chunk[:, i] < chunk[:, j]
            obj += np.where(i_above, pref[j, i], pref[i, j])
        low = obj.min()
        if best_obj is None or low < best_obj:
            best_obj = low
            best = chunk[int(np.argmin(obj))].astype(np.int64)
            count = int(np.count_nonzero(obj == low))
        elif low == best_obj:
            count += int(np.count_nonzero(obj == low))
    return KemenySolution(best, int(best_obj), True, count)


def kemeny_branch_bound(rankings: Sequence, n_max: int = 15) -> KemenySolution:
    """Exact consensus by depth-first branch-and-bound over orderings.

    Systems are placed best-first. The bound adds, for every pair of
    still-unplaced systems, the cheaper of its two relative orders. A
    partial ordering is also discarded when the same set of systems was
    already placed at no greater cost. The search starts from the Borda
    ranking as incumbent.
    """
    rs = validate_rankings(rankings, strict=True)
    n = rs[0].size
    _check_size(n, n_max, "use Borda")
    pref = preference_matrix(rs).tolist()
    pair_min = [[min(pref[i][j], pref[j][i]) for j in range(n)] for i in range(n)]

    incumbent = borda(rs).ranking
    best_order = [int(i) for i in np.argsort(incumbent)]
    best_cost = _order_cost(best_order, pref)
    seen: dict[int, float] = {}

    def search(mask: int, prefix: list[int], cost, bound_rest) -> None:
        nonlocal best_cost, best_order
        if cost + bound_rest >= best_cost:
            return
        prev = seen.get(mask)
        if prev is not None and prev <= cost:
            return
        seen[mask] = cost
        remaining = [i for i in range(n) if not mask >> i & 1]
        if not remaining:
            best_cost, best_order = cost, list(prefix)
            return
        options = []
        for i in remaining:
            add = sum(pref[j][i] for j in remaining if j != i)
            drop = sum(pair_min[i][j] for j in remaining if j != i)
            options.append((add - drop, add, drop, i))
        options.sort()
        for _, add, drop, i in options:
            prefix.append(i)
            search(mask | 1 << i, prefix, cost + add, bound_rest - drop)
            prefix.pop()

    total_bound = sum(pair_min[i][j] for i in range(n) for j in range(i + 1, n))
    search(0, [], 0, total_bound)

    consensus = np.empty(n, dtype=np.int64)
    consensus[best_order] = np.arange(1, n + 1)
    return KemenySolution(consensus, int(round(best_cost)), True, None)


def _order_cost(order: list[int], pref) -> float:
    cost = 0
    for a, i in enumerate(order):
        for j in order[a + 1 :]:
            cost += pref[j][i]
    return cost


def kemeny_exact(rankings: Sequence, n_max: int = 15) -> KemenySolution:
    """Brute force up to 8 systems, branch-and-bound above."""
    n = np.asarray(rankings[0]).size
    if n <= 8:
        return kemeny_brute_force(rankings, n_max=8)
    return kemeny_branch_bound(rankings, n_max=n_max)


def borda_approx_ratio(rankings: Sequence) -> float:
    """Kemeny objective of the Borda ranking over the optimal objective."""
    rs = validate_rankings(rankings, strict=True)
    exact = kemeny_exact(rs)
    approx = kemeny_objective(borda(rs).ranking, rs)
    if exact.objective == 0:
        if approx != 0:
            raise AssertionError("unanimity violated: Borda missed a zero-cost consensus")
        return 1.0
    return approx / exact.objective
