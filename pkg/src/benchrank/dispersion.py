"""Dispersion of a set of rankings.

``performance_dispersion`` scores a candidate summary by its total Kendall
distance to the inputs; ``pairwise_dispersion`` measures how spread out the
inputs are among themselves. For any set of strict rankings the optimal
(Kemeny) per-input dispersion sits between one half and one times the mean
pairwise distance, which :func:`sandwich_check` verifies.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .aggregation import validate_rankings
from .kemeny import kemeny_exact, kemeny_objective
from .ranking import kendall_distance

__all__ = [
    "DispersionReport",
    "SandwichResult",
    "performance_dispersion",
    "pairwise_dispersion",
    "pairwise_dispersion_subsampled",
    "random_baseline",
    "sandwich_check",
]


@dataclass
class SandwichResult:
    lower: float
    value: float
    upper: float
    ok: bool


@dataclass
class DispersionReport:
    performance: dict[str, int] = field(default_factory=dict)
    pairwise_mean: float = 0.0
    random_baseline_mean: float = 0.0
    random_baseline_std: float = 0.0
    n_random: int = 100
    sandwich_ok: bool | None = None
    sandwich: SandwichResult | None = None
    seed: int | None = None
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["performance"] = {k: int(v) for k, v in self.performance.items()}
        return d


def performance_dispersion(candidate, rankings: Sequence) -> int:
    """Sum of Kendall distances from ``candidate`` to each ranking."""
    return kemeny_objective(candidate, rankings)


def _distance_matrix(rs: list[np.ndarray]) -> np.ndarray:
    t = len(rs)
    d = np.zeros((t, t), dtype=np.int64)
    for i in range(t):
        for j in range(i + 1, t):
            d[i, j] = d[j, i] = kendall_distance(rs[i], rs[j])
    return d


def pairwise_dispersion(rankings: Sequence) -> float:
    """Mean Kendall distance over distinct pairs of input rankings."""
    rs = validate_rankings(rankings, strict=True)
    t = len(rs)
    if t < 2:
        raise ValueError("pairwise dispersion needs at least two rankings")
    d = _distance_matrix(rs)
    return float(d.sum() / (t * (t - 1)))


def pairwise_dispersion_subsampled(
    rankings: Sequence,
    n_pairs: int,
    rng: np.random.Generator | int | None = None,
    exhaustive: bool = False,
) -> tuple[float, float]:
    """Monte-Carlo estimate of :func:`pairwise_dispersion`.

    Draws ``n_pairs`` ordered pairs of distinct rankings uniformly with
    replacement and returns ``(estimate, standard error)``. With
    ``exhaustive=True`` every distinct pair is used once and the standard
    error is 0.
    """
    rs = validate_rankings(rankings, strict=True)
    t = len(rs)
    if t < 2:
        raise ValueError("pairwise dispersion needs at least two rankings")
    if exhaustive:
        return pairwise_dispersion(rs), 0.0
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    rng = np.random.default_rng(rng)
    first = rng.integers(0, t, size=n_pairs)
    # shift by 1..t-1 so the second index always differs from the first
    second = (first + rng.integers(1, t, size=n_pairs)) % t
    values = np.array([kendall_distance(rs[i], rs[j]) for i, j in zip(first, second)], dtype=float)
    if n_pairs == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(n_pairs))


def random_baseline(
    rankings: Sequence,
    n_random: int = 100,
    rng: np.random.Generator | int | None = None,
) -> tuple[float, float]:
    """Mean and standard deviation of the dispersion of uniform random permutations."""
    if n_random < 1:
        raise ValueError("n_random must be >= 1")
    rs = validate_rankings(rankings, strict=True)
    n = rs[0].size
    rng = np.random.default_rng(rng)
    values = np.array(
        [performance_dispersion(rng.permutation(n) + 1, rs) for _ in range(n_random)],
        dtype=float,
    )
    return float(values.mean()), float(values.std())


def sandwich_check(rankings: Sequence, n_max: int = 15) -> SandwichResult:
    """Compare the optimal per-input dispersion with the pairwise dispersion.

    ``value`` is the exact Kemeny objective divided by ``T``; ``ok`` holds
    when ``0.5 * pairwise <= value <= pairwise``.
    """
    rs = validate_rankings(rankings, strict=True)
    if len(rs) < 2:
        raise ValueError("the sandwich bound needs at least two rankings")
    if rs[0].size > n_max:
        raise ValueError(f"{rs[0].size} systems is too many for an exact consensus (n_max={n_max})")
    t = len(rs)
    objective = kemeny_exact(rs, n_max=n_max).objective
    total = int(_distance_matrix(rs).sum())
    pairwise = total / (t * (t - 1))
    # integer form of lower <= value <= upper, free of rounding
    ok = total <= 2 * (t - 1) * objective and objective * (t - 1) <= total
    return SandwichResult(0.5 * pairwise, objective / t, pairwise, bool(ok))
