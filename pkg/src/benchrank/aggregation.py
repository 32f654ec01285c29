"""Score containers and the aggregation procedures.

Two input granularities are supported:

* :class:`TaskScoreMatrix` holds one score per (system, task);
* :class:`InstanceScoreSet` holds, for each task, one score per
  (system, instance).

Rank-based procedures (:func:`sigma_star`, :func:`sigma_one_level`,
:func:`sigma_two_level`) first turn every task or instance into a ranking of
the systems and then combine the rankings with :func:`borda`. They only look
at the order of the scores, so any strictly increasing per-task rescaling
leaves them unchanged. :func:`mean_task_aggregate` averages raw scores and is
the scale-sensitive baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .ranking import (
    Direction,
    TiePolicy,
    argsort_argsort,
    check_ranking,
    rank_columns,
    rank_from_scores,
)

__all__ = [
    "TaskScoreMatrix",
    "InstanceScoreSet",
    "AggregationResult",
    "PairwiseResult",
    "METHODS",
    "mean_instance_aggregate",
    "mean_task_aggregate",
    "borda",
    "sigma_star",
    "sigma_one_level",
    "sigma_two_level",
    "pairwise_compare",
    "aggregate",
]

METHODS = ("mean", "sigma_star", "one_level", "two_level")
RANK_BASED = ("sigma_star", "one_level", "two_level")


def _labels(given, n: int, prefix: str, what: str) -> tuple[str, ...]:
    if given is None:
        return tuple(f"{prefix}{i + 1}" for i in range(n))
    labels = tuple(str(x) for x in given)
    if len(labels) != n:
        raise ValueError(f"expected {n} {what}, got {len(labels)}")
    if len(set(labels)) != n:
        raise ValueError(f"duplicate {what}: {sorted(x for x in labels if labels.count(x) > 1)}")
    return labels


def _directions(given, n_tasks: int) -> tuple[Direction, ...]:
    if given is None:
        return (Direction.HIGHER,) * n_tasks
    if isinstance(given, (str, Direction)):
        return (Direction.parse(given),) * n_tasks
    dirs = tuple(Direction.parse(d) for d in given)
    if len(dirs) != n_tasks:
        raise ValueError(f"expected {n_tasks} directions, got {len(dirs)}")
    return dirs


@dataclass(frozen=True)
class TaskScoreMatrix:
    """Scores of ``N`` systems on ``T`` tasks (one number per cell).

    ``directions`` may be a single direction applied to every task or one
    direction per task. Labels default to ``S1..SN`` and ``T1..TT``.
    """

    scores: np.ndarray
    system_names: tuple[str, ...] = None
    task_names: tuple[str, ...] = None
    directions: tuple[Direction, ...] = None

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        if scores.ndim != 2 or scores.shape[0] < 1 or scores.shape[1] < 1:
            raise ValueError(f"scores must be a non-empty (N, T) matrix, got shape {scores.shape}")
        if not np.all(np.isfinite(scores)):
            n, t = np.argwhere(~np.isfinite(scores))[0]
            raise ValueError(f"non-finite score for system {n}, task {t}")
        scores.setflags(write=False)
        n_sys, n_tasks = scores.shape
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "system_names", _labels(self.system_names, n_sys, "S", "system names"))
        object.__setattr__(self, "task_names", _labels(self.task_names, n_tasks, "T", "task names"))
        object.__setattr__(self, "directions", _directions(self.directions, n_tasks))

    @property
    def n_systems(self) -> int:
        return self.scores.shape[0]

    @property
    def n_tasks(self) -> int:
        return self.scores.shape[1]

    def select_tasks(self, tasks: Iterable[int]) -> "TaskScoreMatrix":
        idx = list(tasks)
        if not idx:
            raise ValueError("task subset is empty")
        return TaskScoreMatrix(
            self.scores[:, idx],
            self.system_names,
            [self.task_names[i] for i in idx],
            [self.directions[i] for i in idx],
        )

    def task_rankings(self, tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL) -> list[np.ndarray]:
        """One ranking of the systems per task."""
        return [
            rank_from_scores(self.scores[:, t], self.directions[t], tie_policy)
            for t in range(self.n_tasks)
        ]


@dataclass(frozen=True)
class InstanceScoreSet:
    """Instance-level scores: for each task an ``(N, K_t)`` matrix."""

    scores: tuple[np.ndarray, ...]
    system_names: tuple[str, ...] = None
    task_names: tuple[str, ...] = None
    directions: tuple[Direction, ...] = None

    def __post_init__(self):
        blocks = []
        if isinstance(self.scores, np.ndarray) and self.scores.ndim == 3:
            raw = [self.scores[:, t, :] for t in range(self.scores.shape[1])]
        else:
            raw = list(self.scores)
        if not raw:
            raise ValueError("at least one task is required")
        n_sys = None
        for t, block in enumerate(raw):
            arr = np.array(block, dtype=float)
            if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
                raise ValueError(f"task {t}: expected a non-empty (N, K_t) matrix, got shape {arr.shape}")
            if n_sys is None:
                n_sys = arr.shape[0]
            elif arr.shape[0] != n_sys:
                raise ValueError(f"task {t} scores {arr.shape[0]} systems, expected {n_sys}")
            if not np.all(np.isfinite(arr)):
                n, k = np.argwhere(~np.isfinite(arr))[0]
                raise ValueError(f"non-finite score for system {n}, task {t}, instance {k}")
            arr.setflags(write=False)
            blocks.append(arr)
        object.__setattr__(self, "scores", tuple(blocks))
        object.__setattr__(self, "system_names", _labels(self.system_names, n_sys, "S", "system names"))
        object.__setattr__(self, "task_names", _labels(self.task_names, len(blocks), "T", "task names"))
        object.__setattr__(self, "directions", _directions(self.directions, len(blocks)))

    @property
    def n_systems(self) -> int:
        return self.scores[0].shape[0]

    @property
    def n_tasks(self) -> int:
        return len(self.scores)

    @property
    def n_instances(self) -> tuple[int, ...]:
        return tuple(block.shape[1] for block in self.scores)

    def select_tasks(self, tasks: Iterable[int]) -> "InstanceScoreSet":
        idx = list(tasks)
        if not idx:
            raise ValueError("task subset is empty")
        return InstanceScoreSet(
            [self.scores[i] for i in idx],
            self.system_names,
            [self.task_names[i] for i in idx],
            [self.directions[i] for i in idx],
        )

    def replace_scores(self, blocks: Sequence[np.ndarray]) -> "InstanceScoreSet":
        return InstanceScoreSet(blocks, self.system_names, self.task_names, self.directions)

    def instance_rankings(self, tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL) -> list[np.ndarray]:
        """Per task, an ``(N, K_t)`` array whose columns are instance rankings."""
        return [
            rank_columns(block, direction, tie_policy)
            for block, direction in zip(self.scores, self.directions)
        ]


@dataclass(frozen=True)
class AggregationResult:
    """Final strict ranking with the per-system values it was derived from.

    ``per_system_value`` holds rank sums for Borda-based methods (lower is
    better) and mean scores for ``mean``. ``tie_groups`` lists the groups of
    system indices sharing a value; the strict ``ranking`` breaks those ties
    by system index.
    """

    ranking: np.ndarray
    per_system_value: np.ndarray
    method: str
    tie_groups: list[tuple[int, ...]] = field(default_factory=list)
    system_names: tuple[str, ...] | None = None

    @property
    def n_systems(self) -> int:
        return self.ranking.size

    def order(self) -> list[int]:
        """System indices from best to worst."""
        return [int(i) for i in np.argsort(self.ranking, kind="stable")]

    def ordered_names(self) -> list[str]:
        names = self.system_names or tuple(f"S{i + 1}" for i in range(self.n_systems))
        return [names[i] for i in self.order()]

    def to_dict(self) -> dict:
        names = self.system_names or tuple(f"S{i + 1}" for i in range(self.n_systems))
        return {
            "systems": list(names),
            "ranking": [int(x) for x in self.ranking],
            "per_system_value": [float(x) for x in self.per_system_value],
            "tie_groups": [[names[i] for i in group] for group in self.tie_groups],
        }


@dataclass(frozen=True)
class PairwiseResult:
    lambda_a: float
    lambda_b: float
    verdict: str  # "A_better", "B_better" or "Tie"


def _tie_groups(values: np.ndarray) -> list[tuple[int, ...]]:
    groups: dict[float, list[int]] = {}
    for i, v in enumerate(values.tolist()):
        groups.setdefault(v, []).append(i)
    return sorted(tuple(g) for g in groups.values() if len(g) > 1)


def mean_instance_aggregate(data: InstanceScoreSet) -> TaskScoreMatrix:
    """Collapse each task's instances to their arithmetic mean."""
    means = np.column_stack([block.mean(axis=1) for block in data.scores])
    return TaskScoreMatrix(means, data.system_names, data.task_names, data.directions)


def mean_task_aggregate(m: TaskScoreMatrix) -> AggregationResult:
    """Rank systems by their mean score across tasks.

    Averaging is only meaningful when every task shares one direction;
    mixed directions raise ``ValueError``.
    """
    directions = set(m.directions)
    if len(directions) > 1:
        raise ValueError("mean aggregation undefined across mixed-direction metrics")
    (direction,) = directions
    means = m.scores.mean(axis=1)
    ranking = rank_from_scores(means, direction, TiePolicy.STABLE)
    return AggregationResult(ranking, means, "mean", _tie_groups(means), m.system_names)


def borda(rankings: Sequence, method: str = "borda", system_names=None) -> AggregationResult:
    """Borda count: sum each system's ranks and rank the sums (ascending).

    ``rankings`` is a sequence of ``L`` rank vectors or an ``(N, L)`` array
    whose columns are rank vectors. Fractional ranks are allowed.
    """
    arr = _stack_rankings(rankings)
    sums = arr.sum(axis=1)
    return AggregationResult(argsort_argsort(sums), sums, method, _tie_groups(sums), system_names)


def _stack_rankings(rankings) -> np.ndarray:
    if isinstance(rankings, np.ndarray) and rankings.ndim == 2:
        arr = rankings.astype(float)
    else:
        rankings = list(rankings)
        if not rankings:
            raise ValueError("at least one ranking is required")
        sizes = {np.asarray(r).size for r in rankings}
        if len(sizes) != 1:
            raise ValueError(f"rankings cover different numbers of systems: {sorted(sizes)}")
        arr = np.column_stack([np.asarray(r, dtype=float) for r in rankings])
    if arr.shape[1] == 0 or arr.shape[0] == 0:
        raise ValueError("at least one ranking is required")
    return arr


def sigma_star(m: TaskScoreMatrix, tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL) -> AggregationResult:
    """Borda aggregation of the per-task rankings."""
    ranks = np.column_stack(m.task_rankings(tie_policy))
    return borda(ranks, "sigma_star", m.system_names)


def sigma_one_level(data: InstanceScoreSet, tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL) -> AggregationResult:
    """Single Borda count over every instance ranking of every task."""
    ranks = np.concatenate(data.instance_rankings(tie_policy), axis=1)
    return borda(ranks, "one_level", data.system_names)


def sigma_two_level(data: InstanceScoreSet, tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL) -> AggregationResult:
    """Borda over instances within each task, then Borda over the tasks.

    The per-task ranking ranks that task's rank sums under ``tie_policy``,
    so tied rank sums inside a task stay tied (fractional) by default.
    """
    tie_policy = TiePolicy.parse(tie_policy)
    per_task = [
        rank_from_scores(block.sum(axis=1), Direction.LOWER, tie_policy)
        for block in data.instance_rankings(tie_policy)
    ]
    return borda(per_task, "two_level", data.system_names)


def pairwise_compare(
    scores_a: Sequence[float],
    scores_b: Sequence[float],
    direction: Direction | str = Direction.HIGHER,
    split_ties: bool = False,
) -> PairwiseResult:
    """Count the instances each of two systems wins.

    By default an exact tie is credited to system A (``s_a >= s_b`` counts
    for A). With ``split_ties=True`` each tie gives 0.5 to both.
    """
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    if a.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"score sequences must have equal length, got {a.shape} and {b.shape}")
    if a.size == 0:
        raise ValueError("at least one paired score is required")
    if Direction.parse(direction) is Direction.LOWER:
        a, b = -a, -b
    k = a.size
    if split_ties:
        lam_a = float(np.count_nonzero(a > b) + 0.5 * np.count_nonzero(a == b))
    else:
        lam_a = int(np.count_nonzero(a >= b))
    lam_b = k - lam_a
    if lam_a > lam_b:
        verdict = "A_better"
    elif lam_b > lam_a:
        verdict = "B_better"
    else:
        verdict = "Tie"
    return PairwiseResult(lam_a, lam_b, verdict)


def aggregate(
    data: TaskScoreMatrix | InstanceScoreSet,
    method: str,
    tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL,
) -> AggregationResult:
    """Dispatch to one aggregation procedure by name.

    On instance-level data ``mean`` and ``sigma_star`` first average each
    task's instances; ``one_level`` and ``two_level`` need instance-level
    data.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if isinstance(data, InstanceScoreSet):
        if method == "one_level":
            return sigma_one_level(data, tie_policy)
        if method == "two_level":
            return sigma_two_level(data, tie_policy)
        data = mean_instance_aggregate(data)
    elif method in ("one_level", "two_level"):
        raise ValueError(f"method {method!r} needs instance-level scores")
    if method == "mean":
        return mean_task_aggregate(data)
    return sigma_star(data, tie_policy)


def validate_rankings(rankings: Sequence, strict: bool = False) -> list[np.ndarray]:
    out = [check_ranking(r, strict=strict) for r in rankings]
    if not out:
        raise ValueError("at least one ranking is required")
    sizes = {r.size for r in out}
    if len(sizes) != 1:
        raise ValueError(f"rankings cover different numbers of systems: {sorted(sizes)}")
    return out
