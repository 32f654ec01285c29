"""Seeded experiment pipelines.

Every replication draws its randomness from substreams keyed by
``(seed, replication)``, and per-replication results are reduced in
replication order. Reports are therefore identical whatever ``n_jobs`` is.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .aggregation import (
    METHODS,
    RANK_BASED,
    AggregationResult,
    InstanceScoreSet,
    TaskScoreMatrix,
    aggregate,
    mean_task_aggregate,
    sigma_star,
)
from .dispersion import (
    DispersionReport,
    performance_dispersion,
    pairwise_dispersion,
    random_baseline,
    sandwich_check,
)
from .kemeny import kemeny_exact
from .ranking import TiePolicy, kendall_tau, normalized_kendall_distance
from .synthetic import (
    CorruptionKind,
    CorruptionSpec,
    SyntheticConfig,
    choose_tasks,
    corrupt_reverse,
    corrupt_scale,
    generate_scores,
    ground_truth_ranking,
    keyed_rng,
    splice_tasks,
    task_order,
)

__all__ = [
    "Cell",
    "ExperimentReport",
    "AgreementSummary",
    "DEFAULT_PHIS",
    "run_manipulation_robustness",
    "run_scaling_robustness",
    "run_subset_robustness",
    "run_agreement_analysis",
    "run_dispersion_analysis",
    "corruption_thresholds",
]

DEFAULT_PHIS = (0.1, 0.5, 1.0)
DEFAULT_REPS = 50
SYNTHETIC_METHODS = ("mean", "one_level", "two_level")

_KEY_MANIPULATION = 11
_KEY_SCALING = 12
_KEY_SUBSET = 13
_KEY_DISPERSION = 14


@dataclass
class Cell:
    """Summary of one measured quantity at one grid point for one method."""

    params: dict
    method: str
    mean: float
    std: float
    n: int
    values: np.ndarray | None = field(default=None, repr=False, compare=False)


@dataclass
class ExperimentReport:
    experiment: str
    axes: dict[str, list]
    cells: list[Cell]
    n_replications: int
    seed: int
    method_labels: list[str]
    config: dict = field(default_factory=dict)

    def cell(self, method: str, **params) -> Cell:
        for c in self.cells:
            if c.method == method and all(_same(c.params.get(k), v) for k, v in params.items()):
                return c
        raise KeyError(f"no cell for method={method!r}, {params}")

    def curve(self, method: str, axis: str, **fixed) -> tuple[list, list[float]]:
        """Mean values of ``method`` along ``axis`` with the other params fixed."""
        xs, ys = [], []
        for x in self.axes[axis]:
            c = self.cell(method, **{axis: x, **fixed})
            xs.append(x)
            ys.append(c.mean)
        return xs, ys

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "version": __version__,
            "config": self.config,
            "results": {
                "axes": self.axes,
                "n_replications": self.n_replications,
                "method_labels": list(self.method_labels),
                "cells": [
                    {"params": c.params, "method": c.method, "mean": c.mean, "std": c.std, "n": c.n}
                    for c in self.cells
                ],
            },
        }


@dataclass
class AgreementSummary:
    top_k_agreement: dict[int, float]
    last_k_agreement: dict[int, float]
    full_tau: float
    tie_straddled_ks: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _same(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return a is not None and b is not None and float(a) == float(b)
    return a == b


def _summary(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    std = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return float(values.mean()), std


def _rep_seed(seed: int, *key: int) -> int:
    return int(np.random.SeedSequence([int(seed), *key]).generate_state(1, np.uint64)[0])


def _map(fn: Callable, items: Sequence, n_jobs: int) -> list:
    if n_jobs is None or n_jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, items))


def _check_methods(methods: Sequence[str], allowed: Sequence[str]) -> list[str]:
    methods = list(methods)
    if not methods:
        raise ValueError("at least one method is required")
    bad = [m for m in methods if m not in allowed]
    if bad:
        raise ValueError(f"unsupported methods {bad}; choose from {list(allowed)}")
    return methods


def run_manipulation_robustness(
    cfg: SyntheticConfig,
    phis: Sequence[float] = DEFAULT_PHIS,
    corrupted_counts: Sequence[int] | None = None,
    methods: Sequence[str] = SYNTHETIC_METHODS,
    n_reps: int = DEFAULT_REPS,
    seed: int | None = None,
    n_jobs: int = 1,
    tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL,
    location_scale: float | None = 1.0,
) -> ExperimentReport:
    """Error to the ground truth as more tasks are reverse-corrupted.

    Each replication draws one clean dataset and one fully corrupted copy
    per dispersion ``phi``; the ``c`` corrupted tasks are the first ``c`` of
    a seeded random task order, so the corrupted sets are nested in ``c``.
    ``location_scale=None`` centres corrupted draws at ``-phi * n`` instead
    of ``-n``.
    """
    methods = _check_methods(methods, METHODS)
    seed = cfg.seed if seed is None else int(seed)
    n_tasks = cfg.n_tasks
    counts = list(range(n_tasks + 1)) if corrupted_counts is None else [int(c) for c in corrupted_counts]
    if not counts or any(not 0 <= c <= n_tasks for c in counts):
        raise ValueError(f"corrupted counts must lie in [0, {n_tasks}]")
    phis = [float(p) for p in phis]
    if not phis or n_reps < 1:
        raise ValueError("need at least one phi value and one replication")
    truth = ground_truth_ranking(cfg.n_systems)

    def replicate(job) -> np.ndarray:
        phi, rep = job
        rep_seed = _rep_seed(seed, _KEY_MANIPULATION, rep)
        clean = generate_scores(cfg.replace(phi=phi, seed=rep_seed))
        scale = phi if location_scale is None else location_scale
        reversed_all = corrupt_reverse(
            clean,
            CorruptionSpec(CorruptionKind.REVERSE, range(n_tasks)),
            rep_seed,
            cfg.beta,
            scale,
        )
        order = task_order(n_tasks, rep_seed)
        out = np.empty((len(counts), len(methods)))
        for ci, c in enumerate(counts):
            data = splice_tasks(clean, reversed_all, order[:c])
            for mi, m in enumerate(methods):
                out[ci, mi] = normalized_kendall_distance(aggregate(data, m, tie_policy).ranking, truth)
        return out

    jobs = [(phi, rep) for phi in phis for rep in range(n_reps)]
    results = _map(replicate, jobs, n_jobs)
    cells = []
    for pi, phi in enumerate(phis):
        stack = np.stack(results[pi * n_reps : (pi + 1) * n_reps])  # (reps, counts, methods)
        for ci, c in enumerate(counts):
            for mi, m in enumerate(methods):
                vals = stack[:, ci, mi]
                mean, std = _summary(vals)
                cells.append(Cell({"phi": phi, "corrupted_tasks": c}, m, mean, std, n_reps, vals))
    config = {**cfg.to_dict(), "tie_policy": TiePolicy.parse(tie_policy).value, "location_scale": location_scale}
    config.pop("phi")
    return ExperimentReport(
        "manipulation",
        {"phi": phis, "corrupted_tasks": counts},
        cells,
        n_reps,
        seed,
        methods,
        config,
    )


def corruption_thresholds(report: ExperimentReport, level: float = 0.75) -> dict[tuple[float, str], int | None]:
    """Smallest corrupted-task count whose mean error exceeds ``level``."""
    out = {}
    for phi in report.axes["phi"]:
        for m in report.method_labels:
            xs, ys = report.curve(m, "corrupted_tasks", phi=phi)
            out[(phi, m)] = next((x for x, y in zip(xs, ys) if y > level), None)
    return out


def run_scaling_robustness(
    cfg: SyntheticConfig,
    scale_factors: Sequence[float],
    methods: Sequence[str] = SYNTHETIC_METHODS,
    n_reps: int = DEFAULT_REPS,
    seed: int | None = None,
    n_jobs: int = 1,
    tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL,
    reverse_scaled: bool = False,
) -> ExperimentReport:
    """Error to the ground truth when one task is multiplied by ``x``.

    The scaled task is drawn at random per replication. With
    ``reverse_scaled=True`` that task is reverse-corrupted before scaling.
    Rank-based methods must return exactly the ranking of the unscaled
    data; any difference raises ``AssertionError``.
    """
    methods = _check_methods(methods, METHODS)
    factors = [float(x) for x in scale_factors]
    if not factors or any(not x > 0 for x in factors):
        raise ValueError("scale factors must be positive")
    if n_reps < 1:
        raise ValueError("need at least one replication")
    seed = cfg.seed if seed is None else int(seed)
    truth = ground_truth_ranking(cfg.n_systems)

    def replicate(rep: int) -> np.ndarray:
        rep_seed = _rep_seed(seed, _KEY_SCALING, rep)
        data = generate_scores(cfg.replace(seed=rep_seed))
        tasks = choose_tasks(cfg.n_tasks, 1, rep_seed)
        if reverse_scaled:
            data = corrupt_reverse(data, CorruptionSpec(CorruptionKind.REVERSE, tasks), rep_seed, cfg.beta)
        reference = {m: aggregate(data, m, tie_policy).ranking for m in methods if m in RANK_BASED}
        out = np.empty((len(factors), len(methods)))
        for xi, x in enumerate(factors):
            scaled = corrupt_scale(data, CorruptionSpec(CorruptionKind.SCALE, tasks, x))
            for mi, m in enumerate(methods):
                ranking = aggregate(scaled, m, tie_policy).ranking
                if m in reference and not np.array_equal(ranking, reference[m]):
                    raise AssertionError(f"{m} ranking changed under scaling by {x}")
                out[xi, mi] = normalized_kendall_distance(ranking, truth)
        return out

    stack = np.stack(_map(replicate, range(n_reps), n_jobs))
    cells = []
    for xi, x in enumerate(factors):
        for mi, m in enumerate(methods):
            vals = stack[:, xi, mi]
            mean, std = _summary(vals)
            cells.append(Cell({"scale_factor": x}, m, mean, std, n_reps, vals))
    config = {**cfg.to_dict(), "tie_policy": TiePolicy.parse(tie_policy).value, "reverse_scaled": reverse_scaled}
    return ExperimentReport("scaling", {"scale_factor": factors}, cells, n_reps, seed, methods, config)


def run_subset_robustness(
    data: TaskScoreMatrix | InstanceScoreSet,
    methods: Sequence[str] = ("sigma_star", "mean"),
    subset_sizes: Sequence[int] | None = None,
    n_samples: int = 100,
    seed: int = 0,
    tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL,
    n_jobs: int = 1,
) -> ExperimentReport:
    """Kendall tau between each method's ranking on random task subsets and on all tasks.

    For every subset size ``t`` and sample, ``t`` tasks are drawn without
    replacement; all methods see the same subsets.
    """
    allowed = METHODS if isinstance(data, InstanceScoreSet) else ("mean", "sigma_star")
    methods = _check_methods(methods, allowed)
    n_tasks = data.n_tasks
    sizes = list(range(1, n_tasks + 1)) if subset_sizes is None else [int(t) for t in subset_sizes]
    if not sizes or any(not 1 <= t <= n_tasks for t in sizes):
        raise ValueError(f"subset sizes must lie in [1, {n_tasks}]")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    full = {m: aggregate(data, m, tie_policy).ranking for m in methods}

    def sample(job) -> np.ndarray:
        t, s = job
        idx = np.sort(keyed_rng(seed, _KEY_SUBSET, t, s).choice(n_tasks, size=t, replace=False))
        sub = data.select_tasks(idx.tolist())
        return np.array([kendall_tau(aggregate(sub, m, tie_policy).ranking, full[m]) for m in methods])

    jobs = [(t, s) for t in sizes for s in range(n_samples)]
    results = _map(sample, jobs, n_jobs)
    cells = []
    for ti, t in enumerate(sizes):
        stack = np.stack(results[ti * n_samples : (ti + 1) * n_samples])
        for mi, m in enumerate(methods):
            vals = stack[:, mi]
            mean, std = _summary(vals)
            cells.append(Cell({"subset_size": t}, m, mean, std, n_samples, vals))
    config = {
        "n_systems": data.n_systems,
        "n_tasks": n_tasks,
        "level": "instance" if isinstance(data, InstanceScoreSet) else "task",
        "tie_policy": TiePolicy.parse(tie_policy).value,
    }
    return ExperimentReport("subset", {"subset_size": sizes}, cells, n_samples, int(seed), methods, config)


def run_agreement_analysis(
    result_a: AggregationResult,
    result_b: AggregationResult,
    ks: Sequence[int],
) -> AgreementSummary:
    """Overlap of the top-K and last-K sets of two rankings, plus Kendall tau."""
    ra = np.asarray(result_a.ranking)
    rb = np.asarray(result_b.ranking)
    n = ra.size
    if rb.size != n:
        raise ValueError(f"results rank {n} and {rb.size} systems")
    top, last, straddled = {}, {}, []
    for k in ks:
        k = int(k)
        if not 1 <= k <= n:
            raise ValueError(f"K={k} out of range [1, {n}]")
        top[k] = len(set(np.flatnonzero(ra <= k)) & set(np.flatnonzero(rb <= k))) / k
        cut = n - k
        last[k] = len(set(np.flatnonzero(ra > cut)) & set(np.flatnonzero(rb > cut))) / k
        if _straddles(result_a, k) or _straddles(result_b, k) or _straddles(result_a, cut) or _straddles(result_b, cut):
            straddled.append(k)
    tau = kendall_tau(ra, rb) if n > 1 else 1.0
    return AgreementSummary(top, last, float(tau), straddled)


def _straddles(result: AggregationResult, k: int) -> bool:
    # a tie group with members on both sides of rank k
    r = np.asarray(result.ranking)
    return any(r[list(g)].min() <= k < r[list(g)].max() for g in result.tie_groups)


def run_dispersion_analysis(
    data: TaskScoreMatrix,
    tie_policy: TiePolicy | str = TiePolicy.FRACTIONAL,
    n_random: int = 100,
    seed: int = 0,
    exact_max_n: int = 15,
) -> DispersionReport:
    """Dispersion of sigma_star, the mean ranking, the exact consensus and random permutations.

    Dispersions are measured against per-task rankings with ties broken by
    system index, since the Kendall distance needs strict rankings.
    """
    rankings = data.task_rankings(TiePolicy.STABLE)
    performance = {
        "sigma_star": performance_dispersion(sigma_star(data, tie_policy).ranking, rankings),
    }
    if len(set(data.directions)) == 1:
        performance["mean"] = performance_dispersion(mean_task_aggregate(data).ranking, rankings)
    sandwich = None
    if data.n_systems <= exact_max_n:
        performance["kemeny"] = kemeny_exact(rankings, n_max=exact_max_n).objective
        if data.n_tasks >= 2:
            sandwich = sandwich_check(rankings, n_max=exact_max_n)
    rb_mean, rb_std = random_baseline(rankings, n_random, keyed_rng(seed, _KEY_DISPERSION))
    pairwise = pairwise_dispersion(rankings) if data.n_tasks >= 2 else 0.0
    return DispersionReport(
        performance=performance,
        pairwise_mean=pairwise,
        random_baseline_mean=rb_mean,
        random_baseline_std=rb_std,
        n_random=n_random,
        sandwich_ok=None if sandwich is None else sandwich.ok,
        sandwich=sandwich,
        seed=int(seed),
        config={
            "n_systems": data.n_systems,
            "n_tasks": data.n_tasks,
            "tie_policy": TiePolicy.parse(tie_policy).value,
        },
    )
