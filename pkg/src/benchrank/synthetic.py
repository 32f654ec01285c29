"""Synthetic benchmark scores from shifted Gumbel noise.

System ``n`` (1-based) scores ``phi * n + beta * G`` on every instance of
every task, with ``G`` standard Gumbel. Sorting Gumbel-perturbed utilities is
the Gumbel-max construction of the Plackett-Luce model with weights
``exp(phi * n / beta)``, so each instance ranking is a Plackett-Luce draw
around the ground truth "system N best, system 1 worst".

Randomness is keyed: the draws of system ``n`` on task ``t`` come from a
generator seeded by ``(seed, stream, n, t)``. Outputs do not depend on
evaluation order, and adding a system or a task leaves the other cells'
draws untouched.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Iterable

import numpy as np

from .aggregation import InstanceScoreSet
from .ranking import Direction

__all__ = [
    "SyntheticConfig",
    "CorruptionKind",
    "CorruptionSpec",
    "sample_gumbel",
    "keyed_rng",
    "generate_scores",
    "ground_truth_ranking",
    "corrupt_reverse",
    "corrupt_scale",
    "choose_tasks",
]

_STREAM_CLEAN = 0
_STREAM_REVERSE = 1
_STREAM_SELECT = 2
_TWO53 = float(2**53)


@dataclass(frozen=True)
class SyntheticConfig:
    n_systems: int = 20
    n_tasks: int = 20
    n_instances: int = 20
    phi: float = 1.0
    beta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("n_systems", "n_tasks", "n_instances"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 <= self.phi <= 1.0:
            raise ValueError(f"phi must lie in [0, 1], got {self.phi}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def replace(self, **changes) -> "SyntheticConfig":
        return SyntheticConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticConfig":
        return cls(
            n_systems=int(d["n_systems"]),
            n_tasks=int(d["n_tasks"]),
            n_instances=int(d["n_instances"]),
            phi=float(d["phi"]),
            beta=float(d.get("beta", 1.0)),
            seed=int(d.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "SyntheticConfig":
        return cls.from_dict(json.loads(text))


class CorruptionKind(str, Enum):
    REVERSE = "reverse"
    SCALE = "scale"


@dataclass(frozen=True)
class CorruptionSpec:
    """Which tasks to corrupt and how.

    ``scale_factor`` is the multiplier for ``SCALE`` and ignored otherwise.
    """

    kind: CorruptionKind
    task_indices: frozenset = field(default_factory=frozenset)
    scale_factor: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", CorruptionKind(self.kind))
        object.__setattr__(self, "task_indices", frozenset(int(t) for t in self.task_indices))
        if self.kind is CorruptionKind.SCALE:
            if self.scale_factor is None or not self.scale_factor > 0:
                raise ValueError(f"scale corruption needs a positive scale_factor, got {self.scale_factor}")

    def check(self, n_tasks: int) -> list[int]:
        bad = sorted(t for t in self.task_indices if not 0 <= t < n_tasks)
        if bad:
            raise ValueError(f"task indices {bad} out of range for {n_tasks} tasks")
        return sorted(self.task_indices)


def keyed_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the substream ``(seed, *key)``."""
    return np.random.default_rng([int(seed), *map(int, key)])


def _uniform_open(rng: np.random.Generator, size) -> np.ndarray:
    # 53-bit grid shifted by half a step: strictly inside (0, 1)
    return (rng.integers(0, 2**53, size=size, dtype=np.int64) + 0.5) / _TWO53


def sample_gumbel(location=0.0, scale: float = 1.0, rng: np.random.Generator | None = None, size=None):
    """Gumbel draws ``location - scale * log(-log U)`` with ``U`` uniform on (0, 1)."""
    if not scale > 0:
        raise ValueError(f"Gumbel scale must be positive, got {scale}")
    if rng is None:
        rng = np.random.default_rng()
    u = _uniform_open(rng, size)
    g = location - scale * np.log(-np.log(u))
    return float(g) if size is None and np.ndim(g) == 0 else g


def generate_scores(cfg: SyntheticConfig) -> InstanceScoreSet:
    """Clean synthetic scores; all tasks are higher-is-better."""
    blocks = []
    for t in range(cfg.n_tasks):
        block = np.empty((cfg.n_systems, cfg.n_instances))
        for n in range(1, cfg.n_systems + 1):
            rng = keyed_rng(cfg.seed, _STREAM_CLEAN, n, t)
            block[n - 1] = sample_gumbel(cfg.phi * n, cfg.beta, rng, cfg.n_instances)
        blocks.append(block)
    return InstanceScoreSet(blocks, directions=Direction.HIGHER)


def ground_truth_ranking(n_systems: int) -> np.ndarray:
    """System ``N`` ranked first, system 1 last."""
    return np.arange(n_systems, 0, -1, dtype=np.int64)


def corrupt_reverse(
    data: InstanceScoreSet,
    spec: CorruptionSpec,
    seed: int,
    beta: float = 1.0,
    location_scale: float = 1.0,
) -> InstanceScoreSet:
    """Resample the selected tasks so that system ``n`` is centred at ``-location_scale * n``.

    The default ``location_scale=1`` centres corrupted draws at ``-n``
    whatever the clean dispersion; pass ``phi`` to centre them at ``-phi * n``.
    """
    if spec.kind is not CorruptionKind.REVERSE:
        raise ValueError("corrupt_reverse needs a REVERSE corruption spec")
    tasks = spec.check(data.n_tasks)
    blocks = list(data.scores)
    for t in tasks:
        n_sys, k = blocks[t].shape
        block = np.empty((n_sys, k))
        for n in range(1, n_sys + 1):
            rng = keyed_rng(seed, _STREAM_REVERSE, n, t)
            block[n - 1] = sample_gumbel(-location_scale * n, beta, rng, k)
        blocks[t] = block
    if not tasks:
        return data
    return data.replace_scores(blocks)


def corrupt_scale(data: InstanceScoreSet, spec: CorruptionSpec) -> InstanceScoreSet:
    """Multiply the selected tasks' scores by ``spec.scale_factor``."""
    if spec.kind is not CorruptionKind.SCALE:
        raise ValueError("corrupt_scale needs a SCALE corruption spec")
    tasks = spec.check(data.n_tasks)
    if not tasks:
        return data
    blocks = list(data.scores)
    for t in tasks:
        blocks[t] = blocks[t] * spec.scale_factor
    return data.replace_scores(blocks)


def choose_tasks(n_tasks: int, count: int, seed: int, *key: int) -> list[int]:
    """Seeded uniform choice of ``count`` distinct task indices.

    For a fixed key the choices are nested: the first ``c`` tasks chosen for
    ``count=c`` are also chosen for every larger count.
    """
    if not 0 <= count <= n_tasks:
        raise ValueError(f"cannot choose {count} of {n_tasks} tasks")
    order = keyed_rng(seed, _STREAM_SELECT, *key).permutation(n_tasks)
    return sorted(int(t) for t in order[:count])


def task_order(n_tasks: int, seed: int, *key: int) -> list[int]:
    return [int(t) for t in keyed_rng(seed, _STREAM_SELECT, *key).permutation(n_tasks)]


def splice_tasks(clean: InstanceScoreSet, corrupted: InstanceScoreSet, tasks: Iterable[int]) -> InstanceScoreSet:
    """Take the listed tasks from ``corrupted`` and the rest from ``clean``."""
    chosen = set(tasks)
    blocks = [corrupted.scores[t] if t in chosen else clean.scores[t] for t in range(clean.n_tasks)]
    return clean.replace_scores(blocks)
