"""CSV/JSON reading and writing.

File formats
------------
Task-level CSV
    header ``system,<task1>,...,<taskT>``, one row per system.
Instance-level CSV
    header ``system,task,instance,score``, one row per score.
Direction sidecar JSON
    ``{"<task>": "higher" | "lower", ...}``.
Experiment CSV
    header ``experiment,param_name,param_value,method,mean,std,n_reps``.
    Grid points over several parameters join names and values with ``;``.

Floats are written with ``repr`` so they read back bit-identically.
"""

from __future__ import annotations

import csv
import json
import os
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import __version__
from .aggregation import AggregationResult, InstanceScoreSet, TaskScoreMatrix
from .dispersion import DispersionReport
from .experiments import Cell, ExperimentReport
from .ranking import Direction, TiePolicy

__all__ = [
    "DataError",
    "DatasetManifest",
    "load_task_level",
    "load_instance_level",
    "load_directions",
    "load_dataset",
    "write_task_level",
    "write_instance_level",
    "write_report",
    "read_experiment_csv",
    "EXPERIMENT_CSV_HEADER",
]

EXPERIMENT_CSV_HEADER = ["experiment", "param_name", "param_value", "method", "mean", "std", "n_reps"]
FORMATS = ("csv", "json", "svg")


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class DatasetManifest:
    format: str  # "task_level" or "instance_level"
    path: str
    directions: Mapping[str, Direction] | Direction | None = None
    tie_policy: TiePolicy = TiePolicy.FRACTIONAL
    name: str = ""

    def load(self) -> TaskScoreMatrix | InstanceScoreSet:
        return load_dataset(self.path, self.format, self.directions)


def _fmt(x: float) -> str:
    return repr(float(x))


def _resolve_directions(tasks, directions, path) -> list[Direction]:
    if directions is None:
        return [Direction.HIGHER] * len(tasks)
    if isinstance(directions, (str, Direction)):
        return [Direction.parse(directions)] * len(tasks)
    unknown = sorted(set(directions) - set(tasks))
    if unknown:
        raise DataError(f"{path}: directions given for unknown tasks {unknown}")
    return [Direction.parse(directions.get(t, Direction.HIGHER)) for t in tasks]


def _parse_float(cell: str, where: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"non-numeric score {cell!r} at {where}") from None
    if not np.isfinite(value):
        raise DataError(f"non-finite score {cell!r} at {where}")
    return value


def load_task_level(path, directions=None) -> TaskScoreMatrix:
    """Read a ``system,<task1>,...`` score table."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise DataError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if header[0] != "system" or len(header) < 2:
        raise DataError(f"{path}: header must be 'system,<task1>,...', got {rows[0]}")
    tasks = header[1:]
    if len(set(tasks)) != len(tasks):
        raise DataError(f"{path}: duplicate task columns")
    systems, scores = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(f"{path}, row {lineno}: expected {len(header)} cells, got {len(row)}")
        name = row[0].strip()
        if name in systems:
            raise DataError(f"{path}, row {lineno}: duplicate system {name!r}")
        systems.append(name)
        scores.append(
            [
                _parse_float(c.strip(), f"{path}, row {lineno}, system {name!r}, task {t!r}")
                for c, t in zip(row[1:], tasks)
            ]
        )
    if not systems:
        raise DataError(f"{path}: no system rows")
    dirs = _resolve_directions(tasks, directions, path)
    return TaskScoreMatrix(np.array(scores), systems, tasks, dirs)


def load_instance_level(path, directions=None) -> InstanceScoreSet:
    """Read a long ``system,task,instance,score`` table.

    Every system must be scored exactly once on every instance of every
    task. Instances are ordered by their identifier (string order).
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["system", "task", "instance", "score"]:
            raise DataError(f"{path}: header must be 'system,task,instance,score', got {header}")
        systems: list[str] = []
        tasks: list[str] = []
        cells: dict[tuple[str, str, str], float] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise DataError(f"{path}, row {lineno}: expected 4 cells, got {len(row)}")
            system, task, instance, raw = (c.strip() for c in row)
            key = (system, task, instance)
            if key in cells:
                raise DataError(f"{path}, row {lineno}: duplicate score for system {system!r}, task {task!r}, instance {instance!r}")
            cells[key] = _parse_float(raw, f"{path}, row {lineno}, column 'score'")
            if system not in systems:
                systems.append(system)
            if task not in tasks:
                tasks.append(task)
    if not cells:
        raise DataError(f"{path}: no score rows")
    instances: dict[str, set] = defaultdict(set)
    for _, task, instance in cells:
        instances[task].add(instance)
    blocks = []
    for task in tasks:
        ids = sorted(instances[task])
        block = np.empty((len(systems), len(ids)))
        missing = []
        for i, system in enumerate(systems):
            for k, instance in enumerate(ids):
                value = cells.get((system, task, instance))
                if value is None:
                    missing.append((system, instance))
                else:
                    block[i, k] = value
        if missing:
            shown = ", ".join(f"system {s!r} on instance {k!r}" for s, k in missing[:5])
            more = f" (+{len(missing) - 5} more)" if len(missing) > 5 else ""
            raise DataError(f"{path}: incomplete coverage for task {task!r}: missing {shown}{more}")
        blocks.append(block)
    dirs = _resolve_directions(tasks, directions, path)
    return InstanceScoreSet(blocks, systems, tasks, dirs)


def load_directions(path) -> dict[str, Direction]:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataError(f"{path}: expected an object mapping task name to 'higher' or 'lower'")
    try:
        return {str(k): Direction.parse(v) for k, v in raw.items()}
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def load_dataset(path, level: str, directions=None) -> TaskScoreMatrix | InstanceScoreSet:
    if level in ("task", "task_level"):
        return load_task_level(path, directions)
    if level in ("instance", "instance_level"):
        return load_instance_level(path, directions)
    raise ValueError(f"unknown dataset level {level!r}")


def write_task_level(data: TaskScoreMatrix, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["system", *data.task_names])
        for name, row in zip(data.system_names, data.scores):
            w.writerow([name, *map(_fmt, row)])
    return path


def write_instance_level(data: InstanceScoreSet, path) -> Path:
    """Write long-format scores; instance ids are zero-padded so string order is numeric order."""
    path = Path(path)
    width = len(str(max(data.n_instances) - 1))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["system", "task", "instance", "score"])
        for task, block in zip(data.task_names, data.scores):
            for i, system in enumerate(data.system_names):
                for k, value in enumerate(block[i]):
                    w.writerow([system, task, f"i{k:0{width}d}", _fmt(value)])
    return path


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (Direction, TiePolicy)):
        return obj.value
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _dump_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")


def _report_payload(report, seed, config) -> tuple[str, dict]:
    if isinstance(report, ExperimentReport):
        return report.experiment, report.to_dict()
    if isinstance(report, AggregationResult):
        payload = {
            "method": report.method,
            "seed": seed,
            "version": __version__,
            "config": config or {},
            "results": report.to_dict(),
        }
        return report.method, payload
    if isinstance(report, DispersionReport):
        d = report.to_dict()
        payload = {
            "experiment": "dispersion",
            "seed": d.pop("seed"),
            "version": __version__,
            "config": d.pop("config"),
            "results": d,
        }
        return "dispersion", payload
    raise TypeError(f"cannot write a report of type {type(report).__name__}")


def _experiment_rows(report: ExperimentReport) -> list[list[str]]:
    rows = []
    for c in report.cells:
        names = ";".join(c.params)
        values = ";".join(_fmt(v) if isinstance(v, float) else str(v) for v in c.params.values())
        rows.append([report.experiment, names, values, c.method, _fmt(c.mean), _fmt(c.std), str(c.n)])
    return rows


def _write_csv(report, stem: str, out_dir: Path) -> Path:
    path = out_dir / f"{stem}.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if isinstance(report, ExperimentReport):
            w.writerow(EXPERIMENT_CSV_HEADER)
            w.writerows(_experiment_rows(report))
        elif isinstance(report, AggregationResult):
            names = report.system_names or [f"S{i + 1}" for i in range(report.n_systems)]
            w.writerow(["system", "rank", "value"])
            for i in report.order():
                w.writerow([names[i], int(report.ranking[i]), _fmt(report.per_system_value[i])])
        else:
            w.writerow(["measure", "value"])
            for label, value in report.performance.items():
                w.writerow([f"performance:{label}", value])
            w.writerow(["pairwise_mean", _fmt(report.pairwise_mean)])
            w.writerow(["random_baseline_mean", _fmt(report.random_baseline_mean)])
            w.writerow(["random_baseline_std", _fmt(report.random_baseline_std)])
            w.writerow(["n_random", report.n_random])
            if report.sandwich is not None:
                w.writerow(["sandwich_lower", _fmt(report.sandwich.lower)])
                w.writerow(["sandwich_value", _fmt(report.sandwich.value)])
                w.writerow(["sandwich_upper", _fmt(report.sandwich.upper)])
                w.writerow(["sandwich_ok", report.sandwich.ok])
    return path


def write_report(
    report: ExperimentReport | AggregationResult | DispersionReport,
    out_dir,
    formats: Iterable[str] = ("csv", "json"),
    seed: int | None = None,
    config: dict | None = None,
    stem: str | None = None,
) -> list[Path]:
    """Write ``report`` to ``out_dir`` in each requested format.

    ``seed`` and ``config`` are recorded in the JSON of an
    :class:`AggregationResult`; the other report types carry their own.
    SVG is only produced for experiment reports and needs matplotlib.
    """
    formats = list(dict.fromkeys(formats))
    bad = [f for f in formats if f not in FORMATS]
    if bad:
        raise ValueError(f"unknown formats {bad}; choose from {list(FORMATS)}")
    if not formats:
        return []
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc}") from exc
    if not os.access(out_dir, os.W_OK):
        raise PermissionError(f"output directory {out_dir} is not writable")
    name, payload = _report_payload(report, seed, config)
    stem = stem or name
    paths = []
    for fmt in formats:
        if fmt == "json":
            path = out_dir / f"{stem}.json"
            _dump_json(payload, path)
            paths.append(path)
        elif fmt == "csv":
            paths.append(_write_csv(report, stem, out_dir))
        elif fmt == "svg" and isinstance(report, ExperimentReport):
            from .plotting import plot_experiment

            paths.append(plot_experiment(report, out_dir / f"{stem}.svg"))
    return paths


def read_experiment_csv(path) -> list[Cell]:
    """Parse an experiment CSV back into cells (no per-replication values)."""
    cells = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != EXPERIMENT_CSV_HEADER:
            raise DataError(f"{path}: unexpected header {header}")
        for row in reader:
            _, names, values, method, mean, std, n = row
            params = {}
            for k, v in zip(names.split(";"), values.split(";")):
                params[k] = float(v) if any(ch in v for ch in ".eEn") else int(v)
            cells.append(Cell(params, method, float(mean), float(std), int(n)))
    return cells
