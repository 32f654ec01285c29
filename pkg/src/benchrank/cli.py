"""Command-line interface: ``benchrank <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import logging
import sys
from pathlib import Path

from .aggregation import METHODS, InstanceScoreSet, aggregate
from .experiments import (
    DEFAULT_PHIS,
    SYNTHETIC_METHODS,
    corruption_thresholds,
    run_agreement_analysis,
    run_dispersion_analysis,
    run_manipulation_robustness,
    run_scaling_robustness,
    run_subset_robustness,
)
from .io import (
    EXPERIMENT_CSV_HEADER,
    DataError,
    _experiment_rows,
    load_dataset,
    load_directions,
    write_instance_level,
    write_report,
)
from .ranking import Direction, TiePolicy
from .synthetic import SyntheticConfig, generate_scores

log = logging.getLogger("benchrank")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _csv_list(kind=str):
    def parse(text: str):
        try:
            return [kind(x.strip()) for x in text.split(",") if x.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid list {text!r}") from None

    return parse


def _formats(text: str) -> list[str]:
    formats = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in formats if f not in ("csv", "json", "svg")]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown formats {bad}")
    return formats


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", type=Path, help="output directory; results go to stdout when omitted")
    p.add_argument("--format", type=_formats, default=["csv", "json"], help="comma list of csv,json,svg")


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", type=Path, required=True, help="score CSV")
    p.add_argument("--level", choices=["task", "instance"], default="task")
    p.add_argument("--direction", choices=["higher", "lower"], help="direction for every task")
    p.add_argument("--directions-json", type=Path, help="JSON map task -> higher|lower")
    p.add_argument("--tie-policy", choices=[t.value for t in TiePolicy], default="fractional")


def _synthetic_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=20, help="number of systems")
    p.add_argument("--t", type=int, default=20, help="number of tasks")
    p.add_argument("--k", type=int, default=20, help="instances per task")
    p.add_argument("--beta", type=float, default=1.0, help="Gumbel scale")
    p.add_argument("--reps", type=int, default=50, help="replications")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("--methods", type=_csv_list(), default=list(SYNTHETIC_METHODS))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="benchrank", description="Rank systems across benchmark tasks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("rank", help="aggregate a dataset with one or more methods")
    _dataset_args(p)
    p.add_argument("--method", type=_csv_list(), default=["sigma_star", "mean"])
    _common(p)

    p = sub.add_parser("compare", help="top-K / last-K agreement between two methods")
    _dataset_args(p)
    p.add_argument("--method", type=_csv_list(), default=["sigma_star", "mean"], help="exactly two methods")
    p.add_argument("--ks", type=_csv_list(int), help="K values (default 1,3,5,10 capped at N)")
    _common(p)

    p = sub.add_parser("simulate", help="write a synthetic instance-level dataset")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--t", type=int, default=20)
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--phi", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    _common(p)

    p = sub.add_parser("robustness", help="manipulation (task reversal) experiment")
    _synthetic_args(p)
    p.add_argument("--phis", type=_csv_list(float), default=list(DEFAULT_PHIS))
    p.add_argument("--counts", type=_csv_list(int), help="corrupted-task counts (default 0..T)")
    p.add_argument("--level", type=float, default=0.75, help="error level for the threshold summary")
    _common(p)

    p = sub.add_parser("scaling", help="one-task rescaling experiment")
    _synthetic_args(p)
    p.add_argument("--phi", type=float, default=0.1)
    p.add_argument("--factors", type=_csv_list(float), default=[0.1, 1.0, 2.0, 7.0, 100.0])
    p.add_argument("--reverse-scaled", action="store_true", help="reverse-corrupt the scaled task first")
    _common(p)

    p = sub.add_parser("subset", help="task addition/removal experiment")
    _dataset_args(p)
    p.add_argument("--method", type=_csv_list(), default=["sigma_star", "mean"])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--sizes", type=_csv_list(int), help="subset sizes (default 1..T)")
    p.add_argument("--jobs", type=int, default=1)
    _common(p)

    p = sub.add_parser("dispersion", help="dispersion analysis of a task-level dataset")
    _dataset_args(p)
    p.add_argument("--n-random", type=int, default=100)
    _common(p)
    return parser


def _load(args):
    directions = None
    if args.directions_json is not None:
        directions = load_directions(args.directions_json)
    elif args.direction is not None:
        directions = Direction.parse(args.direction)
    return load_dataset(args.input, args.level, directions)


def _check_methods(methods, data=None):
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise UsageError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
    if data is not None and not isinstance(data, InstanceScoreSet):
        needs_instances = [m for m in methods if m in ("one_level", "two_level")]
        if needs_instances:
            raise UsageError(f"methods {needs_instances} need --level instance")


def _emit_report(report, args, stem=None, **kw) -> None:
    if args.out is None:
        return
    for path in write_report(report, args.out, args.format, stem=stem, **kw):
        print(f"wrote {path}")


def _print_experiment(report) -> None:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EXPERIMENT_CSV_HEADER)
    w.writerows(_experiment_rows(report))
    sys.stdout.write(buf.getvalue())


def _cmd_rank(args) -> None:
    data = _load(args)
    _check_methods(args.method, data)
    results = [aggregate(data, m, args.tie_policy) for m in args.method]
    width = max(12, *(len(n) + 14 for n in data.system_names))
    print("rank  " + "".join(f"{r.method:<{width}}" for r in results))
    for pos in range(data.n_systems):
        cells = []
        for r in results:
            i = r.order()[pos]
            cells.append(f"{data.system_names[i]} ({r.per_system_value[i]:.6g})")
        print(f"{pos + 1:<6}" + "".join(f"{c:<{width}}" for c in cells))
    print()
    for r in results:
        line = f"{r.method}: {' > '.join(r.ordered_names())}"
        if r.tie_groups:
            groups = "; ".join("=".join(data.system_names[i] for i in g) for g in r.tie_groups)
            line += f"  [tied values: {groups}]"
        print(line)
    config = {"input": str(args.input), "level": args.level, "tie_policy": args.tie_policy}
    for r in results:
        _emit_report(r, args, seed=args.seed, config=config)


def _cmd_compare(args) -> None:
    data = _load(args)
    if len(args.method) != 2:
        raise UsageError("compare needs exactly two methods, e.g. --method sigma_star,mean")
    _check_methods(args.method, data)
    a, b = (aggregate(data, m, args.tie_policy) for m in args.method)
    n = data.n_systems
    ks = args.ks or sorted({k for k in (1, 3, 5, 10) if k <= n} | {n})
    summary = run_agreement_analysis(a, b, ks)
    print(f"{a.method} vs {b.method}: Kendall tau = {summary.full_tau:.4f}")
    print("K     top-K  last-K")
    for k in ks:
        flag = " *" if k in summary.tie_straddled_ks else ""
        print(f"{k:<6}{summary.top_k_agreement[k]:<7.3f}{summary.last_k_agreement[k]:.3f}{flag}")
    if summary.tie_straddled_ks:
        print("* a tie group straddles the K boundary")
    if args.out is not None:
        import json

        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / "agreement.json"
        payload = {
            "experiment": "agreement",
            "seed": args.seed,
            "config": {"input": str(args.input), "methods": args.method, "level": args.level},
            "results": summary.to_dict(),
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")


def _cmd_simulate(args) -> None:
    cfg = SyntheticConfig(args.n, args.t, args.k, args.phi, args.beta, args.seed)
    data = generate_scores(cfg)
    if args.out is None:
        tmp = _io.StringIO()
        w = csv.writer(tmp, lineterminator="\n")
        w.writerow(["system", "task", "instance", "score"])
        width = len(str(cfg.n_instances - 1))
        for task, block in zip(data.task_names, data.scores):
            for i, system in enumerate(data.system_names):
                for k, value in enumerate(block[i]):
                    w.writerow([system, task, f"i{k:0{width}d}", repr(float(value))])
        sys.stdout.write(tmp.getvalue())
        return
    args.out.mkdir(parents=True, exist_ok=True)
    path = write_instance_level(data, args.out / "synthetic.csv")
    cfg_path = args.out / "synthetic_config.json"
    cfg_path.write_text(cfg.to_json() + "\n")
    print(f"wrote {path}")
    print(f"wrote {cfg_path}")


def _cmd_robustness(args) -> None:
    _check_methods(args.methods)
    cfg = SyntheticConfig(args.n, args.t, args.k, 1.0, args.beta, args.seed)
    report = run_manipulation_robustness(
        cfg, args.phis, args.counts, args.methods, args.reps, args.seed, args.jobs
    )
    thresholds = corruption_thresholds(report, args.level)
    print(f"smallest corrupted-task count with mean error > {args.level}:")
    for phi in report.axes["phi"]:
        parts = [f"{m}={thresholds[(phi, m)]}" for m in report.method_labels]
        print(f"  phi={phi}: " + ", ".join(parts))
    if args.out is None:
        _print_experiment(report)
    _emit_report(report, args)


def _cmd_scaling(args) -> None:
    _check_methods(args.methods)
    cfg = SyntheticConfig(args.n, args.t, args.k, args.phi, args.beta, args.seed)
    report = run_scaling_robustness(
        cfg, args.factors, args.methods, args.reps, args.seed, args.jobs, reverse_scaled=args.reverse_scaled
    )
    if args.out is None:
        _print_experiment(report)
    _emit_report(report, args)


def _cmd_subset(args) -> None:
    data = _load(args)
    _check_methods(args.method, data)
    report = run_subset_robustness(
        data, args.method, args.sizes, args.samples, args.seed, args.tie_policy, args.jobs
    )
    if args.out is None:
        _print_experiment(report)
    _emit_report(report, args)


def _cmd_dispersion(args) -> None:
    data = _load(args)
    if isinstance(data, InstanceScoreSet):
        from .aggregation import mean_instance_aggregate

        data = mean_instance_aggregate(data)
    report = run_dispersion_analysis(data, args.tie_policy, args.n_random, args.seed)
    for label, value in report.performance.items():
        print(f"dispersion({label}) = {value}")
    print(f"random baseline = {report.random_baseline_mean:.2f} +/- {report.random_baseline_std:.2f} (n={report.n_random})")
    print(f"pairwise dispersion = {report.pairwise_mean:.4f}")
    if report.sandwich is not None:
        s = report.sandwich
        print(f"sandwich: {s.lower:.4f} <= {s.value:.4f} <= {s.upper:.4f}: {'ok' if s.ok else 'VIOLATED'}")
    _emit_report(report, args)


_COMMANDS = {
    "rank": _cmd_rank,
    "compare": _cmd_compare,
    "simulate": _cmd_simulate,
    "robustness": _cmd_robustness,
    "scaling": _cmd_scaling,
    "subset": _cmd_subset,
    "dispersion": _cmd_dispersion,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"benchrank {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError, FileNotFoundError, OSError) as exc:
        print(f"benchrank {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(cli_main())
