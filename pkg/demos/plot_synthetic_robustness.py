"""
Corrupted tasks and rescaled tasks
==================================

Synthetic scores come from Gumbel noise around a location that grows with
the system index, so system N is best. We corrupt some tasks and watch how
far each aggregation drifts from the truth.
"""

from pathlib import Path

from benchrank import SyntheticConfig
from benchrank.io import write_report
from benchrank.experiments import corruption_thresholds, run_manipulation_robustness, run_scaling_robustness

out = Path(__file__).parent / "output"
cfg = SyntheticConfig(n_systems=20, n_tasks=20, n_instances=20, seed=0)

###############################################################################
# Reverse the ranking on c of the 20 tasks. Which method flips first?

rep = run_manipulation_robustness(cfg, phis=[0.1, 0.3, 1.0], n_reps=20, n_jobs=4)
th = corruption_thresholds(rep, 0.75)
for phi in rep.axes["phi"]:
    print(f"phi={phi}: " + ", ".join(f"{m}={th[(phi, m)]}" for m in rep.method_labels))

###############################################################################
# Multiply one task by x. Rank-based methods do not move at all; the mean
# follows whichever task has the largest spread.

clean = run_scaling_robustness(cfg.replace(phi=0.05), [1, 2, 7, 100], n_reps=20)
flipped = run_scaling_robustness(cfg.replace(phi=0.05), [1, 2, 7, 100], n_reps=20, reverse_scaled=True)
for label, r in [("clean task scaled", clean), ("reversed task scaled", flipped)]:
    print(label)
    for m in r.method_labels:
        xs, ys = r.curve(m, "scale_factor")
        print(f"  {m:10s} " + "  ".join(f"x={x:g}: {y:.2f}" for x, y in zip(xs, ys)))

###############################################################################
# Save curves as CSV/JSON (and SVG if matplotlib is installed).

try:
    import matplotlib  # noqa: F401

    formats = ("csv", "json", "svg")
except ImportError:
    formats = ("csv", "json")
for r, stem in [(rep, "manipulation"), (flipped, "scaling_reversed")]:
    for p in write_report(r, out, formats, stem=stem):
        print("wrote", p)
