"""
How spread out are the task rankings?
=====================================

Dispersion is the ranking analogue of variance: the summed Kendall distance
from a consensus to each task ranking.
"""

from benchrank import SyntheticConfig, generate_scores
from benchrank.aggregation import mean_instance_aggregate
from benchrank.experiments import run_dispersion_analysis

for phi in (0.0, 0.2, 1.0):
    cfg = SyntheticConfig(n_systems=9, n_tasks=8, n_instances=10, phi=phi, seed=3)
    m = mean_instance_aggregate(generate_scores(cfg))
    rep = run_dispersion_analysis(m, n_random=200, seed=3)
    s = rep.sandwich
    print(f"phi={phi}")
    for k, v in rep.performance.items():
        print(f"  {k:10s} {v}")
    print(f"  random     {rep.random_baseline_mean:.1f} +/- {rep.random_baseline_std:.1f}")
    print(f"  optimum per task {s.value:.2f} lies in [{s.lower:.2f}, {s.upper:.2f}]")

###############################################################################
# With phi=0 the tasks share no signal, and any consensus sits well above the
# others' mutual agreement (compare the interval). As phi grows the consensus
# drops far below the random baseline and the interval tightens. The
# rank-sum ranking stays within a few swaps of the exact optimum.
