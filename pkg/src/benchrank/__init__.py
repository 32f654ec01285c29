"""Rank systems evaluated on many tasks by aggregating per-task rankings.

The main entry points are :func:`sigma_star` (task-level scores),
:func:`sigma_two_level` and :func:`sigma_one_level` (instance-level scores),
with :func:`mean_task_aggregate` as the score-averaging baseline.
"""

__version__ = "0.1.0"

from .ranking import (
    Direction,
    TiePolicy,
    argsort_argsort,
    kendall_distance,
    kendall_tau,
    normalized_kendall_distance,
    rank_from_scores,
)
from .aggregation import (
    AggregationResult,
    InstanceScoreSet,
    TaskScoreMatrix,
    aggregate,
    borda,
    mean_instance_aggregate,
    mean_task_aggregate,
    pairwise_compare,
    sigma_one_level,
    sigma_star,
    sigma_two_level,
)
from .kemeny import KemenySolution, borda_approx_ratio, kemeny_branch_bound, kemeny_brute_force, kemeny_objective
from .synthetic import CorruptionKind, CorruptionSpec, SyntheticConfig, corrupt_reverse, corrupt_scale, generate_scores
from .dispersion import (
    DispersionReport,
    pairwise_dispersion,
    pairwise_dispersion_subsampled,
    performance_dispersion,
    random_baseline,
    sandwich_check,
)
from .experiments import (
    AgreementSummary,
    ExperimentReport,
    run_agreement_analysis,
    run_dispersion_analysis,
    run_manipulation_robustness,
    run_scaling_robustness,
    run_subset_robustness,
)
