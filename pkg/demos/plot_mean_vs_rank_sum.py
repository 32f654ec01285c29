"""
When the average disagrees with every head-to-head vote
=======================================================

Three systems, six tasks, lower scores are better. Averaging the raw
scores puts A on top, yet A loses or draws every pairwise comparison.
"""

from pathlib import Path

import numpy as np

from benchrank import mean_task_aggregate, pairwise_compare, sigma_star
from benchrank.io import load_task_level

here = Path(__file__).parent
m = load_task_level(here / "data" / "table1.csv", "lower")
print(m.scores)

###############################################################################
# Mean aggregation. Task3 has values around 10-15, so it dominates the mean.

mean = mean_task_aggregate(m)
for name, v in zip(m.system_names, mean.per_system_value):
    print(f"{name}: mean score {v:.3f}")
print("mean ranking:", " > ".join(mean.ordered_names()))

###############################################################################
# Head-to-head counts: on how many tasks does each system win?

rows = dict(zip(m.system_names, m.scores))
for a, b in [("A", "B"), ("B", "C"), ("A", "C")]:
    r = pairwise_compare(rows[a], rows[b], "lower")
    print(f"{a} vs {b}: {r.lambda_a}-{r.lambda_b} -> {r.verdict}")

###############################################################################
# Rank each task, then add the ranks. Scale no longer matters.

ranks = np.column_stack(m.task_rankings())
print(ranks)
star = sigma_star(m)
print("rank sums:", dict(zip(m.system_names, star.per_system_value.tolist())))
print("rank-sum ranking:", " > ".join(star.ordered_names()))
