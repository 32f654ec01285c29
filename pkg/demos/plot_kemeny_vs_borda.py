"""
Borda versus the exact Kemeny consensus
=======================================

The Kemeny consensus minimises the total Kendall distance to the inputs.
It is expensive; Borda is cheap. How far apart are they?
"""

import numpy as np

from benchrank import borda, borda_approx_ratio, kemeny_branch_bound, kemeny_brute_force, kemeny_objective

# A Condorcet cycle: every permutation-shift of a > b > c.
cycle = [[1, 2, 3], [3, 1, 2], [2, 3, 1]]
sol = kemeny_brute_force(cycle)
print("cycle: objective", sol.objective, "co-optima", sol.co_optima_count)

###############################################################################
# Three voters rank a > b > c > d, two put a last. a still wins every
# pairwise majority, but Borda prefers b.

profile = [[1, 2, 3, 4]] * 3 + [[4, 1, 2, 3]] * 2
b = borda(profile)
k = kemeny_brute_force(profile)
print("Borda  ", b.ranking, kemeny_objective(b.ranking, profile))
print("Kemeny ", k.consensus, k.objective)
print("ratio  ", borda_approx_ratio(profile))

###############################################################################
# On random profiles the gap is usually small.

rng = np.random.default_rng(0)
ratios = []
for _ in range(200):
    n, t = rng.integers(3, 9), rng.integers(2, 8)
    prof = [rng.permutation(n) + 1 for _ in range(t)]
    ratios.append(borda_approx_ratio(prof))
ratios = np.array(ratios)
print(f"Borda optimal on {np.mean(ratios == 1.0):.0%} of profiles, worst ratio {ratios.max():.3f}")

###############################################################################
# Branch-and-bound handles sizes where enumerating N! orders is slow.

prof = [rng.permutation(12) + 1 for _ in range(5)]
print("N=12 exact objective:", kemeny_branch_bound(prof).objective)
