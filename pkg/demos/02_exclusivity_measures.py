"""The exclusivity measures and the row-wise l1,2 penalty built from them.

Run:  python demos/02_exclusivity_measures.py
"""

import numpy as np

from xrm import diversity_report, exclusivity, exclusivity_regularizer, relaxed_exclusivity

u = np.array([1.0, 0.0, -2.0, 0.0])
v = np.array([0.0, 3.0, 1.0, 0.0])
ones = np.ones(4)

# Exclusivity counts coordinates where both vectors are active; the relaxed
# form replaces the count with a sum of |u_i| * |v_i| and is convex-friendly.
print("exclusivity(u, v)          =", exclusivity(u, v))
print("relaxed_exclusivity(u, v)  =", relaxed_exclusivity(u, v))

# Three identities connect the measures to familiar norms:
print("\n||u||_0 = exclusivity(u, 1)         :", np.count_nonzero(u), "==", exclusivity(u, ones))
print("||u||_1 = relaxed_exclusivity(u, 1) :", np.abs(u).sum(), "==", relaxed_exclusivity(u, ones))
print("||u||_2^2 = relaxed_exclusivity(u, u):", (u**2).sum(), "==", relaxed_exclusivity(u, u))

# For a weight matrix W (features x components), the training penalty is half
# the squared row-wise l1 sums.  It decomposes into a Frobenius part plus the
# relaxed exclusivity summed over unordered component pairs, so minimizing it
# pushes components toward disjoint feature supports while controlling scale.
rng = np.random.default_rng(0)
W = rng.normal(size=(5, 3))
pair_sum = sum(relaxed_exclusivity(W[:, a], W[:, b])
               for a in range(3) for b in range(a + 1, 3))
print("\npenalty               :", exclusivity_regularizer(W))
print("0.5*fro^2 + pair sum  :", 0.5 * np.linalg.norm(W) ** 2 + pair_sum)

# The report materializes the pairwise structure for a trained model.
report = diversity_report(np.array([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]]))
print("\npairwise relaxed exclusivity:\n", report.pairwise_relaxed_exclusivity)
print("pairwise exclusivity (support overlaps):\n", report.pairwise_exclusivity)
