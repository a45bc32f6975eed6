"""The number theory behind the constructions.

Run: python demos/diophantine.py
"""

from spiraldelone import make_bad_vector
from spiraldelone.dioph import (
    approximant_lattice_stats,
    badness_statistic,
    best_approximants,
    epsilon_dense_bound,
)
from spiraldelone.spiral import GOLDEN

# Best approximations of the golden ratio have Fibonacci denominators.
best = best_approximants(GOLDEN, 10**4)
print("denominators:", [b.q for b in best])
print(f"q * |q phi| stays near 1/sqrt(5): min {badness_statistic(GOLDEN, 10**4):.5f}")

# How many multiples are needed before every point of the torus is eps-close?
for alpha, label, eps_list in ((GOLDEN, "phi", (0.1, 0.05, 0.025, 0.0125)),
                               (make_bad_vector(2), "plane cubic", (0.1, 0.05))):
    print(f"\n{label}:")
    for eps in eps_list:
        cert = epsilon_dense_bound(alpha, eps)
        print(f"  eps {eps:<7} M {cert.M:>5}  M eps^d {cert.empirical_K:.3f}")

# The lattice spanned by a best approximant: a short dual vector forces a
# small covering radius.
print("\nlattice products (at most d/2):")
for alpha, d in ((GOLDEN, 1), (make_bad_vector(2), 2)):
    for nu in range(1, 4):
        mu, rho = approximant_lattice_stats(alpha, nu)
        print(f"  d={d} nu={nu}: dual min {mu:.4f}, covering radius {rho:.4f}, product {mu * rho:.4f}")
