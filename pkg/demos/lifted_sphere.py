"""Spirals in higher dimension from a badly approximable vector on the torus.

Run: python demos/lifted_sphere.py
"""

import numpy as np

from spiraldelone import LiftedSequence, generate, make_bad_vector
from spiraldelone.dioph import badness_statistic, transference_statistic
from spiraldelone.spiral import LiftedSource
from spiraldelone.verify import calibrate_covering, covering_check, density_scan, separation_statistic

for d in (2, 3):
    alpha = make_bad_vector(d)
    n = d + 1
    print(f"\n--- n = {n}: alpha from {alpha.label} ---")
    print(f"alpha = {np.round(alpha.array, 6)}")
    # Both the direct and the dual approximation constants stay away from zero.
    print(f"badness up to q=10^5: {badness_statistic(alpha, 10**5):.4f}")
    print(f"dual statistic, |b| <= 20: {transference_statistic(alpha, 20):.4f}")

    # The multiples k alpha mod 2 are mapped onto the sphere; even and odd k
    # use opposite hemispheres.
    source = LiftedSource(LiftedSequence(alpha))
    k_max = 10**4 if n == 3 else 3000
    sep = separation_statistic(source, 0.5, 100, k_max)
    print(f"separation over [100, {k_max}]: {sep.global_min:.4f}, buckets "
          + ", ".join(f"{v:.3f}" for _, _, v in sep.per_decade_min))
    C = calibrate_covering(source, 1.0, k_max // 10, 300)
    cov = covering_check(source, 1.0, C, [k_max // 2, k_max], 300, seed=1)
    print(f"covering with C = {C:.3f}: worst scaled distance "
          + ", ".join(f"{v:.3f}" for v in cov.max_scaled) + f", passed {cov.passed}")

    spiral = generate(source, k_max)
    rep = density_scan(spiral, [2.5, 5.5], caps=200)
    print(f"ball counts {rep.counts} (expected {rep.expected}); cap discrepancy {rep.cap_discrepancy:.3f}")
