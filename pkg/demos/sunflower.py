"""Golden sunflower: build the planar spiral, check it is a Delone set, draw it.

Run: python demos/sunflower.py [out.svg]
"""

import sys

from spiraldelone import generate
from spiraldelone.cli import liouville_number, render_svg
from spiraldelone.spiral import GOLDEN, FermatSource
from spiraldelone.verify import (
    calibrate_covering,
    covering_check,
    covering_radius_estimate,
    min_pairwise_distance,
    separation_statistic,
)

# Points sqrt(k) e(k alpha). The golden ratio is the worst-approximable number,
# so consecutive angles never bunch up.
golden = FermatSource(GOLDEN)
spiral = generate(golden, 10_000)
print(f"{len(spiral)} points, outermost radius {spiral.norms[-1]:.2f}")

# Packing side: neighbours in index are well separated on the circle once
# the distance is rescaled by sqrt(k).
sep = separation_statistic(golden, kappa=0.5, k_min=10, k_max=9_000)
print(f"separation statistic {sep.global_min:.4f} at (k, m) = {sep.witness}")
for lo, hi, value in sep.per_decade_min:
    print(f"  k in [{lo}, {hi}]: {value:.4f}")

# Covering side: every direction is close to some u_j in a window around k.
C = calibrate_covering(golden, c=1.0, k_cal=1000, n_dirs=500)
cov = covering_check(golden, 1.0, C, [3000, 8000], 500, seed=1)
print(f"covering constant C = {C:.3f}; held-out check passed: {cov.passed}")

# The same two facts seen in the plane.
print(f"min pairwise distance {min_pairwise_distance(spiral.points):.4f}")
print(f"covering radius on annulus (20, 80): {covering_radius_estimate(spiral.points, (20, 80), 20_000):.4f}")

# A Liouville angle is far better approximable, and the packing side weakens.
liou = separation_statistic(FermatSource(liouville_number()), 0.5, 10, 9_000)
print(f"Liouville angle: separation statistic {liou.global_min:.4f}")

if len(sys.argv) > 1:
    # the classic picture uses the angle k alpha in radians
    figure = generate(FermatSource(GOLDEN, unit="radian"), 150)
    with open(sys.argv[1], "w") as fh:
        fh.write(render_svg(figure.points))
    print(f"wrote {sys.argv[1]}")
