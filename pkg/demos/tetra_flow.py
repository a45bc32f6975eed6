"""Directions from a straight-line flow on the surface of a tetrahedron.

Run: python demos/tetra_flow.py [trace.csv]
"""

import sys

import numpy as np

from spiraldelone import GreedyConfig, generate, greedy_select, tetra_source
from spiraldelone.tetra import TetraFlow, fold_consistency, write_flow_trace
from spiraldelone.verify import covering_radius_estimate, min_pairwise_distance, separation_statistic

cfg = GreedyConfig(gamma=0.1, k_target=2000)

# The flow starts at a vertex and reflects across edges. Unfolded, it is a
# straight line in the plane, so its position is the plane point folded back.
flow = TetraFlow(cfg.alpha, record=True)
flow.advance_to(200.0)
print(f"t = 200: {flow.crossings} edge crossings, face {flow.point().face}")
print(f"largest position jump at a crossing {flow.max_jump:.2e}")
print(f"walker vs folded plane point at t = 200: {fold_consistency(200.0, cfg.alpha):.2e}")
if len(sys.argv) > 1:
    write_flow_trace(sys.argv[1], flow.trace)
    print(f"wrote {len(flow.trace)} crossings to {sys.argv[1]}")

# Sample the flow at integer times, skipping any time whose direction would
# crowd the recent picks.
state = greedy_select(cfg)
gaps = np.diff(state.j)
print(f"\nselected {state.k} directions; last time used {state.j[-1]}, skipped {int((gaps - 1).sum())}")

spiral = generate(tetra_source(cfg, state), cfg.k_target)
sep = separation_statistic(spiral.directions, 0.5, 10, 1900)
print(f"separation statistic {sep.global_min:.4f} (passed {sep.passed})")
print(f"min pairwise distance {min_pairwise_distance(spiral.points):.4f}")
R = cfg.k_target ** (1 / 3)
print(f"covering radius estimate {covering_radius_estimate(spiral.points, (0.25 * R, 0.75 * R), 10_000):.4f}")
