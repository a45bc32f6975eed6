"""Acceptance criteria, one test (or a small group) per criterion.

Each test asserts its own runtime budget. Run ``pytest tests/test_acceptance.py``
or ``python tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.

Frozen DERIVED constants were measured once against the brute-force
oracles in ``oracles.py`` and are committed here; the tests check the
package against them at the stated tolerance.
"""

import math
import time

import numpy as np
import pytest

import oracles
from spiraldelone.cli import liouville_number, main
from spiraldelone.dioph import (
    approximant_lattice_stats,
    badness_statistic,
    best_approximants,
    epsilon_dense_bound,
    make_bad_vector,
)
from spiraldelone.lift import LiftedSequence
from spiraldelone.spiral import GOLDEN, FermatSource, LiftedSource, generate
from spiraldelone.tetra import (
    GreedyConfig,
    TetraFlow,
    exclusion_window,
    fold_consistency,
    greedy_select,
    tetra_source,
)
from spiraldelone.geom import geodesic_distances
from spiraldelone.verify import (
    calibrate_covering,
    cap_discrepancy,
    covering_check,
    covering_radius_estimate,
    density_scan,
    min_pairwise_distance,
    separation_statistic,
)

# Fermat(phi), turn convention, kappa 0.5, k in [10, 1e4]; oracle value 5.5002262920381675 at (k, m) = (36, 3)
SEPARATION_V_STAR = 5.500226292038
# Liouville threshold
LIOUVILLE_CEILING = 1e-3
# tetra, gamma 0.1, 2000 points: measured min distance 0.125983...
TETRA_MIN_DISTANCE = 0.125
# tetra annulus (0.25 R, 0.75 R), R = 2000^(1/3), 1e4 samples, seed 0: measured 1.9995
TETRA_COVERING_RADIUS = 2.1

# (k, x, y) spot set from the printed 150-point sunflower list
SUNFLOWER_SPOTS = [
    (1, -0.047220096, 0.998884509),
    (2, -1.407906912, -0.133409618),
    (3, 0.244633358, -1.714687878),
    (149, -8.36702598310921, 8.88779366310759),
    (150, -8.51120576646421, -8.80678013810419),
]


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


@pytest.fixture(scope="module")
def tetra_run():
    t0 = time.perf_counter()
    cfg = GreedyConfig(make_bad_vector(2), gamma=0.1, k_target=2000, p_cutoff=10**6)
    state = greedy_select(cfg)
    return cfg, state, time.perf_counter() - t0


@pytest.mark.criterion(1, "first 150 golden sunflower points match the printed list")
def test_sunflower_reproduction():
    with Budget(1.0):
        P = generate(FermatSource(GOLDEN, unit="radian"), 150).points
        assert P.shape == (150, 2)
        for k, x, y in SUNFLOWER_SPOTS:
            np.testing.assert_allclose(P[k - 1], [x, y], rtol=0, atol=1e-6)


@pytest.mark.criterion(2, "grid min distance equals brute force on 100 random instances")
def test_grid_matches_brute_force():
    rng = np.random.default_rng(20261016)
    with Budget(60.0):
        for trial in range(100):
            n = (2, 3, 4)[trial % 3]
            N = int(rng.integers(2, 2001))
            kind = trial % 4
            if kind == 0:
                P = rng.uniform(-10, 10, (N, n))
            elif kind == 1:
                # a few tight clusters stress the dense-cell path
                centres = rng.uniform(-50, 50, (5, n))
                P = centres[rng.integers(0, 5, N)] + rng.normal(scale=1e-3, size=(N, n))
            elif kind == 2:
                P = rng.integers(-6, 7, (N, n)).astype(float)
            else:
                P = rng.normal(size=(N, n)) * rng.exponential(5.0, (N, 1))
            assert min_pairwise_distance(P, seed=trial) == oracles.min_distance_rows(P), (trial, N, n)


@pytest.mark.criterion(3, "separation witness pair: golden Fermat above v*, Liouville below 1e-3")
def test_separation_golden():
    with Budget(120.0):
        rep = separation_statistic(FermatSource(GOLDEN), 0.5, 10, 10**4)
    assert rep.passed
    assert rep.global_min >= SEPARATION_V_STAR - 1e-12


@pytest.mark.criterion(3, "separation witness pair: golden Fermat above v*, Liouville below 1e-3")
def test_separation_liouville():
    with Budget(120.0):
        rep = separation_statistic(FermatSource(liouville_number()), 0.5, 10, 10**4)
    assert rep.global_min < LIOUVILLE_CEILING, f"Liouville statistic is {rep.global_min:.4g} at {rep.witness}"


@pytest.mark.criterion(4, "lifted n=3 construction: separation and held-out covering")
def test_lifted_construction():
    src = LiftedSource(LiftedSequence(make_bad_vector(2)))
    with Budget(300.0):
        rep = separation_statistic(src, 0.5, 100, 10**4)
        assert rep.global_min > 0
        assert rep.passed, rep.failing_buckets
        C = calibrate_covering(src, 1.0, 1000, 500, seed=0)
        cov = covering_check(src, 1.0, C, [5000, 10**4], 500, seed=1)
        assert cov.passed, cov.max_scaled


@pytest.mark.criterion(5, "eps-density scaling has bounded empirical constant")
def test_epsilon_density_scaling():
    with Budget(120.0):
        k1 = [epsilon_dense_bound(GOLDEN, e).empirical_K for e in (0.1, 0.05, 0.025, 0.0125)]
        assert max(k1) / min(k1) <= 3
        theta = make_bad_vector(2)
        k2 = [epsilon_dense_bound(theta, e).empirical_K for e in (0.1, 0.05)]
        assert max(k2) / min(k2) <= 4


@pytest.mark.criterion(6, "dual minimum times covering radius stays below d/2")
def test_banaszczyk():
    with Budget(120.0):
        for nu in range(1, 7):
            mu, rho = approximant_lattice_stats(GOLDEN, nu)
            assert mu * rho <= 0.5 + 1e-9
        q = [b.q for b in best_approximants(GOLDEN, 100)]
        for target in (5, 13):
            mu, rho = approximant_lattice_stats(GOLDEN, q.index(target) + 1)
            assert mu * rho == pytest.approx(0.5, abs=1e-12)
        theta = make_bad_vector(2)
        for nu in range(1, 4):
            mu, rho = approximant_lattice_stats(theta, nu)
            assert mu * rho <= 1.0 + 1e-9


@pytest.mark.criterion(7, "best approximants of phi are the Fibonacci numbers with bracketed errors")
def test_fibonacci_approximants():
    with Budget(5.0):
        best = best_approximants(GOLDEN, 10**4)
        c = badness_statistic(GOLDEN, 10**4)
    fib = [1, 2]
    while fib[-1] + fib[-2] <= 10**4:
        fib.append(fib[-1] + fib[-2])
    assert [b.q for b in best] == fib
    assert c > 0
    for cur, nxt in zip(best, best[1:]):
        assert cur.err <= 1.0 / (nxt.q - 1) + 1e-15
    for b in best:
        assert b.err >= c / b.q - 1e-15


@pytest.mark.criterion(8, "tetra pipeline: greedy, invariants, fold check, discreteness and covering")
def test_tetra_pipeline(tetra_run):
    cfg, state, greedy_seconds = tetra_run
    with Budget(600.0 - greedy_seconds):
        assert state.k == 2000
        U = state.vectors
        for k in range(2, 2001):
            m = exclusion_window(k)
            assert geodesic_distances(U[k - 1 - m : k - 1], U[k - 1]).min() > cfg.gamma * k ** (-1 / 3)
        for k in range(1, 2000):
            ahead = U[k : min(k + exclusion_window(k), 2000)]
            if len(ahead):
                bound = cfg.gamma / (k + k ** (2 / 3)) ** (1 / 3)
                assert geodesic_distances(ahead, U[k - 1]).min() > bound
        walker = TetraFlow(cfg.alpha)
        defect = max(fold_consistency(t, cfg.alpha, flow=walker) for t in np.linspace(0.0, 1000.0, 20001))
        assert defect <= 1e-4
        P = generate(tetra_source(cfg, state), 2000).points
        assert min_pairwise_distance(P) >= TETRA_MIN_DISTANCE
        R = 2000 ** (1 / 3)
        assert covering_radius_estimate(P, (0.25 * R, 0.75 * R), 10**4, seed=0) <= TETRA_COVERING_RADIUS


@pytest.mark.criterion(9, "ball counts follow the radial law; golden cap discrepancy is small")
def test_asymptotic_density(tetra_run):
    cfg, state, _ = tetra_run
    with Budget(60.0):
        families = [
            generate(FermatSource(GOLDEN), 10**4),
            generate(FermatSource(GOLDEN, unit="radian"), 10**4),
            generate(LiftedSource(LiftedSequence(make_bad_vector(2))), 10**4),
            generate(LiftedSource(LiftedSequence(make_bad_vector(3))), 10**4),
            generate(tetra_source(cfg, state), 2000),
        ]
        for spiral in families:
            top = len(spiral) ** (1 / spiral.n)
            R_values = [1.0, 2.5, top / 3 + 0.01, top / 2 + 0.1, 0.87 * top + 0.01]
            rep = density_scan(spiral, R_values, caps=10)
            assert rep.counts == [math.floor(R**spiral.n) for R in R_values]
            assert rep.counts == rep.expected
        assert cap_discrepancy(families[0].directions, caps=200, seed=0) < 0.02


@pytest.mark.criterion(10, "generate and verify are byte-deterministic")
def test_cli_determinism(tmp_path, capsys):
    runs = [
        ["generate", "--family", "fermat", "--count", "2000"],
        ["generate", "--family", "lifted", "--dim", "4", "--count", "2000", "--format", "json"],
        ["generate", "--family", "tetra", "--count", "300"],
        ["verify", "--family", "fermat", "--angle-unit", "turn", "--count", "5000",
         "--suites", "separation,covering,discreteness,covering-radius,gaps,density"],
        ["verify", "--family", "lifted", "--count", "3000", "--k-min", "100", "--suites", "separation,covering"],
    ]
    for argv in runs:
        outs = []
        for _ in range(2):
            code = main(argv)
            outs.append((code, capsys.readouterr().out.encode()))
        assert outs[0] == outs[1], argv
        assert outs[0][0] == 0 and outs[0][1]


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
