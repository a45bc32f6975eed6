import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spiraldelone.geom import (
    EXACT_ZERO,
    ORIGIN,
    DimensionError,
    PolarPoint,
    SphericalCap,
    UnitVector,
    cap_contains,
    cap_fraction,
    geodesic_distance,
    geodesic_distances,
    normalize_rows,
    polar_decompose,
    polar_distance_ratio,
    sphere_directions,
)

E1, E2 = UnitVector.basis(0, 3), UnitVector.basis(1, 3)
#: recorded constant for the polar comparability check
POLAR_C0 = 2.0


def test_geodesic_examples():
    assert geodesic_distance(E1, E1) == 0.0
    assert geodesic_distance(E1, -E1) == pytest.approx(math.pi, abs=1e-15)
    assert geodesic_distance(E1, E2) == pytest.approx(math.pi / 2, abs=1e-15)


def test_geodesic_dimension_mismatch():
    with pytest.raises(DimensionError):
        geodesic_distance(E1, UnitVector.basis(0, 2))


def test_geodesic_clamps_rounding():
    u = np.array([1.0, 1e-9, 0.0])
    u = u / np.linalg.norm(u)
    assert not math.isnan(geodesic_distance(u, u))


@pytest.mark.parametrize(
    "x, r, u",
    [
        ((3, 4), 5.0, (0.6, 0.8)),
        ((0, 0, 2), 2.0, (0.0, 0.0, 1.0)),
        ((1, 1), math.sqrt(2), (math.sqrt(2) / 2, math.sqrt(2) / 2)),
    ],
)
def test_polar_decompose(x, r, u):
    p = polar_decompose(x)
    assert p.radius == pytest.approx(r, rel=1e-15)
    np.testing.assert_allclose(p.direction.coords, u, atol=1e-15)


def test_polar_decompose_rejects_zero():
    with pytest.raises(ValueError):
        polar_decompose([0.0, 0.0])


def test_polar_ratio_examples():
    x = PolarPoint(1.0, E1)
    assert polar_distance_ratio(x, x) is EXACT_ZERO
    assert not EXACT_ZERO
    assert polar_distance_ratio(x, PolarPoint(2.0, E1)) == pytest.approx(1.0)
    assert polar_distance_ratio(x, PolarPoint(1.0, E2)) == pytest.approx(math.sqrt(2) / (math.pi / 2))
    assert polar_distance_ratio(x, PolarPoint(1.0, E2)) == pytest.approx(0.9003, abs=1e-4)


def test_polar_ratio_rejects_origin():
    with pytest.raises(ValueError):
        polar_distance_ratio(ORIGIN, PolarPoint(1.0, E1))


def test_cap_examples():
    assert cap_contains(SphericalCap(E1, 0.1), E1)
    assert cap_contains(SphericalCap(E1, math.pi), -E1)
    assert not cap_contains(SphericalCap(E1, math.pi / 4), E2)


@pytest.mark.parametrize("rho", [0.0, -1.0, 4.0])
def test_cap_radius_domain(rho):
    with pytest.raises(ValueError):
        SphericalCap(E1, rho)


def test_unit_vector_validation():
    assert UnitVector((1.0 + 5e-13, 0.0)).coords == (1.0, 0.0)
    with pytest.raises(ValueError):
        UnitVector((1.1, 0.0))
    with pytest.raises(DimensionError):
        UnitVector((1.0,))
    with pytest.raises(ValueError):
        UnitVector.from_vector([0.0, 0.0])


def test_polar_point_origin_rules():
    assert ORIGIN.direction is None
    with pytest.raises(ValueError):
        PolarPoint(0.0, E1)
    with pytest.raises(ValueError):
        PolarPoint(1.0, None)
    with pytest.raises(ValueError):
        PolarPoint(-1.0, E1)


def test_cap_fraction_closed_forms():
    assert cap_fraction(math.pi / 2, 1) == pytest.approx(0.5)
    assert cap_fraction(math.pi / 2, 2) == pytest.approx(0.5)
    assert cap_fraction(math.pi / 2, 5) == pytest.approx(0.5, abs=1e-10)
    assert cap_fraction(math.pi, 3) == 1.0
    # S^3 closed form: (rho - sin(rho) cos(rho)) / pi
    rho = 0.7
    assert cap_fraction(rho, 3) == pytest.approx((rho - math.sin(rho) * math.cos(rho)) / math.pi, rel=1e-10)


def test_cap_fraction_matches_monte_carlo_on_s2():
    u = sphere_directions(200_000, 3, seed=3)
    share = np.mean(geodesic_distances(u, np.array([0.0, 0.0, 1.0])) <= 1.0)
    assert share == pytest.approx(cap_fraction(1.0, 2), abs=2e-3)


def test_sphere_directions_deterministic_and_unit():
    a = sphere_directions(100, 4, seed=7)
    assert np.array_equal(a, sphere_directions(100, 4, seed=7))
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0, atol=1e-14)
    assert not np.array_equal(a, sphere_directions(100, 4, seed=8))


def test_normalize_rows_rejects_zero():
    with pytest.raises(ValueError):
        normalize_rows(np.zeros((2, 3)))


# --- empirical constants over random samples -------------------------------


def test_polar_ratio_bounded():
    rng = np.random.default_rng(0)
    ratios = []
    for n in range(2, 6):
        for _ in range(2500):
            x = rng.normal(size=n) * rng.exponential(3.0)
            y = rng.normal(size=n) * rng.exponential(3.0)
            ratios.append(polar_distance_ratio(polar_decompose(x), polar_decompose(y)))
    lo, hi = min(ratios), max(ratios)
    assert 1 / POLAR_C0 <= lo <= hi <= POLAR_C0


def test_geodesic_over_chord():
    rng = np.random.default_rng(1)
    u = normalize_rows(rng.normal(size=(10_000, 4)))
    v = normalize_rows(rng.normal(size=(10_000, 4)))
    theta = geodesic_distances(u, v)
    ratio = theta / np.linalg.norm(u - v, axis=1)
    assert np.all(ratio >= 1 - 1e-12) and np.all(ratio <= math.pi / 2 + 1e-12)
    np.testing.assert_allclose(ratio, theta / (2 * np.sin(theta / 2)), rtol=1e-10)


def test_triangle_inequality():
    rng = np.random.default_rng(2)
    for n in (2, 3, 5):
        u, v, w = (normalize_rows(rng.normal(size=(1000, n))) for _ in range(3))
        lhs = geodesic_distances(u, w)
        assert np.all(lhs <= geodesic_distances(u, v) + geodesic_distances(v, w) + 1e-9)


def test_root_perturbation_bound():
    rng = np.random.default_rng(3)
    x = rng.uniform(-1, 1, 10_000)
    for n in range(2, 6):
        assert np.all(np.abs((1 + x) ** (1 / n) - 1) <= 2 * np.abs(x))


unit_vectors = st.integers(2, 6).flatmap(
    lambda n: st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=n, max_size=n).filter(
        lambda v: np.linalg.norm(v) > 1e-6
    )
)


@settings(max_examples=200, deadline=None)
@given(unit_vectors, st.integers(0, 2**31))
def test_geodesic_symmetric_and_bounded(x, seed):
    u = UnitVector.from_vector(x)
    v = UnitVector.from_vector(np.random.default_rng(seed).normal(size=len(x)))
    d = geodesic_distance(u, v)
    assert 0.0 <= d <= math.pi
    assert d == geodesic_distance(v, u)


@settings(max_examples=200, deadline=None)
@given(unit_vectors)
def test_unit_vector_round_trip(x):
    u = UnitVector.from_vector(x)
    assert abs(np.linalg.norm(u) - 1) <= 1e-12
    np.testing.assert_allclose(UnitVector(u.coords).coords, u.coords, rtol=0, atol=1e-15)
