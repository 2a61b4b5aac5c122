from math import gamma, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from horoaf.sphere_grid import build_grid, unit_sphere_area


def monomial_moment(alpha):
    """Closed-form integral of prod u_i^alpha_i over S^{n-1}."""
    if any(a % 2 for a in alpha):
        return 0.0
    b = [(a + 1) / 2 for a in alpha]
    return 2 * np.prod([gamma(x) for x in b]) / gamma(sum(b))


def test_unit_sphere_area_examples():
    assert unit_sphere_area(2) == pytest.approx(2 * pi, rel=1e-15)
    assert unit_sphere_area(3) == pytest.approx(4 * pi, rel=1e-15)
    assert unit_sphere_area(4) == pytest.approx(2 * pi**2, rel=1e-15)


def test_unit_sphere_area_monte_carlo_n4():
    # fraction of the cube [-1,1]^4 inside the unit ball is |B^4| / 16, and |S^3| = 4 |B^4|
    rng = np.random.default_rng(0)
    pts = rng.uniform(-1, 1, size=(2_000_000, 4))
    vol = 16 * np.mean(np.sum(pts * pts, axis=1) < 1)
    assert 4 * vol == pytest.approx(unit_sphere_area(4), rel=5e-3)


@pytest.mark.parametrize("n", [1, 0, -3])
def test_unit_sphere_area_rejects_small_n(n):
    with pytest.raises(ValueError):
        unit_sphere_area(n)


def test_circle_grid_is_uniform():
    g = build_grid(2, 8)
    angles = np.mod(np.arctan2(g.nodes[:, 1], g.nodes[:, 0]), 2 * pi)
    np.testing.assert_allclose(angles, 2 * pi * np.arange(8) / 8, atol=1e-15)
    np.testing.assert_allclose(g.weights, pi / 4, rtol=1e-15)


def test_s2_weight_sum_and_quadratic():
    g = build_grid(3, 32)
    assert abs(g.weights.sum() - 4 * pi) < 1e-12
    assert abs(g.integrate(g.nodes[:, 2] ** 2) - 4 * pi / 3) < 1e-12


@pytest.mark.parametrize("n,resolution", [(5, 8), (1, 8), (3, 3), (3, 7.5)])
def test_build_grid_rejects(n, resolution):
    with pytest.raises(ValueError):
        build_grid(n, resolution)


def test_grid_is_immutable():
    g = build_grid(3, 8)
    with pytest.raises(ValueError):
        g.weights[0] = 1.0


@settings(max_examples=30, deadline=None)
@given(n=st.sampled_from([2, 3, 4]), resolution=st.integers(4, 24))
def test_grid_invariants(n, resolution):
    g = build_grid(n, resolution)
    assert np.max(np.abs(np.linalg.norm(g.nodes, axis=1) - 1)) <= 1e-14
    assert np.all(g.weights > 0)
    assert g.weights.sum() == pytest.approx(unit_sphere_area(n), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    n=st.sampled_from([2, 3, 4]),
    resolution=st.integers(8, 16),
    alpha=st.lists(st.integers(0, 4), min_size=4, max_size=4),
)
def test_low_degree_polynomials_exact(n, resolution, alpha):
    alpha = alpha[:n]
    if sum(alpha) > 4:
        alpha = [min(a, 1) for a in alpha]
    g = build_grid(n, resolution)
    value = g.integrate(np.prod(g.nodes ** np.array(alpha), axis=1))
    assert abs(value - monomial_moment(alpha)) <= 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_refinement_steps_shrink(n):
    # analytic integrand: exp(u_1 + 0.5 u_n)
    def f(U):
        return np.exp(U[:, 0] + 0.5 * U[:, -1])

    values = [build_grid(n, r).integrate(f(build_grid(n, r).nodes)) for r in (4, 8, 16, 32)]
    steps = np.abs(np.diff(values))
    for a, b in zip(steps, steps[1:]):
        assert b <= a or b < 1e-13
