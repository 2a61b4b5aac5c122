from itertools import combinations
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from horoaf import analytic
from horoaf.errors import OutOfBall
from horoaf.hyperbolic import (
    conformal_factor,
    elementary_symmetric,
    is_horospherically_convex,
    lift_frame,
    min_principal_curvature,
    normalized_mean_curvature,
    rho,
    rho_identity_residual,
    rho_minus_one,
)
from horoaf.sphere_grid import unit_sphere_area
from horoaf.surface import (
    CenteredEllipsoid,
    GeodesicSphere,
    HarmonicPerturbedSphere,
    SmoothedSimplex,
    eval_support_body,
    evaluate,
    hyperbolic_to_euclidean_radius,
    scale_frame,
)

RADII = [0.25, 0.5, 1.0, 2.0, 4.0]


def _point(R, n=3):
    x = np.zeros(n)
    x[0] = R
    return x


class TestPointFunctions:
    def test_conformal_factor_examples(self):
        assert conformal_factor(np.zeros(3)) == 2.0
        assert conformal_factor(_point(0.5)) == pytest.approx(8 / 3, rel=1e-15)

    @pytest.mark.parametrize("r", RADII)
    def test_half_angle(self, r):
        R = np.tanh(r / 2)
        assert conformal_factor(_point(R)) * R == pytest.approx(np.sinh(r), rel=1e-12)
        assert rho(_point(R)) == pytest.approx(np.cosh(r), rel=1e-12)

    def test_rho_at_origin(self):
        assert rho(np.zeros(4)) == 1.0
        assert rho_minus_one(np.zeros(4)) == 0.0

    @settings(max_examples=100)
    @given(hnp.arrays(float, 3, elements=st.floats(-0.57, 0.57)))
    def test_rho_algebra(self, x):
        r2 = x @ x
        assert rho(x) ** 2 - 1 == pytest.approx(conformal_factor(x) ** 2 * r2, rel=1e-12, abs=1e-15)
        assert rho_minus_one(x) == pytest.approx(rho(x) - 1, rel=1e-12, abs=1e-15)
        assert rho(x) >= 1.0

    def test_rho_minus_one_has_no_cancellation(self):
        x = _point(1e-9)
        assert rho_minus_one(x) == pytest.approx(2e-18, rel=1e-14)

    @pytest.mark.parametrize("f", [conformal_factor, rho, rho_minus_one])
    @pytest.mark.parametrize("R", [1.0, 1.5])
    def test_rejects_outside(self, f, R):
        with pytest.raises(OutOfBall):
            f(_point(R))


def _brute_sigma(lam, k):
    return sum(np.prod(c) for c in combinations(lam, k)) if k else 1.0


class TestElementarySymmetric:
    @settings(max_examples=200)
    @given(hnp.arrays(float, st.integers(1, 4), elements=st.floats(-50, 50)))
    def test_matches_combinations(self, lam):
        sigma = elementary_symmetric(lam[None])[0]
        scale = np.prod(np.maximum(1.0, np.sort(np.abs(lam))[::-1]))
        for k in range(len(lam) + 1):
            assert sigma[k] == pytest.approx(_brute_sigma(lam, k), abs=1e-12 * scale)

    def test_sigma0_is_one(self):
        lam = np.random.default_rng(0).normal(size=(10, 3))
        assert np.all(elementary_symmetric(lam)[:, 0] == 1.0)

    def test_mixed_signs(self):
        # sigma_2 of (1e8, -1e8, 1) is -1e16 exactly; sigma_1 is 1
        s = elementary_symmetric(np.array([[1.0, 1e8, -1e8]]))[0]
        assert s[1] == 1.0 and s[2] == -1e16 and s[3] == -1e16


class TestLiftSphere:
    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("r", RADII)
    def test_closed_forms(self, n, r, grid_factory):
        hf = lift_frame(evaluate(GeodesicSphere(n, r), grid_factory(n, 16)))
        R = hyperbolic_to_euclidean_radius(r)
        assert (1 + R * R) / (2 * R) == pytest.approx(1 / np.tanh(2 * np.arctanh(R)), rel=1e-12)
        np.testing.assert_allclose(hf.lam, 1 / np.tanh(r), rtol=1e-12)
        np.testing.assert_allclose(hf.p, np.sinh(r), rtol=1e-12)
        np.testing.assert_allclose(hf.rho, np.cosh(r), rtol=1e-12)
        area = hf.area_element.sum()
        assert area == pytest.approx(unit_sphere_area(n) * np.sinh(r) ** (n - 1), rel=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("r", RADII)
    def test_mean_curvatures(self, n, r, grid_factory):
        hf = lift_frame(evaluate(GeodesicSphere(n, r), grid_factory(n, 8)))
        for k in range(n):
            np.testing.assert_allclose(normalized_mean_curvature(hf, k), 1 / np.tanh(r) ** k, rtol=1e-11)
        np.testing.assert_allclose(np.prod(hf.lam, axis=1), 1 / np.tanh(r) ** (n - 1), rtol=1e-11)

    @pytest.mark.parametrize("k", [-1, 3, 1.5])
    def test_mean_curvature_rejects(self, k, grid_factory):
        hf = lift_frame(evaluate(GeodesicSphere(3, 1.0), grid_factory(3, 8)))
        with pytest.raises(ValueError):
            normalized_mean_curvature(hf, k)

    @pytest.mark.parametrize("r", RADII)
    def test_min_curvature_above_one(self, r, grid_factory):
        lam, h1 = min_principal_curvature(lift_frame(evaluate(GeodesicSphere(3, r), grid_factory(3, 8))))
        assert lam > 1 and h1 > 1
        assert lam == pytest.approx(1 / np.tanh(r), rel=1e-12)

    def test_horosphere_limit(self, grid_factory):
        g = grid_factory(3, 8)
        values = [min_principal_curvature(lift_frame(evaluate(GeodesicSphere(3, r), g)))[0] for r in (2, 4, 8, 12)]
        assert all(v > 1 for v in values)
        assert np.all(np.diff(values) < 0)
        assert values[-1] - 1 < 1e-9


FAMILIES = [
    GeodesicSphere(3, 1.0),
    CenteredEllipsoid(3, (0.4, 0.25, 0.3)),
    HarmonicPerturbedSphere(3, 0.4, (("zonal2", 0.05), ("dipole", 0.03))),
    HarmonicPerturbedSphere(3, 0.5, (("zonal3", 0.2),)),
    SmoothedSimplex(3),
    GeodesicSphere(2, 0.7),
    CenteredEllipsoid(2, (0.5, 0.2)),
    SmoothedSimplex(2, p=5, eps=0.05, scale=0.3),
    CenteredEllipsoid(4, (0.4, 0.3, 0.35, 0.25)),
    SmoothedSimplex(4),
    HarmonicPerturbedSphere(4, 0.3, (("zonal2", 0.05),)),
]


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: f"{s.family}-n{s.n}")
def test_rho_identity(spec, grid_factory):
    frame = evaluate(spec, grid_factory(spec.n, 64 if spec.n < 4 else 24))
    hf = lift_frame(frame)
    assert rho_identity_residual(frame, hf) <= 1e-8
    assert np.all(hf.p**2 <= hf.rho**2 - 1 + 1e-10)
    assert np.all(hf.rho >= 1)
    assert np.all(hf.sigma[:, 0] == 1)


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: f"{s.family}-n{s.n}")
@pytest.mark.parametrize("s", [1.0, 0.5, 0.1, 0.02])
def test_mean_convexity_transfer(spec, s, grid_factory):
    frame = scale_frame(evaluate(spec, grid_factory(spec.n, 24 if spec.n < 4 else 12)), s)
    hf = lift_frame(frame)
    if np.min(normalized_mean_curvature(hf, 1)) >= 1:
        assert np.all(frame.kappa.mean(axis=1) > 0)


CONVEX = [f for f in FAMILIES if f.family != "perturbed_sphere"] + [
    HarmonicPerturbedSphere(3, 0.4, (("zonal2", 0.05),))
]


@pytest.mark.parametrize("spec", CONVEX, ids=lambda s: f"{s.family}-n{s.n}")
def test_hconvex_under_shrinking(spec, grid_factory):
    frame = evaluate(spec, grid_factory(spec.n, 24 if spec.n < 4 else 12))
    assert np.all(frame.kappa > 0)
    log_s = np.arange(0.0, 12.0, 0.25)
    flags = [is_horospherically_convex(lift_frame(scale_frame(frame, np.exp(-t)))) for t in log_s]
    assert flags[-1]
    onset = flags.index(True)
    assert all(flags[onset:])


def test_smoothed_simplex_min_lambda_increases(grid_factory):
    frame = evaluate(SmoothedSimplex(3), grid_factory(3, 24))
    t = np.arange(0.0, 10.0, 0.1)
    lam = np.array([min_principal_curvature(lift_frame(scale_frame(frame, np.exp(-tt))))[0] for tt in t])
    inside = t >= t[np.argmax(lam >= 1)]
    assert np.all(np.diff(lam[inside]) > 0)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("R", [0.7, 0.3])
@pytest.mark.parametrize("s", [1.0, 0.6, 0.05])
def test_lift_of_scaled_sphere(n, R, s, grid_factory):
    g = grid_factory(n, 8)
    a = lift_frame(scale_frame(eval_support_body(analytic.BallSupport(R), g), s))
    Rs = R * s
    np.testing.assert_allclose(a.lam, (1 + Rs**2) / (2 * Rs), rtol=1e-12)
    np.testing.assert_allclose(a.p, 2 * Rs / (1 - Rs**2), rtol=1e-12)
    np.testing.assert_allclose(a.area_element, (2 / (1 - Rs**2)) ** (n - 1) * Rs ** (n - 1) * g.weights, rtol=1e-12)


def test_binomial_normalization(grid_factory):
    hf = lift_frame(evaluate(CenteredEllipsoid(4, (0.4, 0.3, 0.35, 0.25)), grid_factory(4, 8)))
    for k in range(4):
        np.testing.assert_allclose(normalized_mean_curvature(hf, k) * comb(3, k), hf.sigma[:, k], rtol=1e-15)
