import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from carrollfluid import (DegeneracyError, FluidState, InversionError, LiquescenceError,
                          ParameterError, RiemannState, duality_diagnostics, eigen,
                          eigen_gradients, eigenvalues_riemann, from_riemann,
                          genuine_nonlinearity, make_params, to_riemann)

gammas = st.floats(min_value=1.01, max_value=3.0)


@st.composite
def admissible_states(draw):
    gamma = draw(gammas)
    th = (gamma - 1.0) / 2.0
    log_sigma = draw(st.floats(min_value=math.log(1e-6), max_value=math.log(1e6)))
    sigma = math.exp(log_sigma)
    frac = draw(st.floats(min_value=-0.99, max_value=0.99))
    return make_params(gamma), FluidState(sigma, frac * sigma ** th)


class TestMakeParams:
    @pytest.mark.parametrize("gamma, theta", [(3.0, 1.0), (2.0, 0.5), (1.5, 0.25)])
    def test_theta(self, gamma, theta):
        p = make_params(gamma)
        assert p.theta == theta
        assert p.is_gamma3 == (gamma == 3.0)

    def test_isothermal_rejected(self):
        with pytest.raises(ParameterError, match="γ=1 isothermal case out of scope"):
            make_params(1.0)

    @pytest.mark.parametrize("gamma", [0.5, 3.0000001, 4.0, float("nan"), float("inf")])
    def test_out_of_range_names_interval(self, gamma):
        with pytest.raises(ParameterError, match=r"\(1, 3\]"):
            make_params(gamma)


class TestEigen:
    def test_unit_state_gamma3(self, p3):
        e = eigen(FluidState(1.0, 0.0), p3)
        assert (e.lambda1, e.lambda2) == (-1.0, 1.0)
        assert e.r1 == (1.0, -1.0) and e.r2 == (1.0, 1.0)

    def test_gamma2(self, p2):
        e = eigen(FluidState(4.0, 0.0), p2)
        assert e.lambda1 == pytest.approx(-0.5, abs=1e-15)
        assert e.lambda2 == pytest.approx(0.5, abs=1e-15)
        assert e.r1[1] == pytest.approx(-0.5)

    def test_degenerate(self, p3):
        with pytest.raises(DegeneracyError):
            eigen(FluidState(1.0, 1.0), p3)

    def test_near_degenerate_warns(self, p3):
        with pytest.warns(RuntimeWarning, match="degeneracy band"):
            eigen(FluidState(1.0, 1.0 - 1e-12), p3)

    def test_no_warning_away_from_band(self, p3):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            eigen(FluidState(1.0, 0.5), p3)

    @pytest.mark.parametrize("sigma", [0.0, -1.0])
    def test_liquescence(self, p3, sigma):
        with pytest.raises(LiquescenceError):
            eigen(FluidState(sigma, 0.0), p3)

    def test_vectorized(self, p2):
        e = eigen(FluidState(np.array([1.0, 4.0]), np.array([0.0, 1.0])), p2)
        np.testing.assert_allclose(e.lambda2, [1.0, 1.0 / 3.0])

    @settings(max_examples=200, deadline=None)
    @given(admissible_states())
    def test_lambda_mu_reciprocal(self, ps):
        p, s = ps
        e = eigen(s, p)
        assert e.lambda1 * e.mu1 == pytest.approx(1.0, rel=1e-12)
        assert e.lambda2 * e.mu2 == pytest.approx(1.0, rel=1e-12)
        assert e.lambda1 < 0.0 < e.lambda2


class TestRiemannMaps:
    @pytest.mark.parametrize("gamma, sigma, beta, w1, w2", [
        (3.0, 1.0, 0.0, 1.0, -1.0),
        (2.0, 4.0, 1.0, 5.0, -3.0),
        (3.0, 1.0, 0.5, 1.5, -0.5),
    ])
    def test_examples(self, gamma, sigma, beta, w1, w2):
        p = make_params(gamma)
        rs = to_riemann(FluidState(sigma, beta), p)
        assert (rs.w1, rs.w2) == pytest.approx((w1, w2), rel=1e-15)
        fs = from_riemann(RiemannState(w1, w2), p)
        assert (fs.sigma, fs.beta) == pytest.approx((sigma, beta), rel=1e-15)

    @pytest.mark.parametrize("gamma", [1.5, 2.0, 3.0])
    def test_inversion_error(self, gamma):
        with pytest.raises(InversionError):
            from_riemann(RiemannState(0.0, 0.0), make_params(gamma))

    def test_liquescence(self, p2):
        with pytest.raises(LiquescenceError):
            to_riemann(FluidState(0.0, 1.0), p2)

    @settings(max_examples=300, deadline=None)
    @given(admissible_states())
    def test_round_trip(self, ps):
        p, s = ps
        back = from_riemann(to_riemann(s, p), p)
        assert back.sigma == pytest.approx(s.sigma, rel=1e-12)
        assert back.beta == pytest.approx(s.beta, rel=1e-12, abs=1e-12 * s.sigma ** p.theta)

    @settings(max_examples=200, deadline=None)
    @given(admissible_states())
    def test_riemann_coordinate_eigenvalues(self, ps):
        p, s = ps
        e = eigen(s, p)
        rs = to_riemann(s, p)
        l1, l2 = eigenvalues_riemann(rs.w1, rs.w2, p)
        # (1 -+ theta) w1 + (1 +- theta) w2 cancels when beta nears +-sigma**theta
        # and theta is small; allow for the cancellation, never below 1e-12.
        cond = (abs(rs.w1) + abs(rs.w2)) * max(abs(e.lambda1), abs(e.lambda2))
        rel = max(1e-12, 8 * np.finfo(float).eps * cond)
        assert l1 == pytest.approx(e.lambda1, rel=rel)
        assert l2 == pytest.approx(e.lambda2, rel=rel)


class TestNonlinearity:
    @settings(max_examples=200, deadline=None)
    @given(admissible_states())
    def test_genuine_nonlinearity_signs(self, ps):
        p, s = ps
        d1, d2 = genuine_nonlinearity(s, p)
        assert d1 > 0.0 > d2

    @pytest.mark.parametrize("gamma", [1.5, 2.0, 2.5, 3.0])
    @pytest.mark.parametrize("sigma, frac", [(1.0, 0.0), (4.0, 0.3), (0.5, -0.6)])
    def test_gradient_matches_finite_differences(self, gamma, sigma, frac):
        p = make_params(gamma)
        beta = frac * sigma ** p.theta
        h = 1e-6
        (a1, b1), (a2, b2) = eigen_gradients(FluidState(sigma, beta), p)

        def lam(s, b):
            e = eigen(FluidState(s, b), p)
            return np.array([e.lambda1, e.lambda2])

        ds = (lam(sigma + h, beta) - lam(sigma - h, beta)) / (2 * h)
        db = (lam(sigma, beta + h) - lam(sigma, beta - h)) / (2 * h)
        np.testing.assert_allclose([a1, a2], ds, rtol=1e-6)
        np.testing.assert_allclose([b1, b2], db, rtol=1e-6)


class TestDuality:
    def test_unit_gamma3(self, p3):
        d = duality_diagnostics(FluidState(1.0, 0.0), p3)
        assert d.epsilon == pytest.approx(1 / 3)
        assert d.varpi == pytest.approx(1 / 6)
        assert d.pi == 0.0

    def test_gamma2(self, p2):
        d = duality_diagnostics(FluidState(2.0, 1.0), p2)
        assert (d.epsilon, d.varpi, d.pi) == pytest.approx((2.0, 3.0, 0.0))

    def test_galilean_triple(self, p2):
        d = duality_diagnostics(FluidState(1.0, 0.0), p2)
        assert d.galilean == pytest.approx((1.0, 0.0, 0.5))
