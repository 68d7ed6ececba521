import numpy as np
import pytest

from carrollfluid import (BlowupError, GateError, HorizonError, ParameterError,
                          alpha_along_characteristic_gamma3, first_crossing_time_gamma3,
                          foot_points, make_params, one_sided_lipschitz_certificate_gamma3,
                          predict_blowup_gamma3, preset, run, solve_exact_gamma3, Grid1D)
from carrollfluid.gamma3 import lipschitz_constant_gamma3

from conftest import TSTAR_ARCTAN_2_01, XSTAR_ARCTAN_2_01, data_from_invariants


class TestPredict:
    def test_rarefactive_global(self, rarefactive):
        rep = predict_blowup_gamma3(rarefactive)
        assert rep.verdict == "global" and rep.t_star == np.inf and rep.family is None

    def test_constant_global(self):
        assert predict_blowup_gamma3(preset("constant")).verdict == "global"

    def test_compressive_against_oracle(self, compressive):
        rep = predict_blowup_gamma3(compressive)
        assert rep.verdict == "blowup"
        assert rep.t_star == pytest.approx(TSTAR_ARCTAN_2_01, rel=1e-13)
        assert rep.t_star_interval == (rep.t_star, rep.t_star)
        # the two families are mirror images and tie
        assert rep.family == "both"
        assert rep.per_family[1][1] == pytest.approx(-XSTAR_ARCTAN_2_01, abs=1e-7)
        assert rep.per_family[2][1] == pytest.approx(XSTAR_ARCTAN_2_01, abs=1e-7)

    def test_single_family(self):
        # w2 constant, so only family 1 can blow up
        d = data_from_invariants(lambda x: 2.0 + 0.1 * np.arctan(x),
                                 lambda x: 0.1 / (1 + x**2),
                                 lambda x: np.full_like(x, -2.0), lambda x: np.zeros_like(x), 1.0)
        rep = predict_blowup_gamma3(d)
        assert rep.family == 1
        # w2x vanishes up to rounding in the (sigma, beta) round trip
        assert rep.per_family[2][0] > 1e12

    def test_requires_gamma3(self, compressive):
        with pytest.raises(ParameterError):
            predict_blowup_gamma3(compressive, make_params(2.0))

    def test_inadmissible(self):
        with pytest.raises(GateError):
            predict_blowup_gamma3(preset("constant", {"sigma": 1.0, "beta": 2.0}))


class TestSolveExact:
    def test_constant(self):
        d = preset("constant", {"sigma": 2.0, "beta": 0.5})
        rs = solve_exact_gamma3(d, 7.0, np.linspace(-3, 3, 13))
        np.testing.assert_allclose(rs.w1, 2.5)
        np.testing.assert_allclose(rs.w2, -1.5)

    def test_time_zero(self, p3, compressive):
        x = np.linspace(-3, 3, 13)
        rs = solve_exact_gamma3(compressive, 0.0, x)
        r0 = compressive.riemann(x, p3)
        np.testing.assert_array_equal(rs.w1, r0.w1)

    def test_horizon(self, compressive):
        with pytest.raises(HorizonError) as info:
            solve_exact_gamma3(compressive, 40.0, [0.0])
        assert info.value.t_star == pytest.approx(TSTAR_ARCTAN_2_01)

    @pytest.mark.parametrize("family", [1, 2])
    def test_transport_exactness(self, p3, compressive, family):
        t = 20.0
        x0 = np.linspace(-10, 10, 41)
        r0 = compressive.riemann(x0, p3)
        w0 = r0.w1 if family == 1 else r0.w2
        x = x0 + t / w0
        rs = solve_exact_gamma3(compressive, t, x)
        w = rs.w1 if family == 1 else rs.w2
        np.testing.assert_allclose(w, w0, atol=1e-10)
        np.testing.assert_allclose(foot_points(compressive, family, t, x), x0, atol=1e-10)

    def test_global_preset_against_scalar_characteristics(self, p3, rarefactive):
        # oracle: the foot x0 of the w1 characteristic through (1, 0) solves x0 + 1/w1(0, x0) = 0,
        # found here with a scalar root finder independent of the vectorized bisection
        from scipy.optimize import brentq
        f = lambda a: a + 1.0 / float(rarefactive.riemann(a, p3).w1)
        x0 = brentq(f, -2.0, 0.0, xtol=1e-15)
        rs = solve_exact_gamma3(rarefactive, 1.0, [0.0])
        assert rs.w1[0] == pytest.approx(float(rarefactive.riemann(x0, p3).w1), abs=1e-12)

    def test_global_preset_against_grid(self, p3, rarefactive):
        errs = []
        for n in (400, 800, 1600):
            sol = run(rarefactive, Grid1D.around(rarefactive, n), 1.0, [1.0], p3)
            i = np.argmin(np.abs(sol.x))
            x = sol.x[i]
            ex = solve_exact_gamma3(rarefactive, 1.0, [x])
            errs.append(abs(sol.snapshot(1.0).w1[i] - ex.w1[0]))
        order = np.log2(errs[0] / errs[1]), np.log2(errs[1] / errs[2])
        assert all(0.7 < o < 1.3 for o in order)


class TestAlpha:
    def _single(self, w, a):
        return data_from_invariants(lambda x: w + a * x, lambda x: np.full_like(x, a),
                                    lambda x: np.full_like(x, -w), lambda x: np.zeros_like(x),
                                    1.0, truncation=(-1.0, 1.0), far=(-1.0, 1.0))

    def test_zero_slope_stays_zero(self):
        d = self._single(2.0, 0.0)
        assert alpha_along_characteristic_gamma3(d, 1, 0.0, 123.0) == 0.0

    def test_arithmetic(self):
        assert alpha_along_characteristic_gamma3(self._single(2.0, 0.1), 1, 0.0, 20.0) == pytest.approx(0.2)

    def test_blowup_error(self):
        with pytest.raises(BlowupError) as info:
            alpha_along_characteristic_gamma3(self._single(2.0, 0.1), 1, 0.0, 40.0)
        assert info.value.t_star == pytest.approx(40.0)

    @pytest.mark.parametrize("family", [1, 2])
    def test_reciprocal_keeps_sign_before_blowup(self, p3, compressive, family):
        x0 = np.linspace(-5, 5, 101)
        rep = predict_blowup_gamma3(compressive)
        for t in np.linspace(0, 0.999 * rep.t_star, 7):
            a = alpha_along_characteristic_gamma3(compressive, family, x0, t)
            assert np.all(a > 0)

    @pytest.mark.parametrize("family", [1, 2])
    def test_matches_finite_difference_of_solution(self, p3, compressive, family):
        t = 30.0
        x0 = 0.3
        w0 = compressive.riemann(x0, p3)
        x = x0 + t / (w0.w1 if family == 1 else w0.w2)
        alpha = alpha_along_characteristic_gamma3(compressive, family, x0, t)
        errs = []
        for h in (1e-2, 5e-3, 2.5e-3):
            rs = solve_exact_gamma3(compressive, t, [x - h, x + h])
            w = rs.w1 if family == 1 else rs.w2
            errs.append(abs((w[1] - w[0]) / (2 * h) - alpha))
        # central differences converge at least at first order
        assert errs[2] < errs[1] < errs[0]
        assert np.log2(errs[0] / errs[1]) > 0.9


class TestLipschitz:
    def test_constant(self):
        c = one_sided_lipschitz_certificate_gamma3(preset("constant"), 1.0, np.linspace(-5, 5, 11))
        assert c.passed and c.worst_value == 0.0

    def test_global_preset(self, rarefactive):
        c = one_sided_lipschitz_certificate_gamma3(rarefactive, 1.0, np.linspace(-20, 20, 801))
        assert c.passed
        assert c.constant == pytest.approx((2.0 + np.pi / 2) ** 2)
        assert c.worst_value >= c.bound

    def test_time_zero(self, rarefactive):
        with pytest.raises(ParameterError):
            one_sided_lipschitz_certificate_gamma3(rarefactive, 0.0, [0.0])

    def test_constant_value(self, compressive):
        assert lipschitz_constant_gamma3(compressive) == pytest.approx((2 + 0.05 * np.pi) ** 2)


@pytest.mark.parametrize("family", [1, 2])
def test_crossing_time_agrees_with_prediction(compressive, family):
    t_cross, x0 = first_crossing_time_gamma3(compressive, family)
    assert t_cross == pytest.approx(TSTAR_ARCTAN_2_01, rel=1e-6)
    assert abs(x0) == pytest.approx(XSTAR_ARCTAN_2_01, abs=1e-4)


def test_crossing_time_none_for_rarefactive(rarefactive):
    assert first_crossing_time_gamma3(rarefactive, 1)[0] == np.inf
