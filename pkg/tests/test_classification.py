import numpy as np
import pytest
from hypothesis import given, strategies as st

from carrollfluid import (ClassificationError, GateError, RegionBounds, admissibility_gate,
                          certify_runtime_region, classification_summary, classify_point,
                          eigenvalue_envelope, make_params, predict_blowup_gamma3, preset,
                          region_bounds, solve_exact_gamma3)
from carrollfluid.initial_data import derivative_field

REMARK = RegionBounds(m1=1.0, M1=1.5, m2=-1.5, M2=-1.0)


class TestClassifyPoint:
    def test_zero_is_rarefactive(self):
        c = classify_point(0.0, 0.0)
        assert c.fr and c.br and not c.fc and not c.bc and c.rarefactive

    @pytest.mark.parametrize("l1x, l2x, expected", [
        (-1.0, 1.0, dict(bc=True, fr=True, br=False, fc=False)),
        (1.0, -1.0, dict(br=True, fc=True, bc=False, fr=False)),
    ])
    def test_sign_reading(self, l1x, l2x, expected):
        c = classify_point(l1x, l2x)
        for k, v in expected.items():
            assert getattr(c, k) is v

    @pytest.mark.parametrize("bad", [float("nan"), float("inf")])
    def test_non_finite(self, bad):
        with pytest.raises(ClassificationError):
            classify_point(bad, 0.0)

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6), st.floats(1e-6, 1e6))
    def test_scale_invariance(self, a, b, k):
        c = classify_point(a, b)
        assert c == classify_point(k * a, k * b)
        assert c.fr != c.fc and c.br != c.bc


def test_classification_summary_fractions(p3, compressive):
    s = classification_summary(compressive, p3)
    # both invariants increase, so both eigenvalues decrease: compressive everywhere
    assert s["FC"] == 1.0 and s["BC"] == 1.0 and s["FR"] == 0.0


class TestRegionBounds:
    def test_constant(self, p3):
        b = region_bounds(preset("constant", {"sigma": 1.0, "beta": 0.0}), p3)
        assert (b.m1, b.M1, b.m2, b.M2) == (1.0, 1.0, -1.0, -1.0)

    def test_arctan_matches_dense_scan(self, p3, compressive):
        b = region_bounds(compressive, p3)
        # oracle: the far-field limits 2 +- 0.05 pi and -2 +- 0.05 pi
        assert b.m1 == pytest.approx(2 - 0.05 * np.pi, abs=1e-14)
        assert b.M1 == pytest.approx(2 + 0.05 * np.pi, abs=1e-14)
        assert b.m2 == pytest.approx(-2 - 0.05 * np.pi, abs=1e-14)
        assert b.M2 == pytest.approx(-2 + 0.05 * np.pi, abs=1e-14)
        x = np.arange(-20.0, 20.0 + 5e-5, 1e-4)
        rs = compressive.riemann(x, p3)
        assert b.m1 <= rs.w1.min() and rs.w1.max() <= b.M1
        assert b.m2 <= rs.w2.min() and rs.w2.max() <= b.M2


class TestGate:
    def test_remark_values(self):
        v = admissibility_gate(REMARK, make_params(2.0))
        assert v.admissible
        assert v.values["slow_speed_bound"] == pytest.approx(-0.5)
        assert v.values["fast_speed_bound"] == pytest.approx(0.5)

    def test_gamma3_sign_only(self, p3):
        v = admissibility_gate(RegionBounds(1.0, 1.0, -1.0, -1.0), p3)
        assert v.admissible and "slow_speed_bound" not in v.values

    def test_negative_inf_w1(self, p3):
        v = admissibility_gate(RegionBounds(-0.1, 1.0, -1.0, -0.5), p3)
        assert not v.admissible
        assert any(r.startswith("inf w₁ ≤ 0") for r in v.reasons)

    def test_all_violations_listed(self):
        v = admissibility_gate(RegionBounds(-0.1, 5.0, -1.0, 0.2), make_params(2.0))
        assert len(v.reasons) == 4

    def test_second_condition_ignored_exactly_at_gamma3(self):
        # box that satisfies the sign condition but not the additional one
        b = RegionBounds(m1=0.1, M1=3.0, m2=-3.0, M2=-0.1)
        assert admissibility_gate(b, make_params(3.0)).admissible
        for g in (1.5, 2.0, 2.9, 2.999):
            assert not admissibility_gate(b, make_params(g)).admissible


class TestEnvelope:
    def test_remark(self):
        e = eigenvalue_envelope(REMARK, make_params(2.0))
        # oracle: the two displayed formulas evaluated by hand
        assert e.beta_minus_hi == pytest.approx(0.5 * ((1.5 - 0.5) + 1.5 * -1.0))
        assert e.beta_minus_hi == pytest.approx(-0.25)
        assert e.beta_plus_lo == pytest.approx(0.25)

    def test_constant_gamma3(self, p3):
        e = eigenvalue_envelope(RegionBounds(1.0, 1.0, -1.0, -1.0), p3)
        assert (e.beta_minus_lo, e.beta_minus_hi, e.beta_plus_lo, e.beta_plus_hi) == (-1, -1, 1, 1)

    def test_inadmissible(self):
        with pytest.raises(GateError):
            eigenvalue_envelope(RegionBounds(0.1, 3.0, -3.0, -0.1), make_params(2.0))

    @pytest.mark.parametrize("gamma", [1.5, 2.0, 2.5, 3.0])
    @pytest.mark.parametrize("name, params", [
        ("arctan-compressive", {"sigma": 2.0, "eps": 0.1}),
        ("gaussian-bump", {"sigma": 2.0, "a": 0.1, "s": 1.0}),
        ("remark-family", {"m": 1.0, "theta": 0.5}),
    ])
    def test_soundness_on_dense_samples(self, gamma, name, params):
        p = make_params(gamma)
        d = preset(name, params, n_samples=20001)
        b = region_bounds(d, p)
        if not admissibility_gate(b, p).admissible:
            pytest.skip("preset not admissible at this gamma")
        e = eigenvalue_envelope(b, p)
        x = d.grid()
        s = d.sigma0(x) ** p.theta
        beta = d.beta0(x)
        tol = 1e-13
        assert np.all(beta - s >= e.beta_minus_lo - tol) and np.all(beta - s <= e.beta_minus_hi + tol)
        assert np.all(beta + s >= e.beta_plus_lo - tol) and np.all(beta + s <= e.beta_plus_hi + tol)


class TestCertify:
    def test_constant_snapshot(self, p2):
        b = RegionBounds(1.0, 1.0, -1.0, -1.0)
        c = certify_runtime_region(np.ones(10), -np.ones(10), b, p2)
        assert c.passed and c.max_excess == 0.0

    @pytest.mark.parametrize("frac", [0.1, 0.5, 0.9])
    def test_exact_snapshots(self, p3, compressive, frac):
        rep = predict_blowup_gamma3(compressive)
        b = region_bounds(compressive, p3)
        t = 0.1 if frac == 0.1 else frac * rep.t_star
        x = np.linspace(-20, 20, 2001)
        rs = solve_exact_gamma3(compressive, t, x, report=rep)
        assert certify_runtime_region(rs.w1, rs.w2, b, p3, x=x).passed

    def test_injected_fault(self, p3, compressive):
        b = region_bounds(compressive, p3)
        x = np.linspace(-5, 5, 101)
        rs = compressive.riemann(x, p3)
        w1 = rs.w1.copy()
        w1[37] = b.M1 + 1.0
        c = certify_runtime_region(w1, rs.w2, b, p3, x=x)
        assert not c.passed
        assert c.violations[0].index == 37 and c.violations[0].field == "w1>M1"
        assert c.violations[0].excess == pytest.approx(1.0)
        assert c.violations[0].x == pytest.approx(x[37])

    def test_cone_violation(self, p3):
        b = RegionBounds(0.0, 10.0, -10.0, 0.0)
        c = certify_runtime_region(np.array([2.0]), np.array([1.0]), b, p3)
        assert not c.passed and any(v.field == "cone" for v in c.violations)
