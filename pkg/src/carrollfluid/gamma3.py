"""Exact solution, blow-up time and one-sided Lipschitz bounds for gamma = 3.

For gamma = 3 the invariants decouple: ``d_t w_j + (1/w_j) d_x w_j = 0``.
Every characteristic is a straight line ``x = x0 + t / w_j(0, x0)`` carrying
its initial value, and the slope ``alpha_j = d_x w_j`` along it satisfies

    1/alpha_j(t) = 1/alpha_j(0) - t / w_j(0, x0)**2,

so a positive initial slope blows up at ``t* = w_j**2 / w_jx``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .classification import RegionBounds, require_admissible
from .errors import BlowupError, BracketError, HorizonError, ParameterError
from .initial_data import InitialData
from .state import GammaParams, RiemannState, make_params

TIE_RTOL = 1e-9
_P3 = make_params(3.0)


def _params3(params):
    if params is None:
        return _P3
    if not params.is_gamma3:
        raise ParameterError(f"exact solver requires gamma = 3, got gamma = {params.gamma}")
    return params


def _check_family(family):
    if family not in (1, 2):
        raise ParameterError(f"family must be 1 or 2, got {family!r}")


def _invariant(data, family, x):
    rs = data.riemann(x, _P3)
    return np.asarray(rs.w1 if family == 1 else rs.w2, dtype=float)


def _slope(data, family, x):
    w1x, w2x = data.riemann_derivatives(x, _P3)
    return np.asarray(w1x if family == 1 else w2x, dtype=float)


@dataclass(frozen=True)
class BlowupReport:
    verdict: str  # "global" | "blowup"
    t_star: float
    t_star_interval: tuple
    family: object  # 1, 2, "both" or None
    location_x0: float
    per_family: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "t_star": self.t_star,
                "t_star_interval": list(self.t_star_interval), "family": self.family,
                "location_x0": self.location_x0,
                "per_family": {str(k): {"t_star": v[0], "x0": v[1]} for k, v in self.per_family.items()}}


def _family_blowup(data, family, x):
    w = _invariant(data, family, x)
    a = _slope(data, family, x)
    pos = a > 0.0
    if not np.any(pos):
        return math.inf, math.nan
    ratio = np.full_like(w, np.inf)
    ratio[pos] = w[pos] ** 2 / a[pos]
    i = int(np.argmin(ratio))
    best_t, best_x = float(ratio[i]), float(x[i])

    def objective(xx):
        aa = float(_slope(data, family, xx))
        if not aa > 0.0:
            return 1e300
        return float(_invariant(data, family, xx)) ** 2 / aa

    lo = x[max(i - 1, 0)]
    hi = x[min(i + 1, x.size - 1)]
    if hi > lo:
        res = minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, abs(best_x))})
        if res.fun < best_t:
            best_t, best_x = float(res.fun), float(res.x)
    return best_t, best_x


def predict_blowup_gamma3(data: InitialData, params: GammaParams = None, n=None) -> BlowupReport:
    """First time at which the gamma = 3 solution stops being C^1.

    The infimum of ``w_j**2 / w_jx`` is taken over points with ``w_jx > 0``
    for both families. The data must pass the admissibility gate.
    """
    _params3(params)
    require_admissible(data, _P3, n)
    x = data.grid(n)
    per = {j: _family_blowup(data, j, x) for j in (1, 2)}
    t1, t2 = per[1][0], per[2][0]
    if math.isinf(t1) and math.isinf(t2):
        return BlowupReport("global", math.inf, (math.inf, math.inf), None, math.nan, per)
    t = min(t1, t2)
    if abs(t1 - t2) <= TIE_RTOL * t:
        fam = "both"
        loc = per[1][1]
    else:
        fam = 1 if t1 < t2 else 2
        loc = per[fam][1]
    return BlowupReport("blowup", t, (t, t), fam, loc, per)


def _speed_range(bounds: RegionBounds, family):
    if family == 1:
        return 1.0 / bounds.M1, 1.0 / bounds.m1
    return 1.0 / bounds.M2, 1.0 / bounds.m2


def foot_points(data: InitialData, family: int, t: float, x, bounds: RegionBounds = None,
                max_iter: int = 200):
    """Solve ``x = x0 + t / w_j(0, x0)`` for ``x0`` by vectorized bisection."""
    _check_family(family)
    x = np.asarray(x, dtype=float)
    if t == 0.0:
        return x.copy()
    if bounds is None:
        bounds = require_admissible(data, _P3)
    cmin, cmax = _speed_range(bounds, family)
    pad = 1e-12 * (1.0 + np.abs(x) + t * max(abs(cmin), abs(cmax)))  # keeps degenerate (constant-speed) brackets valid
    lo = x - t * cmax - pad
    hi = x - t * cmin + pad

    def resid(x0):
        return x0 + t / _invariant(data, family, x0) - x

    flo, fhi = resid(lo), resid(hi)
    bad = (flo > 0.0) | (fhi < 0.0)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise BracketError(f"cannot bracket foot point of family {family} at x={x.flat[i]!r}, t={t!r}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = resid(mid)
        left = fm <= 0.0
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
            break
    return 0.5 * (lo + hi)


def solve_exact_gamma3(data: InitialData, t: float, x_query, report: BlowupReport = None,
                       check_horizon: bool = True) -> RiemannState:
    """Evaluate ``(w1, w2)(t, x)`` for gamma = 3 by inverting the characteristic maps."""
    t = float(t)
    if t < 0.0:
        raise ParameterError("t must be non-negative")
    x = np.asarray(x_query, dtype=float)
    bounds = require_admissible(data, _P3)
    if check_horizon:
        if report is None:
            report = predict_blowup_gamma3(data)
        if t >= report.t_star:
            raise HorizonError(f"t={t!r} is at or beyond the blow-up time {report.t_star!r}",
                               report.t_star)
    if t == 0.0:
        rs = data.riemann(x, _P3)
        return RiemannState(np.asarray(rs.w1), np.asarray(rs.w2))
    x01 = foot_points(data, 1, t, x, bounds)
    x02 = foot_points(data, 2, t, x, bounds)
    return RiemannState(_invariant(data, 1, x01), _invariant(data, 2, x02))


def alpha_along_characteristic_gamma3(data: InitialData, family: int, x0, t):
    """Slope ``w_jx`` at time ``t`` along the characteristic from ``x0``.

    Raises BlowupError (carrying the earliest ``t* = w**2 / w_x``) when ``t``
    is at or past the blow-up time of any requested characteristic.
    """
    _check_family(family)
    x0 = np.asarray(x0, dtype=float)
    w = _invariant(data, family, x0)
    a0 = _slope(data, family, x0)
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        t_star = np.where(a0 > 0.0, w**2 / np.where(a0 > 0.0, a0, 1.0), np.inf)
    hit = (a0 > 0.0) & (t >= t_star)
    if np.any(hit):
        ts = float(np.min(np.broadcast_to(t_star, hit.shape)[hit]))
        raise BlowupError(f"slope of family {family} blows up at t*={ts!r}", ts)
    alpha = a0 / (1.0 - t * a0 / w**2)
    return float(alpha) if alpha.ndim == 0 else alpha


@dataclass(frozen=True)
class LipschitzCertificate:
    passed: bool
    t: float
    constant: float
    bound: float
    worst_value: float
    worst_x: float
    worst_family: int
    n_samples: int
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("passed", "t", "constant", "bound", "worst_value",
                                            "worst_x", "worst_family", "n_samples")}
        d.update(self.detail)
        return d


def lipschitz_constant_gamma3(data: InitialData, n=None) -> float:
    """``sup (sigma0 + |beta0|)**2`` over samples and the far field."""
    x = data.grid(n)
    vals = np.asarray(data.sigma0(x)) + np.abs(np.asarray(data.beta0(x)))
    ff = [s + abs(b) for s, b in data.farfield]
    return float(max(np.max(vals), *ff)) ** 2


def one_sided_lipschitz_certificate_gamma3(data: InitialData, t: float, samples,
                                           report: BlowupReport = None) -> LipschitzCertificate:
    """Check ``inf (beta +- sigma)_x(t, .) >= -sup(sigma0 + |beta0|)**2 / t`` at ``samples``."""
    t = float(t)
    if not t > 0.0:
        raise ParameterError("one-sided Lipschitz bound needs t > 0 (it degenerates at t = 0)")
    if report is None:
        report = predict_blowup_gamma3(data)
    if t >= report.t_star:
        raise HorizonError(f"t={t!r} is not before the blow-up time {report.t_star!r}", report.t_star)
    bounds = require_admissible(data, _P3)
    x = np.atleast_1d(np.asarray(samples, dtype=float))
    C = lipschitz_constant_gamma3(data)
    bound = -C / t
    worst = (math.inf, math.nan, 0)
    for fam in (1, 2):
        x0 = foot_points(data, fam, t, x, bounds)
        alpha = np.atleast_1d(alpha_along_characteristic_gamma3(data, fam, x0, t))
        i = int(np.argmin(alpha))
        if alpha[i] < worst[0]:
            worst = (float(alpha[i]), float(x[i]), fam)
    return LipschitzCertificate(passed=worst[0] >= bound, t=t, constant=C, bound=bound,
                                worst_value=worst[0], worst_x=worst[1], worst_family=worst[2],
                                n_samples=int(x.size))


def first_crossing_time_gamma3(data: InitialData, family: int, dx_coarse: float = 1e-2,
                               dx_fine: float = 1e-5, candidates: int = 5) -> tuple:
    """First time two sampled straight characteristics of one family meet.

    Uses only the invariant values (no slopes): for adjacent feet ``a < b`` the
    lines meet at ``(b - a) / (c(a) - c(b))`` with ``c = 1 / w_j(0, .)``. Past
    that time the foot-point map is no longer monotone and inversion loses its
    bracket. A coarse scan picks candidate windows that are then resampled
    at ``dx_fine``. Returns ``(t_cross, x0)``; ``(inf, nan)`` if none cross.
    """
    _check_family(family)

    def scan(x):
        c = 1.0 / _invariant(data, family, x)
        dc = c[:-1] - c[1:]
        with np.errstate(divide="ignore"):
            tp = np.where(dc > 0.0, np.diff(x) / np.where(dc > 0.0, dc, 1.0), np.inf)
        return tp

    lo, hi = data.truncation
    xc = np.linspace(lo, hi, int(round((hi - lo) / dx_coarse)) + 1)
    tp = scan(xc)
    if not np.any(np.isfinite(tp)):
        return math.inf, math.nan
    order = np.argsort(tp)[:candidates]
    best = (math.inf, math.nan)
    for i in order:
        if not np.isfinite(tp[i]):
            continue
        a = xc[max(i - 2, 0)]
        b = xc[min(i + 3, xc.size - 1)]
        xf = np.linspace(a, b, int(round((b - a) / dx_fine)) + 1)
        tf = scan(xf)
        k = int(np.argmin(tf))
        if tf[k] < best[0]:
            best = (float(tf[k]), float(0.5 * (xf[k] + xf[k + 1])))
    return best
