"""Characteristic bundles, Riccati blow-up detection and blow-up time bounds for general gamma.

Families are indexed by the invariant they carry: family 1 carries w1 and
moves with ``lambda2 > 0``, family 2 carries w2 and moves with
``lambda1 < 0``. Along a family-j characteristic the weighted slope
``alpha_tilde_j = exp(h_j) * w_jx`` obeys

    d/dt (1 / alpha_tilde_j) = -2 (1 + theta) * I_j(w1, w2),

with ``I_1 = (w1 - w2)**p / ((1+theta) w1 + (1-theta) w2)``,
``I_2 = (w1 - w2)**p / -((1-theta) w1 + (1+theta) w2)`` and
``p = (1 - theta) / (2 theta)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .classification import (RegionBounds, eigenvalue_envelope, require_admissible)
from .errors import IterationError, ParameterError, RegionError
from .initial_data import InitialData
from .state import GammaParams, RiemannState

DEFAULT_SPACING = 0.05
DEFAULT_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 50


def _check_family(family):
    if family not in (1, 2):
        raise ParameterError(f"family must be 1 or 2, got {family!r}")


def integrating_factor(rs: RiemannState, family: int, params: GammaParams):
    """``h_j(w1, w2)`` turning the slope equation of family j into a pure Riccati equation."""
    _check_family(family)
    th = params.theta
    w1 = np.asarray(rs.w1, dtype=float)
    w2 = np.asarray(rs.w2, dtype=float)
    gap = w1 - w2
    if family == 1:
        arg = (1.0 + th) * w1 + (1.0 - th) * w2
    else:
        arg = -((1.0 - th) * w1 + (1.0 + th) * w2)
    if np.any(~(gap > 0.0)) or np.any(~(arg > 0.0)):
        raise RegionError(f"integrating factor h{family}: logarithm argument not positive")
    h = -params.exponent * np.log(gap) - np.log(arg)
    return float(h) if h.ndim == 0 else h


def riccati_integrand(w1, w2, family: int, params: GammaParams):
    th = params.theta
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    gap = w1 - w2
    if family == 1:
        den = (1.0 + th) * w1 + (1.0 - th) * w2
    else:
        den = -((1.0 - th) * w1 + (1.0 + th) * w2)
    if np.any(~(gap > 0.0)) or np.any(~(den > 0.0)):
        raise RegionError(f"Riccati integrand of family {family} left the invariant region")
    return gap ** params.exponent / den


def _speeds(w1, w2, th):
    # lambda1 (moves w2), lambda2 (moves w1)
    return (2.0 / ((1.0 - th) * w1 + (1.0 + th) * w2),
            2.0 / ((1.0 + th) * w1 + (1.0 - th) * w2))


class _Foreign:
    """Piecewise-linear field carried by one family at one time level."""

    def __init__(self, pos, val, left, right):
        if np.all(np.diff(pos) > 0.0):
            self.pos, self.val = pos, val
        else:
            k = np.argsort(pos, kind="stable")
            self.pos, self.val = pos[k], val[k]
        self.left, self.right = left, right

    def __call__(self, x):
        return np.interp(x, self.pos, self.val, left=self.left, right=self.right)


@dataclass
class CharacteristicBundle:
    """Histories of two families of characteristics on a uniform time grid."""

    params: GammaParams
    t: np.ndarray
    feet1: np.ndarray
    feet2: np.ndarray
    w1: np.ndarray  # invariant carried by each family-1 characteristic
    w2: np.ndarray
    X1: np.ndarray  # (nt + 1, n1) positions
    X2: np.ndarray
    farfield: tuple  # ((w1_left, w2_left), (w1_right, w2_right))
    sweeps: int
    residual: float
    t_cross: dict = field(default_factory=dict)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else 0.0

    def _level(self, family, n):
        (l1, l2), (r1, r2) = self.farfield
        if family == 1:
            return _Foreign(self.X1[n], self.w1, l1, r1)
        return _Foreign(self.X2[n], self.w2, l2, r2)

    def field(self, t, x) -> RiemannState:
        """Invariants at time ``t`` (a grid time) and positions ``x``."""
        n = int(round(float(t) / self.dt)) if self.dt > 0 else 0
        if n < 0 or n >= self.t.size or abs(self.t[n] - t) > 1e-9 * max(1.0, abs(t)):
            raise ParameterError(f"t={t!r} is not a time level of the bundle")
        x = np.asarray(x, dtype=float)
        return RiemannState(self._level(1, n)(x), self._level(2, n)(x))

    def trace_values(self, family):
        """Foreign invariant sampled along every characteristic of ``family``."""
        other = 2 if family == 1 else 1
        X = self.X1 if family == 1 else self.X2
        return np.array([self._level(other, n)(X[n]) for n in range(self.t.size)])


def _march_family(family, X0, own, other_hist, other_val, other_lr, t, th):
    """Heun integration of one family given the stored history of the other."""
    nt = t.size - 1
    X = np.empty((nt + 1, X0.size))
    X[0] = X0
    left, right = other_lr
    for n in range(nt):
        dt = t[n + 1] - t[n]
        fa = _Foreign(other_hist[n], other_val, left, right)
        fb = _Foreign(other_hist[n + 1], other_val, left, right)
        if family == 1:
            k1 = _speeds(own, fa(X[n]), th)[1]
            p = X[n] + dt * k1
            k2 = _speeds(own, fb(p), th)[1]
        else:
            k1 = _speeds(fa(X[n]), own, th)[0]
            p = X[n] + dt * k1
            k2 = _speeds(fb(p), own, th)[0]
        X[n + 1] = X[n] + 0.5 * dt * (k1 + k2)
    return X


def _first_cross(X, t):
    bad = np.any(np.diff(X, axis=1) <= 0.0, axis=1)
    idx = np.flatnonzero(bad)
    return float(t[idx[0]]) if idx.size else math.inf


def build_bundle(data: InitialData, params: GammaParams, t_end: float, dt: float = None,
                 spacing: float = DEFAULT_SPACING, tol: float = DEFAULT_TOL,
                 max_sweeps: int = DEFAULT_MAX_SWEEPS, bounds: RegionBounds = None,
                 extent=None) -> CharacteristicBundle:
    """Integrate both characteristic families over ``[0, t_end]``.

    The first iterate marches both families together with Heun's method,
    reading the foreign invariant by linear interpolation. Gauss-Seidel
    sweeps over whole histories then repeat until the foreign values along
    all characteristics change by less than ``tol``.
    """
    if not t_end > 0.0:
        raise ParameterError("t_end must be positive")
    if bounds is None:
        bounds = require_admissible(data, params)
    env = eigenvalue_envelope(bounds, params)
    vmax = env.max_speed
    if dt is None:
        dt = spacing / vmax
    if not dt > 0.0:
        raise ParameterError("dt must be positive")
    nt = max(1, int(math.ceil(t_end / dt - 1e-9)))
    t = np.linspace(0.0, t_end, nt + 1)
    lo, hi = data.truncation if extent is None else extent
    pad = t_end * vmax + 2.0 * spacing
    feet = np.arange(lo - pad, hi + pad + 0.5 * spacing, spacing)
    rs = data.riemann(feet, params)
    w1 = np.asarray(rs.w1, dtype=float)
    w2 = np.asarray(rs.w2, dtype=float)
    ff = data.farfield_riemann(params)
    th = params.theta

    X1 = np.empty((nt + 1, feet.size))
    X2 = np.empty((nt + 1, feet.size))
    X1[0] = feet
    X2[0] = feet
    (l1, l2), (r1, r2) = ff
    for n in range(nt):
        h = t[n + 1] - t[n]
        f1 = _Foreign(X1[n], w1, l1, r1)
        f2 = _Foreign(X2[n], w2, l2, r2)
        k11 = _speeds(w1, f2(X1[n]), th)[1]
        k12 = _speeds(f1(X2[n]), w2, th)[0]
        p1 = X1[n] + h * k11
        p2 = X2[n] + h * k12
        g1 = _Foreign(p1, w1, l1, r1)
        g2 = _Foreign(p2, w2, l2, r2)
        k21 = _speeds(w1, g2(p1), th)[1]
        k22 = _speeds(g1(p2), w2, th)[0]
        X1[n + 1] = X1[n] + 0.5 * h * (k11 + k21)
        X2[n + 1] = X2[n] + 0.5 * h * (k12 + k22)

    bundle = CharacteristicBundle(params, t, feet.copy(), feet.copy(), w1, w2, X1, X2, ff,
                                  sweeps=0, residual=math.inf)
    prev1, prev2 = bundle.trace_values(1), bundle.trace_values(2)
    for sweep in range(1, max_sweeps + 1):
        bundle.X1 = _march_family(1, feet, w1, bundle.X2, w2, (l2, r2), t, th)
        bundle.X2 = _march_family(2, feet, w2, bundle.X1, w1, (l1, r1), t, th)
        cur1, cur2 = bundle.trace_values(1), bundle.trace_values(2)
        res = max(float(np.max(np.abs(cur1 - prev1))), float(np.max(np.abs(cur2 - prev2))))
        prev1, prev2 = cur1, cur2
        bundle.sweeps, bundle.residual = sweep, res
        if res < tol:
            break
    else:
        raise IterationError(f"bundle did not converge in {max_sweeps} sweeps "
                             f"(residual {bundle.residual:.3e})", bundle.residual)
    for name, foreign in (("w1", prev1), ("w2", prev2)):
        if name == "w1":
            d2 = (1.0 + th) * w1 + (1.0 - th) * foreign
            d1 = (1.0 - th) * w1 + (1.0 + th) * foreign
        else:
            d2 = (1.0 + th) * foreign + (1.0 - th) * w2
            d1 = (1.0 - th) * foreign + (1.0 + th) * w2
        if np.any(~(d2 > 0.0)) or np.any(~(d1 < 0.0)):
            raise RegionError("characteristic speeds changed sign inside the bundle")
    bundle.t_cross = {1: _first_cross(bundle.X1, t), 2: _first_cross(bundle.X2, t)}
    return bundle


@dataclass(frozen=True)
class CharacteristicTrace:
    family: int
    x0: float
    t: np.ndarray
    x: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    status: str  # "alive" | "blown_up" | "horizon_reached"

    @property
    def speed_index(self) -> int:
        return 3 - self.family


def trace_characteristic(data: InitialData, family: int, x0: float, t_end: float,
                         dt: float = None, params: GammaParams = None,
                         bundle: CharacteristicBundle = None, **bundle_kw) -> CharacteristicTrace:
    """Follow the family-``family`` characteristic from ``x0`` up to ``t_end``.

    The carried invariant is held fixed; the foreign one is read from a
    converged characteristic bundle (built here unless one is passed in).
    """
    _check_family(family)
    if params is None:
        params = bundle.params if bundle is not None else None
    if params is None:
        raise ParameterError("params are required")
    if bundle is None:
        bundle = build_bundle(data, params, t_end, dt=dt, **bundle_kw)
    t = bundle.t[bundle.t <= t_end * (1 + 1e-12)]
    th = params.theta
    rs = data.riemann(float(x0), params)
    own = float(rs.w1 if family == 1 else rs.w2)
    other = 2 if family == 1 else 1
    x = np.empty(t.size)
    foreign = np.empty(t.size)
    x[0] = x0
    for n in range(t.size):
        fa = bundle._level(other, n)
        foreign[n] = fa(x[n])
        if n == t.size - 1:
            break
        h = t[n + 1] - t[n]
        fb = bundle._level(other, n + 1)
        if family == 1:
            k1 = _speeds(own, foreign[n], th)[1]
            k2 = _speeds(own, fb(x[n] + h * k1), th)[1]
        else:
            k1 = _speeds(foreign[n], own, th)[0]
            k2 = _speeds(fb(x[n] + h * k1), own, th)[0]
        x[n + 1] = x[n] + 0.5 * h * (k1 + k2)
    if family == 1:
        w1, w2 = np.full(t.size, own), foreign
    else:
        w1, w2 = foreign, np.full(t.size, own)
    riccati_integrand(w1, w2, family, params)  # region check
    status = "blown_up" if bundle.t_cross.get(family, math.inf) <= t[-1] else "horizon_reached"
    return CharacteristicTrace(family, float(x0), t, x, w1, w2, status)


@dataclass(frozen=True)
class RiccatiState:
    alpha_tilde: float
    h: float


@dataclass(frozen=True)
class RiccatiResult:
    blowup_time: float  # inf when the reciprocal never reaches zero on the trace
    alpha_tilde0: float
    t_final: float
    alpha_final: float
    state: RiccatiState
    t: np.ndarray = field(repr=False)
    reciprocal: np.ndarray = field(repr=False)


def integrate_riccati(trace: CharacteristicTrace, alpha0: float, params: GammaParams,
                      dt: float = 1e-4) -> RiccatiResult:
    """Integrate ``1/alpha_tilde`` along a trace and locate its zero crossing.

    ``alpha0`` is the raw initial slope ``w_jx(0, x0)``. The foreign invariant
    is interpolated linearly in time between trace nodes and the integral is
    accumulated with the trapezoidal rule on a step of ``dt``. A crossing is
    located by linear interpolation of the reciprocal.
    """
    if not math.isfinite(alpha0):
        raise ParameterError("alpha0 must be finite")
    fam = trace.family
    t_end = float(trace.t[-1])
    n = max(1, int(math.ceil(t_end / dt - 1e-9)))
    s = np.linspace(0.0, t_end, n + 1)
    w1 = np.interp(s, trace.t, trace.w1)
    w2 = np.interp(s, trace.t, trace.w2)
    integrand = riccati_integrand(w1, w2, fam, params)
    h = integrating_factor(RiemannState(w1, w2), fam, params)
    a_t0 = math.exp(h[0]) * alpha0
    c = 2.0 * (1.0 + params.theta)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(s))))
    if a_t0 == 0.0:
        recip = np.full_like(s, np.inf)
        return RiccatiResult(math.inf, 0.0, t_end, 0.0, RiccatiState(0.0, float(h[-1])), s, recip)
    recip = 1.0 / a_t0 - c * cum
    blow = math.inf
    if a_t0 > 0.0:
        k = np.flatnonzero(recip <= 0.0)
        if k.size:
            k = int(k[0])
            r0, r1 = recip[k - 1], recip[k]
            blow = float(s[k - 1] + (s[k] - s[k - 1]) * r0 / (r0 - r1))
    r_end = recip[-1]
    alpha_t = 1.0 / r_end if r_end != 0.0 else math.inf
    alpha_end = math.exp(-h[-1]) * alpha_t if math.isinf(blow) else math.inf
    return RiccatiResult(blow, a_t0, t_end, alpha_end, RiccatiState(alpha_t, float(h[-1])), s, recip)


@dataclass(frozen=True)
class BlowupInterval:
    t_lo: float
    t_hi: float
    family: int
    x0: float
    alpha_tilde0: float
    t_lo_local: float = math.nan
    t_hi_local: float = math.nan
    alt_reading: dict = None

    def as_dict(self) -> dict:
        return {"t_lo": self.t_lo, "t_hi": self.t_hi, "family": self.family, "x0": self.x0,
                "alpha_tilde0": self.alpha_tilde0, "t_lo_local": self.t_lo_local,
                "t_hi_local": self.t_hi_local, "alt_reading": self.alt_reading}


def _interval_arrays(family, w1, w2, a_t0, b: RegionBounds, th):
    """Displayed (global) and characteristic-local bounds for arrays of feet."""
    p = (1.0 - th) / (2.0 * th)
    c = 2.0 * (1.0 + th)
    q_lo = (b.m1 - b.M2) ** p
    q_hi = (b.M1 - b.m2) ** p
    if family == 1:
        den_lo = (1.0 + th) * b.m1 - (th * b.M2 - b.m2)
        den_hi = (1.0 + th) * b.M1 + b.M2 - th * b.m2
        loc_den_lo = (1.0 + th) * w1 + (1.0 - th) * b.m2
        loc_den_hi = (1.0 + th) * w1 + (1.0 - th) * b.M2
        loc_q_lo = (w1 - b.M2) ** p
        loc_q_hi = (w1 - b.m2) ** p
    else:
        den_lo = -(b.M1 - th * b.m1 + (1.0 + th) * b.M2)
        den_hi = -(b.m1 - th * b.M1 + (1.0 + th) * b.m2)
        loc_den_lo = -(1.0 - th) * b.M1 - (1.0 + th) * w2
        loc_den_hi = -(1.0 - th) * b.m1 - (1.0 + th) * w2
        loc_q_lo = (b.m1 - w2) ** p
        loc_q_hi = (b.M1 - w2) ** p
    t_lo = np.maximum(den_lo, 0.0) / (c * a_t0 * q_hi)
    t_hi = den_hi / (c * a_t0 * q_lo)
    t_lo_loc = loc_den_lo / (c * a_t0 * loc_q_hi)
    t_hi_loc = loc_den_hi / (c * a_t0 * loc_q_lo)
    return t_lo, t_hi, t_lo_loc, t_hi_loc


def blowup_bounds_general(data: InitialData, params: GammaParams, n=None) -> list:
    """Blow-up time interval for every sampled foot with a positive initial slope.

    ``t_lo``/``t_hi`` use the global bounds m_j, M_j on both invariants.
    ``t_lo_local``/``t_hi_local`` additionally use that the carried invariant
    is exactly constant along its own characteristic; they nest inside the
    global interval and collapse to ``w_j**2 / w_jx`` when gamma = 3.
    For family 2, ``alt_reading`` holds the interval obtained with the
    family-1 weighted slope at the same foot, when it is positive.
    An empty list means the data is rarefactive everywhere.
    """
    bounds = require_admissible(data, params, n)
    th = params.theta
    x = data.grid(n)
    rs = data.riemann(x, params)
    w1 = np.asarray(rs.w1, dtype=float)
    w2 = np.asarray(rs.w2, dtype=float)
    w1x, w2x = data.riemann_derivatives(x, params)
    e1 = np.exp(integrating_factor(rs, 1, params))
    e2 = np.exp(integrating_factor(rs, 2, params))
    out = []
    for fam, slope, ef in ((1, w1x, e1), (2, w2x, e2)):
        pos = np.flatnonzero(slope > 0.0)
        if pos.size == 0:
            continue
        at0 = ef[pos] * slope[pos]
        lo, hi, llo, lhi = _interval_arrays(fam, w1[pos], w2[pos], at0, bounds, th)
        alt = [None] * pos.size
        if fam == 2:
            at1 = e1[pos] * w1x[pos]
            ok = at1 > 0.0
            with np.errstate(divide="ignore"):
                alo, ahi, _, _ = _interval_arrays(2, w1[pos], w2[pos], np.where(ok, at1, 1.0), bounds, th)
            for k in np.flatnonzero(ok & (at1 != at0)):
                alt[k] = {"alpha_tilde0": float(at1[k]), "t_lo": float(alo[k]), "t_hi": float(ahi[k])}
        for k, i in enumerate(pos):
            out.append(BlowupInterval(float(lo[k]), float(hi[k]), fam, float(x[i]), float(at0[k]),
                                      float(llo[k]), float(lhi[k]), alt[k]))
    return out


def blowup_envelope(intervals) -> dict:
    """Bracket on the first blow-up time: ``(min t_lo, min t_hi)`` for both interval kinds."""
    if not intervals:
        return {"verdict": "global", "t_lo": math.inf, "t_hi": math.inf,
                "t_lo_local": math.inf, "t_hi_local": math.inf, "family": None, "x0": math.nan}
    best = min(intervals, key=lambda iv: iv.t_hi_local)
    return {"verdict": "blowup",
            "t_lo": min(iv.t_lo for iv in intervals),
            "t_hi": min(iv.t_hi for iv in intervals),
            "t_lo_local": min(iv.t_lo_local for iv in intervals),
            "t_hi_local": best.t_hi_local,
            "family": best.family, "x0": best.x0,
            "n_intervals": len(intervals)}


def lipschitz_constants_general(bounds: RegionBounds, params: GammaParams):
    """Constants ``(C1, C2)`` with ``w_jx(t, .) >= -C_j / t`` before blow-up."""
    b = bounds
    th = params.theta
    p = params.exponent
    q_ratio = ((b.M1 - b.m2) / (b.m1 - b.M2)) ** p
    c = 2.0 * (1.0 + th)
    d2_hi = (1.0 + th) * b.M1 + b.M2 - th * b.m2
    n1_hi = -(b.m1 - th * b.M1 + (1.0 + th) * b.m2)
    return q_ratio * d2_hi**2 / c, q_ratio * n1_hi**2 / c


def slopes_along_bundle(data: InitialData, bundle: CharacteristicBundle, family: int, n_level: int):
    """``w_jx`` at time level ``n_level`` along every family-j bundle characteristic."""
    params = bundle.params
    own = bundle.w1 if family == 1 else bundle.w2
    foreign = bundle.trace_values(family)[: n_level + 1]
    if family == 1:
        W1, W2 = np.broadcast_to(own, foreign.shape), foreign
    else:
        W1, W2 = foreign, np.broadcast_to(own, foreign.shape)
    feet = bundle.feet1 if family == 1 else bundle.feet2
    w1x, w2x = data.riemann_derivatives(feet, params)
    a0 = w1x if family == 1 else w2x
    h = integrating_factor(RiemannState(W1, W2), family, params)
    integrand = riccati_integrand(W1, W2, family, params)
    dt = np.diff(bundle.t[: n_level + 1])[:, None]
    total = np.sum(0.5 * (integrand[1:] + integrand[:-1]) * dt, axis=0)
    at0 = np.exp(h[0]) * a0
    c = 2.0 * (1.0 + params.theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        at = at0 / (1.0 - c * at0 * total)
    at = np.where(at0 == 0.0, 0.0, at)
    return np.exp(-h[-1]) * at, bundle.X1[n_level] if family == 1 else bundle.X2[n_level]


@dataclass(frozen=True)
class GeneralLipschitzCertificate:
    passed: bool
    t: float
    constants: tuple
    worst_value: float
    worst_bound: float
    worst_x: float
    worst_family: int
    n_traces: int

    def as_dict(self) -> dict:
        return {"passed": self.passed, "t": self.t, "constants": list(self.constants),
                "worst_value": self.worst_value, "worst_bound": self.worst_bound,
                "worst_x": self.worst_x, "worst_family": self.worst_family,
                "n_traces": self.n_traces}


def one_sided_lipschitz_certificate_general(data: InitialData, t: float, params: GammaParams,
                                            bundle: CharacteristicBundle = None,
                                            window=None, **bundle_kw) -> GeneralLipschitzCertificate:
    """Check ``w_jx(t, .) >= -C_j / t`` along a bundle of characteristics.

    Only characteristics that are inside ``window`` (default: the truncation
    interval) at time ``t`` are examined.
    """
    t = float(t)
    if not t > 0.0:
        raise ParameterError("one-sided Lipschitz bound needs t > 0 (it degenerates at t = 0)")
    bounds = require_admissible(data, params)
    if bundle is None:
        bundle = build_bundle(data, params, t, bounds=bounds, **bundle_kw)
    n_level = int(round(t / bundle.dt))
    if abs(bundle.t[n_level] - t) > 1e-9 * max(1.0, t):
        raise ParameterError(f"t={t!r} is not a time level of the bundle")
    C = lipschitz_constants_general(bounds, params)
    lo, hi = data.truncation if window is None else window
    worst = (math.inf, math.nan, math.nan, 0)
    count = 0
    passed = True
    for fam in (1, 2):
        slope, pos = slopes_along_bundle(data, bundle, fam, n_level)
        inside = (pos >= lo) & (pos <= hi)
        count += int(np.sum(inside))
        if not np.any(inside):
            continue
        bound = -C[fam - 1] / t
        margin = slope[inside] - bound
        i = int(np.argmin(margin))
        if not np.all(margin >= 0.0):
            passed = False
        if margin[i] < worst[0]:
            worst = (float(margin[i]), float(slope[inside][i]), float(pos[inside][i]), fam)
    fam = worst[3]
    return GeneralLipschitzCertificate(passed=passed, t=t, constants=C, worst_value=worst[1],
                                       worst_bound=-C[fam - 1] / t if fam else math.nan,
                                       worst_x=worst[2], worst_family=fam, n_traces=count)
