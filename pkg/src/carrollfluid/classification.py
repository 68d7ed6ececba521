"""Compression/rarefaction classification and the invariant-region gate."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ClassificationError, GateError
from .initial_data import InitialData
from .state import GammaParams, eigenvalue_derivatives_riemann

DEFAULT_TOL_REGION = 1e-9


@dataclass(frozen=True)
class PointClass:
    fr: bool
    br: bool
    fc: bool
    bc: bool

    @property
    def compressive(self) -> bool:
        return self.fc or self.bc

    @property
    def rarefactive(self) -> bool:
        return self.fr or self.br


def classify_point(lambda1_x: float, lambda2_x: float) -> PointClass:
    """Classify a point from the spatial derivatives of the two eigenvalues.

    A zero derivative counts as rarefactive.
    """
    l1 = float(lambda1_x)
    l2 = float(lambda2_x)
    if not (math.isfinite(l1) and math.isfinite(l2)):
        raise ClassificationError(f"non-finite eigenvalue derivative ({l1}, {l2})")
    return PointClass(fr=l2 >= 0.0, br=l1 >= 0.0, fc=l2 < 0.0, bc=l1 < 0.0)


def eigenvalue_slopes(w1, w2, w1x, w2x, params: GammaParams):
    """Chain rule for ``(lambda1_x, lambda2_x)`` given invariants and their slopes."""
    l1w1, l1w2, l2w1, l2w2 = eigenvalue_derivatives_riemann(w1, w2, params)
    return l1w1 * w1x + l1w2 * w2x, l2w1 * w1x + l2w2 * w2x


def classification_summary(data: InitialData, params: GammaParams, n=None) -> dict:
    """Fractions of FR/BR/FC/BC points of the initial data on its sample grid."""
    x = data.grid(n)
    rs = data.riemann(x, params)
    w1x, w2x = data.riemann_derivatives(x, params)
    l1x, l2x = eigenvalue_slopes(rs.w1, rs.w2, w1x, w2x, params)
    if not (np.all(np.isfinite(l1x)) and np.all(np.isfinite(l2x))):
        raise ClassificationError("non-finite eigenvalue derivative in initial data")
    count = float(x.size)
    return {
        "n_samples": int(x.size),
        "FR": float(np.sum(l2x >= 0.0)) / count,
        "BR": float(np.sum(l1x >= 0.0)) / count,
        "FC": float(np.sum(l2x < 0.0)) / count,
        "BC": float(np.sum(l1x < 0.0)) / count,
    }


@dataclass(frozen=True)
class RegionBounds:
    m1: float
    M1: float
    m2: float
    M2: float


def _polished_min(fun, x, values):
    """Sampled minimum of ``fun``, refined between the neighbours of the best sample."""
    i = int(np.argmin(values))
    best = float(values[i])
    if 0 < i < x.size - 1:
        res = minimize_scalar(lambda t: float(fun(t)), bounds=(x[i - 1], x[i + 1]), method="bounded",
                              options={"xatol": 1e-14 * max(1.0, abs(float(x[i])))})
        best = min(best, float(res.fun))
    return best


def region_bounds(data: InitialData, params: GammaParams, n=None) -> RegionBounds:
    """inf/sup of w1(0,.) and w2(0,.) over the sample grid and the far field.

    Interior sampled extrema are polished by a bounded scalar search, so the
    box holds the exact initial range rather than its sampled approximation.
    """
    x = data.grid(n)
    if x.size == 0:
        raise ClassificationError("empty sample set")
    rs = data.riemann(x, params)
    w1 = np.asarray(rs.w1, dtype=float)
    w2 = np.asarray(rs.w2, dtype=float)
    if not (np.all(np.isfinite(w1)) and np.all(np.isfinite(w2))):
        raise ClassificationError("non-finite initial data samples")

    def inv(j, sign):
        return lambda t: sign * float(getattr(data.riemann(t, params), f"w{j}"))

    m1 = _polished_min(inv(1, 1.0), x, w1)
    M1 = -_polished_min(inv(1, -1.0), x, -w1)
    m2 = _polished_min(inv(2, 1.0), x, w2)
    M2 = -_polished_min(inv(2, -1.0), x, -w2)
    (a1, a2), (b1, b2) = data.farfield_riemann(params)
    return RegionBounds(m1=float(min(m1, a1, b1)), M1=float(max(M1, a1, b1)),
                        m2=float(min(m2, a2, b2)), M2=float(max(M2, a2, b2)))


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    reasons: list
    values: dict
    gamma: float

    def as_dict(self) -> dict:
        return {"admissible": self.admissible, "reasons": list(self.reasons),
                "values": dict(self.values), "gamma": self.gamma}


def admissibility_gate(bounds: RegionBounds, params: GammaParams) -> AdmissibilityVerdict:
    """Check the invariant-region conditions on the initial bounds.

    Always requires ``inf w1 > 0 > sup w2``. For gamma < 3 also requires
    ``(M1 - theta m1) + (1+theta) M2 < 0`` and
    ``(1+theta) m1 - (theta M2 - m2) > 0``. Every violated inequality is listed.
    """
    th = params.theta
    b = bounds
    values = {"inf_w1": b.m1, "sup_w2": b.M2}
    reasons = []
    if not b.m1 > 0.0:
        reasons.append(f"inf w₁ ≤ 0 (inf w1 = {b.m1!r})")
    if not b.M2 < 0.0:
        reasons.append(f"sup w₂ ≥ 0 (sup w2 = {b.M2!r})")
    if not params.is_gamma3:
        upper = (b.M1 - th * b.m1) + (1.0 + th) * b.M2
        lower = (1.0 + th) * b.m1 - (th * b.M2 - b.m2)
        values["slow_speed_bound"] = upper
        values["fast_speed_bound"] = lower
        if not upper < 0.0:
            reasons.append(f"(M1 - θ m1) + (1+θ) M2 ≥ 0 (value {upper!r})")
        if not lower > 0.0:
            reasons.append(f"(1+θ) m1 - (θ M2 - m2) ≤ 0 (value {lower!r})")
    return AdmissibilityVerdict(admissible=not reasons, reasons=reasons, values=values,
                                gamma=params.gamma)


def require_admissible(data: InitialData, params: GammaParams, n=None) -> RegionBounds:
    bounds = region_bounds(data, params, n)
    verdict = admissibility_gate(bounds, params)
    if not verdict.admissible:
        raise GateError("initial data is inadmissible: " + "; ".join(verdict.reasons),
                        verdict.reasons)
    return bounds


@dataclass(frozen=True)
class EigenvalueEnvelope:
    beta_minus_lo: float
    beta_minus_hi: float
    beta_plus_lo: float
    beta_plus_hi: float

    def speed_ranges(self):
        """Ranges ``((lambda1_min, lambda1_max), (lambda2_min, lambda2_max))``."""
        return ((1.0 / self.beta_minus_hi, 1.0 / self.beta_minus_lo),
                (1.0 / self.beta_plus_hi, 1.0 / self.beta_plus_lo))

    @property
    def max_speed(self) -> float:
        (a, b), (c, d) = self.speed_ranges()
        return max(abs(a), abs(b), abs(c), abs(d))


def eigenvalue_envelope(bounds: RegionBounds, params: GammaParams) -> EigenvalueEnvelope:
    """Two-sided bounds on ``beta - sigma**theta`` and ``beta + sigma**theta``.

    For gamma = 3 these quantities are w2 and w1 themselves, so their ranges
    are returned directly.
    """
    th = params.theta
    b = bounds
    if params.is_gamma3:
        env = EigenvalueEnvelope(b.m2, b.M2, b.m1, b.M1)
    else:
        env = EigenvalueEnvelope(
            beta_minus_lo=0.5 * ((b.m1 - th * b.M1) + (1.0 + th) * b.m2),
            beta_minus_hi=0.5 * ((b.M1 - th * b.m1) + (1.0 + th) * b.M2),
            beta_plus_lo=0.5 * ((1.0 + th) * b.m1 - (th * b.M2 - b.m2)),
            beta_plus_hi=0.5 * ((1.0 + th) * b.M1 + (b.M2 - th * b.m2)),
        )
    if not (env.beta_minus_hi < 0.0 < env.beta_plus_lo):
        raise GateError("eigenvalue envelope straddles zero: bounds are inadmissible",
                        [f"beta - sigma^theta <= {env.beta_minus_hi!r}",
                         f"beta + sigma^theta >= {env.beta_plus_lo!r}"])
    return env


@dataclass(frozen=True)
class Violation:
    index: int
    x: float
    field: str
    excess: float


@dataclass(frozen=True)
class RegionCertificate:
    passed: bool
    max_excess: float
    min_cone: float
    n_samples: int
    tol: float
    n_violations: int = 0
    violations: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "max_excess": self.max_excess,
                "min_cone": self.min_cone, "n_samples": self.n_samples, "tol": self.tol,
                "n_violations": self.n_violations,
                "violations": [v.__dict__ for v in self.violations]}


def certify_runtime_region(w1, w2, bounds: RegionBounds, params: GammaParams, x=None,
                           tol: float = DEFAULT_TOL_REGION, max_report: int = 50) -> RegionCertificate:
    """Check the max-min principle and the hyperbolicity cone on a solution snapshot.

    Passes iff ``m_j - tol <= w_j <= M_j + tol`` and ``sigma**theta - |beta| > 0``
    at every sample. Violations are returned as data, worst first.
    """
    w1 = np.atleast_1d(np.asarray(w1, dtype=float))
    w2 = np.atleast_1d(np.asarray(w2, dtype=float))
    if x is None:
        x = np.arange(w1.size, dtype=float)
    x = np.broadcast_to(np.asarray(x, dtype=float), w1.shape)
    th = params.theta
    excess = {
        "w1>M1": w1 - bounds.M1,
        "w1<m1": bounds.m1 - w1,
        "w2>M2": w2 - bounds.M2,
        "w2<m2": bounds.m2 - w2,
    }
    cone = 0.5 * th * (w1 - w2) - np.abs(0.5 * (w1 + w2))
    cone = np.where(np.isfinite(cone), cone, -np.inf)
    max_excess = 0.0
    found = []
    for name, e in excess.items():
        e = np.where(np.isfinite(e), e, np.inf)
        max_excess = max(max_excess, float(np.max(e, initial=0.0)))
        idx = np.flatnonzero(e > tol)
        found.extend(Violation(int(i), float(x.flat[i]), name, float(e.flat[i])) for i in idx)
    idx = np.flatnonzero(~(cone > 0.0))
    found.extend(Violation(int(i), float(x.flat[i]), "cone", float(-cone.flat[i])) for i in idx)
    found.sort(key=lambda v: -v.excess)
    return RegionCertificate(passed=not found, max_excess=max_excess,
                             min_cone=float(np.min(cone)) if cone.size else math.inf,
                             n_samples=int(w1.size), tol=float(tol),
                             n_violations=len(found), violations=found[:max_report])
