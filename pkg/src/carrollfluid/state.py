"""Pointwise algebra of the isentropic Carrollian system.

The unknowns are the Carrollian stress ``sigma`` and velocity ``beta``. With
``theta = (gamma - 1) / 2`` the Riemann invariants are

    w1 = beta + sigma**theta / theta,    w2 = beta - sigma**theta / theta,

and in the strictly hyperbolic region w1 is transported with the fast speed
``lambda2 = 1 / (beta + sigma**theta)`` and w2 with the slow speed
``lambda1 = 1 / (beta - sigma**theta)``.

Every function accepts scalars or numpy arrays and broadcasts.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DegeneracyError, InversionError, LiquescenceError, ParameterError

DEFAULT_TOL_DEGENERACY = 1e-10


@dataclass(frozen=True)
class GammaParams:
    gamma: float
    theta: float

    @property
    def exponent(self) -> float:
        """Exponent (1 - theta) / (2 theta) appearing in the Riccati integrand."""
        return (1.0 - self.theta) / (2.0 * self.theta)

    @property
    def is_gamma3(self) -> bool:
        return self.theta == 1.0


@dataclass(frozen=True)
class FluidState:
    sigma: Any
    beta: Any


@dataclass(frozen=True)
class RiemannState:
    w1: Any
    w2: Any


@dataclass(frozen=True)
class EigenData:
    lambda1: Any
    lambda2: Any
    mu1: Any
    mu2: Any
    r1: tuple
    r2: tuple


@dataclass(frozen=True)
class DualityDiagnostics:
    epsilon: Any
    varpi: Any
    pi: Any
    galilean: tuple  # (rho, v, p)


def make_params(gamma: float) -> GammaParams:
    """Validate the adiabatic exponent and derive ``theta = (gamma - 1) / 2``."""
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise ParameterError(f"gamma must be finite, got {gamma!r}; admissible interval is (1, 3]")
    if gamma == 1.0:
        raise ParameterError("γ=1 isothermal case out of scope; admissible interval is (1, 3]")
    if not 1.0 < gamma <= 3.0:
        raise ParameterError(f"gamma={gamma} outside the admissible interval (1, 3]")
    return GammaParams(gamma=gamma, theta=(gamma - 1.0) / 2.0)


def _check_sigma(sigma):
    sigma = np.asarray(sigma, dtype=float)
    if np.any(~(sigma > 0.0)):
        raise LiquescenceError("sigma must be strictly positive (sigma <= 0 is Carrollian liquescence)")
    return sigma


def sigma_pow(sigma, theta):
    """``sigma**theta`` evaluated as ``exp(theta * log(sigma))``; sigma must be > 0."""
    sigma = _check_sigma(sigma)
    return np.exp(theta * np.log(sigma))


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def eigen(state: FluidState, params: GammaParams,
          tol_degeneracy: float = DEFAULT_TOL_DEGENERACY) -> EigenData:
    """Eigenvalues of M and of the transport matrix M^-1, plus right eigenvectors.

    Raises DegeneracyError on ``beta == +-sigma**theta`` and warns when the state
    lies within ``tol_degeneracy`` of those loci.
    """
    sigma = _check_sigma(state.sigma)
    beta = np.asarray(state.beta, dtype=float)
    s = sigma_pow(sigma, params.theta)
    mu1 = beta - s
    mu2 = beta + s
    if np.any(mu1 == 0.0) or np.any(mu2 == 0.0):
        raise DegeneracyError("beta == +-sigma**theta: strict hyperbolicity is lost")
    if np.any(np.abs(mu1) < tol_degeneracy) or np.any(np.abs(mu2) < tol_degeneracy):
        warnings.warn("state within the degeneracy band |beta -+ sigma**theta| < "
                      f"{tol_degeneracy:g}", RuntimeWarning, stacklevel=2)
    sp = s / sigma  # sigma**(theta - 1)
    return EigenData(
        lambda1=_out(1.0 / mu1),
        lambda2=_out(1.0 / mu2),
        mu1=_out(mu1),
        mu2=_out(mu2),
        r1=(_out(np.ones_like(sp)), _out(-sp)),
        r2=(_out(np.ones_like(sp)), _out(sp)),
    )


def eigen_gradients(state: FluidState, params: GammaParams):
    """Closed-form gradients of lambda1, lambda2 with respect to (sigma, beta)."""
    sigma = _check_sigma(state.sigma)
    beta = np.asarray(state.beta, dtype=float)
    th = params.theta
    s = sigma_pow(sigma, th)
    sp = s / sigma
    g1 = 1.0 / (beta - s) ** 2
    g2 = 1.0 / (beta + s) ** 2
    return (_out(th * sp * g1), _out(-g1)), (_out(-th * sp * g2), _out(-g2))


def genuine_nonlinearity(state: FluidState, params: GammaParams):
    """Return ``(grad lambda1 . r1, grad lambda2 . r2)``; positive and negative in the hyperbolic region."""
    e = eigen(state, params)
    (a1, b1), (a2, b2) = eigen_gradients(state, params)
    d1 = np.asarray(a1) * e.r1[0] + np.asarray(b1) * e.r1[1]
    d2 = np.asarray(a2) * e.r2[0] + np.asarray(b2) * e.r2[1]
    return _out(d1), _out(d2)


def to_riemann(state: FluidState, params: GammaParams) -> RiemannState:
    beta = np.asarray(state.beta, dtype=float)
    c = sigma_pow(state.sigma, params.theta) / params.theta
    return RiemannState(w1=_out(beta + c), w2=_out(beta - c))


def from_riemann(rs: RiemannState, params: GammaParams) -> FluidState:
    w1 = np.asarray(rs.w1, dtype=float)
    w2 = np.asarray(rs.w2, dtype=float)
    if np.any(~(w1 > w2)):
        raise InversionError("w1 must exceed w2 for sigma to be positive")
    th = params.theta
    s = 0.5 * th * (w1 - w2)  # sigma**theta
    sigma = np.exp(np.log(s) / th)
    return FluidState(sigma=_out(sigma), beta=_out(0.5 * (w1 + w2)))


def eigenvalues_riemann(w1, w2, params: GammaParams):
    """lambda1, lambda2 written in Riemann invariants."""
    th = params.theta
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    d1 = (1.0 - th) * w1 + (1.0 + th) * w2
    d2 = (1.0 + th) * w1 + (1.0 - th) * w2
    return _out(2.0 / d1), _out(2.0 / d2)


def eigenvalue_derivatives_riemann(w1, w2, params: GammaParams):
    """Partial derivatives ``(l1_w1, l1_w2, l2_w1, l2_w2)`` of the eigenvalues."""
    th = params.theta
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    d1 = (1.0 - th) * w1 + (1.0 + th) * w2
    d2 = (1.0 + th) * w1 + (1.0 - th) * w2
    return (_out(-2.0 * (1.0 - th) / d1**2), _out(-2.0 * (1.0 + th) / d1**2),
            _out(-2.0 * (1.0 + th) / d2**2), _out(-2.0 * (1.0 - th) / d2**2))


def duality_diagnostics(state: FluidState, params: GammaParams) -> DualityDiagnostics:
    """Internal energy, generalized pressure, heat current and the dual Galilean triple."""
    sigma = _check_sigma(state.sigma)
    beta = np.asarray(state.beta, dtype=float)
    g = params.gamma
    sg = np.exp(g * np.log(sigma))
    eps = sg / g
    varpi = 0.5 * sigma * beta**2 + sg / (g * (g - 1.0))
    pi = np.zeros_like(sigma)
    return DualityDiagnostics(epsilon=_out(eps), varpi=_out(varpi), pi=_out(pi),
                              galilean=(_out(sigma), _out(beta), _out(eps)))


def space_momentum_residual(sigma, beta, dt, dx, params: GammaParams):
    """Forward-difference residual of ``d_t(beta varpi) + d_x varpi + d_t(beta eps)``.

    ``sigma`` and ``beta`` are sampled on a uniform (t, x) grid with shape
    ``(nt, nx)``; the returned array has shape ``(nt - 1, nx - 1)``. For smooth
    solutions of the 2x2 system it vanishes at first order in (dt, dx).
    """
    sigma = np.asarray(sigma, dtype=float)
    beta = np.asarray(beta, dtype=float)
    d = duality_diagnostics(FluidState(sigma, beta), params)
    q = beta * (np.asarray(d.varpi) + np.asarray(d.epsilon)) + np.asarray(d.pi)
    varpi = np.asarray(d.varpi)
    q_t = (q[1:, :-1] - q[:-1, :-1]) / dt
    varpi_x = (varpi[:-1, 1:] - varpi[:-1, :-1]) / dx
    return q_t + varpi_x
