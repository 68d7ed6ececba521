"""C^1 initial profiles (sigma0, beta0) on the real line.

Profiles are represented on a finite truncation interval together with
declared far-field constants, so that infima and suprema over the whole line
can be computed as a min/max over samples plus the far-field values.
"""

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DataError
from .state import GammaParams, RiemannState, sigma_pow, to_riemann, FluidState

DEFAULT_TRUNCATION = (-20.0, 20.0)
DEFAULT_SAMPLES = 8001


@dataclass(frozen=True)
class InitialData:
    kind: str
    name: str
    parameters: dict
    sigma0: Callable
    beta0: Callable
    dsigma0: Callable
    dbeta0: Callable
    truncation: tuple
    farfield: tuple  # ((sigma_left, beta_left), (sigma_right, beta_right))
    n_samples: int = DEFAULT_SAMPLES
    curvature: float = field(default=float("nan"), compare=False)

    def grid(self, n=None):
        lo, hi = self.truncation
        return np.linspace(lo, hi, self.n_samples if n is None else int(n))

    def state(self, x) -> FluidState:
        x = np.asarray(x, dtype=float)
        return FluidState(self.sigma0(x), self.beta0(x))

    def riemann(self, x, params: GammaParams) -> RiemannState:
        return to_riemann(self.state(x), params)

    def riemann_derivatives(self, x, params: GammaParams):
        _, _, w1x, w2x = derivative_field(self, x, params)
        return w1x, w2x

    def farfield_riemann(self, params: GammaParams):
        """Riemann invariants at the left and right far field as ``((w1, w2), (w1, w2))``."""
        out = []
        for s, b in self.farfield:
            rs = to_riemann(FluidState(s, b), params)
            out.append((rs.w1, rs.w2))
        return tuple(out)

    def lipschitz(self, params: GammaParams, n=None) -> float:
        """max |w_jx| over the sample grid."""
        w1x, w2x = self.riemann_derivatives(self.grid(n), params)
        return float(max(np.max(np.abs(w1x)), np.max(np.abs(w2x))))

    def describe(self) -> dict:
        return {"kind": self.kind, "name": self.name, "parameters": dict(self.parameters),
                "truncation": list(self.truncation)}


def derivative_field(data: InitialData, x, params: GammaParams):
    """Return ``(sigma0_x, beta0_x, w1_x, w2_x)`` at ``x``.

    Uses ``w_jx = beta0_x +- sigma0**(theta - 1) * sigma0_x``.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(data.sigma0(x), dtype=float)
    sx = np.asarray(data.dsigma0(x), dtype=float)
    bx = np.asarray(data.dbeta0(x), dtype=float)
    c = sigma_pow(s, params.theta) / s * sx
    return sx, bx, bx + c, bx - c


def _const(value):
    return lambda x: np.full_like(np.asarray(x, dtype=float), value)


def _check_positive(name, value):
    if not value > 0.0:
        raise DataError(f"{name} must be > 0, got {value}")


def _constant(sigma=2.0, beta=0.0):
    _check_positive("sigma", sigma)
    return dict(sigma0=_const(sigma), beta0=_const(beta), dsigma0=_const(0.0),
                dbeta0=_const(0.0), farfield=((sigma, beta), (sigma, beta)))


def _arctan(sign):
    def build(sigma=2.0, eps=0.1):
        _check_positive("sigma", sigma)
        a = sign * eps
        return dict(sigma0=_const(sigma),
                    beta0=lambda x: a * np.arctan(x),
                    dsigma0=_const(0.0),
                    dbeta0=lambda x: a / (1.0 + np.asarray(x, dtype=float) ** 2),
                    farfield=((sigma, -a * np.pi / 2), (sigma, a * np.pi / 2)))
    return build


def _remark_family(m=1.0, theta=0.5):
    # w1 rises from m to (1+theta) m and w2 from -(1+theta) m to -m, both via a
    # logistic switch; the extreme values are attained in the far field.
    _check_positive("m", m)
    if not 0.0 < theta <= 1.0:
        raise DataError(f"theta must lie in (0, 1], got {theta}")

    def switch(x):
        return 0.5 * (1.0 + np.tanh(np.asarray(x, dtype=float)))

    def dswitch(x):
        return 0.5 / np.cosh(np.asarray(x, dtype=float)) ** 2

    def w1(x):
        return m * (1.0 + theta * switch(x))

    def w2(x):
        return -m * (1.0 + theta * (1.0 - switch(x)))

    def sigma0(x):
        return (0.5 * theta * (w1(x) - w2(x))) ** (1.0 / theta)

    def dsigma0(x):
        # d(w1 - w2)/dx = 0 since both rise by theta*m*switch'
        return np.zeros_like(np.asarray(x, dtype=float))

    def beta0(x):
        return 0.5 * (w1(x) + w2(x))

    def dbeta0(x):
        return m * theta * dswitch(x)

    left = ((0.5 * theta * m * (2.0 + theta)) ** (1.0 / theta), -0.5 * m * theta)
    right = ((0.5 * theta * m * (2.0 + theta)) ** (1.0 / theta), 0.5 * m * theta)
    return dict(sigma0=sigma0, beta0=beta0, dsigma0=dsigma0, dbeta0=dbeta0,
                farfield=(left, right))


def _gaussian_bump(sigma=2.0, a=0.1, s=1.0):
    _check_positive("sigma", sigma)
    _check_positive("s", s)

    def beta0(x):
        x = np.asarray(x, dtype=float)
        return a * x * np.exp(-(x / s) ** 2)

    def dbeta0(x):
        x = np.asarray(x, dtype=float)
        return a * (1.0 - 2.0 * (x / s) ** 2) * np.exp(-(x / s) ** 2)

    return dict(sigma0=_const(sigma), beta0=beta0, dsigma0=_const(0.0), dbeta0=dbeta0,
                farfield=((sigma, 0.0), (sigma, 0.0)))


PRESETS = {
    "constant": _constant,
    "arctan-compressive": _arctan(+1.0),
    "arctan-rarefactive": _arctan(-1.0),
    "remark-family": _remark_family,
    "gaussian-bump": _gaussian_bump,
}


def preset(name: str, parameters=None, truncation=DEFAULT_TRUNCATION,
           n_samples=DEFAULT_SAMPLES) -> InitialData:
    """Build one of the analytic presets.

    ``constant(sigma, beta)``, ``arctan-compressive(sigma, eps)`` with
    beta0 = eps*arctan(x), ``arctan-rarefactive(sigma, eps)`` with
    beta0 = -eps*arctan(x), ``remark-family(m, theta)`` and
    ``gaussian-bump(sigma, a, s)`` with beta0 = a*x*exp(-x^2/s^2).
    """
    try:
        builder = PRESETS[name]
    except KeyError:
        raise DataError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
    parameters = {k: float(v) for k, v in (parameters or {}).items()}
    try:
        parts = builder(**parameters)
    except TypeError as exc:
        raise DataError(f"bad parameters for preset {name!r}: {exc}") from None
    lo, hi = float(truncation[0]), float(truncation[1])
    if not lo < hi:
        raise DataError("truncation interval must satisfy x_min < x_max")
    return InitialData(kind="preset", name=name, parameters=parameters,
                       truncation=(lo, hi), n_samples=int(n_samples), **parts)


def ingest_tabulated(samples, name="tabulated", n_samples=DEFAULT_SAMPLES) -> InitialData:
    """Build InitialData from ``(x, sigma, beta)`` rows via monotone cubic (PCHIP) interpolation.

    Values beyond the table are held at the end samples, which also serve as
    the far-field constants.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DataError("samples must be rows of (x, sigma, beta)")
    if arr.shape[0] < 4:
        raise DataError(f"need at least 4 samples, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DataError("samples must be finite")
    x, sig, bet = arr.T
    if np.any(np.diff(x) <= 0.0):
        raise DataError("x must be strictly increasing")
    if np.any(sig <= 0.0):
        raise DataError("sigma must be strictly positive at every sample")

    h = np.diff(x)
    curv = 0.0
    for f in (sig, bet):
        slopes = np.diff(f) / h
        d2 = np.diff(slopes) / (0.5 * (h[1:] + h[:-1]))
        curv = max(curv, float(np.max(np.abs(d2))))
    if not np.isfinite(curv):
        raise DataError("second differences are not bounded")

    ps = PchipInterpolator(x, sig, extrapolate=False)
    pb = PchipInterpolator(x, bet, extrapolate=False)
    dps, dpb = ps.derivative(), pb.derivative()

    def clamp(fun, left, right):
        def ev(xq):
            xq = np.asarray(xq, dtype=float)
            out = np.asarray(fun(np.clip(xq, x[0], x[-1])), dtype=float)
            out = np.where(xq < x[0], left, out)
            return np.where(xq > x[-1], right, out)
        return ev

    return InitialData(
        kind="tabulated", name=name, parameters={"n_rows": int(arr.shape[0])},
        sigma0=clamp(ps, sig[0], sig[-1]), beta0=clamp(pb, bet[0], bet[-1]),
        dsigma0=clamp(dps, 0.0, 0.0), dbeta0=clamp(dpb, 0.0, 0.0),
        truncation=(float(x[0]), float(x[-1])),
        farfield=((float(sig[0]), float(bet[0])), (float(sig[-1]), float(bet[-1]))),
        n_samples=int(n_samples), curvature=curv)


def read_tabulated_csv(path, n_samples=DEFAULT_SAMPLES) -> InitialData:
    """Read a UTF-8 CSV with header ``x,sigma,beta`` and ingest it."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if header != ["x", "sigma", "beta"]:
            raise DataError(f"{path}: expected header 'x,sigma,beta', got {','.join(header)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns")
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric value") from None
    data = ingest_tabulated(rows, name=str(path), n_samples=n_samples)
    return data


def write_tabulated_csv(path, data: InitialData, x):
    """Sample ``data`` at ``x`` and write it in the tabulated CSV format."""
    x = np.asarray(x, dtype=float)
    s = data.sigma0(x)
    b = data.beta0(x)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("x,sigma,beta\n")
        for row in zip(x, s, b):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
