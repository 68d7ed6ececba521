"""First-order upwind reference solver for the diagonal (Riemann-invariant) form.

w1 is advected with ``lambda2 > 0`` using a backward difference, w2 with
``lambda1 < 0`` using a forward difference. With ``dt * |lambda| <= dx`` each
update is a convex combination of neighbouring values, so the scheme obeys a
discrete max-min principle exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .classification import (RegionBounds, RegionCertificate, certify_runtime_region,
                             require_admissible)
from .errors import ParameterError, RegionError, TimeStepError
from .initial_data import InitialData
from .state import GammaParams, RiemannState, eigenvalues_riemann

BOUNDARIES = ("farfield_constant", "periodic")


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_cells: int
    cfl: float = 0.9

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ParameterError("grid needs x_min < x_max")
        if int(self.n_cells) < 2:
            raise ParameterError("grid needs at least 2 cells")
        if not 0.0 < self.cfl <= 0.9:
            raise ParameterError(f"cfl must lie in (0, 0.9], got {self.cfl}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    @classmethod
    def around(cls, data: InitialData, n_cells: int, cfl: float = 0.9):
        lo, hi = data.truncation
        return cls(lo, hi, int(n_cells), cfl)


def _speeds_checked(w1, w2, params):
    if np.any(~(w1 > w2)):
        raise RegionError("w1 <= w2 on the grid: sigma would be nonpositive")
    l1, l2 = eigenvalues_riemann(w1, w2, params)
    l1 = np.asarray(l1)
    l2 = np.asarray(l2)
    if np.any(~(l1 < 0.0)) or np.any(~(l2 > 0.0)):
        raise RegionError("characteristic speeds lost their sign (left the invariant region)")
    return l1, l2


def stable_dt(rs: RiemannState, grid: Grid1D, params: GammaParams) -> float:
    l1, l2 = _speeds_checked(np.asarray(rs.w1), np.asarray(rs.w2), params)
    vmax = max(float(np.max(np.abs(l1))), float(np.max(l2)))
    return grid.cfl * grid.dx / vmax


def upwind_step(rs: RiemannState, grid: Grid1D, dt: float, params: GammaParams,
                boundary: str = "farfield_constant", ghosts=None) -> RiemannState:
    """Advance both invariants by one upwind step.

    ``ghosts`` is ``(w1_left, w2_right)``, the inflow values used with the
    far-field boundary. Raises TimeStepError when ``dt`` breaks the CFL bound
    and RegionError when the state leaves the hyperbolic region.
    """
    w1 = np.asarray(rs.w1, dtype=float)
    w2 = np.asarray(rs.w2, dtype=float)
    l1, l2 = _speeds_checked(w1, w2, params)
    vmax = max(float(np.max(np.abs(l1))), float(np.max(l2)))
    if not dt > 0.0 or dt * vmax > grid.cfl * grid.dx * (1.0 + 1e-12):
        raise TimeStepError(f"dt={dt!r} violates the CFL bound {grid.cfl * grid.dx / vmax!r}")
    if boundary == "periodic":
        w1_left = np.roll(w1, 1)
        w2_right = np.roll(w2, -1)
    elif boundary == "farfield_constant":
        if ghosts is None:
            raise ParameterError("far-field boundary needs ghost values")
        w1_left = np.concatenate(([ghosts[0]], w1[:-1]))
        w2_right = np.concatenate((w2[1:], [ghosts[1]]))
    else:
        raise ParameterError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")
    r = dt / grid.dx
    new1 = w1 - r * l2 * (w1 - w1_left)
    new2 = w2 - r * l1 * (w2_right - w2)
    _speeds_checked(new1, new2, params)
    return RiemannState(new1, new2)


@dataclass
class GridSolution:
    grid: Grid1D
    params: GammaParams
    boundary: str
    times: list
    fields: list
    certificates: list
    max_slope: list
    bounds: RegionBounds
    tol_region: float
    n_steps: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.grid.centers

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)

    def valid_window(self, t: float, vmax: float = None):
        """Sub-interval not reached by boundary influence by time ``t``."""
        v = self.meta["vmax"] if vmax is None else vmax
        return self.grid.x_min + t * v, self.grid.x_max - t * v

    def snapshot(self, t: float) -> RiemannState:
        for tt, f in zip(self.times, self.fields):
            if abs(tt - t) <= 1e-12 * max(1.0, abs(t)):
                return f
        raise ParameterError(f"no snapshot at t={t!r}")


def _max_slope(rs, dx):
    return float(max(np.max(np.abs(np.diff(rs.w1))), np.max(np.abs(np.diff(rs.w2)))) / dx)


def run(data: InitialData, grid: Grid1D, t_end: float, snapshot_times, params: GammaParams,
        boundary: str = "farfield_constant", tol_region: float = None) -> GridSolution:
    """March the upwind scheme to ``t_end``, storing and certifying snapshots.

    The step is ``cfl * dx / max|lambda|`` from the current field, shortened to
    land on snapshot times. Each snapshot is checked against the initial
    invariant box with tolerance ``10 * dx * Lip(data)`` unless overridden;
    failures are recorded, not raised.
    """
    if not t_end >= 0.0:
        raise ParameterError("t_end must be non-negative")
    if boundary not in BOUNDARIES:
        raise ParameterError(f"unknown boundary {boundary!r}; expected one of {BOUNDARIES}")
    bounds = require_admissible(data, params)
    snaps = sorted({float(s) for s in snapshot_times} | {float(t_end)})
    if snaps[0] < 0.0 or snaps[-1] > t_end:
        raise ParameterError("snapshot times must lie in [0, t_end]")
    if tol_region is None:
        tol_region = 10.0 * grid.dx * data.lipschitz(params)
    x = grid.centers
    rs0 = data.riemann(x, params)
    rs = RiemannState(np.asarray(rs0.w1, dtype=float).copy(), np.asarray(rs0.w2, dtype=float).copy())
    (l1, _), (_, r2) = data.farfield_riemann(params)
    ghosts = (l1, r2)

    sol = GridSolution(grid, params, boundary, [], [], [], [], bounds, float(tol_region))
    l1s, l2s = _speeds_checked(rs.w1, rs.w2, params)
    sol.meta["vmax"] = max(float(np.max(np.abs(l1s))), float(np.max(l2s)))

    def record(t, state):
        sol.times.append(t)
        sol.fields.append(state)
        sol.certificates.append(certify_runtime_region(state.w1, state.w2, bounds, params, x=x,
                                                       tol=tol_region))
        sol.max_slope.append(_max_slope(state, grid.dx))

    t = 0.0
    k = 0
    if snaps[0] == 0.0:
        record(0.0, rs)
        k = 1
    while k < len(snaps):
        target = snaps[k]
        dt = stable_dt(rs, grid, params)
        last = t + dt >= target * (1.0 - 1e-14)
        if last:
            dt = target - t
        if dt > 0.0:
            rs = upwind_step(rs, grid, dt, params, boundary, ghosts)
            sol.n_steps += 1
        t = target if last else t + dt
        if last:
            record(target, rs)
            k += 1
    return sol


def linf_error(sol_field: RiemannState, ref: RiemannState, mask=None) -> float:
    e = np.maximum(np.abs(np.asarray(sol_field.w1) - np.asarray(ref.w1)),
                   np.abs(np.asarray(sol_field.w2) - np.asarray(ref.w2)))
    if mask is not None:
        e = e[mask]
    return float(np.max(e)) if e.size else math.nan
