"""Run configuration, report assembly and file output for the command-line driver."""

import hashlib
import json
import math
import os
import tempfile
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.integrate import trapezoid

from . import __version__
from . import characteristics as chars
from . import gamma3
from .classification import (admissibility_gate, certify_runtime_region, classification_summary,
                             eigenvalue_envelope, region_bounds)
from .errors import ConfigError, DataError, HorizonError
from .grid import Grid1D, linf_error, run as grid_run
from .initial_data import preset, read_tabulated_csv
from .state import RiemannState, eigenvalues_riemann, from_riemann, make_params

SOLVERS = ("exact3", "chars", "grid")
CSV_COLUMNS = ("x", "sigma", "beta", "w1", "w2", "lambda1", "lambda2")


@dataclass
class RunConfig:
    gamma: float = 3.0
    preset: str = None
    parameters: dict = field(default_factory=dict)
    data_path: str = None
    solver: str = "grid"
    t_end: float = None
    nx: int = 800
    cfl: float = 0.9
    snapshots: int = 5
    tol_region: float = None
    allow_near_blowup: bool = False
    safety: float = 0.05
    spacing: float = chars.DEFAULT_SPACING
    max_intervals: int = 200

    def validate(self, command: str):
        if (self.preset is None) == (self.data_path is None):
            raise ConfigError("exactly one of --preset or --data is required")
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}; expected one of {SOLVERS}")
        if command == "simulate":
            if self.t_end is None or not self.t_end > 0.0:
                raise ConfigError("simulate needs --t-end > 0")
            if self.solver == "exact3" and float(self.gamma) != 3.0:
                raise ConfigError(f"solver exact3 requires gamma = 3, got gamma = {self.gamma}")
            if self.nx < 2:
                raise ConfigError("--nx must be at least 2")
            if self.snapshots < 1:
                raise ConfigError("--snapshots must be at least 1")
            if not 0.0 <= self.safety < 1.0:
                raise ConfigError("--safety must lie in [0, 1)")

    def echo(self) -> dict:
        d = asdict(self)
        if self.data_path is not None:
            with open(self.data_path, "rb") as fh:
                d["data_sha256"] = hashlib.sha256(fh.read()).hexdigest()
        return d


def load_data(cfg: RunConfig):
    if cfg.preset is not None:
        return preset(cfg.preset, cfg.parameters)
    try:
        return read_tabulated_csv(cfg.data_path)
    except OSError as exc:
        raise DataError(f"cannot read {cfg.data_path}: {exc}") from None


def jsonable(obj):
    """Convert numpy scalars/arrays, tuples and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def write_json_atomic(path, payload):
    """Write JSON via a temporary file in the same directory followed by a rename."""
    text = json.dumps(jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return text


def write_snapshot_csv(path, x, rs: RiemannState, params):
    fs = from_riemann(rs, params)
    l1, l2 = eigenvalues_riemann(rs.w1, rs.w2, params)
    cols = np.column_stack([np.broadcast_to(np.asarray(c, dtype=float), np.shape(x))
                            for c in (x, fs.sigma, fs.beta, rs.w1, rs.w2, l1, l2)])
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".csv")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        np.savetxt(fh, cols, fmt="%.12g", delimiter=",", header=",".join(CSV_COLUMNS), comments="")
    os.replace(tmp, path)


def read_snapshot_csv(path):
    arr = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: arr[:, i] for i, name in enumerate(CSV_COLUMNS)}


def _thin(intervals, limit):
    if len(intervals) <= limit:
        return intervals
    keep = set(np.linspace(0, len(intervals) - 1, limit).round().astype(int).tolist())
    best = min(range(len(intervals)), key=lambda i: intervals[i].t_hi_local)
    keep.add(best)
    return [intervals[i] for i in sorted(keep)]


def certify(cfg: RunConfig) -> dict:
    """Admissibility, classification and blow-up prediction; no time stepping."""
    cfg.validate("certify")
    params = make_params(cfg.gamma)
    data = load_data(cfg)
    bounds = region_bounds(data, params)
    verdict = admissibility_gate(bounds, params)
    report = {
        "tool": "carrollfluid", "version": __version__, "command": "certify",
        "config": cfg.echo(), "data": data.describe(),
        "region_bounds": asdict(bounds),
        "admissibility": verdict.as_dict(),
        "classification": classification_summary(data, params),
    }
    if not verdict.admissible:
        report["blowup"] = None
        return report
    report["eigenvalue_envelope"] = asdict(eigenvalue_envelope(bounds, params))
    if params.is_gamma3:
        report["blowup"] = gamma3.predict_blowup_gamma3(data, params).as_dict()
    intervals = chars.blowup_bounds_general(data, params)
    env = chars.blowup_envelope(intervals)
    report["blowup_intervals"] = {
        "envelope": env,
        "n_intervals": len(intervals),
        "intervals": [iv.as_dict() for iv in _thin(intervals, cfg.max_intervals)],
    }
    if not params.is_gamma3:
        report["blowup"] = {"verdict": env["verdict"], "t_star": None,
                            "t_star_interval": [env["t_lo"], env["t_hi"]],
                            "t_star_interval_local": [env["t_lo_local"], env["t_hi_local"]],
                            "family": env["family"], "location_x0": env["x0"]}
    return report


def _lower_blowup_time(data, params):
    if params.is_gamma3:
        return gamma3.predict_blowup_gamma3(data, params).t_star
    env = chars.blowup_envelope(chars.blowup_bounds_general(data, params))
    return max(env["t_lo"], env["t_lo_local"])


def _lipschitz_on_samples(x, rs, t, C):
    dx = np.diff(x)
    worst = min(float(np.min(np.diff(rs.w1) / dx)), float(np.min(np.diff(rs.w2) / dx)))
    bound = -C / t
    return {"passed": worst >= bound, "t": t, "constant": C, "bound": bound, "worst_value": worst}


def simulate(cfg: RunConfig, out_dir: str) -> tuple:
    """Run the selected solver, write snapshots and manifest; return ``(manifest, exit_code)``."""
    cfg.validate("simulate")
    params = make_params(cfg.gamma)
    data = load_data(cfg)
    bounds = region_bounds(data, params)
    verdict = admissibility_gate(bounds, params)
    if not verdict.admissible:
        raise ConfigError("initial data is inadmissible: " + "; ".join(verdict.reasons))
    t_lower = _lower_blowup_time(data, params)
    limit = (1.0 - cfg.safety) * t_lower
    if cfg.t_end > limit and not cfg.allow_near_blowup:
        raise ConfigError(f"t_end={cfg.t_end!r} exceeds the blow-up safety limit {limit!r} "
                          "(use --allow-near-blowup to override)")
    grid = Grid1D.around(data, cfg.nx, cfg.cfl)
    x = grid.centers
    times = [cfg.t_end * k / cfg.snapshots for k in range(cfg.snapshots + 1)]
    fields = []
    lip = []
    extra = {}
    if cfg.solver == "grid":
        sol = grid_run(data, grid, cfg.t_end, times, params, tol_region=cfg.tol_region)
        fields = sol.fields
        certs = sol.certificates
        tol = sol.tol_region
        windows = [sol.valid_window(t) for t in times]
        C = (gamma3.lipschitz_constant_gamma3(data) if params.is_gamma3
             else max(chars.lipschitz_constants_general(bounds, params)))
        for t, f in zip(times[1:], fields[1:]):
            lo, hi = sol.valid_window(t)
            m = (x >= lo) & (x <= hi)
            if np.count_nonzero(m) >= 2:
                lip.append(_lipschitz_on_samples(x[m], RiemannState(f.w1[m], f.w2[m]), t, C))
        extra["n_steps"] = sol.n_steps
        if params.is_gamma3 and cfg.t_end < t_lower:
            errs = []
            for t, f in zip(times, fields):
                lo, hi = sol.valid_window(t)
                m = (x >= lo) & (x <= hi)
                ex = gamma3.solve_exact_gamma3(data, t, x[m], check_horizon=False)
                errs.append(linf_error(RiemannState(f.w1[m], f.w2[m]), ex))
            extra["exact_agreement"] = {"linf": errs, "first_order_tolerance": 10.0 * grid.dx * data.lipschitz(params),
                                        "passed": max(errs) <= 10.0 * grid.dx * data.lipschitz(params)}
    else:
        tol = 1e-9 if cfg.tol_region is None else cfg.tol_region
        windows = [data.truncation for _ in times]
        if cfg.solver == "exact3":
            report = gamma3.predict_blowup_gamma3(data, params)
            if cfg.t_end >= report.t_star:
                raise HorizonError(f"t_end={cfg.t_end!r} is at or beyond t*={report.t_star!r}",
                                   report.t_star)
            fields = [gamma3.solve_exact_gamma3(data, t, x, report=report) for t in times]
            for t in times[1:]:
                lip.append(gamma3.one_sided_lipschitz_certificate_gamma3(data, t, x, report).as_dict())
        else:
            env = eigenvalue_envelope(bounds, params)
            base = cfg.spacing / env.max_speed
            nt = cfg.snapshots * max(1, math.ceil(cfg.t_end / (cfg.snapshots * base)))
            bundle = chars.build_bundle(data, params, cfg.t_end, dt=cfg.t_end / nt,
                                        spacing=cfg.spacing, bounds=bounds)
            fields = [bundle.field(bundle.t[k * nt // cfg.snapshots], x) for k in range(len(times))]
            for t in times[1:]:
                lip.append(chars.one_sided_lipschitz_certificate_general(
                    data, t, params, bundle=bundle).as_dict())
            extra["bundle"] = {"sweeps": bundle.sweeps, "residual": bundle.residual,
                               "n_characteristics": int(bundle.feet1.size), "dt": bundle.dt,
                               "first_crossing": bundle.t_cross}
        certs = [certify_runtime_region(f.w1, f.w2, bounds, params, x=x, tol=tol) for f in fields]

    os.makedirs(out_dir, exist_ok=True)
    snaps = []
    for k, (t, f, c, win) in enumerate(zip(times, fields, certs, windows)):
        name = f"snapshot_{k:03d}.csv"
        write_snapshot_csv(os.path.join(out_dir, name), x, f, params)
        snaps.append({"index": k, "t": t, "file": name, "valid_window": list(win),
                      "region_certificate": c.as_dict()})
    passed = all(c.passed for c in certs) and all(d["passed"] for d in lip)
    if "exact_agreement" in extra:
        passed = passed and extra["exact_agreement"]["passed"]
    manifest = {
        "tool": "carrollfluid", "version": __version__, "command": "simulate",
        "config": cfg.echo(), "data": data.describe(),
        "admissibility": verdict.as_dict(),
        "classification": classification_summary(data, params),
        "region_bounds": asdict(bounds),
        "blowup_lower_bound": t_lower,
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "n_cells": grid.n_cells,
                 "dx": grid.dx, "cfl": grid.cfl},
        "snapshots": snaps,
        "lipschitz_certificates": lip,
        "passed": passed,
        **extra,
    }
    write_json_atomic(os.path.join(out_dir, "manifest.json"), manifest)
    return manifest, (0 if passed else 2)


def _load_run(path):
    mpath = os.path.join(path, "manifest.json") if os.path.isdir(path) else path
    try:
        with open(mpath, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read run manifest {mpath}: {exc}") from None
    if manifest.get("command") != "simulate":
        raise ConfigError(f"{mpath} is not a simulate manifest")
    return os.path.dirname(os.path.abspath(mpath)), manifest


_SHARED_KEYS = ("gamma", "preset", "parameters", "data_path", "t_end", "snapshots")


def compare(paths) -> dict:
    """L-infinity and L1 differences of every run against the first one, on shared snapshots.

    Later runs are linearly interpolated onto the first run's points and the
    comparison is restricted to the intersection of valid windows. With the
    first run as reference and two or more further grid runs, an observed
    order is fitted by least squares to log(error) against log(dx). With
    exactly three grid runs and no other reference, the Richardson ratio of
    successive differences is reported instead.
    """
    if len(paths) < 2:
        raise ConfigError("compare needs at least two runs")
    runs = [_load_run(p) for p in paths]
    ref_dir, ref = runs[0]
    for p, (_, m) in zip(paths[1:], runs[1:]):
        for key in _SHARED_KEYS:
            if ref["config"].get(key) != m["config"].get(key):
                raise ConfigError(f"run {p} differs from {paths[0]} in {key!r}: "
                                  f"{m['config'].get(key)!r} vs {ref['config'].get(key)!r}")

    all_mans = [m for _, m in runs]
    n_snap = len(ref["snapshots"])
    cache = {}

    def snapshot(i, k):
        if (i, k) not in cache:
            run_dir, m = runs[i]
            cache[i, k] = read_snapshot_csv(os.path.join(run_dir, m["snapshots"][k]["file"]))
        return cache[i, k]

    def window(k):
        lo = max(m["snapshots"][k]["valid_window"][0] for m in all_mans)
        hi = min(m["snapshots"][k]["valid_window"][1] for m in all_mans)
        return lo, hi

    def diff(i, j, k):
        a, b = snapshot(i, k), snapshot(j, k)
        lo, hi = window(k)
        mask = (a["x"] >= lo) & (a["x"] <= hi)
        xa = a["x"][mask]
        fields = {}
        for name in CSV_COLUMNS[1:]:
            d = np.abs(a[name][mask] - np.interp(xa, b["x"], b[name]))
            fields[name] = {"linf": float(np.max(d)) if d.size else math.nan,
                            "l1": float(trapezoid(d, xa)) if d.size > 1 else 0.0}
        return {"t": ref["snapshots"][k]["t"], "window": [lo, hi], "fields": fields}

    def final_linf(i, j):
        f = diff(i, j, n_snap - 1)["fields"]
        return max(f["w1"]["linf"], f["w2"]["linf"])

    results = []
    for i in range(1, len(runs)):
        m = runs[i][1]
        results.append({"run": paths[i], "solver": m["config"]["solver"], "nx": m["config"]["nx"],
                        "dx": m["grid"]["dx"],
                        "snapshots": [diff(0, i, k) for k in range(n_snap)]})

    out = {"tool": "carrollfluid", "version": __version__, "command": "compare",
           "reference": paths[0], "comparisons": results, "order": None}
    solvers = [m["config"]["solver"] for _, m in runs]
    if solvers[0] != "grid" and solvers[1:].count("grid") >= 2:
        idx = [i for i in range(1, len(runs)) if solvers[i] == "grid"]
        dx = np.array([runs[i][1]["grid"]["dx"] for i in idx])
        err = np.array([final_linf(0, i) for i in idx])
        if np.all(err > 0.0) and np.unique(dx).size > 1:
            out["order"] = {"method": "least-squares slope of log error against log dx",
                            "value": float(np.polyfit(np.log(dx), np.log(err), 1)[0]),
                            "errors": err.tolist(), "dx": dx.tolist()}
    elif len(runs) == 3 and all(s == "grid" for s in solvers):
        order = sorted(range(3), key=lambda i: -runs[i][1]["grid"]["dx"])
        dx = [runs[i][1]["grid"]["dx"] for i in order]
        d_coarse = final_linf(order[0], order[1])
        d_fine = final_linf(order[1], order[2])
        value = None
        if d_coarse > 0.0 and d_fine > 0.0 and dx[0] > dx[1] > dx[2]:
            value = float(math.log(d_coarse / d_fine) / math.log(dx[1] / dx[2]))
        out["order"] = {"method": "Richardson ratio of successive differences",
                        "value": value, "differences": [d_coarse, d_fine], "dx": dx}
    return out
