"""Bracketing the blow-up time for gamma = 2 by Riccati integration.

For gamma other than 3 the characteristics bend, so the blow-up time is only
known to lie in an interval built from the invariant-region bounds. This
script follows the critical characteristic through a converged bundle,
integrates the slope equation along it, and prints where the crossing falls
relative to the two intervals the library reports.
"""

from carrollfluid import (blowup_bounds_general, build_bundle, integrate_riccati, make_params,
                          preset, trace_characteristic)
from carrollfluid.characteristics import blowup_envelope


def main():
    params = make_params(2.0)
    data = preset("arctan-compressive", {"sigma": 2.0, "eps": 0.1})
    intervals = blowup_bounds_general(data, params)
    env = blowup_envelope(intervals)
    print(f"envelope verdict: {env['verdict']}")
    print(f"  displayed interval  [{env['t_lo']:.4f}, {env['t_hi']:.4f}]")
    print(f"  local interval      [{env['t_lo_local']:.4f}, {env['t_hi_local']:.4f}]")

    iv = min(intervals, key=lambda i: i.t_hi_local)
    bundle = build_bundle(data, params, 1.01 * iv.t_hi_local, extent=(-2.0, 2.0))
    trace = trace_characteristic(data, iv.family, iv.x0, 1.01 * iv.t_hi_local, bundle=bundle)
    alpha0 = float(data.riemann_derivatives(iv.x0, params)[iv.family - 1])
    res = integrate_riccati(trace, alpha0, params, dt=1e-4)
    print(f"\ncritical foot x0 = {iv.x0:.4f}, family {iv.family}")
    print(f"Riccati blow-up   t = {res.blowup_time:.4f}")
    print(f"inside local interval [{iv.t_lo_local:.4f}, {iv.t_hi_local:.4f}]: "
          f"{iv.t_lo_local <= res.blowup_time <= iv.t_hi_local}")


if __name__ == "__main__":
    main()
