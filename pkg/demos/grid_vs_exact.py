"""First-order convergence of the upwind solver against the exact gamma = 3 solution."""

import numpy as np

from carrollfluid import Grid1D, make_params, preset, run, solve_exact_gamma3


def main():
    params = make_params(3.0)
    data = preset("arctan-rarefactive", {"sigma": 2.0, "eps": 1.0})
    prev = None
    print(f"{'cells':>6} {'L-inf error':>12} {'order':>6}  region certificate")
    for n in (200, 400, 800, 1600):
        sol = run(data, Grid1D.around(data, n), 1.0, [1.0], params)
        lo, hi = sol.valid_window(1.0)
        mask = (sol.x >= lo) & (sol.x <= hi)
        exact = solve_exact_gamma3(data, 1.0, sol.x[mask])
        num = sol.snapshot(1.0)
        err = max(np.max(np.abs(num.w1[mask] - exact.w1)), np.max(np.abs(num.w2[mask] - exact.w2)))
        order = "" if prev is None else f"{np.log2(prev / err):6.3f}"
        print(f"{n:6d} {err:12.4e} {order:>6}  {'passed' if sol.passed else 'FAILED'}")
        prev = err


if __name__ == "__main__":
    main()
