"""Blow-up of a compressive arctan pulse at gamma = 3.

At gamma = 3 every characteristic is a straight line, so the first singular
time is the infimum of ``w**2 / w_x`` over the initial data. This script
prints that time, checks it against the first crossing of sampled
characteristics, and shows the slope growing along the critical line.
"""

import numpy as np

from carrollfluid import (alpha_along_characteristic_gamma3, first_crossing_time_gamma3,
                          predict_blowup_gamma3, preset)


def main():
    data = preset("arctan-compressive", {"sigma": 2.0, "eps": 0.1})
    rep = predict_blowup_gamma3(data)
    print(f"predicted blow-up time  t* = {rep.t_star:.12f}  (family {rep.family}, x0 = {rep.location_x0:.6f})")
    for fam in (1, 2):
        t_cross, x0 = first_crossing_time_gamma3(data, fam)
        print(f"family {fam}: first crossing of sampled characteristics at t = {t_cross:.12f} near x0 = {x0:.4f}")

    fam = 1
    x0 = rep.per_family[fam][1]
    print("\nslope of w1 along the critical characteristic:")
    for frac in (0.0, 0.5, 0.9, 0.99, 0.999):
        t = frac * rep.t_star
        print(f"  t = {t:9.4f}   w1_x = {alpha_along_characteristic_gamma3(data, fam, x0, t):.6e}")


if __name__ == "__main__":
    main()
