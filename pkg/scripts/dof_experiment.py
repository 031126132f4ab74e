#!/usr/bin/env python3
"""Sum-rate scaling experiment: slope of the ergodic secrecy sum rate
against log2(P) for the two aligned schemes and the single-slot baseline,
plus the baseline's constant Monte Carlo ceiling.

The two-slot schemes should come out near slope 1/2; the baseline near 0
and below the ceiling at every grid point.
"""

import argparse

from macwt import FadingParams, estimate_dof, gs_cj_upper_bound, sum_rate_curve
from macwt.montecarlo import ESA, GS_CJ, SBA


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--powers", default="1e3,1e4,1e5,1e6")
    args = ap.parse_args()

    powers = [float(p) for p in args.powers.split(",")]
    params = FadingParams.symmetric(1.0, 1.0)

    for scheme in (SBA, ESA, GS_CJ):
        curve = sum_rate_curve(scheme, params, powers, args.samples, args.seed)
        eta = estimate_dof(curve)
        print(f"{scheme:7s} eta = {eta:+.4f}")
        for p, r, se in zip(curve.powers, curve.rsum, curve.stderr):
            print(f"        P = {p:>10.3g}  rsum = {r:8.4f} +- {se:.4f} bits")

    bound, se = gs_cj_upper_bound(params, 10 * args.samples, args.seed)
    print(f"single-slot ceiling: {bound:.4f} +- {se:.4f} bits")


if __name__ == "__main__":
    main()
