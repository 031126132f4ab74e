#!/usr/bin/env python3
"""How long does a transmitter wait for the partner fading state?

Greedy matching of each time instant with the earliest later instant whose
quantized channel state equals the quantized partner state (sign-flipped
second receiver gain, identical eavesdropper gains).  Finer quantization
means more faithful repetition but longer waits and more unmatched tail
instants.
"""

import argparse

import numpy as np

from macwt import FadingParams, ergodic_pairing_demo


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instants", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--var-g", type=float, default=0.75)
    args = ap.parse_args()

    params = FadingParams.symmetric(1.0, args.var_g)
    print(f"{'bins (M=B)':>10s} {'matched':>9s} {'mean wait':>10s} "
          f"{'max wait':>9s}")
    for bins in (1, 2, 3, 4):
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        rep = ergodic_pairing_demo(args.instants, params, mag_bins=bins,
                                   phase_bins=bins, rng=rng)
        print(f"{bins:>10d} {rep.fraction:>8.1%} {rep.mean_wait:>10.1f} "
              f"{rep.max_wait:>9d}")


if __name__ == "__main__":
    main()
