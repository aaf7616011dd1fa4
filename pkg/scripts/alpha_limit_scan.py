"""Scan D_{f_alpha}/alpha towards alpha -> 0 and compare with the BS divergence.

The second column shows the other end: D_{f_(1-a)}/a tends to the BS divergence
with the arguments swapped.
"""

import argparse

import numpy as np

from qdiv import means, states
from qdiv.suites import random_state


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    rho, sigma = random_state(rng, args.dim), random_state(rng, args.dim)
    bs = states.d_bs(rho, sigma).value
    bs_rev = states.d_bs(sigma, rho).value
    print(f"D_BS(rho||sigma) = {bs:.10f}   D_BS(sigma||rho) = {bs_rev:.10f}")
    print(f"{'a':>8}{'D_{f_a}/a':>16}{'D_{f_(1-a)}/a':>16}")
    for a in (1e-1, 1e-2, 1e-3, 1e-4, 1e-5):
        lo = states.d_f_closed(rho, sigma, means.alpha_geometric(a)).value
        hi = states.d_f_closed(rho, sigma, means.alpha_geometric(1 - a)).value
        print(f"{a:>8.0e}{lo / a:>16.10f}{hi / a:>16.10f}")
    print(f"Richardson limit (alpha -> 0): {states.alpha_limit(rho, sigma):.10f}")


if __name__ == "__main__":
    main()
