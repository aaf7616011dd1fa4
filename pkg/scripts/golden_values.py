"""Print Choi-route and optimiser complexities for the closed-form channel catalogue."""

import argparse

import numpy as np

from qdiv import channel_divergence as cd
from qdiv.suites import golden_cases


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--restarts", type=int, default=0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--choi-only", action="store_true")
    args = ap.parse_args()
    cfg = cd.OptimizerConfig(restarts=args.restarts, seed=args.seed)
    print(f"{'case':<22}{'expected':>12}{'choi':>16}{'optimiser':>16}")
    for label, t, expected in golden_cases():
        method = "choi" if args.choi_only or np.isinf(expected) else "both"
        rep = cd.complexity(t, method=method, cfg=cfg)
        opt = "" if rep.opt is None else f"{rep.opt.value:16.10f}"
        print(f"{label:<22}{expected:>12.6f}{rep.choi.value:>16.10f}{opt}")


if __name__ == "__main__":
    main()
