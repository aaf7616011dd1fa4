"""Run property suites and print one summary line per suite (JSON reports with --json)."""

import argparse
import json
import sys
import time

from qdiv import suites


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help="suite names (default: all)")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--trials", type=int, default=0)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    cfg = suites.SuiteConfig(seed=args.seed, trials=args.trials)
    ok = True
    for name in args.names or suites.SUITES:
        t0 = time.perf_counter()
        rep = suites.run_suite(name, cfg)
        ok &= rep.ok
        if args.json:
            print(json.dumps(rep.to_dict(), sort_keys=True))
        else:
            print(f"{rep.summary_line()}  {time.perf_counter() - t0:6.2f}s")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
