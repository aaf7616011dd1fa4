"""Statistical dimensions of Young diagrams, plus a check of the (6,4,2,1), N = 10 example.

The standard dimension formula gives 59459400 for that shape.  The value 135
is what the product formula returns when both products are cut off after the
nonempty rows (i, j <= s) instead of running to N; this script prints both.
"""

import argparse
from fractions import Fraction
from itertools import combinations
from math import factorial, log

from qdiv import qft


def rows_only_formula(rows, n):
    """``prod_i (l_i + N - i) prod_{i<j} (l_i - l_j + j - i) / (N-1)!`` with i, j over nonempty rows."""
    num = 1
    for i, l in enumerate(rows, start=1):
        num *= l + n - i
    for (i, li), (j, lj) in combinations(enumerate(rows, start=1), 2):
        num *= li - lj + j - i
    return Fraction(num, factorial(n - 1))


def partitions(k, max_part=None, max_len=None):
    max_part = k if max_part is None else max_part
    if k == 0:
        yield ()
        return
    if max_len == 0:
        return
    for first in range(min(k, max_part), 0, -1):
        for rest in partitions(k - first, first, None if max_len is None else max_len - 1):
            yield (first,) + rest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", default="6,4,2,1")
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--target", type=int, default=135)
    args = ap.parse_args()
    diagram = qft.YoungDiagram.parse(args.rows)
    d, c = qft.statistical_dimension(diagram, args.n)
    print(f"shape {diagram.rows}, N = {args.n}: d = {d}, c = 2 log d = {c:.6f}")
    alt = rows_only_formula(diagram.rows, args.n)
    print(f"rows-only product formula: {alt} (2 log = {2 * log(alt):.6f})")
    hits = [p for p in partitions(diagram.boxes, max_len=args.n)
            if qft.statistical_dimension(qft.YoungDiagram(p), args.n)[0] == args.target]
    print(f"{diagram.boxes}-box shapes with d = {args.target} in GL({args.n}): {hits or 'none'}")
    print("adjoint check:", [(n, qft.statistical_dimension(qft.adjoint_diagram(n), n)[0]) for n in range(3, 9)])


if __name__ == "__main__":
    main()
