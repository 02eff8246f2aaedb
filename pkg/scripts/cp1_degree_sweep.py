"""Degrees of O(d) and of small direct sums on the projective line, with timing."""
import argparse
import time

from tcocycle.catalog import cp1_degree, direct_sum, o_d_cp1
from tcocycle.invariants import t_invariant


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--range", type=int, default=5)
    args = ap.parse_args()
    n = args.range
    t0 = time.perf_counter()
    for d in range(-n, n + 1):
        print(f"O({d}): degree {cp1_degree(t_invariant(o_d_cp1(d), 1))}")
    for a, b in ((2, 3), (-1, 4)):
        s = direct_sum([o_d_cp1(a), o_d_cp1(b)])
        print(f"O({a})+O({b}): degree {cp1_degree(t_invariant(s, 1))}")
    print(f"{time.perf_counter() - t0:.3f}s")


if __name__ == "__main__":
    main()
