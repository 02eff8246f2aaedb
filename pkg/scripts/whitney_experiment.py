"""Does the cochain-level Chern character turn direct sums into products or sums?

Compares ch(E+F) with ch(E) cup ch(F) and with ch(E) + ch(F), degree by degree,
on line bundles over the projective plane and on synthetic covers.
"""
import argparse
import json

from tcocycle.experiments import whitney_examples
from tcocycle.field import Field


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k-max", type=int, default=2)
    ap.add_argument("--field", default="Q")
    ap.add_argument("--out")
    args = ap.parse_args()
    res = whitney_examples(args.k_max, Field.parse(args.field))
    for name, rows in res.items():
        print(name)
        for r in rows:
            print(f"  k={r['k']}  product rule {r['ch(E+F) == ch(E)*ch(F)']!s:5}  sum rule {r['ch(E+F) == ch(E)+ch(F)']!s:5}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(res, fh, indent=2)


if __name__ == "__main__":
    main()
