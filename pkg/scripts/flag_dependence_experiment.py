"""Do refined invariants depend on the chosen flag?

Re-presents split bundles through permutation gauges that give another flag and
compares the refined cochains and the connecting witness.
"""
import argparse
import json

from tcocycle.experiments import flag_dependence_examples
from tcocycle.field import Field


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--field", default="Q")
    ap.add_argument("--out")
    args = ap.parse_args()
    res = flag_dependence_examples(Field.parse(args.field))
    for name, rows in res.items():
        for r in rows:
            print(f"{name}  {r['gauge']}: equal={r['refined cochains equal']} witness closed={r['witness components d-closed']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(res, fh, indent=2)


if __name__ == "__main__":
    main()
