"""Run the randomised property battery and write the JSON report.

    python3 scripts/run_suite.py --field prime:101 --seed 7 --out suite.json
"""
import argparse
import json
import sys

from tcocycle.field import Field
from tcocycle.suite import SuiteConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--field", default="Q")
    ap.add_argument("--max-k", type=int, default=3)
    ap.add_argument("--max-rank", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--kernel-checks", type=int, default=100)
    ap.add_argument("--counterexample-dir", default="counterexamples")
    ap.add_argument("--out")
    args = ap.parse_args()

    cfg = SuiteConfig(
        field=Field.parse(args.field),
        max_k=args.max_k,
        max_rank=args.max_rank,
        seed=args.seed,
        repeats=args.repeats,
        kernel_checks=args.kernel_checks,
        counterexample_dir=args.counterexample_dir,
    )
    rep = run_suite(cfg)
    for prop, s in rep.summary().items():
        print(f"{prop:24s} pass {s['pass']:4d}  fail {s['fail']:3d}  skip {s['skip']:3d}")
    for part, secs in rep.timings.items():
        print(f"{part} {secs:.1f}s", file=sys.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rep.to_json(), fh, indent=2)
    sys.exit(0 if rep.ok else 2)


if __name__ == "__main__":
    main()
