#!/usr/bin/env python3
"""Run the dimension-independence probe and print the per-n table.

Example:
    python3 scripts/run_probe.py --epsilon 0.25 --dims 2..40 --trials 100 \
        --seed 0 --out probe.csv
"""

import argparse

from orbithull import uniform_probe


def parse_dims(spec):
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in spec.split(",") if tok]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--dims", default="2..40")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="write the per-trial CSV here")
    args = ap.parse_args()

    result = uniform_probe(args.epsilon, parse_dims(args.dims), args.trials, args.seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(result.to_csv())
        print(f"wrote {len(result.rows)} trial rows to {args.out}")
    print(f"epsilon = {args.epsilon}, trials = {args.trials}, seed = {args.seed}")
    print(f"{'n':>4}  {'max terms':>9}  {'max error':>10}")
    errors = {}
    for n, _, terms, err in result.rows:
        errors[n] = max(errors.get(n, 0.0), err)
    for n, count in result.table:
        print(f"{n:>4}  {count:>9}  {errors[n]:>10.4f}")


if __name__ == "__main__":
    main()
