#!/usr/bin/env python3
"""Cross-check the closed-form hull distance against the Frank-Wolfe search
on random pairs, printing the worst gaps seen.

Example:
    python3 scripts/compare_oracle.py --n 4 --pairs 200 --seed 1
"""

import argparse

from orbithull import build_algebra, frank_wolfe_distance, generate_pair, majorize, orbit_distance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--pairs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--restarts", type=int, default=10)
    args = ap.parse_args()

    alg = build_algebra([args.n])
    worst_over = 0.0
    worst_under = 0.0
    agree = 0
    for i in range(args.pairs):
        kind = "majorizing" if i % 2 == 0 else "random"
        a, b = generate_pair(alg, (args.seed, i), kind)
        closed = orbit_distance(alg, a, b)
        fw = frank_wolfe_distance(alg, a, b, restarts=args.restarts, seed=(args.seed, i))
        worst_over = max(worst_over, fw - closed)
        worst_under = max(worst_under, closed - fw)
        if majorize(alg, a, b) == (fw <= 1e-3):
            agree += 1
    print(f"pairs: {args.pairs}   membership agreement: {agree}/{args.pairs}")
    print(f"max (frank_wolfe - closed_form): {worst_over:.3e}")
    print(f"max (closed_form - frank_wolfe): {worst_under:.3e}  (soundness: should be ~0)")


if __name__ == "__main__":
    main()
