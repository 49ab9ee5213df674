#!/usr/bin/env python3
"""Run the standard verification campaigns and write reports + CSV traces.

Usage:
    python3 scripts/run_campaigns.py [--out-dir reports] [--quick]
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fractions import Fraction

from dsys.harness import RaySampler, run_theorem_campaign

FULL = [
    # (theorem, count, n, dims, kind)
    ("tau-postconditions", 25, 2, 8, "deligne"),
    ("imhm-threshold", 10, 2, 6, "dh"),
    ("deligne-doubling", 10, 2, 5, "deligne"),
    ("limit-mhs", 10, 2, 6, "dh"),
    ("collapse-rmf", 10, 2, 6, "deligne"),
    ("tower-rmf", 10, 3, 8, "deligne"),
    ("splitting-series", 10, 2, 7, "dh"),
    ("convergence", 10, 2, 7, "dh"),
    ("abelian", 10, 1, 6, "deligne"),
    ("abelian", 10, 1, 6, "dh"),
    ("classification", 20, 2, 8, "dh"),
    ("orbit-polarization", 10, 2, 6, "dh"),
    ("graded-fix", 10, 1, 6, "dh"),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--quick", action="store_true",
                    help="smaller counts and a short ray grid")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)
    sampler = RaySampler((Fraction(2), Fraction(4), Fraction(8))) \
        if args.quick else RaySampler()
    overall = True
    for theorem, count, n, dims, kind in FULL:
        if args.quick:
            count = max(2, count // 4)
        rep = run_theorem_campaign(theorem, count, n, dims, seed=args.seed,
                                   sampler=sampler, kind=kind,
                                   jobs=args.jobs)
        overall = overall and rep.ok
        base = os.path.join(args.out_dir, f"{theorem}-{kind}")
        with open(base + ".txt", "w") as fh:
            fh.write(rep.render_text())
        with open(base + ".csv", "w") as fh:
            fh.write(rep.render_csv())
        status = "PASS" if rep.ok else "FAIL"
        print(f"{theorem:20s} ({kind:7s}): {status} "
              f"({sum(r.ok for r in rep.results)}/{len(rep.results)})")
    print("overall:", "PASS" if overall else "FAIL")
    return 0 if overall else 1


if __name__ == "__main__":
    raise SystemExit(main())
