#!/usr/bin/env python3
"""Print the exact convergence traces of an instance file as CSV.

Usage:
    python3 scripts/trace_instance.py instances/twovar_dh.dsys
"""
import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fractions import Fraction

from dsys.dh import DHSystem
from dsys.harness import (
    HarnessError, RaySampler, TRACE_QUANTITIES_DELIGNE, TRACE_QUANTITIES_DH,
    convergence_trace,
)
from dsys.io_dsys import load_instance


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("path")
    ap.add_argument("--t-grid", default="2,4,8,16,32")
    args = ap.parse_args()
    system = load_instance(args.path)
    sampler = RaySampler(tuple(Fraction(t) for t in args.t_grid.split(",")))
    quantities = TRACE_QUANTITIES_DH if isinstance(system, DHSystem) \
        else TRACE_QUANTITIES_DELIGNE
    print("quantity,t,sqdist")
    for q in quantities:
        try:
            tr = convergence_trace(system, q, sampler)
        except HarnessError as exc:
            print(f"# {q}: skipped ({exc})")
            continue
        for t, d in tr.entries:
            print(f"{q},{t},{d}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
