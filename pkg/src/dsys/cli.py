"""Command-line surface.

    dsys validate  PATH                    axioms, exit 0/1/2
    dsys compute   PATH --what WHAT        derived-data artifact file
    dsys verify    PATH --theorem ID       single-instance theorem check
    dsys generate  --kind .. --n .. ..     seeded instance file
    dsys campaign  --theorem ID --count .. generated corpus + report + CSV

Exit codes: 0 = pass, 1 = mathematical failure (with a witness in the
report), 2 = I/O or parse errors.  All output is deterministic: identical
inputs produce byte-identical reports.
"""
from __future__ import annotations

import argparse
import hashlib
import os
import sys
from fractions import Fraction

from .exactfield import ExactError, format_scalar
from .filtration import Grading, IncFiltration
from .hodge import DecFiltration, TableZetaProvider, ZeroZetaProvider
from .dh import DHSystem
from .category import Morphism
from . import harness
from .harness import RaySampler, run_theorem_campaign, verify_system
from .io_dsys import ParseError, format_instance, load_instance

EXIT_PASS = 0
EXIT_MATH = 1
EXIT_USAGE = 2


def _provider_from_flag(flag: str):
    if flag in (None, "zero-only"):
        return ZeroZetaProvider()
    if flag.startswith("table:"):
        path = flag[len("table:"):]
        entries = []
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                coeff = Fraction(parts[0])
                word = []
                for tok in parts[1:]:
                    tok = tok.strip("()")
                    p, q = tok.split(",")
                    word.append((int(p), int(q)))
                entries.append((coeff, tuple(word)))
        return TableZetaProvider(entries)
    raise ParseError(f"unknown zeta provider {flag!r}")


def _grid_from_flag(text: str):
    return tuple(Fraction(tok) for tok in text.split(","))


def _render_grading(g: Grading):
    lines = []
    for w, s in g.parts():
        rows = " ; ".join(" ".join(format_scalar(x) for x in r)
                          for r in s.rows)
        lines.append(f"{w} = {rows}")
    return lines


def _render_inc(w: IncFiltration):
    lines = []
    for j in w.jumps():
        rows = " ; ".join(" ".join(format_scalar(x) for x in r)
                          for r in w.at(j).rows)
        lines.append(f"{j} = {rows}")
    return lines


def _render_dec(f: DecFiltration):
    lines = []
    for j in f.jumps():
        rows = " ; ".join(" ".join(format_scalar(x) for x in r)
                          for r in f.at(j).rows)
        lines.append(f"{j} = {rows}" if rows else f"{j} =")
    return lines


def _render_matrix(m):
    return [" ".join(format_scalar(x) for x in row) for row in m.data]


def _compute_artifact(system, what: str) -> str:
    lines = [f"artifact {what}"]
    if what == "tower":
        for j, filt in enumerate(system.tower()):
            lines.append(f"[W^({j})]")
            lines.extend(_render_inc(filt))
    elif what == "tau":
        for j, g in enumerate(system.tau().gradings):
            lines.append(f"[tau_{j}]")
            lines.extend(_render_grading(g))
    elif what == "nhat":
        for j, nh in enumerate(system.nhat(), 1):
            lines.append(f"[Nhat_{j}]")
            lines.extend(_render_matrix(nh))
    elif what == "fhat":
        if not isinstance(system, DHSystem):
            raise ExactError("fhat needs a dh system")
        lines.append("[Fhat]")
        lines.extend(_render_dec(system.fhat()))
    elif what == "orbit":
        from .sl2 import is_orbit
        lines.append(f"sl2-orbit {'true' if is_orbit(system) else 'false'}")
    elif what == "decompose":
        from .sl2 import decompose
        dec = decompose(system)
        for c in dec.components:
            lines.append(f"[component m={','.join(map(str, c.m))} k={c.k} "
                         f"mult={c.mult_dim}]")
            if c.hs is not None:
                lines.append("hodge-structure:")
                lines.extend(_render_dec(c.hs))
            lines.append("embedding:")
            lines.extend(_render_matrix(c.embedding))
    else:
        raise ExactError(f"unknown artifact {what!r}")
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    obj = load_instance(args.path, zeta_provider=args.provider)
    if isinstance(obj, Morphism):
        obj.check()
        print("morphism: pass")
        return EXIT_PASS
    rep = obj.validate()
    print(rep)
    return EXIT_PASS if rep.ok else EXIT_MATH


def cmd_compute(args) -> int:
    obj = load_instance(args.path, zeta_provider=args.provider)
    if isinstance(obj, Morphism):
        raise ParseError("compute needs a system file")
    rep = obj.validate()
    if not rep.ok:
        print(rep)
        return EXIT_MATH
    text = _compute_artifact(obj, args.what)
    out = args.output or (args.path + f".{args.what}.txt")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {out}")
    expect = getattr(obj, "expect", None) or {}
    if args.what in expect:
        digest = hashlib.sha256(text.encode()).hexdigest()
        if digest != expect[args.what]:
            print(f"expect mismatch for {args.what}: got {digest}")
            return EXIT_MATH
        print(f"expect match for {args.what}")
    return EXIT_PASS


def cmd_verify(args) -> int:
    obj = load_instance(args.path, zeta_provider=args.provider)
    sampler = RaySampler(_grid_from_flag(args.t_grid))
    result = verify_system(obj, args.theorem, sampler,
                           _grid_from_flag(args.a_grid))
    status = "PASS" if result.ok else "FAIL"
    detail = f" [{result.detail}]" if result.detail else ""
    print(f"theorem {args.theorem}: {status}{detail}")
    for tr in result.traces:
        for t, d in tr.entries:
            print(f"trace {tr.quantity} t={t} sqdist={d}")
    return EXIT_PASS if result.ok else EXIT_MATH


def cmd_generate(args) -> int:
    inst = harness.generate(args.kind, args.n, args.dims, args.seed,
                            args.mode)
    text = format_instance(inst.system)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_campaign(args) -> int:
    sampler = RaySampler(_grid_from_flag(args.t_grid))
    report = run_theorem_campaign(
        args.theorem, args.count, args.n, args.dims, seed=args.seed,
        sampler=sampler, agrid=_grid_from_flag(args.a_grid),
        kind=args.kind, jobs=args.jobs)
    text = report.render_text()
    sys.stdout.write(text)
    outdir = args.out_dir
    if outdir:
        os.makedirs(outdir, exist_ok=True)
        base = os.path.join(outdir, f"campaign-{args.theorem}")
        with open(base + ".txt", "w", encoding="utf-8") as fh:
            fh.write(text)
        with open(base + ".csv", "w", encoding="utf-8") as fh:
            fh.write(report.render_csv())
        print(f"wrote {base}.txt and {base}.csv")
    return EXIT_PASS if report.ok else EXIT_MATH


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dsys",
        description="exact arithmetic for Deligne and Deligne-Hodge systems")
    ap.add_argument("--zeta-provider", default="zero-only",
                    help="zero-only or table:<path>")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the axioms of an instance")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compute", help="write a derived-data artifact")
    p.add_argument("path")
    p.add_argument("--what", required=True,
                   choices=("tower", "tau", "nhat", "fhat", "orbit",
                            "decompose"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run a theorem check on an instance")
    p.add_argument("path")
    p.add_argument("--theorem", required=True, choices=harness.THEOREMS)
    p.add_argument("--t-grid", default="2,4,8,16,32")
    p.add_argument("--a-grid", default="1,4,16,64,256")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a seeded random instance")
    p.add_argument("--kind", required=True, choices=("deligne", "dh"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dims", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", default="none",
                   choices=("none", "transport", "hodge"))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("campaign", help="run a generated-corpus campaign")
    p.add_argument("--theorem", required=True, choices=harness.THEOREMS)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--dims", type=int, default=6)
    p.add_argument("--kind", default="deligne", choices=("deligne", "dh"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-grid", default="2,4,8,16,32")
    p.add_argument("--a-grid", default="1,4,16,64,256")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_campaign)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        args.provider = _provider_from_flag(args.zeta_provider)
    except (OSError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ExactError as exc:
        print(f"mathematical failure: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    raise SystemExit(main())
