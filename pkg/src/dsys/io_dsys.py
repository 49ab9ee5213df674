"""The .dsys instance file format: a single human-readable structured text
format with exact scalar syntax.

    dsys 1
    kind deligne            # deligne | dh | morphism
    field rat               # rat | gauss  (dh systems are always rat)
    n 1
    dim 2

    [W]
    0 =
    1 = 1 0 ; 0 1

    [N 1]
    0 1
    0 0

    [alpha]                 # deligne: weight = basis rows
    0 = 1 0
    2 = 0 1

    [F]                     # dh: level = basis rows over Q(i)
    0 = 1 0 ; 0 1
    1 = 0 1
    2 =

Filtration lines list basis rows separated by ';' (empty right side =
zero subspace).  Morphism files carry 'source'/'target' lines with paths
relative to the file plus a [matrix] section.  An optional [expect]
section pins sha256 hashes of computed artifacts for regression checks.
"""
from __future__ import annotations

import os
from typing import Dict, List, Optional, Tuple

from .exactfield import (
    ExactError, Mat, Subspace, format_scalar, parse_scalar, vec,
)
from .filtration import Grading, IncFiltration
from .hodge import DecFiltration
from .deligne import DeligneSystem
from .dh import DHSystem
from .category import Morphism


class ParseError(ExactError):
    def __init__(self, msg: str, line: Optional[int] = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{msg}{where}")
        self.line = line


def _parse_vector(text: str, dim: int, lineno: int):
    parts = text.split()
    if len(parts) != dim:
        raise ParseError(f"expected {dim} entries, got {len(parts)}", lineno)
    try:
        return vec(parse_scalar(p) for p in parts)
    except ExactError as exc:
        raise ParseError(str(exc), lineno)


def _parse_rows(rhs: str, dim: int, lineno: int):
    rhs = rhs.strip()
    if not rhs:
        return []
    return [_parse_vector(chunk, dim, lineno)
            for chunk in rhs.split(";") if chunk.strip()]


def parse_instance(text: str, *, path: Optional[str] = None,
                   zeta_provider=None):
    """Parse a .dsys file into a system or a morphism."""
    lines = text.splitlines()
    header: Dict[str, str] = {}
    sections: List[Tuple[str, List[Tuple[int, str]]]] = []
    current: Optional[List[Tuple[int, str]]] = None
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.lstrip().startswith("["):
            name = line.strip()
            if not name.endswith("]"):
                raise ParseError("unterminated section header", no)
            sections.append((name[1:-1].strip(), []))
            current = sections[-1][1]
        elif current is not None:
            current.append((no, line.strip()))
        else:
            parts = line.strip().split(None, 1)
            if len(parts) != 2:
                raise ParseError(f"bad header line: {line.strip()!r}", no)
            header[parts[0]] = parts[1].strip()
    if header.get("dsys") != "1":
        raise ParseError("missing or unsupported 'dsys 1' version header")
    kind = header.get("kind")
    if kind not in ("deligne", "dh", "morphism"):
        raise ParseError(f"unknown kind {header.get('kind')!r}")
    if kind == "morphism":
        return _parse_morphism(header, sections, path, zeta_provider)
    try:
        n = int(header["n"])
        dim = int(header["dim"])
    except (KeyError, ValueError):
        raise ParseError("need integer 'n' and 'dim' headers")
    field = header.get("field", "rat")
    if field not in ("rat", "gauss"):
        raise ParseError(f"unknown field {field!r}")
    if kind == "dh" and field != "rat":
        raise ParseError("dh systems are real: field must be 'rat'")
    named = {name: body for name, body in sections}
    if "W" not in named:
        raise ParseError("missing [W] section")
    w_filt = _parse_inc_filtration(named["W"], dim)
    ns = []
    for j in range(1, n + 1):
        sec = f"N {j}"
        if sec not in named:
            raise ParseError(f"missing [{sec}] section")
        ns.append(_parse_matrix(named[sec], dim))
    expect = _parse_expect(named.get("expect", []))
    if kind == "deligne":
        if "alpha" not in named:
            raise ParseError("missing [alpha] section")
        alpha = _parse_grading(named["alpha"], dim)
        try:
            sys_ = DeligneSystem(field, dim, n, w_filt, ns, alpha)
        except ExactError as exc:
            raise ParseError(str(exc))
        sys_.expect = expect
        return sys_
    if "F" not in named:
        raise ParseError("missing [F] section")
    f = _parse_dec_filtration(named["F"], dim)
    kwargs = {}
    if zeta_provider is not None:
        kwargs["zeta_provider"] = zeta_provider
    try:
        sys_ = DHSystem(dim, n, w_filt, ns, f, **kwargs)
    except ExactError as exc:
        raise ParseError(str(exc))
    sys_.expect = expect
    return sys_


def _parse_keyed_rows(body, dim):
    steps = {}
    for no, line in body:
        if "=" not in line:
            raise ParseError("expected '<int> = rows'", no)
        key, rhs = line.split("=", 1)
        try:
            w = int(key.strip())
        except ValueError:
            raise ParseError(f"bad integer key {key.strip()!r}", no)
        if w in steps:
            raise ParseError(f"duplicate key {w}", no)
        steps[w] = Subspace.span(dim, _parse_rows(rhs, dim, no))
    return steps


def _parse_inc_filtration(body, dim) -> IncFiltration:
    steps = _parse_keyed_rows(body, dim)
    if not steps:
        raise ParseError("empty filtration section")
    try:
        return IncFiltration.from_steps(dim, steps)
    except ExactError as exc:
        raise ParseError(f"bad increasing filtration: {exc}")


def _parse_dec_filtration(body, dim) -> DecFiltration:
    steps = _parse_keyed_rows(body, dim)
    if not steps:
        raise ParseError("empty filtration section")
    try:
        return DecFiltration.from_steps(dim, steps)
    except ExactError as exc:
        raise ParseError(f"bad decreasing filtration: {exc}")


def _parse_grading(body, dim) -> Grading:
    steps = _parse_keyed_rows(body, dim)
    try:
        return Grading.from_parts(dim, steps)
    except ExactError as exc:
        raise ParseError(f"bad grading: {exc}")


def _parse_matrix(body, dim) -> Mat:
    rows = []
    for no, line in body:
        rows.append(_parse_vector(line, dim, no))
    if len(rows) != dim:
        raise ParseError(f"matrix needs {dim} rows, got {len(rows)}")
    return Mat(rows, dim, dim)


def _parse_expect(body) -> Dict[str, str]:
    out = {}
    for no, line in body:
        parts = line.split()
        if len(parts) != 3 or parts[1] != "sha256":
            raise ParseError("expect lines read '<what> sha256 <hex>'", no)
        out[parts[0]] = parts[2]
    return out


def _parse_morphism(header, sections, path, zeta_provider) -> Morphism:
    if path is None:
        raise ParseError("morphism files need a path for relative sources")
    base = os.path.dirname(os.path.abspath(path))
    for key in ("source", "target"):
        if key not in header:
            raise ParseError(f"morphism needs a {key!r} header line")
    src = load_instance(os.path.join(base, header["source"]),
                        zeta_provider=zeta_provider)
    dst = load_instance(os.path.join(base, header["target"]),
                        zeta_provider=zeta_provider)
    named = {name: body for name, body in sections}
    if "matrix" not in named:
        raise ParseError("missing [matrix] section")
    rows = []
    for no, line in named["matrix"]:
        rows.append(_parse_vector(line, src.dim, no))
    if len(rows) != dst.dim:
        raise ParseError(f"matrix needs {dst.dim} rows, got {len(rows)}")
    return Morphism(src, dst, Mat(rows, dst.dim, src.dim))


def load_instance(path: str, zeta_provider=None):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")
    return parse_instance(text, path=path, zeta_provider=zeta_provider)


# ---------------------------------------------------------------------------
# printing


def _format_vector(v) -> str:
    return " ".join(format_scalar(x) for x in v)


def _format_rows(s: Subspace) -> str:
    return " ; ".join(_format_vector(r) for r in s.rows)


def _format_inc(w: IncFiltration) -> List[str]:
    lines = []
    jumps = w.jumps()
    if jumps:
        below = jumps[0] - 1
        lines.append(f"{below} =")
        for j in jumps:
            lines.append(f"{j} = {_format_rows(w.at(j))}")
    return lines


def _format_dec(f: DecFiltration) -> List[str]:
    lines = []
    jumps = f.jumps()
    if jumps:
        below = jumps[0] - 1
        lines.append(f"{below} = {_format_rows(f.at(below))}")
        for j in jumps:
            rows = _format_rows(f.at(j))
            lines.append(f"{j} = {rows}" if rows else f"{j} =")
    return lines


def format_instance(system, expect: Optional[Dict[str, str]] = None) -> str:
    """Serialize a system; parse(format(x)) reproduces x exactly."""
    out = ["dsys 1"]
    is_dh = isinstance(system, DHSystem)
    out.append(f"kind {'dh' if is_dh else 'deligne'}")
    out.append(f"field {getattr(system, 'field', 'rat')}")
    out.append(f"n {system.n}")
    out.append(f"dim {system.dim}")
    out.append("")
    out.append("[W]")
    out.extend(_format_inc(system.W))
    for j, nj in enumerate(system.N, 1):
        out.append("")
        out.append(f"[N {j}]")
        for row in nj.data:
            out.append(_format_vector(row))
    out.append("")
    if is_dh:
        out.append("[F]")
        out.extend(_format_dec(system.F))
    else:
        out.append("[alpha]")
        for w, s in system.alpha.parts():
            out.append(f"{w} = {_format_rows(s)}")
    expect = expect or getattr(system, "expect", None)
    if expect:
        out.append("")
        out.append("[expect]")
        for key in sorted(expect):
            out.append(f"{key} sha256 {expect[key]}")
    return "\n".join(out) + "\n"
