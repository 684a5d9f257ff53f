"""Line-oriented system files.

::

    # comments run to the end of the line
    relation R1: x^2 + 3*abs(x - y) - 5 = 0
    var x, y in [-2, 2) res 50
    expose x
    tol R1 0.1
    tol * 0.05
"""
from __future__ import annotations

import re

from .errors import PixelArrayError, SystemFileError
from .expr import parse_relation
from .plot import DEFAULT_TOLERANCE
from .solver import SystemSpec

_NAME = r"[A-Za-z_][A-Za-z_0-9]*"
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_RELATION = re.compile(rf"relation\s+({_NAME})\s*:(.*)$")
_VAR = re.compile(
    rf"var\s+({_NAME}(?:\s*,\s*{_NAME})*)\s+in\s+\[\s*({_NUM})\s*,\s*({_NUM})\s*\)\s+res\s+(\d+)\s*$"
)
_EXPOSE = re.compile(rf"expose\s+({_NAME}(?:\s*,\s*{_NAME})*)\s*$")
_TOL = re.compile(rf"tol\s+({_NAME}|\*)\s+({_NUM})\s*$")


def _names(text):
    return [n.strip() for n in text.split(",")]


def parse_system(text: str) -> SystemSpec:
    relations = []
    varspecs: dict[str, tuple[float, float, int]] = {}
    exposed: list[str] = []
    tolerances: dict[str, float] = {}
    default = DEFAULT_TOLERANCE
    seen_ids: dict[str, int] = {}
    tol_lines: dict[str, int] = {}
    expose_line = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword = line.split(None, 1)[0]
        if keyword == "relation":
            m = _RELATION.match(line)
            if not m:
                raise SystemFileError("expected 'relation <id>: <expr> <cmp> <expr>'", lineno)
            rid, body = m.group(1), m.group(2)
            if rid in seen_ids:
                raise SystemFileError(
                    f"relation {rid!r} already defined on line {seen_ids[rid]}", lineno
                )
            try:
                relations.append(parse_relation(rid, body))
            except PixelArrayError as err:
                raise SystemFileError(str(err), lineno) from None
            seen_ids[rid] = lineno
        elif keyword == "var":
            m = _VAR.match(line)
            if not m:
                raise SystemFileError("expected 'var <names> in [<lo>,<hi>) res <r>'", lineno)
            lo, hi, res = float(m.group(2)), float(m.group(3)), int(m.group(4))
            if not lo < hi:
                raise SystemFileError(f"empty range [{lo}, {hi})", lineno)
            if res < 2:
                raise SystemFileError(f"resolution {res} < 2", lineno)
            for name in _names(m.group(1)):
                if name in varspecs:
                    raise SystemFileError(f"variable {name!r} declared twice", lineno)
                varspecs[name] = (lo, hi, res)
        elif keyword == "expose":
            m = _EXPOSE.match(line)
            if not m:
                raise SystemFileError("expected 'expose <name>[,<name>...]'", lineno)
            for name in _names(m.group(1)):
                if name in exposed:
                    raise SystemFileError(f"variable {name!r} exposed twice", lineno)
                exposed.append(name)
            expose_line = lineno
        elif keyword == "tol":
            m = _TOL.match(line)
            if not m:
                raise SystemFileError("expected 'tol <id|*> <eps>'", lineno)
            eps = float(m.group(2))
            if not eps > 0:
                raise SystemFileError(f"tolerance must be positive, got {eps}", lineno)
            if m.group(1) == "*":
                default = eps
            else:
                tolerances[m.group(1)] = eps
                tol_lines[m.group(1)] = lineno
        else:
            raise SystemFileError(f"unknown statement {keyword!r}", lineno)

    if not relations:
        raise SystemFileError("no relations")
    for rid, lineno in tol_lines.items():
        if rid not in seen_ids:
            raise SystemFileError(f"tolerance for unknown relation {rid!r}", lineno)
    used = set()
    for rel in relations:
        for v in rel.variables:
            if v not in varspecs:
                raise SystemFileError(
                    f"variable {v!r} of relation {rel.id!r} has no 'var' line",
                    seen_ids[rel.id],
                )
        used.update(rel.variables)
    if not exposed:
        raise SystemFileError("no 'expose' line")
    for name in exposed:
        if name not in varspecs:
            raise SystemFileError(f"exposed variable {name!r} has no 'var' line", expose_line)
        if name not in used:
            raise SystemFileError(f"exposed variable {name!r} appears in no relation", expose_line)
    return SystemSpec(relations, varspecs, exposed, tolerances, default)


def format_system(spec: SystemSpec) -> str:
    lines = [f"relation {r.id}: {r.text}" for r in spec.relations]
    for name, (lo, hi, res) in sorted(spec.varspecs.items()):
        lines.append(f"var {name} in [{lo!r}, {hi!r}) res {res}")
    lines.append("expose " + ", ".join(spec.exposed))
    if spec.default_tolerance != DEFAULT_TOLERANCE:
        lines.append(f"tol * {spec.default_tolerance!r}")
    for rid, eps in spec.tolerances.items():
        lines.append(f"tol {rid} {eps!r}")
    return "\n".join(lines) + "\n"
