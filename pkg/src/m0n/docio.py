"""Divisor documents and report formatting.

A divisor document is a JSON object::

    {"n": 6, "psi": {"1": "1/2"}, "boundary": {"[1,2]": "3", "[1,2,3]": "-1/3"}}

Rationals are ``"p/q"`` strings.  Boundary keys name either side of the
split; they are canonicalized on input and merged.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable

from .combinat import BoundaryClass, DomainError
from .exactla import format_rational, parse_rational
from .picard import DivisorClass, Psi

__all__ = [
    "DocumentError",
    "divisor_to_doc",
    "divisor_from_doc",
    "load_divisor",
    "dump_divisor",
    "format_rational",
    "parse_rational",
    "machine_lines",
    "human_lines",
]


class DocumentError(ValueError):
    """A document could not be read; ``field`` names the offending entry."""

    def __init__(self, message: str, field: str = ""):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


def divisor_to_doc(D: DivisorClass) -> dict:
    psi, boundary = {}, {}
    for sym, v in D.items():
        if isinstance(sym, Psi):
            psi[str(sym.i)] = format_rational(v)
        else:
            boundary[sym.label()] = format_rational(v)
    return {"n": D.n, "psi": psi, "boundary": boundary}


def _rational(text, field: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise DocumentError("expected a rational string 'p/q'", field)
    try:
        return parse_rational(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(str(exc), field) from None


def _subset(key: str, field: str) -> frozenset:
    body = key.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise DocumentError("boundary keys look like '[i,j,...]'", field)
    try:
        items = [int(t) for t in body[1:-1].split(",") if t.strip()]
    except ValueError:
        raise DocumentError("boundary keys must list integer labels", field) from None
    if len(set(items)) != len(items):
        raise DocumentError("repeated label in boundary key", field)
    return frozenset(items)


def divisor_from_doc(doc) -> DivisorClass:
    if not isinstance(doc, dict):
        raise DocumentError("a divisor document is a JSON object", "document")
    if "n" not in doc:
        raise DocumentError("missing", "n")
    n = doc["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 4:
        raise DocumentError("n must be an integer >= 4", "n")
    extra = set(doc) - {"n", "psi", "boundary"}
    if extra:
        raise DocumentError("unknown field", sorted(extra)[0])
    coeffs: dict = {}
    psi = doc.get("psi", {}) or {}
    if not isinstance(psi, dict):
        raise DocumentError("expected a mapping", "psi")
    for key, val in psi.items():
        field = f"psi.{key}"
        try:
            i = int(key)
        except ValueError:
            raise DocumentError("psi keys are labels", field) from None
        if not 1 <= i <= n:
            raise DocumentError(f"label outside 1..{n}", field)
        coeffs[Psi(i)] = coeffs.get(Psi(i), Fraction(0)) + _rational(val, field)
    boundary = doc.get("boundary", {}) or {}
    if not isinstance(boundary, dict):
        raise DocumentError("expected a mapping", "boundary")
    for key, val in boundary.items():
        field = f"boundary.{key}"
        S = _subset(key, field)
        try:
            bc = BoundaryClass(n, S)
        except DomainError as exc:
            raise DocumentError(str(exc), field) from None
        coeffs[bc] = coeffs.get(bc, Fraction(0)) + _rational(val, field)
    return DivisorClass(n, coeffs)


def load_divisor(path) -> DivisorClass:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read: {exc.strerror}", str(path)) from None
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON ({exc.msg} at line {exc.lineno})", str(path)) from None
    return divisor_from_doc(doc)


def dump_divisor(D: DivisorClass) -> str:
    return json.dumps(divisor_to_doc(D), indent=2, sort_keys=True) + "\n"


def _flatten(prefix: str, value, out: list):
    if isinstance(value, dict):
        for k in sorted(value, key=str):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in value):
            out.append((prefix, " ".join(_scalar(v) for v in value)))
        else:
            for i, v in enumerate(value):
                _flatten(f"{prefix}.{i}", v, out)
    else:
        out.append((prefix, _scalar(value)))


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return format_rational(v)
    if v is None:
        return "none"
    return str(v)


def machine_lines(report: dict) -> list:
    """``key=value`` lines with dotted keys in sorted order."""
    out: list = []
    _flatten("", report, out)
    return [f"{k}={v}" for k, v in out]


def human_lines(title: str, rows: Iterable) -> list:
    rows = list(rows)
    width = max((len(str(k)) for k, _ in rows), default=0)
    return [title] + [f"  {str(k).ljust(width)}  {_scalar(v)}" for k, v in rows]
