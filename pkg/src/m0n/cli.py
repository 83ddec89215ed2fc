"""Command-line front end.

Every verb builds a report dictionary and prints it either as an indented
human summary or as sorted ``key=value`` lines (``--format machine``).

Exit status: 0 on success, 1 when the answer is a mathematical negative
(not F-nef, not effective, no certificate), 2 for usage errors and
unreadable input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Optional

from . import chambers6, symscan
from .combinat import DomainError, FCurve, SymmetryGroup, fcurve_orbits, fcurves
from .docio import DocumentError, divisor_to_doc, dump_divisor, format_rational, load_divisor, machine_lines
from .effective import effective_membership
from .exactla import extreme_rays
from .intersect import dot, fnef, pairing_vector
from .picard import MAX_CONTEXT_N, DivisorClass, InvarianceError, invariant_basis, pic_context, picard_dimension

VERBS = ("dim", "convert", "intersect", "fnef", "decompose", "chamber", "classify-fib", "sym-ineqs", "sym-scan", "m62", "certify", "rays")


class UsageError(Exception):
    pass


class Negative(Exception):
    """A well-posed question whose answer is no; carries the report."""

    def __init__(self, title: str, report: dict):
        super().__init__(title)
        self.title = title
        self.report = report


# ---------------------------------------------------------------------------
# helpers


def _need(args, name: str):
    value = getattr(args, name)
    if value is None:
        flag = {"input": "in", "output": "out"}.get(name, name)
        raise UsageError(f"{args.verb} needs --{flag}")
    return value


def _divisor(args) -> DivisorClass:
    D = load_divisor(_need(args, "input"))
    if args.n is not None and args.n != D.n:
        raise DocumentError(f"document has n={D.n} but --n {args.n} was given", "n")
    return D


def _group(args, n: int) -> Optional[SymmetryGroup]:
    if args.group is None:
        return None
    try:
        return SymmetryGroup.parse(n, args.group)
    except (DomainError, ValueError) as exc:
        raise DocumentError(str(exc), "group") from None


def _q(x) -> str:
    return format_rational(Fraction(x))


def _vec(v) -> str:
    return "(" + ",".join(_q(x) for x in v) + ")"


def _parse_curve(n: int, text: str) -> FCurve:
    try:
        blocks = [frozenset(int(t) for t in part.split(",") if t.strip()) for part in text.split("|")]
        return FCurve(n, tuple(blocks))
    except (ValueError, DomainError) as exc:
        raise DocumentError(f"bad F-curve {text!r}: {exc}", "curve") from None


def _decomposition_doc(dec) -> dict:
    return {bc.label(): _q(v) for bc, v in sorted(dec.coefficients.items()) if v}


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise DocumentError(f"cannot write: {exc.strerror}", str(path)) from None


# ---------------------------------------------------------------------------
# verbs


def cmd_dim(args):
    n = _need(args, "n")
    if n < 4:
        raise UsageError("--n must be at least 4")
    formula = picard_dimension(n)
    report = {"n": n, "dimension": formula}
    if n <= MAX_CONTEXT_N:
        report["relation_rank_checked"] = pic_context(n).dimension == formula
    return "dimension", report


def cmd_convert(args):
    D = _divisor(args)
    R = pic_context(D.n).reduce(D)
    text = dump_divisor(R)
    _write(args.output, text)
    return "normal form", {"divisor": divisor_to_doc(R)}


def cmd_intersect(args):
    D = _divisor(args)
    if args.curve:
        f = _parse_curve(D.n, args.curve)
        return "pairing", {"curve": repr(f), "value": dot(D, f)}
    group = _group(args, D.n)
    curves = [f for f, _ in fcurve_orbits(group)] if group else list(fcurves(D.n))
    return "pairings", {"pairings": {repr(f): dot(D, f) for f in curves}}


def cmd_fnef(args):
    D = _divisor(args)
    group = _group(args, D.n)
    res = fnef(D, group)
    if not res:
        raise Negative("not F-nef", {"fnef": False, "witness": repr(res.witness), "value": res.value})
    return "F-nef", {"fnef": True, "curves_checked": res.checked}


def cmd_decompose(args):
    D = _divisor(args)
    n = D.n
    group = _group(args, n)
    res = fnef(D, group)
    if not res:
        raise Negative("not F-nef", {"fnef": False, "witness": repr(res.witness), "value": res.value})
    if n == 6 and group is None:
        dec = chambers6.decompose_effective(D)
        return "effective decomposition", {"method": dec.note, "decomposition": _decomposition_doc(dec)}
    ctx = pic_context(n)
    mem = effective_membership(ctx, D, group)
    if not mem:
        cert = mem.outcome.certificate or {}
        raise Negative("not in the boundary cone", {"member": False, "farkas": {k: [_q(x) for x in v] if isinstance(v, list) else str(v) for k, v in cert.items()}})
    mem.decomposition.verify(ctx)
    return "effective decomposition", {"method": "lp", "decomposition": _decomposition_doc(mem.decomposition)}


def cmd_chamber(args):
    D = _divisor(args)
    if D.n != 6:
        raise DocumentError("chamber works on n = 6", "n")
    if not fnef(D):
        raise Negative("not F-nef", {"fnef": False})
    rep = chambers6.chamber(D, check_nef=False)
    return "chamber", {
        "label": rep.label,
        "labels": list(rep.labels),
        "faces": list(rep.faces),
        "zeta": {bc.label(): v for bc, v in sorted(rep.zeta.all().items())},
    }


def cmd_classify(args):
    D = _divisor(args)
    if D.n not in (5, 6):
        raise DocumentError("the fibration classifier works on n = 5, 6", "n")
    if not fnef(D):
        raise Negative("not F-nef", {"fnef": False})
    fc = chambers6.classify_fibration(D, check_nef=False)
    report = {"type": fc.describe(), "tag": fc.tag}
    for k, v in fc.evidence.items():
        report[f"evidence.{k}"] = _evidence(v)
    return "fibration type", report


def _evidence(v):
    if isinstance(v, (int, str, Fraction, bool)):
        return v
    if isinstance(v, chambers6.BigWitness):
        label = "" if v.labeling is None else " labeling " + ",".join(map(str, v.labeling))
        return f"{v.kind} epsilon {_q(v.epsilon) if v.epsilon is not None else 'none'}{label}"
    return repr(v)


def cmd_sym_ineqs(args):
    n = _need(args, "n")
    rows = {}
    seen = set()
    for q in symscan.sym_fineqs(n):
        key = q.normalized()
        if not any(key[1]) and key[0] >= 0:
            continue
        if key in seen:
            continue
        seen.add(key)
        rows["(" + ",".join(map(str, q.shape)) + ")"] = q.text()
    return f"{len(rows)} symmetric F-inequalities", {"n": n, "count": len(rows), "inequalities": rows}


def cmd_sym_scan(args):
    n = _need(args, "n")
    rep = symscan.scan_bounds(n)
    _, ineqs = cmd_sym_ineqs(args)
    entries = {}
    for e in rep.entries:
        key = f"slice{e.slice}.r{e.target}"
        entries[key] = e.status if e.status != "optimal" else f"{_q(e.value)} at {_vec(e.vertex)}"
    report = {
        "n": n,
        "inequalities": ineqs["inequalities"],
        "max": rep.max_value(),
        "exceptional": [_vec(v) for v in rep.exceptional],
        "violations": [
            f"slice{e.slice}.r{e.target}={'unbounded' if e.value is None else _q(e.value)}"
            + ("" if iv is None else f" interval [{_q(iv[0])},{'inf' if iv[1] is None else _q(iv[1])}]")
            for e, iv in rep.violations
        ],
        "entries": entries,
    }
    return "symmetric scan", report


def cmd_m62(args):
    if args.input is None:
        census = symscan.m62_census()
        cert = symscan.m62_b2_certificate()
        return "invariant F-inequalities on M_{0,8}/S_6", {
            "orbits": census["orbits"],
            "distinct_forms": census["distinct_forms"],
            "redundant": list(census["redundant"]),
            "irredundant": census["irredundant"],
            "b2_nonnegative_certificate": cert is not None,
        }
    D = _divisor(args)
    if D.n != 8:
        raise DocumentError("m62 works on n = 8", "n")
    try:
        res = symscan.m62_decompose(D)
    except symscan.PreconditionError as exc:
        raise Negative("not F-nef", {"fnef": False, "reason": str(exc)}) from None
    except InvarianceError:
        raise DocumentError("divisor is not invariant under S_6 on labels 1..6", "document") from None
    return "m62 decomposition", {
        "branch": res.branch,
        "coords": dict(res.coords),
        "coefficients": dict(res.coefficients),
    }


def cmd_certify(args):
    if args.check:
        try:
            with open(args.check, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise DocumentError(f"cannot read: {exc.strerror}", args.check) from None
        except json.JSONDecodeError as exc:
            raise DocumentError(f"not valid JSON ({exc.msg})", args.check) from None
        try:
            symscan.verify_certificate(doc)
        except (AssertionError, KeyError, TypeError) as exc:
            raise Negative("certificate rejected", {"valid": False, "reason": str(exc)}) from None
        return "certificate", {"valid": True, "n": doc["n"], "children": len(doc["children"])}
    D = _divisor(args)
    group = _group(args, D.n) or SymmetryGroup.trivial(D.n)
    try:
        cert = symscan.certify_nef(D, group)
    except symscan.PreconditionError as exc:
        raise Negative("not F-nef", {"fnef": False, "reason": str(exc)}) from None
    doc = cert.to_document()
    _write(args.output, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    report = {
        "certified": cert.certified,
        "n": cert.n,
        "group": doc["group"],
        "root_method": cert.root.method,
        "children": {repr(c.restriction): c.method for c in cert.children},
        "leaves": list(cert.leaves),
    }
    if not cert.certified:
        report["failure"] = repr(cert.failure.restriction) if cert.failure.restriction else "root"
        raise Negative("no certificate", report)
    return "nef certificate", report


def cmd_rays(args):
    n = _need(args, "n")
    if not 4 <= n <= MAX_CONTEXT_N:
        raise UsageError(f"--n must be between 4 and {MAX_CONTEXT_N}")
    ctx = pic_context(n)
    group = _group(args, n)
    if group is None or group.is_trivial():
        if n > 6:
            raise UsageError("without a group the ray enumeration is limited to n <= 6")
        names = [repr(s) for s in ctx.basis]
        rows = [pairing_vector(ctx, f) for f in fcurves(n)]
    else:
        names, classes = invariant_basis(ctx, group)
        rows = [tuple(dot(c, f) for c in classes) for f, _ in fcurve_orbits(group)]
    rays = extreme_rays(rows, len(names))
    shown = list(rays)
    if args.sample is not None and args.sample < len(shown):
        rng = random.Random(args.seed)
        shown = sorted(rng.sample(shown, args.sample))
    return "extreme rays of the F-nef cone", {
        "n": n,
        "basis": list(names),
        "count": len(rays),
        "rays": {str(k): " ".join(map(str, r)) for k, r in enumerate(shown)},
    }


HANDLERS = {
    "dim": cmd_dim,
    "convert": cmd_convert,
    "intersect": cmd_intersect,
    "fnef": cmd_fnef,
    "decompose": cmd_decompose,
    "chamber": cmd_chamber,
    "classify-fib": cmd_classify,
    "sym-ineqs": cmd_sym_ineqs,
    "sym-scan": cmd_sym_scan,
    "m62": cmd_m62,
    "certify": cmd_certify,
    "rays": cmd_rays,
}


# ---------------------------------------------------------------------------
# output


def _human(title: str, report: dict) -> list:
    lines = [title]

    def walk(value, indent):
        pad = "  " * indent
        for k, v in value.items():
            if isinstance(v, dict):
                lines.append(f"{pad}{k}:")
                walk(v, indent + 1)
            elif isinstance(v, (list, tuple)):
                lines.append(f"{pad}{k}:" + ("" if v else " none"))
                for item in v:
                    lines.append(f"{pad}  {_scalar(item)}")
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")

    walk(report, 1)
    return lines


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, Fraction):
        return format_rational(v)
    if v is None:
        return "none"
    return str(v)


def _emit(fmt: str, title: str, report: dict, stream) -> None:
    lines = machine_lines(report) if fmt == "machine" else _human(title, report)
    stream.write("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="m0n", description="Exact divisor computations on M_{0,n}.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--n", type=int)
    p.add_argument("--group", help="'none', 'full' or 'sym:g' (S_g on labels 1..g)")
    p.add_argument("--in", dest="input", metavar="PATH", help="divisor document (JSON)")
    p.add_argument("--out", dest="output", metavar="PATH", help="write the resulting document here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--curve", help="F-curve for intersect, e.g. '1,2|3|4|5,6'")
    p.add_argument("--sample", type=int, help="rays: print a seeded sample of this size")
    p.add_argument("--check", metavar="PATH", help="certify: verify an existing certificate document")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        title, report = HANDLERS[args.verb](args)
    except Negative as neg:
        _emit(args.format, neg.title, neg.report, sys.stdout)
        return 1
    except UsageError as exc:
        sys.stderr.write(f"m0n {args.verb}: {exc}\n")
        return 2
    except (DocumentError, DomainError, InvarianceError) as exc:
        sys.stderr.write(f"m0n {args.verb}: {exc}\n")
        return 2
    _emit(args.format, title, report, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
