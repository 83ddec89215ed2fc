"""Symmetric divisor classes, symmetric F-inequalities and the ``K + Delta_E`` scans,
the invariant decompositions on ``M_{0,8}/S_6`` and ``M_{0,n}/S_{n-1}``, and
recursive nef certificates over boundary restrictions.

Symmetric classes are written ``Sigma r_i B_i`` with ``B_i`` the sum of every
boundary class of size ``i`` (each class counted once, so ``B_{n/2}`` uses one
representative per class).  Indices are read with ``r_k = r_{min(k, n-k)}``
and ``r_0 = r_1 = 0``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Optional, Sequence

from .combinat import (
    BoundaryClass,
    BoundaryRestriction,
    DomainError,
    FCurve,
    SymmetryGroup,
    boundary_classes,
    fcurve_orbits,
    fcurves,
    partitions_into,
    restriction_orbits,
)
from .effective import EffectiveDecomposition, effective_membership
from .exactla import ONE, ZERO, LPProblem, lp, polytope_vertices, verify_outcome
from .intersect import dot, fnef, pullback
from .picard import (
    MAX_CONTEXT_N,
    DivisorClass,
    PicContext,
    Psi,
    check_invariant,
    invariant_coords,
    m62_basis,
    named_class,
    onepoint_basis,
    pic_context,
    psi_weight,
)

__all__ = [
    "SymClass",
    "f_value",
    "FIneq",
    "sym_fineqs",
    "sym_dot",
    "ScanEntry",
    "ScanReport",
    "scan_bounds",
    "sym_fnef",
    "family_endpoints",
    "sym_pullback",
    "sym_pullback_divisor",
    "canonical_b_coords",
    "OrbitForms",
    "orbit_forms",
    "dual_certificate",
    "M62Decomposition",
    "m62_decompose",
    "onepoint_decompose",
    "effective_membership",
    "CertNode",
    "NefCertificate",
    "certify_nef",
    "verify_certificate",
    "FalsificationError",
    "PreconditionError",
]


class PreconditionError(ValueError):
    pass


class FalsificationError(ArithmeticError):
    """A coefficient that the argument claims is nonnegative came out negative."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}


def _half(n: int) -> int:
    return n // 2


def _reflect(n: int, k: int) -> int:
    k = min(k, n - k)
    return k if k >= 2 else 0


# ---------------------------------------------------------------------------
# symmetric classes


@dataclass(frozen=True)
class SymClass:
    """``K + Sigma r_i B_i`` (``with_K``) or ``Sigma r_i B_i`` on ``M_{0,n}``; ``r`` lists ``r_2..r_{n//2}``."""

    n: int
    r: tuple
    with_K: bool = True

    def __post_init__(self):
        if self.n < 4:
            raise DomainError("symmetric classes need n >= 4")
        r = tuple(Fraction(x) for x in self.r)
        if len(r) != _half(self.n) - 1:
            raise DomainError(f"expected {_half(self.n) - 1} coordinates r_2..r_{_half(self.n)}")
        object.__setattr__(self, "r", r)

    @classmethod
    def from_map(cls, n: int, values: dict, with_K: bool = True) -> "SymClass":
        return cls(n, tuple(Fraction(values.get(i, 0)) for i in range(2, _half(n) + 1)), with_K)

    def coeff(self, k: int) -> Fraction:
        k = _reflect(self.n, k)
        return self.r[k - 2] if k else ZERO

    def as_map(self) -> dict:
        return {i: v for i, v in zip(range(2, _half(self.n) + 1), self.r)}

    def divisor(self) -> DivisorClass:
        out = {bc: self.coeff(bc.size) for bc in boundary_classes(self.n)}
        D = DivisorClass(self.n, out)
        if self.with_K:
            D = D + named_class(self.n, "canonical")
        return D

    def describe(self) -> str:
        terms = [f"{v}*B_{i}" for i, v in self.as_map().items() if v]
        body = " + ".join(terms) if terms else "0"
        return f"K + {body}" if self.with_K else body


def canonical_b_coords(n: int) -> dict:
    """``K`` in B-coordinates, computed as ``Sigma psi_i - 2 Delta`` with psi averaged.

    The coefficient of a class ``delta_T`` collects the averaged psi terms of
    the points inside and outside ``T``; every class of a given size must get
    the same value.
    """
    out = {}
    for t in range(2, _half(n) + 1):
        T = frozenset(range(1, t + 1))
        v = ZERO
        for i in range(1, n + 1):
            # psi_i averages over classes containing i, read on the side holding i
            side = t if i in T else n - t
            v += psi_weight(n, side - 1)
        out[t] = v - 2
    return out


# ---------------------------------------------------------------------------
# symmetric F-inequalities


def _check_shape(shape) -> tuple:
    shape = tuple(int(a) for a in shape)
    if len(shape) != 4 or any(a < 1 for a in shape):
        raise DomainError("a shape is four positive integers")
    return shape


def f_value(shape) -> int:
    """``2`` minus the number of parts equal to one."""
    shape = _check_shape(shape)
    return 2 - sum(1 for a in shape if a == 1)


@dataclass(frozen=True)
class FIneq:
    """``constant + Sigma coeffs_i r_i >= 0`` for one partition shape."""

    n: int
    shape: tuple
    constant: int
    coeffs: tuple  # integers for r_2..r_{n//2}

    def evaluate(self, r: Sequence) -> Fraction:
        return self.constant + sum((c * Fraction(x) for c, x in zip(self.coeffs, r) if c), ZERO)

    def row(self) -> tuple:
        return tuple(Fraction(c) for c in self.coeffs)

    def normalized(self) -> tuple:
        """``(constant, coeffs)`` divided by their positive gcd."""
        g = 0
        for v in (self.constant,) + self.coeffs:
            g = gcd(g, abs(v))
        g = g or 1
        return (self.constant // g, tuple(c // g for c in self.coeffs))

    def text(self) -> str:
        """Positive terms on the left, e.g. ``3r_2 >= r_3 + 1``."""
        left, right = [], []

        def term(c, i):
            return f"{abs(c) if abs(c) != 1 else ''}r_{i}"

        if self.constant > 0:
            left.append(str(self.constant))
        for i, c in zip(range(2, _half(self.n) + 1), self.coeffs):
            if c > 0:
                left.append(term(c, i))
            elif c < 0:
                right.append(term(c, i))
        if self.constant < 0:
            right.append(str(-self.constant))
        return f"{' + '.join(left) or '0'} >= {' + '.join(right) or '0'}"


def _form(n: int, shape: tuple) -> list:
    coeffs = [0] * (_half(n) - 1)
    a = shape[0]
    for other in shape[1:]:
        k = _reflect(n, a + other)
        if k:
            coeffs[k - 2] += 1
    for part in shape:
        k = _reflect(n, part)
        if k:
            coeffs[k - 2] -= 1
    return coeffs


@lru_cache(maxsize=None)
def sym_fineqs(n: int) -> tuple:
    """One inequality per partition of ``n`` into four parts, in decreasing shape order."""
    if n < 4:
        raise DomainError("F-curves need n >= 4")
    return tuple(FIneq(n, s, f_value(s), tuple(_form(n, s))) for s in partitions_into(n, 4))


def sym_dot(cls: SymClass, shape) -> Fraction:
    shape = tuple(sorted(_check_shape(shape), reverse=True))
    if sum(shape) != cls.n:
        raise DomainError("shape does not sum to n")
    v = sum((c * x for c, x in zip(_form(cls.n, shape), cls.r) if c), ZERO)
    return v + f_value(shape) if cls.with_K else v


def shape_curve(n: int, shape) -> FCurve:
    """The F-curve with consecutive-label blocks of the given sizes."""
    shape = _check_shape(shape)
    blocks, start = [], 1
    for a in shape:
        blocks.append(frozenset(range(start, start + a)))
        start += a
    return FCurve(n, tuple(blocks))


def sym_fnef(cls: SymClass) -> tuple:
    """``(nef, violated shapes)`` for a symmetric class."""
    bad = tuple(q.shape for q in sym_fineqs(cls.n) if sym_dot(cls, q.shape) < 0)
    return (not bad, bad)


# ---------------------------------------------------------------------------
# scans


@dataclass(frozen=True)
class ScanEntry:
    slice: int
    target: int
    status: str  # optimal, infeasible (empty slice) or unbounded
    value: Optional[Fraction]
    vertex: Optional[tuple]


@dataclass(frozen=True)
class ScanReport:
    n: int
    inequalities: tuple
    entries: tuple
    exceptional: tuple  # r-vectors with some coordinate equal to 1 on a slice
    exceptional_faces: tuple  # (slice, target, vertices, rays) per optimal face at value 1
    violations: tuple  # (entry, interval) with value > 1 or unbounded

    @property
    def bounded(self) -> bool:
        return all(e.status != "unbounded" for e in self.entries)

    def empty_slices(self) -> tuple:
        return tuple(sorted({e.slice for e in self.entries if e.status == "infeasible"}))

    def max_value(self) -> Optional[Fraction]:
        vals = [e.value for e in self.entries if e.status == "optimal"]
        return max(vals) if vals else None


def _scan_constraints(n: int, slice_index: int):
    k = _half(n) - 1
    ins = tuple((q.row(), Fraction(-q.constant)) for q in sym_fineqs(n))
    eq = tuple(Fraction(1) if j == slice_index - 2 else ZERO for j in range(k))
    return k, ins, ((eq, ZERO),)


def _interval(n: int, vertex: tuple, target: int) -> tuple:
    """Feasible values of ``r_target`` with the other coordinates fixed at ``vertex``."""
    lo, hi = ZERO, None
    j = target - 2
    for q in sym_fineqs(n):
        c = q.coeffs[j]
        rest = q.constant + sum((cc * x for t, (cc, x) in enumerate(zip(q.coeffs, vertex)) if t != j and cc), ZERO)
        if c > 0:
            lo = max(lo, -rest / c)
        elif c < 0:
            b = -rest / c
            hi = b if hi is None else min(hi, b)
        elif rest < 0:
            return None
    if hi is not None and hi < lo:
        return None
    return (lo, hi)


def scan_bounds(n: int) -> ScanReport:
    """Maximize each ``r_j`` over ``{F-inequalities, r >= 0, r_i = 0}`` for every slice ``i``."""
    if not 8 <= n <= 16:
        raise DomainError("scans are supported for 8 <= n <= 16")
    h = _half(n)
    entries, faces, exceptional, violations = [], [], set(), []
    for i in range(2, h + 1):
        k, ins, eqs = _scan_constraints(n, i)
        for j in range(2, h + 1):
            if j == i:
                continue
            obj = tuple(ONE if t == j - 2 else ZERO for t in range(k))
            prob = LPProblem(k, eqs, ins, obj, "maximize", frozenset(range(k)))
            out = lp(prob)
            verify_outcome(prob, out)
            if out.status == "infeasible":
                # the slice itself is empty; the Farkas multipliers were checked above
                entries.append(ScanEntry(i, j, "infeasible", None, None))
                continue
            if out.status == "unbounded":
                e = ScanEntry(i, j, "unbounded", None, None)
                entries.append(e)
                violations.append((e, None))
                continue
            e = ScanEntry(i, j, "optimal", out.value, tuple(out.witness))
            for q in sym_fineqs(n):
                if q.evaluate(e.vertex) < 0:
                    raise ArithmeticError("reported vertex violates an F-inequality")
            entries.append(e)
            if out.value == 1:
                A = [list(r) for r, _ in ins] + [[ONE if t == s else ZERO for t in range(k)] for s in range(k)]
                b = [rhs for _, rhs in ins] + [ZERO] * k
                for row in (eqs[0][0], obj):
                    val = ZERO if row is eqs[0][0] else ONE
                    A += [list(row), [-x for x in row]]
                    b += [val, -val]
                verts, rays = polytope_vertices(A, b)
                faces.append((i, j, tuple(verts), tuple(rays)))
                exceptional.update(verts)
            elif out.value > 1:
                violations.append((e, _interval(n, e.vertex, j)))
    return ScanReport(
        n,
        sym_fineqs(n),
        tuple(entries),
        tuple(sorted(exceptional)),
        tuple(faces),
        tuple(violations),
    )


def family_endpoints(n: int, base: dict, target: int, values: Sequence) -> list:
    """F-nef status of ``K + Sigma base_i B_i + v B_target`` for each value ``v``."""
    out = []
    for v in values:
        m = dict(base)
        m[target] = Fraction(v)
        cls = SymClass.from_map(n, m)
        ok, bad = sym_fnef(cls)
        out.append((Fraction(v), ok and all(x >= 0 for x in cls.r), bad))
    return out


# ---------------------------------------------------------------------------
# pullback of symmetric classes along boundary restrictions


def _multi_positions(nu: BoundaryRestriction) -> tuple:
    return tuple(p for p, b in enumerate(nu.blocks, start=1) if len(b) >= 2)


def sym_pullback(r: SymClass, nu: BoundaryRestriction) -> dict:
    """``{(i, S): c_i^S}`` for a pure boundary symmetric class, ``S`` a set of positions with ``n_x >= 2``."""
    if r.with_K:
        raise DomainError("sym_pullback takes a class without the K offset")
    if nu.n != r.n:
        raise DomainError("class and restriction live on different n")
    m = nu.m
    X = _multi_positions(nu)
    size = {p: len(b) for p, b in enumerate(nu.blocks, start=1)}
    singles = m - len(X)
    out = {}
    for s in range(len(X) + 1):
        for S in combinations(X, s):
            inside = sum((r.coeff(size[x]) for x in S), ZERO)
            outside = sum((r.coeff(size[x]) for x in X if x not in S), ZERO)
            extra = sum(size[x] for x in S) - len(S)
            for i in range(max(s, 2), min(m - 2, s + singles) + 1):
                c = r.coeff(i + extra) - ((m - i) * (m - 1 - i) * inside + i * (i - 1) * outside) / ((m - 1) * (m - 2))
                out[(i, frozenset(S))] = c
    return out


def sym_pullback_divisor(r: SymClass, nu: BoundaryRestriction) -> DivisorClass:
    """``Sigma c_{|T|}^{T ∩ X} delta_T`` over the boundary classes of ``M_{0,m}``."""
    table = sym_pullback(r, nu)
    X = frozenset(_multi_positions(nu))
    m = nu.m
    if m < 4:
        return DivisorClass.zero(max(m, 3))
    return DivisorClass(m, {bc: table[(bc.size, bc.rep & X)] for bc in boundary_classes(m)})


# ---------------------------------------------------------------------------
# invariant F-inequalities and dual certificates


@dataclass(frozen=True)
class OrbitForms:
    """F-inequalities of an invariant basis: ``rows[k] . coords = D . curves[k]``."""

    group: SymmetryGroup
    names: tuple
    basis: tuple
    curves: tuple
    sizes: tuple
    rows: tuple

    def distinct(self) -> dict:
        out = {}
        for f, row in zip(self.curves, self.rows):
            out.setdefault(row, []).append(f)
        return out

    def redundant(self) -> list:
        """Curves whose inequality follows from the others (LP test, exact)."""
        rows = list(self.distinct().keys())
        out = []
        k = len(self.names)
        for idx, row in enumerate(rows):
            others = tuple((o, ZERO) for j, o in enumerate(rows) if j != idx)
            if not any(row):
                continue
            prob = LPProblem(k, (), others + ((row, Fraction(-1)),), row, "minimize")
            res = lp(prob)
            verify_outcome(prob, res)
            if res.status == "optimal" and res.value >= 0:
                out.append(self.distinct()[row])
        return out


def orbit_forms(ctx: PicContext, group: SymmetryGroup, basis=None) -> OrbitForms:
    from .picard import invariant_basis

    names, classes = basis if basis is not None else invariant_basis(ctx, group)
    curves, sizes, rows = [], [], []
    for f, size in fcurve_orbits(group):
        curves.append(f)
        sizes.append(size)
        rows.append(tuple(dot(c, f) for c in classes))
    return OrbitForms(group, tuple(names), tuple(classes), tuple(curves), tuple(sizes), tuple(rows))


def dual_certificate(rows: Sequence, target: Sequence, extra: Sequence = ()) -> Optional[tuple]:
    """Nonnegative multipliers with ``Sigma lam_k rows_k (+ Sigma mu_e extra_e) = target``, or None."""
    allrows = list(rows) + list(extra)
    if not allrows:
        return None
    k = len(target)
    eqs = tuple((tuple(r[t] for r in allrows), Fraction(target[t])) for t in range(k))
    prob = LPProblem(len(allrows), eqs, (), None, "feasibility", frozenset(range(len(allrows))))
    out = lp(prob)
    verify_outcome(prob, out)
    if out.status != "optimal":
        return None
    lam = tuple(out.witness)
    check = [sum((l * r[t] for l, r in zip(lam, allrows)), ZERO) for t in range(k)]
    assert check == [Fraction(x) for x in target]
    return lam


def _expand(coords: Sequence, classes: Sequence, n: int) -> dict:
    D = DivisorClass.zero(n)
    for c, b in zip(coords, classes):
        if c:
            D = D + b * c
    return {s: v for s, v in D.items()}


# ---------------------------------------------------------------------------
# M_{0,8}/S_6


@dataclass(frozen=True)
class M62Decomposition:
    branch: str  # "b2>=0" or "b2<0"
    coords: dict  # name -> coefficient in the nine-class basis
    coefficients: dict  # name -> coefficient of the returned expression (ten classes in branch ii)
    decomposition: EffectiveDecomposition
    certificates: dict  # name -> multipliers over the orbit inequalities
    census: dict


@lru_cache(maxsize=None)
def _m62_forms() -> OrbitForms:
    ctx = pic_context(8)
    return orbit_forms(ctx, SymmetryGroup.sym(8, 6), m62_basis())


def m62_census() -> dict:
    return dict(_m62_census())


@lru_cache(maxsize=None)
def _m62_census() -> dict:
    forms = _m62_forms()
    distinct = forms.distinct()
    red = forms.redundant()
    return {
        "orbits": len(forms.curves),
        "distinct_forms": len(distinct),
        "redundant": tuple(repr(c) for group in red for c in group),
        "irredundant": len(distinct) - len(red),
    }


@lru_cache(maxsize=None)
def _m62_certificates() -> dict:
    forms = _m62_forms()
    out = {}
    for k, name in enumerate(forms.names):
        e = tuple(ONE if t == k else ZERO for t in range(len(forms.names)))
        out[name] = dual_certificate(forms.rows, e)
    return out


# delta_2 in terms of the other basis classes and delta_xy (invariant coordinates of delta_xy)
_AVM8 = {
    "x1": Fraction(1, 6),
    "y1": Fraction(1, 6),
    "x2": Fraction(4, 15),
    "y2": Fraction(4, 15),
    "x3": Fraction(3, 10),
    "xy1": Fraction(-2, 3),
    "xy2": Fraction(-2, 5),
    "2": Fraction(-1, 15),
    "3": Fraction(-1, 5),
}


def m62_decompose(D: DivisorClass, check_nef: bool = True) -> M62Decomposition:
    """Effective expression for an ``S_6``-invariant F-divisor on ``M_{0,8}`` (``S_6`` on labels 1..6).

    With ``b_2 >= 0`` the nine basis coordinates are returned, each with its
    multipliers over the orbit F-inequalities.  With ``b_2 < 0`` the class
    ``delta_2`` is eliminated through ``delta_xy`` and the ten-class expression
    is returned.
    """
    if D.n != 8:
        raise DomainError("m62_decompose works on M_{0,8}")
    ctx = pic_context(8)
    group = SymmetryGroup.sym(8, 6)
    if check_nef:
        res = fnef(D, group, ctx)
        if not res:
            raise PreconditionError(f"divisor is not F-nef: {res.witness!r} pairs to {res.value}")
    names, classes = m62_basis()
    ic = invariant_coords(ctx, D, group, (names, classes))
    b = ic.as_dict()
    census = m62_census()
    if b["2"] >= 0:
        coeffs = dict(b)
        certs = _m62_certificates()
        branch = "b2>=0"
        expr = _expand([coeffs[k] for k in names], classes, 8)
    else:
        branch = "b2<0"
        b2 = b["2"]
        # delta_2 = 15 (sum of the other avm terms - delta_xy)
        coeffs = {k: b[k] + 15 * b2 * _AVM8[k] for k in names if k != "2"}
        coeffs["xy"] = -15 * b2
        # the ten-class expression carries no multipliers: the branch is empty on F-nef classes
        certs = {k: None for k in coeffs}
        expr = _expand([coeffs[k] for k in names if k != "2"], [c for k, c in zip(names, classes) if k != "2"], 8)
        expr[BoundaryClass(8, frozenset((7, 8)))] = expr.get(BoundaryClass(8, frozenset((7, 8))), ZERO) + coeffs["xy"]
    neg = {k: v for k, v in coeffs.items() if v < 0}
    if neg:
        raise FalsificationError(f"negative coefficients {neg} in branch {branch}", {"coords": b, "coefficients": coeffs})
    dec = EffectiveDecomposition(D, expr, f"m62 {branch}")
    try:
        dec.verify(ctx)
    except AssertionError as exc:
        raise ArithmeticError(f"m62 expression failed verification: {exc}") from exc
    return M62Decomposition(branch, b, coeffs, dec, certs, census)


def m62_b2_certificate() -> Optional[tuple]:
    """Multipliers showing ``b_2 >= 0`` on the whole invariant F-nef cone (None if it fails)."""
    forms = _m62_forms()
    k = forms.names.index("2")
    return dual_certificate(forms.rows, tuple(ONE if t == k else ZERO for t in range(len(forms.names))))


# ---------------------------------------------------------------------------
# M_{0,n}/S_{n-1}


@lru_cache(maxsize=None)
def _onepoint_forms(n: int) -> OrbitForms:
    return orbit_forms(pic_context(n), SymmetryGroup.sym(n, n - 1), onepoint_basis(n, n))


@lru_cache(maxsize=None)
def _onepoint_certificates(n: int) -> dict:
    forms = _onepoint_forms(n)
    out = {}
    for k, name in enumerate(forms.names):
        out[name] = dual_certificate(forms.rows, tuple(ONE if t == k else ZERO for t in range(len(forms.names))))
    return out


@dataclass(frozen=True)
class OnepointDecomposition:
    coords: dict
    decomposition: EffectiveDecomposition
    certificates: dict


def onepoint_decompose(D: DivisorClass, check_nef: bool = True) -> OnepointDecomposition:
    """Coordinates of an ``S_{n-1}``-invariant F-divisor (``S_{n-1}`` on labels 1..n-1) in the classes ``delta^{x,1}_j``."""
    n = D.n
    if n > MAX_CONTEXT_N:
        raise DomainError(f"onepoint_decompose needs n <= {MAX_CONTEXT_N}")
    ctx = pic_context(n)
    group = SymmetryGroup.sym(n, n - 1)
    if check_nef:
        res = fnef(D, group, ctx)
        if not res:
            raise PreconditionError(f"divisor is not F-nef: {res.witness!r} pairs to {res.value}")
    names, classes = onepoint_basis(n, n)
    ic = invariant_coords(ctx, D, group, (names, classes))
    coords = ic.as_dict()
    neg = {k: v for k, v in coords.items() if v < 0}
    if neg:
        raise FalsificationError(f"negative coordinates {neg}", {"coords": coords})
    dec = EffectiveDecomposition(D, _expand(ic.coords, classes, n), "onepoint")
    dec.verify(ctx)
    return OnepointDecomposition(coords, dec, _onepoint_certificates(n))


# ---------------------------------------------------------------------------
# nef certificates


LEAF_FACT = "F-curves generate the Mori cone of M_{0,k} for k <= 7 (external)"


@dataclass(frozen=True)
class CertNode:
    restriction: Optional[BoundaryRestriction]  # None at the root
    group: SymmetryGroup
    divisor: DivisorClass
    method: str
    decomposition: Optional[EffectiveDecomposition]
    relabel: Optional[dict] = None  # position -> label used by the decomposition
    multipliers: Optional[dict] = None
    farkas: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.decomposition is not None


@dataclass(frozen=True)
class NefCertificate:
    n: int
    group: SymmetryGroup
    root: CertNode
    children: tuple
    leaves: tuple
    certified: bool
    failure: Optional[CertNode] = None
    min_k: int = 8

    def to_document(self) -> dict:
        from .docio import divisor_to_doc, format_rational

        def node_doc(node: CertNode) -> dict:
            doc = {
                "restriction": None if node.restriction is None else [sorted(b) for b in node.restriction.blocks],
                "cells": [list(c) for c in node.group.cells],
                "method": node.method,
                "divisor": divisor_to_doc(node.divisor),
            }
            if node.decomposition is not None:
                doc["decomposition"] = {
                    bc.label(): format_rational(v) for bc, v in sorted(node.decomposition.coefficients.items()) if v
                }
            if node.farkas is not None:
                doc["farkas"] = {k: [format_rational(x) for x in v] for k, v in node.farkas.items()}
            return doc

        return {
            "format": "m0n-nef-certificate/1",
            "n": self.n,
            "min_k": self.min_k,
            "group": self.group.describe(),
            "cells": [list(c) for c in self.group.cells],
            "certified": self.certified,
            "root": node_doc(self.root),
            "children": [node_doc(c) for c in self.children],
            "leaves": list(self.leaves),
        }


def _induced_group(group: SymmetryGroup, nu: BoundaryRestriction) -> SymmetryGroup:
    """Singleton positions whose labels share a cell are permuted together; other positions are fixed."""
    cell = group.cell_of
    cells: dict = {}
    fixed = []
    for p, b in enumerate(nu.blocks, start=1):
        if len(b) == 1:
            (x,) = b
            cells.setdefault(cell[x], []).append(p)
        else:
            fixed.append([p])
    return SymmetryGroup(nu.m, tuple(tuple(c) for c in list(cells.values()) + fixed))


def _relabel_for(group: SymmetryGroup, big: int) -> Optional[dict]:
    """Permutation sending ``big`` labels of one cell to ``1..big`` and the rest after them."""
    cells = sorted(group.cells, key=lambda c: -len(c))
    if len(cells[0]) < big:
        return None
    first = list(cells[0][:big])
    rest = [x for x in range(1, group.n + 1) if x not in first]
    order = first + rest
    return {x: k for k, x in enumerate(order, start=1)}


def _decompose_node(D: DivisorClass, group: SymmetryGroup):
    """Pick a decomposition strategy for an invariant class; returns (method, decomposition, relabel, farkas)."""
    n = D.n
    ctx = pic_context(n)
    if n == 8:
        perm = _relabel_for(group, 6)
        if perm is not None:
            E = D.act(perm)
            res = m62_decompose(E, check_nef=True)
            inv = {v: k for k, v in perm.items()}
            back = {bc.__class__(n, frozenset(inv[x] for x in bc.rep)): v for bc, v in res.decomposition.coefficients.items()}
            dec = EffectiveDecomposition(D, back, res.decomposition.note)
            dec.verify(ctx)
            return "m62", dec, perm, None
    if n >= 5:
        perm = _relabel_for(group, n - 1)
        if perm is not None:
            E = D.act(perm)
            res = onepoint_decompose(E, check_nef=True)
            inv = {v: k for k, v in perm.items()}
            back = {bc.__class__(n, frozenset(inv[x] for x in bc.rep)): v for bc, v in res.decomposition.coefficients.items()}
            dec = EffectiveDecomposition(D, back, "onepoint")
            dec.verify(ctx)
            return "onepoint", dec, perm, None
    mem = effective_membership(ctx, D, group)
    if mem.member:
        mem.decomposition.verify(ctx)
        return "lp", mem.decomposition, None, None
    return "lp", None, None, mem.outcome.certificate


def certify_nef(D: DivisorClass, group: Optional[SymmetryGroup] = None, min_k: int = 8) -> NefCertificate:
    """Certificate tree: effective expressions for ``D`` and for every restriction orbit with ``min_k <= k < n``."""
    n = D.n
    if n > MAX_CONTEXT_N:
        raise DomainError(f"certify_nef works with Picard contexts, n <= {MAX_CONTEXT_N}")
    group = group or SymmetryGroup.trivial(n)
    ctx = pic_context(n)
    check_invariant(ctx, D, group)
    res = fnef(D, group, ctx)
    if not res:
        raise PreconditionError(f"divisor is not F-nef: {res.witness!r} pairs to {res.value}")
    method, dec, perm, farkas = _decompose_node(D, group)
    root = CertNode(None, group, D, method, dec, perm, None, farkas)
    if dec is None:
        return NefCertificate(n, group, root, (), (), False, root, min_k)
    children = []
    for k in range(max(min_k, 4), n):
        for nu, _ in restriction_orbits(group, k):
            E = pullback(D, nu)
            sub = _induced_group(group, nu)
            m, d, p, fk = _decompose_node(E, sub)
            node = CertNode(nu, sub, E, m, d, p, None, fk)
            children.append(node)
            if d is None:
                return NefCertificate(n, group, root, tuple(children), (), False, node, min_k)
    leaves = tuple(f"k={k}: {LEAF_FACT}" for k in range(4, min(min_k, n)))
    return NefCertificate(n, group, root, tuple(children), leaves, True, None, min_k)


# ---------------------------------------------------------------------------
# independent verification


def _stirling2(n: int, k: int) -> int:
    row = [1] + [0] * k
    for i in range(1, n + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def _plain_pullback(D: DivisorClass, blocks: list) -> DivisorClass:
    m = len(blocks)
    pos = {x: p for p, b in enumerate(blocks, start=1) for x in b}
    out: dict = {}
    for sym, v in D.items():
        if isinstance(sym, Psi):
            p = pos[sym.i]
            if len(blocks[p - 1]) == 1:
                out[Psi(p)] = out.get(Psi(p), ZERO) + v
            continue
        hit = {pos[x] for x in sym.rep}
        if any(not set(blocks[p - 1]) <= sym.rep for p in hit):
            continue
        if len(hit) in (1, m - 1):
            (p,) = hit if len(hit) == 1 else set(range(1, m + 1)) - hit
            out[Psi(p)] = out.get(Psi(p), ZERO) - v
        else:
            bc = BoundaryClass(m, frozenset(hit))
            out[bc] = out.get(bc, ZERO) + v
    return DivisorClass(m, out)


def verify_certificate(doc: dict) -> bool:
    """Re-check a certificate document using only normal forms and rational arithmetic.

    Raises AssertionError on the first failed check.
    """
    from .docio import divisor_from_doc, parse_rational

    assert doc.get("format") == "m0n-nef-certificate/1", "unknown certificate format"
    n = doc["n"]
    assert doc["certified"], "certificate reports a failure"
    root_div = divisor_from_doc(doc["root"]["divisor"])
    assert root_div.n == n
    cells = [tuple(c) for c in doc["cells"]]
    ctx = pic_context(n)
    nf = ctx.normal_form(root_div)
    for c in cells:
        for a, b in zip(c, c[1:]):
            swap = {a: b, b: a}
            assert ctx.normal_form(root_div.act(swap)) == nf, f"divisor not invariant under ({a} {b})"
    for f in fcurves(n):
        assert dot(root_div, f) >= 0, f"root divisor negative on {f!r}"

    def check_node(node, D):
        dec = node.get("decomposition")
        assert dec is not None, "node without decomposition"
        m = D.n
        coeffs = {}
        for label, v in dec.items():
            q = parse_rational(v)
            assert q >= 0, f"negative coefficient on {label}"
            S = frozenset(int(t) for t in label.strip("[]").split(","))
            coeffs[BoundaryClass(m, S)] = q
        assert pic_context(m).equivalent(DivisorClass(m, coeffs), D), "decomposition is not equivalent to the node divisor"

    check_node(doc["root"], root_div)
    # children: pullbacks recomputed here, one per orbit, orbit sizes add up to all restrictions
    cell_of = {x: i for i, c in enumerate(cells) for x in c}
    seen: dict = {}
    for child in doc["children"]:
        blocks = [frozenset(b) for b in child["restriction"]]
        E = _plain_pullback(root_div, blocks)
        stated = divisor_from_doc(child["divisor"])
        assert pic_context(E.n).equivalent(E, stated), "child divisor is not the pullback"
        check_node(child, stated)
        sig = tuple(sorted(tuple(sorted(Counter(cell_of[x] for x in b).items())) for b in blocks))
        k = len(blocks)
        assert sig not in seen.setdefault(k, set()), "two children in the same orbit"
        seen[k].add(sig)
    # coverage: sum of orbit sizes equals the number of set partitions
    for k in range(max(doc["min_k"], 4), n):
        sigs = seen.get(k, set())
        total = sum(_orbit_size(cells, sig) for sig in sigs)
        assert total == _stirling2(n, k), f"children for k={k} do not cover all restrictions"
    return True


def _orbit_size(cells, sig) -> int:
    from math import factorial

    size = 1
    for ci, c in enumerate(cells):
        ways = factorial(len(c))
        for block in sig:
            ways //= factorial(dict(block).get(ci, 0))
        size *= ways
    for mult in Counter(sig).values():
        size //= factorial(mult)
    return size
