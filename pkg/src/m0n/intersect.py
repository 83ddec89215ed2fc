"""Pairing divisors with F-curves, pullbacks along boundary restrictions,
the curve families used on ``M_{0,5}`` and ``M_{0,6}``, and F-nef tests.

For an F-curve with blocks ``(I, J, K, L)``:

* ``delta_S`` pairs to ``-1`` when ``S`` or its complement is a block,
  ``+1`` when ``S`` is a union of two blocks, and ``0`` otherwise;
* ``psi_i`` pairs to ``1`` when ``{i}`` is a block and ``0`` otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .combinat import (
    BoundaryClass,
    BoundaryRestriction,
    DomainError,
    FCurve,
    SymmetryGroup,
    WeightedCycle,
    fcurve_orbits,
    fcurves,
)
from .exactla import ZERO
from .picard import MAX_CONTEXT_N, DivisorClass, InvarianceError, PicContext, Psi, check_invariant, pic_context

__all__ = [
    "delta_pairing",
    "psi_pairing",
    "dot",
    "dot_cycle",
    "pullback",
    "degree_on_m04",
    "pairing_vector",
    "CurveFamily",
    "family",
    "FAMILY_NAMES",
    "FnefResult",
    "fnef",
    "forget_pullback",
    "forget_labels",
]


def delta_pairing(f: FCurve, subset: frozenset) -> int:
    hit = [b for b in f.blocks if b & subset]
    for b in hit:
        if not b <= subset:
            return 0
    k = len(hit)
    if k == 2:
        return 1
    if k in (1, 3):
        return -1
    return 0


def psi_pairing(f: FCurve, i: int) -> int:
    return 1 if frozenset((i,)) in f.blocks else 0


def symbol_pairing(f: FCurve, sym) -> int:
    if isinstance(sym, Psi):
        return psi_pairing(f, sym.i)
    return delta_pairing(f, sym.rep)


def dot(D: DivisorClass, f: FCurve) -> Fraction:
    if D.n != f.n:
        raise DomainError("divisor and curve live on different n")
    total = ZERO
    for sym, v in D._c.items():
        p = symbol_pairing(f, sym)
        if p:
            total += v * p
    return total


def dot_cycle(D: DivisorClass, cycle: WeightedCycle) -> Fraction:
    return sum((w * dot(D, f) for f, w in cycle.components), ZERO)


def pairing_vector(ctx: PicContext, f: FCurve) -> tuple:
    """Values of ``f`` on the basis symbols of ``ctx`` (so ``dot = vector . normal_form``)."""
    return tuple(Fraction(symbol_pairing(f, s)) for s in ctx.basis)


# ---------------------------------------------------------------------------
# pullback along boundary restrictions


def _positions(nu: BoundaryRestriction, subset: frozenset) -> Optional[frozenset]:
    """Positions whose blocks make up ``subset``, or None when it is not a union of blocks."""
    out = []
    for x, b in enumerate(nu.blocks, start=1):
        inter = b & subset
        if inter:
            if inter != b:
                return None
            out.append(x)
    return frozenset(out)


def pullback(D: DivisorClass, nu: BoundaryRestriction) -> DivisorClass:
    """Pullback to ``M_{0,m}`` with marked points labelled by block positions ``1..m``."""
    if D.n != nu.n:
        raise DomainError("divisor and restriction live on different n")
    m = nu.m
    if m == 3:
        return DivisorClass.zero(3)
    out: dict = {}

    def add(sym, v):
        out[sym] = out.get(sym, ZERO) + v

    for sym, v in D._c.items():
        if isinstance(sym, Psi):
            pos = nu.position_of()[sym.i]
            if len(nu.blocks[pos - 1]) == 1:
                add(Psi(pos), v)
            continue
        A = _positions(nu, sym.rep)
        if A is None:
            continue
        if len(A) == 1 or len(A) == m - 1:
            (x,) = A if len(A) == 1 else tuple(set(range(1, m + 1)) - A)
            add(Psi(x), -v)
        else:
            add(BoundaryClass(m, A), v)
    return DivisorClass(m, out)


def degree_on_m04(D: DivisorClass) -> Fraction:
    """Degree on ``M_{0,4}``: every boundary point and every psi class has degree one."""
    if D.n != 4:
        raise DomainError("degree is defined on M_{0,4}")
    return sum(D._c.values(), ZERO)


# ---------------------------------------------------------------------------
# forgetful maps


def forget_labels(n: int, forget: Iterable[int]) -> dict:
    """Map from the kept labels of ``1..n`` to ``1..n-|forget|`` preserving order."""
    drop = set(forget)
    kept = [x for x in range(1, n + 1) if x not in drop]
    return {x: k for k, x in enumerate(kept, start=1)}


def forget_pullback(E: DivisorClass, n: int, forget: Iterable[int]) -> DivisorClass:
    """Pull a class back along the map ``M_{0,n} -> M_{0,n-|forget|}`` dropping ``forget``.

    Target labels are the kept labels renumbered in order (see :func:`forget_labels`).
    """
    forget = sorted(set(forget))
    labels = forget_labels(n, forget)
    inv = {v: k for k, v in labels.items()}
    if E.n != len(labels):
        raise DomainError("class does not live on the target of the forgetful map")
    out: dict = {}

    def add(sym, v):
        out[sym] = out.get(sym, ZERO) + v

    for sym, v in E._c.items():
        if isinstance(sym, Psi):
            # pull psi back one forgotten point at a time: psi_i - delta_{i,k}
            raise DomainError("psi pullback along forgetful maps is not supported; expand psi first")
        base = frozenset(inv[x] for x in sym.rep)
        for k in range(len(forget) + 1):
            for extra in combinations(forget, k):
                add(BoundaryClass(n, base | frozenset(extra)), v)
    return DivisorClass(n, out)


# ---------------------------------------------------------------------------
# curve families


FAMILY_NAMES = ("C_ab", "C_ab_1", "C_ab_2", "C_ab_3", "C_ab_4", "C_1ab_1", "C_1ab_2", "C_1ab_3", "C_small_ab")


@dataclass(frozen=True)
class CurveFamily:
    name: str
    params: tuple
    cycle: WeightedCycle


def _F(n, *blocks):
    return FCurve(n, tuple(frozenset(b) for b in blocks))


def _pairings(items):
    """The three ways to split four items into two pairs."""
    a = items[0]
    out = []
    for b in items[1:]:
        rest = [x for x in items[1:] if x != b]
        out.append(((a, b), tuple(rest)))
    return out


def family(n: int, name: str, params: Sequence[int]) -> CurveFamily:
    params = tuple(params)
    if any(not 1 <= p <= n for p in params):
        raise DomainError("family parameters must be labels in 1..n")
    if name != "C_small_ab" and len(set(params)) != len(params):
        raise DomainError("family parameters must be distinct labels")
    labels = list(range(1, n + 1))
    if name == "C_ab":
        if n != 5 or len(params) != 2:
            raise DomainError("C_ab is the n = 5 family with two labels")
        a, b = params
        rest = [x for x in labels if x not in params]
        comps = [_F(n, {a}, {b}, {i}, set(rest) - {i}) for i in rest]
        return CurveFamily(name, params, WeightedCycle(n, tuple((f, Fraction(1)) for f in comps)))
    if n != 6:
        raise DomainError(f"{name} is an n = 6 family")
    if name.startswith("C_ab_"):
        if len(params) != 2:
            raise DomainError(f"{name} takes two labels")
        a, b = params
        rest = [x for x in labels if x not in params]
        if name == "C_ab_1":
            comps = [_F(n, {a}, {b}, {x}, set(rest) - {x}) for x in rest]
        elif name == "C_ab_2":
            comps = [_F(n, {a}, {b}, p, q) for p, q in _pairings(rest)]
        elif name == "C_ab_3":
            comps = []
            for w in rest:
                x, y, z = [t for t in rest if t != w]
                comps.append(_F(n, {x}, {y}, {z}, {a, b, w}))
        elif name == "C_ab_4":
            comps = []
            for p in combinations(rest, 2):
                x, y = [t for t in rest if t not in p]
                comps.append(_F(n, {a, b}, p, {x}, {y}))
        else:
            raise DomainError(f"unknown family {name!r}")
        return CurveFamily(name, params, WeightedCycle.uniform(n, comps))
    if name.startswith("C_1ab_"):
        if len(params) != 3:
            raise DomainError(f"{name} takes three labels")
        T = list(params)
        out_ = [x for x in labels if x not in T]
        comps = []
        if name == "C_1ab_1":
            for t in T:
                u, v = [s for s in T if s != t]
                for r in out_:
                    p, q = [s for s in out_ if s != r]
                    comps.append(_F(n, {t}, {r}, {u, v}, {p, q}))
        elif name == "C_1ab_2":
            for t in T:
                for p, q in combinations(out_, 2):
                    rest = (set(T) - {t}) | (set(out_) - {p, q})
                    comps.append(_F(n, {t}, {p}, {q}, rest))
        elif name == "C_1ab_3":
            for t, u in combinations(T, 2):
                for p in out_:
                    rest = (set(T) - {t, u}) | (set(out_) - {p})
                    comps.append(_F(n, {t}, {u}, {p}, rest))
        else:
            raise DomainError(f"unknown family {name!r}")
        return CurveFamily(name, params, WeightedCycle.uniform(n, comps))
    if name == "C_small_ab":
        # params (i, j, a, b): the triples {1,i,j} and {1,a,b}
        if len(params) != 4:
            raise DomainError("C_small_ab takes (i, j, a, b)")
        i, j, a, b = params
        if 1 in params or i == j or a == b:
            raise DomainError("C_small_ab needs pairs {i,j}, {a,b} of distinct labels from 2..6")
        T1 = frozenset((1, i, j))
        T2 = frozenset((1, a, b))
        if T1 == T2:
            raise DomainError("C_small_ab needs two different triples")
        if len(T1 & T2) != 1:
            T2 = frozenset(labels) - T2
        (p,) = T1 & T2
        (k,) = frozenset(labels) - T1 - T2
        first = T1 - {p}
        second = T2 - {p}
        c3 = family(n, "C_ab_3", (p, k)).cycle.scale(2)
        c4 = family(n, "C_ab_4", (p, k)).cycle
        # the (2:2:1:1) curve enters with weight one; halving it as well would
        # only recover half of the two triple coefficients
        cp = WeightedCycle(n, ((_F(n, first, second, {p}, {k}), Fraction(1)),))
        return CurveFamily(name, params, (c3 + c4).scale(Fraction(1, 2)) + cp)
    raise DomainError(f"unknown family {name!r}")


# ---------------------------------------------------------------------------
# F-nef


@dataclass(frozen=True)
class FnefResult:
    nef: bool
    witness: Optional[FCurve] = None
    value: Optional[Fraction] = None
    checked: int = 0

    def __bool__(self):
        return self.nef


def formally_invariant(D: DivisorClass, group: SymmetryGroup) -> bool:
    return all(D.act(g) == D for g in group.generators())


def fnef(D: DivisorClass, group: Optional[SymmetryGroup] = None, ctx: Optional[PicContext] = None) -> FnefResult:
    """Check ``D . F >= 0`` for every F-curve (orbit representatives when a group is given)."""
    n = D.n
    if group is None or group.is_trivial():
        curves = fcurves(n)
    else:
        if group.n != n:
            raise DomainError("group and divisor live on different n")
        if not formally_invariant(D, group):
            if n > MAX_CONTEXT_N:
                raise InvarianceError("class is not invariant under the group")
            check_invariant(ctx or pic_context(n), D, group)
        curves = [f for f, _ in fcurve_orbits(group)]
    for f in curves:
        v = dot(D, f)
        if v < 0:
            return FnefResult(False, f, v, len(curves))
    return FnefResult(True, None, None, len(curves))
