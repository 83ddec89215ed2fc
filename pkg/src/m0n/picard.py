"""The rational Picard group of ``M_{0,n}``.

A :class:`PicContext` holds the generating symbols (``psi_i`` and every
boundary class), the full relation set, and the reduction of each
non-basis symbol to the symmetric basis: all ``psi_i`` together with the
boundary classes whose two sides both have at least three points.  For
``n = 4`` the basis is the single class ``delta_{12}``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import cache
from .combinat import BoundaryClass, DomainError, SymmetryGroup, boundary_classes, class_orbits
from .exactla import ZERO, _eliminate, as_rational, format_rational, parse_rational, solve

__all__ = [
    "Psi",
    "Symbol",
    "DivisorClass",
    "PicContext",
    "pic_context",
    "relations",
    "normal_form",
    "named_class",
    "pattern_sum",
    "class_sum",
    "eta",
    "average_expansion",
    "InvariantCoords",
    "InvarianceError",
    "invariant_coords",
    "invariant_basis",
    "picard_dimension",
    "MAX_CONTEXT_N",
]

MAX_CONTEXT_N = 10


@dataclass(frozen=True)
class Psi:
    i: int

    def __repr__(self):
        return f"psi{self.i}"


Symbol = Union[Psi, BoundaryClass]


def symbol_key(sym: Symbol):
    if isinstance(sym, Psi):
        return (0, 0, (sym.i,))
    return (1, len(sym.rep), tuple(sorted(sym.rep)))


def picard_dimension(n: int) -> int:
    return 2 ** (n - 1) - comb(n, 2) - 1


class DivisorClass:
    """A formal rational combination of ``psi_i`` and ``delta_S`` symbols.

    Equality compares coefficients, not classes in Pic; use
    :meth:`PicContext.equivalent` for linear equivalence.
    """

    __slots__ = ("n", "_c")

    def __init__(self, n: int, coeffs: Optional[Mapping] = None):
        self.n = n
        c = {}
        for sym, v in (coeffs or {}).items():
            sym = self._check(sym)
            v = as_rational(v)
            if v:
                c[sym] = c.get(sym, ZERO) + v
                if not c[sym]:
                    del c[sym]
        self._c = c

    def _check(self, sym):
        if isinstance(sym, Psi):
            if not 1 <= sym.i <= self.n:
                raise DomainError(f"psi index {sym.i} outside 1..{self.n}")
            return sym
        if isinstance(sym, BoundaryClass):
            if sym.n != self.n:
                raise DomainError("boundary class on a different n")
            return sym
        raise DomainError(f"not a divisor symbol: {sym!r}")

    @classmethod
    def _raw(cls, n, c):
        obj = cls.__new__(cls)
        obj.n = n
        obj._c = c
        return obj

    @classmethod
    def zero(cls, n: int) -> "DivisorClass":
        return cls._raw(n, {})

    @classmethod
    def psi(cls, n: int, i: int) -> "DivisorClass":
        return cls(n, {Psi(i): 1})

    @classmethod
    def delta(cls, n: int, subset: Iterable[int]) -> "DivisorClass":
        return cls(n, {BoundaryClass(n, frozenset(subset)): 1})

    def coeff(self, sym) -> Fraction:
        if not isinstance(sym, (Psi, BoundaryClass)):
            sym = BoundaryClass(self.n, frozenset(sym))
        return self._c.get(sym, ZERO)

    def items(self):
        return sorted(self._c.items(), key=lambda kv: symbol_key(kv[0]))

    def support(self):
        return [s for s, _ in self.items()]

    def as_dict(self) -> dict:
        return dict(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def _same(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        if other.n != self.n:
            raise DomainError("divisors on different n")
        return None

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        c = dict(self._c)
        for k, v in other._c.items():
            nv = c.get(k, ZERO) + v
            if nv:
                c[k] = nv
            else:
                c.pop(k, None)
        return DivisorClass._raw(self.n, c)

    def __neg__(self):
        return DivisorClass._raw(self.n, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, k):
        k = as_rational(k)
        if not k:
            return DivisorClass.zero(self.n)
        return DivisorClass._raw(self.n, {s: v * k for s, v in self._c.items()})

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / as_rational(k))

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return self.n == other.n and self._c == other._c

    def __hash__(self):
        return hash((self.n, frozenset(self._c.items())))

    def act(self, perm: Mapping[int, int]) -> "DivisorClass":
        """Relabel marked points by ``perm`` (labels missing from ``perm`` are fixed)."""
        c = {}
        for sym, v in self._c.items():
            if isinstance(sym, Psi):
                ns = Psi(perm.get(sym.i, sym.i))
            else:
                ns = BoundaryClass(self.n, frozenset(perm.get(x, x) for x in sym.rep))
            c[ns] = c.get(ns, ZERO) + v
        return DivisorClass(self.n, c)

    def __repr__(self):
        if not self._c:
            return f"DivisorClass(n={self.n}, 0)"
        terms = " + ".join(f"{format_rational(v)}*{s!r}" for s, v in self.items())
        return f"DivisorClass(n={self.n}, {terms})"


def sum_classes(n: int, classes: Iterable[BoundaryClass], weight=1) -> DivisorClass:
    c: dict = {}
    w = as_rational(weight)
    for bc in classes:
        c[bc] = c.get(bc, ZERO) + w
    return DivisorClass(n, c)


# ---------------------------------------------------------------------------
# relations and contexts


def _subsets_between(n: int, inside: frozenset, outside: frozenset):
    """All ``T`` with ``inside <= T`` and ``T`` disjoint from ``outside``."""
    free = [x for x in range(1, n + 1) if x not in inside and x not in outside]
    for k in range(len(free) + 1):
        for extra in combinations(free, k):
            yield inside | frozenset(extra)


def keel_sum(n: int, p: int, q: int, r: int, s: int) -> DivisorClass:
    """Sum of ``delta_T`` over ``T`` containing ``p, q`` and missing ``r, s``."""
    return sum_classes(n, (BoundaryClass(n, t) for t in _subsets_between(n, frozenset((p, q)), frozenset((r, s)))))


def psi_relation(n: int, i: int, q: int, r: int) -> DivisorClass:
    """``psi_i`` minus the boundary sum over ``S`` containing ``i`` and missing ``q, r``."""
    terms = (BoundaryClass(n, t) for t in _subsets_between(n, frozenset((i,)), frozenset((q, r))) if len(t) >= 2)
    return DivisorClass.psi(n, i) - sum_classes(n, terms)


def relations(n: int) -> list[DivisorClass]:
    """Every Keel relation (two per 4-subset) and every psi relation."""
    out = []
    for p, q, r, s in combinations(range(1, n + 1), 4):
        base = keel_sum(n, p, q, r, s)
        out.append(base - keel_sum(n, p, r, q, s))
        out.append(base - keel_sum(n, p, s, q, r))
    for i in range(1, n + 1):
        others = [x for x in range(1, n + 1) if x != i]
        for q, r in combinations(others, 2):
            out.append(psi_relation(n, i, q, r))
    return out


def symbol_label(sym: Symbol) -> str:
    return f"psi{sym.i}" if isinstance(sym, Psi) else sym.label()


def parse_symbol(n: int, label: str) -> Symbol:
    if label.startswith("psi"):
        return Psi(int(label[3:]))
    inner = label.strip()[1:-1]
    return BoundaryClass(n, frozenset(int(x) for x in inner.split(",")))


class PicContext:
    """Generators, relations and normal forms for ``Pic(M_{0,n})``."""

    def __init__(self, n: int, expansions: Optional[dict] = None):
        if not 4 <= n <= MAX_CONTEXT_N:
            raise DomainError(f"pic_context supports 4 <= n <= {MAX_CONTEXT_N}, got {n}")
        self.n = n
        self.symbols: tuple = tuple(Psi(i) for i in range(1, n + 1)) + boundary_classes(n)
        if n == 4:
            basis = (boundary_classes(4)[0],)
        else:
            basis = tuple(Psi(i) for i in range(1, n + 1)) + tuple(b for b in boundary_classes(n) if b.size >= 3)
        self.basis: tuple = basis
        self.index = {s: k for k, s in enumerate(basis)}
        self.nonbasis = tuple(s for s in self.symbols if s not in self.index)
        self._expansions = expansions if expansions is not None else self._reduce()
        # rank of the relation matrix equals the number of pivots found
        self.relation_rank = len(self._expansions)
        self.dimension = len(self.symbols) - self.relation_rank

    def _reduce(self) -> dict:
        """Row-reduce the relation matrix, pivoting on non-basis symbols first."""
        col = {s: k for k, s in enumerate(self.symbols)}
        rows = []
        for rel in relations(self.n):
            rows.append({col[s]: v for s, v in rel._c.items()})
        order = [col[s] for s in self.nonbasis] + [col[s] for s in self.basis]
        pivots = _eliminate(rows, len(self.symbols), order)
        pivot_cols = {c for _, c in pivots}
        if pivot_cols != {col[s] for s in self.nonbasis}:
            raise ArithmeticError("relation lattice does not have the expected pivot structure")
        out = {}
        for r, c in pivots:
            sym = self.symbols[c]
            out[sym] = {self.index[self.symbols[k]]: -v for k, v in rows[r].items() if k != c}
        return out

    # ----- serialization for the disk cache
    def export(self) -> dict:
        return {
            "n": self.n,
            "expansions": {
                symbol_label(s): {str(k): format_rational(v) for k, v in sorted(e.items())}
                for s, e in sorted(self._expansions.items(), key=lambda kv: symbol_key(kv[0]))
            },
        }

    @classmethod
    def from_export(cls, doc: dict) -> "PicContext":
        n = doc["n"]
        exp = {
            parse_symbol(n, lab): {int(k): parse_rational(v) for k, v in e.items()}
            for lab, e in doc["expansions"].items()
        }
        return cls(n, exp)

    # ----- queries
    def symbol_vector(self, sym: Symbol) -> dict:
        k = self.index.get(sym)
        if k is not None:
            return {k: Fraction(1)}
        return self._expansions[sym]

    def normal_form(self, D: DivisorClass) -> tuple:
        if D.n != self.n:
            raise DomainError("divisor lives on a different n")
        vec = [ZERO] * self.dimension
        for sym, v in D._c.items():
            for k, a in self.symbol_vector(sym).items():
                vec[k] += v * a
        return tuple(vec)

    def from_coords(self, coords: Sequence) -> DivisorClass:
        if len(coords) != self.dimension:
            raise DomainError("coordinate vector of the wrong length")
        return DivisorClass(self.n, {s: as_rational(c) for s, c in zip(self.basis, coords)})

    def reduce(self, D: DivisorClass) -> DivisorClass:
        return self.from_coords(self.normal_form(D))

    def equivalent(self, D1: DivisorClass, D2: DivisorClass) -> bool:
        return self.normal_form(D1 - D2) == self.normal_form(DivisorClass.zero(self.n))

    def is_zero(self, D: DivisorClass) -> bool:
        return not any(self.normal_form(D))

    def __repr__(self):
        return f"PicContext(n={self.n}, dimension={self.dimension})"


_ctx_lock = threading.Lock()
_contexts: dict = {}


def pic_context(n: int) -> PicContext:
    """Memoized context, also persisted in the disk cache."""
    if not 4 <= n <= MAX_CONTEXT_N:
        raise DomainError(f"pic_context supports 4 <= n <= {MAX_CONTEXT_N}, got {n}")
    with _ctx_lock:
        ctx = _contexts.get(n)
        if ctx is not None:
            return ctx
        key = f"pic-n{n}"
        doc = cache.load(key)
        ctx = None
        if doc is not None:
            try:
                ctx = PicContext.from_export(doc)
            except (KeyError, ValueError, DomainError):
                ctx = None
        if ctx is None:
            ctx = PicContext(n)
            cache.store(key, ctx.export())
        _contexts[n] = ctx
        return ctx


def normal_form(ctx: PicContext, D: DivisorClass) -> tuple:
    return ctx.normal_form(D)


# ---------------------------------------------------------------------------
# named classes


def eta(n: int, s: int, a: int, b: int) -> Fraction:
    """Coefficient of the averaged boundary expansion of ``delta_S`` with ``|S| = s``."""
    num = a * (b + s - n) * (1 + b + a * (n - 1) - n + s - s * (a + b))
    return Fraction(num, s * (s - 1) * (n - s) * (n - s - 1))


def _split_terms(n: int, S: frozenset, a: int, b: int):
    if not 0 <= a <= len(S) or not 0 <= b <= n - len(S):
        raise DomainError("pattern sizes out of range")
    if not 2 <= a + b <= n - 2:
        raise DomainError(f"a pattern of size {a + b} is not a boundary divisor for n={n}")
    rest = [x for x in range(1, n + 1) if x not in S]
    for A in combinations(sorted(S), a):
        for B in combinations(rest, b):
            yield BoundaryClass(n, frozenset(A) | frozenset(B))


def pattern_sum(n: int, S: Iterable[int], a: int, b: int) -> DivisorClass:
    """Sum over ``A ⊆ S, |A| = a`` and ``B ⊆ S^c, |B| = b`` of ``delta_{A∪B}``, once per pair (A, B)."""
    return sum_classes(n, _split_terms(n, frozenset(S), a, b))


def class_sum(n: int, S: Iterable[int], a: int, b: int) -> DivisorClass:
    """Like :func:`pattern_sum` but every distinct boundary class is counted once."""
    return sum_classes(n, set(_split_terms(n, frozenset(S), a, b)))


def _n_of(ctx_or_n) -> int:
    return ctx_or_n.n if isinstance(ctx_or_n, PicContext) else int(ctx_or_n)


def named_class(ctx_or_n, kind: str, *params) -> DivisorClass:
    """Named classes: ``psi``, ``delta``, ``kappa1``, ``canonical``, ``B``,
    ``total_boundary``, ``pattern_sum`` and ``class_sum``."""
    n = _n_of(ctx_or_n)
    if kind == "psi":
        (i,) = params
        return DivisorClass.psi(n, i)
    if kind == "delta":
        (S,) = params
        return DivisorClass.delta(n, S)
    if kind == "kappa1":
        return DivisorClass(n, {bc: Fraction((bc.size - 1) * (n - bc.size - 1), n - 1) for bc in boundary_classes(n)})
    if kind == "canonical":
        return DivisorClass(n, {bc: Fraction(bc.size * (n - bc.size), n - 1) - 2 for bc in boundary_classes(n)})
    if kind == "B":
        (i,) = params
        if not 2 <= i <= n // 2:
            raise DomainError(f"B_{i} undefined for n={n}")
        return sum_classes(n, (bc for bc in boundary_classes(n) if bc.size == i))
    if kind == "total_boundary":
        return sum_classes(n, boundary_classes(n))
    if kind in ("pattern_sum", "class_sum"):
        S, a, b = params
        return (pattern_sum if kind == "pattern_sum" else class_sum)(n, S, a, b)
    raise DomainError(f"unknown class kind {kind!r}")


def psi_weight(n: int, j: int) -> Fraction:
    return Fraction((n - 1 - j) * (n - 2 - j), (n - 1) * (n - 2))


def average_expansion(ctx_or_n, kind: str, *params) -> DivisorClass:
    """Boundary expansions obtained by averaging psi relations or Keel relations."""
    n = _n_of(ctx_or_n)
    if kind == "psi_avg":
        (i,) = params
        out = DivisorClass.zero(n)
        for j in range(1, n - 2):
            out = out + pattern_sum(n, {i}, 1, j) * psi_weight(n, j)
        return out
    if kind == "delta_avg":
        (S,) = params
        S = frozenset(S)
        s = len(S)
        if s < 2 or n - s < 2:
            raise DomainError("delta_avg needs |S|, |S^c| >= 2")
        out = DivisorClass.zero(n)
        for a in range(1, s + 1):
            for b in range(0, n - s):
                if (a, b) == (s, 0) or not 2 <= a + b <= n - 2:
                    continue
                w = eta(n, s, a, b)
                if w:
                    out = out + pattern_sum(n, S, a, b) * w
        return out
    raise DomainError(f"unknown expansion kind {kind!r}")


# ---------------------------------------------------------------------------
# invariant coordinates


class InvarianceError(ValueError):
    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


@dataclass(frozen=True)
class InvariantCoords:
    group: SymmetryGroup
    names: tuple
    basis: tuple  # of DivisorClass
    coords: tuple

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.coords))

    def divisor(self) -> DivisorClass:
        out = DivisorClass.zero(self.group.n)
        for c, b in zip(self.coords, self.basis):
            out = out + b * c
        return out


def check_invariant(ctx: PicContext, D: DivisorClass, group: SymmetryGroup) -> None:
    nf = ctx.normal_form(D)
    for g in group.generators():
        if ctx.normal_form(D.act(g)) != nf:
            a, b = sorted(g)
            raise InvarianceError(f"class is not invariant under the transposition ({a} {b})", (a, b))


def m62_basis(n: int = 8, x: int = 7, y: int = 8) -> tuple[tuple, tuple]:
    """The nine invariant classes used on ``M_{0,8}`` with ``S_6`` acting on the other labels."""
    rest = [a for a in range(1, n + 1) if a not in (x, y)]

    def s(sets):
        return sum_classes(n, {BoundaryClass(n, frozenset(t)) for t in sets})

    named = [
        ("x1", s({x, a} for a in rest)),
        ("y1", s({y, a} for a in rest)),
        ("x2", s({x, *p} for p in combinations(rest, 2))),
        ("y2", s({y, *p} for p in combinations(rest, 2))),
        ("x3", s({x, *p} for p in combinations(rest, 3))),
        ("xy1", s({x, y, a} for a in rest)),
        ("xy2", s({x, y, *p} for p in combinations(rest, 2))),
        ("2", s(set(p) for p in combinations(rest, 2))),
        ("3", s(set(p) for p in combinations(rest, 3))),
    ]
    return tuple(k for k, _ in named), tuple(v for _, v in named)


def m62_delta_xy(n: int = 8, x: int = 7, y: int = 8) -> DivisorClass:
    return DivisorClass.delta(n, {x, y})


def onepoint_basis(n: int, x: int) -> tuple[tuple, tuple]:
    names = tuple(f"x,1,{j}" for j in range(1, n - 2))
    return names, tuple(pattern_sum(n, {x}, 1, j) for j in range(1, n - 2))


def invariant_basis(ctx: PicContext, group: SymmetryGroup) -> tuple[tuple, tuple]:
    """An independent list of orbit-sum classes spanning the invariant classes."""
    n = ctx.n
    big = [c for c in group.cells if len(c) > 1]
    fixed = [c[0] for c in group.cells if len(c) == 1]
    if len(big) == 1 and len(fixed) == 1:
        return onepoint_basis(n, fixed[0])
    if n == 8 and len(big) == 1 and len(big[0]) == 6:
        return m62_basis(n, *fixed)
    # generic: greedy independent subset of boundary orbit sums
    names, basis, rows = [], [], []
    for rep, members in class_orbits(group):
        cand = sum_classes(n, members)
        vec = ctx.normal_form(cand)
        trial = rows + [list(vec)]
        from .exactla import rank

        if rank(trial) == len(trial):
            rows = trial
            names.append(rep.label())
            basis.append(cand)
    return tuple(names), tuple(basis)


def invariant_coords(ctx: PicContext, D: DivisorClass, group: SymmetryGroup, basis=None) -> InvariantCoords:
    """Coordinates of an invariant class in an orbit-sum basis."""
    check_invariant(ctx, D, group)
    names, classes = basis if basis is not None else invariant_basis(ctx, group)
    cols = [ctx.normal_form(b) for b in classes]
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(ctx.dimension)]
    x = solve(mat, list(ctx.normal_form(D)))
    if x is None:
        raise InvarianceError("class is not in the span of the invariant basis")
    return InvariantCoords(group, tuple(names), tuple(classes), tuple(x))
