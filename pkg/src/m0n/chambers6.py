"""Canonical boundary presentations on ``M_{0,5}`` and ``M_{0,6}``, effective
decompositions of F-nef divisors, the chamber structure of the nef cone of
``M_{0,6}``, bigness witnesses and the fibration classifier.

Divisors on ``M_{0,6}`` are read in the symmetric basis as
``D = sum c_i psi_i - sum b_S delta_S`` with ``|S| = 3``; ``I``, ``O`` and the
``Sigma`` sums count every boundary class once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Optional

from .combinat import BoundaryClass, DomainError, boundary_classes
from .effective import EffectiveDecomposition, max_support_decomposition
from .exactla import ZERO, solve
from .intersect import family, fnef, forget_labels, forget_pullback, pairing_vector
from .picard import DivisorClass, PicContext, Psi, class_sum, named_class, pic_context, sum_classes

__all__ = [
    "Coords6",
    "coords6",
    "ZetaTable",
    "zeta",
    "present",
    "decompose_effective",
    "ChamberReport",
    "chamber",
    "BigWitness",
    "big_witness",
    "FibrationClass",
    "classify_fibration",
    "PreconditionError",
    "ConsistencyError",
    "rho",
]

L6 = tuple(range(1, 7))
TEN_THIRDS = Fraction(10, 3)


class PreconditionError(ValueError):
    pass


class ConsistencyError(ArithmeticError):
    """An identity that must hold exactly failed; signals a falsified claim or a bug."""


def _bc(S) -> BoundaryClass:
    return BoundaryClass(6, frozenset(S))


PAIRS = tuple(bc for bc in boundary_classes(6) if bc.size == 2)
TRIPLES = tuple(bc for bc in boundary_classes(6) if bc.size == 3)


@lru_cache(maxsize=None)
def _class_sum_items(T: tuple, a: int, b: int) -> tuple:
    return tuple(class_sum(6, T, a, b).items())


@dataclass(frozen=True)
class Coords6:
    """``c_i`` and ``b_S`` of a divisor on ``M_{0,6}`` in the symmetric basis."""

    c: dict
    b: dict

    def I(self, T) -> Fraction:
        return sum((self.c[t] for t in T), ZERO)

    def O(self, T) -> Fraction:
        return sum((self.c[t] for t in L6 if t not in T), ZERO)

    @property
    def total(self) -> Fraction:
        return self.I(L6)

    def bsum(self, T, i, j) -> Fraction:
        """``Sigma_i^{T,j}``: sum of ``b`` over classes ``A ∪ B``, ``A ⊆ T`` of size j, ``B ⊆ T^c`` of size i."""
        return sum((self.b[bc] * v for bc, v in _class_sum_items(tuple(T), j, i)), ZERO)

    def sigma_triple(self, T) -> Fraction:
        """``Sigma^{T}`` for a triple: the nine other triple classes."""
        return self.bsum(T, 1, 2)


def coords6(D: DivisorClass, ctx: Optional[PicContext] = None) -> Coords6:
    if D.n != 6:
        raise DomainError("expected a divisor on M_{0,6}")
    ctx = ctx or pic_context(6)
    R = ctx.reduce(D)
    return Coords6({i: R.coeff(Psi(i)) for i in L6}, {t: -R.coeff(t) for t in TRIPLES})


def rho(D: DivisorClass) -> Fraction:
    """``rho = -(I + O + Sigma)`` where ``Sigma`` is the sum of every ``b``."""
    k = coords6(D)
    return -(k.total + sum(k.b.values(), ZERO))


@lru_cache(maxsize=None)
def _family_vector(n: int, name: str, params: tuple) -> tuple:
    """Pairing of a curve family with each basis symbol of the context."""
    ctx = pic_context(n)
    vec = [ZERO] * ctx.dimension
    for f, w in family(n, name, params).cycle.components:
        for k, v in enumerate(pairing_vector(ctx, f)):
            if v:
                vec[k] += w * v
    return tuple(vec)


@lru_cache(maxsize=256)
def _nf(D: DivisorClass) -> tuple:
    return pic_context(D.n).normal_form(D)


def _cdot(name, params, D):
    # curve pairings are constant on classes, so the basis form suffices
    vec = _family_vector(D.n, name, tuple(params))
    return sum((a * b for a, b in zip(vec, _nf(D)) if a and b), ZERO)


def _triple_key(bc: BoundaryClass) -> tuple:
    return tuple(sorted(bc.rep))


# ---------------------------------------------------------------------------
# zeta coefficients


@dataclass(frozen=True)
class ZetaTable:
    pair: dict  # BoundaryClass -> zeta_ab
    triple: dict  # BoundaryClass -> zeta_1ab
    curve_pair: dict
    curve_triple: dict

    def all(self) -> dict:
        out = dict(self.pair)
        out.update(self.triple)
        return out

    def negative_triples(self) -> list:
        return [t for t in TRIPLES if self.triple[t] < 0]

    def vanishing(self) -> list:
        return [s for s, v in sorted(self.all().items(), key=lambda kv: kv[0].sort_key()) if v == 0]


def zeta(D: DivisorClass) -> ZetaTable:
    """The coefficients of ``(10/3) D`` in its canonical boundary presentation.

    Computed twice, from the closed formulas and from curve pairings; the two
    must agree exactly.
    """
    if D.n != 6:
        raise DomainError("zeta is defined on M_{0,6}")
    k = coords6(D)
    pair, triple, cpair, ctriple = {}, {}, {}, {}
    for bc in PAIRS:
        T = tuple(sorted(bc.rep))
        pair[bc] = 2 * k.I(T) + k.O(T) / 3 + k.bsum(T, 1, 2) / 3 - Fraction(2, 9) * k.bsum(T, 2, 1)
        cpair[bc] = TEN_THIRDS * (Fraction(2, 5) * _cdot("C_ab_1", T, D) + Fraction(1, 5) * _cdot("C_ab_2", T, D))
    for bc in TRIPLES:
        T = _triple_key(bc)
        sig = k.sigma_triple(T)
        triple[bc] = k.total - Fraction(20, 9) * k.b[bc] - (sig + k.b[bc]) / 9
        ctriple[bc] = TEN_THIRDS * (
            Fraction(7, 10) * _cdot("C_1ab_1", T, D)
            + Fraction(1, 15) * (_cdot("C_1ab_2", T, D) + _cdot("C_1ab_3", T, D))
            + Fraction(4, 135) * sig
        )
    if pair != cpair or triple != ctriple:
        raise ConsistencyError("closed-form zeta differs from its curve form")
    return ZetaTable(pair, triple, cpair, ctriple)


# ---------------------------------------------------------------------------
# presentations


def present(D: DivisorClass, n: Optional[int] = None) -> DivisorClass:
    """The canonical signed boundary presentation of ``D`` (n = 5 or 6), checked in Pic."""
    n = D.n if n is None else n
    if D.n != n:
        raise DomainError("divisor does not live on the requested n")
    ctx = pic_context(n)
    if n == 5:
        out = DivisorClass(5, {bc: _cdot5(bc, D) / 6 for bc in boundary_classes(5)})
    elif n == 6:
        z = zeta(D)
        out = DivisorClass(6, {bc: v / TEN_THIRDS for bc, v in z.all().items()})
    else:
        raise DomainError("presentations exist for n = 5 and n = 6")
    if not ctx.equivalent(out, D):
        raise ConsistencyError("presentation does not reproduce the divisor")
    return out


def _cdot5(bc: BoundaryClass, D: DivisorClass) -> Fraction:
    return _cdot("C_ab", tuple(sorted(bc.rep)), D)


def _split(T: BoundaryClass):
    """Pairs crossing the triple ``T`` and pairs inside it or its complement."""
    cross = [p for p in PAIRS if len(p.rep & T.rep) == 1]
    within = [p for p in PAIRS if len(p.rep & T.rep) != 1]
    return cross, within


def decompose_effective(D: DivisorClass, check_nef: bool = True) -> EffectiveDecomposition:
    """Nonnegative boundary decomposition of an F-nef divisor on ``M_{0,6}``."""
    if D.n != 6:
        raise DomainError("decompose_effective works on M_{0,6}")
    ctx = pic_context(6)
    if check_nef:
        res = fnef(D)
        if not res:
            raise PreconditionError(f"divisor is not F-nef: {res.witness!r} pairs to {res.value}")
    z = zeta(D)
    neg = z.negative_triples()
    if not neg:
        coeffs = {bc: v / TEN_THIRDS for bc, v in z.all().items() if v}
        dec = EffectiveDecomposition(D, coeffs, "central")
    elif len(neg) == 1:
        dec = _big_branch(D, z, neg[0])
    else:
        raise ConsistencyError(f"F-nef divisor with {len(neg)} negative triple coefficients: {neg}")
    try:
        dec.verify(ctx)
    except AssertionError as exc:
        raise ConsistencyError(f"decomposition failed verification: {exc}") from exc
    return dec


def _big_branch(D: DivisorClass, z: ZetaTable, T: BoundaryClass) -> EffectiveDecomposition:
    """Spread a negative ``zeta_{1ij}`` over all other classes via the averaged triple relation."""
    zt = z.triple[T]
    r = rho(D)
    if not r > 0:
        raise ConsistencyError("rho is not positive although a triple coefficient is negative")
    if not zt >= -r / 6:
        raise ConsistencyError("zeta_1ij is below -rho/6")
    cross, within = _split(T)
    three_tenths = 1 / TEN_THIRDS
    coeffs = {}
    for p in cross:
        coeffs[p] = three_tenths * (z.pair[p] + Fraction(2, 9) * zt)
    for p in within:
        coeffs[p] = three_tenths * (z.pair[p] - zt / 3)
    for t in TRIPLES:
        if t != T:
            coeffs[t] = three_tenths * (z.triple[t] + zt / 9)
    # the same coefficients through curve pairings and the class B_1ij
    alt = _big_expression(D, T, zt, r)
    if alt != coeffs:
        raise ConsistencyError("the two forms of the spread presentation disagree")
    return EffectiveDecomposition(D, {k: v for k, v in coeffs.items() if v}, f"triple{_triple_key(T)}")


def _big_expression(D: DivisorClass, T: BoundaryClass, zt: Fraction, r: Fraction) -> dict:
    one_t = T.rep if 1 in T.rep else frozenset(L6) - T.rep
    i, j = sorted(one_t - {1})
    c1t = _cdot("C_1ab_1", (1, i, j), D)
    cross, within = _split(T)
    out = {}
    for p in cross:
        out[p] = c1t / 6 + Fraction(2, 3) * _cdot("C_ab_1", tuple(sorted(p.rep)), D) + Fraction(3, 10) * Fraction(5, 27) * r
    for p in within:
        ab = tuple(sorted(p.rep))
        out[p] = (
            Fraction(2, 5) * _cdot("C_ab_1", ab, D)
            + Fraction(1, 5) * _cdot("C_ab_2", ab, D)
            - Fraction(3, 10) * zt / 3
        )
    for t in TRIPLES:
        if t == T:
            continue
        one_s = t.rep if 1 in t.rep else frozenset(L6) - t.rep
        a, b = sorted(one_s - {1})
        out[t] = Fraction(2, 3) * _cdot("C_small_ab", (i, j, a, b), D) + Fraction(3, 10) * (2 * r - 8 * zt) / 9
    return out


# ---------------------------------------------------------------------------
# chambers


@dataclass(frozen=True)
class ChamberReport:
    label: str  # "central" or "triple(1,i,j)"
    labels: tuple  # every closed subcone containing D
    faces: tuple  # vanishing zeta coefficients
    zeta: ZetaTable


def _chamber_name(t: BoundaryClass) -> str:
    one = t.rep if 1 in t.rep else frozenset(L6) - t.rep
    return "triple(" + ",".join(map(str, sorted(one))) + ")"


def chamber(D: DivisorClass, check_nef: bool = True) -> ChamberReport:
    """Which of the eleven closed subcones contain ``D``.

    The subcones are: central (every ``zeta_1ab >= 0``) and, for each triple,
    the cone where that ``zeta_1ij <= 0``.  A divisor with some ``zeta_1ij = 0``
    lies on a common face and is labelled by the triple chamber.
    """
    if check_nef and not fnef(D):
        raise PreconditionError("divisor is not F-nef")
    z = zeta(D)
    labels = []
    if all(v >= 0 for v in z.triple.values()):
        labels.append("central")
    for t in TRIPLES:
        if z.triple[t] <= 0:
            labels.append(_chamber_name(t))
    nonpos = [t for t in TRIPLES if z.triple[t] <= 0]
    if any(z.triple[t] < 0 for t in TRIPLES):
        label = _chamber_name(min(nonpos, key=lambda t: z.triple[t]))
    elif nonpos:
        label = _chamber_name(nonpos[0])
    else:
        label = "central"
    faces = tuple(s.label() for s in z.vanishing())
    return ChamberReport(label, tuple(labels), faces, z)


# ---------------------------------------------------------------------------
# bigness


@dataclass(frozen=True)
class BigWitness:
    kind: str  # "kappa1", "pattern1", "pattern2"
    labeling: Optional[tuple]
    epsilon: Optional[Fraction]
    decomposition: EffectiveDecomposition

    def describe(self) -> str:
        if self.kind == "kappa1":
            return f"D = {self.epsilon} kappa1 + effective"
        return f"{self.kind} with (i,j,k,l,m,n) = {self.labeling}"


def _pattern1(perm):
    i, j, k, l, m, n = perm
    return [_bc((m, n)), _bc((i, l)), _bc((j, l)), _bc((k, l)), _bc((m, n, i)), _bc((m, n, j)), _bc((m, n, k))]


def _pattern2(perm):
    i, j, k, l, m, n = perm
    skip = _bc((i, j, k))
    return [_bc((i, l)), _bc((j, m)), _bc((k, n))] + [t for t in TRIPLES if t != skip]


def _kappa_epsilon(coeffs: dict) -> Optional[Fraction]:
    kappa = named_class(6, "kappa1")
    if any(not coeffs.get(bc) for bc in boundary_classes(6)):
        return None
    return min(coeffs[bc] / kappa.coeff(bc) for bc in boundary_classes(6))


def big_witness(D: DivisorClass, decomposition: Optional[EffectiveDecomposition] = None) -> Optional[BigWitness]:
    """Look for a certificate that an effective divisor on ``M_{0,6}`` is big.

    Witnesses: full boundary support (so ``D - eps kappa1`` is effective), or a
    support containing one of the two pullback patterns for some labeling.
    Without a supplied decomposition one of maximal support is computed.
    """
    ctx = pic_context(6)
    dec = decomposition or max_support_decomposition(ctx, D)
    if dec is None:
        return None
    supp = dec.support()
    eps = _kappa_epsilon(dec.coefficients)
    if eps is not None:
        return BigWitness("kappa1", None, eps, dec)
    for perm in permutations(L6):
        if all(s in supp for s in _pattern1(perm)):
            return BigWitness("pattern1", perm, None, dec)
    for perm in permutations(L6):
        if all(s in supp for s in _pattern2(perm)):
            return BigWitness("pattern2", perm, None, dec)
    if decomposition is not None:
        # the given presentation may hide support; retry with a maximal one
        return big_witness(D, None)
    return None


# ---------------------------------------------------------------------------
# fibrations


@dataclass(frozen=True)
class FibrationClass:
    tag: str  # trivial, big, forget_one, forget_two, forget_pair_pair, unknown
    points: tuple = ()
    evidence: dict = field(default_factory=dict)

    def describe(self) -> str:
        if self.tag == "forget_pair_pair":
            (p, q) = self.points
            return f"forget_pair_pair({{{p[0]},{p[1]}}},{{{q[0]},{q[1]}}})"
        if self.points:
            return f"{self.tag}({','.join(map(str, self.points))})"
        return self.tag


def _pull_boundary(n: int, forget, subsets, weight=1) -> DivisorClass:
    """Pullback of ``sum delta_S`` (subsets in original labels) along forgetting ``forget``."""
    lab = forget_labels(n, forget)
    E = sum_classes(n - len(set(forget)), (BoundaryClass(n - len(set(forget)), frozenset(lab[x] for x in S)) for S in subsets), weight)
    return forget_pullback(E, n, forget)


def _solve_combo(ctx: PicContext, D: DivisorClass, gens: list) -> Optional[list]:
    cols = [ctx.normal_form(g) for g in gens]
    mat = [[c[i] for c in cols] for i in range(ctx.dimension)]
    x = solve(mat, list(ctx.normal_form(D)))
    if x is None:
        return None
    if not ctx.equivalent(sum((g * a for g, a in zip(gens, x)), DivisorClass.zero(ctx.n)), D):
        return None
    return x


def _forget_one_m04(ctx, D, n, i):
    """``D = e * pi_i^*(point)`` with ``e >= 0`` (n = 5)."""
    rest = [x for x in range(1, n + 1) if x != i]
    pt = _pull_boundary(n, [i], [rest[:2]])
    x = _solve_combo(ctx, D, [pt])
    if x is not None and x[0] > 0:
        return x[0]
    return None


def classify_fibration(D: DivisorClass, n: Optional[int] = None, check_nef: bool = True) -> FibrationClass:
    n = D.n if n is None else n
    if D.n != n or n not in (5, 6):
        raise DomainError("the fibration classifier handles n = 5 and n = 6")
    ctx = pic_context(n)
    if check_nef:
        res = fnef(D)
        if not res:
            raise PreconditionError(f"divisor is not F-nef: {res.witness!r} pairs to {res.value}")
    if ctx.is_zero(D):
        return FibrationClass("trivial")
    return _classify5(ctx, D) if n == 5 else _classify6(ctx, D)


def _classify5(ctx, D) -> FibrationClass:
    vals = {bc: _cdot5(bc, D) for bc in boundary_classes(5)}
    pres = present(D, 5)
    if all(v > 0 for v in vals.values()):
        kappa = named_class(5, "kappa1")
        eps = min(pres.coeff(bc) / kappa.coeff(bc) for bc in boundary_classes(5))
        return FibrationClass("big", (), {"witness": "kappa1", "epsilon": eps, "presentation": pres})
    for i in range(1, 6):
        e = _forget_one_m04(ctx, D, 5, i)
        if e is not None:
            return FibrationClass("forget_one", (i,), {"multiple": e, "target_class": "point of M_{0,4}"})
    zero = [bc for bc, v in vals.items() if v == 0]
    for bc in zero:
        a, b = sorted(bc.rep)
        rest = [x for x in range(1, 6) if x not in (a, b)]
        # D_1 = pi_b^*(sum of the three points on the copy labelled {a} ∪ rest), D_2 likewise
        D1 = _pull_boundary(5, [b], [(a, rest[0]), (a, rest[1]), (rest[0], rest[1])])
        D2 = _pull_boundary(5, [a], [(b, rest[0]), (b, rest[1]), (rest[0], rest[1])])
        x = _solve_combo(ctx, D, [D1, D2])
        if x is not None and x[0] > 0 and x[1] > 0:
            return FibrationClass(
                "big", (), {"witness": f"pullback of an ample class under (pi_{a}, pi_{b})", "alpha": x[0], "beta": x[1]}
            )
    return FibrationClass("unknown", (), {"reason": "no case of the M_{0,5} analysis applies"})


def _classify6(ctx, D) -> FibrationClass:
    z = zeta(D)
    neg = z.negative_triples()
    if neg:
        dec = decompose_effective(D, check_nef=False)
        w = big_witness(D, dec)
        if w is None:
            return FibrationClass("unknown", (), {"reason": "bigness claimed but no witness located", "zeta": z})
        return FibrationClass("big", (), {"witness": w.describe(), "big_witness": w, "decomposition": dec})
    zero_triples = [t for t in TRIPLES if z.triple[t] == 0]
    if len(zero_triples) >= 2:
        res = _type1(ctx, D, zero_triples)
        if res is not None:
            return res
    for i in L6:
        if all(z.pair[_bc((i, j))] == 0 for j in L6 if j != i):
            res = _type2(ctx, D, i)
            if res is not None:
                return res
    w = big_witness(D, decompose_effective(D, check_nef=False))
    if w is not None:
        return FibrationClass("big", (), {"witness": w.describe(), "big_witness": w})
    return FibrationClass(
        "unknown", (), {"reason": "bigness claimed by the case analysis but no pattern witness located", "zeta": z}
    )


def _type1(ctx, D, zero_triples) -> Optional[FibrationClass]:
    for t1, t2 in combinations(zero_triples, 2):
        s1 = (t1.rep if 1 in t1.rep else frozenset(L6) - t1.rep) - {1}
        s2 = (t2.rep if 1 in t2.rep else frozenset(L6) - t2.rep) - {1}
        if s1 & s2:
            continue
        i, j = sorted(s1)
        k, l = sorted(s2)
        # P1 forgets {k,l}: the three points of M_{0,4} on {1,i,j,m}
        P1 = _pull_boundary(6, [k, l], [(1, i), (i, j), (1, j)])
        P2 = _pull_boundary(6, [i, j], [(1, k), (k, l), (1, l)])
        x = _solve_combo(ctx, D, [P1, P2])
        if x is None or x[0] < 0 or x[1] < 0:
            continue
        alpha, beta = x
        ev = {"alpha": alpha, "beta": beta, "identity": "D = alpha pi_kl^*(E1) + beta pi_ij^*(E2)"}
        if alpha > 0 and beta > 0:
            return FibrationClass("forget_pair_pair", ((i, j), (k, l)), ev)
        if alpha > 0:
            return FibrationClass("forget_two", (k, l), ev)
        return FibrationClass("forget_two", (i, j), ev)
    return None


def _type2(ctx, D, i) -> Optional[FibrationClass]:
    k = coords6(D, ctx)
    rest = [x for x in L6 if x != i]
    lab = forget_labels(6, [i])
    E = DivisorClass(5, {BoundaryClass(5, frozenset((lab[a], lab[b]))): Fraction(2, 3) * (k.c[a] + k.c[b]) for a, b in combinations(rest, 2)})
    pulled = forget_pullback(E, 6, [i])
    if not ctx.equivalent(pulled, D):
        return None
    if any(v < 0 for _, v in E.items()):
        return None
    ev = {"image_class": E, "identity": "D = pi_i^*(E)"}
    sub = classify_fibration(E, 5, check_nef=False)
    ev["image_classification"] = sub.describe()
    if sub.tag == "forget_one":
        inv = {v: key for key, v in lab.items()}
        j = inv[sub.points[0]]
        return FibrationClass("forget_two", tuple(sorted((i, j))), ev)
    return FibrationClass("forget_one", (i,), ev)
