"""Effective boundary decompositions found and checked by exact linear programming."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .combinat import BoundaryClass, SymmetryGroup, class_orbits
from .exactla import ZERO, LPOutcome, LPProblem, lp, verify_outcome
from .picard import DivisorClass, PicContext, check_invariant, sum_classes

__all__ = [
    "EffectiveDecomposition",
    "MembershipResult",
    "effective_membership",
    "max_support_decomposition",
    "orbit_columns",
]


@dataclass(frozen=True)
class EffectiveDecomposition:
    """Nonnegative boundary coefficients whose combination is linearly equivalent to ``target``."""

    target: DivisorClass
    coefficients: dict  # BoundaryClass -> Fraction
    note: str = ""

    def divisor(self) -> DivisorClass:
        return DivisorClass(self.target.n, self.coefficients)

    def support(self) -> frozenset:
        return frozenset(s for s, v in self.coefficients.items() if v)

    def verify(self, ctx: PicContext) -> bool:
        """Raise AssertionError unless every coefficient is nonnegative and the sum is exact."""
        for s, v in self.coefficients.items():
            assert isinstance(s, BoundaryClass), "decomposition uses a non-boundary symbol"
            assert v >= 0, f"negative coefficient {v} on {s!r}"
        assert ctx.equivalent(self.divisor(), self.target), "decomposition is not equivalent to the target"
        return True


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    decomposition: Optional[EffectiveDecomposition]
    problem: LPProblem
    outcome: LPOutcome
    orbits: tuple  # (representative, members) per LP variable

    def __bool__(self):
        return self.member


def orbit_columns(ctx: PicContext, group: Optional[SymmetryGroup]):
    if group is None or group.is_trivial():
        from .combinat import boundary_classes

        return tuple((bc, (bc,)) for bc in boundary_classes(ctx.n))
    return tuple(class_orbits(group))


def _problem(ctx: PicContext, D: DivisorClass, orbs) -> LPProblem:
    cols = [ctx.normal_form(sum_classes(ctx.n, members)) for _, members in orbs]
    target = ctx.normal_form(D)
    eqs = tuple((tuple(col[i] for col in cols), target[i]) for i in range(ctx.dimension))
    return LPProblem(len(orbs), equalities=eqs, sense="feasibility", nonnegative=frozenset(range(len(orbs))))


def effective_membership(ctx: PicContext, D: DivisorClass, group: Optional[SymmetryGroup] = None) -> MembershipResult:
    """Is ``D`` a nonnegative combination of boundary orbit sums?  Returns a decomposition or a Farkas certificate."""
    if group is not None and not group.is_trivial():
        check_invariant(ctx, D, group)
    orbs = orbit_columns(ctx, group)
    prob = _problem(ctx, D, orbs)
    out = lp(prob)
    verify_outcome(prob, out)
    if out.status != "optimal":
        return MembershipResult(False, None, prob, out, orbs)
    coeffs = {}
    for x, (_, members) in zip(out.witness, orbs):
        if x:
            for bc in members:
                coeffs[bc] = x
    dec = EffectiveDecomposition(D, coeffs, "lp")
    return MembershipResult(True, dec, prob, out, orbs)


def max_support_decomposition(ctx: PicContext, D: DivisorClass) -> Optional[EffectiveDecomposition]:
    """An effective boundary decomposition whose support is as large as possible.

    For each boundary class, maximize its coefficient (capped at one after
    scaling); the average of the optimal points is positive on every class
    that is positive in some decomposition.
    """
    orbs = orbit_columns(ctx, None)
    base = _problem(ctx, D, orbs)
    first = lp(base)
    if first.status != "optimal":
        return None
    points = [first.witness]
    reachable = {k for k, x in enumerate(first.witness) if x}
    for k in range(len(orbs)):
        if k in reachable:
            continue
        obj = tuple(Fraction(1) if j == k else ZERO for j in range(len(orbs)))
        # bound the objective so the LP stays bounded
        cap = (tuple(Fraction(-1) if j == k else ZERO for j in range(len(orbs))), Fraction(-1))
        prob = LPProblem(len(orbs), base.equalities, (cap,), obj, "maximize", base.nonnegative)
        out = lp(prob)
        if out.status == "optimal" and out.value > 0:
            points.append(out.witness)
            reachable |= {j for j, x in enumerate(out.witness) if x}
    avg = [sum((p[j] for p in points), ZERO) / len(points) for j in range(len(orbs))]
    coeffs = {orbs[j][0]: v for j, v in enumerate(avg) if v}
    return EffectiveDecomposition(D, coeffs, "max-support")
