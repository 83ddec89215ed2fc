"""The twelve acceptance criteria, each exact (tolerance 0).

Every test records one ``ACCEPTANCE k: PASS|FAIL`` line, printed inline and
again in the terminal summary.  A criterion that does not reproduce fails
with the observed values in its line.
"""
import json
import random
from collections import Counter
from fractions import Fraction
from itertools import combinations

import pytest

from conftest import ACCEPTANCE_LINES
from m0n.chambers6 import (
    _big_expression,
    _pull_boundary,
    chamber,
    classify_fibration,
    decompose_effective,
    present,
    rho,
    zeta,
)
from m0n.combinat import BoundaryClass, SymmetryGroup, boundary_classes, fcurve_restriction, fcurves, restriction
from m0n.exactla import extreme_rays, rank
from m0n.intersect import degree_on_m04, dot, dot_cycle, family, fnef, pairing_vector, pullback
from m0n.picard import (
    DivisorClass,
    Psi,
    average_expansion,
    class_sum,
    invariant_coords,
    keel_sum,
    m62_basis,
    named_class,
    pic_context,
    picard_dimension,
    psi_relation,
    relations,
)
from m0n.symscan import (
    SymClass,
    _m62_forms,
    certify_nef,
    family_endpoints,
    m62_b2_certificate,
    m62_census,
    m62_decompose,
    scan_bounds,
    shape_curve,
    sym_dot,
    sym_fineqs,
    sym_pullback_divisor,
    verify_certificate,
)

F = Fraction


@pytest.fixture
def report(request, capsys):
    k = int(request.node.name.split("_")[2])
    done = []

    def emit(k, ok, detail=""):
        line = f"ACCEPTANCE {k:2d}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        ACCEPTANCE_LINES[k] = line
        done.append(k)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    yield emit
    if not done:
        # the criterion raised before reaching its verdict
        line = f"ACCEPTANCE {k:2d}: FAIL  check raised before completion"
        ACCEPTANCE_LINES[k] = line
        with capsys.disabled():
            print("\n" + line)


def rnd(rng):
    return F(rng.randint(-20, 20), rng.randint(1, 7))


# ---------------------------------------------------------------------------


def test_criterion_01_picard_ranks(report):
    got = {}
    for n in range(5, 10):
        ctx = pic_context(n)
        rows = [[rel.coeff(s) for s in ctx.symbols] for rel in relations(n)]
        got[n] = len(ctx.symbols) - rank(rows)
    formula = {n: 2 ** (n - 1) - n * (n - 1) // 2 - 1 for n in range(5, 10)}
    ok = got == formula == {5: 5, 6: 16, 7: 42, 8: 99, 9: 219} and all(picard_dimension(n) == got[n] for n in got)
    report(1, ok, f"ranks {[got[n] for n in sorted(got)]}")


def test_criterion_02_identity_suite(report):
    rng = random.Random(2)
    checked = 0
    for n in range(5, 9):
        ctx = pic_context(n)
        labels = range(1, n + 1)
        for p, q, r, s in combinations(labels, 4):
            for a, b in ((keel_sum(n, p, q, r, s), keel_sum(n, p, r, q, s)), (keel_sum(n, p, q, r, s), keel_sum(n, p, s, q, r))):
                assert ctx.is_zero(a - b)
                checked += 1
        for i in labels:
            for q, r in combinations([x for x in labels if x != i], 2):
                assert ctx.is_zero(psi_relation(n, i, q, r))
                checked += 1
            assert ctx.equivalent(average_expansion(n, "psi_avg", i), DivisorClass.psi(n, i))
            checked += 1
        for bc in boundary_classes(n):
            assert ctx.equivalent(average_expansion(n, "delta_avg", bc.rep), DivisorClass(n, {bc: 1}))
            checked += 1
        # adjunction along random boundary restrictions
        K = named_class(n, "canonical")
        for _ in range(8):
            m = rng.randint(4, n)
            order = list(labels)
            rng.shuffle(order)
            cuts = sorted(rng.sample(range(1, n), m - 1))
            nu = restriction(n, [order[a:b] for a, b in zip([0] + cuts, cuts + [n])])
            glued = sum((DivisorClass.psi(m, x) for x in range(1, m + 1) if len(nu.blocks[x - 1]) >= 2), DivisorClass.zero(m))
            assert pic_context(m).is_zero(pullback(K, nu) - named_class(m, "canonical") - glued)
            checked += 1
    # the triple average on M_{0,6}
    S = frozenset({1, 2, 3})
    avg = average_expansion(6, "delta_avg", S)
    for bc in boundary_classes(6):
        side = bc.rep if 1 in bc.rep else frozenset(range(1, 7)) - bc.rep
        want = (F(2, 9) if len(bc.rep & S) == 1 else F(-1, 3)) if bc.size == 2 else (0 if side == S else F(1, 9))
        assert avg.coeff(bc) == want
    # delta_xy on M_{0,8} in the S_6 invariant classes
    ctx8 = pic_context(8)
    ic = invariant_coords(ctx8, DivisorClass.delta(8, {7, 8}), SymmetryGroup.sym(8, 6), m62_basis())
    assert ic.as_dict()["x3"] == F(3, 10) and ctx8.equivalent(ic.divisor(), DivisorClass.delta(8, {7, 8}))
    report(2, True, f"{checked} identities reduce to 0, n = 5..8")


def _closed_forms(D):
    c = {i: D.coeff(Psi(i)) for i in range(1, 7)}

    def b(T):
        return -D.coeff(BoundaryClass(6, frozenset(T)))

    def I(T):
        return sum(c[t] for t in T)

    def O(T):
        return sum(c[t] for t in range(1, 7) if t not in T)

    def sig(T, i, j):
        return sum(-D.coeff(bc) * v for bc, v in class_sum(6, set(T), j, i).items())

    tot = I(range(1, 7))
    checks = []

    def on(name, params):
        return dot_cycle(D, family(6, name, params).cycle)

    for T in combinations(range(1, 7), 2):
        checks.append(on("C_ab_1", T) == I(T) + O(T) / 4 + sig(T, 1, 2) / 4)
        checks.append(on("C_ab_2", T) == I(T) - sig(T, 2, 1) / 3)
        checks.append(on("C_ab_3", T) == F(3, 4) * O(T) + sig(T, 1, 2) / 4)
        checks.append(on("C_ab_4", T) == O(T) / 2 - sig(T, 1, 2) / 2)
    for T in combinations(range(1, 7), 3):
        S = sig(T, 1, 2)
        checks.append(on("C_1ab_1", T) == tot / 3 - b(T) - S / 9)
        checks.append(on("C_1ab_2", T) == I(T) / 3 + 2 * O(T) / 3 + S / 9)
        checks.append(on("C_1ab_3", T) == 2 * I(T) / 3 + O(T) / 3 + S / 9)
    return checks


def test_criterion_03_intersection_closed_forms(report):
    rng = random.Random(3)
    ctx = pic_context(6)
    total = 0
    for _ in range(30):
        D = ctx.from_coords([rnd(rng) for _ in range(ctx.dimension)])
        checks = _closed_forms(D)
        assert all(checks)
        total += len(checks)
    report(3, True, f"7 closed forms, 30 random divisors, {total} exact comparisons")


def test_criterion_04_presentations(report):
    rng = random.Random(4)
    for n in (5, 6):
        ctx = pic_context(n)
        for _ in range(100):
            D = DivisorClass(n, {s: rnd(rng) for s in ctx.symbols})
            P = present(D)
            assert all(not isinstance(s, Psi) for s in P.support())
            assert ctx.equivalent(P, D)
    report(4, True, "100 random divisors each on n = 5, 6")


def test_criterion_05_nef_cone_n6(report):
    ctx = pic_context(6)
    rows = [pairing_vector(ctx, f) for f in fcurves(6)]
    rays = extreme_rays(rows, ctx.dimension)
    labels, notes = Counter(), Counter()
    for r in rays:
        D = ctx.from_coords([F(x) for x in r])
        dec = decompose_effective(D, check_nef=False)
        assert dec.verify(ctx)
        notes["central" if dec.note == "central" else "big"] += 1
        labels[chamber(D, check_nef=False).label] += 1
    ok = len(rows) == 65 and len(labels) == 11 and all(fnef(ctx.from_coords(r)) for r in rays[:50])
    report(5, ok, f"{len(rays)} rays, all decomposed; {len(labels)} chamber labels; {dict(notes)}")


def _big_ray(t):
    D = sum((DivisorClass.psi(6, i) for i in range(1, 7)), DivisorClass.zero(6))
    for s in boundary_classes(6):
        if s.size == 3:
            D = D + DivisorClass(6, {s: -5 if s == t else 3})
    return D


def test_criterion_06_big_internals(report):
    rng = random.Random(6)
    ctx = pic_context(6)
    triples = [bc for bc in boundary_classes(6) if bc.size == 3]
    for _ in range(20):
        D = ctx.from_coords([rnd(rng) for _ in range(ctx.dimension)])
        z, r = zeta(D), rho(D)
        tot = sum(D.coeff(Psi(i)) for i in range(1, 7))
        for T in triples:
            zt = z.triple[T]
            expr = _big_expression(D, T, zt, r)
            for p, v in expr.items():
                if p.size == 2:
                    shift = F(2, 9) * zt if len(p.rep & T.rep) == 1 else -zt / 3
                    assert v == F(3, 10) * (z.pair[p] + shift)
                else:
                    assert v == F(3, 10) * (z.triple[p] + zt / 9)
        for i, j in combinations(range(2, 7), 2):
            for a, b in combinations(range(2, 7), 2):
                if {a, b} != {i, j}:
                    lhs = dot_cycle(D, family(6, "C_small_ab", (i, j, a, b)).cycle)
                    assert lhs == tot + D.coeff(BoundaryClass(6, frozenset({1, i, j}))) + D.coeff(BoundaryClass(6, frozenset({1, a, b})))
    built = 0
    for t in triples:
        D = _big_ray(t)
        assert fnef(D)
        z = zeta(D)
        assert z.negative_triples() == [t] and rho(D) > 0
        assert decompose_effective(D).verify(ctx)
        built += 1
    report(6, True, f"spread and C_ab pairing identities; {built} constructed big-branch divisors decomposed")


def test_criterion_07_fibrations(report):
    got = []
    got.append(classify_fibration(_pull_boundary(5, [1], [(2, 3), (2, 4), (2, 5)])).describe() == "forget_one(1)")
    for i in range(1, 7):
        pairs = list(combinations([x for x in range(1, 7) if x != i], 2))
        got.append(classify_fibration(_pull_boundary(6, [i], pairs)).describe() == f"forget_one({i})")
    P1 = _pull_boundary(6, [4, 5], [(1, 2), (2, 3), (1, 3)])
    P2 = _pull_boundary(6, [2, 3], [(1, 4), (4, 5), (1, 5)])
    for a, b in ((1, 1), (2, 3), (5, 1)):
        got.append(classify_fibration(P1 * a + P2 * b).describe() == "forget_pair_pair({2,3},{4,5})")
    for n in (5, 6):
        fc = classify_fibration(named_class(n, "kappa1"))
        got.append(fc.tag == "big" and bool(fc.evidence))
    report(7, all(got), f"{sum(got)}/{len(got)} classifications as expected")


def test_criterion_08_m62(report):
    census = m62_census()
    forms = _m62_forms()
    rays = extreme_rays(forms.rows, len(forms.names))
    names, classes = m62_basis()

    def divisor(coords):
        D = DivisorClass.zero(8)
        for c, b in zip(coords, classes):
            if c:
                D = D + b * F(c)
        return D

    branches = Counter()
    for r in rays:
        res = m62_decompose(divisor(r))
        assert res.decomposition.verify(pic_context(8))
        branches[res.branch] += 1
    rng = random.Random(8)
    for _ in range(10):
        picks = [(F(rng.randint(1, 3)), r) for r in rng.sample(rays, 4)]
        coords = [sum(w * r[k] for w, r in picks) for k in range(len(names))]
        res = m62_decompose(divisor(coords))
        branches[res.branch] += 1
    # b_2 >= 0 on the whole invariant F-nef cone: the second branch is exercised off the cone
    cert = m62_b2_certificate()
    k2 = forms.names.index("2")
    assert cert is not None and all(
        sum((l * row[t] for l, row in zip(cert, forms.rows)), F(0)) == (1 if t == k2 else 0) for t in range(len(names))
    )
    second = m62_decompose(divisor([3, 3, 4, 4, 5, 0, 0, -1, 0]), check_nef=False)
    assert second.branch == "b2<0" and second.decomposition.verify(pic_context(8))
    ok = census["orbits"] == 29 and census["irredundant"] == 28 and len(census["redundant"]) == 1
    report(
        8,
        ok,
        f"{census['orbits']} orbits, {census['distinct_forms']} forms, redundant {census['redundant'][0]}, "
        f"{census['irredundant']} irredundant; {len(rays)} rays + 10 samples {dict(branches)}; "
        "b2<0 empty on the cone (certificate), identity verified off it",
    )


# the n = 13 inequalities as (constant, r_2..r_6), read as constant + row . r >= 0
N13 = {
    (-1, (3, -1, 0, 0, 0)), (0, (0, 2, -1, 0, 0)), (0, (1, -1, 2, -1, 0)), (0, (1, 0, -1, 2, -1)),
    (0, (1, 0, 0, -1, 1)), (1, (-2, 2, 1, -1, 0)), (1, (-1, 0, 1, 1, -1)), (1, (-1, 1, -1, 1, 0)),
    (1, (-1, 1, 0, -2, 2)), (1, (0, -2, 2, 0, 0)), (1, (0, -1, 0, 0, 1)), (1, (0, 0, -3, 3, 0)),
    (2, (-3, 0, 3, 0, -1)), (2, (-2, -1, 1, 2, -1)), (2, (-2, 0, 0, -1, 2)), (2, (-1, -2, 0, 1, 1)),
    (2, (-1, -1, -2, 1, 2)), (2, (0, -3, -1, 0, 3)),
}


def test_criterion_09_scans(report):
    parts = {}
    got13 = {q.normalized() for q in sym_fineqs(13)}
    r13 = scan_bounds(13)
    parts["n13 inequalities"] = got13 == N13
    parts["n13 max<=1"] = r13.max_value() == 1 and r13.bounded
    parts["n13 exceptional"] = set(r13.exceptional) == {(F(1, 3), 0, 0, F(1, 3), 1), (1, F(1, 3), F(1, 3), 0, 0)}
    r12 = scan_bounds(12)
    parts["n12 single class"] = set(r12.exceptional) == {(F(1, 3), 0, 0, F(1, 3), 1)} and r12.max_value() == 1
    maxima = {n: scan_bounds(n).max_value() for n in range(8, 12)}
    parts["n8-11 maxima<1"] = all(v < 1 for v in maxima.values())
    r14 = scan_bounds(14)
    slice3 = max(e.value for e in r14.entries if e.slice == 3 and e.target == 7 and e.status == "optimal")
    base = {2: F(1, 3), 5: F(1, 3), 6: 1}
    ends = {v: ok for v, ok, _ in family_endpoints(14, base, 7, [1, F(4, 3), F(4, 3) + F(1, 100)])}
    parts["n14 max r7=4/3"] = slice3 == F(4, 3)
    parts["n14 endpoints 1,4/3 F-nef"] = ends[1] and ends[F(4, 3)]
    parts["n14 4/3+1/100 violating"] = not ends[F(4, 3) + F(1, 100)]
    failed = [k for k, v in parts.items() if not v]
    detail = (
        f"passed: {', '.join(k for k, v in parts.items() if v)}"
        + (f" | failed: {', '.join(failed)}" if failed else "")
        + f" | observed n12 max {r12.max_value()} exceptional {len(r12.exceptional)},"
        f" n8-11 maxima {[str(maxima[n]) for n in sorted(maxima)]}, n14 slice r3=0 max r7 {slice3}"
    )
    report(9, not failed, detail)


def test_criterion_10_f_identity(report):
    rng = random.Random(10)
    curves = 0
    for n in range(4, 10):
        K = named_class(n, "canonical")
        for f in fcurves(n):
            assert dot(K, f) == 2 - f.singletons
            curves += 1
    shapes = 0
    for n in range(5, 10):
        for _ in range(3):
            r = tuple(rnd(rng) for _ in range(2, n // 2 + 1))
            cls = SymClass(n, r, True)
            D = cls.divisor()
            for q in sym_fineqs(n):
                assert sym_dot(cls, q.shape) == dot(D, shape_curve(n, q.shape)) == q.evaluate(r)
                shapes += 1
    report(10, True, f"{curves} F-curves for n = 4..9; {shapes} shape triples agree")


def test_criterion_11_pullback_coherence(report):
    rng = random.Random(11)
    count = 0
    for n in range(4, 8):
        ctx = pic_context(n)
        D = DivisorClass(n, {s: rnd(rng) for s in ctx.symbols})
        for f in fcurves(n):
            assert dot(D, f) == degree_on_m04(pullback(D, fcurve_restriction(f)))
            count += 1
    for _ in range(20):
        n = rng.randint(6, 10)
        cls = SymClass(n, tuple(rnd(rng) for _ in range(2, n // 2 + 1)), False)
        m = rng.randint(4, n - 1)
        order = list(range(1, n + 1))
        rng.shuffle(order)
        cuts = sorted(rng.sample(range(1, n), m - 1))
        nu = restriction(n, [order[a:b] for a, b in zip([0] + cuts, cuts + [n])])
        P = pullback(cls.divisor(), nu)
        Q = DivisorClass.zero(m)
        for s, v in P.items():
            Q = Q + (average_expansion(m, "psi_avg", s.i) * v if isinstance(s, Psi) else DivisorClass(m, {s: v}))
        S = sym_pullback_divisor(cls, nu)
        assert {k: v for k, v in Q.items() if v} == {k: v for k, v in S.items() if v}
        assert pic_context(m).equivalent(P, S)
    report(11, True, f"{count} F-curves via M_0,4 pullback; 20 random (r, nu) tables")


def test_criterion_12_certificates(report):
    c8 = certify_nef(named_class(8, "kappa1"), SymmetryGroup.sym(8, 6))
    c9 = certify_nef(named_class(9, "kappa1"), SymmetryGroup.sym(9, 8))
    ok = (
        c8.certified
        and c8.root.method == "m62"
        and verify_certificate(json.loads(json.dumps(c8.to_document())))
        and c9.certified
        and c9.root.method == "onepoint"
        and [c.method for c in c9.children] == ["m62", "m62"]
        and verify_certificate(json.loads(json.dumps(c9.to_document())))
    )
    report(12, ok, f"n=8 root {c8.root.method}; n=9 root {c9.root.method} with {len(c9.children)} k=8 children; both re-verified")
