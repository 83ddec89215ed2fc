import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from m0n.combinat import DomainError, SymmetryGroup, partitions_into, restriction
from m0n.intersect import dot, pullback
from m0n.picard import DivisorClass, Psi, average_expansion, m62_basis, named_class, pic_context
from m0n.symscan import (
    FalsificationError,
    PreconditionError,
    SymClass,
    canonical_b_coords,
    certify_nef,
    family_endpoints,
    m62_b2_certificate,
    m62_census,
    m62_decompose,
    onepoint_decompose,
    scan_bounds,
    shape_curve,
    sym_dot,
    sym_fineqs,
    sym_fnef,
    sym_pullback,
    sym_pullback_divisor,
    verify_certificate,
)

F = Fraction


@pytest.mark.parametrize("n", range(5, 17))
def test_canonical_b_coords_closed_form(n):
    assert canonical_b_coords(n) == {k: F(k * (n - k), n - 1) - 2 for k in range(2, n // 2 + 1)}


def test_fineqs_n8():
    rows = {q.shape: (q.constant, q.coeffs) for q in sym_fineqs(8)}
    assert rows == {
        (5, 1, 1, 1): (-1, (3, -1, 0)),
        (4, 2, 1, 1): (0, (0, 2, -1)),
        (3, 3, 1, 1): (0, (1, -2, 2)),
        (3, 2, 2, 1): (1, (-2, 1, 1)),
        (2, 2, 2, 2): (2, (-4, 0, 3)),
    }
    assert sym_fineqs(8)[-1].text() == "2 + 3r_4 >= 4r_2"


def test_fineqs_n13():
    qs = sym_fineqs(13)
    assert len(qs) == 18 == len(partitions_into(13, 4))
    assert qs[0].text() == "3r_2 >= r_3 + 1"
    assert qs[3].text() == "1 + 2r_3 + r_4 >= 2r_2 + r_5"
    assert len({q.normalized() for q in qs}) == 18


@pytest.mark.parametrize("n", [6, 7, 8, 9])
def test_sym_dot_matches_dot(n):
    rng = random.Random(n)
    for with_K in (True, False):
        cls = SymClass(n, [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n // 2 - 1)], with_K)
        D = cls.divisor()
        for q in sym_fineqs(n):
            assert sym_dot(cls, q.shape) == dot(D, shape_curve(n, q.shape))


def test_symclass_validation():
    with pytest.raises(DomainError):
        SymClass(8, (1, 2))
    with pytest.raises(DomainError):
        sym_dot(SymClass(8, (0, 0, 0)), (3, 3, 1, 1, 0))
    assert SymClass.from_map(8, {3: 1}).describe() == "K + 1*B_3"


def test_scan_n13_table():
    rep = scan_bounds(13)
    table = {(e.slice, e.target): e for e in rep.entries}
    assert rep.empty_slices() == (2,)
    assert table[(5, 6)].value == F(1, 2)
    assert table[(5, 2)].value == 1 and table[(5, 2)].vertex == (1, F(1, 3), F(1, 3), 0, 0)
    for i in (3, 4):
        assert table[(i, 6)].value == 1 and table[(i, 6)].vertex == (F(1, 3), 0, 0, F(1, 3), 1)
    assert rep.max_value() == 1 and rep.violations == ()


def test_scan_n10_and_n12():
    r10 = scan_bounds(10)
    assert r10.max_value() == 1
    assert (1, F(1, 4), F(1, 2), 0) in r10.exceptional
    r12 = scan_bounds(12)
    assert r12.max_value() == F(7, 6)
    assert set(r12.exceptional) == {(F(1, 3), 0, 0, F(1, 3), 1), (F(1, 2), F(1, 2), 1, F(1, 4), 0)}
    with pytest.raises(DomainError):
        scan_bounds(7)


def test_family_endpoints_n14():
    out = family_endpoints(14, {2: F(1, 3), 5: F(1, 3), 6: 1}, 7, [F(5, 6), 1, F(4, 3), 2, F(21, 10)])
    assert [ok for _, ok, _ in out] == [True, True, True, True, False]
    assert not family_endpoints(14, {2: F(1, 3), 5: F(1, 3), 6: 1}, 7, [F(4, 5)])[0][1]


def test_sym_fnef_example():
    ok, bad = sym_fnef(SymClass.from_map(13, {2: F(1, 3), 5: F(1, 3), 6: 1}))
    assert ok and bad == ()
    ok, bad = sym_fnef(SymClass.from_map(13, {}))
    assert not ok and (10, 1, 1, 1) in bad


@given(st.integers(6, 10), st.randoms(use_true_random=False))
def test_sym_pullback_agrees_with_pullback(n, rng):
    r = tuple(F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(2, n // 2 + 1))
    cls = SymClass(n, r, False)
    m = rng.randint(4, min(n - 1, 8))
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    cuts = sorted(rng.sample(range(1, n), m - 1))
    nu = restriction(n, [labels[a:b] for a, b in zip([0] + cuts, cuts + [n])])
    P = pullback(cls.divisor(), nu)
    Q = DivisorClass.zero(m)
    for s, v in P.items():
        Q = Q + (average_expansion(m, "psi_avg", s.i) * v if isinstance(s, Psi) else DivisorClass(m, {s: v}))
    S = sym_pullback_divisor(cls, nu)
    assert {k: v for k, v in Q.items() if v} == {k: v for k, v in S.items() if v}


def test_sym_pullback_table_keys():
    nu = restriction(8, [[1, 2], [3], [4], [5], [6, 7, 8]])
    table = sym_pullback(SymClass(8, (1, 0, 0), False), nu)
    assert all(2 <= i <= 3 for i, _ in table)
    with pytest.raises(DomainError):
        sym_pullback(SymClass(8, (1, 0, 0)), nu)


def _m62_divisor(coords):
    names, classes = m62_basis()
    D = DivisorClass.zero(8)
    for c, b in zip(coords, classes):
        D = D + b * F(c)
    return D


def test_m62_census_and_branch():
    c = m62_census()
    assert c["orbits"] == 29 and c["distinct_forms"] == 29 and c["irredundant"] == 28
    assert c["redundant"] == ("F(1,2,3 | 4,5 | 6 | 7,8)",)
    res = m62_decompose(named_class(8, "kappa1").act({}))
    assert res.branch == "b2>=0" and all(v >= 0 for v in res.coefficients.values())
    assert all(res.certificates[k] is not None for k in res.coefficients)
    assert m62_b2_certificate() is not None


def test_m62_second_branch_identity():
    res = m62_decompose(_m62_divisor([3, 3, 4, 4, 5, 0, 0, -1, 0]), check_nef=False)
    assert res.branch == "b2<0"
    assert res.coefficients == {
        "x1": F(1, 2), "y1": F(1, 2), "x2": 0, "y2": 0, "x3": F(1, 2),
        "xy1": 10, "xy2": 6, "3": 3, "xy": 15,
    }
    with pytest.raises(FalsificationError):
        m62_decompose(_m62_divisor([0, 0, 0, 0, 0, 0, 0, -1, 0]), check_nef=False)
    with pytest.raises(PreconditionError):
        m62_decompose(named_class(8, "canonical"))


def test_onepoint_kappa():
    res = onepoint_decompose(named_class(9, "kappa1"))
    assert list(res.coords.values()) == [F(3, 4), F(5, 4), F(3, 2), F(3, 2), F(5, 4), F(3, 4)]
    assert res.decomposition.verify(pic_context(9))


def test_certificate_n8_round_trip():
    cert = certify_nef(named_class(8, "kappa1"), SymmetryGroup.sym(8, 6))
    assert cert.certified and cert.root.method == "m62" and cert.children == ()
    doc = json.loads(json.dumps(cert.to_document()))
    assert verify_certificate(doc)


def test_certificate_n9_and_tampering():
    cert = certify_nef(named_class(9, "kappa1"), SymmetryGroup.sym(9, 8))
    assert cert.certified and cert.root.method == "onepoint"
    assert [c.method for c in cert.children] == ["m62", "m62"]
    doc = json.loads(json.dumps(cert.to_document()))
    assert verify_certificate(doc)
    bad = json.loads(json.dumps(doc))
    key = next(iter(bad["root"]["decomposition"]))
    bad["root"]["decomposition"][key] = "1000"
    with pytest.raises(AssertionError):
        verify_certificate(bad)
    short = json.loads(json.dumps(doc))
    short["children"] = short["children"][:1]
    with pytest.raises(AssertionError):
        verify_certificate(short)


def test_certify_rejects_non_nef():
    with pytest.raises(PreconditionError):
        certify_nef(named_class(8, "canonical"), SymmetryGroup.full(8))
