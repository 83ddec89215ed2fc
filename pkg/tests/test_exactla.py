import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from m0n.exactla import (
    LPProblem,
    ShapeError,
    extreme_rays,
    fm_bounds,
    format_rational,
    lp,
    nullspace,
    parse_rational,
    polytope_vertices,
    primitive,
    rank,
    rref,
    solve,
    verify_outcome,
)

small = st.integers(-4, 4)
fractions = st.builds(Fraction, st.integers(-30, 30), st.integers(1, 9))


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_cols).flatmap(
        lambda c: st.lists(st.lists(fractions, min_size=c, max_size=c), min_size=1, max_size=max_rows)
    )


def test_rref_examples():
    r, red, cols = rref([[1, 2], [2, 4]])
    assert r == 1 and cols == [0]
    r, red, cols = rref([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert r == 3 and red.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert rank([]) == 0


@given(matrices())
def test_rref_idempotent_and_rank_bound(m):
    r, red, _ = rref(m)
    assert r <= min(len(m), len(m[0]))
    r2, red2, _ = rref(red)
    assert r2 == r
    assert [row for row in red2.tolist() if any(row)] == [row for row in red.tolist() if any(row)]


@given(matrices(), st.data())
def test_solve_and_nullspace(m, data):
    x = [data.draw(fractions) for _ in m[0]]
    rhs = [sum(a * b for a, b in zip(row, x)) for row in m]
    y = solve(m, rhs)
    assert y is not None
    assert [sum(a * b for a, b in zip(row, y)) for row in m] == rhs
    for v in nullspace(m):
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)
    assert len(nullspace(m)) == len(m[0]) - rank(m)


def test_rational_text_round_trip():
    for q in (Fraction(0), Fraction(-3, 7), Fraction(5)):
        assert parse_rational(format_rational(q)) == q
    assert format_rational(Fraction(5)) == "5"
    with pytest.raises(ValueError):
        parse_rational("1.5")


def test_lp_examples():
    p = LPProblem(1, inequalities=(((-1,), -1), ((1,), 0)), objective=(1,), sense="maximize")
    out = lp(p)
    assert out.status == "optimal" and out.value == 1
    assert verify_outcome(p, out)
    p = LPProblem(1, inequalities=(((1,), 1), ((-1,), 0)))
    out = lp(p)
    assert out.status == "infeasible"
    assert verify_outcome(p, out)
    p = LPProblem(1, inequalities=(((1,), 0),), objective=(1,), sense="maximize")
    assert lp(p).status == "unbounded"


def test_lp_shape_errors():
    with pytest.raises(ShapeError):
        LPProblem(2, inequalities=(((1,), 0),))
    with pytest.raises(ShapeError):
        LPProblem(1, objective=None, sense="maximize")


@given(
    st.integers(1, 3).flatmap(
        lambda nv: st.tuples(
            st.just(nv),
            st.lists(st.tuples(st.lists(small, min_size=nv, max_size=nv), small), min_size=1, max_size=5),
            st.lists(small, min_size=nv, max_size=nv),
            st.sets(st.integers(0, nv - 1)),
            st.sampled_from(["maximize", "minimize"]),
        )
    )
)
def test_lp_matches_fourier_motzkin(case):
    nv, ins, obj, nonneg, sense = case
    ins = tuple((tuple(r), b) for r, b in ins)
    p = LPProblem(nv, (), ins, tuple(obj), sense, frozenset(nonneg))
    out = lp(p)
    assert verify_outcome(p, out)
    rows = [(tuple(r) + (0,), b) for r, b in ins]
    rows += [(tuple(1 if j == k else 0 for j in range(nv)) + (0,), 0) for k in nonneg]
    fm = fm_bounds(rows, nv, [(tuple(obj) + (-1,), 0)])
    if fm is None:
        assert out.status == "infeasible"
        return
    lo, hi = fm
    bound = hi if sense == "maximize" else lo
    assert (out.status == "unbounded") == (bound is None)
    if bound is not None:
        assert out.value == bound


def test_extreme_ray_examples():
    assert sorted(extreme_rays([[1, 0], [0, 1]])) == [(0, 1), (1, 0)]
    assert sorted(extreme_rays([[1, 1], [1, -1]])) == [(1, -1), (1, 1)]
    # a half-space in 3 variables has a two-dimensional lineality space
    rays = extreme_rays([[1, 0, 0]], 3)
    assert (1, 0, 0) in rays and (0, 1, 0) in rays and (0, -1, 0) in rays


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=6))
def test_extreme_rays_sound_and_complete_in_3d(rows):
    rays = extreme_rays(rows, 3)
    for r in rays:
        assert all(sum(a * b for a, b in zip(row, r)) >= 0 for row in rows)
    # every edge direction of the cone (intersection of two facet planes) is generated
    planes = rows + [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    for a, b in itertools.combinations(planes, 2):
        c = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
        for s in (1, -1):
            v = tuple(s * x for x in c)
            if not any(v) or not all(sum(p * q for p, q in zip(row, v)) >= 0 for row in rows):
                continue
            eqs = tuple((tuple(r[i] for r in rays), v[i]) for i in range(3))
            prob = LPProblem(len(rays), equalities=eqs, nonnegative=frozenset(range(len(rays))))
            assert lp(prob).status == "optimal"


def test_primitive_and_vertices():
    assert primitive([Fraction(1, 2), Fraction(-3, 4)]) == (2, -3)
    verts, rays = polytope_vertices([[1, 0], [0, 1], [-1, -1]], [0, 0, -1])
    assert verts == [(0, 0), (0, 1), (1, 0)] and rays == []
