import itertools
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from m0n.combinat import (
    BoundaryClass,
    DomainError,
    FCurve,
    SymmetryGroup,
    boundary_classes,
    canonical,
    class_orbits,
    compose,
    fcurve_orbits,
    fcurves,
    orbits,
    partitions_into,
    restriction,
    restriction_orbits,
    set_partitions,
)


def stirling2(n, k):
    if n == k:
        return 1
    if k == 0 or n < k:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def test_boundary_class_counts():
    assert len(boundary_classes(4)) == 3
    assert len(boundary_classes(5)) == 10
    classes = boundary_classes(6)
    assert len(classes) == 25
    assert sum(1 for c in classes if c.size == 2) == 15
    assert sum(1 for c in classes if c.size == 3) == 10
    with pytest.raises(DomainError):
        boundary_classes(3)


@pytest.mark.parametrize("n", range(4, 11))
def test_boundary_count_formula(n):
    assert len(boundary_classes(n)) == 2 ** (n - 1) - n - 1


def test_fcurve_counts():
    assert len(fcurves(4)) == 1
    assert len(fcurves(6)) == 65
    assert len(fcurves(8)) == 1701
    for n in range(5, 10):
        assert len(fcurves(n)) == 4 * stirling2(n - 1, 4) + stirling2(n - 1, 3)


@given(st.integers(4, 9), st.data())
def test_canonical_is_an_involution_invariant(n, data):
    size = data.draw(st.integers(2, n - 2))
    S = frozenset(data.draw(st.permutations(range(1, n + 1)))[:size])
    comp = frozenset(range(1, n + 1)) - S
    assert canonical(n, S) == canonical(n, comp)
    assert BoundaryClass(n, S) == BoundaryClass(n, comp)
    rep = canonical(n, S)
    assert len(rep) <= n - len(rep)
    if 2 * len(rep) == n:
        assert 1 in rep


def test_canonical_rejects_bad_subsets():
    with pytest.raises(DomainError):
        canonical(5, {1})
    with pytest.raises(DomainError):
        canonical(5, {1, 9})


@given(st.integers(1, 7), st.integers(1, 5))
def test_set_partitions_count(size, k):
    parts = list(set_partitions(range(size), k))
    assert len(parts) == stirling2(size, k)
    assert len({tuple(sorted(tuple(sorted(b)) for b in p)) for p in parts}) == len(parts)


def test_orbit_examples():
    full6 = SymmetryGroup.full(6)
    sizes = sorted(len(m) for _, m in class_orbits(full6))
    assert sizes == [10, 15]
    assert len(fcurve_orbits(SymmetryGroup.full(13))) == 18
    assert len(fcurve_orbits(SymmetryGroup.sym(8, 6))) == 29


@given(st.integers(5, 8), st.data())
def test_orbits_partition_input(n, data):
    g = data.draw(st.integers(0, n))
    group = SymmetryGroup.sym(n, g)
    curve_orbits = orbits(fcurves(n), group)
    assert sum(size for _, size in curve_orbits) == len(fcurves(n))
    for rep, _ in curve_orbits:
        assert group.canonical(rep) == rep
    # the counting enumeration agrees with the explicit one
    fast = fcurve_orbits(group)
    assert sorted(size for _, size in fast) == sorted(size for _, size in curve_orbits)


def test_group_specs():
    assert SymmetryGroup.parse(8, "sym:6").describe() == "sym:6"
    assert SymmetryGroup.parse(5, "full").describe() == "full"
    assert SymmetryGroup.parse(5, "none").describe() == "none"
    with pytest.raises(DomainError):
        SymmetryGroup.parse(5, "cyclic")


def test_restriction_examples():
    assert restriction(6, [{1}, {2}, {3, 4}, {5, 6}]).m == 4
    assert restriction(8, [{1}, {2}, {3}, {4}, {5}, {6}, {7, 8}]).m == 7
    nu = restriction(9, [{1, 2}] + [{i} for i in range(3, 10)])
    assert nu.m == 8
    with pytest.raises(DomainError):
        restriction(5, [{1, 2}, {2, 3}, {4}, {5}])
    with pytest.raises(DomainError):
        restriction(5, [{1, 2, 3}, {4, 5}])


def test_compose_flattens():
    outer = restriction(7, [{1, 2}, {3}, {4}, {5}, {6, 7}])
    inner = restriction(5, [{1, 2}, {3}, {4}, {5}])
    assert compose(outer, inner).blocks == restriction(7, [{1, 2, 3}, {4}, {5}, {6, 7}]).blocks


def test_fcurve_validation():
    with pytest.raises(DomainError):
        FCurve.of(5, {1, 2}, {3}, {4})
    assert FCurve.of(6, {5, 6}, {1}, {3, 4}, {2}).shape == (2, 2, 1, 1)


@pytest.mark.parametrize("n,g,m", [(9, 8, 8), (8, 6, 7), (9, 8, 7), (10, 9, 8)])
def test_restriction_orbits_cover(n, g, m):
    group = SymmetryGroup.sym(n, g)
    found = restriction_orbits(group, m)
    assert sum(size for _, size in found) == stirling2(n, m)
    assert len({tuple(b for b in nu.blocks) for nu, _ in found}) == len(found)


def test_restriction_orbits_eight_one():
    found = restriction_orbits(SymmetryGroup.sym(9, 8), 8)
    assert sorted(size for _, size in found) == [8, comb(8, 2)]


def test_partitions_into():
    assert len(partitions_into(13, 4)) == 18
    assert all(sum(p) == 13 and len(p) == 4 for p in partitions_into(13, 4))
    assert list(itertools.chain(partitions_into(4, 4))) == [(1, 1, 1, 1)]
