"""Boundary classes, F-curves, Young-subgroup orbits and boundary restrictions.

Marked points are the labels ``1..n``.  A boundary class is stored by its
canonical side: the smaller of ``S`` and its complement, and on a tie the
side containing label 1.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Iterable, Iterator, Sequence

__all__ = [
    "DomainError",
    "canonical",
    "BoundaryClass",
    "boundary_classes",
    "FCurve",
    "fcurves",
    "set_partitions",
    "SymmetryGroup",
    "orbits",
    "BoundaryRestriction",
    "restriction",
    "compose",
    "restriction_orbits",
    "fcurve_orbits",
    "class_orbits",
    "WeightedCycle",
    "partitions_into",
]


class DomainError(ValueError):
    """Raised when an argument lies outside the supported domain."""


def _labels(n: int) -> frozenset:
    return frozenset(range(1, n + 1))


def canonical(n: int, subset: Iterable[int]) -> frozenset:
    """Canonical side of the split ``{S, S^c}`` of ``{1..n}``."""
    s = frozenset(subset)
    if not s <= _labels(n):
        raise DomainError(f"labels {sorted(s)} not inside 1..{n}")
    c = _labels(n) - s
    if len(s) < 2 or len(c) < 2:
        raise DomainError(f"{sorted(s)} does not define a boundary divisor for n={n}")
    if len(s) < len(c):
        return s
    if len(c) < len(s):
        return c
    return s if 1 in s else c


@dataclass(frozen=True, order=False)
class BoundaryClass:
    n: int
    rep: frozenset

    def __post_init__(self):
        if self.n < 4:
            raise DomainError("boundary classes need n >= 4")
        rep = canonical(self.n, self.rep)
        object.__setattr__(self, "rep", rep)

    @classmethod
    def of(cls, n: int, subset: Iterable[int]) -> "BoundaryClass":
        return cls(n, frozenset(subset))

    @property
    def size(self) -> int:
        return len(self.rep)

    @property
    def complement(self) -> frozenset:
        return _labels(self.n) - self.rep

    def sides(self) -> tuple[frozenset, frozenset]:
        return self.rep, self.complement

    def sort_key(self):
        return (len(self.rep), sorted(self.rep))

    def __lt__(self, other: "BoundaryClass"):
        return self.sort_key() < other.sort_key()

    def label(self) -> str:
        return "[" + ",".join(str(i) for i in sorted(self.rep)) + "]"

    def __repr__(self):
        return f"delta{self.label()}"


@lru_cache(maxsize=None)
def boundary_classes(n: int) -> tuple[BoundaryClass, ...]:
    """All boundary classes of ``M_{0,n}``, sorted by size then lexicographically."""
    if n < 4:
        raise DomainError("boundary classes need n >= 4")
    out = []
    labels = range(1, n + 1)
    for k in range(2, n // 2 + 1):
        for s in combinations(labels, k):
            fs = frozenset(s)
            if canonical(n, fs) == fs:
                out.append(BoundaryClass(n, fs))
    return tuple(out)


@dataclass(frozen=True)
class FCurve:
    """A partition of ``{1..n}`` into four nonempty blocks."""

    n: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=lambda b: sorted(b)))
        if len(blocks) != 4:
            raise DomainError("an F-curve has exactly four blocks")
        if any(not b for b in blocks):
            raise DomainError("F-curve blocks must be nonempty")
        union = frozenset().union(*blocks)
        if sum(len(b) for b in blocks) != self.n or union != _labels(self.n):
            raise DomainError("F-curve blocks must partition 1..n")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, n: int, *blocks) -> "FCurve":
        return cls(n, tuple(frozenset(b) for b in blocks))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(sorted((len(b) for b in self.blocks), reverse=True))

    @property
    def singletons(self) -> int:
        return sum(1 for b in self.blocks if len(b) == 1)

    def __repr__(self):
        inner = " | ".join(",".join(str(i) for i in sorted(b)) for b in self.blocks)
        return f"F({inner})"


def set_partitions(items: Sequence, k: int) -> Iterator[list[list]]:
    """Partitions of ``items`` into exactly ``k`` nonempty blocks, in a fixed order."""
    items = list(items)
    if k == 0:
        if not items:
            yield []
        return
    if len(items) < k:
        return
    first, rest = items[0], items[1:]
    # first element either opens a new block or joins one of the k blocks of the rest
    for part in set_partitions(rest, k - 1):
        yield [[first]] + part
    for part in set_partitions(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


@lru_cache(maxsize=None)
def fcurves(n: int) -> tuple[FCurve, ...]:
    if n < 4:
        raise DomainError("F-curves need n >= 4")
    out = {FCurve(n, tuple(frozenset(b) for b in p)) for p in set_partitions(range(1, n + 1), 4)}
    return tuple(sorted(out, key=lambda f: [sorted(b) for b in f.blocks]))


def partitions_into(n: int, parts: int, minimum: int = 1) -> list[tuple[int, ...]]:
    """Integer partitions of ``n`` into exactly ``parts`` parts, nonincreasing."""
    out = []

    def rec(rem, k, cap, acc):
        if k == 0:
            if rem == 0:
                out.append(tuple(acc))
            return
        for p in range(min(cap, rem - (k - 1) * minimum), minimum - 1, -1):
            rec(rem - p, k - 1, p, acc + [p])

    rec(n, parts, n, [])
    return out


# ---------------------------------------------------------------------------
# symmetry


@dataclass(frozen=True)
class SymmetryGroup:
    """The Young subgroup permuting labels within each cell."""

    n: int
    cells: tuple

    def __post_init__(self):
        cells = tuple(sorted((tuple(sorted(c)) for c in self.cells if c), key=lambda c: c[0]))
        flat = [x for c in cells for x in c]
        if sorted(flat) != list(range(1, self.n + 1)):
            raise DomainError("symmetry cells must partition 1..n")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def trivial(cls, n: int) -> "SymmetryGroup":
        return cls(n, tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def full(cls, n: int) -> "SymmetryGroup":
        return cls(n, (tuple(range(1, n + 1)),))

    @classmethod
    def sym(cls, n: int, g: int) -> "SymmetryGroup":
        """``S_g`` on labels ``1..g``; the remaining labels are fixed."""
        if not 0 <= g <= n:
            raise DomainError("g must lie in 0..n")
        return cls(n, (tuple(range(1, g + 1)),) + tuple((i,) for i in range(g + 1, n + 1)))

    @classmethod
    def parse(cls, n: int, spec: str) -> "SymmetryGroup":
        spec = spec.strip()
        if spec == "none":
            return cls.trivial(n)
        if spec == "full":
            return cls.full(n)
        if spec.startswith("sym:"):
            return cls.sym(n, int(spec[4:]))
        raise DomainError(f"unknown group spec {spec!r}")

    def describe(self) -> str:
        big = [c for c in self.cells if len(c) > 1]
        if not big:
            return "none"
        if len(big) == 1 and big[0] == tuple(range(1, self.n + 1)):
            return "full"
        if len(big) == 1 and big[0] == tuple(range(1, len(big[0]) + 1)):
            return f"sym:{len(big[0])}"
        return "cells:" + ";".join(",".join(map(str, c)) for c in big)

    @property
    def cell_of(self) -> dict:
        return {x: i for i, c in enumerate(self.cells) for x in c}

    @property
    def order(self) -> int:
        from math import factorial

        out = 1
        for c in self.cells:
            out *= factorial(len(c))
        return out

    def generators(self) -> list[dict]:
        """Adjacent transpositions inside each cell."""
        gens = []
        for c in self.cells:
            for a, b in zip(c, c[1:]):
                gens.append({a: b, b: a})
        return gens

    def is_trivial(self) -> bool:
        return all(len(c) == 1 for c in self.cells)

    def canonical_subset(self, s: frozenset) -> frozenset:
        """Least image of a subset: within each cell take the first ``|s & cell|`` labels."""
        out = []
        for c in self.cells:
            k = sum(1 for x in c if x in s)
            out.extend(c[:k])
        return frozenset(out)

    def canonical_class(self, bc: BoundaryClass) -> BoundaryClass:
        a = self.canonical_subset(bc.rep)
        b = self.canonical_subset(bc.complement)
        return min(BoundaryClass(self.n, a), BoundaryClass(self.n, b))

    def _signature(self, blocks) -> tuple:
        cell_of = self.cell_of
        ncell = len(self.cells)
        sig = []
        for b in blocks:
            counts = [0] * ncell
            for x in b:
                counts[cell_of[x]] += 1
            sig.append(tuple(counts))
        return tuple(sorted(sig, reverse=True))

    def canonical_fcurve(self, f: FCurve) -> FCurve:
        """Least image of an F-curve: distribute each cell's labels in order over the blocks."""
        sig = self._signature(f.blocks)
        blocks = [[] for _ in sig]
        for ci, c in enumerate(self.cells):
            pos = 0
            for bi, counts in enumerate(sig):
                blocks[bi].extend(c[pos:pos + counts[ci]])
                pos += counts[ci]
        return FCurve(self.n, tuple(frozenset(b) for b in blocks))

    def canonical(self, obj):
        if isinstance(obj, BoundaryClass):
            return self.canonical_class(obj)
        if isinstance(obj, FCurve):
            return self.canonical_fcurve(obj)
        raise DomainError(f"cannot act on {type(obj).__name__}")

    def act(self, perm: dict, obj):
        if isinstance(obj, BoundaryClass):
            return BoundaryClass(self.n, frozenset(perm.get(x, x) for x in obj.rep))
        if isinstance(obj, FCurve):
            return FCurve(self.n, tuple(frozenset(perm.get(x, x) for x in b) for b in obj.blocks))
        raise DomainError(f"cannot act on {type(obj).__name__}")


def orbits(objects: Iterable, group: SymmetryGroup) -> list[tuple[object, int]]:
    """Orbit representatives with the number of input objects in each orbit."""
    counts: dict = {}
    order = []
    for obj in objects:
        if obj.n != group.n:
            raise DomainError("object and group live on different n")
        rep = group.canonical(obj)
        if rep not in counts:
            counts[rep] = 0
            order.append(rep)
        counts[rep] += 1
    return [(rep, counts[rep]) for rep in order]


def class_orbits(group: SymmetryGroup) -> list[tuple[BoundaryClass, tuple[BoundaryClass, ...]]]:
    """Boundary-class orbits as (representative, members)."""
    members: dict = {}
    for bc in boundary_classes(group.n):
        members.setdefault(group.canonical_class(bc), []).append(bc)
    return [(rep, tuple(ms)) for rep, ms in sorted(members.items(), key=lambda kv: kv[0])]


def _block_orbits(group: SymmetryGroup, k: int) -> list[tuple[tuple, int]]:
    """Orbits of set partitions into ``k`` blocks under a Young subgroup.

    Orbits correspond to multisets of per-block cell-count vectors.
    """
    sizes = [len(c) for c in group.cells]
    ncell = len(sizes)
    # all nonzero count vectors fitting inside the cells
    vectors = []

    def vecs(i, acc):
        if i == ncell:
            if any(acc):
                vectors.append(tuple(acc))
            return
        for j in range(sizes[i] + 1):
            vecs(i + 1, acc + [j])

    vecs(0, [])
    vectors.sort(reverse=True)
    result = []

    def choose(start, remaining, chosen):
        if len(chosen) == k:
            if all(r == 0 for r in remaining):
                result.append(tuple(chosen))
            return
        for idx in range(start, len(vectors)):
            v = vectors[idx]
            if all(a <= b for a, b in zip(v, remaining)):
                choose(idx, [b - a for a, b in zip(v, remaining)], chosen + [v])

    choose(0, sizes, [])
    out = []
    for sig in result:
        # orbit size: distribute labels per cell, divide by permutations of equal blocks
        size = 1
        for ci, s in enumerate(sizes):
            ways = factorial(s)
            for v in sig:
                ways //= factorial(v[ci])
            size *= ways
        for mult in Counter(sig).values():
            size //= factorial(mult)
        blocks = [[] for _ in sig]
        for ci, c in enumerate(group.cells):
            pos = 0
            for bi, v in enumerate(sig):
                blocks[bi].extend(c[pos:pos + v[ci]])
                pos += v[ci]
        out.append((tuple(frozenset(b) for b in blocks), size))
    return out


def fcurve_orbits(group: SymmetryGroup) -> list[tuple[FCurve, int]]:
    """F-curve orbit representatives and sizes without enumerating all F-curves."""
    out = [(FCurve(group.n, blocks), size) for blocks, size in _block_orbits(group, 4)]
    out.sort(key=lambda t: [sorted(b) for b in t[0].blocks])
    return out


# ---------------------------------------------------------------------------
# restrictions


@dataclass(frozen=True)
class BoundaryRestriction:
    """Blocks indexed by positions ``1..m`` of the source space ``M_{0,m}``."""

    n: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        if any(not b for b in blocks):
            raise DomainError("restriction blocks must be nonempty")
        union = frozenset().union(*blocks) if blocks else frozenset()
        if sum(len(b) for b in blocks) != self.n or union != _labels(self.n):
            raise DomainError("restriction blocks must be disjoint and cover 1..n")
        if len(blocks) < 3:
            raise DomainError("a boundary restriction needs at least 3 blocks")
        object.__setattr__(self, "blocks", blocks)

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def position_of(self) -> dict:
        return {x: i + 1 for i, b in enumerate(self.blocks) for x in b}

    def __repr__(self):
        inner = " | ".join(",".join(str(i) for i in sorted(b)) for b in self.blocks)
        return f"nu({inner})"


def restriction(n: int, blocks: Sequence[Iterable[int]]) -> BoundaryRestriction:
    return BoundaryRestriction(n, tuple(frozenset(b) for b in blocks))


def compose(outer: BoundaryRestriction, inner: BoundaryRestriction) -> BoundaryRestriction:
    """Flatten ``outer o inner``: ``inner`` maps ``M_{0,k}`` into ``M_{0,m}`` and ``outer`` into ``M_{0,n}``."""
    if inner.n != outer.m:
        raise DomainError("restrictions do not compose")
    blocks = [frozenset().union(*(outer.blocks[p - 1] for p in b)) for b in inner.blocks]
    return BoundaryRestriction(outer.n, tuple(blocks))


def fcurve_restriction(f: FCurve) -> BoundaryRestriction:
    return BoundaryRestriction(f.n, f.blocks)


def restriction_orbits(group: SymmetryGroup, m: int) -> list[tuple[BoundaryRestriction, int]]:
    """Boundary restrictions from ``M_{0,m}`` up to the group, with orbit sizes.

    Blocks are ordered by decreasing size then by least label, so singleton
    positions come last.
    """
    if not 3 <= m <= group.n:
        raise DomainError("restriction source must have 3 <= m <= n marked points")
    out = []
    for blocks, size in _block_orbits(group, m):
        blocks = tuple(sorted(blocks, key=lambda b: (-len(b), min(b))))
        out.append((BoundaryRestriction(group.n, blocks), size))
    out.sort(key=lambda t: [(-len(b), sorted(b)) for b in t[0].blocks])
    return out


@dataclass(frozen=True)
class WeightedCycle:
    n: int
    components: tuple  # of (FCurve, Fraction)

    def __post_init__(self):
        comps = tuple((f, Fraction(w)) for f, w in self.components)
        for f, w in comps:
            if f.n != self.n:
                raise DomainError("cycle component on the wrong n")
            if w <= 0:
                raise DomainError("cycle weights must be positive")
        object.__setattr__(self, "components", comps)

    @classmethod
    def uniform(cls, n: int, curves: Sequence[FCurve], weight=None) -> "WeightedCycle":
        w = Fraction(1, len(curves)) if weight is None else Fraction(weight)
        return cls(n, tuple((f, w) for f in curves))

    def __add__(self, other: "WeightedCycle") -> "WeightedCycle":
        if other.n != self.n:
            raise DomainError("cycles on different n")
        return WeightedCycle(self.n, self.components + other.components)

    def scale(self, k) -> "WeightedCycle":
        return WeightedCycle(self.n, tuple((f, w * k) for f, w in self.components))

    def __len__(self):
        return len(self.components)
