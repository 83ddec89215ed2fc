"""Exact rational linear algebra, linear programming and cone enumeration.

Everything here works over :class:`fractions.Fraction` (or plain ``int``)
and never rounds.  The linear programming routine is a two-phase tableau
simplex with Bland's rule and returns certificates that
:func:`verify_outcome` can re-check without trusting the solver.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

__all__ = [
    "Rational",
    "as_rational",
    "format_rational",
    "parse_rational",
    "RatMatrix",
    "ShapeError",
    "rref",
    "rank",
    "solve",
    "nullspace",
    "LPProblem",
    "LPOutcome",
    "lp",
    "verify_outcome",
    "fm_bounds",
    "extreme_rays",
    "polytope_vertices",
    "primitive",
]

Rational = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


class ShapeError(ValueError):
    """Raised when matrix or LP dimensions do not agree."""


def as_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; pass a Fraction or a 'p/q' string")
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"`` (``"p"`` when the denominator is one)."""
    q = as_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not text or any(c in text for c in ".eE"):
        raise ValueError(f"not a rational 'p/q' string: {text!r}")
    return Fraction(text)


class RatMatrix:
    """Immutable dense matrix of rationals."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable], cols: Optional[int] = None):
        rows = tuple(tuple(as_rational(x) for x in row) for row in data)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise ShapeError(f"row of length {len(row)} in a matrix with {cols} columns")
        self.rows = len(rows)
        self.cols = cols
        self._data = rows

    @classmethod
    def identity(cls, k: int) -> "RatMatrix":
        return cls([[ONE if i == j else ZERO for j in range(k)] for i in range(k)], cols=k)

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return self._data[i][j]
        return self._data[idx]

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return self.rows

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.cols == other.cols and self._data == other._data

    def __hash__(self):
        return hash((self.cols, self._data))

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in row) for row in self._data)
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._data]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(zip(*self._data), cols=self.rows) if self.rows else RatMatrix([], cols=0)

    def matvec(self, vec: Sequence) -> list[Fraction]:
        if len(vec) != self.cols:
            raise ShapeError("vector length does not match column count")
        return [sum((a * b for a, b in zip(row, vec) if a), ZERO) for row in self._data]


def _sparse_rows(matrix) -> tuple[list[dict[int, Fraction]], int]:
    if isinstance(matrix, RatMatrix):
        cols = matrix.cols
        rows = [{j: x for j, x in enumerate(r) if x} for r in matrix]
    else:
        rows_in = [list(r) for r in matrix]
        cols = len(rows_in[0]) if rows_in else 0
        rows = []
        for r in rows_in:
            if len(r) != cols:
                raise ShapeError("ragged matrix")
            rows.append({j: as_rational(x) for j, x in enumerate(r) if x})
    return rows, cols


def _eliminate(rows: list[dict[int, Fraction]], cols: int, column_order: Optional[Sequence[int]] = None):
    """Gauss-Jordan on sparse dict rows, in place.  Returns pivot (row, col) pairs."""
    order = list(column_order) if column_order is not None else range(cols)
    pivots: list[tuple[int, int]] = []
    next_row = 0
    for c in order:
        pr = None
        best = None
        for r in range(next_row, len(rows)):
            if c in rows[r]:
                size = len(rows[r])
                if best is None or size < best:
                    pr, best = r, size
        if pr is None:
            continue
        rows[next_row], rows[pr] = rows[pr], rows[next_row]
        prow = rows[next_row]
        inv = 1 / prow[c]
        if inv != 1:
            for k in prow:
                prow[k] *= inv
        for r in range(len(rows)):
            if r == next_row:
                continue
            row = rows[r]
            f = row.get(c)
            if not f:
                continue
            for k, v in prow.items():
                nv = row.get(k, ZERO) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        pivots.append((next_row, c))
        next_row += 1
    return pivots


def rref(matrix, column_order: Optional[Sequence[int]] = None):
    """Reduced row-echelon form.

    Returns ``(rank, reduced, basis_columns)`` where ``basis_columns`` are the
    pivot columns in ascending order.  ``column_order`` changes the order in
    which columns are tried as pivots (the result is then the reduced form
    with respect to that column priority); the default is left to right.
    """
    rows, cols = _sparse_rows(matrix)
    pivots = _eliminate(rows, cols, column_order)
    if column_order is None:
        dense = [[row.get(j, ZERO) for j in range(cols)] for row in rows]
    else:
        # keep pivot rows first, in pivot order
        dense = [[row.get(j, ZERO) for j in range(cols)] for row in rows]
    reduced = RatMatrix(dense, cols=cols)
    return len(pivots), reduced, sorted(c for _, c in pivots)


def rank(matrix) -> int:
    return rref(matrix)[0]


def solve(matrix, rhs: Sequence) -> Optional[list[Fraction]]:
    """One exact solution of ``matrix @ x = rhs`` (free variables set to 0), or None."""
    rows, cols = _sparse_rows(matrix)
    if len(rhs) != len(rows):
        raise ShapeError("right-hand side length does not match row count")
    aug = cols
    for row, b in zip(rows, rhs):
        b = as_rational(b)
        if b:
            row[aug] = b
    pivots = _eliminate(rows, cols + 1, range(cols))
    pivot_rows = {r for r, _ in pivots}
    for r, row in enumerate(rows):
        if r not in pivot_rows and row.get(aug):
            return None
    x = [ZERO] * cols
    for r, c in pivots:
        x[c] = rows[r].get(aug, ZERO)
    return x


def nullspace(matrix) -> list[list[Fraction]]:
    """Basis of the right kernel."""
    rows, cols = _sparse_rows(matrix)
    pivots = _eliminate(rows, cols)
    pivot_cols = {c: r for r, c in pivots}
    basis = []
    for free in range(cols):
        if free in pivot_cols:
            continue
        v = [ZERO] * cols
        v[free] = ONE
        for c, r in pivot_cols.items():
            v[c] = -rows[r].get(free, ZERO)
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# linear programming


@dataclass(frozen=True)
class LPProblem:
    """``equalities``: rows with ``row . x == rhs``; ``inequalities``: ``row . x >= rhs``.

    Variables are free unless listed in ``nonnegative``.
    """

    num_vars: int
    equalities: tuple = ()
    inequalities: tuple = ()
    objective: Optional[tuple] = None
    sense: str = "feasibility"
    nonnegative: frozenset = frozenset()

    def __post_init__(self):
        if self.sense not in ("maximize", "minimize", "feasibility"):
            raise ValueError(f"unknown sense {self.sense!r}")
        eqs = tuple((tuple(as_rational(a) for a in row), as_rational(b)) for row, b in self.equalities)
        ins = tuple((tuple(as_rational(a) for a in row), as_rational(b)) for row, b in self.inequalities)
        for row, _ in eqs + ins:
            if len(row) != self.num_vars:
                raise ShapeError(f"constraint row of length {len(row)} for {self.num_vars} variables")
        obj = None
        if self.objective is not None:
            obj = tuple(as_rational(a) for a in self.objective)
            if len(obj) != self.num_vars:
                raise ShapeError("objective length does not match variable count")
        elif self.sense != "feasibility":
            raise ShapeError("an objective is required unless sense='feasibility'")
        nonneg = frozenset(self.nonnegative)
        if any(not 0 <= k < self.num_vars for k in nonneg):
            raise ShapeError("nonnegative index out of range")
        object.__setattr__(self, "equalities", eqs)
        object.__setattr__(self, "inequalities", ins)
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "nonnegative", nonneg)


@dataclass(frozen=True)
class LPOutcome:
    """Result of :func:`lp`.

    ``certificate`` holds multipliers ``{"eq": [...], "ineq": [...], "bound": {k: mu}}``.
    For ``optimal`` they satisfy ``s*c = sum eq*A_eq + sum ineq*A_in + sum bound*e_k``
    and ``s*value = sum eq*b_eq + sum ineq*b_in`` with ``s = +1`` for minimization and
    ``-1`` for maximization.  For ``infeasible`` the same combination of rows vanishes
    while the right-hand side combination is strictly positive.
    """

    status: str
    value: Optional[Fraction] = None
    witness: Optional[tuple] = None
    ray: Optional[tuple] = None
    certificate: Optional[dict] = None
    pivots: int = 0


class _Tableau:
    """Dense simplex tableau for ``min c.y, A y = b, y >= 0`` with ``b >= 0``."""

    def __init__(self, A: list[list[Fraction]], b: list[Fraction]):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        # artificial columns n .. n+m-1 start as the basis
        self.T = [list(A[i]) + [ONE if k == i else ZERO for k in range(self.m)] + [b[i]] for i in range(self.m)]
        self.basis = [self.n + i for i in range(self.m)]
        self.pivots = 0

    def pivot(self, r: int, c: int):
        row = self.T[r]
        p = row[c]
        if p != 1:
            inv = 1 / p
            self.T[r] = row = [x * inv if x else x for x in row]
        nz = [k for k, x in enumerate(row) if x]
        for i in range(self.m):
            if i == r:
                continue
            other = self.T[i]
            f = other[c]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
        self.basis[r] = c
        self.pivots += 1

    def reduced_costs(self, cost: list[Fraction], allowed: int) -> list[Fraction]:
        cb = [cost[j] for j in self.basis]
        out = []
        for j in range(allowed):
            s = cost[j]
            for i in range(self.m):
                if cb[i]:
                    a = self.T[i][j]
                    if a:
                        s -= cb[i] * a
            out.append(s)
        return out

    def run(self, cost: list[Fraction], allowed: int):
        """Bland's rule on columns ``< allowed``.  Returns None or an unbounded column."""
        while True:
            d = self.reduced_costs(cost, allowed)
            enter = next((j for j in range(allowed) if d[j] < 0), None)
            if enter is None:
                return None
            best = None
            for i in range(self.m):
                a = self.T[i][enter]
                if a > 0:
                    ratio = self.T[i][-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return enter
            self.pivot(best[1], enter)

    def duals(self, cost: list[Fraction]) -> list[Fraction]:
        # y = c_B B^{-1}; B^{-1} sits in the artificial columns
        cb = [cost[j] for j in self.basis]
        return [sum((cb[i] * self.T[i][self.n + k] for i in range(self.m) if cb[i]), ZERO) for k in range(self.m)]

    def solution(self) -> list[Fraction]:
        y = [ZERO] * (self.n + self.m)
        for i, j in enumerate(self.basis):
            y[j] = self.T[i][-1]
        return y


def lp(problem: LPProblem) -> LPOutcome:
    """Solve exactly.  ``status`` is ``optimal``, ``infeasible`` or ``unbounded``.

    A feasibility problem reports ``optimal`` with value 0 when a point exists.
    """
    nv = problem.num_vars
    # column layout: per variable one (nonneg) or two (free: u - v) columns, then slacks
    colmap: list[tuple[int, int]] = []  # column -> (var, sign)
    for k in range(nv):
        colmap.append((k, 1))
        if k not in problem.nonnegative:
            colmap.append((k, -1))
    rows_src = [(row, rhs, "eq", i) for i, (row, rhs) in enumerate(problem.equalities)]
    rows_src += [(row, rhs, "ineq", i) for i, (row, rhs) in enumerate(problem.inequalities)]
    nslack = len(problem.inequalities)
    ncols = len(colmap) + nslack
    A: list[list[Fraction]] = []
    b: list[Fraction] = []
    signs: list[int] = []
    slack_at = len(colmap)
    for row, rhs, kind, idx in rows_src:
        line = [row[k] * s for k, s in colmap] + [ZERO] * nslack
        if kind == "ineq":
            line[slack_at + idx] = -ONE
        sgn = -1 if rhs < 0 else 1
        if sgn < 0:
            line = [-x for x in line]
        A.append(line)
        b.append(rhs * sgn)
        signs.append(sgn)
    m = len(A)
    if m == 0:
        # no constraints: only the objective matters
        if problem.sense == "feasibility" or all(
            (c == 0) or (k in problem.nonnegative and (c < 0) == (problem.sense == "maximize"))
            for k, c in enumerate(problem.objective)
        ):
            zero = tuple([ZERO] * nv)
            cert = {"eq": [], "ineq": [], "bound": {}}
            if problem.objective is not None:
                s = 1 if problem.sense == "minimize" else -1
                cert["bound"] = {k: s * c for k, c in enumerate(problem.objective) if c}
            return LPOutcome("optimal", ZERO, zero, None, cert)
        k = next(k for k, c in enumerate(problem.objective) if c)
        d = [ZERO] * nv
        up = problem.objective[k] > 0
        d[k] = ONE if up == (problem.sense == "maximize") else -ONE
        return LPOutcome("unbounded", None, tuple([ZERO] * nv), tuple(d), None)

    tab = _Tableau(A, b)
    phase1 = [ZERO] * ncols + [ONE] * m
    tab.run(phase1, ncols)
    w = sum((tab.T[i][-1] for i in range(m) if tab.basis[i] >= ncols), ZERO)
    if w > 0:
        y = tab.duals(phase1)
        lam = [y[i] * signs[i] for i in range(m)]
        cert = _split_cert(problem, lam, colmap, for_infeasible=True)
        return LPOutcome("infeasible", None, None, None, cert, tab.pivots)
    # drive zero-level artificials out where possible
    for i in range(m):
        if tab.basis[i] >= ncols:
            j = next((j for j in range(ncols) if tab.T[i][j]), None)
            if j is not None:
                tab.pivot(i, j)

    if problem.sense == "feasibility":
        cost = [ZERO] * (ncols + m)
    else:
        s = 1 if problem.sense == "minimize" else -1
        cost = [ZERO] * (ncols + m)
        for col, (k, sg) in enumerate(colmap):
            cost[col] = s * sg * problem.objective[k]
    unb = tab.run(cost, ncols)
    ystd = tab.solution()
    x = _to_x(ystd, colmap, nv)
    if unb is not None:
        dstd = [ZERO] * (ncols + m)
        dstd[unb] = ONE
        for i, j in enumerate(tab.basis):
            dstd[j] = -tab.T[i][unb]
        ray = _to_x(dstd, colmap, nv)
        return LPOutcome("unbounded", None, tuple(x), tuple(ray), None, tab.pivots)
    y = tab.duals(cost)
    lam = [y[i] * signs[i] for i in range(m)]
    cert = _split_cert(problem, lam, colmap, for_infeasible=False)
    value = ZERO
    if problem.objective is not None:
        value = sum((c * xi for c, xi in zip(problem.objective, x)), ZERO)
    return LPOutcome("optimal", value, tuple(x), None, cert, tab.pivots)


def _to_x(ystd, colmap, nv):
    x = [ZERO] * nv
    for col, (k, s) in enumerate(colmap):
        if ystd[col]:
            x[k] += s * ystd[col]
    return x


def _split_cert(problem: LPProblem, lam, colmap, for_infeasible: bool) -> dict:
    neq = len(problem.equalities)
    eq = lam[:neq]
    ineq = lam[neq:]
    # bound multipliers make the row combination exact on nonnegative variables
    combo = [ZERO] * problem.num_vars
    for mult, (row, _) in zip(eq + ineq, problem.equalities + problem.inequalities):
        if mult:
            for k, a in enumerate(row):
                if a:
                    combo[k] += mult * a
    target = [ZERO] * problem.num_vars
    if not for_infeasible and problem.objective is not None:
        s = 1 if problem.sense == "minimize" else -1
        target = [s * c for c in problem.objective]
    bound = {k: target[k] - combo[k] for k in sorted(problem.nonnegative) if target[k] != combo[k]}
    return {"eq": eq, "ineq": ineq, "bound": bound}


def verify_outcome(problem: LPProblem, outcome: LPOutcome) -> bool:
    """Independent exact check of an :class:`LPOutcome`.  Raises AssertionError on failure."""
    nv = problem.num_vars

    def dot(u, v):
        return sum((a * b for a, b in zip(u, v) if a and b), ZERO)

    def feasible(x):
        for row, rhs in problem.equalities:
            assert dot(row, x) == rhs, "equality violated"
        for row, rhs in problem.inequalities:
            assert dot(row, x) >= rhs, "inequality violated"
        for k in problem.nonnegative:
            assert x[k] >= 0, "sign constraint violated"

    if outcome.status in ("optimal", "infeasible"):
        cert = outcome.certificate
        assert cert is not None
        eq, ineq, bound = cert["eq"], cert["ineq"], cert["bound"]
        assert len(eq) == len(problem.equalities) and len(ineq) == len(problem.inequalities)
        assert all(v >= 0 for v in ineq), "negative inequality multiplier"
        assert all(v >= 0 for v in bound.values()), "negative bound multiplier"
        assert all(k in problem.nonnegative for k in bound), "bound multiplier on a free variable"
        combo = [ZERO] * nv
        rhs = ZERO
        for mult, (row, b) in zip(list(eq) + list(ineq), problem.equalities + problem.inequalities):
            if mult:
                for k, a in enumerate(row):
                    combo[k] += mult * a
                rhs += mult * b
        for k, mu in bound.items():
            combo[k] += mu
        if outcome.status == "infeasible":
            assert all(c == 0 for c in combo), "Farkas combination does not vanish"
            assert rhs > 0, "Farkas right-hand side is not positive"
        else:
            feasible(outcome.witness)
            if problem.objective is None:
                assert all(c == 0 for c in combo)
            else:
                s = 1 if problem.sense == "minimize" else -1
                assert combo == [s * c for c in problem.objective], "dual does not reproduce objective"
                assert s * outcome.value == rhs, "dual bound differs from value"
                assert dot(problem.objective, outcome.witness) == outcome.value
    elif outcome.status == "unbounded":
        feasible(outcome.witness)
        d = outcome.ray
        for row, _ in problem.equalities:
            assert dot(row, d) == 0
        for row, _ in problem.inequalities:
            assert dot(row, d) >= 0
        for k in problem.nonnegative:
            assert d[k] >= 0
        gain = dot(problem.objective, d)
        assert (gain > 0) if problem.sense == "maximize" else (gain < 0)
    else:
        raise AssertionError(f"unknown status {outcome.status}")
    return True


# ---------------------------------------------------------------------------
# Fourier-Motzkin


def _normalize_ineq(row: tuple, rhs: Fraction):
    scale = max((abs(a) for a in row), default=ZERO)
    if scale == 0:
        return row, rhs
    return tuple(a / scale for a in row), rhs / scale


def fm_bounds(inequalities: Sequence, keep: int, equalities: Sequence = ()):
    """Project ``{x : A x >= b, E x = e}`` onto coordinate ``keep`` by Fourier-Motzkin.

    Returns ``(lower, upper)`` with ``None`` for an infinite side, or ``None``
    when the system is infeasible.  Intended for a handful of variables.
    Equalities are substituted away first; dominated rows are pruned after
    every elimination step.
    """
    ineqs = [([as_rational(a) for a in r], as_rational(b)) for r, b in inequalities]
    eqs = [([as_rational(a) for a in r], as_rational(b)) for r, b in equalities]
    nv = len(ineqs[0][0]) if ineqs else len(eqs[0][0])
    eliminated = {keep}
    pinned = None
    # substitute equalities, never pivoting on the kept coordinate when avoidable
    while eqs:
        row, rhs = eqs.pop()
        var = next((k for k in range(nv) if row[k] and k != keep), None)
        if var is None:
            var = keep if row[keep] else None
        if var is None:
            if rhs != 0:
                return None
            continue
        piv = row[var]

        def sub(r, b):
            f = r[var] / piv
            if not f:
                return r, b
            return [x - f * y for x, y in zip(r, row)], b - f * rhs

        eqs = [sub(r, b) for r, b in eqs]
        ineqs = [sub(r, b) for r, b in ineqs]
        if var == keep:
            # the kept coordinate is pinned to a single value
            pinned = rhs / piv
        eliminated.add(var)
    if pinned is not None:
        return None if _fm_core(ineqs, nv, set(), None) is None else (pinned, pinned)
    return _fm_core(ineqs, nv, set(), keep)


def _fm_core(ineqs, nv, skip, keep):
    current = _prune({_normalize_ineq(tuple(r), b) for r, b in ineqs})
    if current is None:
        return None
    remaining = [v for v in range(nv) if v != keep and v not in skip]
    while remaining:
        # eliminate the variable producing the fewest new rows
        def cost(v):
            p = sum(1 for r, _ in current if r[v] > 0)
            q = sum(1 for r, _ in current if r[v] < 0)
            return p * q - p - q

        var = min(remaining, key=cost)
        remaining.remove(var)
        pos, neg, nxt = [], [], set()
        for r, b in current:
            if r[var] > 0:
                pos.append((r, b))
            elif r[var] < 0:
                neg.append((r, b))
            else:
                nxt.add((r, b))
        for rp, bp in pos:
            for rn, bn in neg:
                fp, fn = rp[var], -rn[var]
                row = tuple(fn * a + fp * c for a, c in zip(rp, rn))
                nxt.add(_normalize_ineq(row, fn * bp + fp * bn))
        current = _prune(nxt)
        if current is None:
            return None
    if keep is None:
        return (None, None)
    lower = upper = None
    for r, b in current:
        a = r[keep]
        v = b / a if a else None
        if a > 0:
            lower = v if lower is None or v > lower else lower
        elif a < 0:
            upper = v if upper is None or v < upper else upper
    if lower is not None and upper is not None and lower > upper:
        return None
    return lower, upper


def _prune(rows):
    """Drop trivial rows and rows dominated by one with the same left side; None if contradictory."""
    best: dict = {}
    for r, b in rows:
        if not any(r):
            if b > 0:
                return None
            continue
        if r not in best or b > best[r]:
            best[r] = b
    return set(best.items())


# ---------------------------------------------------------------------------
# double description


def primitive(vec: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to the primitive integer vector with the same direction."""
    vals = [as_rational(v) for v in vec]
    den = 1
    for v in vals:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in vals]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _int_rows(inequalities) -> list[tuple[int, ...]]:
    out = []
    for row in inequalities:
        p = primitive(row)
        if any(p):
            out.append(p)
    return out


def extreme_rays(inequalities: Sequence[Sequence], dim: Optional[int] = None) -> list[tuple[int, ...]]:
    """Minimal generators of the cone ``{x : row . x >= 0 for every row}``.

    Double description with combinatorial adjacency.  Rays come back as
    primitive integer vectors, sorted.  When the cone has a lineality space
    each basis vector ``l`` of it contributes both ``l`` and ``-l``.
    """
    rows_in = [list(r) for r in inequalities]
    if dim is None:
        if not rows_in:
            raise ShapeError("dimension needed when there are no inequalities")
        dim = len(rows_in[0])
    for r in rows_in:
        if len(r) != dim:
            raise ShapeError("inequality of wrong length")
    rows = _int_rows(rows_in)
    lineality: list[list[int]] = [[1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    rays: list[list[int]] = []
    zsets: list[int] = []  # bitmask of processed rows tight at each ray

    def dotp(a, v):
        return sum(x * y for x, y in zip(a, v) if x and y)

    def prim(v):
        g = 0
        for x in v:
            g = gcd(g, x)
        return [x // g for x in v] if g > 1 else list(v)

    for idx, a in enumerate(rows):
        bit = 1 << idx
        # a lineality direction not orthogonal to a becomes a ray
        li = next((k for k, l in enumerate(lineality) if dotp(a, l) != 0), None)
        if li is not None:
            l = lineality.pop(li)
            al = dotp(a, l)
            if al < 0:
                l = [-x for x in l]
                al = -al
            new_lin = []
            for v in lineality:
                av = dotp(a, v)
                new_lin.append(prim([al * x - av * y for x, y in zip(v, l)]) if av else v)
            lineality = new_lin
            new_rays = []
            for v, z in zip(rays, zsets):
                av = dotp(a, v)
                if av:
                    v = prim([al * x - av * y for x, y in zip(v, l)])
                new_rays.append((v, z | bit))
            # the new ray is tight on every earlier row (they vanish on lineality)
            new_rays.append((prim(l), bit - 1))
            rays = [v for v, _ in new_rays]
            zsets = [z for _, z in new_rays]
            continue
        vals = [dotp(a, v) for v in rays]
        pos = [i for i, s in enumerate(vals) if s > 0]
        neg = [i for i, s in enumerate(vals) if s < 0]
        zer = [i for i, s in enumerate(vals) if s == 0]
        if not neg:
            zsets = [z | bit if vals[i] == 0 else z for i, z in enumerate(zsets)]
            continue
        # column index: for each processed row, bitmask of rays tight on it
        nr = len(rays)
        tight_on = [0] * idx
        for ri in range(nr):
            z = zsets[ri]
            while z:
                low = z & -z
                tight_on[low.bit_length() - 1] |= 1 << ri
                z ^= low
        need = dim - len(lineality) - 2
        created = []
        for i in pos:
            zi = zsets[i]
            for j in neg:
                common = zi & zsets[j]
                if common.bit_count() < need:
                    continue
                mask = (1 << nr) - 1
                c = common
                while c and mask:
                    low = c & -c
                    mask &= tight_on[low.bit_length() - 1]
                    c ^= low
                if mask.bit_count() > 2 or (common == 0 and nr > 2):
                    continue
                vi, vj = rays[i], rays[j]
                si, sj = vals[i], -vals[j]
                v = prim([sj * x + si * y for x, y in zip(vi, vj)])
                created.append((v, common | bit))
        keep = [(rays[i], zsets[i]) for i in pos] + [(rays[i], zsets[i] | bit) for i in zer]
        keep += created
        rays = [v for v, _ in keep]
        zsets = [z for _, z in keep]

    out = {tuple(v) for v in rays}
    for l in lineality:
        out.add(tuple(prim(l)))
        out.add(tuple(-x for x in prim(l)))
    return sorted(out)


def polytope_vertices(inequalities: Sequence[Sequence], rhs: Sequence):
    """Vertices and recession rays of ``{x : A x >= b}`` via the homogenized cone.

    Returns ``(vertices, rays)``; vertices are tuples of Fractions.
    """
    homog = [[-as_rational(b)] + [as_rational(a) for a in row] for row, b in zip(inequalities, rhs)]
    dim = len(homog[0])
    homog.append([ONE] + [ZERO] * (dim - 1))
    gens = extreme_rays(homog, dim)
    verts, recs = [], []
    for g in gens:
        if g[0] > 0:
            verts.append(tuple(Fraction(x, g[0]) for x in g[1:]))
        else:
            recs.append(g[1:])
    return sorted(verts), sorted(recs)
