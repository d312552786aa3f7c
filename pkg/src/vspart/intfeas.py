"""Exact integer feasibility: phase-1 simplex over Fractions plus branch-and-bound.

Everything is exact.  An "infeasible" answer from the LP comes with a Farkas
vector that can be re-checked independently (see ``farkas_holds``); an
integer witness is re-checked against every row before it is returned.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .hyperplane import EQ, GE, LE, ConstraintSystem

try:  # GMP rationals are several times faster than Fraction
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))

DEFAULT_MAX_NODES = 10 ** 6


def default_max_nodes() -> int:
    return int(os.environ.get("VSPART_MAX_NODES", DEFAULT_MAX_NODES))


@dataclass
class RationalLP:
    """Rows A_eq x = b_eq and A_le x <= b_le over x >= lower, x <= upper."""

    n: int
    eq: list[tuple[list[Fraction], Fraction]] = field(default_factory=list)
    le: list[tuple[list[Fraction], Fraction]] = field(default_factory=list)
    lower: list[Fraction] | None = None
    upper: list[Fraction | None] | None = None

    def __post_init__(self):
        self.eq = [([Fraction(c) for c in a], Fraction(b)) for a, b in self.eq]
        self.le = [([Fraction(c) for c in a], Fraction(b)) for a, b in self.le]
        if self.lower is None:
            self.lower = [Fraction(0)] * self.n
        if self.upper is None:
            self.upper = [None] * self.n
        self.lower = [Fraction(v) for v in self.lower]
        self.upper = [None if v is None else Fraction(v) for v in self.upper]
        for a, _ in self.eq + self.le:
            if len(a) != self.n:
                raise ValueError("row length differs from the number of variables")
        if len(self.lower) != self.n or len(self.upper) != self.n:
            raise ValueError("bound vectors have the wrong length")

    def add_eq(self, coeffs, rhs):
        self.eq.append(([Fraction(c) for c in coeffs], Fraction(rhs)))

    def add_le(self, coeffs, rhs):
        self.le.append(([Fraction(c) for c in coeffs], Fraction(rhs)))

    def add_ge(self, coeffs, rhs):
        self.le.append(([-Fraction(c) for c in coeffs], -Fraction(rhs)))

    def with_bounds(self, lower, upper) -> "RationalLP":
        return RationalLP(self.n, self.eq, self.le, list(lower), list(upper))

    def satisfied_by(self, x: Sequence) -> bool:
        x = [Fraction(v) for v in x]
        if len(x) != self.n:
            return False
        for v, lo, hi in zip(x, self.lower, self.upper):
            if v < lo or (hi is not None and v > hi):
                return False
        if any(sum(c * v for c, v in zip(a, x)) != b for a, b in self.eq):
            return False
        return all(sum(c * v for c, v in zip(a, x)) <= b for a, b in self.le)

    def expanded_rows(self):
        """(coeffs, rhs, kind) for eq rows, le rows, and finite upper bounds."""
        rows = [(a, b, EQ) for a, b in self.eq] + [(a, b, LE) for a, b in self.le]
        for j, u in enumerate(self.upper):
            if u is not None:
                e = [Fraction(0)] * self.n
                e[j] = Fraction(1)
                rows.append((e, u, LE))
        return rows


def system_to_lp(S: ConstraintSystem) -> RationalLP:
    L = RationalLP(len(S.variables))
    for r in S.rows:
        if r.relation == EQ:
            L.add_eq(r.coeffs, r.rhs)
        elif r.relation == LE:
            L.add_le(r.coeffs, r.rhs)
        elif r.relation == GE:
            L.add_ge(r.coeffs, r.rhs)
        else:
            raise ValueError(f"unknown relation {r.relation!r}")
    if S.upper_bounds:
        L.upper = [Fraction(u) for u in S.upper_bounds]
    return L


@dataclass
class LPResult:
    feasible: bool
    point: list[Fraction] | None
    certificate: list[Fraction] | None
    pivots: int


class _Prepared:
    """Rows of an LP converted once to the fast rational type."""

    def __init__(self, L: RationalLP):
        self.n = L.n
        self.n_eq, self.n_le = len(L.eq), len(L.le)
        self.eq = [([Q(c) for c in a], Q(b)) for a, b in L.eq]
        self.le = [([Q(c) for c in a], Q(b)) for a, b in L.le]
        # equality rows with nonnegative coefficients cap each variable they touch
        self.caps = [row for row in self.eq if all(c >= 0 for c in row[0])]

    def implied_upper(self, lower) -> list:
        best: list = [None] * self.n
        for a, b in self.caps:
            slack = b - sum(c * lo for c, lo in zip(a, lower) if c)
            for j, c in enumerate(a):
                if c > 0:
                    v = slack / c + lower[j]
                    if best[j] is None or v < best[j]:
                        best[j] = v
        return best


def lp_feasible(L: RationalLP) -> LPResult:
    """Phase-1 simplex with Bland's rule on x' = x - lower >= 0."""
    P = _Prepared(L)
    res = _phase1(P, [Q(v) for v in L.lower], [None if v is None else Q(v) for v in L.upper])
    if res.feasible and not L.satisfied_by(res.point):
        raise AssertionError("simplex produced a point violating the system")
    return res


def _phase1(P: _Prepared, lower: list, upper: list) -> LPResult:
    n = P.n
    zero, one = Q(0), Q(1)
    rows: list[tuple[int, list, object, str]] = []
    for idx, (a, b) in enumerate(P.eq):
        rows.append((idx, a, b - sum(c * lo for c, lo in zip(a, lower) if c), EQ))
    for idx, (a, b) in enumerate(P.le, start=P.n_eq):
        rows.append((idx, a, b - sum(c * lo for c, lo in zip(a, lower) if c), LE))
    # upper-bound rows already implied by an equality never bind and are skipped
    implied = P.implied_upper(lower)
    idx = P.n_eq + P.n_le
    for j, u in enumerate(upper):
        if u is None:
            continue
        if implied[j] is None or implied[j] > u:
            e = [zero] * n
            e[j] = one
            rows.append((idx, e, u - lower[j], LE))
        idx += 1
    n_cert = idx
    m = len(rows)
    n_slack = sum(1 for r in rows if r[3] == LE)
    sigma = [-1 if b < 0 else 1 for _, _, b, _ in rows]
    needs_art = [kind == EQ or sg < 0 for (_, _, _, kind), sg in zip(rows, sigma)]
    n_art = sum(needs_art)
    # column layout: [x' (n) | slacks | artificials | rhs]
    width = n + n_slack + n_art
    tab, basis, art_of_row, slack_of_row = [], [], [], []
    s_col, a_col = n, n + n_slack
    for r, (_, a, b, kind) in enumerate(rows):
        sg = sigma[r]
        row = ([c if sg > 0 else -c for c in a] + [zero] * (n_slack + n_art)
               + [b if sg > 0 else -b])
        slack = None
        if kind == LE:
            row[s_col] = Q(sg)
            slack, s_col = s_col, s_col + 1
        slack_of_row.append(slack)
        if needs_art[r]:
            row[a_col] = one
            basis.append(a_col)
            art_of_row.append(a_col)
            a_col += 1
        else:
            basis.append(slack)
            art_of_row.append(None)
        tab.append(row)
    # reduced costs of the phase-1 objective (sum of artificials)
    cost = [zero] * (width + 1)
    for c in range(n + n_slack, width):
        cost[c] = one
    for r in range(m):
        if art_of_row[r] is not None:
            for j, v in enumerate(tab[r]):
                if v:
                    cost[j] -= v
    pivots = 0
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for r in range(m):
            a = tab[r][enter]
            if a > 0:
                key = (tab[r][width] / a, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:  # the phase-1 objective is bounded below by 0
            raise AssertionError("phase-1 objective unbounded")
        r = best[1]
        prow = tab[r]
        piv = prow[enter]
        if piv != 1:
            prow = [v / piv if v else v for v in prow]
            tab[r] = prow
        nz = [j for j, v in enumerate(prow) if v]
        for i in range(m):
            if i != r:
                f = tab[i][enter]
                if f:
                    ri = tab[i]
                    for j in nz:
                        ri[j] -= f * prow[j]
        f = cost[enter]
        for j in nz:
            cost[j] -= f * prow[j]
        basis[r] = enter
        pivots += 1
    if -cost[width] > 0:
        cert = [Fraction(0)] * n_cert
        for r, (idx, _, _, _) in enumerate(rows):
            y = 1 - cost[art_of_row[r]] if art_of_row[r] is not None else -cost[slack_of_row[r]]
            cert[idx] = _frac(sigma[r] * y)
        return LPResult(False, None, cert, pivots)
    x = [zero] * n
    for r in range(m):
        if basis[r] < n:
            x[basis[r]] = tab[r][width]
    return LPResult(True, [_frac(xi + lo) for xi, lo in zip(x, lower)], None, pivots)


def farkas_holds(L: RationalLP, y: Sequence[Fraction]) -> bool:
    """Check that y certifies infeasibility of L (with its lower bounds)."""
    rows = L.expanded_rows()
    if len(y) != len(rows):
        return False
    for (a, b, kind), yi in zip(rows, y):
        if kind == LE and yi > 0:
            return False
    for j in range(L.n):
        if sum(yi * a[j] for (a, _, _), yi in zip(rows, y)) > 0:
            return False
    shifted = sum(yi * (b - sum(c * lo for c, lo in zip(a, L.lower)))
                  for (a, b, _), yi in zip(rows, y))
    return shifted > 0


class Status(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass
class FeasibilityResult:
    status: Status
    witness: list[int] | None = None
    nodes: int = 0
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


BRANCHING = ("fractional", "first")


def _branch_variable(x: Sequence[Fraction], rule: str) -> int | None:
    """Most fractional variable (ties to the lowest index), or with ``first``
    the lowest-index fractional variable."""
    best, best_j = None, None
    for j, v in enumerate(x):
        f = v - math.floor(v)
        if f:
            if rule == "first":
                return j
            score = min(f, 1 - f)
            if best is None or score > best:
                best, best_j = score, j
    return best_j


def integer_point(L: RationalLP, max_nodes: int | None = None,
                  branching: str = "fractional") -> FeasibilityResult:
    """Depth-first branch-and-bound for an integer point of L.

    Both rules explore the floor branch first and give the same verdict.
    On the hyperplane polytopes ``first`` usually reaches a point in far
    fewer nodes.
    """
    if branching not in BRANCHING:
        raise ValueError(f"unknown branching rule {branching!r}")
    if any(u is None for u in L.upper):
        raise ValueError("integer_point needs an upper bound on every variable")
    if max_nodes is None:
        max_nodes = default_max_nodes()
    P = _Prepared(L)
    lower0 = [Q(math.ceil(v)) for v in L.lower]
    upper0 = [Q(math.floor(v)) for v in L.upper]
    stack = [(lower0, upper0)]
    nodes = pivots = 0
    while stack:
        if nodes >= max_nodes:
            return FeasibilityResult(Status.UNKNOWN, None, nodes, pivots)
        lo, hi = stack.pop()
        nodes += 1
        if any(a > b for a, b in zip(lo, hi)):
            continue
        res = _phase1(P, lo, hi)
        pivots += res.pivots
        if not res.feasible:
            continue
        j = _branch_variable(res.point, branching)
        if j is None:
            witness = [int(v) for v in res.point]
            if not L.satisfied_by(witness):
                raise AssertionError("integer witness failed re-verification")
            return FeasibilityResult(Status.FEASIBLE, witness, nodes, pivots)
        v = res.point[j]
        up_lo = list(lo)
        up_lo[j] = Q(math.ceil(v))
        down_hi = list(hi)
        down_hi[j] = Q(math.floor(v))
        stack.append((up_lo, hi))
        stack.append((lo, down_hi))
    return FeasibilityResult(Status.INFEASIBLE, None, nodes, pivots)


def solve_system(S: ConstraintSystem, max_nodes: int | None = None,
                 branching: str = "fractional") -> FeasibilityResult:
    return integer_point(system_to_lp(S), max_nodes, branching)
