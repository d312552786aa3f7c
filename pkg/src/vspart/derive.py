"""Derived types from hyperplane sections and the recursive feasibility check.

A hyperplane H of type b cuts a partition of type m into a partition of H
whose type m(b) is determined by m and b.  A type is *feasible* when it
passes the necessary conditions, its polytope has an integer point, and some
integer point uses only hyperplane types whose derived types are feasible
one dimension down ("green" points).  Feasible means "not excluded"; it does
not certify that a partition exists.
"""
from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field

from . import bounds as bd
from .hyperplane import build_polytope, is_in_B
from .intfeas import Status, default_max_nodes, solve_system
from .partition import (PartitionType, check_dimension, check_first_packing,
                        check_tail, packing_sum, size_bounds)


class NotInB(ValueError):
    pass


def derived_type(T: PartitionType, b) -> PartitionType:
    """m(b)_i = b_i + m_{i+1} - b_{i+1}, a type of V(n-1, q)."""
    b = tuple(b) + (0,) * (T.k - len(b))
    if not is_in_B(T, b[:T.k]):
        raise NotInB(f"{b} is not a hyperplane type of {T}")
    n = T.n
    ext_m = list(T.m) + [0] * (n + 1 - T.k)
    ext_b = list(b) + [0] * (n + 1 - len(b))
    child = [ext_b[i] + ext_m[i + 1] - ext_b[i + 1] for i in range(n - 1)]
    C = PartitionType(n - 1, T.q, tuple(child))
    if not check_first_packing(C):
        raise AssertionError(f"derived type {C} violates the packing condition")
    return C


def split_derivations(T: PartitionType) -> set[PartitionType]:
    """Types reached by splitting one d-space into a d'-space and points."""
    q = T.q
    out = set()
    for d in T.dims:
        if d < 2:
            continue
        for d2 in range(1, d):
            m = list(T.m)
            m[d - 1] -= 1
            m[d2 - 1] += 1
            m[0] += (q ** d - q ** d2) // (q - 1)
            out.add(PartitionType(T.n, q, tuple(m)))
    return out


class Reason(str, enum.Enum):
    PACKING = "packing"
    DIMENSION = "dimension"
    TAIL = "tail"
    SIZE = "size"
    BOUNDS = "bounds"
    POLYTOPE_EMPTY = "polytope-empty"
    NO_GREEN_POINT = "no-green-point"
    SPLIT = "split"
    BUDGET = "budget"
    BASE_CASE = "base case"
    GREEN_POINT = "green point"


@dataclass(frozen=True)
class FeasibilityVerdict:
    type: PartitionType
    status: Status
    reason: Reason
    depth: int = 0
    detail: str = ""
    witness: tuple = field(default=(), compare=False)

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE

    @property
    def infeasible(self) -> bool:
        return self.status is Status.INFEASIBLE

    def summary(self) -> str:
        head = {Status.FEASIBLE: "FEASIBLE", Status.INFEASIBLE: "INFEASIBLE",
                Status.UNKNOWN: "UNKNOWN"}[self.status]
        return f"{head} ({self.detail or self.reason.value})"

    def to_json(self) -> dict:
        return {
            "type": list(self.type.descending()),
            "n": self.type.n,
            "q": self.type.q,
            "verdict": self.status.value,
            "reason": self.reason.value,
            "depth": self.depth,
            "detail": self.detail,
        }


def _base_case(T: PartitionType) -> bool:
    # V(1,q) has only (1); V(2,q) has (1,0) and (0,q+1)
    return check_first_packing(T)


class FeasibilityChecker:
    """Memoized recursive feasibility over one option set; safe to share between threads."""

    def __init__(self, *, use_bounds: bool = True, lemma_depth: int = 2,
                 max_nodes: int | None = None, max_depth: int | None = None,
                 use_splits: bool = False, branching: str = "first"):
        self.use_bounds = use_bounds
        self.lemma_depth = lemma_depth
        self.max_nodes = default_max_nodes() if max_nodes is None else max_nodes
        self.max_depth = max_depth
        self.use_splits = use_splits
        self.branching = branching
        self._memo: dict[PartitionType, FeasibilityVerdict] = {}
        self._lock = threading.Lock()

    def cached(self, T: PartitionType) -> FeasibilityVerdict | None:
        with self._lock:
            return self._memo.get(T)

    def _store(self, v: FeasibilityVerdict) -> FeasibilityVerdict:
        with self._lock:
            return self._memo.setdefault(v.type, v)

    def __call__(self, T: PartitionType) -> FeasibilityVerdict:
        return self.check(T, 0)

    def check(self, T: PartitionType, level: int = 0) -> FeasibilityVerdict:
        v = self.cached(T)
        if v is not None:
            return v
        v = self._direct(T)
        if v is None:
            if self.max_depth is not None and level >= self.max_depth:
                # a depth cutoff is not a property of T, so it is not memoized
                return FeasibilityVerdict(T, Status.UNKNOWN, Reason.BUDGET, 0,
                                          f"recursion cut off at depth {self.max_depth}")
            v = self._recurse(T, level)
            if v.status is Status.UNKNOWN and self.max_depth is not None:
                return v
        return self._store(v)

    # checks that need no recursion
    def _direct(self, T: PartitionType) -> FeasibilityVerdict | None:
        def no(reason, detail):
            return FeasibilityVerdict(T, Status.INFEASIBLE, reason, 0, detail)

        if not check_first_packing(T):
            return no(Reason.PACKING,
                      f"packing: sum m_d(q^d-1) = {packing_sum(T)} != {T.q ** T.n - 1}")
        if not check_dimension(T):
            return no(Reason.DIMENSION, "dimension condition")
        if T.n <= 2:
            return FeasibilityVerdict(T, Status.FEASIBLE, Reason.BASE_CASE, 0, "base case")
        tail = check_tail(T)
        if tail.failed:
            return no(Reason.TAIL, f"tail {tail.witness}")
        size = size_bounds(T)
        if size.failed:
            return no(Reason.SIZE, f"size {size.witness}")
        if self.use_bounds and T.n % 2 == 0:
            for rep in self._bound_reports(T):
                if rep.violated:
                    return no(Reason.BOUNDS, f"theorem {rep.name}: a ≥ {rep.min_a} > {rep.actual}")
        return None

    @staticmethod
    def _bound_reports(T: PartitionType):
        t = T.n // 2
        for d in range(1, t):
            yield bd.thm_lowbound_a(T, d)
        yield bd.thm4_bound(T)

    def _recurse(self, T: PartitionType, level: int) -> FeasibilityVerdict:
        S = build_polytope(T, self.lemma_depth)
        res = solve_system(S, self.max_nodes, self.branching)
        if res.status is Status.UNKNOWN:
            return FeasibilityVerdict(T, Status.UNKNOWN, Reason.BUDGET, 0,
                                      f"node budget {self.max_nodes} exhausted on the polytope")
        if res.status is Status.INFEASIBLE:
            return FeasibilityVerdict(T, Status.INFEASIBLE, Reason.POLYTOPE_EMPTY, 0,
                                      "integer hull of the polytope is empty")
        if self.use_splits:
            for C in sorted(split_derivations(T), key=lambda c: c.m):
                cv = self.check(C, level + 1)
                if cv.infeasible:
                    return FeasibilityVerdict(T, Status.INFEASIBLE, Reason.SPLIT, cv.depth + 1,
                                              f"split type {C} is infeasible")
        good, unsure, bad_depth, child_depth = [], [], 0, 0
        for i, b in enumerate(S.variables):
            cv = self.check(derived_type(T, b), level + 1)
            child_depth = max(child_depth, cv.depth)
            if cv.feasible:
                good.append(i)
            elif cv.status is Status.UNKNOWN:
                unsure.append(i)
            else:
                bad_depth = max(bad_depth, cv.depth)
        if len(good) == len(S.variables):
            return FeasibilityVerdict(T, Status.FEASIBLE, Reason.GREEN_POINT, child_depth + 1,
                                      "green point found", tuple(res.witness))
        if good:
            green = solve_system(S.restrict(good), self.max_nodes, self.branching)
            if green.status is Status.FEASIBLE:
                return FeasibilityVerdict(T, Status.FEASIBLE, Reason.GREEN_POINT,
                                          child_depth + 1, "green point found",
                                          tuple(_scatter(good, green.witness, len(S.variables))))
        else:
            green = None
        if unsure:
            loose = solve_system(S.restrict(sorted(good + unsure)), self.max_nodes, self.branching)
            if loose.status is not Status.INFEASIBLE:
                return FeasibilityVerdict(T, Status.UNKNOWN, Reason.BUDGET, child_depth + 1,
                                          "some derived types are undecided")
        elif green is not None and green.status is Status.UNKNOWN:
            return FeasibilityVerdict(T, Status.UNKNOWN, Reason.BUDGET, child_depth + 1,
                                      f"node budget {self.max_nodes} exhausted on the green system")
        return FeasibilityVerdict(T, Status.INFEASIBLE, Reason.NO_GREEN_POINT, bad_depth + 1,
                                  "no integer point uses only feasible derived types")


def _scatter(keep, values, n):
    x = [0] * n
    for i, v in zip(keep, values):
        x[i] = v
    return x


_default_checker: FeasibilityChecker | None = None


def feasible(n: int, q: int, m, **options) -> FeasibilityVerdict:
    """Feasibility of the type with ascending counts ``m`` in V(n, q).

    Calls without options share one memo for the whole process.
    """
    global _default_checker
    T = m if isinstance(m, PartitionType) else PartitionType(n, q, tuple(m))
    if options:
        return FeasibilityChecker(**options)(T)
    if _default_checker is None:
        _default_checker = FeasibilityChecker()
    return _default_checker(T)


# --- classification ------------------------------------------------------------

EXCEPTIONS_Q2 = {
    (6, (7, 3, 5)), (7, (1, 13, 7, 0)), (7, (1, 13, 6, 3)), (7, (1, 14, 3, 5)), (7, (17, 1, 5)),
}


def enumerate_types(n: int, q: int) -> list[PartitionType]:
    """All types of V(n,q) passing the packing and dimension conditions, by descending tuple."""
    target = q ** n - 1
    out = []
    m = [0] * n

    def rec(d: int, rest: int):
        if d == 0:
            if rest == 0:
                T = PartitionType(n, q, tuple(m))
                if check_dimension(T):
                    out.append(T)
            return
        w = q ** d - 1
        for x in range(rest // w, -1, -1):
            if d == 1 and x * w != rest:
                continue
            m[d - 1] = x
            rec(d - 1, rest - x * w)
        m[d - 1] = 0

    rec(n, target)
    return sorted(out, key=lambda T: T.descending(), reverse=True)


def expected_realizable(T: PartitionType) -> bool | None:
    """Known realizability for q = 2 and n <= 7; None outside that range."""
    if T.q != 2 or T.n > 7:
        return None
    if not (check_first_packing(T) and check_dimension(T)) or check_tail(T).failed:
        return False
    return (T.n, T.descending()) not in EXCEPTIONS_Q2


@dataclass(frozen=True)
class ClassifyRow:
    verdict: FeasibilityVerdict
    expected: bool | None

    @property
    def agrees(self) -> bool | None:
        if self.expected is None or self.verdict.status is Status.UNKNOWN:
            return None
        # feasibility is only necessary: realizable must be feasible
        if self.expected:
            return self.verdict.feasible
        return True

    def to_json(self) -> dict:
        d = self.verdict.to_json()
        d["expected_realizable"] = self.expected
        d["consistent"] = self.agrees
        return d


def classify(n: int, q: int, checker: FeasibilityChecker | None = None):
    """Yield a ClassifyRow for every packing- and dimension-valid type of V(n, q)."""
    checker = checker or FeasibilityChecker()
    for T in enumerate_types(n, q):
        yield ClassifyRow(checker(T), expected_realizable(T))
