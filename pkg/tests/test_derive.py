import itertools
from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from vspart.construct import ConstructionIParams, bu_spread, construction_I, refine
from vspart.derive import (EXCEPTIONS_Q2, FeasibilityChecker, NotInB, Reason, classify,
                           derived_type, enumerate_types, expected_realizable, feasible,
                           split_derivations)
from vspart.gfq import enumerate_vectors, get_field, point_codes, rref
from vspart.hyperplane import enumerate_B, hyperplane_census, hyperplane_subspace
from vspart.intfeas import Status
from vspart.partition import (PartitionType, check_dimension, check_first_packing,
                              induce_on_subspace)


def T(n, q, text):
    return PartitionType.parse(n, q, text)


class TestDerivedType:
    def test_golden(self):
        assert derived_type(T(8, 2, "13,6,0,18"), (2, 0, 2, 1)) == T(7, 2, "1,14,4,2")
        spread = T(8, 2, "17,0,0,0")
        assert derived_type(spread, (0, 0, 0, 1)) == T(7, 2, "1,16,0,0")

    def test_rejects_types_outside_B(self):
        with pytest.raises(NotInB):
            derived_type(T(8, 2, "13,6,0,18"), (1, 0, 2, 1))

    @pytest.mark.parametrize("make", [
        lambda: bu_spread(2, 2, 2),
        lambda: bu_spread(2, 2, 3),
        lambda: refine(bu_spread(2, 3, 2), 0, 1),
        lambda: construction_I(ConstructionIParams(2, 3, 2, 2, 1)),
    ])
    def test_matches_induced_sections(self, make):
        P = make()
        T0 = P.type()
        _, per = hyperplane_census(P, with_types=True)
        for f, b in per:
            H = hyperplane_subspace(P.field, f)
            assert induce_on_subspace(P, H).type() == derived_type(T0, b)


def test_split_derivations():
    assert T(8, 2, "12,7,0,26") in split_derivations(T(8, 2, "12,8,0,19"))
    assert split_derivations(T(4, 2, "15")) == set()
    for C in split_derivations(T(7, 2, "1,13,6,3")):
        assert check_first_packing(C)


class TestVerdicts:
    def test_bounds_exclude_7_3_5(self):
        v = feasible(6, 2, (5, 3, 7))
        assert v.infeasible and v.reason is Reason.BOUNDS
        v = feasible(6, 2, (5, 3, 7), use_bounds=False)
        assert v.infeasible and v.reason is Reason.POLYTOPE_EMPTY and v.depth == 0

    @pytest.mark.parametrize("text", ["17,1,5", "1,14,3,5"])
    def test_polytope_empty(self, text):
        v = FeasibilityChecker()(T(7, 2, text))
        assert v.infeasible and v.reason is Reason.POLYTOPE_EMPTY and v.depth == 0

    def test_no_green_point(self):
        v = FeasibilityChecker()(T(7, 2, "1,13,7,0"))
        assert v.infeasible and v.reason is Reason.NO_GREEN_POINT and v.depth == 1

    def test_survivor_is_feasible_but_not_realizable(self):
        t = T(7, 2, "1,13,6,3")
        v = FeasibilityChecker()(t)
        assert v.feasible and v.depth >= 2
        assert expected_realizable(t) is False

    def test_lowbound_exclusion(self):
        v = FeasibilityChecker()(T(8, 2, "13,6,0,18"))
        assert v.infeasible and v.reason is Reason.BOUNDS
        assert v.summary() == "INFEASIBLE (theorem lowbound-a: a ≥ 5 > 4)"
        v = FeasibilityChecker(use_bounds=False)(T(8, 2, "13,6,0,18"))
        assert v.infeasible and v.reason is Reason.POLYTOPE_EMPTY

    def test_base_and_early_cases(self):
        assert feasible(2, 2, (0, 1)).reason is Reason.BASE_CASE
        assert feasible(2, 5, (6, 0)).feasible
        assert feasible(3, 2, (3, 1)).reason is Reason.PACKING
        assert feasible(4, 2, (1, 0, 0, 1)).reason is Reason.PACKING
        assert feasible(4, 2, (0, 1, 3)).reason in (Reason.PACKING, Reason.DIMENSION)

    def test_json(self):
        d = feasible(6, 2, (5, 3, 7)).to_json()
        assert d["type"] == [7, 3, 5] and d["verdict"] == "infeasible" and d["reason"] == "bounds"

    def test_budget_is_unknown_not_infeasible(self):
        full, starved = FeasibilityChecker(), FeasibilityChecker(max_nodes=1)
        statuses = set()
        for t in enumerate_types(5, 2):
            v = starved(t)
            statuses.add(v.status)
            assert v.status in (full(t).status, Status.UNKNOWN)
        assert Status.UNKNOWN in statuses
        cut = FeasibilityChecker(max_depth=0)
        v = cut(T(5, 2, "1,0,24"))
        assert v.status is Status.UNKNOWN and v.reason is Reason.BUDGET
        assert cut.cached(T(5, 2, "1,0,24")) is None


def test_exceptions_are_the_known_five():
    assert {(n, t) for n, t in EXCEPTIONS_Q2} == {
        (6, (7, 3, 5)), (7, (1, 13, 7, 0)), (7, (1, 13, 6, 3)), (7, (1, 14, 3, 5)),
        (7, (17, 1, 5))}
    checker = FeasibilityChecker(use_bounds=False)
    verdicts = {t: checker(PartitionType(n, 2, tuple(reversed(t)))) for n, t in EXCEPTIONS_Q2}
    assert [t for t, v in verdicts.items() if v.feasible] == [(1, 13, 6, 3)]


def test_classify_small():
    rows = list(classify(2, 2))
    assert {r.verdict.type.m for r in rows} == {(0, 1), (3,)}
    for n in range(3, 7):
        for r in classify(n, 2):
            assert r.agrees, r.verdict.summary()
            assert r.verdict.feasible == r.expected


def test_enumerate_types_are_valid():
    types = enumerate_types(5, 3)
    assert len(types) == len(set(types))
    assert all(check_first_packing(t) and check_dimension(t) for t in types)


# --- realizable types by exhaustive search --------------------------------------

def _realizable_types(n, q):
    """Types of all vector space partitions of V(n,q), by exact cover over points."""
    F = get_field(q)
    vecs = enumerate_vectors(rref(F, [tuple(int(i == j) for j in range(n)) for i in range(n)], n))
    subspaces = {}
    for d in range(1, n + 1):
        for rows in itertools.combinations(vecs.tolist()[1:], d):
            U = rref(F, rows, n)
            if U.dim == d:
                mask = 0
                for c in point_codes(U):
                    if c:
                        mask |= 1 << int(c)
                subspaces[mask] = d
    full = sum(1 << c for c in range(1, q ** n))
    by_low = {}
    for mask, d in subspaces.items():
        low = (mask & -mask).bit_length() - 1
        by_low.setdefault(low, []).append((mask, d))

    @lru_cache(maxsize=None)
    def cover(covered):
        if covered == full:
            return frozenset([(0,) * n])
        rest = full & ~covered
        low = (rest & -rest).bit_length() - 1
        out = set()
        for mask, d in by_low[low]:
            if mask & covered == 0:
                for m in cover(covered | mask):
                    out.add(tuple(x + (i == d - 1) for i, x in enumerate(m)))
        return frozenset(out)

    return {PartitionType(n, q, m) for m in cover(0)}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_realizable_types_are_feasible(n):
    real = _realizable_types(n, 2)
    checker = FeasibilityChecker()
    for t in enumerate_types(n, 2):
        assert (t in real) == expected_realizable(t)
        if t in real:
            assert checker(t).feasible


def test_construction_types_are_feasible():
    checker = FeasibilityChecker()
    for P in [bu_spread(2, 3, 2), construction_I(ConstructionIParams(2, 3, 2, 1, 2)),
              refine(bu_spread(2, 2, 3), 0, 1)]:
        assert checker(P.type()).feasible


def test_memo_is_order_independent():
    types = enumerate_types(6, 2)
    a, b = FeasibilityChecker(), FeasibilityChecker()
    va = {t: a(t) for t in types}
    vb = {t: b(t) for t in reversed(types)}
    for t in types:
        assert (va[t].status, va[t].reason) == (vb[t].status, vb[t].reason)


@st.composite
def packing_types(draw):
    q = draw(st.sampled_from([2, 3]))
    n = draw(st.integers(3, 8 if q == 2 else 6))
    rest = q ** n - 1
    m = [0] * n
    for d in range(n - 1, 1, -1):
        w = q ** d - 1
        m[d - 1] = draw(st.integers(0, min(rest // w, 20)))
        rest -= m[d - 1] * w
    m[0] = rest // (q - 1)
    return PartitionType(n, q, tuple(m))


@settings(max_examples=50, derandomize=True, deadline=None)
@given(packing_types(), st.data())
def test_derived_types_pass_packing(t, data):
    assert check_first_packing(t)
    B = enumerate_B(t)
    assert B
    for b in data.draw(st.lists(st.sampled_from(B), min_size=1, max_size=5)):
        c = derived_type(t, b)
        assert c.n == t.n - 1 and check_first_packing(c)


@pytest.mark.slow
def test_classify_n7_matches_known_realizability():
    rows = list(classify(7, 2))
    assert len(rows) == 782
    assert all(r.agrees for r in rows)
    survivors = [r.verdict.type.descending() for r in rows if r.verdict.feasible and not r.expected]
    assert survivors == [(1, 13, 6, 3)]
    deep = {r.verdict.type.descending(): (r.verdict.reason, r.verdict.depth) for r in rows
            if r.verdict.infeasible and r.verdict.reason not in (Reason.TAIL, Reason.SIZE)}
    assert deep == {(17, 1, 5): (Reason.POLYTOPE_EMPTY, 0), (1, 14, 3, 5): (Reason.POLYTOPE_EMPTY, 0),
                    (1, 13, 7, 0): (Reason.NO_GREEN_POINT, 1)}
