"""One test per acceptance criterion, each at its stated tolerance and time limit.

Every test records a single PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section of the pytest summary.
"""
import time
from fractions import Fraction

import pytest

from test_construct import ALL_OUTPUTS
from test_derive import test_derived_types_pass_packing as _derived_packing_property
from test_gfq import SMALL_Q, test_field_axioms_exhaustive as _field_axioms
from test_intfeas import test_integer_point_agrees_with_enumeration as _intfeas_property

from vspart.bounds import R, deficiency_bounds, thm4_bound, thm_lowbound_a
from vspart.construct import (ConstructionIParams, construction_I, construction_I_type,
                              construction_II)
from vspart.derive import FeasibilityChecker, Reason
from vspart.hyperplane import EQ, build_polytope, h, hyperplane_census, num_hyperplanes
from vspart.intfeas import Status, integer_point, lp_feasible, solve_system, system_to_lp
from vspart.partition import (PartitionType, check_dimension, check_first_packing, check_tail,
                              size_bounds, verify_partition)


def counts(P):
    t = P.type()
    return {d: t.count(d) for d in t.dims}


def test_criterion_1_excludes_13_6_0_18(criterion):
    start = time.perf_counter()
    T = PartitionType.parse(8, 2, "13,6,0,18")
    rep = thm_lowbound_a(T, 3)
    by_bound = FeasibilityChecker()(T)
    by_polytope = FeasibilityChecker(use_bounds=False)(T)
    elapsed = time.perf_counter() - start
    ok = (R(2, 4, 3, 6) == Fraction(5, 3) and rep.min_a == 5 and rep.actual == 4
          and by_bound.infeasible and by_bound.reason is Reason.BOUNDS
          and by_polytope.infeasible and by_polytope.reason is Reason.POLYTOPE_EMPTY
          and elapsed < 10)
    criterion("1 (13,6,0,18) excluded", ok,
              f"{by_bound.summary()}; bounds off: {by_polytope.summary()}; {elapsed:.2f}s")


def test_criterion_2_excludes_13_5_0_25(criterion):
    start = time.perf_counter()
    T = PartitionType.parse(8, 2, "13,5,0,25")
    rep = thm_lowbound_a(T, 3)
    res = solve_system(build_polytope(T))
    elapsed = time.perf_counter() - start
    bound_ok = rep.min_a == 4 and not rep.violated
    ok = bound_ok and res.status is Status.INFEASIBLE and elapsed < 30
    detail = f"bounds give a >= {rep.min_a} (non-excluding: {bound_ok}); integer hull {res.status.value}"
    if res.witness is not None:
        detail += f", witness {res.witness}"
    criterion("2 (13,5,0,25) excluded", ok, f"{detail}; {elapsed:.2f}s")


def test_criterion_3_construction_II(criterion):
    start = time.perf_counter()
    seen = []
    ok = True
    for q, text in [(2, "(12,8,0,19)"), (3, "(72,18,0,166)")]:
        P = construction_II(q).partition
        valid, T = verify_partition(P)
        ok &= valid and str(T) == text and q ** 8 - 1 == (255 if q == 2 else 6560)
        seen.append(f"q={q} {T} verified={valid}")
    elapsed = time.perf_counter() - start
    criterion("3 Construction II", ok and elapsed < 60, f"{'; '.join(seen)}; {elapsed:.2f}s")


def test_criterion_4_construction_I_grid(criterion):
    start = time.perf_counter()
    cases, bad = 0, []
    for q in (2, 3):
        for k, t in [(2, 2), (2, 3), (2, 4)]:
            for l in range(1, k + 1):
                for w in range(t + 1):
                    P = construction_I(ConstructionIParams(k, t, q, l, w))
                    valid, _ = verify_partition(P)
                    cases += 1
                    if not (valid and counts(P) == construction_I_type(k, t, q, l, w)):
                        bad.append((q, k, t, l, w))
    elapsed = time.perf_counter() - start
    criterion("4 Construction I grid", not bad and elapsed < 300,
              f"{cases} cases, mismatches {bad}; {elapsed:.1f}s")


def test_criterion_5_exceptions(criterion):
    start = time.perf_counter()
    checker = FeasibilityChecker(use_bounds=False)
    got = {}
    for n, text in [(6, "7,3,5"), (7, "17,1,5"), (7, "1,14,3,5"), (7, "1,13,7,0"), (7, "1,13,6,3")]:
        got[text] = checker(PartitionType.parse(n, 2, text))
    hull_empty = all(got[t].infeasible and got[t].reason is Reason.POLYTOPE_EMPTY
                     and got[t].depth == 0 for t in ("7,3,5", "17,1,5", "1,14,3,5"))
    deep = got["1,13,7,0"]
    ok = (hull_empty and deep.infeasible and deep.reason is not Reason.POLYTOPE_EMPTY
          and deep.depth >= 1 and got["1,13,6,3"].feasible)
    elapsed = time.perf_counter() - start
    detail = "; ".join(f"({t}) {v.status.value}/{v.reason.value}/depth {v.depth}" for t, v in got.items())
    criterion("5 q=2 exceptions", ok and elapsed < 600, f"{detail}; {elapsed:.1f}s")


def test_criterion_6_bound_golden_values(criterion):
    thm4 = [thm4_bound(PartitionType(8, 2, (255 - 15 * 13 - 7 * m3, 0, m3, 13))).min_a
            for m3 in (6, 7, 8)]
    five = thm_lowbound_a(PartitionType.parse(8, 2, "13,5,0,25"), 3)
    vals = {"R(2,4,3,6)": R(2, 4, 3, 6), "thm4 m3=6,7,8": thm4,
            "a from R(2,4,3,5)": five.min_a, "deficiency(9)": deficiency_bounds(9).min_a}
    ok = (vals["R(2,4,3,6)"] == Fraction(5, 3) and thm4 == [5, 5, 5]
          and R(2, 4, 3, 5) == 1 and five.min_a == 4 and vals["deficiency(9)"] == 4)
    criterion("6 bound golden values", ok, ", ".join(f"{k} = {v}" for k, v in vals.items()))


def test_criterion_7_census_oracle(criterion):
    start = time.perf_counter()
    P = construction_II(2).partition
    T = P.type()
    census = hyperplane_census(P)
    S = build_polytope(T)
    x = S.vector(census)
    total_ok = sum(census.values()) == num_hyperplanes(8, 2) == 255
    # every member of dimension d lies in h(d) hyperplanes; count that from the census too
    incidence_ok = all(sum(s * b[d - 1] for b, s in census.items()) == T.count(d) * h(d, 8, 2)
                       for d in T.dims)
    rows_ok = all(r.relation == EQ and r.holds(x) for r in S.rows)
    L = system_to_lp(S)
    witness = integer_point(L.with_bounds(x, x)).witness
    ok = (total_ok and incidence_ok and rows_ok and witness == x and lp_feasible(L).feasible)
    elapsed = time.perf_counter() - start
    criterion("7 hyperplane census oracle", ok and elapsed < 60,
              f"{len(census)} hyperplane types over {sum(census.values())} hyperplanes, "
              f"{len(S.rows)} equalities hold, witness accepted={witness == x}; {elapsed:.2f}s")


def test_criterion_8_property_suites(criterion):
    parts = {}

    def run(name, fn):
        try:
            fn()
            parts[name] = True
        except AssertionError:
            parts[name] = False

    def outputs():
        for make in ALL_OUTPUTS:
            T = make().type()
            assert check_first_packing(T) and check_dimension(T)
            assert not check_tail(T).failed and not size_bounds(T).failed

    def fields():
        for q in SMALL_Q:
            _field_axioms(q)

    run("a construct outputs pass conditions", outputs)
    run("b intfeas vs enumeration (200 systems)", _intfeas_property)
    run("c derived types pass packing (50 types)", _derived_packing_property)
    run("d field axioms q <= 16", fields)
    criterion("8 property suites", all(parts.values()),
              ", ".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in parts.items()))


@pytest.mark.parametrize("q", [2, 3])
def test_construction_II_is_a_polytope_point(q):
    # the solver accepts the realized census for q = 3 as well
    P = construction_II(q).partition
    S = build_polytope(P.type())
    assert S.satisfied_by(S.vector(hyperplane_census(P)))
