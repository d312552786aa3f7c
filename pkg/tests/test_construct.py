import itertools

import pytest

from vspart.construct import (ConstructionError, ConstructionIParams, bu_spread,
                              construction_I, construction_I_type, construction_II,
                              construction_II_type, gf_span, parallel_class_reps, refine,
                              refine_smallest, same_spread_member, spread_members)
from vspart.gfq import intersect, make_tower, point_codes, rref
from vspart.partition import (check_dimension, check_first_packing, check_tail,
                              size_bounds, verify_partition)


def counts(P):
    t = P.type()
    return {d: t.count(d) for d in t.dims}


@pytest.mark.parametrize("k,t,q,size", [(2, 4, 2, 17), (2, 1, 3, 4), (2, 3, 2, 9),
                                        (3, 2, 2, 21), (2, 2, 4, 17)])
def test_bu_spread(k, t, q, size):
    P = bu_spread(k, t, q)
    ok, T = verify_partition(P)
    assert ok and T.m[-1] == size and T.dims == [t]


def test_spread_coset_criterion():
    T = make_tower(2, 6, 3)
    member_of = {}
    for i, (beta, U) in enumerate(spread_members(T)):
        for c in point_codes(U):
            if c:
                member_of[int(c)] = i
    for b1, b2 in itertools.product(range(1, 64, 5), range(1, 64, 3)):
        assert same_spread_member(T, b1, b2) == (member_of[b1] == member_of[b2])


def test_bu_spread_rejects_k1():
    with pytest.raises(ConstructionError):
        bu_spread(1, 4, 2)


def test_construction_I_golden():
    P = construction_I(ConstructionIParams(2, 4, 2, 2, 3))
    ok, T = verify_partition(P)
    assert ok and str(T) == "(14,3,8,0)" and T.size == 25


def test_construction_I_full_subfield_is_the_spread():
    P = construction_I(ConstructionIParams(2, 3, 2, 2, 3))
    assert sorted(U.basis for U in P.members) == sorted(U.basis for U in bu_spread(2, 3, 2).members)


def test_construction_I_small():
    P = construction_I(ConstructionIParams(2, 2, 2, 2, 0))
    ok, T = verify_partition(P)
    assert ok and T.m == (0, 5)
    assert counts(P) == construction_I_type(2, 2, 2, 2, 0)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("k,t", [(2, 2), (2, 3), (3, 2)])
def test_construction_I_grid(q, k, t):
    for l in range(1, k + 1):
        for w in range(t + 1):
            P = construction_I(ConstructionIParams(k, t, q, l, w))
            ok, T = verify_partition(P)
            assert ok and counts(P) == construction_I_type(k, t, q, l, w), (l, w)


def test_parallel_classes_are_disjoint():
    T = make_tower(3, 6, 3)
    p = ConstructionIParams(2, 3, 3, 2, 1)
    construction_I(p)
    reps = parallel_class_reps(T, p.A, T.subfield(1))
    assert len(reps) == (3 ** 2 - 1) // 2
    for a, b in itertools.combinations(reps, 2):
        assert intersect(T.times_subfield(a), T.times_subfield(b)).dim == 0


def test_construction_I_validation():
    with pytest.raises(ConstructionError):
        ConstructionIParams(2, 3, 2, 3, 1)
    with pytest.raises(ConstructionError):
        ConstructionIParams(2, 3, 2, 1, 4)
    T = make_tower(2, 6, 3)
    with pytest.raises(ConstructionError):
        construction_I(ConstructionIParams(2, 3, 2, 2, 1, A=[1, 1]))
    outside = rref(T.field, [T.to_vector(c) for c in range(2, 64)
                             if c not in set(T.subfield_codes.tolist())][:1], 6)
    with pytest.raises(ConstructionError):
        construction_I(ConstructionIParams(2, 3, 2, 1, 1, W=outside))
    assert gf_span(T, [1]).dim == 3


@pytest.mark.parametrize("q,text", [(2, "(12,8,0,19)"), (3, "(72,18,0,166)")])
def test_construction_II(q, text):
    st = construction_II(q)
    ok, T = verify_partition(st.partition)
    assert ok and str(T) == text
    assert counts(st.partition) == construction_II_type(q)
    size = q * q + 1
    tower = st.tower
    assert st.L[0] == tower.subfield_space
    assert st.Q[0][0] == tower.span(tower.subfield(2))
    for j in range(1, size):
        assert intersect(st.S1, st.Q[0][j]).dim == 1
    for i, j in itertools.product(range(1, size), repeat=2):
        assert intersect(st.S_prime[i], st.S_perp[j]).dim == 0
    for i in range(1, size):
        assert intersect(st.S_prime[i], st.S[i]) == st.Q[i][0]


def test_construction_II_q4_type_counts():
    # GF(4^8) is beyond the table budget; the counts still obey the packing identity
    for q in (2, 3, 4, 5, 7):
        c = construction_II_type(q)
        assert sum(m * (q ** d - 1) for d, m in c.items()) == q ** 8 - 1


def test_refine():
    P = bu_spread(2, 4, 2)
    Q = refine(P, 0, 3)
    ok, T = verify_partition(Q)
    assert ok and str(T) == "(16,1,0,8)"
    assert refine(P, 0, 4).members == P.members
    with pytest.raises(ConstructionError):
        refine(P, 0, 5)
    with pytest.raises(IndexError):
        refine(P, 17, 1)


def test_refine_construction_II_chain():
    P = construction_II(2).partition
    P1 = refine_smallest(P, 1)
    P2 = refine_smallest(P1, 1)
    assert str(verify_partition(P1)[1]) == "(12,7,0,26)"
    assert str(verify_partition(P2)[1]) == "(12,6,0,33)"
    assert str(verify_partition(refine_smallest(P, 2, dim=4))[1]) == "(11,8,1,31)"


ALL_OUTPUTS = [
    lambda: bu_spread(2, 4, 2),
    lambda: bu_spread(3, 2, 2),
    lambda: construction_I(ConstructionIParams(2, 4, 2, 2, 3)),
    lambda: construction_I(ConstructionIParams(2, 3, 3, 1, 2)),
    lambda: construction_II(2).partition,
    lambda: refine_smallest(construction_II(2).partition, 1),
    lambda: construction_II(3).partition,
]


@pytest.mark.parametrize("make", ALL_OUTPUTS)
def test_outputs_pass_necessary_conditions(make):
    T = make().type()
    assert check_first_packing(T) and check_dimension(T)
    assert not check_tail(T).failed and not size_bounds(T).failed
