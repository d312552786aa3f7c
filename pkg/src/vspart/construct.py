"""Explicit partitions built inside GF(q^(kt)) viewed as V(kt, q)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gfq import (Subspace, TowerMap, contains, intersect, is_subspace_of,
                  make_tower, point_codes, rref, subspace_sum)
from .partition import ExplicitPartition


class ConstructionError(ValueError):
    pass


def _points(T: TowerMap, U: Subspace) -> np.ndarray:
    codes = point_codes(U)
    return codes[codes != 0]


def spread_members(T: TowerMap) -> list[tuple[int, Subspace]]:
    """(beta, beta*GF(q^t)) for one beta per coset, by increasing beta."""
    covered = np.zeros(T.size, dtype=bool)
    out = []
    for beta in range(1, T.size):
        if covered[beta]:
            continue
        U = T.times_subfield(beta)
        covered[_points(T, U)] = True
        out.append((beta, U))
    return out


def bu_spread(k: int, t: int, q: int) -> ExplicitPartition:
    """The t-spread {beta GF(q^t)} of V(kt, q)."""
    if k < 2 or t < 1:
        raise ConstructionError("need k >= 2 and t >= 1")
    T = make_tower(q, k * t, t)
    return ExplicitPartition(T.field, k * t, [U for _, U in spread_members(T)])


def same_spread_member(T: TowerMap, beta: int, beta2: int) -> bool:
    """beta GF(q^t) == beta2 GF(q^t) iff beta2/beta lies in the subfield."""
    ratio = int(T.mul(beta2, T.inv(beta)))
    return ratio in set(T.subfield_codes.tolist())


# --- Construction I --------------------------------------------------------

@dataclass
class ConstructionIParams:
    k: int
    t: int
    q: int
    l: int
    dim_w: int
    A: list[int] = field(default_factory=list)
    W: Subspace | None = None

    def __post_init__(self):
        if self.k < 2 or not 1 <= self.l <= self.k:
            raise ConstructionError(f"need k >= 2 and 1 <= l <= k (k={self.k}, l={self.l})")
        if not 0 <= self.dim_w <= self.t:
            raise ConstructionError(f"dim W must lie in 0..t={self.t}")


def gf_span(T: TowerMap, elems, sub: Subspace | None = None) -> Subspace:
    """GF(q^s)-span of ``elems`` as a subspace over GF(q); ``sub`` is the subfield space."""
    sub = T.subfield_space if sub is None else sub
    spaces = [T.scale(a, sub) for a in elems]
    out = rref(T.field, [], T.n)
    for U in spaces:
        out = subspace_sum(out, U)
    return out


def choose_independent(T: TowerMap, l: int, sub: Subspace | None = None) -> list[int]:
    """alpha_1 = 1, then the smallest codes extending independence over the subfield."""
    A = [1]
    span = gf_span(T, A, sub)
    for code in range(2, T.size):
        if len(A) == l:
            break
        if not contains(span, T.to_vector(code)):
            A.append(code)
            span = gf_span(T, A, sub)
    if len(A) < l:
        raise ConstructionError(f"cannot find {l} independent elements")
    return A


def parallel_class_reps(T: TowerMap, A: list[int], scalars: np.ndarray) -> list[int]:
    """sum c_i alpha_i over coefficient vectors whose first nonzero entry is 1.

    One element per class modulo ``scalars``; for A = {1, alpha} the order is
    1, then 1 + c alpha, then alpha.
    """
    import itertools
    reps = []
    values = [int(c) for c in scalars]
    for lead in range(len(A)):
        for tail in itertools.product(values, repeat=len(A) - lead - 1):
            v = A[lead]
            for c, a in zip(tail, A[lead + 1:]):
                v = T.add(v, int(T.mul(c, a)))
            reps.append(v)
    return reps


def _points_of_subfield_space(T: TowerMap, U: Subspace) -> list[int]:
    """Representatives (smallest code) of the 1-dimensional subspaces of U."""
    F = T.field
    covered: set[int] = set()
    reps = []
    for c in sorted(_points(T, U).tolist()):
        if c in covered:
            continue
        reps.append(c)
        v = np.array(T.to_vector(c))
        for s in range(1, F.q):
            covered.add(T.from_vector(F.mul_table[s, v]))
    return reps


def construction_I(params: ConstructionIParams) -> ExplicitPartition:
    """Replace the spread members alpha GF(q^t), alpha in span(A), by the
    spaces alpha W and the l-dimensional spaces span{alpha_i u}."""
    k, t, q, l = params.k, params.t, params.q, params.l
    T = make_tower(q, k * t, t)
    A = params.A or choose_independent(T, l)
    if len(A) != l or A[0] == 0:
        raise ConstructionError("A must hold l nonzero elements")
    if gf_span(T, A).dim != l * t:
        raise ConstructionError("A is not independent over GF(q^t)")
    sub = T.subfield_space
    W = params.W
    if W is None:
        W = rref(T.field, sub.basis[:params.dim_w], T.n)
    if not is_subspace_of(W, sub):
        raise ConstructionError("W is not inside the subfield GF(q^t)")
    params.A, params.W = A, W
    base = T.subfield(1)
    reps = parallel_class_reps(T, A, base)
    replaced = {T.times_subfield(a) for a in reps}
    members = [U for _, U in spread_members(T) if U not in replaced]
    if W.dim:
        members.extend(T.scale(a, W) for a in reps)
    # the 1-dimensional spaces of GF(q^t) outside W, each lifted to span{alpha_i u}
    w_points = set(_points(T, W).tolist())
    for u in _points_of_subfield_space(T, sub):
        if u in w_points:
            continue
        members.append(T.span(T.mul(np.array(A), u)))
    return ExplicitPartition(T.field, T.n, members)


def construction_I_type(k: int, t: int, q: int, l: int, dim_w: int) -> dict[int, int]:
    """Member counts by dimension predicted for Construction I."""
    counts: dict[int, int] = {}

    def add(d, c):
        if d and c:
            counts[d] = counts.get(d, 0) + c
    classes = (q ** l - 1) // (q - 1)
    add(t, (q ** (k * t) - 1) // (q ** t - 1) - classes)
    add(dim_w, classes)
    add(l, (q ** t - q ** dim_w) // (q - 1))
    return counts


# --- Construction II -------------------------------------------------------

@dataclass
class ConstructionIIState:
    q: int
    tower: TowerMap
    alpha2: int
    L: list[Subspace]
    L_perp: list[Subspace]
    Q: list[list[Subspace]]  # Q[i][j] = L_i ∩ L_j^perp
    S1: Subspace
    S1_perp: Subspace
    gamma: list[int]
    alpha_prime: list[int]
    S: list[Subspace]
    S_perp: list[Subspace]
    S_prime: list[Subspace]
    partition: ExplicitPartition | None = None


def _sort_key(U: Subspace):
    return U.basis


def superspaces_by_one(T: TowerMap, Q: Subspace, L: Subspace) -> list[Subspace]:
    """All subspaces of L containing Q with one more dimension, in canonical order."""
    found = set()
    for c in sorted(_points(T, L).tolist()):
        v = T.to_vector(c)
        if contains(Q, v):
            continue
        found.add(rref(T.field, Q.basis + (v,), T.n))
    return sorted(found, key=_sort_key)


def _generator(T: TowerMap, U: Subspace) -> int:
    if U.dim != 1:
        raise ConstructionError(f"expected a 1-dimensional intersection, got dim {U.dim}")
    return T.from_vector(U.basis[0])


def construction_II(q: int) -> ConstructionIIState:
    """Partition of V(8, q) into q^4-q^2 solids, 2q^2 planes and q^5-q^4+q+1 points."""
    T = make_tower(q, 8, 4)
    F = T.field
    gf4 = T.subfield_space
    gf2_codes = T.subfield(2)
    gf2 = T.span(gf2_codes)
    # switching over GF(q^2): A = {1, alpha2} independent over GF(q^4)
    alpha2 = choose_independent(T, 2)[1]
    A = [1, alpha2]
    reps = parallel_class_reps(T, A, gf2_codes)
    L = [T.times_subfield(a) for a in reps]
    # 1-dim GF(q^2)-subspaces u GF(q^2) of GF(q^4), u = 1 first
    us: list[int] = []
    covered: set[int] = set()
    for c in [1] + sorted(_points(T, gf4).tolist()):
        if c in covered:
            continue
        us.append(c)
        covered.update(int(x) for x in T.mul(c, gf2_codes[gf2_codes != 0]))
    L_perp = [subspace_sum(T.scale(u, gf2), T.scale(int(T.mul(alpha2, u)), gf2)) for u in us]
    size = q * q + 1
    if len(L) != size or len(L_perp) != size:
        raise ConstructionError("switching step produced the wrong number of spaces")
    Q = [[intersect(Li, Lj) for Lj in L_perp] for Li in L]
    if any(Qij.dim != 2 for row in Q for Qij in row):
        raise ConstructionError("Q_{i,j} is not 2-dimensional")
    if L[0] != gf4 or Q[0][0] != gf2:
        raise ConstructionError("normalisation L_1 = GF(q^4), Q_11 = GF(q^2) failed")

    S1 = superspaces_by_one(T, Q[0][0], L[0])[0]
    gamma = [1] + [_generator(T, intersect(S1, Q[0][j])) for j in range(1, size)]
    S1_perp = superspaces_by_one(T, Q[0][0], L_perp[0])[0]
    alpha_p = [1] + [_generator(T, intersect(S1_perp, Q[i][0])) for i in range(1, size)]
    for i in range(size):
        for j in range(size):
            g = int(T.mul(gamma[j], alpha_p[i]))
            if T.scale(g, gf2) != Q[i][j]:
                raise ConstructionError(f"Q_{i + 1},{j + 1} != gamma_j alpha'_i GF(q^2)")
    S_perp = [T.scale(g, S1_perp) for g in gamma]
    S = [T.scale(a, S1) for a in alpha_p]
    for j in range(size):
        if not is_subspace_of(S_perp[j], L_perp[j]) or not is_subspace_of(S[j], L[j]):
            raise ConstructionError("scaled S spaces left their L spaces")
    S_prime = [S1]
    for i in range(1, size):
        S_prime.append(next(U for U in superspaces_by_one(T, Q[i][0], L[i]) if U != S[i]))
        if intersect(S_prime[i], S[i]) != Q[i][0]:
            raise ConstructionError("S'_i ∩ S_i != Q_i1")

    replaced = set(L)
    members = [U for _, U in spread_members(T) if U not in replaced]
    members += S_prime[1:] + S_perp[1:]
    occupied = np.zeros(T.size, dtype=bool)
    for U in members:
        occupied[_points(T, U)] = True
    union = np.zeros(T.size, dtype=bool)
    for Li in L:
        union[_points(T, Li)] = True
    for c in np.nonzero(union & ~occupied)[0].tolist():
        if occupied[c]:
            continue
        v = np.array(T.to_vector(c))
        P = rref(F, [v], T.n)
        members.append(P)
        occupied[_points(T, P)] = True
    state = ConstructionIIState(q, T, alpha2, L, L_perp, Q, S1, S1_perp, gamma, alpha_p,
                                S, S_perp, S_prime)
    state.partition = ExplicitPartition(F, 8, members)
    return state


def construction_II_type(q: int) -> dict[int, int]:
    return {4: q ** 4 - q ** 2, 3: 2 * q ** 2, 1: q ** 5 - q ** 4 + q + 1}


# --- refinement --------------------------------------------------------------

def refine(P: ExplicitPartition, index: int, d_new: int) -> ExplicitPartition:
    """Split member ``index`` into one d_new-dimensional subspace plus points."""
    if not 0 <= index < len(P.members):
        raise IndexError(f"no member {index}")
    U = P.members[index]
    if not 1 <= d_new <= U.dim:
        raise ConstructionError(f"cannot refine a {U.dim}-space to dimension {d_new}")
    if d_new == U.dim:
        return ExplicitPartition(P.field, P.n, list(P.members))
    F = P.field
    D = rref(F, U.basis[:d_new], P.n)
    covered = np.zeros(F.q ** P.n, dtype=bool)
    covered[point_codes(D)] = True
    new = [D]
    from .gfq import decode
    for c in sorted(point_codes(U).tolist()):
        if c == 0 or covered[c]:
            continue
        v = decode(F.q, P.n, c)
        pt = rref(F, [v], P.n)
        covered[point_codes(pt)] = True
        new.append(pt)
    members = P.members[:index] + new + P.members[index + 1:]
    return ExplicitPartition(F, P.n, members)


def refine_smallest(P: ExplicitPartition, d_new: int, dim: int | None = None) -> ExplicitPartition:
    """Refine the first member of dimension ``dim`` (default: the smallest above d_new)."""
    dims = sorted({U.dim for U in P.members if U.dim > d_new})
    if dim is None:
        if not dims:
            raise ConstructionError(f"no member has dimension above {d_new}")
        dim = dims[0]
    idx = next((i for i, U in enumerate(P.members) if U.dim == dim), None)
    if idx is None:
        raise ConstructionError(f"no member of dimension {dim}")
    return refine(P, idx, d_new)
