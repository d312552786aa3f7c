"""Hyperplane types of a partition and the constraint system on their counts.

For a partition of type m, a hyperplane H has type b when it contains b_d of
the d-dimensional members.  The numbers s_b of hyperplanes of each type obey
a family of linear relations (double counting of hyperplane/member
incidences); together with s_b >= 0 they cut out a polytope whose integer
points are candidate hyperplane censuses.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .gfq import Subspace, matmul, perp, rref
from .partition import ExplicitPartition, PartitionType, check_first_packing

EQ, LE, GE = "=", "<=", ">="


class PackingViolated(ValueError):
    pass


def h(d: int, n: int, q: int) -> int:
    """Number of hyperplanes of V(n, q) through a fixed d-dimensional subspace."""
    if d >= n:
        return 0
    return (q ** (n - d) - 1) // (q - 1)


def num_hyperplanes(n: int, q: int) -> int:
    return h(0, n, q)


def second_packing_rhs(T: PartitionType) -> int:
    return T.size - 1


def _caps(T: PartitionType) -> list[int]:
    # two members of dimension >= n/2 never share a hyperplane
    return [min(md, 1) if 2 * d >= T.n else md for d, md in enumerate(T.m, start=1)]


def enumerate_B(T: PartitionType) -> list[tuple[int, ...]]:
    """Solutions b (ascending, b_1..b_k) of sum b_d q^d = |P| - 1 within the caps.

    Ordered lexicographically by (b_k, ..., b_1), largest first.
    """
    if not check_first_packing(T):
        raise PackingViolated(f"type {T} violates the first packing condition")
    q, k = T.q, T.k
    caps = _caps(T)
    out: list[tuple[int, ...]] = []
    b = [0] * k

    def rec(d: int, rest: int):
        if d == 0:
            if rest == 0:
                out.append(tuple(b))
            return
        w = q ** d
        # members of dimension <= d-1 contribute at most this much
        lower_max = sum(caps[e - 1] * q ** e for e in range(1, d))
        hi = min(caps[d - 1], rest // w)
        for x in range(hi, -1, -1):
            r = rest - x * w
            if r > lower_max:
                break
            b[d - 1] = x
            rec(d - 1, r)
        b[d - 1] = 0

    rec(k, second_packing_rhs(T))
    return out


def is_in_B(T: PartitionType, b: Sequence[int]) -> bool:
    b = tuple(b)
    if len(b) != T.k:
        return False
    caps = _caps(T)
    if any(not 0 <= x <= c for x, c in zip(b, caps)):
        return False
    return sum(x * T.q ** d for d, x in enumerate(b, start=1)) == second_packing_rhs(T)


def _d_min(dims: Sequence[int], counts: Sequence[int]) -> int:
    if counts[-1] >= 2:
        return 2 * dims[-1]
    if len(dims) >= 2:
        return dims[-1] + dims[-2]
    return dims[0]


@dataclass(frozen=True)
class LemmaBounds:
    lower: int
    upper: int
    coeffs: tuple[int, ...]


def lemma_coefficients(B: Sequence[Sequence[int]], dims, counts) -> tuple[int, ...]:
    return tuple(
        int(np.prod([comb(b[d - 1] if d <= len(b) else 0, c) for d, c in zip(dims, counts)]))
        for b in B
    )


def general_lemma_bounds(T: PartitionType, dims: Sequence[int], counts: Sequence[int],
                         B: Sequence[Sequence[int]] | None = None) -> LemmaBounds:
    """Outer bounds on sum_b prod_i C(b_{d_i}, k_i) s_b, with the middle coefficients."""
    dims, counts = tuple(dims), tuple(counts)
    if not dims or len(dims) != len(counts):
        raise ValueError("need l >= 1 dimensions with matching counts")
    if any(d2 <= d1 for d1, d2 in zip(dims, dims[1:])):
        raise ValueError("dimensions must be strictly increasing")
    for d, c in zip(dims, counts):
        if not 1 <= d <= T.n - 1:
            raise ValueError(f"dimension {d} outside 1..n-1")
        if not 1 <= c <= T.count(d):
            raise ValueError(f"count {c} outside 1..m_{d}={T.count(d)}")
    n, q = T.n, T.q
    factor = 1
    for d, c in zip(dims, counts):
        factor *= comb(T.count(d), c)
    total_dim = sum(d * c for d, c in zip(dims, counts))
    lower = factor * h(total_dim, n, q)
    upper = factor * h(_d_min(dims, counts), n, q)
    if B is None:
        B = enumerate_B(T)
    return LemmaBounds(lower, upper, lemma_coefficients(B, dims, counts))


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction | int, ...]
    relation: str
    rhs: Fraction | int
    label: str = ""

    def holds(self, x: Sequence[int | Fraction]) -> bool:
        lhs = sum(Fraction(c) * v for c, v in zip(self.coeffs, x))
        if self.relation == EQ:
            return lhs == self.rhs
        if self.relation == LE:
            return lhs <= self.rhs
        return lhs >= self.rhs


_JSON_RELATION = {EQ: "=", LE: "≤", GE: "≥"}


def _num_to_json(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ConstraintSystem:
    """Rows over variables s_b, b ranging over ``variables``; s_b >= 0 implied."""

    type: PartitionType
    variables: tuple[tuple[int, ...], ...]
    rows: tuple[Row, ...]
    upper_bounds: tuple[int, ...] = field(default=())

    def satisfied_by(self, x: Sequence[int]) -> bool:
        if len(x) != len(self.variables) or any(v < 0 for v in x):
            return False
        if self.upper_bounds and any(v > u for v, u in zip(x, self.upper_bounds)):
            return False
        return all(r.holds(x) for r in self.rows)

    def restrict(self, keep: Sequence[int]) -> "ConstraintSystem":
        """Subsystem with every variable outside ``keep`` fixed to zero."""
        keep = list(keep)
        rows = tuple(Row(tuple(r.coeffs[i] for i in keep), r.relation, r.rhs, r.label)
                     for r in self.rows)
        ub = tuple(self.upper_bounds[i] for i in keep) if self.upper_bounds else ()
        return ConstraintSystem(self.type, tuple(self.variables[i] for i in keep), rows, ub)

    def vector(self, census: dict) -> list[int]:
        """Lay out a census {b: count} on this system's variables."""
        index = {b: i for i, b in enumerate(self.variables)}
        x = [0] * len(self.variables)
        for b, c in census.items():
            if c and b not in index:
                raise KeyError(f"hyperplane type {b} is not a variable")
            if c:
                x[index[b]] = c
        return x

    def to_json(self) -> dict:
        return {
            "type": self.type.to_json(),
            "variables": [list(b) for b in self.variables],
            "upper_bounds": list(self.upper_bounds),
            "rows": [{"coeffs": [_num_to_json(c) for c in r.coeffs],
                      "relation": _JSON_RELATION[r.relation],
                      "rhs": _num_to_json(r.rhs), "label": r.label} for r in self.rows],
        }

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, **kw)

    @classmethod
    def from_json(cls, obj: dict | str) -> "ConstraintSystem":
        if isinstance(obj, str):
            obj = json.loads(obj)
        rows = []
        for r in obj["rows"]:
            rel = {"≤": LE, "≥": GE}.get(r["relation"], r["relation"])
            if rel not in (EQ, LE, GE):
                raise ValueError(f"unknown relation {r['relation']!r}")
            rows.append(Row(tuple(Fraction(c) for c in r["coeffs"]), rel,
                            Fraction(r["rhs"]), r.get("label", "")))
        return cls(PartitionType.from_json(obj["type"]),
                   tuple(tuple(b) for b in obj["variables"]), tuple(rows),
                   tuple(obj.get("upper_bounds", ())))


def build_polytope(T: PartitionType, depth: int = 2) -> ConstraintSystem:
    """Total-count equation, the first- and second-order incidence equations,
    and (for depth > 2) every higher double-counting instance with
    sum k_i <= depth as an inequality pair."""
    n, q = T.n, T.q
    B = enumerate_B(T)
    total = num_hyperplanes(n, q)
    rows = [Row((1,) * len(B), EQ, total, "total")]
    present = [d for d in T.dims if d <= n - 2]
    seen = set()

    def add(dims, counts, label):
        seen.add((tuple(dims), tuple(counts)))
        lb = general_lemma_bounds(T, dims, counts, B)
        if not any(lb.coeffs) and lb.lower <= 0 <= lb.upper:
            return
        if lb.lower == lb.upper:
            rows.append(Row(lb.coeffs, EQ, lb.lower, label))
        else:
            rows.append(Row(lb.coeffs, GE, lb.lower, label))
            rows.append(Row(lb.coeffs, LE, lb.upper, label))

    for d in present:
        add((d,), (1,), f"b_{d}")
    for d in present:
        if T.count(d) >= 2:
            add((d,), (2,), f"C(b_{d},2)")
    for d, e in itertools.combinations(present, 2):
        add((d, e), (1, 1), f"b_{d}*b_{e}")
    if depth > 2:
        eligible = [d for d in T.dims if d <= n - 1]
        for l in range(1, len(eligible) + 1):
            for dims in itertools.combinations(eligible, l):
                ranges = [range(1, min(T.count(d), depth) + 1) for d in dims]
                for counts in itertools.product(*ranges):
                    if sum(counts) > depth or (dims, counts) in seen:
                        continue
                    label = "*".join(f"C(b_{d},{c})" for d, c in zip(dims, counts))
                    add(dims, counts, label)
    return ConstraintSystem(T, tuple(B), tuple(rows), (total,) * len(B))


# --- census of an explicit partition ----------------------------------------

def hyperplane_functionals(F, n: int) -> np.ndarray:
    """One normalised nonzero functional per hyperplane (leading nonzero entry 1)."""
    q = F.q
    rows = []
    for lead in range(n):
        for tail in itertools.product(range(q), repeat=n - lead - 1):
            rows.append((0,) * lead + (1,) + tail[::-1])
    return np.array(rows, dtype=np.int64)


def hyperplane_census(P: ExplicitPartition, with_types: bool = False):
    """Count hyperplanes of each observed type b.

    Returns {b: s_b}; with ``with_types`` also the per-hyperplane list
    of (functional, b).
    """
    F, n = P.field, P.n
    k = max(U.dim for U in P.members)
    H = hyperplane_functionals(F, n)
    inside = np.zeros((H.shape[0], len(P.members)), dtype=bool)
    for j, U in enumerate(P.members):
        vals = matmul(F, H, U.matrix.T)
        inside[:, j] = ~vals.any(axis=1)
    dims = np.array([U.dim for U in P.members])
    counts = np.zeros((H.shape[0], k), dtype=np.int64)
    for d in range(1, k + 1):
        counts[:, d - 1] = inside[:, dims == d].sum(axis=1)
    census: dict[tuple[int, ...], int] = {}
    per = []
    for i, row in enumerate(counts):
        b = tuple(int(x) for x in row)
        census[b] = census.get(b, 0) + 1
        if with_types:
            per.append((H[i], b))
    return (census, per) if with_types else census


def hyperplane_subspace(F, functional) -> Subspace:
    """The hyperplane {x : functional . x = 0}."""
    return perp(rref(F, [functional], len(functional)))
