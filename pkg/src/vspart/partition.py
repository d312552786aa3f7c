"""Partition types, explicit partitions and the classical necessary conditions."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
import numpy as np

from .gfq import (FieldMismatch, FieldSpec, Subspace, coordinates, get_field,
                  intersect, point_codes, prime_power, rref, whole_space)

MAX_VERIFY = 1 << 24


class TooLargeToVerify(ValueError):
    pass


@dataclass(frozen=True)
class PartitionType:
    """Counts m[d-1] = number of d-dimensional members, stored ascending."""

    n: int
    q: int
    m: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(x) for x in self.m)
        while m and m[-1] == 0:
            m = m[:-1]
        object.__setattr__(self, "m", m)
        if self.n < 1:
            raise ValueError("ambient dimension must be positive")
        prime_power(self.q)
        if any(x < 0 for x in m):
            raise ValueError(f"negative count in type {m}")
        if len(m) > self.n:
            raise ValueError(f"type has members of dimension {len(m)} > n={self.n}")

    @classmethod
    def parse(cls, n: int, q: int, text: str) -> "PartitionType":
        """Read the descending form "m_k,...,m_1" (parentheses optional)."""
        body = text.strip().strip("()").replace(" ", "")
        try:
            desc = [int(x) for x in body.split(",") if x != ""]
        except ValueError:
            raise ValueError(f"malformed type string {text!r}") from None
        if not desc:
            raise ValueError(f"malformed type string {text!r}")
        return cls(n, q, tuple(reversed(desc)))

    @property
    def k(self) -> int:
        return len(self.m)

    def count(self, d: int) -> int:
        return self.m[d - 1] if 1 <= d <= self.k else 0

    @property
    def dims(self) -> list[int]:
        return [d for d in range(1, self.k + 1) if self.m[d - 1] > 0]

    @property
    def size(self) -> int:
        return sum(self.m)

    def descending(self) -> tuple[int, ...]:
        return tuple(reversed(self.m))

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.descending()) + ")"

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "m": list(self.m)}

    @classmethod
    def from_json(cls, obj: dict) -> "PartitionType":
        return cls(int(obj["n"]), int(obj["q"]), tuple(obj["m"]))


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class ConditionReport:
    name: str
    verdict: Verdict
    witness: str

    @property
    def failed(self) -> bool:
        return self.verdict is Verdict.FAILS

    def to_json(self) -> dict:
        return {"condition": self.name, "verdict": self.verdict.value, "witness": self.witness}

    def __str__(self):
        return f"{self.name:<14} {self.verdict.value:<15} {self.witness}"


@dataclass
class ExplicitPartition:
    field: FieldSpec
    n: int
    members: list[Subspace]

    @property
    def q(self) -> int:
        return self.field.q

    def type(self) -> PartitionType:
        counts = [0] * self.n
        for U in self.members:
            counts[U.dim - 1] += 1
        return PartitionType(self.n, self.q, tuple(counts))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "irr": list(self.field.irr),
            "subspaces": [[list(row) for row in U.basis] for U in self.members],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> "ExplicitPartition":
        n, q = int(obj["n"]), int(obj["q"])
        F = get_field(q)
        if "irr" in obj and tuple(obj["irr"]) != F.irr:
            F = FieldSpec(F.p, F.e, tuple(int(c) for c in obj["irr"]))
        members = [rref(F, rows, n) for rows in obj["subspaces"]]
        return cls(F, n, members)


def verify_partition(P: ExplicitPartition) -> tuple[bool, PartitionType]:
    """Exhaustively check that the members cover each nonzero vector exactly once."""
    size = P.q ** P.n
    if size > MAX_VERIFY:
        raise TooLargeToVerify(f"q^n = {size} is too large to verify")
    occupancy = np.zeros(size, dtype=np.int64)
    for U in P.members:
        if U.field != P.field or U.n != P.n:
            raise FieldMismatch("member lives in a different ambient space")
        occupancy += np.bincount(point_codes(U), minlength=size)
    ok = all(U.dim >= 1 for U in P.members) and bool(np.all(occupancy[1:] == 1))
    return ok, P.type()


# --- necessary conditions ---------------------------------------------------

def packing_sum(T: PartitionType) -> int:
    return sum(md * (T.q ** d - 1) for d, md in enumerate(T.m, start=1))


def check_first_packing(T: PartitionType) -> bool:
    return packing_sum(T) == T.q ** T.n - 1


def _dimension_witness(T: PartitionType) -> str | None:
    dims = T.dims
    for i, d in enumerate(dims):
        if T.count(d) >= 2 and 2 * d > T.n:
            return f"two members of dimension {d}: {2 * d} > {T.n}"
        for e in dims[i + 1:]:
            if d + e > T.n:
                return f"dimensions {d}+{e} = {d + e} > {T.n}"
    return None


def check_dimension(T: PartitionType) -> bool:
    return _dimension_witness(T) is None


def packing_report(T: PartitionType) -> ConditionReport:
    s, target = packing_sum(T), T.q ** T.n - 1
    v = Verdict.HOLDS if s == target else Verdict.FAILS
    return ConditionReport("packing", v, f"sum m_d(q^d-1) = {s}, q^n-1 = {target}")


def dimension_report(T: PartitionType) -> ConditionReport:
    w = _dimension_witness(T)
    if w is None:
        return ConditionReport("dimension", Verdict.HOLDS, "all pairs fit")
    return ConditionReport("dimension", Verdict.FAILS, w)


def check_tail(T: PartitionType) -> ConditionReport:
    """Bounds on the number of lowest-dimensional members.

    The basic bound (i)/(ii) is reported when it fails; otherwise the
    improved bound (iii)/(iv) is checked when q^(d2-d1) divides m.  Case (ii)
    compares with ``>=`` 2q^(d2-d1): a strict inequality would exclude a line
    plus four points of V(3,2).
    """
    dims = T.dims
    if len(dims) < 2:
        return ConditionReport("tail", Verdict.NOT_APPLICABLE, "fewer than two dimensions")
    q = T.q
    d1, d2 = dims[0], dims[1]
    m = T.count(d1)

    def report(case, ok, rel_bound):
        return ConditionReport("tail", Verdict.HOLDS if ok else Verdict.FAILS,
                               f"{case} d1={d1}, d2={d2}: m={m} {rel_bound}")

    if d2 < 2 * d1:
        bound = q ** d1 + 1
        basic = report("(i)", m >= bound, f"{'>=' if m >= bound else '<'} {bound}")
    else:
        exact = (q ** d2 - 1) // (q ** d1 - 1) if d2 % d1 == 0 else None
        bound = 2 * q ** (d2 - d1)
        if exact is not None and m == exact:
            basic = ConditionReport("tail", Verdict.HOLDS,
                                    f"(ii) d1={d1} divides d2={d2} and m={m} = {exact}")
        else:
            basic = report("(ii)", m >= bound, f"{'>=' if m >= bound else '<'} {bound}")
    improved = m % q ** (d2 - d1) == 0 and not (q == 2 and d1 == 1 and d2 == 2)
    if basic.failed or not improved:
        return basic
    if d2 < 2 * d1:
        case, bound = "(iii)", q ** d2 - q ** d1 + q ** (d2 - d1)
    else:
        case, bound = "(iv)", q ** d2
    return report(case, m >= bound, f"{'>=' if m >= bound else '<'} {bound}")


def check_sufficiency(T: PartitionType) -> bool:
    """Certified realizable: packing, dimension, and at most q members above the lowest dimension."""
    dims = T.dims
    if not dims or not (check_first_packing(T) and check_dimension(T)):
        return False
    c = dims[0]
    return T.size - T.count(c) <= T.q


def sufficiency_report(T: PartitionType) -> ConditionReport:
    if check_sufficiency(T):
        return ConditionReport("sufficiency", Verdict.HOLDS,
                               f"at most q={T.q} members above dimension {T.dims[0]}: realizable")
    return ConditionReport("sufficiency", Verdict.NOT_APPLICABLE,
                           "criterion does not certify this type")


def size_bounds(T: PartitionType) -> ConditionReport:
    """Lower bounds on the number of members of a non-trivial partition."""
    n, q, size = T.n, T.q, T.size
    dims = T.dims
    if not dims or dims == [n]:
        return ConditionReport("size", Verdict.NOT_APPLICABLE, "trivial partition")
    d = dims[-1]
    checks: list[tuple[str, bool]] = []
    others = [e for e in dims[:-1] if e < n - d]
    if others:
        e = others[-1]
        bound = q ** d + q ** e + 1
        checks.append((f"|P|={size} >= q^{d}+q^{e}+1={bound}", size >= bound))
    if 2 * d >= n:
        bound = q ** d + 1
        if dims == [d]:
            checks.append((f"|P|={size} == q^{d}+1={bound}", size == bound))
        else:
            checks.append((f"|P|={size} >= q^{d}+1={bound}", size >= bound))
    half = -(-n // 2)
    bound = q ** half + 1
    checks.append((f"|P|={size} >= q^{half}+1={bound}", size >= bound))
    failed = [text for text, ok in checks if not ok]
    if failed:
        return ConditionReport("size", Verdict.FAILS, "; ".join(failed))
    return ConditionReport("size", Verdict.HOLDS, "; ".join(text for text, _ in checks))


def necessary_conditions(T: PartitionType) -> list[ConditionReport]:
    return [packing_report(T), dimension_report(T), check_tail(T), size_bounds(T),
            sufficiency_report(T)]


def induce_on_subspace(P: ExplicitPartition, W: Subspace) -> ExplicitPartition:
    """The partition {U ∩ W} of W, written in the coordinates of W's echelon basis."""
    if W.field != P.field or W.n != P.n:
        raise FieldMismatch("W lives in a different ambient space")
    members = []
    for U in P.members:
        X = intersect(U, W)
        if X.dim:
            members.append(rref(P.field, [coordinates(W, row) for row in X.basis], W.dim))
    return ExplicitPartition(P.field, W.dim, members)


def trivial_partition(F: FieldSpec, n: int) -> ExplicitPartition:
    return ExplicitPartition(F, n, [whole_space(F, n)])


def load_type(obj: dict | str) -> PartitionType:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return PartitionType.from_json(obj)

