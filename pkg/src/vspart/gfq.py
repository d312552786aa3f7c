"""Arithmetic in GF(p^e) and linear algebra over GF(q).

Field elements are dense integer codes: the code of c_0 + c_1 x + ... is
sum(c_i * p**i).  Vectors of V(n, q) are length-n sequences of codes and are
indexed (for occupancy arrays and the like) little-endian in base q.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

MAX_TABLE_Q = 256
MAX_TOWER_SIZE = 1 << 20

# Fixed (Conway) polynomials, little-endian coefficients, monic.
IRREDUCIBLE = {
    4: (1, 1, 1),
    8: (1, 1, 0, 1),
    9: (2, 2, 1),
    16: (1, 1, 0, 0, 1),
    25: (2, 4, 1),
    27: (1, 2, 0, 1),
}


class FieldMismatch(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, e) with q = p**e, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, e


def factorize(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over GF(p) as little-endian int lists ---------------------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    a = _poly_trim(a)
    b = _poly_trim(b)
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _poly_trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _poly_trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not _poly_mod(poly, list(low) + [1], p):
                return False
    return True


def _first_irreducible(p: int, e: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=e):
        cand = tuple(reversed(low)) + (1,)
        if is_irreducible(cand, p):
            return cand
    raise AssertionError("unreachable: irreducibles exist in every degree")


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int
    irr: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p) or self.e < 1:
            raise ValueError(f"bad field parameters p={self.p}, e={self.e}")
        if len(self.irr) != self.e + 1 or self.irr[-1] != 1:
            raise ValueError("irr must be monic of degree e")
        if self.e > 1 and not is_irreducible(self.irr, self.p):
            raise ValueError(f"{self.irr} is reducible over GF({self.p})")
        if self.q > MAX_TABLE_Q:
            raise ValueError(f"q={self.q} exceeds {MAX_TABLE_Q}")

    @property
    def q(self) -> int:
        return self.p ** self.e

    @cached_property
    def digits(self) -> np.ndarray:
        codes = np.arange(self.q)
        return np.stack([(codes // self.p ** i) % self.p for i in range(self.e)], axis=1)

    def _encode(self, coeffs: np.ndarray) -> np.ndarray:
        weights = self.p ** np.arange(self.e)
        return (coeffs % self.p) @ weights

    @cached_property
    def add_table(self) -> np.ndarray:
        D = self.digits
        return self._encode(D[:, None, :] + D[None, :, :])

    @cached_property
    def neg_table(self) -> np.ndarray:
        return self._encode(-self.digits)

    @cached_property
    def sub_table(self) -> np.ndarray:
        return self.add_table[:, self.neg_table]

    @cached_property
    def mul_table(self) -> np.ndarray:
        p, e, q = self.p, self.e, self.q
        D = self.digits
        irr = np.array(self.irr)
        table = np.zeros((q, q), dtype=np.int64)
        for b in range(q):
            prod = np.zeros((q, 2 * e - 1), dtype=np.int64)
            for j, bj in enumerate(D[b]):
                if bj:
                    prod[:, j:j + e] += D * bj
            for deg in range(2 * e - 2, e - 1, -1):
                c = prod[:, deg] % p
                prod[:, deg - e:deg + 1] -= c[:, None] * irr[None, :]
            table[:, b] = self._encode(prod[:, :e])
        return table

    @cached_property
    def inv_table(self) -> np.ndarray:
        inv = np.zeros(self.q, dtype=np.int64)
        rows, cols = np.nonzero(self.mul_table == 1)
        inv[rows] = cols
        return inv

    def add(self, a, b):
        return self.add_table[a, b]

    def sub(self, a, b):
        return self.sub_table[a, b]

    def mul(self, a, b):
        return self.mul_table[a, b]

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in GF(q)")
        return self.inv_table[a]

    def __call__(self, code: int) -> "FieldElement":
        return FieldElement(code, self)

    def __repr__(self):
        return f"GF({self.q})"


@lru_cache(maxsize=None)
def get_field(q: int) -> FieldSpec:
    """The field GF(q) with the package's fixed defining polynomial."""
    p, e = prime_power(q)
    if e == 1:
        return FieldSpec(p, 1, (0, 1))
    irr = IRREDUCIBLE.get(q) or _first_irreducible(p, e)
    return FieldSpec(p, e, tuple(irr))


@dataclass(frozen=True)
class FieldElement:
    code: int
    spec: FieldSpec = dc_field(repr=False)

    def __post_init__(self):
        if not 0 <= self.code < self.spec.q:
            raise ValueError(f"code {self.code} outside GF({self.spec.q})")

    def _check(self, other):
        if not isinstance(other, FieldElement) or other.spec != self.spec:
            raise FieldMismatch("operands live in different fields")

    def __add__(self, other):
        self._check(other)
        return FieldElement(int(self.spec.add_table[self.code, other.code]), self.spec)

    def __sub__(self, other):
        self._check(other)
        return FieldElement(int(self.spec.sub_table[self.code, other.code]), self.spec)

    def __neg__(self):
        return FieldElement(int(self.spec.neg_table[self.code]), self.spec)

    def __mul__(self, other):
        self._check(other)
        return FieldElement(int(self.spec.mul_table[self.code, other.code]), self.spec)

    def inverse(self):
        return FieldElement(int(self.spec.inv(self.code)), self.spec)

    def __int__(self):
        return self.code


def fe_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def fe_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def fe_inv(a: FieldElement) -> FieldElement:
    return a.inverse()


# --- vectors -----------------------------------------------------------------

def encode(q: int, vectors) -> np.ndarray:
    """Little-endian base-q index of each row."""
    V = np.atleast_2d(np.asarray(vectors, dtype=np.int64))
    return V @ (q ** np.arange(V.shape[1], dtype=np.int64))


def decode(q: int, n: int, codes) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    return np.stack([(codes // q ** i) % q for i in range(n)], axis=-1)


def matmul(F: FieldSpec, A, B) -> np.ndarray:
    """Matrix product over GF(q)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if F.e == 1:
        return (A @ B) % F.p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        out = F.add_table[out, F.mul_table[A[:, k:k + 1], B[k:k + 1, :]]]
    return out


def _rref_matrix(F: FieldSpec, M: np.ndarray) -> tuple[np.ndarray, list[int]]:
    M = np.array(M, dtype=np.int64, copy=True)
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            M[[r, i]] = M[[i, r]]
        M[r] = F.mul_table[F.inv_table[M[r, c]], M[r]]
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = F.sub_table[M[i], F.mul_table[M[i, c], M[r]]]
        pivots.append(c)
        r += 1
    return M[:r], pivots


@dataclass(frozen=True)
class Subspace:
    """Subspace of V(n, q) held by its reduced row echelon basis."""

    field: FieldSpec
    n: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int64).reshape(self.dim, self.n)

    @property
    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(row) if x) for row in self.basis]

    def __contains__(self, v) -> bool:
        return contains(self, v)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, n={self.n}, q={self.q}, basis={list(self.basis)})"


def rref(F: FieldSpec, vectors: Iterable[Sequence[int]], n: int | None = None) -> Subspace:
    """Canonical row-reduced basis of the span of ``vectors``."""
    rows = [tuple(int(x) for x in v) for v in vectors]
    if n is None:
        if not rows:
            raise ValueError("ambient dimension needed for an empty spanning set")
        n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("vectors of different lengths")
    if not rows:
        return Subspace(F, n, ())
    M, _ = _rref_matrix(F, np.array(rows, dtype=np.int64))
    return Subspace(F, n, tuple(tuple(int(x) for x in row) for row in M))


def zero_space(F: FieldSpec, n: int) -> Subspace:
    return Subspace(F, n, ())


def whole_space(F: FieldSpec, n: int) -> Subspace:
    return Subspace(F, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def _same_ambient(U: Subspace, W: Subspace):
    if U.field != W.field or U.n != W.n:
        raise FieldMismatch("subspaces live in different ambient spaces")


def perp(U: Subspace) -> Subspace:
    """Annihilator of U under the standard dot product (a kernel computation)."""
    F, n = U.field, U.n
    piv = U.pivots
    free = [j for j in range(n) if j not in piv]
    rows = []
    for j in free:
        v = [0] * n
        v[j] = 1
        for i, pc in enumerate(piv):
            v[pc] = int(F.neg_table[U.basis[i][j]])
        rows.append(v)
    return rref(F, rows, n)


def subspace_sum(U: Subspace, W: Subspace) -> Subspace:
    _same_ambient(U, W)
    return rref(U.field, U.basis + W.basis, U.n)


def intersect(U: Subspace, W: Subspace) -> Subspace:
    _same_ambient(U, W)
    return perp(subspace_sum(perp(U), perp(W)))


def contains(U: Subspace, v: Sequence[int]) -> bool:
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (U.n,):
        raise FieldMismatch("vector length differs from ambient dimension")
    F = U.field
    for row, c in zip(U.basis, U.pivots):
        if v[c]:
            v = F.sub_table[v, F.mul_table[v[c], np.asarray(row)]]
    return not v.any()


def is_subspace_of(U: Subspace, W: Subspace) -> bool:
    _same_ambient(U, W)
    return all(contains(W, row) for row in U.basis)


@lru_cache(maxsize=64)
def _coefficient_grid(q: int, d: int) -> np.ndarray:
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.array(list(itertools.product(range(q), repeat=d)), dtype=np.int64)
    return grid[:, ::-1]


def enumerate_vectors(U: Subspace) -> np.ndarray:
    """All q**dim vectors of U as rows (zero vector first)."""
    F = U.field
    C = _coefficient_grid(F.q, U.dim)
    V = np.zeros((C.shape[0], U.n), dtype=np.int64)
    for i, row in enumerate(U.basis):
        V = F.add_table[V, F.mul_table[C[:, i:i + 1], np.asarray(row)[None, :]]]
    return V


def point_codes(U: Subspace) -> np.ndarray:
    """Integer indices (base q) of all vectors of U."""
    return encode(U.q, enumerate_vectors(U))


def coordinates(W: Subspace, v: Sequence[int]) -> tuple[int, ...]:
    """Coordinates of v (assumed to lie in W) in W's echelon basis."""
    return tuple(int(v[c]) for c in W.pivots)


# --- GF(q^n) as V(n, q) --------------------------------------------------------

def _poly_mulmod_x_power(F: FieldSpec, f: Sequence[int], exponent: int) -> list[int]:
    """x**exponent mod f over GF(q), f monic given little-endian."""
    n = len(f) - 1

    def mulmod(a, b):
        prod = [0] * (2 * n - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] = int(F.add_table[prod[i + j], F.mul_table[ai, bj]])
        for deg in range(2 * n - 2, n - 1, -1):
            c = prod[deg]
            if c:
                for i in range(n + 1):
                    prod[deg - n + i] = int(F.sub_table[prod[deg - n + i], F.mul_table[c, f[i]]])
        return prod[:n]

    result = [1] + [0] * (n - 1)
    base = [0, 1] + [0] * (n - 2) if n > 1 else [int(F.neg_table[f[0]])]
    while exponent:
        if exponent & 1:
            result = mulmod(result, base)
        base = mulmod(base, base)
        exponent >>= 1
    return result


def is_primitive(F: FieldSpec, f: Sequence[int]) -> bool:
    """x has multiplicative order q**n - 1 modulo f (which forces f irreducible)."""
    n = len(f) - 1
    order = F.q ** n - 1
    one = [1] + [0] * (n - 1)
    if f[0] == 0:
        return False
    if _poly_mulmod_x_power(F, f, order) != one:
        return False
    return all(_poly_mulmod_x_power(F, f, order // r) != one for r in factorize(order))


@lru_cache(maxsize=None)
def primitive_polynomial(q: int, n: int) -> tuple[int, ...]:
    """Lexicographically first monic primitive polynomial of degree n over GF(q)."""
    F = get_field(q)
    for low in itertools.product(range(q), repeat=n):
        f = tuple(reversed(low)) + (1,)
        if is_primitive(F, f):
            return f
    raise AssertionError("unreachable: primitive polynomials exist")


@dataclass(frozen=True, eq=False)
class TowerMap:
    """GF(q^n) realised on the vectors of V(n, q), with its subfield GF(q^t).

    Element codes are the base-q indices of their coordinate vectors in the
    power basis 1, x, ..., x^(n-1) of a fixed primitive polynomial.
    """

    q: int
    n: int
    t: int
    poly: tuple[int, ...]
    exp: np.ndarray  # exp[i] = code of x**i, i < N-1
    log: np.ndarray  # log[0] = -1

    @property
    def field(self) -> FieldSpec:
        return get_field(self.q)

    @property
    def size(self) -> int:
        return self.q ** self.n

    @property
    def order(self) -> int:
        return self.size - 1

    @cached_property
    def vectors(self) -> np.ndarray:
        return decode(self.q, self.n, np.arange(self.size))

    def to_vector(self, code: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.vectors[code])

    def from_vector(self, v) -> int:
        return int(encode(self.q, v)[0])

    def mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.exp[(self.log[a] + self.log[b]) % self.order]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[(-self.log[a]) % self.order])

    def add(self, a, b):
        F = self.field
        s = F.add_table[self.vectors[np.asarray(a)], self.vectors[np.asarray(b)]]
        return encode(self.q, s) if s.ndim > 1 else int(encode(self.q, s)[0])

    def power(self, e: int) -> int:
        return int(self.exp[e % self.order])

    def subfield(self, s: int) -> np.ndarray:
        """Sorted codes of the subfield GF(q^s), s dividing n."""
        if self.n % s:
            raise ValueError(f"{s} does not divide {self.n}")
        step = self.order // (self.q ** s - 1)
        return np.sort(np.concatenate([[0], self.exp[::step]]))

    @cached_property
    def subfield_codes(self) -> np.ndarray:
        return self.subfield(self.t)

    def span(self, codes) -> Subspace:
        return rref(self.field, [self.vectors[c] for c in np.atleast_1d(codes)], self.n)

    @cached_property
    def subfield_space(self) -> Subspace:
        return self.span(self.subfield_codes)

    def scale(self, beta: int, U: Subspace) -> Subspace:
        """The image beta*U of a subspace under multiplication by beta."""
        rows = [self.from_vector(r) for r in U.basis]
        return self.span(self.mul(beta, np.array(rows, dtype=np.int64))) if rows else U

    def times_subfield(self, beta: int) -> Subspace:
        """beta * GF(q^t) as a t-dimensional subspace of V(n, q)."""
        if beta == 0:
            raise ValueError("beta must be nonzero")
        return self.scale(beta, self.subfield_space)

    def mult_matrix(self, beta: int) -> np.ndarray:
        """Matrix M with (v @ M) = coordinates of beta * v."""
        units = [self.from_vector([int(i == j) for j in range(self.n)]) for i in range(self.n)]
        return self.vectors[self.mul(beta, np.array(units))]

    def element_code(self, v) -> int:
        return self.from_vector(v)


@lru_cache(maxsize=16)
def make_tower(q: int, n: int, t: int) -> TowerMap:
    if t < 1 or n % t:
        raise ValueError(f"t={t} does not divide n={n}")
    if q ** n > MAX_TOWER_SIZE:
        raise ValueError(f"GF({q}^{n}) exceeds the table budget")
    F = get_field(q)
    f = primitive_polynomial(q, n)
    size = q ** n
    order = size - 1
    exp = np.zeros(order, dtype=np.int64)
    log = np.full(size, -1, dtype=np.int64)
    neg_f = F.neg_table[np.array(f[:n])]
    cur = np.zeros(n, dtype=np.int64)
    cur[0] = 1
    weights = q ** np.arange(n, dtype=np.int64)
    for i in range(order):
        code = int(cur @ weights)
        exp[i] = code
        log[code] = i
        top = cur[-1]
        cur = np.roll(cur, 1)
        cur[0] = 0
        if top:
            cur = F.add_table[cur, F.mul_table[top, neg_f]]
    exp.setflags(write=False)
    log.setflags(write=False)
    return TowerMap(q, n, t, f, exp, log)
