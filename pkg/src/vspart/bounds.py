"""Closed-form lower bounds on a = q^t + 1 - m_t for partitions of V(2t, q).

All values are exact rationals; the integer ceilings are sound because a
and the deficiency are integers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .gfq import prime_power
from .partition import PartitionType


class BoundNotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class BoundReport:
    name: str
    applicable: bool
    value: Fraction | None = None
    min_a: int | None = None  # implied integer lower bound
    actual: int | None = None
    text: str = ""

    @property
    def violated(self) -> bool:
        return (self.applicable and self.min_a is not None and self.actual is not None
                and self.actual < self.min_a)

    def to_json(self) -> dict:
        return {
            "bound": self.name,
            "applicable": self.applicable,
            "value": None if self.value is None else str(self.value),
            "min": self.min_a,
            "actual": self.actual,
            "violated": self.violated,
            "text": self.text,
        }

    def __str__(self):
        return f"{self.name:<16} {self.text}"


def _na(name: str, why: str) -> BoundReport:
    return BoundReport(name, False, text=f"not applicable: {why}")


def ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def spread_limit(q: int, t: int, d: int) -> Fraction:
    """(q^t - 1)/(q^(t-d) - 1): the strict upper limit on m in R."""
    return Fraction(q ** t - 1, q ** (t - d) - 1)


def R(q: int, t: int, d: int, m: int) -> Fraction:
    if q < 2 or not 1 <= d < t or m < 0:
        raise BoundNotApplicable(f"R needs q >= 2, 1 <= d < t, m >= 0 (got {q},{t},{d},{m})")
    den = q ** t - 1 - m * (q ** (t - d) - 1)
    if den <= 0:
        raise BoundNotApplicable(f"denominator {den} <= 0 for m={m}")
    num = Fraction(q ** (2 * t - 2 * d) - 1, 2) + 1 - q ** (t - d)
    return m * (m - 1) * num / den


def _even_split(T: PartitionType, name: str) -> int:
    if T.n % 2:
        raise BoundNotApplicable(f"{name}: n={T.n} is odd")
    t = T.n // 2
    if T.k != t or T.count(t) == 0:
        raise BoundNotApplicable(f"{name}: needs m_t > 0 and no member above dimension t={t}")
    return t


def actual_a(T: PartitionType) -> int:
    t = T.n // 2
    return T.q ** t + 1 - T.count(t)


def thm_lowbound_a(T: PartitionType, d: int) -> BoundReport:
    name = "lowbound-a"
    try:
        t = _even_split(T, name)
    except BoundNotApplicable as exc:
        return _na(name, str(exc))
    q, md = T.q, T.count(d)
    if not 1 <= d < t or md == 0:
        return _na(name, f"needs 1 <= d < t and m_{d} > 0")
    if md >= spread_limit(q, t, d):
        return _na(name, f"m_{d}={md} >= {spread_limit(q, t, d)}")
    r = R(q, t, d, md)
    value = md - r
    lo = max(0, ceil(value))
    a = actual_a(T)
    rel = ">" if a < lo else "<="
    text = f"d={d}: a >= {md} - R_{q}({t},{d},{md}) = {md} - {r} = {value}, so a >= {lo}; actual a = {a}"
    if a < lo:
        text = f"a >= {lo} > {a} (d={d}, R_{q}({t},{d},{md}) = {r})"
    else:
        text += f" ({lo} {rel} {a})"
    return BoundReport(name, True, value, lo, a, text)


def thm4_bound(T: PartitionType) -> BoundReport:
    """max over d < t and 1 <= x <= mu_d of x - R(q, t, d, x)."""
    name = "thm4"
    try:
        t = _even_split(T, name)
    except BoundNotApplicable as exc:
        return _na(name, str(exc))
    q = T.q
    best: Fraction | None = None
    arg = None
    for d in range(1, t):
        limit = spread_limit(q, t, d)
        mu = min(T.count(d), ceil(limit) - 1)
        for x in range(1, mu + 1):
            v = x - R(q, t, d, x)
            if best is None or v > best:
                best, arg = v, (d, x)
    a = actual_a(T)
    if best is None:
        return BoundReport(name, True, Fraction(0), 0, a, f"empty range; a >= 0; actual a = {a}")
    lo = max(0, ceil(best))
    d, x = arg
    text = f"max at d={d}, x={x}: {best}, so a >= {lo}; actual a = {a}"
    return BoundReport(name, True, best, lo, a, text)


def aggregated_bound(T: PartitionType, d: int) -> BoundReport:
    """Split every member of dimension in (d, t) down to d, then apply R."""
    name = "aggregated"
    try:
        t = _even_split(T, name)
    except BoundNotApplicable as exc:
        return _na(name, str(exc))
    q = T.q
    if not (t < 2 * d and d < t):
        return _na(name, f"needs t/2 < d < t (d={d}, t={t})")
    m = sum(T.count(e) for e in range(d, t))
    if m >= spread_limit(q, t, d):
        return _na(name, f"m={m} >= {spread_limit(q, t, d)}")
    r = R(q, t, d, m)
    value = m - r
    lo = max(0, ceil(value))
    a = actual_a(T)
    return BoundReport(name, True, value, lo, a,
                       f"d={d}, m={m}: a >= {m} - {r} = {value}, so a >= {lo}; actual a = {a}")


def example12_regime(q: int, t: int, d: int, m: int) -> bool:
    """m^2 <= 2 q^(t - 2k) with k = t - d; inside this regime a >= m."""
    if not (t < 2 * d and d < t):
        raise ValueError(f"needs t/2 < d < t (d={d}, t={t})")
    k = t - d
    return m * m <= 2 * q ** (t - 2 * k)


def _icbrt_ceil(x: Fraction) -> int:
    """Smallest integer N with N^3 >= x (x > 0)."""
    n = max(1, int(round(float(x) ** (1 / 3))))
    while n ** 3 >= x and n > 1:
        n -= 1
    while n ** 3 < x:
        n += 1
    return n


def deficiency_bounds(q: int) -> BoundReport:
    """Known lower bound on the deficiency of a non-complete maximal partial spread."""
    p, e = prime_power(q)
    name = "deficiency"
    if e % 2 == 0:
        root = p ** (e // 2)
        value = Fraction(root + 1)
        return BoundReport(name, True, value, root + 1, None,
                           f"q={q} is a square: delta >= sqrt(q)+1 = {root + 1}")
    if e > 2:
        # c_p q^(2/3) + 1 with c_2 = c_3 = 2^(-1/3), c_p = 1 otherwise
        radicand = Fraction(q * q, 2) if p in (2, 3) else Fraction(q * q)
        lo = _icbrt_ceil(radicand) + 1
        coef = "2^(-1/3)*" if p in (2, 3) else ""
        approx = float(radicand) ** (1 / 3) + 1
        return BoundReport(name, True, None, lo, None,
                           f"q={p}^{e}: delta >= {coef}{q}^(2/3)+1 ~ {approx:.4f}, so delta >= {lo}")
    value = Fraction(q + 3, 2)
    return BoundReport(name, True, value, ceil(value), None,
                       f"q={q} prime: delta >= (q+3)/2 = {value}, so delta >= {ceil(value)}")


def extension_min_a(q: int, t: int, d: int, m_d: int) -> BoundReport:
    """Least a compatible with extending the t-dimensional members to a t-spread."""
    if not (t < 2 * d and d < t):
        raise ValueError(f"needs t/2 < d < t (d={d}, t={t})")
    cap = q ** math.ceil(d / 2) + 1
    lo = min(m_d, cap)
    return BoundReport("extension", True, Fraction(lo), lo, None,
                       f"if the {t}-dimensional members extend to a {t}-spread: "
                       f"a >= min(m_{d}={m_d}, q^{math.ceil(d / 2)}+1={cap}) = {lo}")


def corollary3_report(T: PartitionType, d: int) -> BoundReport:
    """When a < m_d, realizing T forces a maximal partial t-spread with 0 < delta <= a."""
    name = "partial-spread"
    try:
        t = _even_split(T, name)
    except BoundNotApplicable as exc:
        return _na(name, str(exc))
    q, md = T.q, T.count(d)
    if not (t < 2 * d and d < t):
        return _na(name, f"needs t/2 < d < t (d={d}, t={t})")
    cap = q ** math.ceil(d / 2) + 1
    a = actual_a(T)
    if md > cap:
        return _na(name, f"m_{d}={md} > q^{math.ceil(d / 2)}+1={cap}")
    if a >= md:
        return _na(name, f"a={a} >= m_{d}={md}")
    mt = T.count(t)
    floor = deficiency_bounds(q).min_a
    options = list(range(max(1, floor), a + 1))
    lines = [f"if a partition of type {T} of V({T.n},{q}) exists, its {mt} members of "
             f"dimension {t} lie in a maximal partial {t}-spread with deficiency 0 < delta <= {a}"]
    lines.append(f"  branch 1: they already form a maximal partial {t}-spread (delta = {a})")
    lines.append(f"  branch 2: they extend to a larger maximal partial {t}-spread (delta < {a})")
    if options:
        lines.append(f"  known deficiency bound delta >= {floor} leaves delta in {options}")
    else:
        lines.append(f"  known deficiency bound delta >= {floor} leaves no option: type excluded")
    return BoundReport(name, True, None, floor, a, "\n".join(lines))


def all_bounds(T: PartitionType) -> list[BoundReport]:
    """Every bound that applies to T, in a fixed order."""
    if T.n % 2:
        return []
    t = T.n // 2
    out = []
    for d in range(1, t):
        rep = thm_lowbound_a(T, d)
        if rep.applicable:
            out.append(rep)
    rep = thm4_bound(T)
    if rep.applicable:
        out.append(rep)
    for d in range(1, t):
        if t < 2 * d:
            for fn in (aggregated_bound, corollary3_report):
                rep = fn(T, d)
                if rep.applicable:
                    out.append(rep)
            if T.count(d) and T.k == t:
                out.append(extension_min_a(T.q, t, d, T.count(d)))
                if example12_regime(T.q, t, d, T.count(d)):
                    out.append(BoundReport("example12", True, None, T.count(d), actual_a(T),
                                           f"m_{d}^2 <= 2q^{t - 2 * (t - d)}: a >= m_{d} = {T.count(d)}"))
    return out
