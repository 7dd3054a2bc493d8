"""Exact formal q-expansions on the 1/24 exponent grid.

A series lives in q^(offset24/24) * Z[[q^(1/24)]] with exact rational
coefficients and an explicit precision bound: coefficients are trusted only
for exponents strictly below prec24/24.  The 1/24 grid is chosen so that
eta(d*z) for d | 24 and all the usual fractional prefactors land on integer
grid positions.

Everything here is immutable and pure; no floating point anywhere.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple

_F0 = Fraction(0)
_F1 = Fraction(1)


class QSeriesError(ValueError):
    pass


class NotInvertibleError(QSeriesError):
    """Leading stored coefficient is zero: no inverse in the Laurent ring."""


class InsufficientPrecisionError(QSeriesError):
    """A coefficient at or beyond the precision bound was requested."""


def _canonical(offset24: int, prec24: int, coeffs: list) -> tuple:
    """Strip leading zeros (bumping the offset); normalize the zero series."""
    i = 0
    n = len(coeffs)
    while i < n and coeffs[i] == 0:
        i += 1
    if i == n:
        return prec24, prec24, ()
    return offset24 + i, prec24, tuple(Fraction(c) for c in coeffs[i:])


@dataclass(frozen=True)
class QExp:
    """Truncated series sum_i coeffs[i] * q^((offset24+i)/24), exact rationals.

    coeffs has length prec24 - offset24 (or is empty for the zero series, in
    which case offset24 == prec24).  The leading stored coefficient is nonzero.
    """

    offset24: int
    prec24: int
    coeffs: Tuple[Fraction, ...]

    # -- construction ------------------------------------------------------

    @staticmethod
    def from_coeffs(offset24: int, coeffs: Iterable, prec24: int | None = None) -> "QExp":
        cs = [Fraction(c) for c in coeffs]
        if prec24 is None:
            prec24 = offset24 + len(cs)
        if prec24 < offset24 + len(cs):
            cs = cs[: prec24 - offset24]
        elif prec24 > offset24 + len(cs):
            cs = cs + [_F0] * (prec24 - offset24 - len(cs))
        o, p, t = _canonical(offset24, prec24, cs)
        return QExp(o, p, t)

    @staticmethod
    def zero(prec24: int) -> "QExp":
        return QExp(prec24, prec24, ())

    @staticmethod
    def one(prec24: int) -> "QExp":
        if prec24 < 1:
            raise QSeriesError("precision must be >= 1 to store the constant term")
        return QExp.from_coeffs(0, [1], prec24)

    @staticmethod
    def constant(value, prec24: int) -> "QExp":
        return QExp.from_coeffs(0, [Fraction(value)], prec24)

    def __post_init__(self):
        if self.coeffs:
            if len(self.coeffs) != self.prec24 - self.offset24:
                raise QSeriesError("coefficient storage does not match precision window")
            if self.coeffs[0] == 0:
                raise QSeriesError("series is not in canonical form (leading zero)")
        else:
            if self.offset24 != self.prec24:
                raise QSeriesError("zero series must have offset24 == prec24")

    # -- basic queries ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def rel_prec(self) -> int:
        """Number of trusted coefficients past the leading exponent."""
        return self.prec24 - self.offset24

    def coefficient(self, num24: int) -> Fraction:
        """Coefficient of q^(num24/24); zero when unrepresented."""
        if num24 >= self.prec24:
            raise InsufficientPrecisionError(
                f"coefficient at exponent {num24}/24 requested, trusted below {self.prec24}/24"
            )
        i = num24 - self.offset24
        if i < 0 or i >= len(self.coeffs):
            return _F0
        return self.coeffs[i]

    def coefficient_q(self, m: int) -> Fraction:
        """Coefficient of the integer power q^m."""
        return self.coefficient(24 * m)

    def agrees_with(self, other: "QExp", prec24: int | None = None) -> bool:
        """Coefficientwise equality on the overlap of the trusted ranges."""
        p = min(self.prec24, other.prec24)
        if prec24 is not None:
            p = min(p, prec24)
        lo = min(self.offset24, other.offset24, p)
        return all(
            (self.coefficient(k) if k >= self.offset24 else _F0)
            == (other.coefficient(k) if k >= other.offset24 else _F0)
            for k in range(lo, p)
        )

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QExp):
            other = QExp.constant(other, self.prec24)
        prec = min(self.prec24, other.prec24)
        off = min(self.offset24, other.offset24, prec)
        out = [_F0] * (prec - off)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.offset24 + i - off
                if 0 <= k < len(out):
                    out[k] += c
        return QExp.from_coeffs(off, out, prec)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return QExp(self.offset24, self.prec24, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        if not isinstance(other, QExp):
            other = QExp.constant(other, self.prec24)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value) -> "QExp":
        v = Fraction(value)
        if v == 0:
            return QExp.zero(self.prec24)
        return QExp(self.offset24, self.prec24, tuple(v * c for c in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, QExp):
            return self.scale(other)
        if self.is_zero or other.is_zero:
            # O(q^(pa/24)) * (b = O(q^(ob/24))) = O(q^((pa+ob)/24))
            prec = min(self.prec24 + other.offset24, other.prec24 + self.offset24)
            return QExp.zero(prec)
        prec = min(self.prec24 + other.offset24, other.prec24 + self.offset24)
        off = self.offset24 + other.offset24
        out = _convolve(self.coeffs, other.coeffs, prec - off)
        return QExp.from_coeffs(off, out, prec)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if isinstance(other, QExp):
            return self * other.invert()
        return self.scale(Fraction(1, 1) / Fraction(other))

    def invert(self) -> "QExp":
        return self.pow(-1)

    def pow(self, e: int) -> "QExp":
        """Integer power; negative e requires an invertible leading coefficient."""
        if not isinstance(e, int):
            raise QSeriesError("exponent must be an integer")
        if e == 0:
            return QExp.one(max(self.rel_prec, 1))
        if self.is_zero:
            if e < 0:
                raise NotInvertibleError("zero series has no inverse")
            return QExp.zero(self.prec24 * e if e > 0 else self.prec24)
        if e == 1:
            return self
        c0 = self.coeffs[0]
        n = self.rel_prec
        unit = [c / c0 for c in self.coeffs]  # unit[0] == 1
        out = _pow_unit(unit, e, n)
        return QExp.from_coeffs(self.offset24 * e, [c0**e * c for c in out], self.offset24 * e + n)

    def __pow__(self, e: int) -> "QExp":
        return self.pow(e)

    # -- presentation / serialization ----------------------------------------

    def truncate(self, prec24: int) -> "QExp":
        if prec24 >= self.prec24:
            return self
        return QExp.from_coeffs(self.offset24, self.coeffs[: max(prec24 - self.offset24, 0)], prec24)

    def terms(self) -> Iterable[Tuple[int, Fraction]]:
        """Nonzero (exponent24, coefficient) pairs in increasing exponent order."""
        for i, c in enumerate(self.coeffs):
            if c != 0:
                yield self.offset24 + i, c

    def __str__(self):
        parts = []
        for e24, c in self.terms():
            if len(parts) >= 12:
                parts.append("...")
                break
            q = Fraction(e24, 24)
            if q == 0:
                parts.append(str(c))
            else:
                exp = str(q) if q.denominator == 1 else f"({q})"
                mag = "" if abs(c) == 1 else f"{abs(c)}*"
                term = f"{mag}q^{exp}" if exp != "1" else f"{mag}q"
                parts.append(term if c > 0 else "-" + term)
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{body} + O(q^({Fraction(self.prec24, 24)}))"

    def to_dict(self) -> dict:
        off = min(self.offset24, self.prec24)
        dense = [_F0] * (self.prec24 - off)
        for i, c in enumerate(self.coeffs):
            dense[self.offset24 + i - off] = c
        return {
            "offset24": off,
            "prec24": self.prec24,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in dense],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_dict(d: dict) -> "QExp":
        return QExp.from_coeffs(d["offset24"], [Fraction(c) for c in d["coeffs"]], d["prec24"])

    @staticmethod
    def from_json(s: str) -> "QExp":
        return QExp.from_dict(json.loads(s))


# -- convolution / power kernels -------------------------------------------
#
# Coefficient lists are dense on the unit grid, but almost everything we
# multiply is supported on an arithmetic progression (eta(d*z) has stride
# 24*d).  Both kernels therefore reduce to the common stride and clear
# denominators, so the hot loops run on plain Python ints.


def _stride_of(coeffs) -> int:
    g = 0
    for i, c in enumerate(coeffs):
        if i and c != 0:
            g = math.gcd(g, i)
            if g == 1:
                return 1
    return g if g else 1


def _compress(coeffs, stride):
    return [coeffs[i] for i in range(0, len(coeffs), stride)]


def _int_scale(coeffs):
    den = 1
    for c in coeffs:
        if c != 0:
            den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(c * den) for c in coeffs], den


def _convolve(a: Tuple[Fraction, ...], b: Tuple[Fraction, ...], nout: int) -> list:
    if nout <= 0:
        return []
    g = math.gcd(_stride_of(a), _stride_of(b))
    if g > 1:
        small = _convolve(
            tuple(_compress(a, g)), tuple(_compress(b, g)), (nout + g - 1) // g
        )
        out = [_F0] * nout
        for i, c in enumerate(small):
            if i * g < nout:
                out[i * g] = c
        return out
    ai, da = _int_scale(a)
    bi, db = _int_scale(b)
    out = [0] * nout
    # iterate the sparser operand on the outside
    if sum(1 for c in ai if c) > sum(1 for c in bi if c):
        ai, bi = bi, ai
    nb = len(bi)
    for i, ca in enumerate(ai):
        if i >= nout:
            break
        if ca == 0:
            continue
        top = min(nb, nout - i)
        for j in range(top):
            cb = bi[j]
            if cb:
                out[i + j] += ca * cb
    d = da * db
    return [Fraction(v, d) for v in out]


def _pow_unit(u, e: int, n: int) -> list:
    """Coefficients of (1 + u_1 q + ...)^e to length n, any integer e != 0.

    Uses f' u = e u' f, i.e. N f_N = sum_{j>=1} u_j ((e+1) j - N) f_{N-j},
    which costs O(n * nnz(u)) and so stays cheap for sparse bases such as
    the pentagonal-number eta factors.
    """
    g = _stride_of(u)
    if g > 1:
        small = _pow_unit(_compress(u, g), e, (n + g - 1) // g)
        out = [_F0] * n
        for i, c in enumerate(small):
            if i * g < n:
                out[i * g] = c
        return out
    support = [(j, u[j]) for j in range(1, min(len(u), n)) if u[j] != 0]
    f = [_F0] * n
    f[0] = _F1
    for N in range(1, n):
        acc = _F0
        for j, uj in support:
            if j > N:
                break
            acc += uj * ((e + 1) * j - N) * f[N - j]
        f[N] = acc / N
    return f


# -- eta, Eisenstein, Delta --------------------------------------------------


def eta(delta: int, prec24: int) -> QExp:
    """q^(delta/24) * prod_m (1 - q^(delta*m)), expanded by pentagonal numbers."""
    if delta < 1:
        raise QSeriesError("delta must be a positive integer")
    if prec24 <= delta:
        raise QSeriesError("prec24 must exceed delta (the leading exponent)")
    n = prec24 - delta
    out = [_F0] * n
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            g = kk * (3 * kk - 1) // 2
            e = 24 * delta * g
            if e < n:
                out[e] = _F1 if kk % 2 == 0 else -_F1
                hit = True
        if not hit and k:
            break
        k += 1
    return QExp.from_coeffs(delta, out, prec24)


@dataclass(frozen=True)
class EtaQuotientSpec:
    """prod_{delta | N} eta(delta*z)^(r_delta)."""

    level: int
    factors: Mapping[int, int]

    def __post_init__(self):
        if self.level < 1:
            raise QSeriesError("level must be a positive integer")
        object.__setattr__(self, "factors", dict(self.factors))
        if not any(self.factors.values()):
            raise QSeriesError("eta quotient needs at least one nonzero exponent")
        for d in self.factors:
            if d < 1 or self.level % d != 0:
                raise QSeriesError(f"delta={d} does not divide the level {self.level}")

    @property
    def offset24(self) -> int:
        return sum(d * r for d, r in self.factors.items())

    @property
    def weight(self) -> Fraction:
        return Fraction(sum(self.factors.values()), 2)


def eta_product(spec: EtaQuotientSpec, prec24: int) -> QExp:
    rel = max(prec24 - spec.offset24, 1)
    acc = None
    for d in sorted(spec.factors):
        r = spec.factors[d]
        if r == 0:
            continue
        f = eta(d, d + rel).pow(r)
        acc = f if acc is None else acc * f
    return acc.truncate(prec24) if acc.prec24 > prec24 else acc


_BERN_CACHE: Dict[int, Fraction] = {0: _F1, 1: Fraction(-1, 2)}
_BERN_LOCK = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """B_n, exact; odd n > 1 give 0 (convention B_1 = -1/2)."""
    if n < 0:
        raise QSeriesError("n must be nonnegative")
    if n % 2 == 1:
        return _BERN_CACHE[1] if n == 1 else _F0
    with _BERN_LOCK:
        if n in _BERN_CACHE:
            return _BERN_CACHE[n]
        hi = max(k for k in _BERN_CACHE if k % 2 == 0)
        for m in range(hi + 2, n + 2, 2):
            # sum_{j<m} C(m+1, j) B_j = 0
            s = Fraction(m + 1) * Fraction(-1, 2)  # j = 1 term
            for j in range(0, m, 2):
                s += math.comb(m + 1, j) * _BERN_CACHE[j]
            _BERN_CACHE[m] = -s / (m + 1)
        return _BERN_CACHE[n]


def sigma(k: int, m: int) -> int:
    """Divisor power sum sum_{d | m} d^k via trial factorization."""
    if m < 1:
        raise QSeriesError("m must be a positive integer")
    total = 1
    rest = m
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            a = 0
            while rest % p == 0:
                rest //= p
                a += 1
            total *= (p ** (k * (a + 1)) - 1) // (p**k - 1)
        p += 1 if p == 2 else 2
    if rest > 1:
        total *= (rest**k - 1) // (rest**k // rest - 1) if False else (rest**k + 1)
    return total


def _sigma_sieve(k: int, n: int) -> list:
    """[sigma_k(1), ..., sigma_k(n)] by a divisor sieve."""
    out = [0] * (n + 1)
    for d in range(1, n + 1):
        dk = d**k
        for j in range(d, n + 1, d):
            out[j] += dk
    return out[1:]


def eisenstein(k2: int, prec24: int) -> QExp:
    """Classically normalized E_k: 1 - (2k/B_k) * sum sigma_{k-1}(n) q^n."""
    if k2 < 2 or k2 % 2 != 0:
        raise QSeriesError("weight must be an even integer >= 2")
    nmax = max((prec24 - 1) // 24, 0)
    factor = Fraction(-2 * k2) / bernoulli(k2)
    sig = _sigma_sieve(k2 - 1, nmax)
    out = [_F0] * prec24
    out[0] = _F1
    for m in range(1, nmax + 1):
        out[24 * m] = factor * sig[m - 1]
    return QExp.from_coeffs(0, out, prec24)


def delta(prec24: int) -> QExp:
    """Discriminant cusp form eta^24 = sum tau(m) q^m."""
    return eta(1, max(prec24 - 23, 2)).pow(24).truncate(prec24)


_TAU_LOCK = threading.Lock()
_TAU_SERIES: QExp | None = None


def tau(m: int) -> int:
    if m < 1:
        raise QSeriesError("m must be a positive integer")
    global _TAU_SERIES
    with _TAU_LOCK:
        need = 24 * m + 1
        if _TAU_SERIES is None or _TAU_SERIES.prec24 < need:
            _TAU_SERIES = delta(max(need, 24 * 256 + 1))
        c = _TAU_SERIES.coefficient(24 * m)
    if c.denominator != 1:
        raise QSeriesError(f"tau({m}) is not integral; series arithmetic is broken")
    return c.numerator


# -- eta-quotient modularity report ------------------------------------------


@dataclass(frozen=True)
class ModularityReport:
    weight: Fraction
    cond24a: bool
    cond24b: bool
    character_s: Fraction
    cusp_orders: Dict[int, Fraction]

    @property
    def satisfies_congruences(self) -> bool:
        return self.cond24a and self.cond24b

    @property
    def is_holomorphic(self) -> bool:
        return all(v >= 0 for v in self.cusp_orders.values())

    @property
    def is_cuspidal(self) -> bool:
        return all(v > 0 for v in self.cusp_orders.values())

    def to_dict(self) -> dict:
        return {
            "weight": str(self.weight),
            "cond24a": self.cond24a,
            "cond24b": self.cond24b,
            "character_s": str(self.character_s),
            "cusp_orders": {str(d): str(v) for d, v in sorted(self.cusp_orders.items())},
        }


def _divisors(n: int) -> list:
    out = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    return sorted(set(out + [n // d for d in out]))


def validate_eta_quotient(spec: EtaQuotientSpec) -> ModularityReport:
    """Weight, the two mod-24 congruences, the character datum s, and the
    exact vanishing order at each cusp 1/d, d | N."""
    N = spec.level
    cond_a = sum(d * r for d, r in spec.factors.items()) % 24 == 0
    cond_b = sum((N // d) * r for d, r in spec.factors.items()) % 24 == 0
    s = _F1
    for d, r in spec.factors.items():
        s *= Fraction(d) ** r
    orders: Dict[int, Fraction] = {}
    for d in _divisors(N):
        total = _F0
        for dlt, r in spec.factors.items():
            g = math.gcd(d, dlt)
            total += Fraction(g * g * r, math.gcd(d, N // d) * d * dlt)
        orders[d] = Fraction(N, 24) * total
    return ModularityReport(spec.weight, cond_a, cond_b, s, orders)
