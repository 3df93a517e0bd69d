"""Exact integer/rational arithmetic for the planar setting.

Everything here is an immutable value type; nothing touches floating point.
Matrix entries may be ``int`` or ``Fraction``; fractions with denominator 1
are normalized back to ``int`` so that integrality is a cheap type check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

Number = Union[int, Fraction]


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


def _norm(x) -> Number:
    if isinstance(x, bool):
        raise TypeError("bool is not a matrix entry")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return _norm(Fraction(x))
    raise TypeError(f"exact number expected, got {type(x).__name__}")


def as_fraction(x: Number) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class QVec2:
    """Rational 2-vector. Coordinates are reduced ``Fraction``/``int`` values."""

    x: Number
    y: Number

    def __post_init__(self):
        object.__setattr__(self, "x", _norm(self.x))
        object.__setattr__(self, "y", _norm(self.y))

    def __iter__(self) -> Iterator[Number]:
        yield self.x
        yield self.y

    def __add__(self, other: QVec2) -> QVec2:
        return QVec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: QVec2) -> QVec2:
        return QVec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> QVec2:
        return QVec2(-self.x, -self.y)

    def __mul__(self, k: Number) -> QVec2:
        return QVec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other: QVec2) -> Number:
        return _norm(self.x * other.x + self.y * other.y)

    def frac(self) -> QVec2:
        """Canonical representative of ``self + Z^2`` in ``[0,1)^2``."""
        return QVec2(self.x - math.floor(self.x), self.y - math.floor(self.y))

    def is_integral(self) -> bool:
        return isinstance(self.x, int) and isinstance(self.y, int)

    def congruent(self, other: QVec2) -> bool:
        return (self - other).is_integral()

    def denominator(self) -> int:
        """Least q > 0 with q*self integral."""
        return math.lcm(as_fraction(self.x).denominator, as_fraction(self.y).denominator)

    def norm_inf(self) -> Fraction:
        return max(abs(as_fraction(self.x)), abs(as_fraction(self.y)))

    @classmethod
    def zero(cls) -> QVec2:
        return cls(0, 0)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class Mat2:
    """2x2 matrix ``[[a, b], [c, d]]`` over Z or Q, row-major."""

    a: Number
    b: Number
    c: Number
    d: Number

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, _norm(getattr(self, name)))

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1, 0, 0, 1)

    @classmethod
    def scalar(cls, k: Number) -> Mat2:
        return cls(k, 0, 0, k)

    @classmethod
    def from_rows(cls, rows) -> Mat2:
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def from_columns(cls, u: QVec2, v: QVec2) -> Mat2:
        return cls(u.x, v.x, u.y, v.y)

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def rows(self) -> list:
        return [[self.a, self.b], [self.c, self.d]]

    def columns(self) -> tuple[QVec2, QVec2]:
        return QVec2(self.a, self.c), QVec2(self.b, self.d)

    def is_integral(self) -> bool:
        return all(isinstance(e, int) for e in self.entries())

    def det(self) -> Number:
        return _norm(self.a * self.d - self.b * self.c)

    def trace(self) -> Number:
        return _norm(self.a + self.d)

    def adj(self) -> Mat2:
        return Mat2(self.d, -self.b, -self.c, self.a)

    @property
    def T(self) -> Mat2:
        return Mat2(self.a, self.c, self.b, self.d)

    def inv(self) -> Mat2:
        det = self.det()
        if det == 0:
            raise DomainError("singular matrix")
        f = Fraction(1) / det
        return Mat2(self.d * f, -self.b * f, -self.c * f, self.a * f)

    def __matmul__(self, other):
        if isinstance(other, Mat2):
            return Mat2(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        if isinstance(other, QVec2):
            return QVec2(self.a * other.x + self.b * other.y, self.c * other.x + self.d * other.y)
        return NotImplemented

    def __mul__(self, k: Number) -> Mat2:
        return Mat2(self.a * k, self.b * k, self.c * k, self.d * k)

    __rmul__ = __mul__

    def __add__(self, other: Mat2) -> Mat2:
        return Mat2(self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d)

    def __sub__(self, other: Mat2) -> Mat2:
        return Mat2(self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d)

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __pow__(self, n: int) -> Mat2:
        if n < 0:
            return self.inv() ** (-n)
        result, base = Mat2.identity(), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def mod(self, m: int) -> ResidueMat2:
        if not self.is_integral():
            raise DomainError("only integer matrices reduce modulo m")
        return ResidueMat2.of(self, m)

    def norm_inf(self) -> Fraction:
        """Operator norm induced by the max-norm (largest absolute row sum)."""
        return max(abs(as_fraction(self.a)) + abs(as_fraction(self.b)),
                   abs(as_fraction(self.c)) + abs(as_fraction(self.d)))

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


# integer matrices are just Mat2 with integral entries; keep the shorter alias
IMat2 = Mat2


@dataclass(frozen=True)
class ResidueMat2:
    """2x2 matrix with entries reduced into ``[0, modulus)``."""

    entries: tuple
    modulus: int

    @classmethod
    def of(cls, M: Mat2, m: int) -> ResidueMat2:
        if m < 1:
            raise DomainError("modulus must be positive")
        return cls(tuple(e % m for e in M.entries()), m)

    @classmethod
    def identity(cls, m: int) -> ResidueMat2:
        return cls((1 % m, 0, 0, 1 % m), m)

    def __matmul__(self, other: ResidueMat2) -> ResidueMat2:
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        m = self.modulus
        return ResidueMat2(((a * e + b * g) % m, (a * f + b * h) % m,
                            (c * e + d * g) % m, (c * f + d * h) % m), m)

    def __pow__(self, n: int) -> ResidueMat2:
        result, base = ResidueMat2.identity(self.modulus), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def is_identity(self) -> bool:
        return self.entries == ResidueMat2.identity(self.modulus).entries

    def apply(self, u: int, v: int) -> tuple[int, int]:
        a, b, c, d = self.entries
        m = self.modulus
        return (a * u + b * v) % m, (c * u + d * v) % m

    def lift(self) -> Mat2:
        return Mat2(*self.entries)


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, p, q)`` with ``p*a + q*b == g == gcd(a, b) > 0``."""
    if a == 0 and b == 0:
        raise DomainError("ext_gcd(0, 0) is undefined")
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_s, s = s, old_s - k * s
        old_t, t = t, old_t - k * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def bezout_min_q(t1: int, t2: int) -> tuple[int, int]:
    """Bezout pair ``(p, q)`` with ``p*t1 + q*t2 == 1`` and ``|q|`` minimal.

    Ties are broken towards smaller ``|p|``, then positive ``q``.
    """
    g, p, q = ext_gcd(t1, t2)
    if g != 1:
        raise DomainError(f"gcd({t1},{t2}) = {g} != 1")
    if t1 == 0:
        return 0, q
    # general solution: (p + k*t2, q - k*t1)
    k0 = Fraction(q, t1)
    best = None
    for k in (math.floor(k0) - 1, math.floor(k0), math.floor(k0) + 1, math.ceil(k0) + 1):
        cand = (p + k * t2, q - k * t1)
        key = (abs(cand[1]), abs(cand[0]), -cand[1])
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def factorize(m: int) -> dict[int, int]:
    """Prime factorization by trial division (desk-scale inputs)."""
    if m < 1:
        raise DomainError("factorize expects a positive integer")
    out: dict[int, int] = {}
    k = 2
    while k * k <= m:
        while m % k == 0:
            out[k] = out.get(k, 0) + 1
            m //= k
        k += 1 if k == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def euler_phi(m: int) -> int:
    if m < 1:
        raise DomainError("euler_phi is defined for m >= 1")
    result = m
    for p in factorize(m):
        result = result // p * (p - 1)
    return result


def euler_witness(L: int, q: int) -> int:
    """The integer ``n`` with ``L**phi(q) == n*q + 1``."""
    if q < 1:
        raise DomainError("q must be positive")
    if math.gcd(L, q) != 1:
        raise DomainError(f"gcd({L},{q}) != 1")
    n, r = divmod(L ** euler_phi(q) - 1, q)
    assert r == 0
    return n


def is_expanding(M: Mat2) -> bool:
    """Both eigenvalues strictly outside the closed unit disk.

    Schur-Cohn on the reciprocal of ``x^2 - tr x + det``: after making the
    leading coefficient positive this reduces to ``|det| > 1`` and
    ``|tr| < |det + 1|``. Equality cases (a root on the unit circle) fail.
    """
    det, tr = M.det(), M.trace()
    return abs(det) > 1 and abs(tr) < abs(det + 1)


def parse_number(text: str) -> Number:
    return _norm(Fraction(text.strip()))


def parse_matrix(text: str) -> Mat2:
    """Parse ``"a,b;c,d"`` (rows separated by ``;``)."""
    rows = [r for r in text.replace(" ", "").split(";") if r]
    if len(rows) != 2:
        raise DomainError(f"matrix needs two rows: {text!r}")
    vals = [parse_number(x) for r in rows for x in r.split(",")]
    if len(vals) != 4:
        raise DomainError(f"matrix needs four entries: {text!r}")
    return Mat2(*vals)


def parse_vec(text: str) -> QVec2:
    parts = text.strip().split(",")
    if len(parts) != 2:
        raise DomainError(f"vector needs two coordinates: {text!r}")
    return QVec2(parse_number(parts[0]), parse_number(parts[1]))


def fmt_number(x: Number) -> str:
    return str(x)
