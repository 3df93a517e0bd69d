"""Three-element digit sets and the exact zero set of their mask polynomial.

For ``D = {0, a, b}`` the mask ``(1 + e(<a,x>) + e(<b,x>))/3`` vanishes iff
``(<a,x>, <b,x>)`` is congruent to ``(1/3, 2/3)`` or ``(2/3, 1/3)`` mod Z^2.
Writing ``A = [a | b]`` this solves to two cosets ``A^-T(theta + Z^2)``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exact import DomainError, Mat2, QVec2, as_fraction, parse_vec

THIRD = Fraction(1, 3)
TWO_THIRDS = Fraction(2, 3)


@dataclass(frozen=True)
class DigitSet3:
    """``{0, alpha, beta}``; entries may be rational."""

    alpha: QVec2
    beta: QVec2

    def __post_init__(self):
        if self.delta() == 0:
            raise DomainError("digit set is degenerate: alpha1*beta2 - alpha2*beta1 = 0")

    @classmethod
    def of(cls, a1, a2, b1, b2) -> DigitSet3:
        return cls(QVec2(a1, a2), QVec2(b1, b2))

    @classmethod
    def parse(cls, text: str) -> DigitSet3:
        """Accepts ``"a1,a2;b1,b2"`` or ``"a1,a2 b1,b2"``; fractions as ``n/d``."""
        parts = [s for s in text.replace(";", " ").split() if s]
        if len(parts) != 2:
            raise DomainError(f"need exactly two nonzero digits: {text!r}")
        return cls(parse_vec(parts[0]), parse_vec(parts[1]))

    def __str__(self) -> str:
        a, b = self.alpha, self.beta
        return f"{a.x},{a.y};{b.x},{b.y}"

    def digits(self) -> list[QVec2]:
        return [QVec2.zero(), self.alpha, self.beta]

    def delta(self):
        return self.alpha.x * self.beta.y - self.alpha.y * self.beta.x

    def matrix(self) -> Mat2:
        """Columns alpha, beta."""
        return Mat2.from_columns(self.alpha, self.beta)

    def is_integral(self) -> bool:
        return self.alpha.is_integral() and self.beta.is_integral()

    def transform(self, Q: Mat2) -> DigitSet3:
        return DigitSet3(Q @ self.alpha, Q @ self.beta)

    def scaled(self, k) -> DigitSet3:
        return DigitSet3(self.alpha * k, self.beta * k)

    def swapped(self) -> DigitSet3:
        return DigitSet3(self.beta, self.alpha)


def mask_eval_numeric(digits: Sequence[QVec2], x: QVec2) -> complex:
    """Mask polynomial in double precision (phases reduced mod 1 exactly first)."""
    total = 0j
    for d in digits:
        t = as_fraction(d.dot(x)) % 1
        total += cmath.exp(2j * math.pi * float(t))
    return total / len(digits)


def is_zero_3digit(D: DigitSet3, x: QVec2) -> bool:
    t1 = as_fraction(D.alpha.dot(x)) % 1
    t2 = as_fraction(D.beta.dot(x)) % 1
    return (t1, t2) in ((THIRD, TWO_THIRDS), (TWO_THIRDS, THIRD))


@dataclass(frozen=True)
class Coset:
    """``offset + basis * Z^2``."""

    offset: QVec2
    basis: Mat2

    def coords(self, z: QVec2) -> QVec2:
        return self.basis.inv() @ (z - self.offset)

    def contains(self, z: QVec2) -> bool:
        return self.coords(z).is_integral()

    def point(self, k1: int, k2: int) -> QVec2:
        return self.offset + self.basis @ QVec2(k1, k2)

    def contains_translate(self, x: QVec2, scale: int = 1) -> bool:
        """Whether ``scale * (x + Z^2)`` lies inside the coset."""
        if not self.contains(x * scale):
            return False
        Binv = self.basis.inv() * scale
        return Binv.is_integral()


@dataclass(frozen=True)
class ZeroSetDescription:
    cosets: tuple
    min_norm: Fraction

    def contains(self, z: QVec2) -> bool:
        return any(c.contains(z) for c in self.cosets)

    def locate(self, z: QVec2) -> Optional[tuple[int, QVec2]]:
        for i, c in enumerate(self.cosets):
            k = c.coords(z)
            if k.is_integral():
                return i, k
        return None


def gauss_reduce(B: Mat2) -> Mat2:
    """Lagrange-Gauss reduction of the column basis (same lattice, short columns)."""
    b1, b2 = B.columns()
    while True:
        if b1.dot(b1) > b2.dot(b2):
            b1, b2 = b2, b1
        mu = round(as_fraction(b1.dot(b2)) / as_fraction(b1.dot(b1)))
        if mu == 0:
            return Mat2.from_columns(b1, b2)
        b2 = b2 - b1 * mu


def _row_radius(Binv: Mat2, row: int, best: Fraction) -> Fraction:
    r = Binv.rows()[row]
    return (abs(as_fraction(r[0])) + abs(as_fraction(r[1]))) * best


def _coset_min_norm(c: Coset) -> Fraction:
    B = gauss_reduce(c.basis)
    Binv = B.inv()
    u = Binv @ c.offset
    r1, r2 = round(as_fraction(u.x)), round(as_fraction(u.y))
    best = (c.offset - B @ QVec2(r1, r2)).norm_inf()
    # the outer loop runs over the coefficient with the narrower range; for
    # each value the other coefficient's feasible interval is solved exactly
    rad = [_row_radius(Binv, i, best) for i in (0, 1)]
    outer = 0 if rad[0] <= rad[1] else 1
    cols = B.columns()
    bo, bi = cols[outer], cols[1 - outer]
    uo = as_fraction((u.x, u.y)[outer])
    for ko in range(math.floor(-uo - rad[outer]), math.ceil(-uo + rad[outer]) + 1):
        base = c.offset + bo * ko
        lo, hi = None, None
        for comp in (0, 1):
            b = as_fraction((bi.x, bi.y)[comp])
            z = as_fraction((base.x, base.y)[comp])
            if b == 0:
                continue
            a1, a2 = (-best - z) / b, (best - z) / b
            a1, a2 = min(a1, a2), max(a1, a2)
            lo = a1 if lo is None else max(lo, a1)
            hi = a2 if hi is None else min(hi, a2)
        for ki in range(math.floor(lo), math.ceil(hi) + 1):
            n = (base + bi * ki).norm_inf()
            if n < best:
                best = n
    return best


def zero_cosets_3digit(D: DigitSet3) -> ZeroSetDescription:
    """Exact zero set of the mask of ``D`` as two lattice cosets."""
    W = D.matrix().T.inv()
    cosets = tuple(
        Coset(W @ QVec2(t1, t2), W) for t1, t2 in ((THIRD, TWO_THIRDS), (TWO_THIRDS, THIRD))
    )
    min_norm = min(_coset_min_norm(c) for c in cosets)
    assert min_norm > 0
    return ZeroSetDescription(cosets, min_norm)


def _subgroup_mod1(gens: Iterable[QVec2]) -> set[QVec2]:
    gens = [g.frac() for g in gens]
    seen = {QVec2.zero()}
    frontier = [QVec2.zero()]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = (v + g).frac()
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def coset_residues(c: Coset) -> frozenset:
    """The finite image of a rational coset in the torus R^2/Z^2."""
    H = _subgroup_mod1(c.basis.columns())
    return frozenset((c.offset + h).frac() for h in H)


def zero_residues(Z: ZeroSetDescription) -> frozenset:
    out = set()
    for c in Z.cosets:
        out |= coset_residues(c)
    return frozenset(out)


def zd2_slice(D: DigitSet3, q: int) -> frozenset:
    """Zeros of the mask in ``(1/q)Z^2 ∩ [0,1)^2``."""
    return frozenset(
        QVec2(Fraction(u, q), Fraction(v, q))
        for u, v in itertools.product(range(q), repeat=2)
        if is_zero_3digit(D, QVec2(Fraction(u, q), Fraction(v, q)))
    )


def containment_in_E(Z: ZeroSetDescription, p: int, eta: int = 1) -> bool:
    """Whether every zero lies in the punctured grid of denominator p^eta mod Z^2."""
    q = p**eta
    for c in Z.cosets:
        for v in (c.offset, *c.basis.columns()):
            if q % v.denominator():
                return False
        if QVec2.zero() in coset_residues(c):
            return False
    return True
