"""Affine changes of coordinates and the arithmetic data attached to a digit set."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import DomainError, Mat2, QVec2, bezout_min_q
from .zeros import Coset, DigitSet3


@dataclass(frozen=True)
class Conjugation:
    """``D -> Q D``, ``M -> Q M Q^-1``, ``lambda -> (Q^T)^-1 lambda``.

    A set of frequencies is orthogonal for ``(M, D)`` exactly when its image
    is orthogonal for the transformed pair.
    """

    Q: Mat2

    def __post_init__(self):
        if self.Q.det() == 0:
            raise DomainError("conjugating matrix is singular")

    def digits(self, D: DigitSet3) -> DigitSet3:
        return D.transform(self.Q)

    def matrix(self, M: Mat2) -> Mat2:
        return self.Q @ M @ self.Q.inv()

    def frequency(self, lam: QVec2) -> QVec2:
        return self.Q.T.inv() @ lam

    def inverse(self) -> Conjugation:
        return Conjugation(self.Q.inv())


def conjugate(Q: Mat2, M: Mat2, D: DigitSet3, Lam: Optional[Sequence[QVec2]] = None):
    C = Conjugation(Q)
    lam = None if Lam is None else [C.frequency(x) for x in Lam]
    return C.matrix(M), C.digits(D), lam


def change_basis(A: Mat2, M: Mat2, D: DigitSet3, Lam=None):
    """The ``A^-1 D, A^-1 M A`` form used for the normalizing matrices A_1, A_2, A_3."""
    return conjugate(A.inv(), M, D, Lam)


def normalize_digits(D: DigitSet3) -> tuple[DigitSet3, int]:
    if not D.is_integral():
        raise DomainError("normalization is for integer digit sets")
    g = math.gcd(*(int(e) for e in (*D.alpha, *D.beta)))
    return D.scaled(Fraction(1, g)), g


def three_adic(n: int) -> tuple[int, int]:
    """``n = 3^eta * gamma`` with 3 not dividing gamma."""
    if n == 0:
        raise DomainError("zero has no 3-adic decomposition")
    eta = 0
    while n % 3 == 0:
        n //= 3
        eta += 1
    return eta, n


@dataclass(frozen=True)
class CaseReport:
    case: str  # "i" | "ii"
    eta: int
    delta: int  # of the normalized digit set
    bound: int
    content: int = 1  # gcd of all digit coordinates, divided out first


def _check_inputs(M: Optional[Mat2], D: DigitSet3):
    if not D.is_integral():
        raise DomainError("classification needs an integer digit set")
    if M is not None:
        if not M.is_integral():
            raise DomainError("classification needs an integer matrix")
        if M.det() % 3 == 0:
            raise DomainError("det(M) is divisible by 3; outside the classified range")


def classify(M: Optional[Mat2], D: DigitSet3) -> CaseReport:
    """Case and sharp bound for ``(M, D)``; the digit set is normalized to content 1 first."""
    _check_inputs(M, D)
    D, g = normalize_digits(D)
    a1, a2 = D.alpha
    b1, b2 = D.beta
    delta = int(D.delta())
    eta, _ = three_adic(delta)
    if (2 * a1 - b1) % 3 or (2 * a2 - b2) % 3:
        return CaseReport("i", eta, delta, 9, g)
    return CaseReport("ii", eta, delta, 3 ** (2 * eta), g)


@dataclass(frozen=True)
class TransformData:
    swapped: bool  # True when alpha and beta were relabelled so that 3 does not divide sigma
    alpha: QVec2
    beta: QVec2
    eta: int
    gamma: int
    sigma: int
    t1: int
    t2: int
    p: int
    q: int
    omega: int
    theta: int
    kappa: int
    a: int
    tau: int

    @property
    def U(self) -> Mat2:
        return Mat2(self.t1, -self.q, self.t2, self.p)

    @property
    def A3(self) -> Mat2:
        return self.U * self.gamma

    def prop_case(self) -> str:
        return "ii" if (2 * self.sigma - self.omega) % 3 == 0 else "i"


def transform_data(D: DigitSet3, bezout: Optional[tuple[int, int]] = None) -> TransformData:
    """Arithmetic data for the triangularizing transform.

    ``bezout`` overrides the canonical Bezout pair (any pair with
    ``p*t1 + q*t2 = 1`` is admissible).
    """
    if not D.is_integral():
        raise DomainError("transform data needs an integer digit set")
    swapped = False
    if math.gcd(int(D.alpha.x), int(D.alpha.y)) % 3 == 0:
        D, swapped = D.swapped(), True
        if math.gcd(int(D.alpha.x), int(D.alpha.y)) % 3 == 0:
            raise RuntimeError("both gcd(alpha) and gcd(beta) divisible by 3; digits not normalized")
    a1, a2 = int(D.alpha.x), int(D.alpha.y)
    b1, b2 = int(D.beta.x), int(D.beta.y)
    delta = a1 * b2 - a2 * b1
    eta, gamma = three_adic(delta)
    sigma = math.gcd(a1, a2)
    t1, t2 = a1 // sigma, a2 // sigma
    if bezout is None:
        p, q = bezout_min_q(t1, t2)
    else:
        p, q = bezout
        if p * t1 + q * t2 != 1:
            raise DomainError("supplied pair is not a Bezout pair for (t1, t2)")
    omega = p * b1 + q * b2
    if gamma % sigma:
        raise RuntimeError("sigma does not divide gamma")
    theta = gamma // sigma
    kappa = sigma % 3
    a = (sigma - kappa) // 3
    return TransformData(swapped, D.alpha, D.beta, eta, gamma, sigma, t1, t2, p, q, omega,
                         theta, kappa, a, kappa * sigma)


@dataclass(frozen=True)
class A3Result:
    A3: Mat2
    D3: DigitSet3
    M3: Optional[Mat2]
    data: TransformData


def build_A3(M: Optional[Mat2], D: DigitSet3, bezout=None) -> A3Result:
    """``A_3 = gamma [[t1, -q], [t2, p]]``, ``D_3 = A_3^-1 D``, ``M_3 = A_3^-1 M A_3``."""
    td = transform_data(D, bezout)
    A3 = td.A3
    Dw = DigitSet3(td.alpha, td.beta)
    D3 = Dw.transform(A3.inv())
    expect = DigitSet3(QVec2(Fraction(1, td.theta), 0),
                       QVec2(Fraction(td.omega, td.sigma * td.theta), Fraction(3**td.eta, td.sigma)))
    if D3 != expect:
        raise RuntimeError(f"A_3^-1 D = {D3} differs from the closed form {expect}")
    M3 = None
    if M is not None:
        M3 = A3.inv() @ M @ A3
        if not M3.is_integral():
            raise RuntimeError("M_3 is not integral")
        if M3.det() != M.det() or math.gcd(M3.det(), 3) != math.gcd(M.det(), 3):
            raise RuntimeError("conjugation changed det(M)")
    return A3Result(A3, D3, M3, td)


def verify_prop38(td: TransformData) -> bool:
    """``2 sigma - omega = p(2a1 - b1) + q(2a2 - b2)`` and the case transfer."""
    a1, a2 = td.alpha
    b1, b2 = td.beta
    ok = 2 * td.sigma - td.omega == td.p * (2 * a1 - b1) + td.q * (2 * a2 - b2)
    ok &= td.sigma == td.p * a1 + td.q * a2
    ok &= td.t1 * b2 - td.t2 * b1 == 3**td.eta * td.theta
    case_i = (2 * a1 - b1) % 3 != 0 or (2 * a2 - b2) % 3 != 0
    ok &= ((2 * td.sigma - td.omega) % 3 != 0) == case_i
    return bool(ok)


def refined_residue(td: TransformData) -> Optional[int]:
    """The residue i in {1, 2} with kappa*theta*i = 2 - kappa*omega (mod 3); None in case (ii)."""
    if td.prop_case() == "ii":
        return None
    for i in (1, 2):
        if (td.kappa * td.theta * i - (2 - td.kappa * td.omega)) % 3 == 0:
            return i
    raise RuntimeError("no residue i in {1,2} solves the congruence")


def refined_point(td: TransformData, k1p: int, k2p: int, i: Optional[int]) -> QVec2:
    """``tau*theta*(1/3 + k1', (i + 3k2')/3^(eta+1))`` or, in case (ii), ``.../3^eta``."""
    s = td.tau * td.theta
    if i is None:
        return QVec2(s * (Fraction(1, 3) + k1p), s * Fraction(k2p, 3**td.eta))
    return QVec2(s * (Fraction(1, 3) + k1p), s * Fraction(i + 3 * k2p, 3 ** (td.eta + 1)))


def refined_solution(td: TransformData, k1p: int, k2p: int, i: Optional[int]):
    """Closed-form lattice coordinates ``(k1, k2)`` in Z_0; Fractions if not integral."""
    ks = td.kappa * td.sigma
    k1 = Fraction(ks - 1, 3) + ks * k1p
    base = td.kappa * td.theta * (i or 0) + td.kappa * td.omega - 2
    k2 = Fraction(base, 3) + td.kappa * td.omega * k1p + td.kappa * td.theta * k2p
    return k1, k2


def z0_point(td: TransformData, k1, k2) -> QVec2:
    return QVec2(td.theta * (Fraction(1, 3) + k1),
                 Fraction(2 * td.sigma - td.omega - 3 * td.omega * k1 + 3 * td.sigma * k2,
                          3 ** (td.eta + 1)))


def verify_prop39(td: TransformData, Z0: Coset, k_range: int = 2, i: Optional[int] = None) -> bool:
    """Closed-form integrality plus exact membership over a box of lattice shifts.

    In case (i) the residue defaults to the one predicted by the congruence.
    """
    if td.tau % 3 != 1:
        return False
    if td.prop_case() == "i" and i is None:
        i = refined_residue(td)
    if td.prop_case() == "ii":
        i = None
    rng = range(-k_range, k_range + 1)
    for k1p in rng:
        for k2p in rng:
            x = refined_point(td, k1p, k2p, i)
            k1, k2 = refined_solution(td, k1p, k2p, i)
            if not (isinstance(k1, int) or k1.denominator == 1):
                return False
            if not (isinstance(k2, int) or k2.denominator == 1):
                return False
            if z0_point(td, int(k1), int(k2)) != x:
                return False
            if not Z0.contains(x):
                return False
    return True
