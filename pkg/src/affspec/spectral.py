"""Exact orthogonality of exponentials for planar self-affine measures.

A difference xi lies in the zero set of the Fourier transform iff some
``(M^T)^-j xi`` (j >= 1) is a zero of the mask. Membership is decided by
iterating the inverse transpose exactly and testing each iterate against the
coset description of the mask zeros; refutation uses the fact that the
iterates eventually stay inside a ball that contains no zero.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .exact import DomainError, Mat2, QVec2, as_fraction, euler_phi, is_expanding
from .orbits import grid_points, to_qvec
from .zeros import DigitSet3, ZeroSetDescription, coset_residues, zero_cosets_3digit

CONTRACTION_SEARCH = 10_000


@dataclass(frozen=True)
class Frequency:
    """``scale * direction``, with the scale kept symbolic."""

    scale: int
    direction: QVec2

    def vector(self) -> QVec2:
        return self.direction * self.scale

    def __sub__(self, other: Frequency) -> Frequency:
        if self.scale == other.scale:
            return Frequency(self.scale, self.direction - other.direction)
        return Frequency(1, self.vector() - other.vector())

    def is_zero(self) -> bool:
        return self.scale == 0 or self.direction == QVec2.zero()

    def transformed(self, Q: Mat2) -> Frequency:
        return Frequency(self.scale, Q @ self.direction)


def _int_vec(v: QVec2) -> tuple[int, int, int]:
    fx, fy = as_fraction(v.x), as_fraction(v.y)
    den = math.lcm(fx.denominator, fy.denominator)
    return int(fx * den), int(fy * den), den


class _InverseStepper:
    """Iterates ``v -> (M^T)^-1 v`` on integer numerators over a common denominator."""

    def __init__(self, M: Mat2):
        Mt = M.T
        adj = Mt.adj()
        det = as_fraction(Mt.det())
        ad = math.lcm(*(as_fraction(e).denominator for e in adj.entries()))
        self.adj = tuple(int(as_fraction(e) * ad) for e in adj.entries())
        # (M^T)^-1 v = adj v / det = (adj_int v) * det.den / (ad * det.num)
        self.num_mul = det.denominator
        self.den_mul = ad * det.numerator

    def step(self, w1: int, w2: int, den: int) -> tuple[int, int, int]:
        a, b, c, d = self.adj
        w1, w2 = (a * w1 + b * w2) * self.num_mul, (c * w1 + d * w2) * self.num_mul
        den *= self.den_mul
        if den < 0:
            w1, w2, den = -w1, -w2, -den
        g = math.gcd(math.gcd(w1, w2), den)
        if g > 1:
            w1, w2, den = w1 // g, w2 // g, den // g
        return w1, w2, den


def contraction_constant(M: Mat2) -> Fraction:
    """``C >= sup_k ||(M^T)^-k||`` in the max-norm, computed exactly.

    Finds K with ``||(M^T)^-K|| <= 1/2``; then every power is bounded by the
    largest of the first K powers.
    """
    if not is_expanding(M):
        raise DomainError("matrix is not expanding")
    Ninv = M.T.inv()
    P = Mat2.identity()
    C = Fraction(1)
    for _ in range(CONTRACTION_SEARCH):
        P = P @ Ninv
        n = P.norm_inf()
        if n <= Fraction(1, 2):
            return C
        C = max(C, n)
    raise RuntimeError("no contracting power found; matrix too close to the unit circle")


@dataclass(frozen=True)
class Membership:
    status: str  # witness | refuted | inconclusive
    j: Optional[int] = None
    coset: Optional[int] = None
    coords: Optional[QVec2] = None
    steps: int = 0


class ZeroTester:
    """Precomputed exact data for repeated membership queries on one (M, D)."""

    def __init__(self, M: Mat2, Z: ZeroSetDescription):
        self.M = M
        self.Z = Z
        self.stepper = _InverseStepper(M)
        self.C = contraction_constant(M)
        self._cosets = []
        for c in Z.cosets:
            Binv = c.basis.inv()
            rd = math.lcm(*(as_fraction(e).denominator for e in Binv.entries()))
            Rn = tuple(int(as_fraction(e) * rd) for e in Binv.entries())
            o1, o2, od = _int_vec(c.offset)
            self._cosets.append((Rn, rd, o1, o2, od))

    def _locate(self, w1: int, w2: int, den: int):
        for idx, (Rn, rd, o1, o2, od) in enumerate(self._cosets):
            x1 = w1 * od - o1 * den
            x2 = w2 * od - o2 * den
            m = rd * den * od
            k1, r1 = divmod(Rn[0] * x1 + Rn[1] * x2, m)
            if r1:
                continue
            k2, r2 = divmod(Rn[2] * x1 + Rn[3] * x2, m)
            if r2:
                continue
            return idx, QVec2(k1, k2)
        return None

    def test(self, xi: QVec2, j_max: Optional[int] = None, norm_factor: Fraction = Fraction(1)
             ) -> Membership:
        if xi == QVec2.zero():
            raise DomainError("xi = 0 is never a zero of the Fourier transform")
        w1, w2, den = _int_vec(xi)
        if j_max is None:
            j_max = 64 * max(1, max(abs(w1), abs(w2)).bit_length())
        threshold = self.Z.min_norm * norm_factor / self.C
        for j in range(1, j_max + 1):
            w1, w2, den = self.stepper.step(w1, w2, den)
            hit = self._locate(w1, w2, den)
            if hit is not None:
                return Membership("witness", j, hit[0], hit[1], j)
            if Fraction(max(abs(w1), abs(w2)), den) < threshold:
                return Membership("refuted", steps=j)
        return Membership("inconclusive", steps=j_max)


def zero_membership(xi, M: Mat2, Z: ZeroSetDescription, j_max: Optional[int] = None) -> Membership:
    if isinstance(xi, Frequency):
        xi = xi.vector()
    return ZeroTester(M, Z).test(xi, j_max)


@dataclass
class PairWitness:
    i: int
    k: int
    status: str
    j: Optional[int] = None
    coset: Optional[int] = None
    coords: Optional[QVec2] = None


@dataclass
class OrthoCertificate:
    M: Mat2
    D: DigitSet3
    frequencies: list
    pairs: list

    @property
    def complete(self) -> bool:
        return all(p.status == "witness" for p in self.pairs)

    def counts(self) -> dict:
        out = {"witness": 0, "refuted": 0, "inconclusive": 0}
        for p in self.pairs:
            out[p.status] += 1
        return out


def verify_orthogonal(Lam: Sequence[Frequency], M: Mat2, D: DigitSet3,
                      j_max: Optional[int] = None, workers: int = 1) -> OrthoCertificate:
    vecs = [f.vector() for f in Lam]
    if len(set(vecs)) != len(vecs):
        raise DomainError("frequencies must be distinct")
    Z = zero_cosets_3digit(D)
    tester = ZeroTester(M, Z)
    idx = list(itertools.combinations(range(len(Lam)), 2))
    diffs = [(Lam[i] - Lam[k]).vector() for i, k in idx]
    if workers > 1 and len(diffs) > 64:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_test_one, [(M, Z, d, j_max) for d in diffs], chunksize=32))
    else:
        results = [tester.test(d, j_max) for d in diffs]
    pairs = [PairWitness(i, k, r.status, r.j, r.coset, r.coords) for (i, k), r in zip(idx, results)]
    return OrthoCertificate(M, D, list(Lam), pairs)


def _test_one(args):
    M, Z, d, j_max = args
    return ZeroTester(M, Z).test(d, j_max)


def recheck_certificate(cert: OrthoCertificate) -> bool:
    """Independent re-validation of every witness with plain rational arithmetic."""
    Z = zero_cosets_3digit(cert.D)
    Minv = cert.M.T.inv()
    for w in cert.pairs:
        if w.status != "witness":
            continue
        xi = (cert.frequencies[w.i] - cert.frequencies[w.k]).vector()
        v = (Minv ** w.j) @ xi
        c = Z.cosets[w.coset]
        if c.point(w.coords.x, w.coords.y) != v:
            return False
    return True


@dataclass
class BoundCertificate:
    M: Mat2
    D: DigitSet3
    zprime: tuple
    zero_excluded: bool
    zeros_covered: bool
    stable: bool
    bound: int
    uncovered: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.zero_excluded and self.zeros_covered and self.stable and len(self.zprime) > 0


def upper_bound_certificate(M: Mat2, D: DigitSet3, zprime) -> BoundCertificate:
    """Checks for the finite-invariant-set bound ``|Z'| + 1``."""
    if not M.is_integral():
        raise DomainError("the bound argument needs an integer matrix")
    zp = tuple(sorted({x.frac() for x in zprime}, key=lambda v: (v.x, v.y)))
    S = set(zp)
    Z = zero_cosets_3digit(D)
    uncovered = []
    for c in Z.cosets:
        uncovered.extend(r for r in sorted(coset_residues(c), key=lambda v: (v.x, v.y)) if r not in S)
    Mt = M.T
    stable = all((Mt @ z).frac() in S for z in zp)
    return BoundCertificate(M, D, zp, QVec2.zero() not in S, not uncovered, stable,
                            len(zp) + 1, uncovered)


def invariant_closure(M: Mat2, D: DigitSet3) -> frozenset:
    """Smallest M^T-stable set mod Z^2 containing every mask zero residue."""
    from .zeros import zero_residues

    Mt = M.T
    todo = list(zero_residues(zero_cosets_3digit(D)))
    seen = set(todo)
    while todo:
        z = (Mt @ todo.pop()).frac()
        if z not in seen:
            seen.add(z)
            todo.append(z)
    return frozenset(seen)


@dataclass
class Dichotomy:
    q: int
    reaches: bool
    zeros: frozenset
    union: frozenset


def lemma37_dichotomy(M: Mat2, D: DigitSet3, q: int) -> Dichotomy:
    """Sweep the grid zeros by powers of M^T and compare with the punctured grid."""
    from .orbits import orbit_union
    from .zeros import containment_in_E, zd2_slice

    if not (M.is_integral() and D.is_integral()):
        raise DomainError("integer M and D required")
    if math.gcd(M.det(), q) != 1:
        raise DomainError(f"gcd(det M, {q}) != 1")
    if not containment_in_E(zero_cosets_3digit(D), q, 1):
        raise DomainError(f"mask zeros are not contained in the punctured {q}-grid")
    zs = zd2_slice(D, q)
    if not zs:
        raise DomainError("no mask zeros on the grid")
    U = orbit_union(M.T, sorted(zs, key=lambda v: (v.x, v.y)), q, q * q - 1)
    full = frozenset(to_qvec(u, v, q) for u, v in grid_points(q, punctured=True))
    return Dichotomy(q, U == full, zs, U)


def grid_frequencies(scale: int, q: int) -> list[Frequency]:
    return [Frequency(scale, to_qvec(u, v, q)) for u, v in grid_points(q)]


def construct_lambda_thm12(M0: Mat2, D: DigitSet3, p: int, eta: int, N: int,
                           extra: int = 0) -> list[Frequency]:
    """``N * L^(phi(p^eta)(p^2-1)p^(eta-1) + extra) * E_(p^eta)``, L = det M0.

    Refuses unless the orbit hypotheses hold for M0^T and
    ``N (A_p(eta) + Z^2)`` is contained in the mask zeros.
    """
    from .exact import is_prime
    from .orbits import gen_A
    from .orders import orbit_hypotheses

    if not is_prime(p) or p < 3:
        raise DomainError("sharpness construction is only available for primes p >= 3")
    if N % p == 0:
        raise DomainError("N must not be divisible by p")
    if not is_expanding(M0) or not M0.is_integral():
        raise DomainError("M0 must be an expanding integer matrix")
    if not orbit_hypotheses(M0.T, p):
        raise DomainError("M0^T does not satisfy the orbit hypotheses")
    Z = zero_cosets_3digit(D)
    for a in gen_A(p, eta).points:
        if not any(c.contains_translate(a, N) for c in Z.cosets):
            raise DomainError(f"N*({a} + Z^2) is not inside the mask zero set")
    L = M0.det()
    K = euler_phi(p**eta) * (p * p - 1) * p ** (eta - 1) + extra
    return grid_frequencies(N * L**K, p**eta)


def construct_lambda_case2(M3: Mat2, D3: DigitSet3, tau_theta: int, eta: int,
                           residue: int) -> list[Frequency]:
    """``L^(2*3^eta*8*3^eta) * tau*theta * E`` with E the 3x3 block at denominator 3^(eta+1)."""
    from .orbits import gen_A
    from .orders import orbit_hypotheses

    if not is_expanding(M3) or not M3.is_integral():
        raise DomainError("M3 must be an expanding integer matrix")
    if not orbit_hypotheses(M3.T, 3):
        raise DomainError("M3^T does not satisfy the orbit hypotheses at p = 3")
    Z = zero_cosets_3digit(D3)
    for a in gen_A(3, eta + 1, residue).points:
        if not Z.cosets[0].contains_translate(a, tau_theta):
            raise DomainError(f"tau*theta*({a} + Z^2) is not inside Z_0")
    L = M3.det()
    scale = L ** (2 * 3**eta * 8 * 3**eta) * tau_theta
    q = 3 ** (eta + 1)
    return [Frequency(scale, to_qvec(u, v, q)) for u, v in itertools.product(range(3), repeat=2)]


def construct_lambda_grid_sweep(M: Mat2, D: DigitSet3, q: int) -> list[Frequency]:
    """``L^(phi(q)(q^2-1)) * E_q`` when the grid zeros sweep the whole punctured grid."""
    dic = lemma37_dichotomy(M, D, q)
    if not dic.reaches:
        raise DomainError("zeros do not sweep the punctured grid; no q^2 family from this route")
    return grid_frequencies(M.det() ** (euler_phi(q) * (q * q - 1)), q)


def verify_orbit_containment(M: Mat2, q: int, lam: QVec2, j: int, shift: QVec2) -> bool:
    """``L^(phi(q) j) (M^Tj lam + n)`` lies in ``M^Tj (lam + Z^2)``."""
    L = M.det()
    Mt = M.T
    P = Mt**j
    x = ((P @ lam) + shift) * (L ** (euler_phi(q) * j))
    back = P.inv() @ x
    return (back - lam).is_integral()


def mu_hat_numeric(xi, M: Mat2, D, depth: int = 64) -> complex:
    """Truncated infinite product for the Fourier transform, in floating point.

    Iterates are exact; only the final phases are rounded.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if isinstance(xi, Frequency):
        xi = xi.vector()
    digits = D.digits() if isinstance(D, DigitSet3) else list(D)
    ints = [_int_vec(d) for d in digits]
    stepper = _InverseStepper(M)
    w1, w2, den = _int_vec(xi)
    total = 1 + 0j
    for _ in range(depth):
        w1, w2, den = stepper.step(w1, w2, den)
        acc = 0j
        for d1, d2, dd in ints:
            m = dd * den
            t = (d1 * w1 + d2 * w2) % m
            acc += cmath.exp(2j * math.pi * float(Fraction(t, m)))
        total *= acc / len(ints)
        if total == 0:
            break
    return total
