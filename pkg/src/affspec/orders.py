"""Orders of integer 2x2 matrices modulo m, and the lifting facts around them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from .exact import DomainError, Mat2, ResidueMat2, factorize, is_prime

NAIVE_STEPS = 10**6


@dataclass(frozen=True)
class OrderResult:
    modulus: int
    order: int
    # (M**order - I) / modulus over Z, filled in on request only
    excess: Optional[Mat2] = None


def gl2_order(m: int) -> int:
    """|GL(2, Z/mZ)|."""
    n = 1
    for p, s in factorize(m).items():
        n *= (p * p - 1) * (p * p - p) * p ** (4 * (s - 1))
    return n


def _refine_by_divisors(R: ResidueMat2, group_order: int) -> int:
    order = group_order
    for r in factorize(group_order):
        while order % r == 0 and (R ** (order // r)).is_identity():
            order //= r
    return order


def order_mod(M: Mat2, m: int, with_excess: bool = False) -> OrderResult:
    """Least e >= 1 with M^e = I (mod m)."""
    if m < 1:
        raise DomainError("modulus must be positive")
    if math.gcd(M.det(), m) != 1:
        raise DomainError(f"matrix is not invertible modulo {m}")
    R = M.mod(m)
    P, k = R, 1
    cap = m**4
    while not P.is_identity():
        if k >= NAIVE_STEPS:
            k = _refine_by_divisors(R, gl2_order(m))
            break
        P = P @ R
        k += 1
        if k > cap:
            raise RuntimeError(f"order of {M} mod {m} exceeded the group bound")
    excess = None
    if with_excess:
        X = (M**k) - Mat2.identity()
        excess = Mat2(*(e // m for e in X.entries()))
        assert excess * m == X
    return OrderResult(m, k, excess)


def _polymulmod(f, g, mod_poly, p):
    # coefficient lists, lowest degree first; mod_poly is monic
    prod = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            prod[i + j] = (prod[i + j] + x * y) % p
    n = len(mod_poly) - 1
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] = (prod[k - n + i] - c * mod_poly[i]) % p
    out = prod[:n] + [0] * (n - len(prod[:n]))
    return out


def poly_order(coeffs, p: int) -> int:
    """ord_p(f): least n >= 1 with f | x^n - 1 over F_p.

    ``coeffs`` lists the coefficients of a monic f, lowest degree first.
    """
    coeffs = [c % p for c in coeffs]
    if coeffs[-1] != 1:
        raise DomainError("polynomial must be monic")
    if coeffs[0] == 0:
        raise DomainError("f(0) = 0 mod p; the order is undefined")
    n = len(coeffs) - 1
    if n == 0:
        return 1
    one = [1] + [0] * (n - 1)
    x = ([0, 1] + [0] * n)[:n] if n > 1 else [(-coeffs[0]) % p]
    cur, k = x, 1
    while cur != one:
        cur = _polymulmod(cur, x, coeffs, p)
        k += 1
        if k > p**n:
            raise RuntimeError("polynomial order search overran p^n")
    return k


def minimal_poly_mod(M: Mat2, p: int) -> list[int]:
    """Minimal polynomial of M over F_p (degree 1 iff M is scalar mod p)."""
    a, b, c, d = (e % p for e in M.entries())
    if b == 0 and c == 0 and a == d:
        return [(-a) % p, 1]
    return char_poly_mod(M, p)


def char_poly_mod(M: Mat2, p: int) -> list[int]:
    return [M.det() % p, (-M.trace()) % p, 1]


def char_poly_order(M: Mat2, p: int, minimal: bool = True) -> int:
    """Order of the minimal (default) or characteristic polynomial of M over F_p.

    Only the minimal polynomial's order equals O_p(M) in general; the two
    coincide unless M is scalar mod p.
    """
    f = minimal_poly_mod(M, p) if minimal else char_poly_mod(M, p)
    if f[0] == 0:
        raise DomainError("matrix is singular mod p")
    return poly_order(f, p)


def is_ergodic(M: Mat2, p: int) -> bool:
    """Direct check: every nonzero v in F_p^2 sweeps all of F_p^2 minus 0."""
    if M.det() % p == 0:
        raise DomainError("matrix is not invertible mod p")
    R = M.mod(p)
    target = p * p - 1
    result = True
    for v in itertools.product(range(p), repeat=2):
        if v == (0, 0):
            continue
        seen = set()
        u = v
        for _ in range(target):
            u = R.apply(*u)
            seen.add(u)
        if len(seen) != target or (0, 0) in seen:
            result = False
            break
    if result != (order_mod(M, p).order == target):
        raise RuntimeError(f"ergodicity and order disagree for {M} mod {p}")
    return result


def find_generator(p: int, search_limit: int = 10**6) -> Mat2:
    """First matrix (lexicographic entries in [0,p)) of order p^2 - 1 mod p."""
    target = p * p - 1
    for n, ent in enumerate(itertools.product(range(p), repeat=4)):
        if n >= search_limit:
            break
        M = Mat2(*ent)
        if M.det() % p and order_mod(M, p).order == target:
            return M
    raise LookupError(f"no matrix of order {target} found within {search_limit} candidates")


def _excess_mod(B: Mat2, n: int, k: int, p: int) -> tuple:
    """Entries of (B^n - I)/p^k reduced mod p (requires B^n = I mod p^k)."""
    m = p ** (k + 1)
    R = B.mod(m) ** n
    X = (R.lift() - Mat2.identity()).entries()
    out = []
    for e in X:
        e %= m
        if e % p**k:
            raise RuntimeError(f"B^{n} is not congruent to I mod {p}^{k}")
        out.append((e // p**k) % p)
    return tuple(out)


def thm31_least_exponent(B: Mat2, p: int, s: int, i0: Optional[int] = None) -> tuple[int, Mat2]:
    """Least e with B^e = p*A~ + I and A~[i0] = 0 mod p^(s-1), plus A-check.

    ``i0`` indexes the entries row-major from 0 (so ``i0=1`` is the upper
    right entry). Returns ``(e, A_check)`` where ``B^(p^(s-1)) = p^s A_check + I``
    and ``A_check`` is reduced mod p.
    """
    if not (is_prime(p) and s >= 1):
        raise DomainError("need a prime p and s >= 1")
    X = (B - Mat2.identity()).entries()
    if not B.is_integral() or any(e % p for e in X):
        raise DomainError("B is not of the form p*A + I")
    A = [e // p for e in X]
    if i0 is None:
        i0 = next((i for i, e in enumerate(A) if e % p), None)
        if i0 is None:
            raise DomainError("every entry of A is divisible by p")
    if A[i0] % p == 0:
        raise DomainError(f"A[{i0}] is divisible by p")
    m = p**s
    R = B.mod(m)
    P, e = R, 1
    limit = p ** (s - 1)
    while True:
        entry = P.entries[i0] - (1 if i0 in (0, 3) else 0)
        # p * A~[i0] = entry (mod p^s); condition is A~[i0] = 0 mod p^(s-1)
        if entry % m == 0:
            break
        if e >= limit:
            raise RuntimeError("least exponent exceeded p^(s-1); binomial lifting violated")
        P = P @ R
        e += 1
    check = Mat2(*_excess_mod(B, limit, s, p))
    return e, check


@dataclass
class OrderLiftReport:
    p: int
    s: int
    iota: int
    k: int
    bound: int
    A_mod_p: Mat2
    sharp_expected: bool
    divides: bool
    holds: bool


def thm33_verify(M: Mat2, p: int, s: int) -> OrderLiftReport:
    if math.gcd(M.det(), p) != 1:
        raise DomainError("gcd(det M, p) != 1")
    iota = order_mod(M, p).order
    k = order_mod(M, p**s).order
    A = Mat2(*_excess_mod(M, iota, 1, p))
    bound = iota * p ** (s - 1)
    sharp = any(e % p for e in A.entries())
    holds = k <= bound and (k == bound if sharp else True) and k % iota == 0
    return OrderLiftReport(p, s, iota, k, bound, A, sharp, k % iota == 0, holds)


@dataclass
class M0Construction:
    """Expanding integer matrix whose transpose satisfies the orbit hypotheses."""

    p: int
    generator: Mat2
    repaired: bool
    n: int
    measure_matrix: Mat2  # M_0, the matrix of the self-affine measure
    orbit_matrix: Mat2  # M_0^*, the matrix acting on frequencies
    excess: tuple = field(default_factory=tuple)


def upper_right_excess(T: Mat2, p: int) -> tuple:
    """Entries (mod p) of A with T^(p^2-1) = p A + I."""
    return _excess_mod(T, p * p - 1, 1, p)


def orbit_hypotheses(T: Mat2, p: int) -> bool:
    """O_p(T) = p^2 - 1 and the upper-right entry of (T^(p^2-1) - I)/p is a unit."""
    if not is_prime(p) or p < 3 or math.gcd(T.det(), p) != 1:
        return False
    if order_mod(T, p).order != p * p - 1:
        return False
    return upper_right_excess(T, p)[1] % p != 0


def construct_m0(p: int) -> M0Construction:
    """Deterministic version of the existence argument for the sharp matrix.

    Scan for a generator of maximal order; if both off-diagonal entries of
    its excess vanish mod p, shift by p*I. Then scale by p^2 n + 1 (smallest
    n >= 0 giving an expanding matrix) and transpose if needed so that the
    frequency-side matrix has a unit upper-right excess entry.
    """
    from .exact import is_expanding

    if not is_prime(p) or p < 3:
        raise DomainError("construction needs a prime p >= 3")
    G = find_generator(p)
    base, repaired = G, False
    ex = upper_right_excess(base, p)
    if ex[1] % p == 0 and ex[2] % p == 0:
        base, repaired = G + Mat2.scalar(p), True
        ex = upper_right_excess(base, p)
        if ex[1] % p == 0 and ex[2] % p == 0:
            raise RuntimeError("repair by p*I did not produce a unit off-diagonal entry")
    n = 0
    while not is_expanding(base * (p * p * n + 1)):
        n += 1
    Mt = base * (p * p * n + 1)
    ex = upper_right_excess(Mt, p)
    T = Mt if ex[1] % p else Mt.T
    assert orbit_hypotheses(T, p)
    return M0Construction(p, G, repaired, n, T.T, T, upper_right_excess(T, p))
