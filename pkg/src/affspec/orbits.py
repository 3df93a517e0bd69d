"""Orbits of grid frequencies under an integer matrix, modulo Z^2.

Points of the grid ``(1/q) Z^2 / Z^2`` are handled internally as integer
pairs ``(u, v)`` in ``[0, q)^2``; conversion to ``QVec2`` happens only at the
API boundary. A point's stratum (the exact power ``p^s`` of its denominator)
is read off from ``gcd(u, v, q)``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact import DomainError, Mat2, QVec2, is_prime
from .orders import order_mod, orbit_hypotheses


def to_qvec(u: int, v: int, q: int) -> QVec2:
    return QVec2(Fraction(u, q), Fraction(v, q))


def from_qvec(x: QVec2, q: int) -> tuple[int, int]:
    y = x * q
    if not y.is_integral():
        raise DomainError(f"{x} is not on the grid of denominator {q}")
    return y.x % q, y.y % q


@dataclass(frozen=True)
class FrequencySet:
    q: int
    points: tuple  # canonical QVec2, ordered

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, x) -> bool:
        return x in set(self.points)


def grid_points(q: int, punctured: bool = False) -> list[tuple[int, int]]:
    pts = list(itertools.product(range(q), repeat=2))
    return pts[1:] if punctured else pts


def gen_E(q: int, punctured: bool = False) -> FrequencySet:
    if q < 1:
        raise DomainError("q must be positive")
    return FrequencySet(q, tuple(to_qvec(u, v, q) for u, v in grid_points(q, punctured)))


def seed_ls(p: int, s: int, residue: Optional[int] = None) -> list[int]:
    ls = range(p**s)
    if residue is None:
        return list(ls)
    return [l for l in ls if l % 3 == residue]


def gen_A(p: int, s: int, residue: Optional[int] = None) -> FrequencySet:
    """Seed columns ``(p^(s-1), l)/p^s``; ``residue`` selects l = 3k + i (p = 3 only)."""
    if p < 2 or s < 1:
        raise DomainError("need p >= 2 and s >= 1")
    if residue is not None and (p != 3 or residue not in (0, 1, 2)):
        raise DomainError("residue classes are defined for p = 3 and i in {0,1,2}")
    q = p**s
    return FrequencySet(q, tuple(to_qvec(p ** (s - 1), l, q) for l in seed_ls(p, s, residue)))


def t_set(p: int, s: int) -> list[int]:
    return [l for l in range(p**s) if l % p]


def _orbit_pairs(R, start: tuple[int, int], steps: int) -> list[tuple[int, int]]:
    out, seen = [], set()
    u = start
    for _ in range(steps):
        u = R.apply(*u)
        if u not in seen:
            seen.add(u)
            out.append(u)
    return out


def _check_prime_power_setup(M: Mat2, p: int, s: int) -> int:
    if not is_prime(p) or s < 1:
        raise DomainError("need a prime p and s >= 1")
    if math.gcd(M.det(), p) != 1:
        raise DomainError("gcd(det M, p) != 1")
    return order_mod(M, p).order


def orbit(M: Mat2, p: int, s: int, l: int, iota: Optional[int] = None) -> tuple:
    """B_{p,s}(l): distinct points of ``M^j (p^(s-1), l)/p^s``, j = 1..iota*p^(s-1)."""
    if l % p == 0 or not 0 <= l < p**s:
        raise DomainError(f"l = {l} is not in T_(p,s)")
    if iota is None:
        iota = _check_prime_power_setup(M, p, s)
    q = p**s
    R = M.mod(q)
    pairs = _orbit_pairs(R, (p ** (s - 1), l), iota * p ** (s - 1))
    return tuple(to_qvec(u, v, q) for u, v in pairs)


@dataclass
class OrbitPartition:
    p: int
    s: int
    M: Mat2
    iota: int
    orbit_of: dict  # l -> frozenset of (u, v) pairs at denominator p^s
    classes: list  # list of tuples of l, sorted

    def orbit_points(self, l: int) -> frozenset:
        q = self.p**self.s
        return frozenset(to_qvec(u, v, q) for u, v in self.orbit_of[l])


def partition(M: Mat2, p: int, s: int) -> OrbitPartition:
    iota = _check_prime_power_setup(M, p, s)
    q = p**s
    R = M.mod(q)
    steps = iota * p ** (s - 1)
    orbit_of = {l: frozenset(_orbit_pairs(R, (p ** (s - 1), l), steps)) for l in t_set(p, s)}
    by_orbit: dict = {}
    for l, B in orbit_of.items():
        by_orbit.setdefault(B, []).append(l)
    classes = sorted(tuple(sorted(ls)) for ls in by_orbit.values())
    orbits = list(by_orbit)
    for X, Y in itertools.combinations(orbits, 2):
        if X & Y:
            raise RuntimeError("two distinct orbits intersect")
    return OrbitPartition(p, s, M, iota, orbit_of, classes)


def _stratum(q: int, p: int, s: int) -> set:
    """Grid points of exact denominator p^s, expressed at denominator q."""
    f = q // p**s
    return {(u * f, v * f) for u, v in grid_points(p**s) if (u % p) or (v % p)}


@dataclass
class OrbitStructureReport:
    p: int
    eta: int
    status: str  # passed | failed | skipped
    reason: str = ""
    orbit_sizes: bool = False
    class_sizes: bool = False
    stratified_union: bool = False
    seed_union: bool = False
    residue_unions: bool = False
    strata_disjoint: bool = False
    per_level: list = field(default_factory=list)


def verify_thm34(M: Mat2, p: int, eta: int) -> OrbitStructureReport:
    """Orbit sizes, class sizes, residue-class unions and the stratified union."""
    if not orbit_hypotheses(M, p):
        return OrbitStructureReport(p, eta, "skipped", reason="hypotheses not met: need O_p(M) = p^2-1 "
                           "and a unit upper-right entry of (M^(p^2-1) - I)/p")
    rep = OrbitStructureReport(p, eta, "failed")
    Q = p**eta
    full: set = set()
    disjoint = True
    sizes_ok = classes_ok = residues_ok = True
    for s in range(1, eta + 1):
        P = partition(M, p, s)
        q = p**s
        f = Q // q
        stratum = _stratum(q, p, s)
        size_ok = all(len(B) == (p * p - 1) * p ** (s - 1) for B in P.orbit_of.values())
        cls_ok = all(len(c) == p - 1 for c in P.classes)
        res_ok = True
        for i in range(1, p):
            U = set().union(*(P.orbit_of[l] for l in range(i, q, p)))
            res_ok &= U == stratum
        level = set()
        for B in P.orbit_of.values():
            level |= {(u * f, v * f) for u, v in B}
        if level & full:
            disjoint = False
        full |= level
        sizes_ok &= size_ok
        classes_ok &= cls_ok
        residues_ok &= res_ok
        rep.per_level.append({"s": s, "classes": len(P.classes), "orbit_size_ok": size_ok,
                              "class_size_ok": cls_ok, "residue_unions_ok": res_ok})
    punctured = set(grid_points(Q, punctured=True))
    R = M.mod(Q)
    seeds = [(p ** (eta - 1), l) for l in range(Q)]
    swept = set()
    for x in seeds:
        swept.update(_orbit_pairs(R, x, (p * p - 1) * p ** (eta - 1)))
    rep.orbit_sizes = sizes_ok
    rep.class_sizes = classes_ok
    rep.residue_unions = residues_ok
    rep.strata_disjoint = disjoint
    rep.stratified_union = full == punctured
    rep.seed_union = swept == punctured
    if all((rep.orbit_sizes, rep.class_sizes, rep.residue_unions, rep.strata_disjoint,
            rep.stratified_union, rep.seed_union)):
        rep.status = "passed"
    return rep


@dataclass
class SeedClassReport:
    p: int
    s: int
    status: str
    pairs_checked: int = 0
    violations: list = field(default_factory=list)


def verify_claim1(M: Mat2, p: int, s: int, trials: Optional[int] = None,
                  rng: Optional[random.Random] = None) -> SeedClassReport:
    """Returns to the seed line with l = l' (mod p) only after the full order."""
    if not orbit_hypotheses(M, p):
        return SeedClassReport(p, s, "skipped")
    q = p**s
    R = M.mod(q)
    K = (p * p - 1) * p ** (s - 1)
    T = t_set(p, s)
    pairs = [(l, m) for l in T for m in T if (l - m) % p == 0]
    if trials is not None and trials < len(pairs):
        rng = rng or random.Random(0)
        pairs = rng.sample(pairs, trials)
    rep = SeedClassReport(p, s, "passed")
    for l, m in pairs:
        u = (p ** (s - 1), l)
        target = (p ** (s - 1) % q, m)
        for k in range(1, K + 1):
            u = R.apply(*u)
            if u == target:
                if k != K or l != m:
                    rep.violations.append((l, m, k))
                break
        rep.pairs_checked += 1
    if rep.violations:
        rep.status = "failed"
    return rep


def verify_lemma25(M: Mat2, q: int) -> bool:
    """x -> frac(Mx) permutes the punctured grid and preserves exact denominators."""
    if not M.is_integral():
        raise DomainError("integer matrix required")
    if math.gcd(M.det(), q) != 1:
        raise DomainError(f"gcd(det M, {q}) != 1")
    R = M.mod(q)
    pts = grid_points(q, punctured=True)
    image = [R.apply(u, v) for u, v in pts]
    if set(image) != set(pts):
        return False
    return all(math.gcd(math.gcd(u, v), q) == math.gcd(math.gcd(x, y), q)
               for (u, v), (x, y) in zip(pts, image))


def orbit_union(T: Mat2, seeds: list, q: int, steps: int) -> frozenset:
    """Union over j = 1..steps of ``T^j seeds`` mod Z^2 (seeds on the q-grid)."""
    R = T.mod(q)
    out = set()
    for x in seeds:
        out.update(_orbit_pairs(R, from_qvec(x, q), steps))
    return frozenset(to_qvec(u, v, q) for u, v in out)
