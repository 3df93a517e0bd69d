"""End-to-end determination of the maximal number of orthogonal exponentials.

The pipeline normalizes the digit set, classifies it, certifies the upper
bound with a finite invariant set, moves to coordinates where an explicit
orthogonal family is known, builds that family and certifies every pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .clique import CliqueResult, max_orthogonal_clique
from .exact import DomainError, Mat2, is_expanding
from .orbits import gen_E
from .orders import construct_m0
from .spectral import (BoundCertificate, Dichotomy, Frequency, OrthoCertificate,
                       construct_lambda_case2, construct_lambda_grid_sweep, construct_lambda_thm12,
                       lemma37_dichotomy, upper_bound_certificate, verify_orthogonal)
from .transforms import CaseReport, build_A3, classify, normalize_digits, refined_residue
from .zeros import DigitSet3

BASE = Mat2(0, 1, 1, 1)


@dataclass
class WorkingSystem:
    """``(M, D)`` in other coordinates; the original is ``(P M P^-1, P D)``."""

    label: str
    M: Mat2
    D: DigitSet3
    P: Mat2

    def to_original(self, f: Frequency) -> Frequency:
        return f.transformed(self.P.T.inv())


@dataclass
class NStarReport:
    M: Mat2
    D: DigitSet3
    classification: CaseReport
    bound_system: WorkingSystem
    bound: BoundCertificate
    working: Optional[WorkingSystem] = None
    method: str = ""
    dichotomy: Optional[Dichotomy] = None
    grid: Optional[int] = None  # denominator of the frequency directions
    lam: list = field(default_factory=list)
    lam_original: list = field(default_factory=list)
    certificate: Optional[OrthoCertificate] = None
    clique: Optional[CliqueResult] = None
    notes: list = field(default_factory=list)

    @property
    def upper(self) -> Optional[int]:
        return self.bound.bound if self.bound.valid else None

    @property
    def lower(self) -> int:
        n = 1
        if self.certificate is not None and self.certificate.complete:
            n = len(self.lam)
        if self.clique is not None and self.clique.inconclusive_edges == 0:
            n = max(n, self.clique.size)
        return n

    @property
    def determined(self) -> bool:
        return self.upper is not None and self.lower == self.upper

    @property
    def nstar(self) -> Optional[int]:
        return self.upper if self.determined else None


def _smallest_expanding(B: Mat2, step: int, start: int = 1) -> int:
    n = start
    while not is_expanding(B * n):
        n += step
    return n


def sharp_matrix(D: DigitSet3) -> Mat2:
    """An expanding integer matrix for which the classified bound is attained.

    Case (i) with 3 not dividing delta: ``A M2 A^-1`` with ``A = [alpha|beta]``
    and ``M2 = N delta [[0,1],[1,1]]``, N = 1 mod 9 and minimal. Otherwise
    ``U M3 U^-1`` with U the unimodular part of the triangularizing transform
    and M3 from the orbit-matrix construction at p = 3.
    """
    cls = classify(None, D)
    Dn, _ = normalize_digits(D)
    if cls.case == "i" and cls.eta == 0:
        A = Dn.matrix()
        B = BASE * cls.delta
        M2 = B * _smallest_expanding(B, 9)
        M = A @ M2 @ A.inv()
    else:
        U = build_A3(None, Dn).data.U
        M = U @ construct_m0(3).measure_matrix @ U.inv()
    if not M.is_integral():
        raise RuntimeError("sharp matrix is not integral")
    return M


def _bound_stage(M: Mat2, Dn: DigitSet3, g: int, cls: CaseReport):
    if cls.case == "i":
        # D / delta has its mask zeros on the 3-grid
        D1 = Dn.scaled(Fraction(1, cls.delta))
        sys = WorkingSystem("D1", M, D1, Mat2.scalar(g * cls.delta))
        return sys, upper_bound_certificate(M, D1, gen_E(3, punctured=True).points)
    r = build_A3(M, Dn)
    sys = WorkingSystem("D3", r.M3, r.D3, r.A3 * g)
    return sys, upper_bound_certificate(r.M3, r.D3, gen_E(3**cls.eta, punctured=True).points)


def _lower_stage(rep: NStarReport, M: Mat2, Dn: DigitSet3, g: int) -> None:
    cls = rep.classification
    if cls.case == "i" and cls.eta == 0:
        A = Dn.matrix()
        M2 = A.inv() @ M @ A
        D2 = DigitSet3.of(1, 0, 0, 1)
        if not M2.is_integral():
            rep.notes.append("conjugated matrix A^-1 M A is not integral; no explicit family")
            return
        rep.working = WorkingSystem("D2", M2, D2, A * g)
        rep.dichotomy = lemma37_dichotomy(M2, D2, 3)
        if not rep.dichotomy.reaches:
            rep.notes.append("zero orbits do not cover the punctured 3-grid; fewer than 9")
            return
        rep.method = "grid-sweep"
        rep.grid = 3
        rep.lam = construct_lambda_grid_sweep(M2, D2, 3)
        return
    r = build_A3(M, Dn)
    td = r.data
    rep.working = WorkingSystem("D3", r.M3, r.D3, r.A3 * g)
    N = td.tau * td.theta
    try:
        if cls.case == "i":
            rep.method = "refined-grid"
            rep.grid = 3 ** (cls.eta + 1)
            rep.lam = construct_lambda_case2(r.M3, r.D3, N, cls.eta, refined_residue(td))
        else:
            rep.method = "prime-power-grid"
            rep.grid = 3**cls.eta
            rep.lam = construct_lambda_thm12(r.M3, r.D3, 3, cls.eta, N)
    except DomainError as e:
        rep.method = ""
        rep.grid = None
        rep.notes.append(f"construction refused: {e}")


def nstar(M: Mat2, D: DigitSet3, clique: bool = False, j_max: Optional[int] = None,
          workers: int = 1) -> NStarReport:
    if not is_expanding(M):
        raise DomainError("M must be expanding")
    cls = classify(M, D)
    Dn, g = normalize_digits(D)
    bsys, bcert = _bound_stage(M, Dn, g, cls)
    rep = NStarReport(M, D, cls, bsys, bcert)
    if not bcert.valid:
        rep.notes.append("bound certificate failed")
    _lower_stage(rep, M, Dn, g)
    if rep.lam:
        W = rep.working
        rep.certificate = verify_orthogonal(rep.lam, W.M, W.D, j_max, workers)
        rep.lam_original = [W.to_original(f) for f in rep.lam]
        if not rep.certificate.complete:
            rep.notes.append("some pairs lack a witness: " + str(rep.certificate.counts()))
    if clique:
        if rep.lam:
            sysc, q, scale = rep.working, rep.grid, rep.lam[0].scale
        else:
            sysc = rep.working or bsys
            q, scale = (3 if cls.case == "i" else 3**cls.eta), None
        if q * q > 6561:
            rep.notes.append("clique search skipped: grid too large")
        else:
            rep.clique = max_orthogonal_clique(sysc.M, sysc.D, q, scale, j_max)
    return rep


def exit_code(rep: NStarReport) -> int:
    return 0 if rep.determined else 1
