import itertools
import random
from fractions import Fraction

import pytest

from affspec.exact import DomainError, Mat2, QVec2, euler_phi
from affspec.orders import construct_m0
from affspec.spectral import (Frequency, PairWitness, ZeroTester, construct_lambda_case2,
                              construct_lambda_grid_sweep, construct_lambda_thm12,
                              contraction_constant, invariant_closure, lemma37_dichotomy,
                              mu_hat_numeric, recheck_certificate, upper_bound_certificate,
                              verify_orbit_containment, verify_orthogonal, zero_membership)
from affspec.orbits import gen_E
from affspec.transforms import build_A3, conjugate
from affspec.zeros import DigitSet3, zero_cosets_3digit

from conftest import MHAT

F = Fraction
M2 = MHAT * 2
D2 = DigitSet3.of(1, 0, 0, 1)
M0 = construct_m0(3).measure_matrix
D3_ETA1 = DigitSet3.of(1, 0, 2, 3)
D3_ETA2 = DigitSet3.of(1, 0, 2, 9)


def test_membership_examples():
    Z = zero_cosets_3digit(D2)
    xi = M2.T @ QVec2(F(1, 3), F(2, 3))
    m = zero_membership(xi, M2, Z)
    assert (m.status, m.j) == ("witness", 1)
    assert zero_membership(QVec2(1, 0), M2, Z).status == "refuted"
    with pytest.raises(DomainError):
        zero_membership(QVec2(0, 0), M2, Z)


def test_membership_rejects_non_expanding():
    with pytest.raises(DomainError):
        zero_membership(QVec2(1, 0), MHAT, zero_cosets_3digit(D2))


def test_membership_deep_witness():
    Z = zero_cosets_3digit(D2)
    z = QVec2(F(2, 3), F(1, 3)) + QVec2(5, -7)
    xi = (M2.T ** 37) @ z
    m = zero_membership(xi, M2, Z)
    assert m.status == "witness" and m.j <= 37


def test_contraction_constant_bounds_powers():
    for M in (M2, M0, Mat2(1, -1, 1, 1), Mat2(2, 1, 0, 2), Mat2(-20, 10, -50, 30)):
        C = contraction_constant(M)
        Ninv = M.T.inv()
        P = Mat2.identity()
        for _ in range(80):
            P = P @ Ninv
            assert P.norm_inf() <= C


def test_refutation_stable_under_tighter_settings():
    rng = random.Random(12)
    Z = zero_cosets_3digit(D2)
    tester = ZeroTester(M2, Z)
    for _ in range(300):
        xi = QVec2(F(rng.randint(-300, 300), rng.choice([1, 2, 3, 9, 27])),
                   F(rng.randint(-300, 300), rng.choice([1, 3, 5, 9])))
        if xi == QVec2.zero():
            continue
        r = tester.test(xi)
        if r.status == "refuted":
            r2 = tester.test(xi, j_max=2 * (64 * 20), norm_factor=F(1, 2))
            assert r2.status == "refuted"


def test_refuted_is_never_a_later_zero():
    # brute-force the first 200 inverse iterates for refuted frequencies
    Z = zero_cosets_3digit(D2)
    tester = ZeroTester(M2, Z)
    Ninv = M2.T.inv()
    for u, v in itertools.product(range(-6, 7), repeat=2):
        xi = QVec2(F(u, 3), F(v, 9))
        if xi == QVec2.zero():
            continue
        r = tester.test(xi)
        w = xi
        hits = []
        for j in range(1, 200):
            w = Ninv @ w
            if Z.contains(w):
                hits.append(j)
        if r.status == "refuted":
            assert not hits
        elif r.status == "witness":
            assert hits and hits[0] == r.j


def test_prime_power_lambda_lambda_eta1():
    lam = construct_lambda_thm12(M0, D3_ETA1, 3, 1, 1)
    assert len(lam) == 9
    assert any(f.direction == QVec2.zero() for f in lam)
    assert lam[0].scale == M0.det() ** (euler_phi(3) * 8)
    cert = verify_orthogonal(lam, M0, D3_ETA1)
    assert cert.complete and len(cert.pairs) == 36
    assert all(1 <= w.j <= 8 for w in cert.pairs)
    assert recheck_certificate(cert)


def test_prime_power_lambda_lambda_eta2():
    lam = construct_lambda_thm12(M0, D3_ETA2, 3, 2, 1)
    assert len(lam) == 81
    cert = verify_orthogonal(lam, M0, D3_ETA2)
    assert cert.complete and len(cert.pairs) == 3240
    assert max(w.j for w in cert.pairs) <= 8 * 3


def test_prime_power_lambda_on_original_digits_via_transport():
    D = DigitSet3.of(2, 1, 1, 2)
    U = build_A3(None, D).data.U
    M = U @ M0 @ U.inv()
    lam3 = construct_lambda_thm12(M0, D3_ETA1, 3, 1, 1)
    _, _, back = conjugate(U, M0, D3_ETA1, [f.vector() for f in lam3])
    cert = verify_orthogonal([Frequency(1, v) for v in back], M, D)
    assert cert.complete and len(cert.pairs) == 36


def test_prime_power_lambda_refusals():
    with pytest.raises(DomainError):
        construct_lambda_thm12(M0, D3_ETA1, 4, 1, 1)
    with pytest.raises(DomainError):
        construct_lambda_thm12(M0, D3_ETA1, 3, 1, 3)
    with pytest.raises(DomainError):
        construct_lambda_thm12(Mat2(2, 0, 0, 2), D3_ETA1, 3, 1, 1)
    with pytest.raises(DomainError):
        construct_lambda_thm12(M0, D2, 3, 1, 1)


def test_scaling_exponent_transport():
    for extra in (euler_phi(3), 3 * euler_phi(3)):
        lam = construct_lambda_thm12(M0, D3_ETA1, 3, 1, 1, extra=extra)
        assert (M0.det() ** extra) % 3 == 1
        assert verify_orthogonal(lam, M0, D3_ETA1).complete


def test_case2_lambda():
    D = DigitSet3.of(1, 0, 0, 3)
    r = build_A3(M0, D)
    from affspec.transforms import refined_residue

    i = refined_residue(r.data)
    lam = construct_lambda_case2(r.M3, r.D3, r.data.tau * r.data.theta, 1, i)
    assert len(lam) == 9
    dirs = {f.direction for f in lam}
    assert QVec2.zero() in dirs
    assert all((d * 9).is_integral() for d in dirs)
    assert sum(d.denominator() == 9 for d in dirs) >= 4
    cert = verify_orthogonal(lam, r.M3, r.D3)
    assert cert.complete
    # every difference lies in the top stratum: denominator exactly 9
    for a, b in itertools.combinations(dirs, 2):
        assert (a - b).denominator() == 9


def test_duplicates_rejected():
    f = Frequency(1, QVec2(1, 2))
    with pytest.raises(DomainError):
        verify_orthogonal([f, f], M2, D2)


def test_extra_point_breaks_orthogonality():
    lam = construct_lambda_thm12(M0, D3_ETA1, 3, 1, 1)
    extra = Frequency(lam[0].scale, QVec2(F(4, 3), 0))
    cert = verify_orthogonal(lam + [extra], M0, D3_ETA1)
    assert not cert.complete
    assert cert.counts()["refuted"] >= 1


def test_recheck_catches_tampering():
    lam = construct_lambda_thm12(M0, D3_ETA1, 3, 1, 1)
    cert = verify_orthogonal(lam, M0, D3_ETA1)
    w = cert.pairs[0]
    cert.pairs[0] = PairWitness(w.i, w.k, w.status, w.j + 1, w.coset, w.coords)
    assert not recheck_certificate(cert)


def test_parallel_matches_serial():
    lam = construct_lambda_thm12(M0, D3_ETA2, 3, 2, 1)[:20]
    a = verify_orthogonal(lam, M0, D3_ETA2, workers=1)
    b = verify_orthogonal(lam, M0, D3_ETA2, workers=2)
    assert a.pairs == b.pairs


def test_bound_certificate_examples():
    b = upper_bound_certificate(M2, D2, gen_E(3, punctured=True).points)
    assert b.valid and b.bound == 9
    b = upper_bound_certificate(M0, D3_ETA2, gen_E(9, punctured=True).points)
    assert b.valid and b.bound == 81
    b = upper_bound_certificate(M2, D2, gen_E(3).points)
    assert not b.valid and not b.zero_excluded


def test_bound_certificate_detects_missing_zero_and_instability():
    pts = [QVec2(F(1, 3), F(2, 3))]
    b = upper_bound_certificate(M2, D2, pts)
    assert not b.zeros_covered and not b.valid
    b = upper_bound_certificate(M2, D2, pts + [QVec2(F(2, 3), F(1, 3))])
    assert b.zeros_covered and not b.stable


def test_invariant_closure_gives_tightest_bound():
    Zp = invariant_closure(Mat2(2, 0, 0, 2), D2)
    b = upper_bound_certificate(Mat2(2, 0, 0, 2), D2, Zp)
    assert b.valid and b.bound == 3
    assert len(invariant_closure(M2, D2)) == 8


def test_dichotomy_examples():
    d = lemma37_dichotomy(M2, D2, 3)
    assert d.reaches and d.union == frozenset(gen_E(3, punctured=True).points)
    d = lemma37_dichotomy(Mat2(2, 0, 0, 2), D2, 3)
    assert not d.reaches
    assert d.union == {QVec2(F(1, 3), F(2, 3)), QVec2(F(2, 3), F(1, 3))}
    with pytest.raises(DomainError):
        lemma37_dichotomy(M2, D2, 2)


def test_dichotomy_union_inside_grid():
    rng = random.Random(13)
    grid = frozenset(gen_E(3, punctured=True).points)
    for _ in range(50):
        M = Mat2(*(rng.randint(-9, 9) for _ in range(4)))
        if M.det() % 3 == 0:
            continue
        assert lemma37_dichotomy(M, D2, 3).union <= grid


def test_grid_sweep_lambda_refused_when_not_reaching():
    with pytest.raises(DomainError):
        construct_lambda_grid_sweep(Mat2(2, 0, 0, 2), D2, 3)
    lam = construct_lambda_grid_sweep(M2, D2, 3)
    assert verify_orthogonal(lam, M2, D2).complete


def test_orbit_containment_sampled():
    rng = random.Random(36)
    M = M0
    q = 9
    for _ in range(50):
        lam = QVec2(F(rng.randrange(q), q), F(rng.randrange(q), q))
        for j in range(1, 6):
            for _ in range(20):
                n = QVec2(rng.randint(-5, 5), rng.randint(-5, 5))
                assert verify_orbit_containment(M, q, lam, j, n)


def test_mu_hat_examples():
    assert mu_hat_numeric(QVec2(0, 0), M2, D2, 10) == 1
    xi = M2.T @ QVec2(F(1, 3), F(2, 3))
    assert abs(mu_hat_numeric(xi, M2, D2, 64)) < 1e-8
    with pytest.raises(DomainError):
        mu_hat_numeric(xi, M2, D2, 0)


def test_mu_hat_nonzero_when_refuted():
    tester = ZeroTester(M2, zero_cosets_3digit(D2))
    rng = random.Random(14)
    for _ in range(30):
        xi = QVec2(F(rng.randint(1, 50), 7), F(rng.randint(1, 50), 11))
        if tester.test(xi).status == "refuted":
            assert abs(mu_hat_numeric(xi, M2, D2, 64)) > 0


def test_conjugation_transport_20_systems():
    rng = random.Random(22)
    lam = construct_lambda_thm12(M0, D3_ETA1, 3, 1, 1)
    lam_v = [f.vector() for f in lam]
    extra = lam_v + [lam_v[1] + QVec2(F(1, 3), 0)]
    base_status = [w.status for w in verify_orthogonal(
        [Frequency(1, v) for v in extra], M0, D3_ETA1).pairs]
    done = 0
    while done < 20:
        Q = Mat2(*(rng.randint(-4, 4) for _ in range(4)))
        if Q.det() == 0:
            continue
        Mq, Dq, Lq = conjugate(Q, M0, D3_ETA1, extra)
        cert = verify_orthogonal([Frequency(1, v) for v in Lq], Mq, Dq)
        assert [w.status for w in cert.pairs] == base_status
        assert [w.j for w in cert.pairs] == [w.j for w in verify_orthogonal(
            [Frequency(1, v) for v in extra], M0, D3_ETA1).pairs]
        done += 1
