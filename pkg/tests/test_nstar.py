import random

import pytest

from affspec.clique import max_orthogonal_clique
from affspec.exact import DomainError, Mat2
from affspec.nstar import exit_code, nstar, sharp_matrix
from affspec.spectral import Frequency, verify_orthogonal
from affspec.suite import random_digits_eta
from affspec.transforms import classify
from affspec.zeros import DigitSet3

CASE1_M = Mat2(1, -1, 1, 1) * 2
D2 = DigitSet3.of(1, 0, 0, 1)


def _check_consistent(rep):
    if rep.upper is not None:
        assert rep.lower <= rep.upper
    if rep.clique is not None and rep.upper is not None:
        assert rep.clique.size <= rep.upper
    if rep.certificate is not None and rep.certificate.complete and rep.clique is not None:
        assert rep.clique.size >= len(rep.lam)


def test_demo_case1():
    D = DigitSet3.of(1, -1, 1, 1)
    rep = nstar(sharp_matrix(D), D, clique=True)
    assert rep.classification.case == "i" and rep.classification.bound == 9
    assert rep.method == "grid-sweep"
    assert rep.nstar == 9 and rep.clique.size == 9
    assert exit_code(rep) == 0
    _check_consistent(rep)


@pytest.mark.parametrize("digits,eta,expected", [
    ((2, 1, 1, 2), 1, 9),
    ((1, 0, 0, 3), 1, 9),
    ((1, 2, 2, 13), 2, 81),
])
def test_sharp_systems(digits, eta, expected):
    D = DigitSet3.of(*digits)
    rep = nstar(sharp_matrix(D), D)
    assert rep.classification.eta == eta
    assert rep.nstar == expected
    assert len(rep.lam_original) == expected
    cert = verify_orthogonal(rep.lam_original, rep.M, rep.D)
    assert cert.complete


def test_case_ii_clique():
    D = DigitSet3.of(2, 1, 1, 2)
    rep = nstar(sharp_matrix(D), D, clique=True)
    assert rep.clique.size == 9 and rep.clique.inconclusive_edges == 0
    _check_consistent(rep)


def test_scaled_identity_is_degenerate():
    rep = nstar(Mat2(2, 0, 0, 2), D2, clique=True)
    assert rep.upper == 9
    assert not rep.dichotomy.reaches
    assert rep.clique.size < 9
    assert rep.nstar is None and exit_code(rep) == 1
    _check_consistent(rep)


def test_adversarial_matrix_gets_bounds_only():
    # eta = 1, case (ii): 2I fails the orbit hypotheses in the triangular frame
    D = DigitSet3.of(2, 1, 1, 2)
    rep = nstar(Mat2(2, 0, 0, 2), D)
    assert rep.classification.case == "ii"
    assert rep.upper == 9 and rep.lower == 1
    assert rep.lam == [] and any("refused" in n for n in rep.notes)
    assert exit_code(rep) == 1


def test_non_expanding_rejected():
    with pytest.raises(DomainError):
        nstar(Mat2(0, 1, 1, 1), D2)


def test_content_normalized():
    D = DigitSet3.of(1, -1, 1, 1)
    M = sharp_matrix(D)
    a = nstar(M, D)
    b = nstar(M, D.scaled(5))
    assert a.nstar == b.nstar == 9
    assert b.classification.content == 5
    assert verify_orthogonal(b.lam_original, M, D.scaled(5)).complete


def test_sharp_matrix_random_digits():
    rng = random.Random(5)
    for case in ("i", "ii"):
        for _ in range(4):
            D = random_digits_eta(rng, case, -6, 6)
            M = sharp_matrix(D)
            assert M.is_integral()
            rep = nstar(M, D)
            assert rep.upper == classify(M, D).bound
            assert rep.determined, rep.notes
    for _ in range(4):
        while True:
            D = DigitSet3.of(*(rng.randint(-6, 6) for _ in range(4)))
            if D.delta() and D.delta() % 3:
                break
        rep = nstar(sharp_matrix(D), D)
        assert rep.nstar == 9


def test_bound_consistency_random_matrices():
    rng = random.Random(8)
    done = 0
    while done < 12:
        M = Mat2(*(rng.randint(-6, 6) for _ in range(4)))
        try:
            D = DigitSet3.of(*(rng.randint(-3, 3) for _ in range(4)))
            rep = nstar(M, D, clique=True, j_max=400)
        except DomainError:
            continue
        _check_consistent(rep)
        done += 1


def test_clique_validation():
    with pytest.raises(DomainError):
        max_orthogonal_clique(CASE1_M, D2, 1)


def test_clique_members_are_orthogonal():
    r = max_orthogonal_clique(Mat2(0, 2, 2, 2), D2, 3)
    assert r.size == 9
    assert verify_orthogonal(r.members, Mat2(0, 2, 2, 2), D2).complete
    assert all(isinstance(f, Frequency) for f in r.members)
