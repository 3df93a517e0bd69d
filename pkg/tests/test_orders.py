import itertools
import random

import pytest

from affspec.exact import DomainError, Mat2
from affspec.orders import (char_poly_order, construct_m0, find_generator, is_ergodic,
                            minimal_poly_mod, orbit_hypotheses, order_mod, poly_order,
                            thm31_least_exponent, thm33_verify)

from conftest import MHAT, naive_order


def test_order_examples():
    assert order_mod(MHAT, 3).order == 8
    assert order_mod(Mat2.identity(), 7).order == 1
    assert order_mod(MHAT, 9).order == naive_order(MHAT.entries(), 9) == 24


def test_order_excess_exact():
    r = order_mod(MHAT, 3, with_excess=True)
    assert r.excess == Mat2(4, 7, 7, 11)
    assert MHAT**8 == r.excess * 3 + Mat2.identity()


def test_order_rejects_singular():
    with pytest.raises(DomainError):
        order_mod(Mat2(3, 0, 0, 1), 3)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 7, 8, 9, 25, 27])
def test_order_matches_naive(m):
    rng = random.Random(m)
    for _ in range(40):
        M = Mat2(*(rng.randint(-9, 9) for _ in range(4)))
        if M.det() % m == 0 or __import__("math").gcd(M.det(), m) != 1:
            continue
        assert order_mod(M, m).order == naive_order(M.entries(), m)


def test_order_divides_lift():
    rng = random.Random(3)
    for p in (3, 5, 7):
        for s in (2, 3):
            for _ in range(20):
                M = Mat2(*(rng.randint(-9, 9) for _ in range(4)))
                if M.det() % p == 0:
                    continue
                assert order_mod(M, p**s).order % order_mod(M, p).order == 0
                assert order_mod(M, p).order <= p * p - 1


def test_poly_order_examples():
    # x^2 - x - 1 over F_3
    assert poly_order([-1, -1, 1], 3) == 8
    assert char_poly_order(MHAT, 3) == 8
    # identity: minimal polynomial x - 1 has order 1, characteristic (x-1)^2 has order 3
    assert char_poly_order(Mat2.identity(), 3) == 1
    assert char_poly_order(Mat2.identity(), 3, minimal=False) == 3
    with pytest.raises(DomainError):
        char_poly_order(Mat2(3, 1, 0, 1), 3)


def test_minimal_poly_degree():
    assert minimal_poly_mod(Mat2(4, 3, 6, 1), 3) == [2, 1]
    assert len(minimal_poly_mod(MHAT, 5)) == 3


@pytest.mark.parametrize("p", [3, 5, 7])
def test_minimal_poly_order_equals_matrix_order(p):
    rng = random.Random(p)
    checked = 0
    while checked < 500:
        M = Mat2(*(rng.randint(0, p - 1) for _ in range(4)))
        if M.det() % p == 0:
            continue
        assert char_poly_order(M, p) == order_mod(M, p).order
        checked += 1


def test_generators_have_primitive_char_poly():
    for p in (3, 5, 7):
        G = find_generator(p)
        assert char_poly_order(G, p, minimal=False) == p * p - 1


def test_ergodic_examples():
    assert is_ergodic(MHAT, 3)
    assert not is_ergodic(Mat2.identity(), 3)
    assert not is_ergodic(Mat2(1, 1, 0, 1), 3)


def test_ergodic_iff_full_order_on_gl2_f3():
    group = [Mat2(*e) for e in itertools.product(range(3), repeat=4) if Mat2(*e).det() % 3]
    assert len(group) == 48
    for M in group:
        assert is_ergodic(M, 3) == (order_mod(M, 3).order == 8)
    # three cyclic subgroups of order 8, four generators each
    assert sum(is_ergodic(M, 3) for M in group) == 12


def test_find_generator():
    assert find_generator(3) == MHAT
    assert order_mod(find_generator(5), 5).order == 24
    assert order_mod(find_generator(2), 2).order == 3
    with pytest.raises(LookupError):
        find_generator(5, search_limit=3)


def test_lifting_exponent_example_from_mhat_power():
    B = MHAT**8
    e, check = thm31_least_exponent(B, 3, 2)
    assert e == 3
    assert all((x - y) % 3 == 0 for x, y in zip(check.entries(), (4, 7, 7, 11)))


def test_lifting_exponent_s1_is_trivial():
    assert thm31_least_exponent(Mat2(4, 3, 3, 1), 3, 1)[0] == 1


def test_lifting_exponent_p2_counterexample():
    B = Mat2(1, 1, 1, 0) * 2 + Mat2.identity()
    e, _ = thm31_least_exponent(B, 2, 3, i0=1)
    assert e == 2 != 4
    # direct powering: the upper-right entry of B^2 is already 2 * 4
    assert (B**2).b == 8


def test_lifting_exponent_rejects_bad_input():
    with pytest.raises(DomainError):
        thm31_least_exponent(Mat2(2, 0, 0, 1), 3, 2)
    with pytest.raises(DomainError):
        thm31_least_exponent(Mat2(4, 3, 3, 1), 3, 2, i0=3)


def test_order_lift_examples():
    r = thm33_verify(MHAT, 3, 2)
    assert (r.iota, r.k) == (8, 24) and r.holds and r.sharp_expected
    r = thm33_verify(Mat2.identity(), 5, 3)
    assert (r.iota, r.k) == (1, 1) and r.holds


def test_order_lift_strict_inequality_exists():
    # M = I (mod 9): the excess over p vanishes, so the lift order drops below the bound
    M = Mat2(10, 9, 0, 1)
    r = thm33_verify(M, 3, 2)
    assert r.iota == 1 and r.k == 1 < r.bound and not r.sharp_expected and r.holds


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_construct_m0(p):
    c = construct_m0(p)
    assert orbit_hypotheses(c.orbit_matrix, p)
    assert c.measure_matrix == c.orbit_matrix.T
    from affspec.exact import is_expanding

    assert is_expanding(c.measure_matrix)
    scale = p * p * c.n + 1
    assert scale % (p * p) == 1


def test_construct_m0_p3_is_ten_mhat():
    c = construct_m0(3)
    assert c.measure_matrix == MHAT * 10 and not c.repaired
