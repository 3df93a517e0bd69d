from __future__ import annotations

import itertools
from fractions import Fraction

import pytest

from affspec.exact import Mat2, QVec2
from affspec.zeros import DigitSet3

MHAT = Mat2(0, 1, 1, 1)


def naive_order(entries, m):
    """Order of a 2x2 matrix mod m using plain tuples only."""
    a, b, c, d = (e % m for e in entries)
    x = (a, b, c, d)
    k = 1
    while x != (1 % m, 0, 0, 1 % m):
        p, q, r, s = x
        x = ((p * a + q * c) % m, (p * b + q * d) % m, (r * a + s * c) % m, (r * b + s * d) % m)
        k += 1
        assert k <= m**4
    return k


def brute_grid_zeros(D: DigitSet3, q: int, tol: float = 1e-10):
    import cmath
    import math

    out = set()
    for u, v in itertools.product(range(q), repeat=2):
        x = (Fraction(u, q), Fraction(v, q))
        s = 0j
        for d in D.digits():
            t = float((d.x * x[0] + d.y * x[1]) % 1)
            s += cmath.exp(2j * math.pi * t)
        if abs(s / 3) < tol:
            out.add(QVec2(*x))
    return out


@pytest.fixture
def mhat():
    return MHAT


@pytest.fixture
def d2():
    return DigitSet3.of(1, 0, 0, 1)


ACCEPTANCE_LINES: dict = {}


def record_acceptance(n: int, ok: bool, what: str, elapsed: float) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {what}  ({elapsed:.3f} s)"
    ACCEPTANCE_LINES[n] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
