from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hidatriple.errors import DomainError, ExtensionNeeded
from hidatriple.padic import (
    PadicInt,
    QpElt,
    hensel_root,
    one_unit_part,
    sqrt_one_unit,
    sqrt_padic,
    teichmuller,
    vp,
)

PRIMES = [3, 5, 7, 11, 13]


def test_teichmuller_examples():
    assert teichmuller(2, 5, 2).residue == 7
    assert pow(7, 4, 25) == 1
    assert teichmuller(1, 7, 5).residue == 1
    with pytest.raises(DomainError):
        teichmuller(5, 5, 2)


def test_one_unit_part_examples():
    assert one_unit_part(1 + 11, 11, 6).residue == 12
    assert one_unit_part(2, 5, 2).residue == 11
    assert one_unit_part(-1, 7, 4).residue == 1


def test_sqrt_one_unit_examples():
    assert sqrt_one_unit(PadicInt(5, 2, 1)).residue == 1
    # brute force over residues = 1 mod 5
    roots = [v for v in range(25) if v % 5 == 1 and v * v % 25 == 6]
    assert roots == [16]
    assert sqrt_one_unit(PadicInt(5, 2, 6)).residue == 16
    with pytest.raises(DomainError):
        sqrt_one_unit(PadicInt(5, 2, 2))


def test_sqrt_of_minus_one():
    r = sqrt_padic(PadicInt(13, 6, -1))
    assert (r * r).residue == PadicInt(13, 6, -1).residue
    with pytest.raises(ExtensionNeeded):
        sqrt_padic(PadicInt(11, 6, -1))


def test_hensel_root_quadratic():
    # X^2 - a X + c with a = tau(11), c = 11^11: the unit root is 1 mod 11
    r = hensel_root([11**11, -534612, 1], 1, 11, 8)
    assert (r.residue**2 - 534612 * r.residue + 11**11) % 11**8 == 0


@given(st.sampled_from(PRIMES), st.integers(1, 10**6), st.integers(1, 8))
def test_teichmuller_is_root_of_unity(p, z, N):
    if z % p == 0:
        z += 1
    w = teichmuller(z, p, N)
    assert pow(w.residue, p - 1, p**N) == 1
    assert (w.residue - z) % p == 0
    assert (one_unit_part(z, p, N).residue * w.residue - z) % p**N == 0


@given(st.sampled_from(PRIMES), st.integers(0, 10**6), st.integers(1, 8))
def test_sqrt_one_unit_round_trip(p, t, N):
    u = PadicInt(p, N, 1 + p * t)
    v = sqrt_one_unit(u)
    assert (v * v).residue == u.residue
    assert sqrt_one_unit(u * u).residue == u.residue


@given(st.sampled_from(PRIMES), st.integers(-10**9, 10**9), st.integers(-10**9, 10**9), st.integers(1, 10))
def test_padicint_ring_axioms(p, a, b, N):
    x, y = PadicInt(p, N, a), PadicInt(p, N, b)
    m = p**N
    assert (x + y).residue == (a + b) % m
    assert (x * y).residue == (a * b) % m
    assert (x - y).residue == (a - b) % m


@given(st.sampled_from(PRIMES), st.integers(1, 10**8), st.integers(1, 10**8))
def test_valuation_additive(p, a, b):
    N = 40
    x, y = PadicInt(p, N, a), PadicInt(p, N, b)
    assert (x * y).valuation() == min(N, x.valuation() + y.valuation())
    assert vp(a * b, p) == vp(a, p) + vp(b, p)


@given(st.sampled_from(PRIMES), st.fractions().filter(lambda f: f != 0))
def test_qpelt_inverse(p, f):
    x = QpElt.make(p, f, 10)
    one = x * x.inverse()
    assert one.equals(QpElt.make(p, 1, 10))
    assert x.val == (vp(f.numerator, p) - vp(f.denominator, p))


def test_qpelt_addition_precision():
    p = 7
    a = QpElt.make(p, Fraction(1, 7), 5)
    b = QpElt.make(p, Fraction(-1, 7), 5)
    s = a + b
    assert s.is_zero() and s.absprec() == 4
