from fractions import Fraction
from math import gcd

from hypothesis import given
from hypothesis import strategies as st

from hidatriple.characters import (
    DirichletChar,
    bernoulli,
    char_decompose,
    gen_bernoulli,
)


def _chi15():
    # order-4 character mod 5 times the quadratic character mod 3, glued by CRT
    table = {}
    for a in range(15):
        if gcd(a, 15) == 1:
            e3 = 0 if a % 3 == 1 else 2
            e5 = {1: 0, 2: 1, 4: 2, 3: 3}[a % 5]
            table[a] = e3 + e5
    return DirichletChar.from_values(15, 4, table)


def test_decompose_trivial_and_coprime():
    t = DirichletChar.trivial(1)
    a, b = char_decompose(t, 7)
    assert a.is_trivial() and b.is_trivial()
    chi7 = DirichletChar.teichmuller_power(7, 1)
    a, b = char_decompose(chi7, 5)
    assert a.modulus == 1 and b.modulus == 7


def test_decompose_mod_15():
    chi = _chi15()
    c3, c5 = char_decompose(chi, 3)
    assert c3.modulus == 3 and c5.modulus == 5
    assert c3.exponent(2) * (4 // c3.order) % 4 == 2
    for a in range(15):
        if gcd(a, 15) == 1:
            lhs = chi.exponent(a) * (12 // chi.order)
            rhs = c3.exponent(a) * (12 // c3.order) + c5.exponent(a) * (12 // c5.order)
            assert (lhs - rhs) % 12 == 0


def test_bernoulli_examples():
    assert gen_bernoulli(4, DirichletChar.trivial(1)) == Fraction(-1, 30)
    assert gen_bernoulli(2, DirichletChar.trivial(1)) == Fraction(1, 6)
    assert gen_bernoulli(1, DirichletChar.trivial(1)) == Fraction(1, 2)
    assert gen_bernoulli(1, DirichletChar.kronecker(-4)) == Fraction(-1, 2)


@given(st.integers(1, 30).map(lambda n: 2 * n))
def test_von_staudt_clausen(k):
    den = bernoulli(k).denominator
    prod = 1
    for q in range(2, k + 2):
        if all(q % d for d in range(2, int(q**0.5) + 1)) and k % (q - 1) == 0:
            prod *= q
    assert prod % den == 0


@given(st.sampled_from([5, 7, 11, 13]), st.integers(0, 20), st.integers(1, 200), st.integers(1, 200))
def test_teichmuller_power_multiplicative(p, j, a, b):
    chi = DirichletChar.teichmuller_power(p, j)
    if a % p == 0 or b % p == 0:
        assert chi.exponent(a * b) is None
        return
    N = 6
    lhs = chi.value(a * b, p, N).residue
    rhs = (chi.value(a, p, N) * chi.value(b, p, N)).residue
    assert lhs == rhs


@given(st.sampled_from([3, 5]), st.integers(0, 3))
def test_decomposition_recombines(l, j):
    chi = DirichletChar.teichmuller_power(7, j) * DirichletChar.kronecker(-l if l == 3 else 5).extend(7 * (3 if l == 3 else 5))
    a, b = char_decompose(chi, l)
    for n in range(1, chi.modulus):
        if gcd(n, chi.modulus) == 1:
            assert chi.value(n, 7, 4).residue == (a.value(n, 7, 4) * b.value(n, 7, 4)).residue


def test_json_round_trip():
    chi = _chi15()
    assert DirichletChar.from_json(chi.to_json()).same_as(chi)
