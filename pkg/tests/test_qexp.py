from hypothesis import given
from hypothesis import strategies as st

from hidatriple.characters import DirichletChar
from hidatriple.classical import delta_qexp, eisenstein_series
from hidatriple.qexp import (
    QExp,
    d_power,
    deplete,
    naive_mul,
    op_T,
    op_U,
    op_V,
    rankin_cohen,
    theta_twist,
    twist,
)

series = st.lists(st.integers(-10**6, 10**6), min_size=2, max_size=40).map(lambda c: QExp(tuple(c)))


def test_V_examples():
    q = QExp.monomial(1, 4)
    assert op_V(2, q).coeffs[:3] == (0, 0, 2)
    assert op_V(1, q) == q
    assert op_V(2, QExp.monomial(3, 3, 3)).coeffs[6] == 6


def test_U_examples():
    assert op_U(2, QExp.monomial(2, 6)).coeffs[:2] == (0, 1)
    assert all(c == 0 for c in op_U(2, QExp.monomial(1, 6)).coeffs)


@given(series, st.integers(1, 5))
def test_U_V(f, d):
    assert op_U(d, op_V(d, f)) == f.scale(d)


def test_T2_delta():
    D = delta_qexp(401).qexp
    T = op_T(2, 12, None, D)
    assert T.coeffs[1] == -24
    assert T == D.truncate(T.B).scale(-24)
    assert T.B == 200


@given(series, series)
def test_mul_matches_naive(f, g):
    n = min(f.B, g.B)
    assert (f * g).coeffs[: n + 1] == tuple(naive_mul(f.coeffs, g.coeffs, n + 1))


def test_twist_and_deplete():
    chi = DirichletChar.kronecker(-4)
    f = QExp(tuple(range(10)))
    t = twist(chi, f)
    assert t.coeffs[:6] == (0, 1, 0, -3, 0, 5)
    assert deplete(f, 3).coeffs[:7] == (0, 1, 2, 0, 4, 5, 0)
    th = theta_twist(lambda n: 2, f, 5)
    assert th.coeffs[5] == 0 and th.coeffs[6] == 12


def test_d_power():
    f = QExp((0, 1, 1, 1))
    assert d_power(3, f).coeffs == (0, 1, 8, 27)


def test_rankin_cohen_E4_E6():
    # [E4, E6]_1 is a weight-12 cusp form, hence a multiple of Delta
    B = 30
    E4, E6 = eisenstein_series(4, B), eisenstein_series(6, B)
    rc = rankin_cohen(E4, E6, 4, 6, 1)
    D = delta_qexp(B).qexp
    c = rc.coeffs[1]
    assert rc.coeffs[0] == 0
    assert rc == D.scale(c)
    # same weight, odd order: antisymmetric
    assert all(a == 0 for a in rankin_cohen(E4, E4, 4, 4, 1).coeffs)


@given(st.integers(0, 4))
def test_rankin_cohen_symmetry(n):
    B = 15
    g, h = delta_qexp(B).qexp, eisenstein_series(4, B)
    lhs = rankin_cohen(g, h, 12, 4, n)
    rhs = rankin_cohen(h, g, 4, 12, n)
    assert lhs == rhs.scale((-1) ** n)


def test_rankin_cohen_order0():
    g, h = delta_qexp(15).qexp, eisenstein_series(4, 15)
    assert rankin_cohen(g, h, 12, 4, 0) == g * h
