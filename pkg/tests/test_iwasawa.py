import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hidatriple.errors import DomainError
from hidatriple.iwasawa import (
    ArithPoint,
    IwasawaElt,
    REllt,
    coleman_reparam,
    diamond,
    evaluate_poly,
    exp_series,
    grouplike,
    half_diamond,
    log_series,
    newton_interpolate,
    newton_interpolate_3,
    node_weights,
    weight_point,
)
from hidatriple.padic import PadicInt, one_unit_part, teichmuller

P, NP, M = 11, 8, 6
units = st.integers(1, 10**6).filter(lambda z: z % P)


def test_grouplike_examples():
    one = grouplike(PadicInt(P, NP, 1), M)
    assert one.coeffs == (1,) + (0,) * (M - 1)
    g = grouplike(PadicInt(P, NP + 4, 1 + P), M, NP)
    assert g.coeffs[:3] == (1, 1, 0)
    g2 = grouplike(PadicInt(P, NP + 4, (1 + P) ** 2), M, NP)
    assert g2.coeffs[:4] == (1, 2, 1, 0)
    with pytest.raises(DomainError):
        grouplike(PadicInt(P, NP, 2), M)


def test_diamond_examples():
    assert diamond(1, P, NP, M).coeffs[0] == 1
    assert diamond(1 + P, P, NP, M).coeffs[:3] == (1, 1, 0)
    z = 3
    val = diamond(z, P, NP, M).specialize(ArithPoint(2))
    u = one_unit_part(z, P, NP).residue
    assert (val.residue - u * u) % P**val.N == 0
    assert (diamond(2, P, NP, M).specialize(ArithPoint(1)).residue - one_unit_part(2, P, NP).residue) % P ** (NP - 2) == 0
    with pytest.raises(DomainError):
        diamond(P, P, NP, M)


def test_half_diamond_examples():
    h = half_diamond(2, P, NP, M)
    assert h * h == diamond(2, P, NP, M)
    v = h.specialize(ArithPoint(2))
    assert (v.residue - one_unit_part(2, P, NP).residue) % P**v.N == 0
    assert half_diamond(1, P, NP, M).coeffs[0] == 1


def test_specialize_examples():
    one_plus_x = IwasawaElt(P, NP, M, (1, 1))
    v = one_plus_x.specialize(ArithPoint(3))
    assert v.residue == pow(1 + P, 3, P**v.N)
    assert IwasawaElt.gen(P, NP, M).specialize(ArithPoint(0)).residue == 0


@given(units, units, st.sampled_from([0, 5]))
def test_diamond_homomorphism(z1, z2, c0):
    c = weight_point(12 + 10 * c0, P, NP)
    assert diamond(z1 * z2, P, NP, M, c) == diamond(z1, P, NP, M, c) * diamond(z2, P, NP, M, c)
    h = half_diamond(z1, P, NP, M, c)
    assert h * h == diamond(z1, P, NP, M, c)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_grouplike_homomorphism(a, b):
    u = PadicInt(P, NP + 6, 1 + P * a)
    v = PadicInt(P, NP + 6, 1 + P * b)
    assert grouplike(u * v, M, NP) == grouplike(u, M, NP) * grouplike(v, M, NP)


coeff_lists = st.lists(st.integers(0, P**NP - 1), min_size=M, max_size=M)


@given(coeff_lists, coeff_lists, st.integers(1, 60))
def test_specialize_ring_homomorphism(a, b, k):
    f, g = IwasawaElt(P, NP, M, tuple(a)), IwasawaElt(P, NP, M, tuple(b))
    x = weight_point(k, P, NP)
    fg = (f * g).eval_at(x)
    prod = f.eval_at(x) * g.eval_at(x)
    n = min(fg.N, prod.N)
    assert (fg.residue - prod.residue) % P**n == 0


def test_newton_examples():
    nodes = [weight_point(k, P, NP) for k in node_weights(12, P, 4)]
    c, prec = newton_interpolate(nodes, [7, 7, 7, 7], P, NP, nodes[0])
    assert [row[0] for row in c] == [7, 0, 0, 0]
    c, prec = newton_interpolate(nodes, nodes, P, NP, 0)
    assert [row[0] % P**prec for row in c] == [0, 1, 0, 0]
    assert prec == NP - 3


@given(st.lists(st.integers(0, P**NP - 1), min_size=1, max_size=6), st.randoms())
def test_newton_round_trip(poly, rnd):
    nodes = [weight_point(k, P, NP) for k in node_weights(12, P, len(poly))]
    center = nodes[0]
    vals = [evaluate_poly(poly, x, center, P**NP) for x in nodes]
    c, prec = newton_interpolate(nodes, vals, P, NP, center)
    m = P**prec
    assert [row[0] % m for row in c] == [a % m for a in poly]


def _poly3(f, xs):
    m = P**f.Np
    ys = [(x - c) % m for x, c in zip(xs, f.centers)]
    return sum(
        f.get(i, j, k) * ys[0] ** i * ys[1] ** j * ys[2] ** k
        for i in range(f.shape[0])
        for j in range(f.shape[1])
        for k in range(f.shape[2])
    ) % m


def test_newton_3_round_trip():
    rnd = random.Random(5)
    nodes = tuple(tuple(weight_point(k, P, NP) for k in node_weights(k0, P, n)) for k0, n in ((32, 3), (12, 2), (12, 2)))
    centers = tuple(n[0] for n in nodes)
    f = REllt(P, NP, (3, 2, 2), tuple(rnd.randrange(P**NP) for _ in range(12)), centers)
    vals = {}
    for i, x in enumerate(nodes[0]):
        for j, y in enumerate(nodes[1]):
            for k, z in enumerate(nodes[2]):
                vals[(i, j, k)] = [_poly3(f, (x, y, z))]
    flat, shape, prec = newton_interpolate_3(nodes, vals, P, NP, centers)
    g = REllt(P, prec, shape, tuple(v[0] for v in flat), centers)
    assert shape == (3, 2, 2) and prec == NP - 4
    assert g == f


def test_exp_log():
    zero = IwasawaElt.zero(P, NP, M)
    assert exp_series(zero).coeffs[0] == 1
    f = IwasawaElt(P, NP, M, (P, 2 * P, P**2))
    g = exp_series(log_series(exp_series(f)))
    assert g == exp_series(f)
    e1 = exp_series(IwasawaElt.const(P, P, NP, M))
    e2 = exp_series(IwasawaElt.const(2 * P, P, NP, M))
    assert e1 * e1 == e2


def test_coleman_reparam():
    t = teichmuller(3, P, NP).residue
    c = coleman_reparam(t, 12, PadicInt(P, NP, P), M)
    assert c.coeffs == (1,) + (0,) * (M - 1)
    c0 = coleman_reparam(3, 12, PadicInt(P, NP, 0), M)
    assert c0.coeffs[0] == pow(one_unit_part(3, P, NP).residue, 12, P**NP)
    assert all(a == 0 for a in c0.coeffs[1:])
    eps = PadicInt(P, NP, P)
    c1 = coleman_reparam(3, 12, eps, 10)
    # weight k0 + p sits at b = p / eps = 1
    v = c1.eval_at(1)
    want = pow(one_unit_part(3, P, NP).residue, 12 + P, P**v.N)
    assert v.N >= 3 and (v.residue - want) % P**v.N == 0


@given(st.lists(st.integers(0, P**6), min_size=8, max_size=8), st.lists(st.integers(0, P**6), min_size=8, max_size=8))
def test_rellt_ring(a, b):
    s = (2, 2, 2)
    x, y = REllt(P, 6, s, tuple(a)), REllt(P, 6, s, tuple(b))
    assert x * y == y * x
    assert (x + y) * x == x * x + y * x
    if x.is_unit():
        assert x * x.inverse() == 1
