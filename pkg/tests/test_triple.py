from dataclasses import replace
from fractions import Fraction
from math import pi

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidatriple.characters import DirichletChar
from hidatriple.errors import (
    ConfigError,
    DataError,
    ExtensionNeeded,
    HypothesisViolation,
    NormalizationError,
)
from hidatriple.families import GridDescriptor
from hidatriple.iwasawa import IwasawaElt, REllt, weight_point
from hidatriple.padic import PadicInt, QpElt, teichmuller
from hidatriple.triple import (
    HalfPower,
    LocalFactorData,
    LValueElt,
    ThetaChar,
    TraceData,
    arch_Lfactor,
    check_normalization,
    chi_Q_exponent,
    congruence_functional,
    fudge_unit,
    gamma_C,
    in_unbalanced_region,
    mod_euler_adjoint,
    mod_euler_triple,
    mod_euler_triple_literal,
    normalize_L,
    r_of,
    solve_hypothesis_1,
    sqrt_R,
    steinberg_block,
    theta_char,
    trace_then_project,
    validate_hypotheses,
)

P = 11


# ---------------------------------------------------------------------------
# hypotheses


def test_flagship_hypotheses(flagship):
    rep = validate_hypotheses(flagship)
    assert rep.a_solutions == (3, 8) and rep.a == 8
    assert rep.status["2"] == rep.status["4"] == "unasserted"
    assert not rep.ok
    ctx = replace(flagship, asserted={"2": True, "4": True})
    assert validate_hypotheses(ctx).ok


def test_solve_hypothesis_1():
    triv = DirichletChar.trivial(1)
    assert solve_hypothesis_1((triv,) * 3, P) == (0, 5)
    w = DirichletChar.teichmuller_power(P, 1)
    assert solve_hypothesis_1((w, triv, triv), P) == ()


def _zeroed(G, n):
    coeffs = list(G.coeffs)
    coeffs[n] = IwasawaElt.zero(G.p, G.Np, G.M, G.center)
    return replace(G, coeffs=coeffs)


def _violations(ctx):
    w = DirichletChar.teichmuller_power(P, 1)
    triv = DirichletChar.trivial(1)
    yield "1", replace(ctx, psi=(w, triv, triv), a=None)
    yield "1", replace(ctx, a=0)
    yield "3", replace(ctx, levels=(4, 4, 4))
    yield "5", replace(ctx, G2=replace(ctx.G2, grid=GridDescriptor((), "coleman")))
    yield "6", replace(ctx, G3=_zeroed(ctx.G3, P))
    G5 = _zeroed(ctx.G2, 5)
    yield "7", replace(ctx, G2=G5, G3=G5, levels=(1, 5, 5))


@pytest.mark.parametrize("idx", range(6))
def test_hypothesis_gate(flagship, idx):
    name, ctx = list(_violations(flagship))[idx]
    with pytest.raises(HypothesisViolation) as exc:
        validate_hypotheses(ctx)
    assert exc.value.name == name


def test_grid_outside_region(flagship):
    with pytest.raises(ConfigError):
        validate_hypotheses(replace(flagship, grid=((22,), (12,), (12,))))
    assert in_unbalanced_region(32, 12, 12) and not in_unbalanced_region(22, 12, 12)
    assert r_of((32, 12, 12)) == 4


# ---------------------------------------------------------------------------
# Theta


def test_theta_at_one(flagship):
    th = theta_char(flagship)
    one = REllt.const(1, P, flagship.Np, flagship.shape, flagship.centers)
    assert th(1) == one
    assert th(11) == REllt.zero(P, flagship.Np, flagship.shape, flagship.centers)


def test_theta_trivial_psi_exponent():
    th = ThetaChar(P, 0, 8, (1, 1, 1), (0, 0, 0))
    # trivial psi, a = 0: Theta_Q = omega^(-4) at (32, 12, 12)
    assert th.exponent_at((32, 12, 12)) == (-4) % 10
    with pytest.raises(ConfigError):
        th.exponent_at((33, 12, 12))


def test_theta_flagship_exponent(flagship):
    # psi_{1,(p)} = omega^2 and a = 8
    assert theta_char(flagship) == _FLAG_THETA


_FLAG_CENTERS = tuple(weight_point(k, P, 8) for k in (32, 12, 12))
_FLAG_THETA = ThetaChar(P, (2 - 8) % 10, 8, (4, 1, 1), _FLAG_CENTERS)


@settings(max_examples=15)
@given(st.integers(1, 500).filter(lambda z: z % P))
def test_theta_square_and_specialization(z):
    th = _FLAG_THETA
    v = th(z)
    assert v * v == th.squared_closed_form(z)
    Q = (42, 12, 12)
    xs = [weight_point(k, P, 8) for k in Q]
    got = v.eval_at(xs)
    # Theta at Q is omega^(j0 - r)(z) z^r
    mod = P**got.N
    want = pow(teichmuller(z, P, 8).residue, th.exponent_at(Q), mod) * pow(z, r_of(Q), mod)
    assert (got.residue - want) % mod == 0 and got.N >= 4


def test_theta_finite_part_rejected(flagship):
    with pytest.raises(ConfigError):
        theta_char(flagship, finite_parts=(1, 0, 0))


# ---------------------------------------------------------------------------
# congruence functional and trace


def test_congruence_one_dim():
    c = congruence_functional([[[5]]], 5, P, 6)
    assert c.eta_valuation == 0 and c.apply([7]) == [7]


@pytest.mark.parametrize("t", [1, 2, 3])
def test_congruence_detects_pt(t):
    T = [[5, 0], [0, 5 + P**t]]
    c = congruence_functional([T], 5, P, 8)
    assert c.eta_valuation == t
    assert c.apply([1, 1])[1] == 0
    assert c.apply([1, 0])[0] == P**t % P**c.prec


def test_trace_then_project():
    eta = PadicInt(P, 6, P)
    v = trace_then_project([2, 3], P, 6, eta, functional=lambda h: h[0])
    assert v.residue == 2 * P
    tr = TraceData([[1, 0], [0, 1]], ["old", "new"], {0: 7})
    assert trace_then_project([2, 3], P, 6, eta, tr).residue == 14 * P
    with pytest.raises(DataError):
        trace_then_project([2, 3], P, 6, eta)


# ---------------------------------------------------------------------------
# Euler factors


@pytest.mark.parametrize("k", [4, 12, 24])
def test_adjoint_eisenstein(k):
    N = 10
    got = mod_euler_adjoint(1, P ** (k - 1), P, N)
    want = QpElt.make(P, (1 - P ** (k - 1)) * (1 - P ** (k - 2)), N)
    assert got.equals(want)


def test_adjoint_degenerate():
    assert mod_euler_adjoint(3, 0, P, 6).equals(QpElt.make(P, 1, 6))
    with pytest.raises(DataError):
        mod_euler_adjoint(3, 1, P, 6, c=1, k=12)


def test_adjoint_delta():
    from hidatriple.classical import delta_qexp, p_stabilize

    alpha = p_stabilize(delta_qexp(30), P, 12, "unit").eigenvalues[P]
    beta = QpElt.make(P, P**11, 12) * QpElt.make(P, alpha, 12).inverse()
    got = mod_euler_adjoint(alpha, beta, P, 12)
    assert got.equals(QpElt.make(P, 1, 10))


def _lf(a, b, k):
    return LocalFactorData("unramified", (HalfPower(QpElt.make(P, a, 8), 1 - k), HalfPower(QpElt.make(P, b * P ** (k - 1), 8), 1 - k)))


units = st.integers(1, 10**5).filter(lambda x: x % P)


@settings(max_examples=30)
@given(units, units, units, units, units)
def test_triple_factor_paths_agree(a1, a2, b2, a3, b3):
    k1, k2, k3 = 32, 12, 14
    pi2, pi3 = _lf(a2, b2, k2), _lf(a3, b3, k3)
    mu = HalfPower(QpElt.make(P, a1, 8), 1 - k1)
    mo = HalfPower(QpElt.make(P, a1 * P ** (k1 - 1), 8), 1 - k1)
    t = mod_euler_triple(pi2, pi3, mu, mo)
    assert t.equals(mod_euler_triple(pi3, pi2, mu, mo))
    assert t.equals(mod_euler_triple_literal((mu, mo), pi2, pi3, mu))


def test_triple_factor_empty_and_parity():
    one = QpElt.make(P, 1, 8)
    empty = LocalFactorData("empty", ())
    mu = HalfPower(one, -31)
    assert mod_euler_triple(empty, empty, mu, mu).equals(one)
    with pytest.raises(NormalizationError):
        mod_euler_triple(_lf(1, 1, 12), _lf(1, 1, 13), mu, mu)
    with pytest.raises(DataError):
        mod_euler_triple(empty, empty, mu, mu, ramified=True)


def test_chi_Q_exponent():
    assert chi_Q_exponent((32, 12, 12), 8, P) == (16 - 56) // 2 % 10
    with pytest.raises(NormalizationError):
        chi_Q_exponent((33, 12, 12), 0, P)


# ---------------------------------------------------------------------------
# archimedean factor


def test_gamma_C():
    assert gamma_C(Fraction(1)).to_float() == pytest.approx(1 / pi)
    assert gamma_C(Fraction(2)).to_float() == pytest.approx(1 / (2 * pi**2))
    assert gamma_C(Fraction(1, 2)).to_float() == pytest.approx(2 * (2 * pi) ** -0.5 * pi**0.5)


def test_arch_flagship_value():
    v = arch_Lfactor(32, 12, 12)
    assert v.to_float() == pytest.approx(246822949499 / 253460 * pi**-2, rel=1e-12)


# ---------------------------------------------------------------------------
# fudge and normalisation


def test_steinberg_block():
    a = IwasawaElt.const(3, P, 6, 2)
    b = steinberg_block(a, 5)
    assert b.value == IwasawaElt.const(-15, P, 6, 2) and b.value.is_unit()
    with pytest.raises(NormalizationError):
        steinberg_block(IwasawaElt.const(P, P, 6, 2), 5)


def test_fudge_level_one(flagship):
    assert fudge_unit(5, flagship) == []


def _L(p, val, Np=6):
    v = REllt(p, Np, (2, 1, 1), (val, 3), (0, 0, 0))
    return LValueElt(v, "raw", ((0, 1), (0,), (0,)))


def test_normalize_square_case():
    # p = 5: -1 is a square
    L = _L(5, 7)
    f = [REllt(5, 6, (2, 1, 1), (4, 1), (0, 0, 0))]
    Ln = normalize_L(L, f, 1)
    assert Ln.sqrt_ext == 1 and check_normalization(L, Ln, f, 1)


def test_normalize_extension_case():
    L = _L(P, 7)
    with pytest.raises(ExtensionNeeded):
        normalize_L(L, [], 1)
    Ln = normalize_L(L, [], 1, allow_extension=True)
    assert Ln.sqrt_ext == -1 and check_normalization(L, Ln, [], 1)
    # psi(-1) = -1 makes the prefactor 1
    assert normalize_L(L, [], -1).sqrt_ext == 1


@settings(max_examples=30)
@given(units, st.integers(0, P**6))
def test_sqrt_R(u0, u1):
    u = REllt(P, 6, (2, 1, 1), (u0, u1), (0, 0, 0))
    sq = u * u
    y = sqrt_R(sq)
    assert y * y == sq
