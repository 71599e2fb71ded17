"""Three-variable triple product construction in the unbalanced region.

Variables: X1 for F (the primitive Hida family), X2 and X3 for G2 and G3.  Elements
of the working ring R are ``REllt``; centers sit at the first grid node of each axis.

Per-point path (the classical side):

    H(Q) = G2*(k2) * d^r (G3*(k3) | Theta_Q),   r = (k1 - k2 - k3) / 2
    e H(Q) = e [G2*, G3*|Theta_Q]_r / C(k1 - 2, r)     (e kills the image of d)

The bracket is a classical form of weight k1; one or more U_p steps move it into the
span of the certified Katz basis, where e is a matrix.  U_p is invertible on the
ordinary part, so the steps are undone there.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, gcd

from .characters import DirichletChar, char_decompose
from .errors import (
    ConfigError,
    DataError,
    DegeneracyError,
    DomainError,
    ExtensionNeeded,
    HypothesisViolation,
    NormalizationError,
    PrecisionError,
)
from .families import (
    STEINBERG,
    LambdaAdicForm,
    LevelAdjustment,
    adjustment_data,
    classify_local_type,
    level_adjust,
)
from .iwasawa import REllt, diamond, half_diamond, newton_interpolate_3, weight_point
from .linalg import (
    Matrix,
    charpoly,
    mat_inv,
    mat_mul,
    mat_pow,
    mat_vec,
    min_scalar_for_membership,
    poly_eval_matrix,
)
from .ordproj import OrdinaryProjector, coordinates, ordinary_projector
from .padic import PadicInt, QpElt, primitive_root, sqrt_padic, vp, vp_capped
from .qexp import QExp, deplete, op_U, rankin_cohen, theta_twist, twist

log = logging.getLogger(__name__)

Point = tuple[int, int, int]


# ---------------------------------------------------------------------------
# context and hypotheses


@dataclass
class TripleContext:
    """The triple (F, G2, G3) with its levels, characters, grid and precisions."""

    p: int
    F: LambdaAdicForm
    G2: LambdaAdicForm
    G3: LambdaAdicForm
    grid: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    levels: tuple[int, int, int] = (1, 1, 1)
    psi: tuple[DirichletChar, DirichletChar, DirichletChar] | None = None
    a: int | None = None
    Np: int = 8
    B: int = 10
    M: tuple[int, int, int] | None = None
    local_types: dict = field(default_factory=dict)
    nontrivial_L: dict | None = None
    asserted: dict = field(default_factory=lambda: {"2": False, "4": False})
    beta: dict = field(default_factory=dict)
    diamond_checks: tuple[int, ...] = (2, 3, 7)
    adjustment: LevelAdjustment | None = None

    def __post_init__(self) -> None:
        if self.psi is None:
            self.psi = tuple(
                f.nebentypus if f.nebentypus is not None else DirichletChar.trivial(1) for f in (self.F, self.G2, self.G3)
            )
        if self.M is None:
            self.M = tuple(max(1, len(g)) for g in self.grid)

    @property
    def N(self) -> int:
        from math import lcm

        return lcm(*self.levels)

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.M)

    @property
    def centers(self) -> tuple[int, int, int]:
        return tuple(weight_point(g[0], self.p, self.Np) for g in self.grid)

    def points(self) -> list[Point]:
        return [(a, b, c) for a in self.grid[0] for b in self.grid[1] for c in self.grid[2]]


@dataclass
class HypothesisReport:
    status: dict[str, str]
    a: int
    a_solutions: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return all(v in ("pass", "asserted") for v in self.status.values())


def in_unbalanced_region(k1: int, k2: int, k3: int) -> bool:
    return (k1 + k2 + k3) % 2 == 0 and k1 >= k2 + k3


def _omega_exponent(chi: DirichletChar, p: int) -> int:
    """j with chi = omega^j on (Z/p)^x, for a character of modulus p (or 1)."""
    if chi.modulus == 1:
        return 0
    if chi.modulus != p:
        raise DomainError("expected a character modulo p")
    g = primitive_root(p)
    e = chi.exponent(g)
    return e * (p - 1) // chi.order % (p - 1)


def solve_hypothesis_1(psi: Sequence[DirichletChar], p: int) -> tuple[int, ...]:
    """All a in [0, p - 1) with psi1 psi2 psi3 = omega^{2a}; empty if none."""
    prod = psi[0] * psi[1] * psi[2]
    chi_p, tame = char_decompose(prod, p)
    if not tame.minimal_order().is_trivial():
        return ()
    j = _omega_exponent(chi_p, p)
    return tuple(a for a in range(p - 1) if (2 * a - j) % (p - 1) == 0)


def _family_diamond(G: LambdaAdicForm, n: int) -> object:
    ov = getattr(G, "diamond_table", None)
    if ov is not None:
        return ov.get(n)
    if G.grid.diamond_kind == "lambda":
        return diamond(n, G.p, G.Np, G.M, G.center)
    return None


def validate_hypotheses(ctx: TripleContext) -> HypothesisReport:
    """Check the computable hypotheses; (2) and (4) are recorded as assertions."""
    p = ctx.p
    status: dict[str, str] = {}
    for g in ctx.grid:
        if not g:
            raise ConfigError("every grid axis needs at least one weight")
    for Q in ctx.points():
        if not in_unbalanced_region(*Q):
            raise ConfigError(f"grid point {Q} is outside the unbalanced region")
    # (1)
    sols = solve_hypothesis_1(ctx.psi, p)
    if not sols:
        raise HypothesisViolation("1", "psi1 psi2 psi3 is not an even power of omega")
    if ctx.a is not None and ctx.a % (p - 1) not in sols:
        raise HypothesisViolation("1", f"a = {ctx.a} does not solve psi1 psi2 psi3 = omega^(2a)")
    a = sols[0] if ctx.a is None else ctx.a % (p - 1)
    status["1"] = "pass"
    # (3)
    g = gcd(gcd(ctx.levels[0], ctx.levels[1]), ctx.levels[2])
    if any(g % (q * q) == 0 for q in range(2, int(g**0.5) + 1)):
        raise HypothesisViolation("3", f"gcd(N1, N2, N3) = {g} is not square free")
    status["3"] = "pass"
    # (5): the diamond elements of G2, G3 must specialise to (n omega^{-1}(n))^k at the grid
    for i, G in ((2, ctx.G2), (3, ctx.G3)):
        for n in ctx.diamond_checks:
            if n % p == 0:
                continue
            d = _family_diamond(G, n)
            if d is None:
                raise HypothesisViolation("5", f"G{i} has no diamond element for n = {n}")
            for k in ctx.grid[i - 1]:
                x = weight_point(k, p, G.Np)
                val = d.eval_at(x)
                from .padic import one_unit_part

                want = pow(one_unit_part(n, p, G.Np).residue, k, p**val.N)
                if (val.residue - want) % p**val.N:
                    raise HypothesisViolation("5", f"<{n}> of G{i} does not specialise correctly at weight {k}")
    status["5"] = "pass"
    # (6): a(p, G(m)) != 0 or G(m) primitive, at the grid weights
    for i, G in ((2, ctx.G2), (3, ctx.G3)):
        for k in ctx.grid[i - 1]:
            f, prec = G.specialize_at(weight_point(k, p, G.Np), B=p)
            if int(f.coeffs[p]) % p**prec == 0 and not G.primitive_at_p:
                raise HypothesisViolation("6", f"a(p, G{i}) vanishes at weight {k} and G{i} is not primitive there")
    status["6"] = "pass"
    # (7)
    for l in _prime_factors(ctx.N):
        for name, G in (("F", ctx.F), ("G2", ctx.G2), ("G3", ctx.G3)):
            if l > G.B:
                raise DataError(f"{name} is not known to q^{l}")
            if all(c == 0 for c in G.coeffs[l].coeffs):
                raise HypothesisViolation("7", f"a({l}, {name}) = 0")
        for i, (G, N_i) in enumerate(zip((ctx.F, ctx.G2, ctx.G3), ctx.levels)):
            if N_i % l == 0:
                classify_local_type(N_i, ctx.psi[i], l, G.coeffs[l])
    status["7"] = "pass"
    for h in ("2", "4"):
        status[h] = "asserted" if ctx.asserted.get(h) else "unasserted"
    return HypothesisReport(status, a, sols)


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# Theta


@dataclass(frozen=True)
class ThetaChar:
    """Theta(z) = omega^j0(z) <z>_1^{1/2} (<z>_2 <z>_3)^{-1/2}, with omega^j0 = psi_{1,(p)} omega^{-a}."""

    p: int
    j0: int
    Np: int
    shape: tuple[int, int, int]
    centers: tuple[int, int, int]

    def _omega(self, z: int, j: int) -> int:
        from .padic import teichmuller

        return pow(teichmuller(z, self.p, self.Np).residue, j % (self.p - 1), self.p**self.Np)

    def _axis(self, elt, axis: int) -> REllt:
        return REllt.from_iwasawa(elt, axis, self.shape, self.centers)

    def __call__(self, z: int) -> REllt:
        p, Np = self.p, self.Np
        if z % p == 0:
            return REllt.zero(p, Np, self.shape, self.centers)
        s = self.shape
        c = self.centers
        h1 = half_diamond(z, p, Np, s[0], c[0])
        h2 = half_diamond(z, p, Np, s[1], c[1]).inverse()
        h3 = half_diamond(z, p, Np, s[2], c[2]).inverse()
        return self._axis(h1, 0) * self._axis(h2, 1) * self._axis(h3, 2) * self._omega(z, self.j0)

    def squared_closed_form(self, z: int) -> REllt:
        """psi_{1,(p)}^2 omega^{-2a}(z) <z>_1 (<z>_2 <z>_3)^{-1}."""
        p, Np, s, c = self.p, self.Np, self.shape, self.centers
        d1 = diamond(z, p, Np, s[0], c[0])
        d2 = diamond(z, p, Np, s[1], c[1]).inverse()
        d3 = diamond(z, p, Np, s[2], c[2]).inverse()
        return self._axis(d1, 0) * self._axis(d2, 1) * self._axis(d3, 2) * self._omega(z, 2 * self.j0)

    def exponent_at(self, Q: Point) -> int:
        """Theta_Q = omega^(j0 - r_Q) for points with trivial finite parts."""
        k1, k2, k3 = Q
        if (k1 - k2 - k3) % 2:
            raise ConfigError("odd weight sum: r_Q is not an integer")
        return (self.j0 - (k1 - k2 - k3) // 2) % (self.p - 1)

    def character_at(self, Q: Point) -> DirichletChar:
        return DirichletChar.teichmuller_power(self.p, self.exponent_at(Q))


def theta_char(ctx: TripleContext, a: int | None = None, finite_parts: Sequence[int] = (0, 0, 0)) -> ThetaChar:
    p = ctx.p
    if any(e % p for e in finite_parts):
        # eps^(1/2) exists for the odd p-power order finite parts; only trivial ones are wired up
        raise ConfigError("points with nontrivial finite part are not supported by the per-point path")
    if a is None:
        a = validate_hypotheses(ctx).a
    psi1_p, _ = char_decompose(ctx.psi[0], p)
    j0 = (_omega_exponent(psi1_p, p) - a) % (p - 1)
    return ThetaChar(p, j0, ctx.Np, ctx.shape, ctx.centers)


def r_of(Q: Point) -> int:
    return (Q[0] - Q[1] - Q[2]) // 2


# ---------------------------------------------------------------------------
# H over R


def _family_to_R(G: LambdaAdicForm, axis: int, ctx: TripleContext, B: int) -> list[REllt]:
    c = ctx.centers[axis]
    m = ctx.p ** min(G.Np, ctx.Np)
    if (G.center - c) % m:
        raise DomainError(f"family on axis {axis + 1} is centered away from the first grid weight")
    out = []
    for n in range(B + 1):
        e = G.coeffs[n].reduce(min(G.Np, ctx.Np), min(G.M, ctx.shape[axis]))
        r = REllt.from_iwasawa(e, axis, ctx.shape, ctx.centers)
        out.append(REllt(ctx.p, min(G.Np, ctx.Np), ctx.shape, r.coeffs, ctx.centers))
    return out


def adjusted_families(ctx: TripleContext) -> tuple[LambdaAdicForm, LambdaAdicForm, LevelAdjustment]:
    adj = ctx.adjustment
    if adj is None:
        adj = adjustment_data(ctx.levels, ctx.local_types, ctx.nontrivial_L)
        adj.beta.update(ctx.beta)
        ctx.adjustment = adj
    G2s = level_adjust(ctx.G2, adj, 1) if adj.sigma_IIb0[1] or adj.d[1] > 1 else ctx.G2
    G3s = level_adjust(ctx.G3, adj, 2) if adj.sigma_IIb0[2] or adj.d[2] > 1 else ctx.G3
    return G2s, G3s, adj


def build_H(ctx: TripleContext, B: int | None = None, theta: ThetaChar | None = None) -> QExp:
    """H = G2* (G3* | [Theta]) as a q-series over R."""
    B = ctx.B if B is None else B
    theta = theta_char(ctx) if theta is None else theta
    G2s, G3s, _ = adjusted_families(ctx)
    g2 = _family_to_R(G2s, 1, ctx, B)
    g3 = QExp(tuple(_family_to_R(G3s, 2, ctx, B)))
    g3t = theta_twist(theta, g3, ctx.p).coeffs
    zero = REllt.zero(ctx.p, ctx.Np, ctx.shape, ctx.centers)
    out = []
    for n in range(B + 1):
        acc = zero
        for i in range(1, n):
            a, b = g2[i], g3t[n - i]
            if any(a.coeffs) and isinstance(b, REllt) and any(b.coeffs):
                acc = acc + a * b
        out.append(acc)
    return QExp(tuple(out))


def specialize_series(f: QExp, Q: Point, p: int, Np: int) -> tuple[QExp, int]:
    xs = [weight_point(k, p, Np) for k in Q]
    vals, prec = [], Np
    for c in f.coeffs:
        if isinstance(c, REllt):
            v = c.eval_at(xs)
            vals.append(v.residue)
            prec = min(prec, v.N)
        else:
            vals.append(int(c))
    return QExp(tuple(vals), p**prec), prec


# ---------------------------------------------------------------------------
# congruence functional


@dataclass
class CongruenceData:
    eta: PadicInt
    eta_valuation: int
    projector: Matrix  # eta * 1_F, integral
    eigenvalue: int
    prec: int
    gorenstein_symptom: bool = False

    def apply(self, v: Sequence[int]) -> list[int]:
        m = self.eta.p**self.prec
        return mat_vec(self.projector, v, m)


def _newton_root(poly: list[int], x0: int, p: int, N: int) -> int:
    """Root of poly (low to high) near x0 by Newton, when v(f(x0)) > 2 v(f'(x0))."""
    mod = p ** (2 * N + 4)

    def f(x):
        return sum(c * pow(x, i, mod) for i, c in enumerate(poly)) % mod

    def df(x):
        return sum(i * c * pow(x, i - 1, mod) for i, c in enumerate(poly) if i) % mod

    x = x0 % mod
    vd = vp_capped(df(x), p, 2 * N + 4)
    if vp_capped(f(x), p, 2 * N + 4) <= 2 * vd:
        raise DegeneracyError("the target eigenvalue does not single out a simple root")
    for _ in range(4 * N.bit_length() + 8):
        fx = f(x)
        if fx % p ** (N + vd) == 0:
            break
        d = df(x)
        dv = vp(d, p)
        x = (x - (fx // p**dv) * pow(d // p**dv, -1, mod)) % mod
    return x % p**N


def congruence_functional(
    hecke: Sequence[Matrix], target: int, p: int, N: int, check_all: bool = True
) -> CongruenceData:
    """1_F as the spectral projector of hecke[0] at the eigenvalue near ``target``; eta by membership.

    1_F = S(T) / S(lambda) with charpoly(T) = (X - lambda) S(X).  eta is the least
    p-power with eta 1_F in the Z_p-algebra generated by the matrices.
    """
    T = hecke[0]
    d = len(T)
    mod = p**N
    if d == 0:
        raise DegeneracyError("empty ordinary space")
    cp = charpoly(T, mod)  # low to high, monic
    lam = _newton_root(cp, target, p, N)
    # synthetic division by (X - lam)
    S = [0] * d
    acc = 0
    for i in range(d, 0, -1):
        acc = (acc * lam + cp[i]) % mod
        S[i - 1] = acc
    SA = poly_eval_matrix(S, T, mod)
    Sl = sum(c * pow(lam, i, mod) for i, c in enumerate(S)) % mod
    vS = vp_capped(Sl, p, N)
    if vS >= N:
        raise DegeneracyError("eigenvalue is not simple at working precision")
    # algebra generated by the matrices: monomials up to degree d - 1
    gens = [[[int(i == j) for j in range(d)] for i in range(d)]]
    frontier = list(gens)
    for _ in range(max(0, d - 1)):
        nxt = []
        for A in frontier:
            for Hm in hecke:
                nxt.append(mat_mul(A, Hm, mod))
        gens.extend(nxt)
        frontier = nxt
    if not check_all:
        gens = [mat_pow(T, i, mod) for i in range(d)]
    flat = [[x for row in A for x in row] for A in gens]
    unit = (Sl // p**vS) % mod
    # 1_F = SA / (unit p^vS)
    target_vec = [x * pow(unit, -1, mod) % mod for row in SA for x in row]
    e = min_scalar_for_membership(target_vec, vS, flat, p, N)
    Np = N - vS
    m2 = p**Np
    # eta 1_F = p^(e - vS) SA / unit
    if e >= vS:
        P = [[x * pow(unit, -1, mod) * p ** (e - vS) % m2 for x in row] for row in SA]
    else:
        P = [[(x // p ** (vS - e)) * pow(unit, -1, mod) % m2 for x in row] for row in SA]
    return CongruenceData(PadicInt(p, Np, p**e), e, P, lam, Np, gorenstein_symptom=(e != vS))


# ---------------------------------------------------------------------------
# per-point classical path


@dataclass
class OrdinaryCache:
    N: int
    ops: dict[int, OrdinaryProjector] = field(default_factory=dict)

    def get(self, p: int, k: int) -> OrdinaryProjector:
        if k not in self.ops:
            self.ops[k] = ordinary_projector(p, k, self.N)
        return self.ops[k]


@dataclass
class OrdinarySubspace:
    V: Matrix  # D x d, columns span image(e)
    rows: list[int]  # rows of V forming an invertible d x d block mod p
    A: Matrix  # U_p restricted, d x d

    @property
    def dim(self) -> int:
        return len(self.A)


def ordinary_subspace(op: OrdinaryProjector) -> OrdinarySubspace:
    p, N = op.basis.p, op.basis.N
    mod = p**N
    e = op.e
    D = len(e)
    cols = [[e[i][j] for i in range(D)] for j in range(D)]
    chosen, rows = [], []
    M = []  # reduced copies mod p for independence
    for j, col in enumerate(cols):
        v = [x % p for x in col]
        for piv, r in zip(rows, M):
            if v[piv]:
                f = v[piv] * pow(r[piv], -1, p) % p
                v = [(a - f * b) % p for a, b in zip(v, r)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is not None:
            chosen.append(j)
            rows.append(nz)
            M.append(v)
    d = len(chosen)
    V = [[cols[j][i] for j in chosen] for i in range(D)]
    if d == 0:
        return OrdinarySubspace(V, [], [])
    blk = [[V[r][c] for c in range(d)] for r in rows]
    blk_inv = mat_inv(blk, p, N)
    AV = mat_mul(op.up.A, V, mod)
    A_ord = mat_mul(blk_inv, [AV[r] for r in rows], mod)
    return OrdinarySubspace(V, rows, A_ord)


def _sub_coords(sub: OrdinarySubspace, vec: Sequence[int], p: int, N: int) -> list[int]:
    mod = p**N
    blk = [[sub.V[r][c] for c in range(sub.dim)] for r in sub.rows]
    return mat_vec(mat_inv(blk, p, N), [vec[r] for r in sub.rows], mod)


@dataclass
class PointResult:
    Q: Point
    r: int
    theta_exponent: int
    t: int
    eH: QExp  # e H(Q) to q^B
    value: int  # a(1, eta 1_F e H(Q))
    prec: int
    eta_valuation: int
    alpha: int
    ordinary_rank: int
    binom_loss: int


def point_value(
    ctx: TripleContext,
    Q: Point,
    theta: ThetaChar,
    cache: OrdinaryCache | None = None,
    g2: QExp | None = None,
    g3: QExp | None = None,
    t_max: int = 3,
) -> PointResult:
    """a(1, eta 1_F e H(Q)) and e H(Q), computed with classical forms at Q."""
    p, N = ctx.p, ctx.Np
    mod = p**N
    k1, k2, k3 = Q
    if not in_unbalanced_region(*Q):
        raise ConfigError(f"{Q} is outside the unbalanced region")
    r = r_of(Q)
    cache = cache or OrdinaryCache(N)
    op = cache.get(p, k1)
    Bk = op.basis.B
    G2s, G3s, adj = adjusted_families(ctx)
    if adj.d[0] > 1 or adj.sigma_IIb0[0]:
        raise ConfigError("d_1 > 1: the per-point path needs H^aux, which requires tame level N_1 data")
    for t in range(1, t_max + 1):
        Bin = p**t * Bk
        if g2 is None or g2.B < Bin:
            f2, pr2 = G2s.specialize_at(weight_point(k2, p, G2s.Np), Bin)
        else:
            f2, pr2 = g2.truncate(Bin), N
        if g3 is None or g3.B < Bin:
            f3, pr3 = G3s.specialize_at(weight_point(k3, p, G3s.Np), Bin)
        else:
            f3, pr3 = g3.truncate(Bin), N
        W = min(N, pr2, pr3)
        if W <= 0:
            raise PrecisionError(f"family specialisations at {Q} carry no precision")
        f2, f3 = f2.reduce(mod), f3.reduce(mod)
        K = deplete(twist(theta.character_at(Q), f3, p), p)
        h = rankin_cohen(f2, K, k2, k3, r)
        u = h
        for _ in range(t):
            u = op_U(p, u)
        c, resid = coordinates(op.basis, u.truncate(Bk))
        if resid >= N:
            break
    else:
        raise PrecisionError(f"U_p^{t_max} of H({Q}) is not in the certified Katz span", suggestion=t_max + 1)
    ec = mat_vec(op.e, c, mod)
    sub = ordinary_subspace(op)
    if sub.dim == 0:
        raise DegeneracyError(f"no ordinary forms of weight {k1}")
    y = _sub_coords(sub, ec, p, N)
    # undo U_p^t on the ordinary part
    Ainv = mat_inv(sub.A, p, N)
    y0 = mat_vec(mat_pow(Ainv, t, mod), y, mod)
    # 1_F: the U_p eigenline of F at k1, picked by the residual a(p, F)
    fk, _ = ctx.F.specialize_at(weight_point(k1, p, ctx.F.Np), B=p)
    cong = congruence_functional([sub.A], int(fk.coeffs[p]) % p, p, N)
    z = cong.apply(y0)
    C = comb(k1 - 2, r)
    vC = vp(C, p) if C % p == 0 else 0
    Cu = pow(C // p**vC, -1, mod)
    W2 = min(W, cong.prec) - vC
    if W2 <= 0:
        raise PrecisionError(f"binomial C({k1 - 2}, {r}) exhausts the precision", loss=vC)
    m2 = p**W2

    def _expand(coords, B):
        full = mat_vec(sub.V, coords, mod)
        out = [0] * (B + 1)
        for cf, el in zip(full, op.basis.elements):
            if cf:
                for n in range(B + 1):
                    out[n] += cf * el.coeffs[n]
        return out

    def _divC(x):
        x %= p ** (W2 + vC)
        if x % p**vC:
            raise PrecisionError("e H(Q) is not divisible by the binomial valuation")
        return (x // p**vC) * Cu % m2

    Bout = min(ctx.B, Bk)
    eh = [_divC(x) for x in _expand(y0, Bout)]
    val = _divC(_expand(z, 1)[1])
    return PointResult(
        Q, r, theta.exponent_at(Q), t, QExp(tuple(eh), m2), val, W2, cong.eta_valuation, cong.eigenvalue, sub.dim, vC
    )


# ---------------------------------------------------------------------------
# interpolation: H^ord, H^aux, L_raw


@dataclass
class LValueElt:
    value: REllt
    tag: str  # "raw" or "normalized"
    nodes: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    sqrt_ext: int = 1  # value stands for sqrt(sqrt_ext) * value
    fudge: tuple = ()

    def specialize(self, Q: Point) -> PadicInt:
        return specialize_with_nodes(self.value, self.nodes, Q)

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "sqrt_extension": self.sqrt_ext,
            "nodes": [list(n) for n in self.nodes],
            "value": self.value.to_json(),
        }


def specialize_with_nodes(f: REllt, nodes, Q: Point) -> PadicInt:
    """Value at Q with the interpolation precision min_a sum_i v(x_a - x_{a,i})."""
    p, P = f.p, f.Np
    xs = [weight_point(k, p, P) for k in Q]
    prec = P
    for x, ns in zip(xs, nodes):
        s = sum(vp_capped(x - weight_point(k, p, P), p, P) for k in ns)
        prec = min(prec, s)
    m = p**prec
    acc = 0
    s = f.shape
    ys = [(x - c) % p**P for x, c in zip(xs, f.centers)]
    for i in reversed(range(s[0])):
        aj = 0
        for j in reversed(range(s[1])):
            ak = 0
            for k in reversed(range(s[2])):
                ak = (ak * ys[2] + f.get(i, j, k)) % p**P
            aj = (aj * ys[1] + ak) % p**P
        acc = (acc * ys[0] + aj) % p**P
    return PadicInt(p, prec, acc % m)


@dataclass
class GridRun:
    theta: ThetaChar
    results: dict[Point, PointResult]
    prec: int


def _point_job(args) -> PointResult:
    ctx, Q, theta = args
    return point_value(ctx, Q, theta)


def run_grid(ctx: TripleContext, cache: OrdinaryCache | None = None, workers: int = 1) -> GridRun:
    """Per-point values over the grid; with ``workers > 1`` the points run in separate processes."""
    theta = theta_char(ctx)
    pts = ctx.points()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            vals = list(ex.map(_point_job, [(ctx, Q, theta) for Q in pts]))
    else:
        cache = cache or OrdinaryCache(ctx.Np)
        vals = [point_value(ctx, Q, theta, cache) for Q in pts]
    res = dict(zip(pts, vals))
    for Q, v in res.items():
        log.info("point %s: value %s mod p^%s (t = %s)", Q, v.value, v.prec, v.t)
    return GridRun(theta, res, min(r.prec for r in res.values()))


def _interp(ctx: TripleContext, vals: dict[Point, list[int]], prec: int) -> tuple[list[REllt], int]:
    p = ctx.p
    nodes = tuple(tuple(weight_point(k, p, prec) for k in g) for g in ctx.grid)
    keyed = {}
    for i, a in enumerate(ctx.grid[0]):
        for j, b in enumerate(ctx.grid[1]):
            for k, c in enumerate(ctx.grid[2]):
                keyed[(i, j, k)] = [x % p**prec for x in vals[(a, b, c)]]
    centers = tuple(n[0] for n in nodes)
    flat, shape, P = newton_interpolate_3(nodes, keyed, p, prec, centers)
    L = len(flat[0])
    out = [REllt(p, P, shape, tuple(flat[t][n] for t in range(len(flat))), centers) for n in range(L)]
    return out, P


def H_ord(ctx: TripleContext, run: GridRun | None = None) -> tuple[QExp, int]:
    """Interpolation of the per-point e H(Q) coefficientwise; returns (series over R, precision)."""
    run = run or run_grid(ctx)
    B = min(len(r.eH.coeffs) for r in run.results.values()) - 1
    vals = {Q: list(r.eH.coeffs[: B + 1]) for Q, r in run.results.items()}
    coeffs, P = _interp(ctx, vals, run.prec)
    return QExp(tuple(coeffs)), P


def H_aux(ctx: TripleContext, Hord: QExp, adj: LevelAdjustment | None = None, B: int | None = None) -> QExp:
    """sum_I (-1)^|I| psi_{1,(p)}(n_I / d1) <n_I / d1>_1 d1 / (beta_I(F) n_I) U_{d1 / n_I} H^ord."""
    from itertools import combinations

    adj = adj or adjusted_families(ctx)[2]
    d1 = adj.d[0]
    primes = sorted(adj.sigma_IIb0[0])
    if d1 == 1 and not primes:
        return Hord
    p = ctx.p
    first = next(c for c in Hord.coeffs if isinstance(c, REllt))
    Np, shape, centers = first.Np, first.shape, first.centers
    mod = p**Np
    psi1_p, _ = char_decompose(ctx.psi[0], p)
    Bmax = (Hord.B // d1) if B is None else B
    out = [REllt.zero(p, Np, shape, centers) for _ in range(Bmax + 1)]
    for s in range(len(primes) + 1):
        for I in combinations(primes, s):
            nI = 1
            for l in I:
                nI *= l
            m = d1 // nI
            coef = REllt.const((-1) ** s * d1 * pow(nI, -1, mod), p, Np, shape, centers)
            ch = psi1_p.value(nI, p, Np).residue * pow(psi1_p.value(d1, p, Np).residue, -1, mod)
            coef = coef * ch
            dd = diamond(nI, p, Np, shape[0], centers[0]) * diamond(d1, p, Np, shape[0], centers[0]).inverse()
            coef = coef * REllt.from_iwasawa(dd, 0, shape, centers)
            for l in I:
                if (l, 0) not in adj.beta:
                    raise DataError(f"no root beta_{l}(F)")
                coef = coef * REllt.from_iwasawa(adj.beta[(l, 0)].inverse(), 0, shape, centers)
            for n in range(Bmax + 1):
                if m * n <= Hord.B:
                    out[n] = out[n] + coef * Hord.coeffs[m * n]
    return QExp(tuple(out))


def L_raw(ctx: TripleContext, run: GridRun | None = None) -> LValueElt:
    """a(1, eta 1_F Tr H^aux), assembled from per-point values and interpolated over the grid."""
    if ctx.N != ctx.levels[0]:
        raise ConfigError("N != N_1: supply TraceData and use trace_then_project per point")
    run = run or run_grid(ctx)
    vals = {Q: [r.value] for Q, r in run.results.items()}
    coeffs, P = _interp(ctx, vals, run.prec)
    return LValueElt(coeffs[0], "raw", tuple(tuple(g) for g in ctx.grid))


# ---------------------------------------------------------------------------
# trace from level N to N_1


@dataclass
class TraceData:
    """Level-N ordinary eigen-data: eigenvectors (columns), a tag per vector, pairing constants.

    ``tags[j]`` is "old" for the f-breve oldforms, anything else for other eigen-systems;
    ``pairing[j]`` is the constant c_j with a(1, 1_f Tr v_j) = c_j for old v_j.
    """

    eigvecs: Matrix
    tags: list[str]
    pairing: dict[int, int]


def trace_then_project(
    h: Sequence[int], p: int, N: int, eta: PadicInt, trace: TraceData | None = None, functional=None
) -> PadicInt:
    """eta a(1, 1_f Tr h) for h given in coordinates.

    Without ``trace`` (N = N_1) the supplied ``functional`` (coordinates -> a(1, 1_f .)) is used.
    Otherwise h is decomposed in the level-N eigenbasis; old components map through the
    pairing constants and the rest are killed by 1_f.
    """
    mod = p**N
    if trace is None:
        if functional is None:
            raise DataError("N = N_1 needs the level-N_1 functional")
        return PadicInt(p, N, eta.residue * functional(h))
    V = trace.eigvecs
    d = len(V)
    if any(len(r) != d for r in V):
        raise DegeneracyError("eigenvector matrix is not square")
    try:
        c = mat_vec(mat_inv(V, p, N), h, mod)
    except DomainError as exc:
        raise DegeneracyError("level-N eigenbasis is not a Z_p-basis") from exc
    total = 0
    for j, tag in enumerate(trace.tags):
        if tag == "old":
            if j not in trace.pairing:
                raise DataError(f"no pairing constant for eigenvector {j}")
            total += c[j] * trace.pairing[j]
    return PadicInt(p, N, eta.residue * total)


# ---------------------------------------------------------------------------
# local factors at p


@dataclass(frozen=True)
class HalfPower:
    """value * p^(half / 2)."""

    value: QpElt
    half: int

    def __mul__(self, o: HalfPower) -> HalfPower:
        return HalfPower(self.value * o.value, self.half + o.half)

    def inverse(self) -> HalfPower:
        return HalfPower(self.value.inverse(), -self.half)


@dataclass(frozen=True)
class LocalFactorData:
    """Satake-style parameters of an unramified (or Steinberg) representation at p."""

    tag: str
    params: tuple[HalfPower, ...]


def unitary_satake(a_p: int, beta: int | QpElt, k: int, p: int, relprec: int) -> LocalFactorData:
    """{alpha, beta} p^{(1-k)/2} from arithmetic roots alpha beta = chi(p) p^{k-1}, alpha = a_p."""
    al = QpElt.make(p, a_p, relprec)
    be = beta if isinstance(beta, QpElt) else QpElt.make(p, beta, relprec)
    return LocalFactorData("unramified", (HalfPower(al, 1 - k), HalfPower(be, 1 - k)))


def mod_euler_adjoint(
    alpha: int | QpElt, beta: int | QpElt, p: int, relprec: int, c: int = 0, k: int | None = None, eps: QpElt | None = None
) -> QpElt:
    """Adjoint modified Euler factor: (1 - beta/alpha)(1 - beta/(p alpha)) when c = 0."""
    al = alpha if isinstance(alpha, QpElt) else QpElt.make(p, alpha, relprec)
    be = beta if isinstance(beta, QpElt) else QpElt.make(p, beta, relprec)
    if c == 0:
        if al.is_zero() or al.val != 0:
            raise DomainError("alpha must be a p-adic unit")
        if be.is_zero():
            return QpElt.make(p, 1, relprec)
        q = be / al
        one = QpElt.make(p, 1, relprec + max(0, q.val) + 2)
        out = (one - q) * (one - q * QpElt.make(p, Fraction(1, p), relprec))
        return QpElt(p, out.unit, out.val, min(out.relprec, relprec))
    if eps is None:
        raise DataError("c > 0 needs the local root number as input")
    if k is None:
        raise DataError("c > 0 needs the weight")
    if (c * (k - 2)) % 2:
        raise NormalizationError("p^{c(k/2 - 1)} is not an integral power of p")
    return _pow_qp(al.inverse(), c) * QpElt.make(p, p ** (c * (k - 2) // 2), relprec) * eps


def _pow_qp(x: QpElt, e: int) -> QpElt:
    out = QpElt.make(x.p, 1, x.relprec)
    for _ in range(e):
        out = out * x
    return out


def _euler_terms(pi2: LocalFactorData, pi3: LocalFactorData, chars: Sequence[HalfPower]) -> list[HalfPower]:
    """x a b p^{-1/2} for x in chars, a in pi2, b in pi3."""
    out = []
    for x in chars:
        for a in pi2.params:
            for b in pi3.params:
                out.append(x * a * b * HalfPower(QpElt.make(x.value.p, 1, x.value.relprec), -1))
    return out


def mod_euler_triple(
    pi2: LocalFactorData,
    pi3: LocalFactorData,
    mu: HalfPower,
    mu_other: HalfPower,
    eps_inv: QpElt | None = None,
    ramified: bool = False,
) -> QpElt:
    """Modified Euler factor at p as the product of (1 - beta1 chi a b p^{-1/2})(1 - mu^{-1} a b p^{-1/2}).

    ``mu`` is alpha_{f1,p} chi_Q at p and ``mu_other`` is beta_{f1,p} chi_Q at p.  The
    L-factors of pi2 x pi3 x mu cancel against part of L(1/2, Pi_p).  Every surviving
    term must carry an even half-exponent.
    """
    p = mu.value.p
    rp = mu.value.relprec
    e = eps_inv if eps_inv is not None else QpElt.make(p, 1, rp)
    if ramified:
        if eps_inv is None:
            raise DataError("ramified twist: the epsilon factor must be supplied")
        return e
    out = QpElt.make(p, 1, rp + 4)
    for term in _euler_terms(pi2, pi3, (mu_other, mu.inverse())):
        if term.half % 2:
            raise NormalizationError("odd power of p^(1/2) in an Euler term: point outside the region")
        v = term.value * QpElt.make(p, Fraction(p) ** (term.half // 2), rp)
        out = out * (1 - v)
    return out * e


@dataclass(frozen=True)
class SqrtP:
    """a + b sqrt(p) over Q_p; the literal path's arithmetic."""

    a: QpElt
    b: QpElt

    @staticmethod
    def from_half(h: HalfPower) -> SqrtP:
        p, rp = h.value.p, h.value.relprec
        zero = QpElt(p, 0, rp + 40, 0)
        s = h.half // 2  # floor
        scal = h.value * QpElt.make(p, Fraction(p) ** s, rp)
        return SqrtP(scal, zero) if h.half % 2 == 0 else SqrtP(zero, scal)

    def __mul__(self, o: SqrtP) -> SqrtP:
        p = self.a.p
        return SqrtP(self.a * o.a + self.b * o.b * p, self.a * o.b + self.b * o.a)

    def __sub__(self, o: SqrtP) -> SqrtP:
        return SqrtP(self.a - o.a, self.b - o.b)

    def inverse(self) -> SqrtP:
        p = self.a.p
        n = self.a * self.a - self.b * self.b * p
        ni = n.inverse()
        return SqrtP(self.a * ni, -(self.b * ni))


def mod_euler_triple_literal(
    pi1_chi: Sequence[HalfPower],
    pi2: LocalFactorData,
    pi3: LocalFactorData,
    mu: HalfPower,
    eps_inv: QpElt | None = None,
) -> QpElt:
    """Term-by-term evaluation of eps^{-1} / L(1/2, Pi_p) * L(1/2, pi2 pi3 mu) / L(1/2, pi2 pi3 mu^{-1}).

    All eight local factors of Pi_p and the four of each twisted tensor product are
    formed separately in Q_p(sqrt p) and divided literally.
    """
    p, rp = mu.value.p, mu.value.relprec
    one = SqrtP(QpElt.make(p, 1, rp + 4), QpElt(p, 0, rp + 40, 0))

    def Linv(chars):
        acc = one
        for t in _euler_terms(pi2, pi3, chars):
            acc = acc * (one - SqrtP.from_half(t))
        return acc  # 1 / L

    inv_L_Pi = Linv(pi1_chi)
    L_mu = Linv((mu,)).inverse()
    L_mu_inv = Linv((mu.inverse(),)).inverse()
    val = inv_L_Pi * L_mu * L_mu_inv.inverse()
    if eps_inv is not None:
        val = val * SqrtP(eps_inv, QpElt(p, 0, rp + 40, 0))
    if not val.b.is_zero():
        raise NormalizationError("sqrt(p)-component survives in the Euler factor")
    return val.a


def chi_Q_exponent(Q: Point, a: int, p: int) -> int:
    """chi_Q = omega^((2a - k1 - k2 - k3) / 2) (trivial finite parts)."""
    s = 2 * a - sum(Q)
    if s % 2:
        raise NormalizationError("odd weight sum")
    return (s // 2) % (p - 1)


# ---------------------------------------------------------------------------
# archimedean factor


@dataclass(frozen=True)
class ArchValue:
    """rational * 2^pow2 * pi^powpi (exponents may be half-integers)."""

    rational: Fraction
    pow2: Fraction
    powpi: Fraction

    def __mul__(self, o: ArchValue) -> ArchValue:
        return ArchValue(self.rational * o.rational, self.pow2 + o.pow2, self.powpi + o.powpi)

    def to_float(self) -> float:
        import math

        return float(self.rational) * 2.0 ** float(self.pow2) * math.pi ** float(self.powpi)


def _gamma_symbolic(x: Fraction) -> ArchValue:
    """Gamma(x) for x a positive integer or a half-integer (negative half-integers by recursion)."""
    if x.denominator == 1:
        n = x.numerator
        if n <= 0:
            raise DomainError(f"Gamma has a pole at {n}")
        return ArchValue(Fraction(factorial(n - 1)), Fraction(0), Fraction(0))
    if x.denominator != 2:
        raise DomainError("only integer and half-integer arguments")
    # Gamma(1/2) = sqrt(pi); Gamma(x+1) = x Gamma(x)
    val = Fraction(1)
    y = Fraction(1, 2)
    while y < x:
        val *= y
        y += 1
    while y > x:
        y -= 1
        val /= y
    return ArchValue(val, Fraction(0), Fraction(1, 2))


def gamma_C(s: Fraction) -> ArchValue:
    """Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s)."""
    g = _gamma_symbolic(Fraction(s))
    return ArchValue(Fraction(1), 1 - Fraction(s), -Fraction(s)) * g


def arch_weights(k1: int, k2: int, k3: int) -> tuple[int, tuple[Fraction, Fraction, Fraction]]:
    w = k1 + k2 + k3 - 2
    h = Fraction(k1 + k2 + k3, 2)
    return w, (h - k1, h - k2, h - k3)


def arch_Lfactor(k1: int, k2: int, k3: int, s: Fraction = Fraction(1, 2)) -> ArchValue:
    """Gamma_C(s + w/2) prod_i Gamma_C(s + 1 - k_i^*)."""
    w, ks = arch_weights(k1, k2, k3)
    out = gamma_C(Fraction(s) + Fraction(w, 2))
    for kk in ks:
        out = out * gamma_C(Fraction(s) + 1 - kk)
    return out


# ---------------------------------------------------------------------------
# fudge units and normalisation


@dataclass
class FudgeBlock:
    prime: int
    kind: str
    value: object  # IwasawaElt or REllt
    squared: bool = False


def steinberg_block(a_l, l: int) -> FudgeBlock:
    """-a(l, G) l, a unit of I_i."""
    v = a_l * (-l)
    if v.coeffs[0] % v.p == 0:
        raise NormalizationError(f"Steinberg block at {l} is not a unit")
    return FudgeBlock(l, "steinberg", v)


def principal_block(a_l, l: int, v_l: int, diamond_l, eps_const: int | None, psi_tame_l: int) -> FudgeBlock:
    """a(l)^{-v} <l>^v eps_l(1/2, psi_{(p)}^{-1}) l^{-v/2} psi^{(p)}(l^v); squared when v is odd."""
    if eps_const is None:
        raise DataError(f"epsilon constant at {l} not supplied")
    p, Np = a_l.p, a_l.Np
    mod = p**Np
    base = (a_l.inverse() ** v_l) * (diamond_l**v_l) * (eps_const * pow(psi_tame_l, v_l, mod) % mod)
    if v_l % 2 == 0:
        val = base * pow(l, -(v_l // 2), mod) if v_l else base
        out = FudgeBlock(l, "principal", val)
    else:
        out = FudgeBlock(l, "principal", base * base * pow(l, -v_l, mod), squared=True)
    if out.value.coeffs[0] % p == 0:
        raise NormalizationError(f"principal-series block at {l} is not a unit")
    return out


def fudge_unit(l: int, ctx: TripleContext, eps_constants: dict | None = None) -> list[FudgeBlock]:
    """Blocks epsilon_l^i (i = 2, 3) of the fudge factor at l; an empty list for l not dividing N."""
    if ctx.N % l:
        return []
    eps_constants = eps_constants or {}
    blocks = []
    p = ctx.p
    for i, G in ((1, ctx.G2), (2, ctx.G3)):
        N_i = ctx.levels[i]
        if N_i % l:
            continue
        t = classify_local_type(N_i, ctx.psi[i], l, G.coeffs[l])
        if t == STEINBERG:
            blocks.append(steinberg_block(G.coeffs[l], l))
        else:
            v_l = vp(N_i, l)
            _, tame = char_decompose(ctx.psi[i], p)
            blocks.append(
                principal_block(
                    G.coeffs[l],
                    l,
                    v_l,
                    diamond(l, p, G.Np, G.M, G.center),
                    eps_constants.get((l, i + 1)),
                    tame.value(l, p, G.Np).residue,
                )
            )
    return blocks


def sqrt_R(u: REllt) -> REllt:
    """Square root of a unit of R whose constant term is a square mod p."""
    p, Np = u.p, u.Np
    s0 = sqrt_padic(PadicInt(p, Np, u.coeffs[0])).residue
    y = REllt.const(s0, p, Np, u.shape, u.centers)
    inv2 = pow(2, -1, p**Np)
    for _ in range(2 * (sum(u.shape) + Np).bit_length() + 4):
        y = (y + u * y.inverse()) * inv2
    return y


def _nonresidue(p: int) -> int:
    return -1 if p % 4 == 3 else next(d for d in range(2, p) if pow(d, (p - 1) // 2, p) == p - 1)


def normalize_L(
    L: LValueElt, fudge: Sequence[REllt], psi1_p_minus1: int, allow_extension: bool = False
) -> LValueElt:
    """(-psi_{1,(p)}(-1))^{-1/2} L prod f_q^{-1/2}.

    The square root is taken of u = (-psi(-1))^{-1} prod f_q^{-1}; when u is not a square
    mod p and ``allow_extension`` is set, u = D w with D the fixed non-residue and the
    result carries sqrt(D) symbolically.
    """
    v = L.value
    p, Np = v.p, v.Np
    u = REllt.const(pow(-psi1_p_minus1, -1, p**Np), p, Np, v.shape, v.centers)
    for f in fudge:
        u = u * f.inverse()
    ext = 1
    if pow(u.coeffs[0] % p, (p - 1) // 2, p) != 1:
        if not allow_extension:
            raise ExtensionNeeded(f"{u.coeffs[0] % p} is not a square mod {p}")
        ext = _nonresidue(p)
        u = u * pow(ext, -1, p**Np)
    root = sqrt_R(u)
    return LValueElt(v * root, "normalized", L.nodes, ext, tuple(fudge))


def check_normalization(Lraw: LValueElt, Lnorm: LValueElt, fudge: Sequence[REllt], psi1_p_minus1: int) -> bool:
    """L_norm^2 = (-psi(-1))^{-1} L_raw^2 prod f^{-1}, exactly in truncated R."""
    v = Lraw.value
    lhs = Lnorm.value * Lnorm.value * Lnorm.sqrt_ext
    rhs = v * v * pow(-psi1_p_minus1, -1, v.p**v.Np)
    for f in fudge:
        rhs = rhs * f.inverse()
    return lhs == rhs


# ---------------------------------------------------------------------------
# two-path verification


@dataclass
class TwoPathReport:
    rows: list[dict]

    @property
    def ok(self) -> bool:
        return all(r["pass"] for r in self.rows)


def verify_two_path(ctx: TripleContext, held_out: Sequence[Point], run: GridRun | None = None, min_prec: int = 1) -> TwoPathReport:
    """specialize(L_raw) against the per-point classical computation at grid and held-out points."""
    cache = OrdinaryCache(ctx.Np)
    run = run or run_grid(ctx, cache)
    L = L_raw(ctx, run)
    rows = []
    for Q in list(ctx.points()) + list(held_out):
        direct = run.results.get(Q) or point_value(ctx, Q, run.theta, cache)
        interp = L.specialize(Q)
        prec = min(interp.N, direct.prec)
        ok = prec >= min_prec and (interp.residue - direct.value) % p_pow(ctx.p, prec) == 0
        rows.append(
            {
                "point": Q,
                "held_out": Q not in run.results,
                "interpolated": interp.residue % p_pow(ctx.p, prec),
                "direct": direct.value % p_pow(ctx.p, prec),
                "precision": prec,
                "pass": ok,
            }
        )
    return TwoPathReport(rows)


def p_pow(p: int, n: int) -> int:
    return p ** max(n, 0)


# ---------------------------------------------------------------------------
# local data at a point, from the families


@dataclass
class PointLocalData:
    Q: Point
    alpha: tuple[QpElt, QpElt, QpElt]
    beta: tuple[QpElt, QpElt, QpElt]
    chi_exponent: int

    def satake(self, i: int) -> LocalFactorData:
        k = self.Q[i]
        return LocalFactorData("unramified", (HalfPower(self.alpha[i], 1 - k), HalfPower(self.beta[i], 1 - k)))

    def mu(self) -> tuple[HalfPower, HalfPower]:
        """alpha_{f1,p} chi_Q and beta_{f1,p} chi_Q at p, unitarily normalised (chi_Q unramified)."""
        k = self.Q[0]
        return HalfPower(self.alpha[0], 1 - k), HalfPower(self.beta[0], 1 - k)


def local_data_at(ctx: TripleContext, Q: Point, a: int, relprec: int | None = None) -> PointLocalData:
    """U_p roots of the three specialisations at Q; beta = psi^(p)(p) p^{k-1} / alpha."""
    p = ctx.p
    out_a, out_b = [], []
    for G, k, psi in zip((ctx.F, ctx.G2, ctx.G3), Q, ctx.psi):
        f, prec = G.specialize_at(weight_point(k, p, G.Np), B=p)
        rp = prec if relprec is None else min(prec, relprec)
        al = QpElt.make(p, int(f.coeffs[p]) % p**prec, rp)
        if al.is_zero() or al.val:
            raise DomainError(f"U_p-eigenvalue at weight {k} is not a unit")
        _, tame = char_decompose(psi, p)
        c = tame.value(p, p, rp + k).residue if tame.modulus > 1 else 1
        be = QpElt.make(p, c * p ** (k - 1), rp) * al.inverse()
        out_a.append(al)
        out_b.append(be)
    return PointLocalData(Q, tuple(out_a), tuple(out_b), chi_Q_exponent(Q, a, p))


@dataclass
class EulerReport:
    Q: Point
    adjoint: QpElt
    triple: QpElt
    triple_literal: QpElt
    triple_swapped: QpElt

    @property
    def ok(self) -> bool:
        return self.triple.equals(self.triple_literal) and self.triple.equals(self.triple_swapped)


def euler_factors_at(ctx: TripleContext, Q: Point, a: int, eps_inv: QpElt | None = None) -> EulerReport:
    """Both modified Euler factors at Q, the triple one computed by the product and by the literal ratio."""
    ld = local_data_at(ctx, Q, a)
    ram = ld.chi_exponent % (ctx.p - 1) != 0
    pi2, pi3 = ld.satake(1), ld.satake(2)
    mu, mo = ld.mu()
    adj = mod_euler_adjoint(ld.alpha[0], ld.beta[0], ctx.p, ld.alpha[0].relprec)
    t1 = mod_euler_triple(pi2, pi3, mu, mo, eps_inv, ramified=ram)
    t2 = mod_euler_triple(pi3, pi2, mu, mo, eps_inv, ramified=ram)
    lit = t1 if ram else mod_euler_triple_literal((mu, mo), pi2, pi3, mu, eps_inv)
    return EulerReport(Q, adj, t1, lit, t2)
