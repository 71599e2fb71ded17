"""Lambda-adic families of q-expansions.

A family is a q-expansion whose coefficients are ``IwasawaElt`` (all with the same
prime, precision, truncation and center).  Families arise in three ways here:

* closed forms (Lambda-adic Eisenstein series, E^s, CM series from ingested tables);
* interpolation of classical eigenforms on a grid of weights (divided differences);
* operations on families (level adjustment, twisting).

Interpolated families remember their nodes.  The value at a point x is then known
modulo p^min(Np', sum_i v(x - x_i)), since the interpolation remainder of a genuine
Lambda-adic coefficient is the node polynomial times an element of Lambda.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import prod

from .characters import DirichletChar, char_decompose
from .classical import (
    ClassicalForm,
    eisenstein_E_weight1,
    ordinary_eigenforms,
    p_stabilize,
)
from .errors import (
    DataError,
    DomainError,
    HenselError,
    HypothesisViolation,
    PrecisionError,
)
from .iwasawa import ArithPoint, IwasawaElt, diamond, newton_interpolate, weight_point
from .padic import vp, vp_capped, vp_factorial
from .qexp import QExp


@dataclass(frozen=True)
class GridDescriptor:
    """Weights of the interpolation nodes and how <n> is realised."""

    weights: tuple[int, ...] = ()
    diamond_kind: str = "lambda"  # or "coleman"


@dataclass
class LambdaAdicForm:
    p: int
    Np: int
    M: int
    center: int
    coeffs: list[IwasawaElt]
    N: int = 1
    nebentypus: DirichletChar | None = None
    grid: GridDescriptor = field(default_factory=GridDescriptor)
    nodes: tuple[int, ...] = ()
    cuspidal: bool = True
    hida_primitive: bool = False
    primitive_at_p: bool = False
    label: str = ""

    @property
    def B(self) -> int:
        return len(self.coeffs) - 1

    @property
    def qexp(self) -> QExp:
        return QExp(tuple(self.coeffs))

    def coeff(self, n: int) -> IwasawaElt:
        return self.coeffs[n]

    def value_prec(self, x: int) -> int:
        """Certified precision of specialisations at X = x."""
        if self.nodes:
            s = sum(vp_capped(x - xi, self.p, self.Np) for xi in self.nodes)
            return min(self.Np, s)
        return self.coeffs[0].eval_prec(x) if self.coeffs else self.Np

    def specialize_at(self, x: int, B: int | None = None) -> tuple[QExp, int]:
        B = self.B if B is None else B
        prec = self.value_prec(x)
        mod = self.p**prec
        out = []
        y = (x - self.center) % self.p**self.Np
        for c in self.coeffs[: B + 1]:
            acc = 0
            for a in reversed(c.coeffs):
                acc = (acc * y + a) % mod
            out.append(acc)
        return QExp(tuple(out), mod), prec

    def specialize(self, Q: ArithPoint, B: int | None = None) -> tuple[QExp, int]:
        if Q.eps_exp % self.p:
            raise DomainError("use IwasawaElt.specialize for points with finite part")
        return self.specialize_at(weight_point(Q.k, self.p, self.Np), B)

    def map(self, fn) -> LambdaAdicForm:
        return _replace(self, coeffs=[fn(c) for c in self.coeffs])

    def truncate(self, B: int) -> LambdaAdicForm:
        return _replace(self, coeffs=self.coeffs[: B + 1])

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "Np": self.Np,
            "M": self.M,
            "center": self.center,
            "N": self.N,
            "nebentypus": self.nebentypus.to_json() if self.nebentypus else None,
            "grid": {"weights": list(self.grid.weights), "diamond_kind": self.grid.diamond_kind},
            "nodes": list(self.nodes),
            "cuspidal": self.cuspidal,
            "coeffs": [list(c.coeffs) for c in self.coeffs],
            "label": self.label,
        }

    @classmethod
    def from_json(cls, d: dict) -> LambdaAdicForm:
        p, Np, M, c = d["p"], d["Np"], d["M"], d["center"]
        neb = DirichletChar.from_json(d["nebentypus"]) if d.get("nebentypus") else None
        g = d.get("grid", {})
        return cls(
            p,
            Np,
            M,
            c,
            [IwasawaElt(p, Np, M, tuple(v), c) for v in d["coeffs"]],
            d.get("N", 1),
            neb,
            GridDescriptor(tuple(g.get("weights", ())), g.get("diamond_kind", "lambda")),
            tuple(d.get("nodes", ())),
            d.get("cuspidal", True),
            label=d.get("label", ""),
        )


def _replace(F: LambdaAdicForm, **kw) -> LambdaAdicForm:
    from dataclasses import replace

    return replace(F, **kw)


# ---------------------------------------------------------------------------
# interpolation from a grid


def build_family_from_grid(
    specs: Sequence[tuple[ArithPoint, ClassicalForm | QExp]],
    p: int,
    Np: int,
    B: int | None = None,
    N: int = 1,
    nebentypus: DirichletChar | None = None,
    label: str = "",
) -> LambdaAdicForm:
    """Coefficientwise divided differences through the classical forms of ``specs``.

    The expansion is centered at the first node; the returned precision is the
    input precision minus the divided-difference ledger.
    """
    if not specs:
        raise DomainError("empty grid")
    for Q, _ in specs:
        if Q.eps_exp % p:
            raise DomainError("grid nodes must have trivial finite part")
    qs = [f.qexp if isinstance(f, ClassicalForm) else f for _, f in specs]
    if B is None:
        B = min(q.B for q in qs)
    mod = p**Np
    nodes = [weight_point(Q.k, p, Np) for Q, _ in specs]
    vals = [[int(a) % mod for a in q.coeffs[: B + 1]] for q in qs]
    center = nodes[0]
    coeffs, prec = newton_interpolate(nodes, vals, p, Np, center)
    M = len(nodes)
    fam = [IwasawaElt(p, prec, M, tuple(coeffs[j][n] for j in range(M)), center) for n in range(B + 1)]
    return LambdaAdicForm(
        p,
        prec,
        M,
        center % p**prec,
        fam,
        N,
        nebentypus,
        GridDescriptor(tuple(Q.k for Q, _ in specs)),
        tuple(x % p**prec for x in nodes),
        cuspidal=all(int(q.coeffs[0]) % mod == 0 for q in qs),
        label=label,
    )


def delta_family(p: int = 11, Np: int = 14, M: int = 6, B: int = 60, k0: int = 12, stride: int = 1) -> LambdaAdicForm:
    """The Hida family through the ordinary stabilisations at k0 + (p-1) stride m, m < M.

    Each node is the unique ordinary level-1 eigenform of its weight, stabilised with
    its unit root; a weight with several ordinary forms is rejected.
    """
    specs = []
    for m in range(M):
        k = k0 + (p - 1) * stride * m
        forms = ordinary_eigenforms(k, p, Np, max(B, p * 2))
        if len(forms) != 1:
            raise DomainError(f"weight {k} has {len(forms)} ordinary eigenforms; expected one")
        f = forms[0]
        specs.append((ArithPoint(k), p_stabilize(f, p, Np, "unit")))
    psi = DirichletChar.teichmuller_power(p, k0)
    return build_family_from_grid(specs, p, Np, B, 1, psi, label=f"hida{k0}")


# ---------------------------------------------------------------------------
# closed forms


def _char_padic(chi: DirichletChar | None, n: int, p: int, Np: int) -> int:
    if chi is None:
        return 1
    e = chi.exponent(n)
    if e is None:
        return 0
    return chi.value(n, p, Np).residue


def eisenstein_family(
    chi: DirichletChar | None, p: int, Np: int, M: int, B: int, center: int = 0
) -> LambdaAdicForm:
    """a_n = sum_{d | n, p not dividing d} chi(d) d^{-1} <d>_Lambda.

    At weight k (trivial finite part) this specialises to the ordinary stabilisation
    of the weight-k Eisenstein series with nebentypus chi omega^{-k}.  The constant
    term is filled in from generalised Bernoulli numbers by interpolation when chi is
    nontrivial mod p; for trivial chi it is not an element of Lambda and is left 0
    with ``cuspidal`` False.
    """
    if chi is not None and chi.parity() == -1:
        raise DomainError("chi must be even")
    mod = p**Np
    dia: dict[int, IwasawaElt] = {}
    coeffs = [IwasawaElt.zero(p, Np, M, center)]
    for n in range(1, B + 1):
        acc = IwasawaElt.zero(p, Np, M, center)
        for d in range(1, n + 1):
            if n % d or d % p == 0:
                continue
            c = _char_padic(chi, d, p, Np)
            if c == 0:
                continue
            if d not in dia:
                dia[d] = diamond(d, p, Np, M, center)
            acc = acc + dia[d] * (c * pow(d, -1, mod) % mod)
        coeffs.append(acc)
    fam = LambdaAdicForm(p, Np, M, center, coeffs, 1, chi, cuspidal=False, label="eisenstein")
    return fam


def eisenstein_stabilized(k: int, p: int, B: int, Np: int, chi: DirichletChar | None = None) -> QExp:
    """Non-constant part of the ordinary stabilisation of E_k(chi omega^{-k}), directly."""
    mod = p**Np
    out = [0]
    for n in range(1, B + 1):
        s = 0
        for d in range(1, n + 1):
            if n % d == 0 and d % p:
                c = _char_padic(chi, d, p, Np)
                w = pow(_teich(d, p, Np), -k, mod)
                s += c * w * pow(d, k - 1, mod)
        out.append(s % mod)
    return QExp(tuple(out), mod)


def _teich(d: int, p: int, Np: int) -> int:
    from .padic import teichmuller

    return teichmuller(d, p, Np).residue


def e_power_family(p: int, Np: int, M: int, B: int) -> LambdaAdicForm:
    """E^s = sum_n C(s, n) (E - 1)^n for the weight-one Eisenstein series E = 1 + O(p).

    The family variable is s itself (center 0): the coefficient of s^j collects the
    terms n >= j, and (E - 1)^n / n! is integral because E - 1 is divisible by p.
    Specialisation at s = k is ``specialize_at(k)``.
    """
    # terms with n - v_p(n!) >= Np vanish
    nmax = 0
    while (nmax + 1) - vp_factorial(nmax + 1, p) < Np:
        nmax += 1
    W = Np + vp_factorial(nmax, p) + 1
    E = eisenstein_E_weight1(p, B, W).qexp
    modW = p**W
    mod = p**Np
    one = QExp.monomial(0, B, 1, modW)
    Em1 = E - one
    if any(int(a) % p for a in Em1.coeffs):
        raise DomainError("E is not congruent to 1 mod p")
    # per q-coefficient polynomial in s, degrees 0..nmax
    poly = [[0] * (nmax + 1) for _ in range(B + 1)]
    power = one
    for n in range(nmax + 1):
        if n:
            power = power * Em1
        vf = vp_factorial(n, p)
        unit = _fact_unit(n, p)
        inv = pow(unit, -1, mod)
        # falling factorial s(s-1)...(s-n+1) as a polynomial in s
        ff = [1]
        for i in range(n):
            ff = [(ff[j - 1] if j else 0) - i * (ff[j] if j < len(ff) else 0) for j in range(len(ff) + 1)]
        for t in range(B + 1):
            c = int(power.coeffs[t])
            if c % p**vf:
                raise PrecisionError("(E-1)^n / n! not integral at working precision")
            c = (c // p**vf) * inv % mod
            if c:
                for j, f in enumerate(ff):
                    poly[t][j] = (poly[t][j] + c * f) % mod
    # the s^j coefficient has valuation >= j (p - 2) / (p - 1), which is the decay
    Mj = min(M, nmax + 1)
    coeffs = [IwasawaElt(p, Np, Mj, tuple(row[:Mj]), 0, Fraction(p - 2, p - 1)) for row in poly]
    return LambdaAdicForm(p, Np, Mj, 0, coeffs, 1, None, cuspidal=False, label="E^s")


def _fact_unit(n: int, p: int) -> int:
    u = 1
    for i in range(2, n + 1):
        while i % p == 0:
            i //= p
        u *= i
    return u


def cm_family_assemble(norm_table: dict[int, list[IwasawaElt]], B: int, p: int, Np: int, M: int, center: int = 0) -> LambdaAdicForm:
    """a_n = sum over ideals of norm n of Psi*(a), from an ingested table.

    ``norm_table[n]`` lists the Psi* values of the ideals of norm n prime to the
    conductor and to p; every n <= B must be present (possibly with an empty list).
    """
    coeffs = [IwasawaElt.zero(p, Np, M, center)]
    for n in range(1, B + 1):
        if n not in norm_table:
            raise DataError(f"norm table has no entry for n = {n}")
        vals = norm_table[n]
        if n % p == 0 and vals:
            raise DataError(f"ideals of norm {n} are not prime to p")
        acc = IwasawaElt.zero(p, Np, M, center)
        for v in vals:
            acc = acc + v
        coeffs.append(acc)
    return LambdaAdicForm(p, Np, M, center, coeffs, primitive_at_p=True, label="cm")


# ---------------------------------------------------------------------------
# local types and level adjustment


PRINCIPAL = "PrincipalSeries"
STEINBERG = "Steinberg"
UNRAMIFIED = "Unramified"


def classify_local_type(N: int, psi: DirichletChar | None, l: int, a_l: IwasawaElt | None = None) -> str:
    """Local type at l of the specialisations of a primitive family of tame level N."""
    vN = vp(N, l) if N % l == 0 else 0
    if vN == 0:
        return UNRAMIFIED
    if a_l is not None and a_l.valuation() >= a_l.Np and all(c == 0 for c in a_l.coeffs):
        raise HypothesisViolation("7", f"a({l}) vanishes")
    m = psi.conductor() if psi is not None else 1
    vm = vp(m, l) if m % l == 0 else 0
    if vN == vm:
        return PRINCIPAL
    if vN == 1 and vm == 0:
        return STEINBERG
    raise HypothesisViolation("7", f"v_{l}(N) = {vN} exceeds max(1, v_{l}(conductor)) = {max(1, vm)}")


@dataclass
class LevelAdjustment:
    levels: tuple[int, int, int]
    types: dict[int, tuple[str, str, str]]
    sigma_I: dict[tuple[int, int], set[int]]
    sigma_IIa: dict[int, set[int]]
    sigma_IIb: dict[int, set[int]]
    sigma_max: dict[int, set[int]]
    sigma_IIb0: dict[int, set[int]]
    d: tuple[int, int, int]
    beta: dict[tuple[int, int], IwasawaElt] = field(default_factory=dict)


def _is_ps(t: str) -> bool:
    return t in (PRINCIPAL, UNRAMIFIED)


def _square_free(n: int) -> bool:
    q = 2
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 1
    return True


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


def adjustment_data(
    levels: tuple[int, int, int],
    types: dict[int, tuple[str, str, str]] | None = None,
    nontrivial_L: dict[tuple[int, int, int], bool] | None = None,
) -> LevelAdjustment:
    """Sigma-sets and the integers (d_1, d_2, d_3) of a triple of tame levels.

    ``types[l]`` gives the local types of the three families at l (unramified when
    l does not divide the level).  ``nontrivial_L[(l, j, t)]`` overrides the test
    L(s, pi_j x pi_t) != 1 for two non-principal-series constituents; by default two
    Steinberg constituents (unramified twists) have a nontrivial L-factor.
    """
    from math import gcd, lcm

    N1, N2, N3 = levels
    Nstar = gcd(gcd(N1, N2), N3)
    if not _square_free(Nstar):
        raise HypothesisViolation("3", f"gcd of the tame levels {Nstar} is not square free")
    Nl = lcm(lcm(N1, N2), N3)
    types = dict(types or {})
    primes = _prime_factors(Nl)
    for l in primes:
        if l not in types:
            raise DataError(f"local types at {l} not supplied")
    for l in list(types):
        if Nl % l:
            types[l] = (UNRAMIFIED,) * 3

    def v(l, i):
        n = levels[i]
        return vp(n, l) if n % l == 0 else 0

    def L_nontrivial(l, j, t):
        if nontrivial_L and (l, j, t) in nontrivial_L:
            return nontrivial_L[(l, j, t)]
        return types[l][j] == STEINBERG and types[l][t] == STEINBERG

    idx = (0, 1, 2)
    sI: dict[tuple[int, int], set[int]] = {}
    sIIa: dict[int, set[int]] = {i: set() for i in idx}
    sIIb: dict[int, set[int]] = {i: set() for i in idx}
    smax: dict[int, set[int]] = {i: set() for i in idx}
    for i in idx:
        for j in idx:
            if i != j:
                sI[(i, j)] = set()
    for l in primes:
        ty = types[l]
        all_non_ps = all(not _is_ps(t) for t in ty)
        for i in idx:
            for j in idx:
                if i == j:
                    continue
                t = 3 - i - j
                if (_is_ps(ty[i]) or _is_ps(ty[j]) or all_non_ps) and v(l, t) < min(v(l, i), v(l, j)):
                    sI[(i, j)].add(l)
        for i in idx:
            j, t = [x for x in idx if x != i]
            if not _is_ps(ty[j]) and not _is_ps(ty[t]):
                if L_nontrivial(l, j, t) and v(l, i) == 0:
                    sIIa[i].add(l)
                if not L_nontrivial(l, j, t) and _is_ps(ty[i]) and v(l, i) < min(v(l, j), v(l, t)):
                    sIIb[i].add(l)
            vstar = vp(Nstar, l) if Nstar % l == 0 else 0
            if levels[i] % l == 0 and v(l, j) == v(l, t) == vstar < v(l, i):
                smax[i].add(l)

    def dI(i):
        out = 1
        for j in idx:
            if j != i:
                for l in sI[(i, j)]:
                    out *= l ** (max(v(l, i), v(l, j)) - v(l, i))
        return out

    def dII(i):
        j, t = [x for x in idx if x != i]
        out = 1
        for l in sIIa[i]:
            out *= l ** -(-max(v(l, j), v(l, t)) // 2)
        for l in sIIb[i]:
            out *= l ** (max(v(l, j), v(l, t)) - v(l, i))
        return out

    def dmax(i):
        out = 1
        for l in smax[i]:
            vstar = vp(Nstar, l) if Nstar % l == 0 else 0
            out *= l ** (v(l, i) - vstar)
        return out

    d1 = dI(0) * dII(0)
    d2 = dI(1) * dmax(0) * dmax(2) * dII(1)
    d3 = dI(2) * dmax(1) * dII(2)
    s0 = {i: {l for l in sIIb[i] if v(l, i) == 0} for i in idx}
    return LevelAdjustment(levels, types, sI, sIIa, sIIb, smax, s0, (d1, d2, d3))


def hensel_root_lambda(a: IwasawaElt, c: IwasawaElt, seed: int) -> IwasawaElt:
    """Root beta of X^2 - a X + c in truncated Lambda lifting the residue ``seed``."""
    p = a.p
    f0 = (seed * seed - a.coeffs[0] * seed + c.coeffs[0]) % p
    df0 = (2 * seed - a.coeffs[0]) % p
    if f0:
        raise HenselError(f"{seed} is not a root mod (p, X)")
    if df0 == 0:
        raise HenselError("residual root is not simple")
    beta = IwasawaElt.const(seed, p, a.Np, a.M, a.center)
    for _ in range(2 * (a.Np + a.M).bit_length() + 4):
        f = beta * beta - a * beta + c
        if all(x == 0 for x in f.coeffs):
            break
        beta = beta - f * (beta * 2 - a).inverse()
    return beta


def level_adjust(G: LambdaAdicForm, adj: LevelAdjustment, i: int, B: int | None = None) -> LambdaAdicForm:
    """G^* = sum_{I subset Sigma_{i,0}^{IIb}} (-1)^{|I|} beta_I^{-1} V_{d_i / n_I} G, V formal."""
    primes = sorted(adj.sigma_IIb0[i])
    d = adj.d[i]
    B = G.B if B is None else B
    zero = IwasawaElt.zero(G.p, G.Np, G.M, G.center)
    out = [zero] * (B + 1)
    for r in range(len(primes) + 1):
        for I in combinations(primes, r):
            nI = prod(I)
            coef = IwasawaElt.const((-1) ** r, G.p, G.Np, G.M, G.center)
            for l in I:
                if (l, i) not in adj.beta:
                    raise DataError(f"no root beta_{l} for family {i + 1}")
                coef = coef * adj.beta[(l, i)].inverse()
            m = d // nI
            for n in range(B // m + 1):
                if n <= G.B:
                    out[m * n] = out[m * n] + coef * G.coeffs[n]
    return _replace(G, coeffs=out, N=G.N * d if d > 1 else G.N)


def twisted_family(F: LambdaAdicForm, chi: DirichletChar, N1: int, B: int | None = None) -> LambdaAdicForm:
    """F-breve: twist of F by the tame part of its nebentypus inverse.

    Coefficients prime to N1 are multiplied by conj(chi^{(p)})(n); at l | N1 the
    coefficient becomes a(l, F)^{-1} chi_{(p)} omega^2 (l) l^{-1} <l>, extended
    multiplicatively as a(l^r) = a(l)^r.
    """
    p, Np, M, c = F.p, F.Np, F.M, F.center
    mod = p**Np
    B = F.B if B is None else B
    chi_p, chi_tame = char_decompose(chi, p)
    new_l: dict[int, IwasawaElt] = {}
    for l in _prime_factors(N1):
        a = F.coeffs[l]
        if a.coeffs[0] % p == 0:
            raise DomainError(f"a({l}, F) is not a unit")
        om2 = _teich(l, p, Np) ** 2 % mod
        k = _char_padic(chi_p, l, p, Np) * om2 * pow(l, -1, mod) % mod
        new_l[l] = a.inverse() * diamond(l, p, Np, M, c) * k
    conj = chi_tame.inverse()
    out = [F.coeffs[0]]
    for n in range(1, B + 1):
        n1, extra = n, IwasawaElt.const(1, p, Np, M, c)
        for l, b in new_l.items():
            while n1 % l == 0:
                n1 //= l
                extra = extra * b
        cv = _char_padic(conj, n1, p, Np) if conj.modulus > 1 else 1
        out.append(F.coeffs[n1] * cv * extra)
    neb = None
    if F.nebentypus is not None:
        neb = chi_p * conj
    return _replace(F, coeffs=out, nebentypus=neb, label=F.label + "_breve")


def constant_family_from_qexp(f: QExp, p: int, Np: int, M: int, center: int = 0) -> LambdaAdicForm:
    """The formal constant family with coefficients independent of the weight."""
    return LambdaAdicForm(
        p, Np, M, center, [IwasawaElt.const(int(a), p, Np, M, center) for a in f.coeffs], label="constant"
    )
