"""Classical modular forms of level 1 and their p-stabilisations.

Everything here is built from q-expansions: Eisenstein series from divisor sums,
Delta from Jacobi's identity for eta^3, level-1 cusp spaces from Miller's basis.
Hecke eigenforms are found by linear algebra on Hecke matrices over Z/p^N, which
avoids number fields: eigenvalues are Hensel-lifted roots of the characteristic
polynomial in Z_p.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cache, lru_cache

from .characters import DirichletChar, bernoulli, gen_bernoulli, omega
from .errors import AmbiguityError, DegeneracyError, DomainError, PrecisionError
from .linalg import charpoly, factorial_power_limit, kernel_vector_simple
from .padic import PadicInt, QpElt, hensel_root, vp
from .qexp import QExp, formal_V, op_T


@dataclass(frozen=True)
class ClassicalForm:
    """A form of weight ``k``, level ``N * p**e`` and nebentypus ``nebentypus``."""

    k: int
    qexp: QExp
    N: int = 1
    e: int = 0
    p: int | None = None
    nebentypus: DirichletChar | None = None
    eigenvalues: dict = field(default_factory=dict)
    label: str = ""

    @property
    def level(self) -> int:
        return self.N * (self.p**self.e if self.p else 1)

    def coeff(self, n: int):
        return self.qexp.coeffs[n]


@dataclass(frozen=True)
class Space:
    """Echelonised basis of a space of forms; coordinates are read off the pivots."""

    k: int
    basis: tuple[ClassicalForm, ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


def sigma(k: int, n: int) -> int:
    s, d = 0, 1
    while d * d <= n:
        if n % d == 0:
            s += d**k
            if d * d != n:
                s += (n // d) ** k
        d += 1
    return s


@cache
def _divisor_sums(k: int, B: int) -> tuple[int, ...]:
    out = [0] * (B + 1)
    for d in range(1, B + 1):
        dk = d**k
        for m in range(d, B + 1, d):
            out[m] += dk
    return tuple(out)


def eisenstein_series(k: int, B: int, mod: int | None = None) -> QExp:
    """E_k = 1 - (2k / B_k) sum sigma_{k-1}(n) q^n (level 1, k >= 4 even)."""
    if k < 4 or k % 2:
        raise DomainError("level-1 Eisenstein series need even k >= 4")
    c = Fraction(-2 * k) / bernoulli(k)
    sig = _divisor_sums(k - 1, B)
    if c.denominator == 1:
        cc = c.numerator
        coeffs = (1,) + tuple(cc * s for s in sig[1:])
        return QExp(coeffs, mod)
    if mod is None:
        raise DomainError(f"E_{k} is not integral; a modulus is required")
    cc = c.numerator * pow(c.denominator, -1, mod) % mod
    return QExp((1,) + tuple(cc * s for s in sig[1:]), mod)


def eisenstein_Epm1(p: int, B: int, N: int | None = None) -> ClassicalForm:
    """E_{p-1} normalised with constant term 1; reduced mod p^N when given."""
    mod = p**N if N is not None else None
    c = Fraction(-2 * (p - 1)) / bernoulli(p - 1)
    if c.denominator % p == 0:
        raise DomainError("E_{p-1} not p-integral")
    q = eisenstein_series(p - 1, B, mod) if (c.denominator == 1 or mod) else None
    if q is None:
        raise DomainError(f"E_{p - 1} needs a modulus (non-integral coefficients)")
    return ClassicalForm(p - 1, q, 1, 0, p, DirichletChar.trivial(1), label=f"E_{p - 1}")


def eisenstein_E_weight1(p: int, B: int, N: int) -> ClassicalForm:
    """E = 1 + (2 / L_p(0, 1)) sum_n (sum_{d|n} omega^{-1}(d)) q^n, weight 1, character omega^{-1}."""
    if p < 5:
        raise DomainError("p >= 5 required")
    w = omega(p, -1)
    Bn = gen_bernoulli(1, w, p, N + 4)
    assert isinstance(Bn, QpElt)
    if Bn.is_zero():
        raise PrecisionError("B_{1,omega^{-1}} vanishes at working precision")
    Lp = -Bn
    two_over = QpElt.make(p, 2, N + 4) / Lp
    c = two_over.to_padic(N).residue
    mod = p**N
    vals = [w.value(d, p, N).residue for d in range(B + 1)]
    coeffs = [1] + [0] * B
    for d in range(1, B + 1):
        vd = vals[d]
        if vd:
            for m in range(d, B + 1, d):
                coeffs[m] += vd
    out = [1] + [c * a % mod for a in coeffs[1:]]
    return ClassicalForm(1, QExp(tuple(out), mod), 1, 1, p, w, label="E")


def _eta_cubed(B: int) -> list[int]:
    """prod (1 - q^n)^3 = sum_k (-1)^k (2k+1) q^{k(k+1)/2}."""
    out = [0] * (B + 1)
    k = 0
    while k * (k + 1) // 2 <= B:
        out[k * (k + 1) // 2] = (-1) ** k * (2 * k + 1)
        k += 1
    return out


def delta_qexp(B: int, mod: int | None = None) -> ClassicalForm:
    """Delta = q prod (1 - q^n)^24 = q (eta^3 / q^{1/8})^8."""
    e3 = QExp(tuple(_eta_cubed(B)), mod)
    e6 = e3 * e3
    e12 = e6 * e6
    e24 = e12 * e12
    coeffs = (0,) + e24.coeffs[:B]
    return ClassicalForm(12, QExp(coeffs, mod), label="Delta")


def dim_cusp_level1(k: int) -> int:
    if k < 12 or k % 2:
        return 0
    d = k // 12 + (0 if k % 12 == 2 else 1)
    return d - 1


def _e4e6_monomial(w: int) -> tuple[int, int]:
    """(a, b) with 4a + 6b = w; w even, w != 2."""
    if w == 0:
        return 0, 0
    for b in range(w // 6 + 1):
        if (w - 6 * b) % 4 == 0:
            return (w - 6 * b) // 4, b
    raise DomainError(f"no monomial of weight {w}")


@lru_cache(maxsize=64)
def _powers(kind: str, e: int, B: int, mod: int | None) -> QExp:
    if e == 0:
        return QExp.monomial(0, B, 1, mod)
    if kind == "E4":
        base = eisenstein_series(4, B, mod)
    elif kind == "E6":
        base = eisenstein_series(6, B, mod)
    else:
        base = delta_qexp(B, mod).qexp
    if e == 1:
        return base
    half = _powers(kind, e // 2, B, mod)
    out = half * half
    return out * base if e % 2 else out


def level1_basis(k: int, B: int, mod: int | None = None) -> Space:
    """Miller basis of S_k(SL_2(Z)): f_i = q^i + O(q^{d+1}), i = 1..d, integral."""
    if k % 2 or k < 4:
        raise DomainError("k must be even and >= 4")
    d = dim_cusp_level1(k)
    if d == 0:
        return Space(k, (), ())
    rows = []
    for i in range(1, d + 1):
        a, b = _e4e6_monomial(k - 12 * i)
        f = _powers("D", i, B, mod) * _powers("E4", a, B, mod) * _powers("E6", b, B, mod)
        rows.append(list(f.coeffs))
    # unitriangular: f_i = q^i + ...; clear entries above the diagonal block
    for i in reversed(range(d)):
        for j in range(i + 1, d):
            c = rows[i][j + 1]
            if c:
                rows[i] = [x - c * y for x, y in zip(rows[i], rows[j])]
        if mod:
            rows[i] = [x % mod for x in rows[i]]
    basis = tuple(ClassicalForm(k, QExp(tuple(r), mod), label=f"S{k}_{i + 1}") for i, r in enumerate(rows))
    return Space(k, basis, tuple(range(1, d + 1)))


def coordinates(space: Space, f: QExp) -> list:
    """Coordinates of f in a Miller-type basis (exact for forms in the space)."""
    return [f.coeffs[i] for i in space.pivots]


def hecke_matrix(space: Space, l: int, mod: int | None = None) -> list[list[int]]:
    """Matrix of T_l in row convention: row i = coordinates of T_l f_i."""
    out = []
    for f in space.basis:
        Tf = op_T(l, space.k, None, f.qexp if mod is None else f.qexp.reduce(mod))
        if Tf.B < max(space.pivots, default=0):
            raise PrecisionError(f"q-precision too small for T_{l} on weight {space.k}")
        out.append([int(x) for x in coordinates(space, Tf)])
    return out


def check_eigenform(f: QExp, k: int, primes, mod: int | None = None, chi=None, level: int = 1) -> dict[int, int]:
    """Return {l: a_l} after checking T_l f = a_l f on the available coefficients."""
    out = {}
    a1 = f.coeffs[1]
    if a1 != 1 and not (mod and (a1 - 1) % mod == 0):
        raise DomainError("eigenform must be normalised")
    for l in primes:
        lam = f.coeffs[l]
        Tf = op_T(l, k, chi, f, level)
        rhs = f.truncate(Tf.B).scale(lam)
        if mod:
            ok = all((int(a) - int(b)) % mod == 0 for a, b in zip(Tf.coeffs, rhs.coeffs))
        else:
            ok = Tf == rhs
        if not ok:
            raise DomainError(f"T_{l} eigen-equation fails")
        out[l] = lam
    return out


def _roots_mod_p(poly: list[int], p: int) -> list[int]:
    return [r for r in range(p) if sum(c * pow(r, i, p) for i, c in enumerate(poly)) % p == 0]


def eigenbasis(space: Space, p: int, N: int, hecke_primes=(2,)) -> list[ClassicalForm]:
    """Normalised Hecke eigenforms of ``space`` with coefficients in Z/p^N.

    The first Hecke prime whose characteristic polynomial has simple roots mod p
    separates the eigenforms; the rest are only checked.
    """
    mod = p**N
    d = space.dim
    if d == 0:
        return []
    if d == 1:
        f = space.basis[0].qexp.reduce(mod)
        ev = check_eigenform(f, space.k, [l for l in hecke_primes if l <= f.B // max(1, 1)], mod)
        return [ClassicalForm(space.k, f, eigenvalues=ev, label=f"f{space.k}")]
    for l in hecke_primes:
        T = hecke_matrix(space, l, mod)
        cp = charpoly(T, mod)
        roots = _roots_mod_p(cp, p)
        if len(roots) != d:
            continue
        forms = []
        for r in roots:
            lam = hensel_root(cp, r, p, N).residue
            A = [[(T[j][i] - (lam if i == j else 0)) % mod for j in range(d)] for i in range(d)]
            v = kernel_vector_simple(A, p, N)
            inv = pow(v[0], -1, mod)
            v = [x * inv % mod for x in v]
            f = None
            for c, b in zip(v, space.basis):
                term = b.qexp.reduce(mod).scale(c)
                f = term if f is None else f + term
            ev = check_eigenform(f, space.k, [q for q in hecke_primes if q * 1 <= f.B], mod)
            forms.append(ClassicalForm(space.k, f, eigenvalues=ev, label=f"f{space.k}_{len(forms)}"))
        return forms
    raise DegeneracyError("no Hecke prime separates the eigenforms mod p; a splitting field would be needed")


def ordinary_eigenforms(k: int, p: int, N: int, B: int) -> list[ClassicalForm]:
    """Level-1 eigenforms of weight k whose T_p eigenvalue is a p-adic unit.

    The image of lim T_p^{n!} on S_k(1) is spanned by the ordinary eigenforms;
    when it is a line the eigenform is its normalised generator and no splitting
    field is needed.
    """
    mod = p**N
    space = level1_basis(k, max(B, p * (dim_cusp_level1(k) + 1)), mod)
    d = space.dim
    if d == 0:
        return []
    T = hecke_matrix(space, p, mod)
    e = factorial_power_limit(T, p, N)
    rows = [r for r in e if any(x % p for x in r)]
    rank = _rank_mod_p(e, p)
    if rank == 0:
        return []
    if rank == 1:
        r = rows[0]
        # row r holds coordinates of an element of the image
        f = None
        for c, b in zip(r, space.basis):
            term = b.qexp.reduce(mod).scale(c)
            f = term if f is None else f + term
        a1 = f.coeffs[1]
        if a1 % p == 0:
            raise DegeneracyError("ordinary line has a_1 divisible by p")
        f = f.scale(pow(a1, -1, mod)).truncate(B)
        ev = check_eigenform(f, k, [l for l in (2, 3, p) if l <= B // 2], mod)
        return [ClassicalForm(k, f, eigenvalues=ev, label=f"ord{k}")]
    forms = eigenbasis(space, p, N, (2, 3, 5, 7))
    return [ClassicalForm(k, f.qexp.truncate(B), eigenvalues=f.eigenvalues, label=f.label) for f in forms if f.qexp.coeffs[p] % p]


def _rank_mod_p(A: list[list[int]], p: int) -> int:
    M = [[x % p for x in r] for r in A]
    rank, rows, cols = 0, len(M), len(M[0]) if M else 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][c], -1, p)
        M[rank] = [x * inv % p for x in M[rank]]
        for r in range(rows):
            if r != rank and M[r][c]:
                f = M[r][c]
                M[r] = [(x - f * y) % p for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# p-stabilisation


def quadratic_roots_padic(a: int, c: int, p: int, N: int) -> tuple[PadicInt, PadicInt]:
    """Roots (r1, r2) of X^2 - a X + c in Z_p with v(r1) < v(r2), to precision N.

    Raises ``AmbiguityError`` when both roots have the same valuation.
    """
    if c == 0:
        return PadicInt(p, N, 0), PadicInt(p, N, a)
    vc = vp(c, p)
    va = vp(a, p) if a else 10**9
    if 2 * va >= vc:
        raise AmbiguityError("both roots have valuation v(c)/2; a choice must be designated")
    # small root r1 = p^va * y with y a unit root of y^2 - (a/p^va) y + c/p^{2va}
    W = N + vc + va + 2
    a1 = a // p**va
    c1 = c // p ** (2 * va)
    y = hensel_root([c1, -a1, 1], a1 % p, p, W)
    r1 = y.residue * p**va
    # r2 = c / r1 exactly
    r2 = (c // p**va) * pow(y.residue, -1, p**W)
    m = p**N
    return PadicInt(p, N, r1 % m), PadicInt(p, N, r2 % m)


def p_stabilize(
    f: ClassicalForm,
    p: int,
    N: int,
    root: str = "unit",
    chi_p: int = 1,
) -> ClassicalForm:
    """Stabilise an eigenform of level prime to p.

    Returns f_alpha = f(q) - beta f(q^p), a U_p-eigenform with eigenvalue alpha, where
    alpha, beta are the roots of X^2 - a_p X + chi(p) p^{k-1}; ``root`` selects whether
    alpha is the unit root ("unit") or the root of larger valuation ("nonunit").
    """
    mod = p**N
    ap = int(f.qexp.coeffs[p])
    c = chi_p * p ** (f.k - 1)
    if f.qexp.mod is not None:
        # coefficients known mod p^N only: a_p is a p-adic number, c exact
        ap %= f.qexp.mod
    if ap % p == 0:
        if root == "unit":
            raise DomainError(f"a_p = {ap} is divisible by p; no unit root")
    small, large = quadratic_roots_padic(ap, c, p, N + p)
    if root == "unit":
        if small.valuation() != 0:
            raise DomainError("no unit root")
        alpha, beta = small, large
    elif root == "nonunit":
        alpha, beta = large, small
    else:
        raise DomainError(f"unknown root choice {root!r}")
    alpha, beta = alpha.reduce(N), beta.reduce(N)
    q = f.qexp.reduce(mod)
    fb = q - formal_V(p, q, cap=q.B).scale(beta.residue)
    ev = dict(f.eigenvalues)
    ev[p] = alpha.residue
    return ClassicalForm(f.k, fb, f.N, 1, p, f.nebentypus, ev, label=f"{f.label}_{root}")
