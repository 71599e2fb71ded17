"""Ordinary and slope projectors on explicit overconvergent bases.

The space of overconvergent cusp forms of weight k and tame level 1 is modelled by
Katz expansions: layer j consists of E_{p-1}^{-j} w with w running over the Miller
basis elements of S_{k+j(p-1)} whose leading exponent is new in that weight.  The
basis is unitriangular in q-exponents (leading exponents 1, 2, ..., D), so the
coordinates of any cusp q-expansion are read off by back-substitution from its
first D coefficients, and the residual on the coefficients D+1..B certifies that
nothing leaks into layers beyond ``j_max``.

Matrices act on column coordinate vectors: ``A[i][j]`` is the coefficient of
``b_i`` in ``U_p b_j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

from .classical import dim_cusp_level1, eisenstein_Epm1, level1_basis
from .errors import (
    DataError,
    DomainError,
    PrecisionError,
    SlopeNotIsolatedError,
)
from .linalg import (
    Matrix,
    charpoly,
    factorial_power_limit,
    identity,
    mat_eq,
    mat_mul,
    mat_sub,
    mat_vec,
    poly_eval_matrix,
)
from .padic import vp_capped
from .qexp import QExp, op_U


@dataclass
class OverconvergentBasis:
    p: int
    k: int
    N: int
    j_max: int
    B: int
    elements: list[QExp]  # expansions to p*B
    leading: list[int]
    layer_of: list[int]
    layer_dims: list[int]
    certificate: int | None = None

    @property
    def dim(self) -> int:
        return len(self.elements)

    @property
    def mod(self) -> int:
        return self.p**self.N


@dataclass
class UpMatrix:
    p: int
    N: int
    A: Matrix
    residual_valuation: int

    @property
    def dim(self) -> int:
        return len(self.A)


def suggest_jmax(p: int, N: int) -> int:
    """Layers needed so that the neglected Katz layers vanish mod p^N."""
    return ceil((N + 1) * (p + 1) / (p - 1)) + 1


def katz_basis(p: int, k: int, j_max: int, B: int | None = None, N: int = 4, certify: bool = True) -> OverconvergentBasis:
    """Katz-expansion basis of weight ``k`` with layers 0..j_max, expansions to p*B."""
    if p < 5:
        raise DomainError("the Katz basis needs p >= 5")
    if k % 2:
        raise DomainError("even weight only")
    dims = [dim_cusp_level1(k + j * (p - 1)) for j in range(j_max + 1)]
    D = dims[-1]
    if B is None:
        B = D + max(10, D)
    if B < D + 2:
        raise PrecisionError("q-precision B must exceed the basis dimension")
    mod = p**N
    Bext = p * B
    E = eisenstein_Epm1(p, Bext, N).qexp
    Einv = E.inverse()
    elements, leading, layer_of = [], [], []
    Epow = QExp.monomial(0, Bext, 1, mod)
    prev = 0
    for j in range(j_max + 1):
        if j:
            Epow = Epow * Einv
        if dims[j] > prev:
            space = level1_basis(k + j * (p - 1), Bext, mod)
            for i in range(prev, dims[j]):
                w = space.basis[i].qexp
                elements.append(w if j == 0 else Epow * w)
                leading.append(i + 1)
                layer_of.append(j)
            prev = dims[j]
    basis = OverconvergentBasis(p, k, N, j_max, B, elements, leading, layer_of, dims)
    if certify and basis.dim:
        um = up_matrix(basis)
        if um.residual_valuation < N:
            raise PrecisionError(
                f"truncation certificate {um.residual_valuation} < {N}",
                loss=N - um.residual_valuation,
                suggestion=j_max + max(2, (N - um.residual_valuation) * 2),
            )
    return basis


def coordinates(basis: OverconvergentBasis, f: QExp) -> tuple[list[int], int]:
    """(coords, residual valuation) of a cusp q-expansion in the Katz basis."""
    mod = basis.mod
    D = basis.dim
    if f.B < basis.B:
        raise PrecisionError("q-expansion shorter than the basis precision")
    if int(f.coeffs[0]) % mod:
        raise DomainError("not a cusp form (constant term nonzero)")
    r = [int(x) % mod for x in f.coeffs[: basis.B + 1]]
    coords = [0] * D
    for idx in range(D):
        n = basis.leading[idx]
        c = r[n]
        coords[idx] = c
        if c:
            el = basis.elements[idx].coeffs
            for t in range(n, basis.B + 1):
                r[t] = (r[t] - c * el[t]) % mod
    resid = min((vp_capped(x, basis.p, basis.N) for x in r[D + 1 :]), default=basis.N)
    return coords, resid


def expand(basis: OverconvergentBasis, coords: list[int], B: int | None = None) -> QExp:
    B = basis.B if B is None else B
    mod = basis.mod
    out = [0] * (B + 1)
    for c, el in zip(coords, basis.elements):
        if c:
            for t in range(B + 1):
                out[t] += c * el.coeffs[t]
    return QExp(tuple(x % mod for x in out), mod)


def up_matrix(basis: OverconvergentBasis) -> UpMatrix:
    p, D = basis.p, basis.dim
    cols, resid = [], basis.N
    for el in basis.elements:
        u = op_U(p, el).truncate(basis.B)
        c, r = coordinates(basis, u)
        cols.append(c)
        resid = min(resid, r)
    A = [[cols[j][i] for j in range(D)] for i in range(D)]
    basis.certificate = resid
    return UpMatrix(p, basis.N, A, resid)


# ---------------------------------------------------------------------------
# projectors


def ordinary_project(A: UpMatrix | Matrix, p: int | None = None, N: int | None = None) -> Matrix:
    """e = lim A^{n!} mod p^N."""
    if isinstance(A, UpMatrix):
        p, N, M = A.p, A.N, A.A
    else:
        M = A
    assert p is not None and N is not None
    return factorial_power_limit(M, p, N)


def fredholm(A: UpMatrix | Matrix, mod: int | None = None) -> list[int]:
    """det(I - X A), coefficients low to high."""
    M = A.A if isinstance(A, UpMatrix) else A
    if isinstance(A, UpMatrix):
        mod = A.p**A.N
    cp = charpoly(M, mod)
    return list(reversed(cp))


def newton_polygon(P: list[int], p: int, N: int) -> list[tuple[Fraction, int]]:
    """Segments (slope, length) of the lower convex hull of (i, v(P_i)).

    Coefficients that vanish mod p^N are treated as unknown beyond N; if such a
    coefficient could lie below the hull the polygon is not determined and
    ``PrecisionError`` is raised.
    """
    pts = [(i, vp_capped(c, p, N)) for i, c in enumerate(P)]
    known = [(i, v) for i, v in pts if v < N]
    if not known or known[0][0] != 0:
        raise DomainError("P(0) must be nonzero")
    # trailing zero coefficients: P is of lower degree at this precision
    hull: list[tuple[int, int]] = []
    for pt in known:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segs = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segs.append((Fraction(y2 - y1, x2 - x1), x2 - x1))
    # an unknown coefficient at index i must provably lie above the hull
    for i, v in pts:
        if v >= N:
            h = _hull_height(hull, i)
            if h is not None and h >= N:
                raise PrecisionError(f"Newton polygon undetermined at index {i} at precision {N}")
    return segs


def _hull_height(hull, i) -> Fraction | None:
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= i <= x2:
            return y1 + Fraction(y2 - y1, x2 - x1) * (i - x1)
    return None


def slope_multiplicity(P: list[int], p: int, N: int, alpha: Fraction | int) -> int:
    return sum(length for s, length in newton_polygon(P, p, N) if s == Fraction(alpha))


# polynomial helpers over Z/p^W (coefficients low to high)


def _ptrim(a: list[int]) -> list[int]:
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _pmul(a: list[int], b: list[int], mod: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [x % mod for x in out]


def _pdivmod_monic(a: list[int], g: list[int], mod: int) -> tuple[list[int], list[int]]:
    r = [x % mod for x in a]
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return [0], r
    q = [0] * (len(r) - dg)
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i]
        if c:
            q[i - dg] = c
            for j in range(dg + 1):
                r[i - dg + j] = (r[i - dg + j] - c * g[j]) % mod
    return q, _ptrim(r[:dg] or [0])


def _egcd_modp(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    """s, t with s a + t b = 1 over F_p (a, b coprime)."""

    def norm(x):
        return _ptrim([c % p for c in x])

    def sub(x, y):
        n = max(len(x), len(y))
        return norm([(x[i] if i < len(x) else 0) - (y[i] if i < len(y) else 0) for i in range(n)])

    def divmod_p(x, y):
        y = norm(y)
        inv = pow(y[-1], -1, p)
        r = norm(x)
        q = [0] * max(1, len(r) - len(y) + 1)
        while len(r) >= len(y) and any(r):
            c = r[-1] * inv % p
            sh = len(r) - len(y)
            q[sh] = c
            r = sub(r, [0] * sh + [c * t for t in y])
            if len(r) >= len(y) + sh:  # leading term cancelled exactly
                r = r[:-1] if len(r) > 1 else r
        return norm(q), r

    r0, r1 = norm(a), norm(b)
    s0, s1, t0, t1 = [1], [0], [0], [1]
    while any(r1):
        q, r = divmod_p(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, _pmul(q, s1, p))
        t0, t1 = t1, sub(t0, _pmul(q, t1, p))
    if len(r0) != 1 or r0[0] == 0:
        raise SlopeNotIsolatedError("factors are not coprime mod p")
    inv = pow(r0[0], -1, p)
    return [c * inv % p for c in s0], [c * inv % p for c in t0]


def _hensel_unit_split(R: list[int], p: int, W: int) -> tuple[list[int], list[int]]:
    """Monic R = U T over Z/p^W with U's roots units and T's roots in pZ_p."""
    mod = p**W
    n = len(R) - 1
    e = next((i for i, c in enumerate(R) if c % p), n)
    if e == 0:
        return list(R), [1]
    if e == n:
        return [1], list(R)
    g = [c % p for c in R[e:]]
    h = [0] * e + [1]
    s, t = _egcd_modp(g, h, p)
    for k in range(1, W):
        pk = p**k
        err = [(x - y) % mod for x, y in zip(R, _pmul(g, h, mod) + [0])]
        if all(x % (pk * p) == 0 for x in err):
            continue
        if any(x % pk for x in err):
            raise SlopeNotIsolatedError("Hensel lifting lost track of the factorisation")
        err_bar = [(x // pk) % p for x in err]
        # g dh + h dg = err (mod p), deg dg < deg g
        _, dg = _pdivmod_monic(_pmul(t, err_bar, p), g, p)
        rest = [(x - y) % p for x, y in zip(err_bar + [0] * len(R), _pmul(h, dg, p) + [0] * len(R))]
        dh, rem = _pdivmod_monic(_ptrim(rest), g, p)
        if any(rem):
            raise SlopeNotIsolatedError("Hensel correction not exact")
        g = [(x + pk * (dg[i] if i < len(dg) else 0)) % mod for i, x in enumerate(g)]
        h = [(x + pk * (dh[i] if i < len(dh) else 0)) % mod for i, x in enumerate(h)]
    return g, h


def slope_factor(P: list[int], alpha: Fraction | int, p: int, N: int) -> tuple[list[int], list[int], int]:
    """Split P = Q S with Q carrying exactly the Newton slopes equal to alpha.

    Returns (Q, S, N') with Q(0) = S(0) = 1 and Q S = P mod p^N'.  Works on the
    reversed monic polynomial: split off unit roots by Hensel lifting, rescale
    X -> pX, repeat.  An integer slope is always isolated this way; a fractional
    slope needs to be the only slope strictly between its neighbouring integers
    and no root may vanish at precision N.
    """
    alpha = Fraction(alpha)
    segs = newton_polygon(P, p, N)
    n = len(P) - 1
    if P[0] % p**N != 1:
        raise DomainError("P(0) must be 1")
    if alpha not in [s for s, _ in segs]:
        return [1], [x % p**N for x in P], N
    R = [x % p**N for x in reversed(P)]
    t_stop = alpha.numerator // alpha.denominator
    W = N
    cur = R
    for t in range(t_stop + 1):
        U, T = _hensel_unit_split(cur, p, W)
        if t == t_stop:
            break
        d = len(T) - 1
        if d * 1 >= W:
            raise PrecisionError(f"rescaling exhausts the precision at slope {t + 1}")
        cur = [(c // p ** (d - i)) % p ** (W - d) for i, c in enumerate(T)]
        if any(c % p ** (d - i) for i, c in enumerate(T)):
            raise PrecisionError("rescaled polynomial not integral")
        W -= d
    if alpha.denominator == 1:
        Qs, scale = U, t_stop
    else:
        inside = [length for s, length in segs if t_stop < s < t_stop + 1]
        total = sum(length for _, length in segs)
        if inside != [len(T) - 1] or any(s > t_stop + 1 for s, _ in segs) or total < n:
            raise SlopeNotIsolatedError(f"slope {alpha} is not isolated by integer thresholds")
        Qs, scale = T, t_stop
    m = len(Qs) - 1
    mod = p**W
    Qstar = [Qs[i] * p ** (scale * (m - i)) % mod for i in range(m + 1)]
    Sstar, rem = _pdivmod_monic([x % mod for x in R], Qstar, mod)
    if any(rem):
        raise PrecisionError("slope factor does not divide P at working precision")
    Q = list(reversed(Qstar))
    S = list(reversed(Sstar + [0] * (n - m + 1 - len(Sstar))))
    return Q, S, W


def _reverse_monic(Q: list[int], mod: int) -> list[int]:
    """Q*(X) = X^m Q(1/X) for Q(0) = 1, low to high."""
    return [x % mod for x in reversed(Q)]


def _padic_solve(M: Matrix, b: list[int], p: int, N: int) -> tuple[list[int], int]:
    """Solve M x = b over Q_p; returns (X, E) with x = X / p^E, X known mod p^(N - E)."""
    n = len(M)
    mod = p**N
    A = [[x % mod for x in r] + [bb % mod] for r, bb in zip(M, b)]
    cols = list(range(n))
    piv_v = []
    for c in range(n):
        best, bv = None, N
        for r in range(c, n):
            for cc in range(c, n):
                v = vp_capped(A[r][cc], p, N)
                if v < bv:
                    best, bv = (r, cc), v
        if best is None:
            raise PrecisionError("singular system at working precision")
        r, cc = best
        A[c], A[r] = A[r], A[c]
        for row in A:
            row[c], row[cc] = row[cc], row[c]
        cols[c], cols[cc] = cols[cc], cols[c]
        inv = pow((A[c][c] // p**bv) % mod, -1, mod)
        A[c] = [x * inv % mod for x in A[c]]
        piv_v.append(bv)
        for r2 in range(c + 1, n):
            f = A[r2][c]
            if f:
                q = f // p**bv  # exact: pivot has minimal valuation
                A[r2] = [(x - q * y) % mod for x, y in zip(A[r2], A[c])]
    E = sum(piv_v)
    X = [0] * n
    for c in range(n - 1, -1, -1):
        num = A[c][n] * p**E - sum(A[c][j] * X[j] for j in range(c + 1, n))
        v = piv_v[c]
        if num % p**v:
            raise PrecisionError("inexact back-substitution")
        X[c] = (num // p**v) % mod
    out = [0] * n
    for c in range(n):
        out[cols[c]] = X[c]
    return out, E


def slope_projector(A: UpMatrix, alpha: Fraction | int) -> tuple[Matrix, int]:
    """Projector onto ker Q*(A) along ker S*(A) via Bezout; returns (matrix, precision)."""
    p, N, M = A.p, A.N, A.A
    P = fredholm(A)
    Q, S, Np = slope_factor(P, alpha, p, N)
    mod = p**Np
    Qs, Ss = _reverse_monic(Q, mod), _reverse_monic(S, mod)
    m, s = len(Qs) - 1, len(Ss) - 1
    if s == 0:
        return identity(len(M)), Np
    if m == 0:
        return [[0] * len(M) for _ in M], Np
    # Sylvester system for u Q* + v S* = 1 with deg u < s, deg v < m
    size = m + s
    Syl = [[0] * size for _ in range(size)]
    for j in range(s):
        for i, c in enumerate(Qs):
            Syl[i + j][j] = c
    for j in range(m):
        for i, c in enumerate(Ss):
            Syl[i + j][s + j] = c
    rhs = [1] + [0] * (size - 1)
    x, e = _padic_solve(Syl, rhs, p, Np)
    if e >= Np:
        raise PrecisionError("resultant of the slope factors exhausts the precision", loss=e)
    v = x[s:]
    # projector = v(A) S*(A) / p^e
    num = mat_mul(poly_eval_matrix(v, M, mod), poly_eval_matrix(Ss, M, mod), mod)
    out_prec = Np - e
    pe = p**e
    out_mod = p**out_prec
    proj = []
    for row in num:
        new = []
        for a in row:
            if a % pe:
                raise PrecisionError("projector not integral at this precision", loss=e)
            new.append((a // pe) % out_mod)
        proj.append(new)
    return proj, out_prec


def rank_unit_part(e: Matrix, p: int) -> int:
    from .classical import _rank_mod_p

    return _rank_mod_p(e, p)


# ---------------------------------------------------------------------------
# ordinary parts of q-expansions


@dataclass
class OrdinaryProjector:
    """e on a certified Katz basis, with the basis kept for expansions."""

    basis: OverconvergentBasis
    up: UpMatrix
    e: Matrix

    @property
    def rank(self) -> int:
        return rank_unit_part(self.e, self.basis.p)


def ordinary_projector(p: int, k: int, N: int, j_max: int | None = None, B: int | None = None) -> OrdinaryProjector:
    j = suggest_jmax(p, N) if j_max is None else j_max
    basis = katz_basis(p, k, j, B, N, certify=False)
    up = up_matrix(basis)
    if up.residual_valuation < N:
        raise PrecisionError(f"truncation certificate {up.residual_valuation} < {N}", suggestion=j + 2)
    return OrdinaryProjector(basis, up, ordinary_project(up))


def apply_ordinary(op: OrdinaryProjector, f: QExp, Bout: int | None = None) -> tuple[QExp, int]:
    """e(f) for a cusp q-expansion f in the span of the basis; returns (e f, residual valuation)."""
    mod = op.basis.mod
    c, resid = coordinates(op.basis, f)
    ec = mat_vec(op.e, c, mod)
    return expand(op.basis, ec, Bout), resid


def projector_checks(e: Matrix, A: Matrix, mod: int) -> dict[str, bool]:
    return {
        "idempotent": mat_eq(mat_mul(e, e, mod), e, mod),
        "commutes": mat_eq(mat_mul(e, A, mod), mat_mul(A, e, mod), mod),
    }


# ---------------------------------------------------------------------------
# old/new eigen-matching


@dataclass
class EigenSystem:
    level: int
    eigenvalues: dict[int, int]
    mod: int | None = None


def old_outside_p_test(f: EigenSystem, lower: dict[int, list[EigenSystem]], p: int) -> bool:
    """True iff f's eigenvalues at primes not dividing Np match a system of proper tame level."""
    N = f.level
    proper = [t for t in range(1, N) if N % t == 0]
    if not proper:
        return False
    for t in proper:
        if t not in lower:
            raise DataError(f"no certified eigen-data supplied for tame level {t}")
    for t in proper:
        for g in lower[t]:
            common = [l for l in f.eigenvalues if l in g.eigenvalues and (N * p) % l]
            if not common:
                continue
            mod = f.mod or g.mod
            ok = True
            for l in common:
                d = f.eigenvalues[l] - g.eigenvalues[l]
                if (d % mod if mod else d) != 0:
                    ok = False
                    break
            if ok:
                return True
    return False


def mat_identity_check(P1: Matrix, P2: Matrix, mod: int) -> bool:
    return mat_eq(P1, P2, mod)


def complement(e: Matrix, mod: int) -> Matrix:
    return mat_sub(identity(len(e)), e, mod)
