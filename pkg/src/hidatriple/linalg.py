"""Dense linear algebra over Z/p^N and over Z.

Matrices are lists of rows of Python integers.  The sizes met in practice are
tens, so plain Python arithmetic is fast enough and keeps big moduli exact.
"""

from __future__ import annotations

from collections.abc import Sequence

from .errors import DegeneracyError, DomainError, IterationError, PrecisionError
from .padic import vp_capped

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int | None = None) -> Matrix:
    return [[0] * (n if m is None else m) for _ in range(n)]


def mat_mod(A: Matrix, mod: int) -> Matrix:
    return [[x % mod for x in row] for row in A]


def mat_mul(A: Matrix, B: Matrix, mod: int | None = None) -> Matrix:
    Bt = list(zip(*B))
    out = [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]
    return mat_mod(out, mod) if mod else out


def mat_add(A: Matrix, B: Matrix, mod: int | None = None) -> Matrix:
    out = [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]
    return mat_mod(out, mod) if mod else out


def mat_sub(A: Matrix, B: Matrix, mod: int | None = None) -> Matrix:
    out = [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]
    return mat_mod(out, mod) if mod else out


def mat_scale(A: Matrix, c: int, mod: int | None = None) -> Matrix:
    out = [[c * a for a in r] for r in A]
    return mat_mod(out, mod) if mod else out


def mat_vec(A: Matrix, v: Sequence[int], mod: int | None = None) -> list[int]:
    out = [sum(a * b for a, b in zip(row, v)) for row in A]
    return [x % mod for x in out] if mod else out


def mat_pow(A: Matrix, e: int, mod: int) -> Matrix:
    out = identity(len(A))
    base = mat_mod(A, mod)
    while e:
        if e & 1:
            out = mat_mul(out, base, mod)
        e >>= 1
        if e:
            base = mat_mul(base, base, mod)
    return out


def mat_eq(A: Matrix, B: Matrix, mod: int) -> bool:
    return all((a - b) % mod == 0 for r, s in zip(A, B) for a, b in zip(r, s))


def transpose(A: Matrix) -> Matrix:
    return [list(c) for c in zip(*A)]


def poly_eval_matrix(coeffs: Sequence[int], A: Matrix, mod: int) -> Matrix:
    """sum c_i A^i by Horner."""
    n = len(A)
    out = zeros(n)
    for c in reversed(coeffs):
        out = mat_mul(out, A, mod)
        for i in range(n):
            out[i][i] = (out[i][i] + c) % mod
    return out


def mat_inv(A: Matrix, p: int, N: int) -> Matrix:
    """Inverse over Z/p^N; the determinant must be a unit."""
    n = len(A)
    mod = p**N
    M = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(mat_mod(A, mod))]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] % p), None)
        if piv is None:
            raise DomainError("matrix is not invertible mod p")
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, mod)
        M[c] = [x * inv % mod for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [(x - f * y) % mod for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def charpoly(A: Matrix, mod: int | None = None) -> list[int]:
    """det(X I - A) by Berkowitz's division-free algorithm; coefficients low to high."""
    n = len(A)
    if n == 0:
        return [1]

    def red(x: int) -> int:
        return x % mod if mod else x

    # Berkowitz: vectors C_r built from the leading principal submatrices
    vect = [1, red(-A[0][0])]
    for r in range(1, n):
        R = A[r][:r]  # row r, first r entries
        S = [A[i][r] for i in range(r)]  # column r, first r entries
        Asub = [row[:r] for row in A[:r]]
        a = A[r][r]
        # Toeplitz column: 1, -a, -R S, -R A S, -R A^2 S, ...
        col = [1, red(-a)]
        v = S[:]
        for _ in range(r):
            col.append(red(-sum(x * y for x, y in zip(R, v))))
            v = [red(sum(Asub[i][j] * v[j] for j in range(r))) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = 0
            for j in range(min(i + 1, len(vect))):
                if i - j < len(col):
                    s += col[i - j] * vect[j]
            new.append(red(s))
        vect = new
    # vect holds coefficients of X^n, X^{n-1}, ..., 1
    return list(reversed(vect))


def det(A: Matrix, mod: int | None = None) -> int:
    c = charpoly(A, mod)
    d = c[0] * (-1) ** len(A)
    return d % mod if mod else d


def kernel_vector_simple(A: Matrix, p: int, N: int) -> list[int]:
    """A vector spanning the kernel of A over Z/p^N when A has corank exactly one mod p."""
    n = len(A)
    mod = p**N
    M = mat_mod(A, mod)
    pivots: list[tuple[int, int]] = []
    row = 0
    used_cols: list[int] = []
    for c in range(n):
        piv = next((r for r in range(row, n) if M[r][c] % p), None)
        if piv is None:
            continue
        M[row], M[piv] = M[piv], M[row]
        inv = pow(M[row][c], -1, mod)
        M[row] = [x * inv % mod for x in M[row]]
        for r in range(n):
            if r != row and M[r][c]:
                f = M[r][c]
                M[r] = [(x - f * y) % mod for x, y in zip(M[r], M[row])]
        pivots.append((row, c))
        used_cols.append(c)
        row += 1
    free = [c for c in range(n) if c not in used_cols]
    if len(free) != 1:
        raise DegeneracyError(f"kernel mod p has dimension {len(free)}, expected 1")
    f = free[0]
    for r in range(row, n):
        if any(x % mod for x in M[r]):
            raise PrecisionError("residual rows not zero: eigenvalue not accurate enough")
    v = [0] * n
    v[f] = 1
    for r, c in pivots:
        v[c] = -M[r][f] % mod
    return v


def padic_echelon(rows: Sequence[Sequence[int]], p: int, N: int) -> list[tuple[int, int, list[int]]]:
    """Row echelon form over Z_p (entries known mod p^N), pivoting on minimal valuation.

    Returns ``[(pivot_col, pivot_valuation, row)]``; each row is scaled so that its
    pivot entry is exactly p^valuation.
    """
    mod = p**N
    M = [[x % mod for x in r] for r in rows]
    out = []
    ncols = len(M[0]) if M else 0
    live = list(range(len(M)))
    for c in range(ncols):
        best, bv = None, N
        for r in live:
            v = vp_capped(M[r][c], p, N)
            if v < bv:
                best, bv = r, v
        if best is None:
            continue
        unit = (M[best][c] // p**bv) % mod
        inv = pow(unit, -1, mod)
        prow = [x * inv % mod for x in M[best]]
        live.remove(best)
        for r in live:
            if M[r][c]:
                f = M[r][c] // p**bv
                M[r] = [(x - f * y) % mod for x, y in zip(M[r], prow)]
        out.append((c, bv, prow))
    return out


def min_scalar_for_membership(target: Sequence[int], target_den_exp: int, gens: Sequence[Sequence[int]], p: int, N: int) -> int:
    """Least e >= 0 with p^e * (target / p^den) in the Z_p-span of ``gens``.

    Raises ``DomainError`` if the target is not in the Q_p-span at precision N.
    """
    ech = padic_echelon(gens, p, N)
    K = sum(v for _, v, _ in ech)
    W = N + K
    mod = p**W
    T = [x * p**K % mod for x in target]
    need = 0
    for c, v, row in ech:
        x = T[c]
        # coefficient c_j = x / p^v, valuation tracked exactly
        if x % p**v:
            raise PrecisionError("non-exact pivot division in membership test")
        coef = x // p**v
        vc = vp_capped(coef, p, W)
        need = max(need, K + target_den_exp - vc)
        T = [(t - coef * r) % mod for t, r in zip(T, row)]
    resid = min((vp_capped(t, p, W) for t in T), default=W)
    if resid < min(W, N):
        raise DomainError("target is not in the span of the generators")
    return max(0, need)


def back_substitute_unitriangular(U: Matrix, b: Sequence[int], mod: int) -> list[int]:
    """Solve x U = b for x when U is upper unitriangular (rows are basis vectors)."""
    n = len(U)
    x = [0] * n
    r = [v % mod for v in b[:n]]
    for i in range(n):
        xi = r[i]
        x[i] = xi
        if xi:
            row = U[i]
            for j in range(i + 1, n):
                r[j] = (r[j] - xi * row[j]) % mod
    return x


def factorial_power_limit(A: Matrix, p: int, N: int, budget: int | None = None) -> Matrix:
    """lim A^{n!} mod p^N, computed as C_n = C_{n-1}^n until C_n is idempotent.

    Returns the last iterate and raises ``IterationError`` if the budget runs out.
    The budget default covers v_p(n!) >= N and n! >= N dim(A).
    """
    mod = p**N
    n_max = budget if budget is not None else p * (N + 2) + len(A) * N + 8
    C = mat_mod(A, mod)
    for n in range(2, n_max):
        C = mat_pow(C, n, mod)
        if mat_eq(mat_mul(C, C, mod), C, mod):
            return C
    raise IterationError(f"A^(n!) did not stabilise mod p^{N} within n < {n_max}")
