"""Truncated Iwasawa algebra in one and three weight variables.

Elements of Lambda = Z_p[[X]] are stored modulo ``(p**Np, Y**M)`` where
``Y = X - center``.  The default center is 0; families built by interpolation
around a weight ``k0`` use the center ``x(k0) = (1+p)**k0 - 1`` so that
specialisation near ``k0`` keeps full precision.

Coefficients are plain integers reduced mod ``p**Np``; ``coeff(i)`` wraps one as a
``PadicInt``.  Specialisation reports its honest precision: the omitted tail
``sum_{n>=M} a_n Y**n`` is only known to have valuation at least
``M * (v(x - center) + decay)``, where ``decay`` is a certified lower bound on the
growth rate of coefficient valuations (zero for a general Lambda element).
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, factorial

from .errors import ConfigError, DomainError, PrecisionError
from .padic import (
    PadicInt,
    log_one_unit,
    one_unit_part,
    sqrt_one_unit,
    vp_capped,
    vp_factorial,
)


def weight_point(k: int, p: int, N: int) -> int:
    """x(k) = (1+p)^k - 1 mod p^N, the image of X at the weight-k point."""
    m = p**N
    return (pow(1 + p, k, m) - 1) % m if k >= 0 else (pow(pow(1 + p, -1, m), -k, m) - 1) % m


@dataclass(frozen=True)
class ArithPoint:
    """Weight ``k`` and finite part ``eps`` with eps(1+p) = zeta_p ** eps_exp."""

    k: int
    eps_exp: int = 0

    def x(self, p: int, N: int) -> int:
        if self.eps_exp % p:
            raise ConfigError("nontrivial finite part: use specialize(), which works in Z_p[zeta_p]")
        return weight_point(self.k, p, N)


# ---------------------------------------------------------------------------
# Z/p^N[zeta_p]: needed only for points with nontrivial finite part


@dataclass(frozen=True)
class CycloElt:
    """Element of (Z/p^N)[t]/(1 + t + ... + t^{p-1}), t a primitive p-th root of unity."""

    p: int
    N: int
    c: tuple[int, ...]

    @classmethod
    def scalar(cls, p: int, N: int, a: int) -> CycloElt:
        return cls(p, N, tuple([a % p**N] + [0] * (p - 2)))

    @classmethod
    def root(cls, p: int, N: int, j: int) -> CycloElt:
        j %= p
        full = [0] * p
        full[j] = 1
        return cls._from_full(p, N, full)

    @classmethod
    def _from_full(cls, p: int, N: int, full: Sequence[int]) -> CycloElt:
        m = p**N
        top = full[p - 1]
        return cls(p, N, tuple((full[i] - top) % m for i in range(p - 1)))

    def __add__(self, o: CycloElt) -> CycloElt:
        N = min(self.N, o.N)
        m = self.p**N
        return CycloElt(self.p, N, tuple((a + b) % m for a, b in zip(self.c, o.c)))

    def __sub__(self, o: CycloElt) -> CycloElt:
        N = min(self.N, o.N)
        m = self.p**N
        return CycloElt(self.p, N, tuple((a - b) % m for a, b in zip(self.c, o.c)))

    def __mul__(self, o: CycloElt | int) -> CycloElt:
        p = self.p
        if isinstance(o, int):
            m = p**self.N
            return CycloElt(p, self.N, tuple(a * o % m for a in self.c))
        N = min(self.N, o.N)
        full = [0] * p
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    full[(i + j) % p] += a * b
        return CycloElt._from_full(p, N, full)

    def __pow__(self, e: int) -> CycloElt:
        out = CycloElt.scalar(self.p, self.N, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, CycloElt):
            return NotImplemented
        m = self.p ** min(self.N, o.N)
        return all((a - b) % m == 0 for a, b in zip(self.c, o.c))

    def __hash__(self) -> int:
        return hash((self.p, self.c))


# ---------------------------------------------------------------------------
# One variable


@dataclass(frozen=True)
class IwasawaElt:
    """sum_{i<M} coeffs[i] (X - center)^i  mod p^Np."""

    p: int
    Np: int
    M: int
    coeffs: tuple[int, ...]
    center: int = 0
    decay: Fraction = field(default=Fraction(0))

    def __post_init__(self) -> None:
        m = self.p**self.Np
        c = tuple(int(a) % m for a in self.coeffs)
        if len(c) < self.M:
            c = c + (0,) * (self.M - len(c))
        object.__setattr__(self, "coeffs", c[: self.M])
        object.__setattr__(self, "center", self.center % m)

    # constructors -----------------------------------------------------------
    @classmethod
    def const(cls, a: int, p: int, Np: int, M: int, center: int = 0) -> IwasawaElt:
        return cls(p, Np, M, (a,), center)

    @classmethod
    def zero(cls, p: int, Np: int, M: int, center: int = 0) -> IwasawaElt:
        return cls(p, Np, M, (), center)

    @classmethod
    def gen(cls, p: int, Np: int, M: int, center: int = 0) -> IwasawaElt:
        """The element X."""
        return cls(p, Np, M, (center, 1), center)

    def coeff(self, i: int) -> PadicInt:
        return PadicInt(self.p, self.Np, self.coeffs[i])

    @property
    def modulus(self) -> int:
        return self.p**self.Np

    # ring structure -------------------------------------------------------------
    def _check(self, o: IwasawaElt) -> tuple[int, int]:
        if o.p != self.p:
            raise DomainError("mixing primes")
        Np = min(self.Np, o.Np)
        if (self.center - o.center) % self.p**Np:
            raise DomainError("elements expanded around different centers")
        return Np, min(self.M, o.M)

    def _lift(self, o: IwasawaElt | int | PadicInt) -> IwasawaElt:
        if isinstance(o, IwasawaElt):
            return o
        return IwasawaElt(self.p, self.Np, self.M, (int(o),), self.center)

    def __add__(self, o):
        o = self._lift(o)
        Np, M = self._check(o)
        return IwasawaElt(self.p, Np, M, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)), self.center, min(self.decay, o.decay))

    __radd__ = __add__

    def __neg__(self):
        return IwasawaElt(self.p, self.Np, self.M, tuple(-a for a in self.coeffs), self.center, self.decay)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, PadicInt)):
            Np = self.Np if isinstance(o, int) else min(self.Np, o.N)
            return IwasawaElt(self.p, Np, self.M, tuple(a * int(o) for a in self.coeffs), self.center, self.decay)
        Np, M = self._check(o)
        m = self.p**Np
        out = [0] * M
        for i, a in enumerate(self.coeffs[:M]):
            if a:
                for j in range(M - i):
                    out[i + j] += a * o.coeffs[j]
        return IwasawaElt(self.p, Np, M, tuple(x % m for x in out), self.center, min(self.decay, o.decay))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> IwasawaElt:
        if e < 0:
            return self.inverse() ** (-e)
        out = IwasawaElt.const(1, self.p, self.Np, self.M, self.center)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.p != 0

    def inverse(self) -> IwasawaElt:
        if not self.is_unit():
            raise DomainError("constant term is not a unit")
        m = self.modulus
        inv0 = pow(self.coeffs[0], -1, m)
        out = [inv0]
        for n in range(1, self.M):
            s = sum(self.coeffs[i] * out[n - i] for i in range(1, n + 1))
            out.append(-s * inv0 % m)
        return IwasawaElt(self.p, self.Np, self.M, tuple(out), self.center, self.decay)

    def __truediv__(self, o):
        if isinstance(o, int):
            o = self._lift(o)
        return self * o.inverse()

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, IwasawaElt):
            if isinstance(o, int):
                o = self._lift(o)
            else:
                return NotImplemented
        try:
            Np, M = self._check(o)
        except DomainError:
            return False
        m = self.p**Np
        return all((a - b) % m == 0 for a, b in zip(self.coeffs[:M], o.coeffs[:M]))

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def reduce(self, Np: int | None = None, M: int | None = None) -> IwasawaElt:
        Np = self.Np if Np is None else Np
        M = self.M if M is None else M
        if Np > self.Np or M > self.M:
            raise PrecisionError("cannot increase precision")
        return IwasawaElt(self.p, Np, M, self.coeffs[:M], self.center, self.decay)

    def valuation(self) -> int:
        return min(vp_capped(a, self.p, self.Np) for a in self.coeffs)

    # evaluation -------------------------------------------------------------
    def eval_prec(self, x: int, xN: int | None = None) -> int:
        """Certified p-adic precision of the value at X = x."""
        xN = self.Np if xN is None else xN
        N = min(self.Np, xN)
        v = vp_capped(x - self.center, self.p, N)
        tail = ceil(self.M * (v + self.decay))
        return max(0, min(N, tail))

    def eval_at(self, x: int, xN: int | None = None) -> PadicInt:
        """Value at X = x (an integer representative known mod p^xN)."""
        N = self.eval_prec(x, xN)
        m = self.p**max(N, 0)
        y = (x - self.center) % m if m > 1 else 0
        acc = 0
        for a in reversed(self.coeffs):
            acc = (acc * y + a) % m
        return PadicInt(self.p, N, acc)

    def specialize(self, Q: ArithPoint):
        """Image under the arithmetic point ``Q``.

        Trivial finite part gives a ``PadicInt``; otherwise a ``CycloElt`` in Z_p[zeta_p]
        with precision floor(M / (p - 1)) coming from v(zeta_p - 1) = 1/(p - 1).
        """
        if Q.eps_exp % self.p == 0:
            return self.eval_at(weight_point(Q.k, self.p, self.Np))
        if self.center % self.p**self.Np:
            raise ConfigError("points with finite part need a series centered at 0")
        p, Np = self.p, self.Np
        N = min(Np, (self.M * (1 + self.decay * (p - 1))) // (p - 1))
        N = int(N)
        if N <= 0:
            raise PrecisionError("truncation too short for a ramified specialisation", loss=Np)
        x = CycloElt.root(p, N, Q.eps_exp) * pow(1 + p, Q.k, p**N) - CycloElt.scalar(p, N, 1)
        acc = CycloElt.scalar(p, N, 0)
        for a in reversed(self.coeffs):
            acc = acc * x + CycloElt.scalar(p, N, a)
        return acc

    def to_json(self) -> dict:
        return {"p": self.p, "Np": self.Np, "truncations": [self.M], "center": self.center, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, d: dict) -> IwasawaElt:
        return cls(d["p"], d["Np"], d["truncations"][0], tuple(d["coeffs"]), d.get("center", 0))


# ---------------------------------------------------------------------------
# group-like elements


def log_ratio(u: PadicInt, W: int) -> int:
    """s = log(u) / log(1+p) mod p^W, as a non-negative integer."""
    p = u.p
    lu = log_one_unit(PadicInt(p, W + 1, u.residue))
    lg = log_one_unit(PadicInt(p, W + 1, 1 + p))
    return lu.divide_exact(lg).residue


def grouplike(u: PadicInt, M: int, Np: int | None = None, center: int = 0) -> IwasawaElt:
    """(1+X)^s with (1+p)^s = u, expanded around ``center``."""
    p = u.p
    Np = u.N if Np is None else Np
    if Np > u.N:
        raise PrecisionError("grouplike requested beyond the precision of u")
    if (u.residue - 1) % p:
        raise DomainError(f"{u} is not a one-unit")
    # s is needed mod p^(Np + v((M-1)!)); u carries only u.N digits
    W = min(Np + vp_factorial(max(M - 1, 1), p) + 1, u.N - 1)
    s = log_ratio(PadicInt(p, W + 1, u.residue), W)
    Np = min(Np, W - vp_factorial(max(M - 1, 1), p))
    m = p**Np
    c = center % m
    if c % p:
        raise DomainError("center must lie in pZ_p")
    # (1 + c + Y)^s = (1+c)^s (1 + Y/(1+c))^s
    base = pow(1 + c, s, m)
    inv = pow(1 + c, -1, m)
    coeffs = []
    for n in range(M):
        coeffs.append(comb(s, n) * base * pow(inv, n, m) % m)
    return IwasawaElt(p, Np, M, tuple(coeffs), c)


def diamond(z: int, p: int, Np: int, M: int, center: int = 0) -> IwasawaElt:
    """<z>_Lambda = [z omega^{-1}(z)]."""
    W = Np + vp_factorial(max(M - 1, 1), p) + 3
    return grouplike(one_unit_part(z, p, W), M, Np, center)


def half_diamond(z: int, p: int, Np: int, M: int, center: int = 0) -> IwasawaElt:
    """<z>^{1/2}, the group-like element of the one-unit square root."""
    W = Np + vp_factorial(max(M - 1, 1), p) + 3
    return grouplike(sqrt_one_unit(one_unit_part(z, p, W)), M, Np, center)


def eps_value(z: int, Q: ArithPoint, p: int, N: int) -> CycloElt:
    """eps(z) for the finite part of ``Q``: zeta^(eps_exp * s(z)) with s(z) = log<z>/log(1+p) mod p."""
    s = log_ratio(one_unit_part(z, p, N + 2), 2) % p
    return CycloElt.root(p, N, Q.eps_exp * s)


# ---------------------------------------------------------------------------
# exp / log of Iwasawa elements


def exp_series(f: IwasawaElt) -> IwasawaElt:
    """exp(f) for f with every coefficient divisible by p (p odd)."""
    p, Np, M = f.p, f.Np, f.M
    if p == 2 or any(a % p for a in f.coeffs):
        raise DomainError("exp needs all coefficients divisible by p")
    nmax = 1
    while nmax - vp_factorial(nmax, p) < Np:
        nmax += 1
    W = Np + vp_factorial(nmax, p)
    g = IwasawaElt(p, W, M, f.coeffs, f.center)
    total = [1] + [0] * (M - 1)
    power = IwasawaElt.const(1, p, W, M, f.center)
    for n in range(1, nmax + 1):
        power = power * g
        v = vp_factorial(n, p)
        unit = factorial(n) // p**v
        inv = pow(unit, -1, p**Np)
        for i, a in enumerate(power.coeffs):
            if a % p**v:
                raise PrecisionError("exp term not integral", loss=v)
            total[i] += (a // p**v) * inv
    return IwasawaElt(p, Np, M, tuple(total), f.center)


def log_series(f: IwasawaElt) -> IwasawaElt:
    """log(f) for f congruent to 1 mod p (coefficientwise)."""
    p, Np, M = f.p, f.Np, f.M
    g = list(f.coeffs)
    g[0] -= 1
    if any(a % p for a in g):
        raise DomainError("log needs f = 1 mod p")
    nmax = 1
    while nmax - _vp(nmax, p) < Np:
        nmax += 1
    W = Np + max(_vp(n, p) for n in range(1, nmax + 1))
    gg = IwasawaElt(p, W, M, tuple(g), f.center)
    total = [0] * M
    power = IwasawaElt.const(1, p, W, M, f.center)
    for n in range(1, nmax + 1):
        power = power * gg
        v = _vp(n, p)
        inv = pow(n // p**v, -1, p**Np)
        sign = 1 if n % 2 else -1
        for i, a in enumerate(power.coeffs):
            total[i] += sign * (a // p**v) * inv
    return IwasawaElt(p, Np, M, tuple(total), f.center)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def coleman_reparam(n: int, k0: int, eps_scale: PadicInt, M: int) -> IwasawaElt:
    """<n>_Lambda evaluated at X = (1+p)^k0 exp(eps X log(1+p)) - 1.

    Equal to u^k0 exp(eps log(u) X) with u = <n>.  The value at X = b is <n>^(k0 + eps b),
    so the weight k sits at b = (k - k0) / eps.  The coefficients of X^j have valuation
    at least j (v(eps) + 1 - 1/(p-1)), recorded as ``decay``.
    """
    p, Np = eps_scale.p, eps_scale.N
    u = one_unit_part(n, p, Np)
    W = Np + vp_factorial(M, p) + 1
    lu = log_one_unit(PadicInt(p, W, u.residue))
    c = lu.residue * eps_scale.residue
    v_c = vp_capped(c, p, W)
    m = p**Np
    coeffs = []
    for j in range(M):
        vj = vp_factorial(j, p)
        t = pow(c, j, p ** (Np + vj))
        if t % p**vj:
            raise PrecisionError("composite series not integral", loss=vj)
        coeffs.append((t // p**vj) * pow(factorial(j) // p**vj, -1, m) % m)
    lead = pow(u.residue, k0, m)
    decay = Fraction(min(v_c, Np)) - Fraction(1, p - 1)
    series = IwasawaElt(p, Np, M, tuple(coeffs), 0, max(decay, Fraction(0)))
    return series * lead


# ---------------------------------------------------------------------------
# Newton interpolation


def node_weights(k0: int, p: int, count: int, stride: int = 1, schedule: str = "arithmetic") -> list[int]:
    """Interpolation weights.

    ``arithmetic``: k0 + (p-1) stride m, consecutive node differences of valuation 1.
    ``geometric``: k0 + (p-1) p^(m-1) stride for m >= 1 (k0 for m = 0).
    """
    if schedule == "arithmetic":
        return [k0 + (p - 1) * stride * m for m in range(count)]
    if schedule == "geometric":
        return [k0] + [k0 + (p - 1) * p ** (m - 1) * stride for m in range(1, count)]
    raise ConfigError(f"unknown node schedule {schedule!r}")


def divided_difference_loss(nodes: Sequence[int], p: int, prec: int) -> int:
    """Digits consumed by the divided-difference table on these nodes."""
    n = len(nodes)
    P = [prec] * n
    worst = prec
    for m in range(1, n):
        P = [min(P[i], P[i + 1]) - vp_capped(nodes[i + m] - nodes[i], p, prec) for i in range(n - m)]
        worst = min(worst, P[0])
    return prec - worst


def newton_interpolate(
    nodes: Sequence[int],
    values: Sequence[Sequence[int]] | Sequence[int],
    p: int,
    prec: int,
    center: int = 0,
) -> tuple[list[list[int]], int]:
    """Interpolating polynomial through (nodes[i], values[i]) in powers of (X - center).

    ``values`` may be scalars or equal-length vectors (interpolated componentwise).
    Returns ``(coeffs, prec_out)`` where ``coeffs[j]`` is the vector of coefficients of
    (X - center)^j and every entry is known mod p^prec_out.  ``prec_out`` is ``prec``
    minus the certified divided-difference loss.
    """
    n = len(nodes)
    if n == 0 or n != len(values):
        raise DomainError("need as many values as nodes, at least one")
    if len(set(x % p**prec for x in nodes)) != n:
        raise DomainError("nodes must be distinct")
    scalar = isinstance(values[0], int)
    vecs = [[v] if scalar else list(v) for v in values]
    L = len(vecs[0])
    # per-entry precision ledger for the divided differences
    P = [prec] * n
    table = [[x % p**prec for x in v] for v in vecs]
    newton = [table[0]]
    precs = [prec]
    for m in range(1, n):
        nxt, nP = [], []
        for i in range(n - m):
            d = nodes[i + m] - nodes[i]
            pr = min(P[i], P[i + 1])
            v = vp_capped(d, p, pr)
            if v >= pr:
                raise PrecisionError(
                    f"node difference has valuation {v} >= available precision {pr}",
                    loss=prec - pr + v,
                )
            newp = pr - v
            mod_in = p**pr
            mod_out = p**newp
            du = (d // p**v) % mod_out
            inv = pow(du, -1, mod_out)
            row = []
            for a, b in zip(table[i + 1], table[i]):
                num = (a - b) % mod_in
                if num % p**v:
                    raise DomainError("values are not those of a Lambda-integral series at these nodes")
                row.append((num // p**v) * inv % mod_out)
            nxt.append(row)
            nP.append(newp)
        table, P = nxt, nP
        newton.append(table[0])
        precs.append(P[0])
    out_prec = min(precs)
    mod = p**out_prec
    # expand sum_m c_m prod_{j<m} (Y - (x_j - center)) in powers of Y = X - center
    coeffs = [[0] * L for _ in range(n)]
    basis = [1]  # coefficients of prod_{j<m} (Y - s_j)
    for m in range(n):
        for deg, b in enumerate(basis):
            if b:
                row = coeffs[deg]
                for t, c in enumerate(newton[m]):
                    row[t] += b * c
        s = nodes[m] - center
        new = [0] * (len(basis) + 1)
        for deg, b in enumerate(basis):
            new[deg + 1] += b
            new[deg] -= s * b
        basis = [x % mod for x in new]
    coeffs = [[x % mod for x in row] for row in coeffs]
    return coeffs, out_prec


def evaluate_poly(coeffs: Sequence[int], x: int, center: int, mod: int) -> int:
    acc = 0
    y = (x - center) % mod
    for a in reversed(coeffs):
        acc = (acc * y + a) % mod
    return acc


def reduce_mod_nodes(coeffs: Sequence[int], nodes: Sequence[int], center: int, mod: int) -> list[int]:
    """Remainder of a polynomial in Y = X - center modulo prod (X - node), by synthetic division."""
    r = [c % mod for c in coeffs]
    n = len(nodes)
    # node polynomial in Y
    npoly = [1]
    for x in nodes:
        s = x - center
        new = [0] * (len(npoly) + 1)
        for d, b in enumerate(npoly):
            new[d + 1] += b
            new[d] -= s * b
        npoly = [c % mod for c in new]
    for top in range(len(r) - 1, n - 1, -1):
        q = r[top]
        if q:
            for d in range(n + 1):
                r[top - n + d] = (r[top - n + d] - q * npoly[d]) % mod
    return r[:n] + [0] * max(0, n - len(r))


# ---------------------------------------------------------------------------
# Three variables


@dataclass(frozen=True)
class REllt:
    """Element of Z_p[[X1,X2,X3]] mod (p^Np, Y1^M1, Y2^M2, Y3^M3), Yi = Xi - centers[i].

    ``coeffs`` is flat, row-major in (i1, i2, i3).
    """

    p: int
    Np: int
    shape: tuple[int, int, int]
    coeffs: tuple[int, ...]
    centers: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self) -> None:
        m = self.p**self.Np
        size = self.shape[0] * self.shape[1] * self.shape[2]
        c = tuple(int(a) % m for a in self.coeffs)
        if len(c) < size:
            c = c + (0,) * (size - len(c))
        object.__setattr__(self, "coeffs", c[:size])
        object.__setattr__(self, "centers", tuple(x % m for x in self.centers))

    @classmethod
    def const(cls, a: int, p: int, Np: int, shape, centers=(0, 0, 0)) -> REllt:
        return cls(p, Np, tuple(shape), (a,), tuple(centers))

    @classmethod
    def zero(cls, p: int, Np: int, shape, centers=(0, 0, 0)) -> REllt:
        return cls(p, Np, tuple(shape), (), tuple(centers))

    @classmethod
    def from_iwasawa(cls, f: IwasawaElt, axis: int, shape, centers) -> REllt:
        shape = tuple(shape)
        centers = tuple(centers)
        m = f.p**f.Np
        if (f.center - centers[axis]) % m:
            raise DomainError("center mismatch")
        out = [0] * (shape[0] * shape[1] * shape[2])
        for i in range(min(f.M, shape[axis])):
            idx = [0, 0, 0]
            idx[axis] = i
            out[cls._flat(shape, *idx)] = f.coeffs[i]
        return cls(f.p, f.Np, shape, tuple(out), centers)

    @staticmethod
    def _flat(shape, i: int, j: int, k: int) -> int:
        return (i * shape[1] + j) * shape[2] + k

    def get(self, i: int, j: int, k: int) -> int:
        return self.coeffs[self._flat(self.shape, i, j, k)]

    def _check(self, o: REllt) -> int:
        if o.p != self.p or o.shape != self.shape:
            raise DomainError("incompatible REllt operands")
        Np = min(self.Np, o.Np)
        m = self.p**Np
        if any((a - b) % m for a, b in zip(self.centers, o.centers)):
            raise DomainError("REllt products need equal centers")
        return Np

    def _lift(self, o) -> REllt:
        if isinstance(o, REllt):
            return o
        return REllt.const(int(o), self.p, self.Np, self.shape, self.centers)

    def __add__(self, o):
        o = self._lift(o)
        Np = self._check(o)
        return REllt(self.p, Np, self.shape, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)), self.centers)

    __radd__ = __add__

    def __neg__(self):
        return REllt(self.p, self.Np, self.shape, tuple(-a for a in self.coeffs), self.centers)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, PadicInt)):
            Np = self.Np if isinstance(o, int) else min(self.Np, o.N)
            return REllt(self.p, Np, self.shape, tuple(a * int(o) for a in self.coeffs), self.centers)
        Np = self._check(o)
        m = self.p**Np
        s = self.shape
        out = [0] * len(self.coeffs)
        nz_a = [(i, j, k, self.get(i, j, k)) for i in range(s[0]) for j in range(s[1]) for k in range(s[2]) if self.get(i, j, k)]
        nz_b = [(i, j, k, o.get(i, j, k)) for i in range(s[0]) for j in range(s[1]) for k in range(s[2]) if o.get(i, j, k)]
        for i, j, k, a in nz_a:
            for i2, j2, k2, b in nz_b:
                if i + i2 < s[0] and j + j2 < s[1] and k + k2 < s[2]:
                    out[self._flat(s, i + i2, j + j2, k + k2)] += a * b
        return REllt(self.p, Np, s, tuple(x % m for x in out), self.centers)

    __rmul__ = __mul__

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, REllt):
            if isinstance(o, int):
                o = self._lift(o)
            else:
                return NotImplemented
        try:
            Np = self._check(o)
        except DomainError:
            return False
        m = self.p**Np
        return all((a - b) % m == 0 for a, b in zip(self.coeffs, o.coeffs))

    def __hash__(self) -> int:
        return hash((self.p, self.coeffs))

    def is_unit(self) -> bool:
        return self.coeffs[0] % self.p != 0

    def inverse(self) -> REllt:
        """Inverse of a unit by Newton iteration y <- y (2 - f y)."""
        if not self.is_unit():
            raise DomainError("constant term is not a unit")
        y = REllt.const(pow(self.coeffs[0], -1, self.p**self.Np), self.p, self.Np, self.shape, self.centers)
        for _ in range(2 * (sum(self.shape) + self.Np).bit_length() + 2):
            y = y * (2 - self * y)
        return y

    def eval_prec(self, xs: Sequence[int]) -> int:
        N = self.Np
        for x, c, M in zip(xs, self.centers, self.shape):
            v = vp_capped(x - c, self.p, self.Np)
            N = min(N, M * v)
        return N

    def eval_at(self, xs: Sequence[int]) -> PadicInt:
        N = self.eval_prec(xs)
        m = self.p**N
        ys = [(x - c) % m for x, c in zip(xs, self.centers)]
        acc = 0
        s = self.shape
        for i in reversed(range(s[0])):
            acc_j = 0
            for j in reversed(range(s[1])):
                acc_k = 0
                for k in reversed(range(s[2])):
                    acc_k = (acc_k * ys[2] + self.get(i, j, k)) % m
                acc_j = (acc_j * ys[1] + acc_k) % m
            acc = (acc * ys[0] + acc_j) % m
        return PadicInt(self.p, N, acc)

    def specialize(self, Qs: Sequence[ArithPoint]) -> PadicInt:
        return self.eval_at([Q.x(self.p, self.Np) for Q in Qs])

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "Np": self.Np,
            "truncations": list(self.shape),
            "centers": list(self.centers),
            "coeffs": list(self.coeffs),
        }

    @classmethod
    def from_json(cls, d: dict) -> REllt:
        return cls(d["p"], d["Np"], tuple(d["truncations"]), tuple(d["coeffs"]), tuple(d.get("centers", (0, 0, 0))))


def newton_interpolate_3(
    nodes: tuple[Sequence[int], Sequence[int], Sequence[int]],
    values: dict[tuple[int, int, int], Sequence[int]],
    p: int,
    prec: int,
    centers: tuple[int, int, int],
) -> tuple[list[list[int]], tuple[int, int, int], int]:
    """Tensor-grid interpolation, one variable at a time.

    ``values[(i, j, k)]`` is the vector of data at (nodes[0][i], nodes[1][j], nodes[2][k]).
    Returns ``(flat, shape, prec_out)`` where ``flat[t]`` is the vector of coefficients at
    flat row-major index ``t``; the losses of the three axes add up.
    """
    shape = tuple(len(n) for n in nodes)
    cur = {key: list(v) for key, v in values.items()}
    P = prec
    for axis in range(3):
        new: dict[tuple[int, int, int], list[int]] = {}
        others = sorted({tuple(k for a, k in enumerate(key) if a != axis) for key in cur})
        outP = P
        for o in others:
            def key_of(i, o=o):
                k = list(o)
                k.insert(axis, i)
                return tuple(k)

            vals = [cur[key_of(i)] for i in range(shape[axis])]
            coeffs, q = newton_interpolate(nodes[axis], vals, p, P, centers[axis])
            outP = min(outP, q)
            for i, c in enumerate(coeffs):
                new[key_of(i)] = c
        cur, P = new, outP
    mod = p**P
    flat = []
    for i in range(shape[0]):
        for j in range(shape[1]):
            for k in range(shape[2]):
                flat.append([x % mod for x in cur[(i, j, k)]])
    return flat, shape, P
