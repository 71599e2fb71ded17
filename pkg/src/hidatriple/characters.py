"""Dirichlet characters with values in Z_p, and (generalised) Bernoulli numbers.

A character of order ``n`` is stored as a table of exponents: ``chi(a) = zeta_n^e``.
The root of unity ``zeta_n`` is embedded in Z_p as ``omega(g)^((p-1)/n)`` where ``g``
is the smallest primitive root mod p and ``omega`` the Teichmueller lift, so the
powers of the Teichmueller character have the natural exponent tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from math import comb, gcd

from .errors import ConfigError, DomainError
from .padic import PadicInt, QpElt, primitive_root, teichmuller, vp


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class DirichletChar:
    """``chi(a) = zeta_order ** exps[a mod modulus]``; ``exps[a] = -1`` marks chi(a) = 0."""

    modulus: int
    order: int
    exps: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.exps) != self.modulus:
            raise DomainError("exponent table length must equal the modulus")
        for a, e in enumerate(self.exps):
            if (gcd(a, self.modulus) == 1) != (e >= 0):
                raise DomainError(f"bad support at residue {a}")

    # constructors ------------------------------------------------------------
    @classmethod
    def trivial(cls, modulus: int = 1) -> DirichletChar:
        return cls(modulus, 1, tuple(0 if gcd(a, modulus) == 1 else -1 for a in range(modulus)))

    @classmethod
    def teichmuller_power(cls, p: int, j: int) -> DirichletChar:
        """omega_p^j as a character mod p."""
        g = primitive_root(p)
        n = p - 1
        exps = [-1] * p
        x = 1
        for i in range(n):
            exps[x] = (j * i) % n
            x = x * g % p
        return cls(p, n, tuple(exps)).minimal_order()

    @classmethod
    def kronecker(cls, D: int) -> DirichletChar:
        """The character a -> (D/a) for a fundamental discriminant D, modulus |D|."""
        M = abs(D)
        exps = []
        for a in range(M):
            s = _kronecker_symbol(D, a) if gcd(a, M) == 1 else 0
            exps.append(-1 if s == 0 else (0 if s == 1 else 1))
        return cls(M, 2, tuple(exps)).minimal_order()

    @classmethod
    def from_values(cls, modulus: int, order: int, table: dict[int, int]) -> DirichletChar:
        exps = [-1] * modulus
        for a, e in table.items():
            exps[a % modulus] = e % order
        return cls(modulus, order, tuple(exps))

    # evaluation ----------------------------------------------------------------
    def exponent(self, n: int) -> int | None:
        e = self.exps[n % self.modulus]
        return None if e < 0 else e

    def value(self, n: int, p: int, N: int) -> PadicInt:
        """chi(n) in Z/p^N via the fixed Teichmueller embedding."""
        e = self.exponent(n)
        if e is None:
            return PadicInt(p, N, 0)
        return zeta(self.order, p, N) ** e

    def value_int(self, n: int) -> int:
        """chi(n) as an integer; only for characters of order <= 2."""
        if self.order > 2:
            raise ConfigError("integer values need order <= 2")
        e = self.exponent(n)
        if e is None:
            return 0
        return 1 if e == 0 else -1

    def is_trivial(self) -> bool:
        return all(e <= 0 for e in self.exps)

    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        e = self.exponent(-1)
        assert e is not None
        return 1 if e == 0 else -1

    # algebra ---------------------------------------------------------------------
    def minimal_order(self) -> DirichletChar:
        """Same character with ``order`` equal to its true order."""
        g = 0
        for e in self.exps:
            if e > 0:
                g = gcd(g, e)
        if g == 0:
            return DirichletChar(self.modulus, 1, tuple(0 if e >= 0 else -1 for e in self.exps))
        g = gcd(g, self.order)
        return DirichletChar(self.modulus, self.order // g, tuple(e // g if e >= 0 else -1 for e in self.exps))

    def extend(self, modulus: int) -> DirichletChar:
        """Induce to a multiple of the modulus."""
        if modulus % self.modulus:
            raise DomainError("new modulus must be a multiple")
        exps = tuple(self.exps[a % self.modulus] if gcd(a, modulus) == 1 else -1 for a in range(modulus))
        return DirichletChar(modulus, self.order, exps)

    def __mul__(self, other: DirichletChar) -> DirichletChar:
        M = _lcm(self.modulus, other.modulus)
        n = _lcm(self.order, other.order)
        s, t = n // self.order, n // other.order
        exps = []
        for a in range(M):
            if gcd(a, M) != 1:
                exps.append(-1)
            else:
                exps.append((self.exps[a % self.modulus] * s + other.exps[a % other.modulus] * t) % n)
        return DirichletChar(M, n, tuple(exps)).minimal_order()

    def __pow__(self, k: int) -> DirichletChar:
        exps = tuple((e * k) % self.order if e >= 0 else -1 for e in self.exps)
        return DirichletChar(self.modulus, self.order, exps).minimal_order()

    def inverse(self) -> DirichletChar:
        return self ** (-1)

    def conj(self) -> DirichletChar:
        return self.inverse()

    def same_as(self, other: DirichletChar) -> bool:
        """Equality as functions on integers coprime to both moduli."""
        M = _lcm(self.modulus, other.modulus)
        return self.extend(M).minimal_order() == other.extend(M).minimal_order()

    def conductor(self) -> int:
        M = self.modulus
        for d in sorted(x for x in range(1, M + 1) if M % x == 0):
            ok = True
            for a in range(1, M):
                if gcd(a, M) == 1 and a % d == 1 % d and self.exps[a] != 0:
                    ok = False
                    break
            if ok:
                return d
        return M

    def primitive(self) -> DirichletChar:
        f = self.conductor()
        table = {}
        for a in range(f):
            if gcd(a, f) != 1:
                continue
            b = a
            while gcd(b, self.modulus) != 1:
                b += f
            table[a] = self.exps[b % self.modulus]
        return DirichletChar.from_values(f, self.order, table).minimal_order()

    # serialisation -----------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "conductor": self.conductor(),
            "order": self.order,
            "values": [[a, e] for a, e in enumerate(self.exps) if e >= 0],
        }

    @classmethod
    def from_json(cls, d: dict) -> DirichletChar:
        return cls.from_values(d["modulus"], d["order"], {a: e for a, e in d["values"]})


def _kronecker_symbol(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n > 0."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        result *= 1 if D % 8 in (1, 7) else -1
    a, m = D % n if n > 1 else 0, n
    # Jacobi symbol (a/m)
    if m == 1:
        return result
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                result = -result
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            result = -result
        a %= m
    return result if m == 1 else 0


@cache
def zeta(n: int, p: int, N: int) -> PadicInt:
    """The fixed primitive n-th root of unity in Z/p^N (n must divide p-1)."""
    if (p - 1) % n:
        raise ConfigError(f"order {n} does not divide p-1={p - 1}; no embedding in Z_{p}")
    return teichmuller(primitive_root(p), p, N) ** ((p - 1) // n)


def omega(p: int, j: int = 1) -> DirichletChar:
    return DirichletChar.teichmuller_power(p, j)


def char_decompose(chi: DirichletChar, l: int) -> tuple[DirichletChar, DirichletChar]:
    """Split ``chi`` as chi_(l) * chi^(l) with moduli l^v and M / l^v."""
    M = chi.modulus
    v = 0
    m = M
    while m % l == 0:
        m //= l
        v += 1
    Ml, Mo = l**v, m
    if Ml == 1:
        return DirichletChar.trivial(1), chi
    if Mo == 1:
        return chi, DirichletChar.trivial(1)
    tl, to = {}, {}
    for a in range(Ml):
        if gcd(a, Ml) == 1:
            b = _crt(a, Ml, 1, Mo)
            tl[a] = chi.exps[b]
    for a in range(Mo):
        if gcd(a, Mo) == 1:
            b = _crt(1, Ml, a, Mo)
            to[a] = chi.exps[b]
    return (
        DirichletChar.from_values(Ml, chi.order, tl).minimal_order(),
        DirichletChar.from_values(Mo, chi.order, to).minimal_order(),
    )


def _crt(a: int, m: int, b: int, n: int) -> int:
    return (a * n * pow(n, -1, m) + b * m * pow(m, -1, n)) % (m * n)


# ---------------------------------------------------------------------------
# Bernoulli numbers


@cache
def _bernoulli_minus(k: int) -> Fraction:
    """B_k with B_1 = -1/2 via sum_{j<=k} C(k+1, j) B_j = 0."""
    if k == 0:
        return Fraction(1)
    s = sum(comb(k + 1, j) * _bernoulli_minus(j) for j in range(k))
    return -s / (k + 1)


def bernoulli(k: int) -> Fraction:
    """B_k in the convention B_1 = +1/2."""
    if k == 1:
        return Fraction(1, 2)
    return _bernoulli_minus(k)


def bernoulli_poly(k: int, x: Fraction) -> Fraction:
    """B_k(x) = sum_j C(k, j) B_j x^{k-j} (so that B_k(1) = B_k with B_1 = +1/2)."""
    return sum(comb(k, j) * _bernoulli_minus(j) * x ** (k - j) for j in range(k + 1))


def gen_bernoulli_parts(k: int, chi: DirichletChar) -> dict[int, Fraction]:
    """B_{k,chi} split by character exponent: ``{e: S_e}`` with B_{k,chi} = sum_e S_e zeta^e."""
    if k < 1:
        raise DomainError("k must be >= 1")
    f = chi.modulus
    parts: dict[int, Fraction] = {}
    scale = Fraction(f) ** (k - 1)
    for a in range(1, f + 1):
        e = chi.exponent(a)
        if e is None:
            continue
        parts[e] = parts.get(e, Fraction(0)) + bernoulli_poly(k, Fraction(a, f))
    return {e: s * scale for e, s in parts.items()}


def gen_bernoulli(k: int, chi: DirichletChar, p: int | None = None, N: int = 20) -> Fraction | QpElt:
    """Generalised Bernoulli number B_{k,chi}.

    Exact ``Fraction`` for characters of order <= 2.  For higher order the value
    lives in Z_p[zeta] = Z_p and is returned as a ``QpElt`` with ``N`` digits of
    relative precision.
    """
    parts = gen_bernoulli_parts(k, chi)
    if chi.order <= 2:
        return sum((s if e == 0 else -s for e, s in parts.items()), Fraction(0))
    if p is None:
        raise ConfigError("a prime p is needed to evaluate a character of order > 2")
    D = 1
    for s in parts.values():
        D = _lcm(D, s.denominator)
    vD = vp(D, p) if D % p == 0 else 0
    # extra digits cover cancellation in the numerator
    work = N + vD + 4 * (k + 2)
    z = zeta(chi.order, p, work)
    total = 0
    for e, s in parts.items():
        total += (s * D).numerator * (z**e).residue
    total %= p**work
    if total == 0:
        return QpElt(p, 0, work - vD, 0)
    v = vp(total, p)
    unitD = D // p**vD
    relprec = min(N, work - v)
    unit = (total // p**v) * pow(unitD, -1, p**relprec)
    return QpElt(p, unit, v - vD, relprec)


def bernoulli_denominator_bound(k: int) -> int:
    """prod of primes q with (q-1) | k (von Staudt-Clausen)."""
    out = 1
    for q in range(2, k + 2):
        if all(q % d for d in range(2, int(q**0.5) + 1)) and k % (q - 1) == 0:
            out *= q
    return out
