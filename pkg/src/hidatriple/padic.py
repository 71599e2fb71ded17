"""Finite-precision p-adic scalars.

``PadicInt`` is an element of Z/p^N that remembers p and N.  ``QpElt`` is a
p-adic number ``unit * p**val`` used where negative valuations are genuine
(Euler factors, generalised Bernoulli numbers).  Heavy inner loops elsewhere in
the package work on bare integers modulo ``p**N`` and only wrap results.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cache
from typing import Union

from .errors import DomainError, PrecisionError

IntLike = Union[int, "PadicInt"]


def vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer; raises on zero."""
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_capped(n: int, p: int, cap: int) -> int:
    """Valuation of ``n`` viewed modulo ``p**cap`` (returns ``cap`` for zero)."""
    n %= p**cap
    if n == 0:
        return cap
    return vp(n, p)


def vp_fraction(x: Fraction, p: int) -> int:
    if x == 0:
        raise DomainError("valuation of 0 is infinite")
    return vp(x.numerator, p) - vp(x.denominator, p)


def vp_factorial(n: int, p: int) -> int:
    """Legendre's formula."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


@cache
def primitive_root(p: int) -> int:
    """Smallest primitive root modulo the odd prime ``p``."""
    order = p - 1
    factors = _prime_factors(order)
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    raise DomainError(f"no primitive root mod {p}")


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True, slots=True)
class PadicInt:
    """An element of Z/p^N.

    Arithmetic between elements of different precision happens at the smaller
    precision.  Plain Python integers coerce at the other operand's precision.
    """

    p: int
    N: int
    residue: int

    def __post_init__(self) -> None:
        if self.N < 0:
            raise DomainError("negative precision")
        object.__setattr__(self, "residue", self.residue % self.p**self.N)

    # construction -----------------------------------------------------------
    @classmethod
    def from_fraction(cls, x: Fraction | int, p: int, N: int) -> PadicInt:
        x = Fraction(x)
        if x.denominator % p == 0:
            raise DomainError(f"{x} is not p-integral for p={p}")
        m = p**N
        return cls(p, N, x.numerator * pow(x.denominator, -1, m))

    @property
    def modulus(self) -> int:
        return self.p**self.N

    # coercion ---------------------------------------------------------------
    def _coerce(self, other: IntLike) -> tuple[int, int]:
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise DomainError("mixing different primes")
            return other.residue, min(self.N, other.N)
        if isinstance(other, int):
            return other, self.N
        if isinstance(other, Fraction):
            return PadicInt.from_fraction(other, self.p, self.N).residue, self.N
        return NotImplemented  # type: ignore[return-value]

    # ring operations -------------------------------------------------------
    def __add__(self, other: IntLike) -> PadicInt:
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        r, N = c
        return PadicInt(self.p, N, self.residue + r)

    __radd__ = __add__

    def __sub__(self, other: IntLike) -> PadicInt:
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        r, N = c
        return PadicInt(self.p, N, self.residue - r)

    def __rsub__(self, other: IntLike) -> PadicInt:
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        r, N = c
        return PadicInt(self.p, N, r - self.residue)

    def __mul__(self, other: IntLike) -> PadicInt:
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        r, N = c
        return PadicInt(self.p, N, self.residue * r)

    __rmul__ = __mul__

    def __neg__(self) -> PadicInt:
        return PadicInt(self.p, self.N, -self.residue)

    def __pow__(self, e: int) -> PadicInt:
        if e < 0:
            return self.inverse() ** (-e)
        return PadicInt(self.p, self.N, pow(self.residue, e, self.modulus))

    def inverse(self) -> PadicInt:
        if not self.is_unit():
            raise DomainError(f"{self} is not a unit")
        return PadicInt(self.p, self.N, pow(self.residue, -1, self.modulus))

    def __truediv__(self, other: IntLike) -> PadicInt:
        if isinstance(other, int):
            other = PadicInt(self.p, self.N, other)
        if not isinstance(other, PadicInt):
            return NotImplemented
        if other.is_unit():
            return self * other.inverse()
        return self.divide_exact(other)

    def __rtruediv__(self, other: int) -> PadicInt:
        return PadicInt(self.p, self.N, other) / self

    def divide_exact(self, other: PadicInt) -> PadicInt:
        """Division by a non-unit; loses ``v(other)`` digits of precision."""
        N = min(self.N, other.N)
        v = other.valuation()
        if v >= N:
            raise PrecisionError("division by an element that is zero at this precision", loss=v)
        if self.valuation() < v:
            raise DomainError("quotient is not integral")
        p = self.p
        num = (self.residue % p**N) // p**v
        den = (other.residue % p**N) // p**v
        Nn = N - v
        return PadicInt(p, Nn, num * pow(den, -1, p**Nn))

    # comparison -------------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, PadicInt):
            if other.p != self.p:
                return False
            N = min(self.N, other.N)
            return (self.residue - other.residue) % self.p**N == 0
        if isinstance(other, int):
            return (self.residue - other) % self.modulus == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.N, self.residue))

    def __int__(self) -> int:
        return self.residue

    def __repr__(self) -> str:
        return f"PadicInt({self.residue} mod {self.p}^{self.N})"

    # p-adic data ------------------------------------------------------------
    def valuation(self) -> int:
        return vp_capped(self.residue, self.p, self.N)

    def is_unit(self) -> bool:
        return self.N > 0 and self.residue % self.p != 0

    def reduce(self, N: int) -> PadicInt:
        if N > self.N:
            raise PrecisionError(f"cannot raise precision from {self.N} to {N}")
        return PadicInt(self.p, N, self.residue)

    def centered(self) -> int:
        """Representative in (-p^N/2, p^N/2]."""
        m = self.modulus
        r = self.residue
        return r - m if r > m // 2 else r


# ---------------------------------------------------------------------------
# Teichmueller, one-units, square roots


def _check_unit(z: int, p: int) -> None:
    if z % p == 0:
        raise DomainError(f"{z} is divisible by p={p}; Teichmueller undefined")


def teichmuller(z: int, p: int, N: int) -> PadicInt:
    """The (p-1)-th root of unity congruent to ``z`` mod p, as the limit of z^{p^n}."""
    _check_unit(z, p)
    m = p**N
    x = z % m
    while True:
        y = pow(x, p, m)
        if y == x:
            return PadicInt(p, N, x)
        x = y


def one_unit_part(z: int, p: int, N: int) -> PadicInt:
    """``z * teichmuller(z)^{-1}``, an element congruent to 1 mod p."""
    w = teichmuller(z, p, N)
    return PadicInt(p, N, z) * w.inverse()


def sqrt_one_unit(u: PadicInt) -> PadicInt:
    """The unique square root congruent to 1 mod p of a one-unit (p odd)."""
    p, N = u.p, u.N
    if p == 2:
        raise DomainError("p = 2 is not supported")
    if u.residue % p != 1 % p:
        raise DomainError(f"{u} is not congruent to 1 mod {p}")
    m = p**N
    v = 1
    inv2 = pow(2, -1, m)
    # Newton iteration doubles the number of correct digits each step.
    digits = 1
    while digits < N:
        v = (v + u.residue * pow(v, -1, m)) * inv2 % m
        digits *= 2
    v = (v + u.residue * pow(v, -1, m)) * inv2 % m
    return PadicInt(p, N, v)


def log_one_unit(u: PadicInt) -> PadicInt:
    """p-adic logarithm of a one-unit; the result has valuation >= 1."""
    p, N = u.p, u.N
    if (u.residue - 1) % p != 0:
        raise DomainError("log requires a one-unit")
    x = (u.residue - 1) % p**N
    if x == 0:
        return PadicInt(p, N, 0)
    total = 0
    m = p**N
    n = 1
    # v(x^n / n) >= n - v_p(n); stop once that exceeds N.
    while n - _vp_small(n, p) < N + 1:
        v = _vp_small(n, p)
        mod = p ** (N + v)
        t = pow(x, n, mod) // p**v
        term = t * pow(n // p**v, -1, m)
        total += term if n % 2 == 1 else -term
        n += 1
    return PadicInt(p, N, total)


def exp_padic(x: PadicInt) -> PadicInt:
    """p-adic exponential of an element of valuation >= 1 (p odd)."""
    p, N = x.p, x.N
    if x.residue % p != 0:
        raise DomainError("exp requires valuation >= 1")
    m = p**N
    total, n = 1, 1
    while n - vp_factorial(n, p) < N + 1:
        v = vp_factorial(n, p)
        mod = p ** (N + v)
        t = pow(x.residue, n, mod) // p**v
        unit = _factorial_unit(n, p, m)
        total += t * pow(unit, -1, m)
        n += 1
    return PadicInt(p, N, total)


def _vp_small(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _factorial_unit(n: int, p: int, m: int) -> int:
    """n! with all factors of p removed, reduced mod m."""
    out = 1
    for i in range(2, n + 1):
        while i % p == 0:
            i //= p
        out = out * i % m
    return out


def hensel_root(coeffs: list[int], seed: int, p: int, N: int) -> PadicInt:
    """Lift a simple root mod p of the integer polynomial ``sum coeffs[i] X^i``."""
    m = p**N

    def f(x: int) -> int:
        return sum(c * pow(x, i, m) for i, c in enumerate(coeffs)) % m

    def df(x: int) -> int:
        return sum(i * c * pow(x, i - 1, m) for i, c in enumerate(coeffs) if i) % m

    if f(seed) % p != 0:
        raise DomainError(f"{seed} is not a root mod {p}")
    if df(seed) % p == 0:
        from .errors import HenselError

        raise HenselError(f"root {seed} mod {p} is not simple")
    x = seed % m
    for _ in range(N.bit_length() + 2):
        x = (x - f(x) * pow(df(x), -1, m)) % m
    return PadicInt(p, N, x)


def sqrt_padic(a: PadicInt) -> PadicInt:
    """Square root of a unit that is a square mod p (branch fixed by smallest residue)."""
    p = a.p
    if not a.is_unit():
        raise DomainError("square root of a non-unit is not supported")
    r0 = next((r for r in range(1, p) if (r * r - a.residue) % p == 0), None)
    if r0 is None:
        from .errors import ExtensionNeeded

        raise ExtensionNeeded(f"{a.residue % p} is not a square mod {p}")
    return hensel_root([-a.residue, 0, 1], r0, p, a.N)


# ---------------------------------------------------------------------------
# Q_p elements with valuation


@dataclass(frozen=True, slots=True)
class QpElt:
    """``unit * p**val`` with the unit known modulo ``p**relprec``.

    Zero is represented with ``unit = 0`` and ``val`` the absolute precision.
    """

    p: int
    unit: int
    val: int
    relprec: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "unit", self.unit % self.p**self.relprec)

    @classmethod
    def make(cls, p: int, x: int | Fraction | PadicInt, relprec: int) -> QpElt:
        if isinstance(x, PadicInt):
            if x.residue == 0:
                return cls(p, 0, x.N, 0)
            v = x.valuation()
            return cls(p, x.residue // p**v, v, x.N - v)
        x = Fraction(x)
        if x == 0:
            return cls(p, 0, relprec, 0)
        v = vp_fraction(x, p)
        num = x.numerator // p ** max(v, 0)
        den = x.denominator // p ** max(-v, 0)
        m = p**relprec
        return cls(p, num * pow(den, -1, m), v, relprec)

    @classmethod
    def from_parts(cls, p: int, unit: int, val: int, relprec: int) -> QpElt:
        return cls(p, unit, val, relprec)

    def is_zero(self) -> bool:
        return self.unit == 0

    def __mul__(self, other: QpElt | int) -> QpElt:
        if isinstance(other, int):
            other = QpElt.make(self.p, other, self.relprec)
        if self.is_zero() or other.is_zero():
            return QpElt(self.p, 0, self.val + other.val, 0)
        rp = min(self.relprec, other.relprec)
        return QpElt(self.p, self.unit * other.unit, self.val + other.val, rp)

    __rmul__ = __mul__

    def inverse(self) -> QpElt:
        if self.is_zero():
            raise DomainError("inverse of zero")
        m = self.p**self.relprec
        return QpElt(self.p, pow(self.unit, -1, m), -self.val, self.relprec)

    def __truediv__(self, other: QpElt) -> QpElt:
        return self * other.inverse()

    def absprec(self) -> int:
        return self.val + self.relprec

    def __add__(self, other: QpElt | int) -> QpElt:
        if isinstance(other, int):
            other = QpElt.make(self.p, other, self.absprec() + 1 if self.absprec() > 0 else 1)
        p = self.p
        absprec = min(self.absprec(), other.absprec())
        v = min(self.val, other.val)
        if absprec <= v:
            return QpElt(p, 0, absprec, 0)
        m = p ** (absprec - v)
        a = self.unit * p ** (self.val - v) if not self.is_zero() else 0
        b = other.unit * p ** (other.val - v) if not other.is_zero() else 0
        s = (a + b) % m
        if s == 0:
            return QpElt(p, 0, absprec, 0)
        w = vp(s, p)
        return QpElt(p, s // p**w, v + w, absprec - v - w)

    __radd__ = __add__

    def __neg__(self) -> QpElt:
        return QpElt(self.p, -self.unit, self.val, self.relprec)

    def __sub__(self, other: QpElt | int) -> QpElt:
        if isinstance(other, int):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other: int) -> QpElt:
        return (-self) + other

    def to_padic(self, N: int | None = None) -> PadicInt:
        """Convert an integral element to ``PadicInt`` at its absolute precision."""
        if self.is_zero():
            return PadicInt(self.p, max(self.val, 0) if N is None else N, 0)
        if self.val < 0:
            raise DomainError(f"element has negative valuation {self.val}")
        prec = self.absprec() if N is None else min(N, self.absprec())
        return PadicInt(self.p, prec, self.unit * self.p**self.val)

    def equals(self, other: QpElt) -> bool:
        return (self - other).is_zero()

    def __repr__(self) -> str:
        return f"QpElt({self.unit}*{self.p}^{self.val}, relprec={self.relprec})"
