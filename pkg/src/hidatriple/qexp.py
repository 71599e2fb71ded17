"""Truncated q-expansions and the classical operators acting on them.

A ``QExp`` holds ``a_0, ..., a_B``.  Coefficients are integers (exact, or reduced
mod ``mod`` when a modulus is set), Fractions, or elements of a coefficient ring
such as ``IwasawaElt``/``REllt``.  Integer products use Kronecker substitution with
gmpy2 big-integer multiplication, which is what makes q-expansions with 10^5
coefficients practical.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import gmpy2

from .characters import DirichletChar
from .errors import DomainError


@dataclass(frozen=True)
class QExp:
    coeffs: tuple
    mod: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.coeffs, tuple):
            object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.mod is not None:
            m = self.mod
            object.__setattr__(self, "coeffs", tuple(int(a) % m for a in self.coeffs))

    # basic accessors ---------------------------------------------------------------
    @property
    def B(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    @classmethod
    def monomial(cls, n: int, B: int, c: Any = 1, mod: int | None = None) -> QExp:
        z = [0] * (B + 1)
        if n <= B:
            z[n] = c
        return cls(tuple(z), mod)

    def _is_int(self) -> bool:
        return all(isinstance(a, int) for a in self.coeffs)

    def truncate(self, B: int) -> QExp:
        if B > self.B:
            raise DomainError(f"cannot extend q-precision from {self.B} to {B}")
        return QExp(self.coeffs[: B + 1], self.mod)

    def reduce(self, mod: int) -> QExp:
        return QExp(self.coeffs, mod)

    def map(self, fn: Callable[[Any], Any], mod: int | None = None) -> QExp:
        return QExp(tuple(fn(a) for a in self.coeffs), mod)

    def valuation_q(self) -> int | None:
        for n, a in enumerate(self.coeffs):
            if a != 0:
                return n
        return None

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coeffs)

    # ring operations ----------------------------------------------------------------
    def _common(self, o: QExp) -> tuple[int, int | None]:
        B = min(self.B, o.B)
        if self.mod is None:
            mod = o.mod
        elif o.mod is None:
            mod = self.mod
        else:
            from math import gcd

            mod = gcd(self.mod, o.mod)
        return B, mod

    def __add__(self, o: QExp) -> QExp:
        B, mod = self._common(o)
        return QExp(tuple(self.coeffs[i] + o.coeffs[i] for i in range(B + 1)), mod)

    def __sub__(self, o: QExp) -> QExp:
        B, mod = self._common(o)
        return QExp(tuple(self.coeffs[i] - o.coeffs[i] for i in range(B + 1)), mod)

    def __neg__(self) -> QExp:
        return QExp(tuple(-a for a in self.coeffs), self.mod)

    def scale(self, c: Any) -> QExp:
        return QExp(tuple(c * a for a in self.coeffs), self.mod)

    def __mul__(self, o: QExp | int) -> QExp:
        if not isinstance(o, QExp):
            return self.scale(o)
        B, mod = self._common(o)
        a, b = self.coeffs[: B + 1], o.coeffs[: B + 1]
        if self._is_int() and o._is_int():
            return QExp(tuple(int_poly_mul(a, b, B + 1, mod)), mod)
        return QExp(tuple(naive_mul(a, b, B + 1)), mod)

    __rmul__ = scale

    def __pow__(self, e: int) -> QExp:
        if e < 0:
            return self.inverse() ** (-e)
        out = QExp.monomial(0, self.B, 1, self.mod)
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def inverse(self) -> QExp:
        """Inverse power series; the constant term must be invertible mod ``mod``."""
        if self.mod is None:
            a0 = self.coeffs[0]
            if a0 not in (1, -1):
                raise DomainError("exact inverse needs constant term +-1")
            m = None
            inv0 = a0
        else:
            m = self.mod
            inv0 = pow(int(self.coeffs[0]), -1, m)
        # Newton iteration y <- y (2 - f y), doubling precision
        y = QExp((inv0,), m)
        n = 1
        while n < self.B + 1:
            n = min(2 * n, self.B + 1)
            f = QExp(self.coeffs[:n], m)
            y = QExp(y.coeffs + (0,) * (n - len(y.coeffs)), m)
            fy = f * y
            two_minus = QExp(tuple(((2 if i == 0 else 0) - c) for i, c in enumerate(fy.coeffs)), m)
            y = y * two_minus
        return y

    def __eq__(self, o: object) -> bool:
        if not isinstance(o, QExp):
            return NotImplemented
        B, mod = self._common(o)
        for i in range(B + 1):
            d = self.coeffs[i] - o.coeffs[i]
            if mod is None:
                if d != 0:
                    return False
            elif int(d) % mod:
                return False
        return True

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def to_json(self, ring: str = "Z") -> dict:
        return {"ring": ring if self.mod is None else f"Z/{self.mod}", "B": self.B, "coeffs": [int(a) for a in self.coeffs]}


# ---------------------------------------------------------------------------
# polynomial multiplication


def naive_mul(a: Sequence, b: Sequence, n: int) -> list:
    out: list = [0] * n
    for i, x in enumerate(a[:n]):
        if isinstance(x, int) and x == 0:
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] = out[i + j] + x * b[j]
    return out


def _pack(c: Sequence[int], bits: int) -> gmpy2.mpz:
    nbytes = bits // 8
    data = b"".join(int(x).to_bytes(nbytes, "little") for x in c)
    return gmpy2.mpz(int.from_bytes(data, "little"))


def _unpack(z: gmpy2.mpz, bits: int, n: int) -> list[int]:
    nbytes = bits // 8
    raw = int(z).to_bytes(max(n * nbytes, (int(z).bit_length() + 7) // 8), "little")
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") for i in range(n)]


def _kron_nonneg(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    if not a or not b:
        return [0] * n
    ma, mb = max(a), max(b)
    if ma == 0 or mb == 0:
        return [0] * n
    bound = ma * mb * min(len(a), len(b))
    bits = bound.bit_length() + 1
    bits = (bits + 7) // 8 * 8
    za, zb = _pack(a, bits), _pack(b, bits)
    return _unpack(za * zb, bits, n)


def int_poly_mul(a: Sequence[int], b: Sequence[int], n: int, mod: int | None) -> list[int]:
    """First ``n`` coefficients of a*b, reduced mod ``mod`` if given."""
    a, b = list(a[:n]), list(b[:n])
    if mod is not None:
        a = [x % mod for x in a]
        b = [x % mod for x in b]
        if len(a) * len(b) < 4096:
            return [x % mod for x in naive_mul(a, b, n)]
        return [x % mod for x in _kron_nonneg(a, b, n)]
    if len(a) * len(b) < 4096:
        return naive_mul(a, b, n)
    ap = [max(x, 0) for x in a]
    an = [max(-x, 0) for x in a]
    bp = [max(x, 0) for x in b]
    bn = [max(-x, 0) for x in b]
    pp, nn = _kron_nonneg(ap, bp, n), _kron_nonneg(an, bn, n)
    pn, np_ = _kron_nonneg(ap, bn, n), _kron_nonneg(an, bp, n)
    return [w + x - y - z for w, x, y, z in zip(pp, nn, pn, np_)]


# ---------------------------------------------------------------------------
# operators


def _char_value(chi: DirichletChar | None, n: int, mod: int | None, p: int | None):
    if chi is None:
        return 1
    if chi.order <= 2:
        return chi.value_int(n)
    if mod is None or p is None:
        raise DomainError("character of order > 2 needs a p-adic modulus")
    N = 0
    m = mod
    while m % p == 0:
        m //= p
        N += 1
    return chi.value(n, p, N).residue


def op_V(d: int, f: QExp, cap: int | None = None) -> QExp:
    """V_d f(z) = d f(dz): b_{dn} = d a_n."""
    B = d * f.B if cap is None else min(cap, d * f.B)
    out: list = [0] * (B + 1)
    for n in range(B // d + 1):
        out[d * n] = d * f.coeffs[n]
    return QExp(tuple(out), f.mod)


def formal_V(d: int, f: QExp, cap: int | None = None) -> QExp:
    """sum a_n q^{dn}, without the factor d."""
    B = d * f.B if cap is None else min(cap, d * f.B)
    out: list = [0] * (B + 1)
    for n in range(B // d + 1):
        out[d * n] = f.coeffs[n]
    return QExp(tuple(out), f.mod)


def op_U(d: int, f: QExp) -> QExp:
    """b_n = a_{dn}."""
    return QExp(f.coeffs[:: d], f.mod)


def op_T(l: int, k: int, chi: DirichletChar | None, f: QExp, level: int = 1, p: int | None = None) -> QExp:
    """Hecke operator T_l on weight k, level ``level``, nebentypus ``chi``.

    l | level: U_l.  Otherwise b_n = a_{ln} + chi(l) l^{k-1} a_{n/l}.
    """
    if level % l == 0:
        return op_U(l, f)
    c = _char_value(chi, l, f.mod, p) * l ** (k - 1)
    if f.mod is not None:
        c %= f.mod
    B = f.B // l
    out = []
    for n in range(B + 1):
        b = f.coeffs[l * n]
        if n % l == 0:
            b = b + c * f.coeffs[n // l]
        out.append(b)
    return QExp(tuple(out), f.mod)


def twist(kappa: DirichletChar, f: QExp, p: int | None = None) -> QExp:
    """b_n = kappa(n) a_n (zero when gcd(n, modulus) > 1)."""
    out = []
    for n, a in enumerate(f.coeffs):
        e = kappa.exponent(n)
        if e is None:
            out.append(0)
        elif e == 0:
            out.append(a)
        else:
            out.append(_char_value(kappa, n, f.mod, p) * a)
    return QExp(tuple(out), f.mod)


def deplete(f: QExp, p: int) -> QExp:
    """f^[p] = sum_{p not dividing n} a_n q^n."""
    return QExp(tuple(0 if n % p == 0 else a for n, a in enumerate(f.coeffs)), f.mod)


def d_power(r: int, f: QExp) -> QExp:
    """d^r with d = q d/dq: b_n = n^r a_n."""
    if r == 0:
        return f
    m = f.mod
    if m is not None:
        return QExp(tuple(pow(n, r, m) * a for n, a in enumerate(f.coeffs)), m)
    return QExp(tuple(n**r * a for n, a in enumerate(f.coeffs)), m)


def theta_twist(theta: Callable[[int], Any], f: QExp, p: int) -> QExp:
    """Coefficient n multiplied by theta(n) for p not dividing n, zero otherwise."""
    out = []
    for n, a in enumerate(f.coeffs):
        out.append(0 if n % p == 0 else theta(n) * a)
    return QExp(tuple(out), f.mod)


def family_T(l: int, chi: DirichletChar, f: QExp, N1: int, p: int, diamond_l=None) -> QExp:
    """Hecke operator on a q-expansion with Lambda coefficients.

    l | N1 p: b_n = a_{ln}.  Otherwise b_n = a_{ln} + <l> chi(l) l^{-1} a_{n/l},
    where ``diamond_l`` is the Iwasawa element <l>.
    """
    B = f.B // l
    if (N1 * p) % l == 0:
        return op_U(l, f)
    if diamond_l is None:
        raise DomainError("family_T needs <l> for l prime to N1 p")
    Np = diamond_l.Np
    m = p**Np
    cl = (_char_value(chi, l, m, p) * pow(l, -1, m)) % m
    twist_l = diamond_l * cl
    out = []
    for n in range(B + 1):
        b = f.coeffs[l * n]
        if n % l == 0:
            b = b + twist_l * f.coeffs[n // l]
        out.append(b)
    return QExp(tuple(out), f.mod)


def rankin_cohen(g: QExp, h: QExp, kg: int, kh: int, n: int) -> QExp:
    """Rankin-Cohen bracket [g, h]_n = sum_{i+j=n} (-1)^i C(n+kg-1, j) C(n+kh-1, i) d^i g d^j h.

    A modular form of weight kg + kh + 2n.  Modulo the image of d it equals
    C(kg + kh + 2n - 2, n) g d^n h.
    """
    from math import comb

    out = None
    for i in range(n + 1):
        j = n - i
        c = (-1) ** i * comb(n + kg - 1, j) * comb(n + kh - 1, i)
        term = (d_power(i, g) * d_power(j, h)).scale(c)
        out = term if out is None else out + term
    return out


def coeff_fraction_to_mod(f: Sequence[Fraction], mod: int) -> QExp:
    out = []
    for a in f:
        a = Fraction(a)
        out.append(a.numerator * pow(a.denominator, -1, mod) % mod)
    return QExp(tuple(out), mod)
