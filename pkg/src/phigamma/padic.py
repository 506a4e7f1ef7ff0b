"""Truncated p-adic scalars and the characters omega, mu_lambda, chi.

A `PadicScalar` is p^val * unit with the unit known modulo p^prec. The
exact zero is a distinct value (``unit == 0`` and ``val is None``). A sum
that cancels to zero at its tracked precision also collapses to the exact
zero: the scalars handled here are group-matrix entries whose equality is
only decidable to working precision anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DenominatorDivisibleByP,
    InsufficientPadicPrecision,
    ParameterOutOfRange,
    ZeroArgument,
)
from .ffield import FqElem, GF

DEFAULT_PREC = 24


def valuation_int(n: int, p: int) -> int:
    if n == 0:
        raise ZeroArgument("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicScalar:
    p: int
    val: int | None
    unit: int
    prec: int

    # -- construction ---------------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> PadicScalar:
        return cls(p, None, 0, 0)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int = DEFAULT_PREC) -> PadicScalar:
        if n == 0:
            return cls.zero(p)
        v = valuation_int(n, p)
        return cls(p, v, (n // p**v) % p**prec, prec)

    @classmethod
    def from_rational(cls, x, p: int, prec: int = DEFAULT_PREC) -> PadicScalar:
        x = Fraction(x)
        if x == 0:
            return cls.zero(p)
        num, den = x.numerator, x.denominator
        vn = valuation_int(num, p)
        vd = valuation_int(den, p)
        num //= p**vn
        den //= p**vd
        mod = p**prec
        return cls(p, vn - vd, num * pow(den, -1, mod) % mod, prec)

    def __post_init__(self):
        if self.val is None:
            return
        if self.prec < 1:
            raise InsufficientPadicPrecision("a nonzero p-adic scalar needs at least one known digit")
        if self.unit % self.p == 0:
            raise ValueError("unit part must be prime to p")

    # -- inspection -------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.val is None

    def is_unit(self) -> bool:
        return self.val == 0

    def abs_prec(self) -> float:
        """Number of p-adic digits known, counted from p^0 (inf for exact zero)."""
        return float("inf") if self.val is None else self.val + self.prec

    def residue(self) -> int:
        """Reduction mod p of an integral scalar."""
        if self.val is None or self.val > 0:
            return 0
        if self.val < 0:
            raise ValueError("residue of a non-integral scalar")
        return self.unit % self.p

    def to_int_mod(self, digits: int) -> int:
        """Integral representative mod p^digits; requires that many known digits."""
        if self.val is None:
            return 0
        if self.val < 0:
            raise ValueError("scalar is not integral")
        if self.val >= digits:
            return 0
        if self.abs_prec() < digits:
            raise InsufficientPadicPrecision(f"need {digits} digits, have {self.abs_prec()}")
        return self.unit * self.p**self.val % self.p**digits

    def to_fraction(self) -> Fraction:
        """The stored representative p^val * unit (unit in [0, p^prec))."""
        if self.val is None:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def __repr__(self):
        if self.val is None:
            return "Padic(0)"
        return f"Padic({self.unit}*{self.p}^{self.val} + O({self.p}^{self.val + self.prec}))"

    # -- arithmetic -------------------------------------------------------------

    def _lift(self, other) -> PadicScalar:
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mixing primes")
            return other
        if isinstance(other, (int, Fraction)):
            prec = self.prec if self.val is not None else DEFAULT_PREC
            return PadicScalar.from_rational(other, self.p, prec)
        return NotImplemented

    def __neg__(self):
        if self.val is None:
            return self
        return PadicScalar(self.p, self.val, -self.unit % self.p**self.prec, self.prec)

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.val is None:
            return o
        if o.val is None:
            return self
        p = self.p
        v = min(self.val, o.val)
        top = int(min(self.abs_prec(), o.abs_prec()))
        mod = p ** (top - v)
        s = (self.unit * p ** (self.val - v) + o.unit * p ** (o.val - v)) % mod
        if s == 0:
            return PadicScalar.zero(p)
        w = valuation_int(s, p)
        return PadicScalar(p, v + w, (s // p**w) % p ** (top - v - w), top - v - w)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.val is None or o.val is None:
            return PadicScalar.zero(self.p)
        prec = min(self.prec, o.prec)
        return PadicScalar(self.p, self.val + o.val, self.unit * o.unit % self.p**prec, prec)

    __rmul__ = __mul__

    def inverse(self) -> PadicScalar:
        if self.val is None:
            raise ZeroArgument("inverse of the exact zero")
        mod = self.p**self.prec
        return PadicScalar(self.p, -self.val, pow(self.unit, -1, mod), self.prec)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicScalar.from_int(1, self.p, self.prec if self.val is not None else DEFAULT_PREC)
        for _ in range(e):
            result = result * self
        return result

    def shift(self, k: int) -> PadicScalar:
        """Multiply by p^k."""
        if self.val is None:
            return self
        return PadicScalar(self.p, self.val + k, self.unit, self.prec)

    def unit_part(self) -> PadicScalar:
        if self.val is None:
            raise ZeroArgument("unit part of zero")
        return PadicScalar(self.p, 0, self.unit, self.prec)

    def agrees(self, other, digits: int | None = None) -> bool:
        """Equality up to the common absolute precision (or `digits`)."""
        d = self - other
        if d.is_zero():
            return True
        bound = min(self.abs_prec(), other.abs_prec())
        if digits is not None:
            bound = min(bound, digits)
        return d.val >= bound


def ratio_to_padic(num: int, den: int, p: int, prec: int = DEFAULT_PREC) -> PadicScalar:
    """num/den as a p-adic scalar; den must be prime to p."""
    if den % p == 0:
        raise DenominatorDivisibleByP(f"{den} is divisible by {p}")
    return PadicScalar.from_rational(Fraction(num, den), p, prec)


def binom_padic(s: PadicScalar, k: int) -> int:
    """C(s, k) mod p for an integral p-adic s, via Lucas' theorem on the digits of s."""
    p = s.p
    if k < 0:
        return 0
    if k == 0:
        return 1
    digits = 1
    while p**digits <= k:
        digits += 1
    if s.val is not None and s.val < 0:
        raise ValueError("binomial of a non-integral scalar")
    if s.abs_prec() < digits:
        raise InsufficientPadicPrecision(f"C(s, {k}) needs s mod {p}^{digits}")
    n = s.to_int_mod(digits)
    out = 1
    while k:
        n, a = divmod(n, p)
        k, b = divmod(k, p)
        if b > a:
            return 0
        out = out * _small_binom(a, b) % p
    return out % p


def _small_binom(a: int, b: int) -> int:
    out = 1
    for i in range(b):
        out = out * (a - i) // (i + 1)
    return out


# -- characters of Q_p^x -----------------------------------------------------


def omega_char(a: PadicScalar, field=None) -> FqElem:
    """omega(a) = unit part of a, reduced mod p."""
    if a.is_zero():
        raise ZeroArgument("omega(0)")
    F = field or GF(a.p)
    return F(a.unit % a.p)


def mu_char(a: PadicScalar, lam: FqElem) -> FqElem:
    """mu_lambda(a) = lambda^val(a)."""
    if a.is_zero():
        raise ZeroArgument("mu_lambda(0)")
    return lam**a.val


@dataclass(frozen=True)
class CharacterData:
    """The pair (r, chi = omega^s mu_lambda) attached to rho(r, chi)."""

    p: int
    r: int
    s: int
    lam: FqElem

    def __post_init__(self):
        if not 0 <= self.r <= self.p - 1:
            raise ParameterOutOfRange(f"r must lie in [0, {self.p - 1}]")
        if self.lam.is_zero():
            raise ParameterOutOfRange("lambda must be nonzero")
        object.__setattr__(self, "s", self.s % (self.p - 1))

    @property
    def field(self):
        return self.lam.field

    def omega(self, a: PadicScalar) -> FqElem:
        return omega_char(a, self.field)

    def chi(self, a: PadicScalar) -> FqElem:
        return self.omega(a) ** self.s * mu_char(a, self.lam)

    def central(self, x: PadicScalar) -> FqElem:
        """(omega^r chi^2)(x), the central character of the dual."""
        return self.omega(x) ** self.r * self.chi(x) ** 2
