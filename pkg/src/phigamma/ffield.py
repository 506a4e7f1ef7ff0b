"""Arithmetic in small finite fields F_{p^m}.

Elements are stored as coordinate vectors over F_p in the power basis
1, t, ..., t^{m-1}, where t is a root of the Conway polynomial of degree m.
Conway polynomials are computed on first use (brute force in Conway's
ordering), which keeps subfield embeddings canonical and every run
reproducible without shipping a table.

Vectorised helpers (`Field.mul_coords`, `Field.frob_coords`) act on numpy
arrays whose last axis has length m; the series engine is built on them.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import FieldError

MIN_PRIME = 3
MAX_PRIME = 13
LOG_TABLE_LIMIT = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def prime_factors(n: int) -> list[int]:
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


# -- dense polynomial helpers over F_p (lists, low degree first) -------------


def _poly_mulmod(a, b, mod, p):
    m = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, m - 1, -1):
        c = prod[k]
        if c:
            for i in range(m + 1):
                prod[k - m + i] = (prod[k - m + i] - c * mod[i]) % p
    out = prod[:m] + [0] * max(0, m - len(prod))
    return out


def _poly_powmod(a, e, mod, p):
    m = len(mod) - 1
    result = [1] + [0] * (m - 1)
    base = list(a) + [0] * (m - len(a))
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_eval_at(coeffs, x, mod, p):
    """Evaluate the polynomial `coeffs` (over F_p) at `x` in F_p[t]/mod."""
    m = len(mod) - 1
    acc = [0] * m
    for c in reversed(coeffs):
        acc = _poly_mulmod(acc, x, mod, p)
        acc[0] = (acc[0] + c) % p
    return acc


def _is_primitive(mod, p):
    m = len(mod) - 1
    q1 = p**m - 1
    t = [0, 1] + [0] * (m - 2) if m > 1 else [(-mod[0]) % p]
    one = [1] + [0] * (m - 1)
    if _poly_powmod(t, q1, mod, p) != one:
        return False
    return all(_poly_powmod(t, q1 // ell, mod, p) != one for ell in prime_factors(q1))


@functools.cache
def conway_polynomial(p: int, m: int) -> tuple[int, ...]:
    """Coefficients (low degree first, monic) of the Conway polynomial C_{p,m}."""
    if m == 1:
        # least primitive root g, polynomial x - g
        for g in range(1, p):
            if _is_primitive([(-g) % p, 1], p):
                return ((-g) % p, 1)
    sub = [d for d in range(1, m) if m % d == 0]
    q1 = p**m - 1
    for word in itertools.product(range(p), repeat=m):
        # x^m - w1 x^{m-1} + w2 x^{m-2} - ...
        mod = [0] * (m + 1)
        mod[m] = 1
        for i, w in enumerate(word, start=1):
            mod[m - i] = ((-1) ** i * w) % p
        if mod[0] == 0 or not _is_primitive(mod, p):
            continue
        t = [0, 1] + [0] * (m - 2)
        ok = True
        for d in sub:
            x = _poly_powmod(t, q1 // (p**d - 1), mod, p)
            if any(_poly_eval_at(list(conway_polynomial(p, d)), x, mod, p)):
                ok = False
                break
        if ok:
            return tuple(mod)
    raise FieldError(f"no Conway polynomial found for p={p}, m={m}")  # unreachable


class Field:
    """The field F_{p^m} presented as F_p[t]/(C_{p,m}(t))."""

    def __init__(self, p: int, m: int):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if not MIN_PRIME <= p <= MAX_PRIME:
            raise FieldError(f"characteristic must lie in [{MIN_PRIME}, {MAX_PRIME}], got {p}")
        if not 1 <= m <= 8:
            raise FieldError(f"extension degree must lie in [1, 8], got {m}")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = conway_polynomial(p, m)
        # row k: coordinates of t^k, k < 2m - 1
        red = np.zeros((2 * m - 1, m), dtype=np.int64)
        for k in range(2 * m - 1):
            mono = [0] * k + [1]
            red[k] = _reduce_list(mono, self.modulus, p)
        self._red = red
        # row u: coordinates of t^{pu}
        frob = np.zeros((m, m), dtype=np.int64)
        for u in range(m):
            frob[u] = _poly_powmod([0, 1] + [0] * (m - 2), p * u, list(self.modulus), p) if m > 1 else [1]
        self._frob = [np.eye(m, dtype=np.int64)]
        for _ in range(m - 1):
            self._frob.append(self._frob[-1] @ frob % p)

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    def __reduce__(self):
        return (GF, (self.p, self.m))

    def describe(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    # -- construction ---------------------------------------------------------

    def __call__(self, x) -> FqElem:
        if isinstance(x, FqElem):
            if x.field is self:
                return x
            if x.field.p == self.p and x.field.m == 1:
                return self.from_coords((x.coords[0],))
            raise FieldError(f"cannot coerce {x!r} into {self!r}")
        if isinstance(x, (int, np.integer)):
            return self.from_coords((int(x) % self.p,))
        return self.from_coords(tuple(x))

    def from_coords(self, coords) -> FqElem:
        c = tuple(int(v) % self.p for v in coords)
        if len(c) > self.m:
            raise FieldError("too many coordinates")
        return FqElem(self, c + (0,) * (self.m - len(c)))

    def from_index(self, idx: int) -> FqElem:
        """Inverse of `int(x)`: base-p digits are the coordinates."""
        coords = []
        for _ in range(self.m):
            idx, d = divmod(idx, self.p)
            coords.append(d)
        return FqElem(self, tuple(coords))

    @property
    def zero(self) -> FqElem:
        return FqElem(self, (0,) * self.m)

    @property
    def one(self) -> FqElem:
        return FqElem(self, (1,) + (0,) * (self.m - 1))

    @property
    def generator(self) -> FqElem:
        """A generator of the multiplicative group (the root of the Conway polynomial)."""
        if self.m == 1:
            return self((-self.modulus[0]) % self.p)
        return self.from_coords((0, 1))

    def elements(self):
        for i in range(self.q):
            yield self.from_index(i)

    def random(self, rng: np.random.Generator, nonzero: bool = False) -> FqElem:
        while True:
            x = self.from_coords(rng.integers(0, self.p, size=self.m))
            if not (nonzero and x.is_zero()):
                return x

    def subfield_elements(self, d: int):
        """Elements of the unique subfield F_{p^d}."""
        if self.m % d:
            raise FieldError(f"F_{self.p}^{d} is not a subfield of {self!r}")
        for x in self.elements():
            if x ** (self.p**d) == x:
                yield x

    @functools.cached_property
    def _log_tables(self):
        """(exp, log, elems) over element indices, or None when q is too large."""
        if self.q > LOG_TABLE_LIMIT:
            return None
        p, m, q = self.p, self.m, self.q
        g = int(self.generator)
        exp = [0] * (q - 1)
        log = [-1] * q
        x = [1] + [0] * (m - 1)
        for i in range(q - 1):
            idx = sum(c * p**j for j, c in enumerate(x))
            exp[i], log[idx] = idx, i
            if m == 1:
                x = [x[0] * g % p]
            else:
                # multiply by t
                top = x[-1]
                x = [0] + x[:-1]
                x = [(c - top * self.modulus[j]) % p for j, c in enumerate(x)]
        elems = [self.from_index(i) for i in range(q)]
        return exp, log, elems

    # -- vectorised coordinate arithmetic ----------------------------------------

    def mul_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return a * b % self.p
        if b.size == self.m and a.size > b.size:
            shape = np.broadcast_shapes(a.shape, b.shape)
            return (a @ self.mult_matrix(b.reshape(-1)) % self.p).reshape(shape)
        if a.size == self.m and b.size > a.size:
            shape = np.broadcast_shapes(a.shape, b.shape)
            return (b @ self.mult_matrix(a.reshape(-1)) % self.p).reshape(shape)
        prod = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (2 * self.m - 1,), dtype=np.int64)
        for u in range(self.m):
            for v in range(self.m):
                prod[..., u + v] += a[..., u] * b[..., v]
        return prod % self.p @ self._red % self.p

    def mult_matrix(self, c: np.ndarray) -> np.ndarray:
        """M with x @ M = coordinates of x * c (row vectors)."""
        prod = np.zeros((self.m, 2 * self.m - 1), dtype=np.int64)
        for u in range(self.m):
            prod[u, u : u + self.m] = c
        return prod % self.p @ self._red % self.p

    def frob_coords(self, a: np.ndarray, power: int = 1) -> np.ndarray:
        """Apply x -> x^{p^power} along the last axis."""
        k = power % self.m
        if k == 0:
            return a
        return a @ self._frob[k] % self.p

    def reduce_wide(self, wide: np.ndarray) -> np.ndarray:
        """Fold an array of t-degree 2m-2 coefficients down to m coordinates."""
        return wide % self.p @ self._red % self.p


def _reduce_list(poly, mod, p):
    m = len(mod) - 1
    poly = list(poly)
    for k in range(len(poly) - 1, m - 1, -1):
        c = poly[k] % p
        if c:
            for i in range(m + 1):
                poly[k - m + i] = (poly[k - m + i] - c * mod[i]) % p
    poly = [c % p for c in poly[:m]]
    return poly + [0] * (m - len(poly))


@functools.cache
def GF(p: int, m: int = 1) -> Field:
    """Return the (cached, hence unique) field F_{p^m}."""
    return Field(p, m)


@dataclass(frozen=True, eq=False)
class FqElem:
    field: Field
    coords: tuple[int, ...]

    # -- helpers --------------------------------------------------------------

    def _coerce(self, other) -> FqElem | None:
        if isinstance(other, FqElem):
            if other.field is self.field:
                return other
            if other.field.p == self.field.p and other.field.m == 1:
                return self.field(other)
            if self.field.m == 1 and other.field.p == self.field.p:
                return None
            raise FieldError(f"mixing {self.field!r} and {other.field!r}")
        if isinstance(other, (int, np.integer)):
            return self.field(int(other))
        return None

    def is_zero(self) -> bool:
        return not any(self.coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def __int__(self):
        return sum(c * self.field.p**i for i, c in enumerate(self.coords))

    __index__ = __int__

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.coords))

    def __eq__(self, other):
        if isinstance(other, FqElem) and other.field is not self.field:
            if other.field.p != self.field.p:
                return False
            if other.field.m == 1:
                return self == self.field(other)
            if self.field.m == 1:
                return other == other.field(self)
            return False
        o = self._coerce(other)
        return o is not None and o.coords == self.coords

    def __lt__(self, other):
        return int(self) < int(other)

    def __repr__(self):
        if self.field.m == 1:
            return f"{self.coords[0]}"
        terms = [f"{c}" if i == 0 else f"{c}*t^{i}" for i, c in enumerate(self.coords) if c]
        return " + ".join(terms) or "0"

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented if not isinstance(other, FqElem) else other + self
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple(-a % p for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented if not isinstance(other, FqElem) else -(other - self)
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented if not isinstance(other, FqElem) else other * self
        F = self.field
        if F.m == 1:
            return FqElem(F, ((self.coords[0] * o.coords[0]) % F.p,))
        tables = F._log_tables
        if tables is not None:
            exp, log, elems = tables
            a, b = log[int(self)], log[int(o)]
            if a < 0 or b < 0:
                return elems[0]
            return elems[exp[(a + b) % (F.q - 1)]]
        r = F.mul_coords(self.array(), o.array())
        return FqElem(F, tuple(int(v) for v in r))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        e = int(e)
        tables = self.field._log_tables
        if tables is not None and not self.is_zero():
            exp, log, elems = tables
            return elems[exp[log[int(self)] * e % (self.field.q - 1)]]
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> FqElem:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def multiplicative_order(self) -> int:
        if self.is_zero():
            raise ZeroDivisionError("zero has no multiplicative order")
        n = self.field.q - 1
        order = n
        for ell in prime_factors(n):
            while order % ell == 0 and self ** (order // ell) == self.field.one:
                order //= ell
        return order

    def frobenius(self, power: int = 1) -> FqElem:
        r = self.field.frob_coords(self.array(), power)
        return FqElem(self.field, tuple(int(v) for v in r))


def frobenius(x: FqElem) -> FqElem:
    """x -> x^p."""
    return x.frobenius(1)


def solve_alpha(p: int, n: int, field: Field | None = None) -> FqElem:
    """Smallest alpha (in index order) with alpha^(p^n - 1) = (-1)^(n-1).

    The default ambient field is F_{p^{2n}}, where the equation has p^n - 1
    roots for either sign.
    """
    if n < 1:
        raise ValueError("level n must be >= 1")
    F = field or GF(p, 2 * n)
    target = F.one if n % 2 == 1 else -F.one
    e = p**n - 1
    for i in range(1, F.q):
        x = F.from_index(i)
        if x**e == target:
            return x
    raise FieldError(f"no root of alpha^{e} = {target} in {F!r}")
