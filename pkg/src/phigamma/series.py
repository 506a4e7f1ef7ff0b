"""Truncated Laurent series over F_{p^m} and the operators phi, psi, gamma_a.

A `CharSeries` stores coefficients for degrees v, v+1, ..., v+L-1 in an
integer array of shape ``batch + (L, m)`` (the last axis holds F_p
coordinates of each coefficient) and a precision ``prec``: the series is
known modulo X^prec. Coefficients between v+L and prec are known to be zero.
``prec`` may be ``math.inf`` for exact (polynomial) series. The optional
leading batch axes let one series object carry many independent samples,
which is how the verification suites evaluate functionals on hundreds of
random windows at once.

Precision rules:

* sum: min of the operand precisions
* product: min(N1 + v2, N2 + v1) where v is the lowest stored exponent
* phi: p * N
* psi: floor(N / p)
* substitution X -> (1+X)^a - 1 and p-adic powers: N
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .errors import (
    InsufficientPadicPrecision,
    InsufficientPrecision,
    NoSolutionAtPrecision,
    NotOneUnit,
    PoleTooDeep,
)
from .ffield import Field, FqElem, GF
from .padic import PadicScalar, binom_padic

INF = math.inf
POLE_LIMIT = 1 << 14
_FFT_THRESHOLD = 24
_TOEPLITZ_LIMIT = 1 << 20


def _fp_matmul(A: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """A @ y mod p for A of shape (n, k) and y of shape (..., k, m), through one float64 GEMM.

    Exact while the inner sums stay below 2^53.
    """
    if A.shape[-1] * (p - 1) ** 2 >= (1 << 52):
        return np.matmul(A, y) % p
    k = y.shape[-2]
    cols = np.moveaxis(y, -2, 0).reshape(k, -1)
    out = np.rint(A.astype(np.float64) @ cols.astype(np.float64)).astype(np.int64) % p
    out = out.reshape((A.shape[0],) + y.shape[:-2] + y.shape[-1:])
    return np.moveaxis(out, 0, -2)


def _toeplitz(a: np.ndarray, b: np.ndarray, n: int, p: int):
    """a*b when one factor is unbatched with prime-field coefficients, else None."""
    for x, y in ((a, b), (b, a)):
        if x.ndim == 2 and y.ndim > 2 and not np.any(x[:, 1:]) and n * y.shape[-2] <= _TOEPLITZ_LIMIT:
            col = np.zeros(n, dtype=np.int64)
            col[: min(n, x.shape[0])] = x[:n, 0]
            idx = np.arange(n)[:, None] - np.arange(y.shape[-2])[None, :]
            T = np.where(idx >= 0, col[np.clip(idx, 0, n - 1)], 0)
            return _fp_matmul(T, y, p)
    return None


def _conv_wide(field: Field, a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    """First `length` coefficients of a*b, reduced to field coordinates."""
    m, p = field.m, field.p
    la, lb = a.shape[-2], b.shape[-2]
    batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    if la == 0 or lb == 0 or length <= 0:
        return np.zeros(batch + (max(length, 0), m), dtype=np.int64)
    full = la + lb - 1
    out = _toeplitz(a, b, min(full, length), p)
    if out is not None:
        return _pad_rows(out, length)
    if m == 1 and not batch:
        out = np.convolve(a[:, 0], b[:, 0])[:length] % p
        out = out[:, None]
    elif min(la, lb) <= _FFT_THRESHOLD:
        if la > lb:
            a, b, la, lb = b, a, lb, la
        n = min(full, length)
        wide = np.zeros(batch + (n, 2 * m - 1), dtype=np.int64)
        for i in range(min(la, n)):
            seg = min(lb, n - i)
            ai = a[..., i, :]
            bs = b[..., :seg, :]
            for u in range(m):
                wide[..., i : i + seg, u : u + m] += ai[..., None, u : u + 1] * bs
            if i % 64 == 63:
                wide %= p
        out = field.reduce_wide(wide)
    else:
        n_fft = full
        shape = (n_fft, 2 * m - 1)
        fa = np.fft.rfftn(a.astype(np.float64), s=shape, axes=(-2, -1))
        fb = np.fft.rfftn(b.astype(np.float64), s=shape, axes=(-2, -1))
        wide = np.fft.irfftn(fa * fb, s=shape, axes=(-2, -1))[..., :length, :]
        wide = np.rint(wide).astype(np.int64)
        out = field.reduce_wide(wide)
    return _pad_rows(out, length)


def _pad_rows(out: np.ndarray, length: int) -> np.ndarray:
    if out.shape[-2] < length:
        pad = [(0, 0)] * out.ndim
        pad[-2] = (0, length - out.shape[-2])
        out = np.pad(out, pad)
    return out


class CharSeries:
    """Truncated Laurent series sum_{d >= v} c_d X^d + O(X^prec) over F_{p^m}."""

    __slots__ = ("field", "v", "coeffs", "prec")

    def __init__(self, field: Field, coeffs, v: int = 0, prec=INF, *, normalize: bool = True):
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr[:, None] if field.m == 1 else arr.reshape(-1, field.m)
        if arr.shape[-1] != field.m:
            raise ValueError(f"last axis must have length {field.m}")
        arr = arr % field.p
        if prec != INF:
            prec = int(prec)
            keep = max(0, prec - v)
            if arr.shape[-2] > keep:
                arr = arr[..., :keep, :]
        self.field = field
        self.v = int(v)
        self.coeffs = arr
        self.prec = prec
        if normalize:
            self._normalize()
        if self.coeffs.shape[-2] and self.v < -POLE_LIMIT:
            raise PoleTooDeep(f"pole of order {-self.v} exceeds the configured bound {POLE_LIMIT}")

    def _normalize(self):
        arr = self.coeffs
        nz = np.any(arr != 0, axis=tuple(i for i in range(arr.ndim) if i != arr.ndim - 2))
        idx = np.flatnonzero(nz)
        if idx.size == 0:
            self.coeffs = arr[..., :0, :]
            self.v = self.prec if self.prec != INF else 0
            return
        lo, hi = idx[0], idx[-1] + 1
        if lo or hi < arr.shape[-2]:
            self.coeffs = arr[..., lo:hi, :]
        self.v += int(lo)

    # -- constructors -------------------------------------------------------------

    @classmethod
    def from_list(cls, field: Field, values, v: int = 0, prec=INF) -> CharSeries:
        rows = []
        for x in values:
            if isinstance(x, FqElem):
                rows.append(field(x).coords)
            else:
                rows.append(field(int(x)).coords)
        arr = np.array(rows, dtype=np.int64).reshape(-1, field.m)
        return cls(field, arr, v, prec)

    @classmethod
    def zero(cls, field: Field, prec=INF, batch=()) -> CharSeries:
        return cls(field, np.zeros(tuple(batch) + (0, field.m), dtype=np.int64), 0, prec)

    @classmethod
    def constant(cls, field: Field, c, prec=INF) -> CharSeries:
        return cls.from_list(field, [c], 0, prec)

    @classmethod
    def one(cls, field: Field, prec=INF) -> CharSeries:
        return cls.constant(field, 1, prec)

    @classmethod
    def monomial(cls, field: Field, d: int, c=1, prec=INF) -> CharSeries:
        return cls.from_list(field, [c], d, prec)

    @classmethod
    def gen(cls, field: Field, prec=INF) -> CharSeries:
        """The series X."""
        return cls.monomial(field, 1, 1, prec)

    @classmethod
    def random(cls, field: Field, rng: np.random.Generator, prec: int, v: int = 0, batch=()) -> CharSeries:
        """Uniform coefficients in degrees [v, prec)."""
        arr = rng.integers(0, field.p, size=tuple(batch) + (max(0, prec - v), field.m))
        return cls(field, arr, v, prec)

    # -- inspection ---------------------------------------------------------------

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def batch(self) -> tuple:
        return self.coeffs.shape[:-2]

    @property
    def length(self) -> int:
        return self.coeffs.shape[-2]

    @property
    def val_bound(self):
        """A lower bound for the valuation (exact when the series is not batched)."""
        return self.v if self.length else self.prec

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return self.length == 0

    def coefficient(self, d: int):
        """Coefficient of X^d: an FqElem, or an array of coordinates for batched series."""
        if d >= self.prec:
            raise InsufficientPrecision(f"coefficient of X^{d} is not known (precision {self.prec})")
        i = d - self.v
        if 0 <= i < self.length:
            c = self.coeffs[..., i, :]
        else:
            c = np.zeros(self.batch + (self.field.m,), dtype=np.int64)
        if self.batch:
            return c
        return self.field.from_coords(c)

    def coeff_array(self, lo: int, hi: int) -> np.ndarray:
        """Coordinates of the coefficients of degrees lo..hi-1 (hi <= prec)."""
        if hi > self.prec:
            raise InsufficientPrecision(f"degrees up to {hi - 1} requested at precision {self.prec}")
        out = np.zeros(self.batch + (max(0, hi - lo), self.field.m), dtype=np.int64)
        a, b = max(lo, self.v), min(hi, self.v + self.length)
        if a < b:
            out[..., a - lo : b - lo, :] = self.coeffs[..., a - self.v : b - self.v, :]
        return out

    def __getitem__(self, idx) -> CharSeries:
        """Select batch entries."""
        if not self.batch:
            raise TypeError("series is not batched")
        return CharSeries(self.field, self.coeffs[idx], self.v, self.prec)

    def __repr__(self):
        if self.batch:
            return f"CharSeries(batch={self.batch}, v={self.v}, len={self.length}, prec={self.prec})"
        terms = []
        for i in range(self.length):
            c = self.field.from_coords(self.coeffs[i])
            if not c.is_zero():
                terms.append(f"({c})*X^{self.v + i}")
        body = " + ".join(terms) or "0"
        return body if self.prec == INF else f"{body} + O(X^{self.prec})"

    # -- comparison ---------------------------------------------------------------

    def agrees(self, other: CharSeries, upto=None) -> bool | np.ndarray:
        """Coefficientwise equality below the common precision (and below `upto`)."""
        bound = min(self.prec, other.prec)
        if upto is not None:
            bound = min(bound, upto)
        lo = min(self.v, other.v)
        if bound == INF:
            bound = max(self.v + self.length, other.v + other.length)
        bound = int(bound)
        if bound <= lo:
            return True if not (self.batch or other.batch) else np.ones(np.broadcast_shapes(self.batch, other.batch), bool)
        a = self.coeff_array(lo, bound)
        b = other.coeff_array(lo, bound)
        eq = np.all(a == b, axis=(-2, -1))
        return bool(eq) if eq.ndim == 0 else eq

    def __eq__(self, other):
        if not isinstance(other, CharSeries):
            return NotImplemented
        return self.prec == other.prec and bool(np.all(self.agrees(other)))

    __hash__ = None

    # -- ring operations ------------------------------------------------------------

    def _scalar_coords(self, c) -> np.ndarray:
        if isinstance(c, FqElem):
            return self.field(c).array()
        return self.field(int(c)).array()

    def __neg__(self):
        return CharSeries(self.field, -self.coeffs, self.v, self.prec, normalize=False)

    def __add__(self, other):
        if isinstance(other, (int, FqElem)):
            other = CharSeries.constant(self.field, other)
        if not isinstance(other, CharSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        lo = min(self.v, other.v)
        hi = max(self.v + self.length, other.v + other.length)
        if prec != INF:
            hi = min(hi, prec)
        if hi <= lo:
            return CharSeries.zero(self.field, prec, np.broadcast_shapes(self.batch, other.batch))
        a = self.coeff_array(lo, hi) if hi <= self.prec else self._pad(lo, hi)
        b = other.coeff_array(lo, hi) if hi <= other.prec else other._pad(lo, hi)
        return CharSeries(self.field, a + b, lo, prec)

    __radd__ = __add__

    def _pad(self, lo, hi):
        out = np.zeros(self.batch + (hi - lo, self.field.m), dtype=np.int64)
        a, b = max(lo, self.v), min(hi, self.v + self.length)
        if a < b:
            out[..., a - lo : b - lo, :] = self.coeffs[..., a - self.v : b - self.v, :]
        return out

    def __sub__(self, other):
        if isinstance(other, (int, FqElem)):
            other = CharSeries.constant(self.field, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> CharSeries:
        """Multiply by a constant (FqElem, int, or a batch of coordinates)."""
        if isinstance(c, np.ndarray):
            cc = c[..., None, :]
        else:
            cc = self._scalar_coords(c)
        return CharSeries(self.field, self.field.mul_coords(self.coeffs, cc), self.v, self.prec)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer, FqElem)):
            return self.scale(other)
        if not isinstance(other, CharSeries):
            return NotImplemented
        prec = min(self.prec + other.val_bound, other.prec + self.val_bound)
        v = self.v + other.v
        if self.length == 0 or other.length == 0:
            return CharSeries.zero(self.field, prec, np.broadcast_shapes(self.batch, other.batch))
        full = self.length + other.length - 1
        length = full if prec == INF else min(full, int(prec) - v)
        if length <= 0:
            return CharSeries.zero(self.field, prec, np.broadcast_shapes(self.batch, other.batch))
        a = self.coeffs[..., :length, :]
        b = other.coeffs[..., :length, :]
        out = _conv_wide(self.field, a, b, length)
        return CharSeries(self.field, out, v, prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> CharSeries:
        """Multiply by X^k."""
        return CharSeries(self.field, self.coeffs, self.v + k, self.prec + k, normalize=False)

    def truncate(self, n) -> CharSeries:
        """Forget everything from X^n on."""
        if n >= self.prec:
            return self
        return CharSeries(self.field, self.coeffs, self.v, n)

    def with_prec(self, n) -> CharSeries:
        """Declare the stored coefficients exact up to X^n (n may exceed prec only for exact series)."""
        if self.prec != INF and n > self.prec:
            raise InsufficientPrecision("cannot raise the precision of a truncated series")
        return CharSeries(self.field, self.coeffs, self.v, n)

    def __pow__(self, e: int) -> CharSeries:
        if e < 0:
            return self.inverse() ** (-e)
        result = CharSeries.one(self.field)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self, prec=None) -> CharSeries:
        """Multiplicative inverse of a series whose lowest stored coefficient is a unit.

        An exact input needs `prec`, the absolute precision wanted for the result.
        """
        if self.batch:
            raise TypeError("inverse of a batched series is not supported")
        if self.length == 0:
            raise ZeroDivisionError("inverse of a series with no known nonzero coefficient")
        v = self.v
        rel = (self.prec - v) if self.prec != INF else None
        if prec is not None:
            want = prec + v
            rel = want if rel is None else min(rel, want)
        if rel is None:
            raise InsufficientPrecision("inverse of an exact series needs an explicit precision")
        lead = self.field.from_coords(self.coeffs[0]).inverse()
        unit = self.coeffs[:rel]
        # Newton iteration g <- g (2 - u g) on exact polynomials, truncated by hand
        g = CharSeries.constant(self.field, lead)
        n = 1
        while n < rel:
            n = min(2 * n, rel)
            ut = CharSeries(self.field, unit[:n], 0)
            g = g * (2 - ut * g)
            g = CharSeries(self.field, g.coeff_array(0, n), 0)
        return CharSeries(self.field, g.coeff_array(0, rel), 0, rel).shift(-v)

    def __truediv__(self, other):
        if isinstance(other, (int, FqElem)):
            return self.scale(self.field(other).inverse())
        return self * other.inverse()

    def map_coefficients(self, fn) -> CharSeries:
        return CharSeries(self.field, fn(self.coeffs), self.v, self.prec)

    # -- serialisation --------------------------------------------------------------

    def to_text(self) -> str:
        """``p m v N : c_v ... c_{N-1}`` with each coefficient as m base-p digits."""
        if self.batch:
            raise TypeError("batched series cannot be serialised")
        digits = "0123456789abcdefghijklmnopqrstuvwxyz"
        end = self.prec if self.prec != INF else self.v + self.length
        body = []
        for d in range(self.v, int(end)):
            c = self.coefficient(d) if d < self.prec else self.field.zero
            body.append("".join(digits[x] for x in c.coords))
        n = "inf" if self.prec == INF else str(self.prec)
        return f"{self.p} {self.field.m} {self.v} {n} : " + " ".join(body)

    @classmethod
    def from_text(cls, text: str) -> CharSeries:
        head, _, body = text.partition(":")
        p, m, v, n = head.split()
        F = GF(int(p), int(m))
        rows = [[int(ch, int(p)) for ch in tok] for tok in body.split()]
        if any(len(r) != F.m for r in rows):
            raise ValueError("coefficient digit groups must have exactly m digits")
        prec = INF if n == "inf" else int(n)
        arr = np.array(rows, dtype=np.int64).reshape(-1, F.m)
        return cls(F, arr, int(v), prec)


# -- phi and psi -------------------------------------------------------------------


def phi(f: CharSeries, frobenius: bool = True) -> CharSeries:
    """Sum a_i X^i -> sum a_i^sigma X^{p i}; ``frobenius=False`` gives the k-linear version."""
    p = f.p
    c = f.field.frob_coords(f.coeffs, 1) if frobenius else f.coeffs
    L = f.length
    if L == 0:
        return CharSeries.zero(f.field, p * f.prec, f.batch)
    out = np.zeros(f.batch + ((L - 1) * p + 1, f.field.m), dtype=np.int64)
    out[..., ::p, :] = c
    return CharSeries(f.field, out, p * f.v, p * f.prec, normalize=False)


def psi(f: CharSeries, frobenius: bool = True) -> CharSeries:
    """The left inverse of phi: coefficient t of the result is sum_i (-1)^i a_{pt+i}."""
    p = f.p
    if f.prec == INF:
        t_hi = -((-(f.v + f.length)) // p)
        prec = INF
    else:
        t_hi = f.prec // p
        prec = t_hi
    if f.length == 0:
        return CharSeries.zero(f.field, prec, f.batch)
    t_lo = f.v // p
    if t_hi <= t_lo:
        return CharSeries.zero(f.field, prec, f.batch)
    block = f.coeff_array(p * t_lo, p * t_hi) if f.prec != INF else f._pad(p * t_lo, p * t_hi)
    block = block.reshape(f.batch + (t_hi - t_lo, p, f.field.m))
    signs = np.array([(-1) ** i for i in range(p)], dtype=np.int64)[:, None]
    out = np.sum(block * signs, axis=-2) % p
    if frobenius:
        out = f.field.frob_coords(out, -1)
    return CharSeries(f.field, out, t_lo, prec)


def psi_power(f: CharSeries, j: int, frobenius: bool = True) -> CharSeries:
    for _ in range(j):
        f = psi(f, frobenius)
    return f


# -- p-adic substitutions --------------------------------------------------------


def _required_digits(p: int, n: int) -> int:
    d = 1
    while p**d < n:
        d += 1
    return d


@functools.lru_cache(maxsize=512)
def _one_plus_x_power_unit(p: int, a_mod: int, digits: int, rel: int) -> np.ndarray:
    """((1+X)^a - 1)/X mod X^rel over F_p, a given mod p^digits."""
    s = PadicScalar.from_int(a_mod, p, digits) if a_mod else PadicScalar.zero(p)
    return np.array([binom_padic(s, k + 1) for k in range(rel)], dtype=np.int64)


def _lucas_matrix(p: int, tops: np.ndarray, n: int) -> np.ndarray:
    """C(tops[k], i) mod p for 0 <= i < n, digit by digit (Lucas)."""
    small = np.array([[math.comb(a, b) % p for b in range(p)] for a in range(p)], dtype=np.int64)
    out = np.ones((len(tops), n), dtype=np.int64)
    tops = np.asarray(tops, dtype=np.int64).copy()
    cols = np.arange(n, dtype=np.int64)
    while np.any(cols):
        out = out * small[(tops % p)[:, None], (cols % p)[None, :]] % p
        tops //= p
        cols //= p
    return out


@functools.lru_cache(maxsize=8)
def _to_t_basis(p: int, n: int) -> np.ndarray:
    """Row i: X^i = (T - 1)^i written in powers of T = 1 + X."""
    idx = np.arange(n)
    signs = np.where((idx[:, None] - idx[None, :]) % 2, p - 1, 1)
    return _lucas_matrix(p, idx, n) * signs % p


@functools.lru_cache(maxsize=8)
def _t_power_matrix(p: int, a_mod: int, digits: int, n: int) -> np.ndarray:
    """Row k: (1+X)^{a k} mod X^n; only a k mod p^digits matters when p^digits >= n."""
    tops = np.arange(n, dtype=np.int64) * a_mod % p**digits
    return _lucas_matrix(p, tops, n)


def _subst_power_series(coeffs: np.ndarray, p: int, a_mod: int, digits: int) -> np.ndarray:
    """h((1+X)^a - 1) for h given by coefficients of X^0 .. X^{n-1} along axis -2."""
    n = coeffs.shape[-2]
    in_t = _fp_matmul(_to_t_basis(p, n).T, coeffs, p)
    return _fp_matmul(_t_power_matrix(p, a_mod, digits, n).T, in_t, p)


def _inverse_fp(u: np.ndarray, n: int, p: int) -> np.ndarray:
    inv = np.zeros(n, dtype=np.int64)
    c0 = pow(int(u[0]), -1, p)
    inv[0] = c0
    for k in range(1, n):
        s = int(np.dot(u[1 : k + 1], inv[k - 1 :: -1][:k]) % p) if k else 0
        inv[k] = (-s * c0) % p
    return inv


def gamma_subst(f: CharSeries, a: PadicScalar, prec=None) -> CharSeries:
    """f((1+X)^a - 1) for a p-adic unit a.

    An exact f needs `prec`; otherwise the output precision is min(N, prec).
    """
    if not a.is_unit():
        raise ValueError("gamma_a needs a p-adic unit")
    p = f.p
    N = f.prec if prec is None else min(f.prec, prec)
    if N == INF:
        raise InsufficientPrecision("substitution into an exact series needs a target precision")
    N = int(N)
    if f.length == 0 or f.v >= N:
        return CharSeries.zero(f.field, N, f.batch)
    digits = _required_digits(p, max(2, N - f.v + 1))
    if a.abs_prec() < digits:
        raise InsufficientPadicPrecision(f"substitution to X^{N} needs the exponent mod {p}^{digits}")
    if a.to_int_mod(digits) == 1:
        return f.truncate(N)
    a_mod = a.to_int_mod(digits)
    v = f.v
    out = _subst_power_series(f.coeff_array(v, N), p, a_mod, digits)
    res = CharSeries(f.field, out, 0, N - v)
    if v:
        # f = X^v h, and X^v goes to X^v ((1+X)^a - 1)^v / X^v
        rel = N - v
        u = _one_plus_x_power_unit(p, a_mod, digits, rel)
        base = u if v > 0 else _inverse_fp(u, rel, p)
        unit = CharSeries(GF(p), base[:, None], 0, rel) ** abs(v)
        res = res * _embed(unit, f.field)
    return res.shift(v)


def _embed(f: CharSeries, field: Field) -> CharSeries:
    """A prime-field series viewed over `field`."""
    if f.field is field:
        return f
    coeffs = np.zeros(f.batch + (f.length, field.m), dtype=np.int64)
    coeffs[..., 0] = f.coeffs[..., 0]
    return CharSeries(field, coeffs, f.v, f.prec)


def padic_pow(f: CharSeries, s: PadicScalar, prec=None) -> CharSeries:
    """f^s for f = 1 mod X and an integral p-adic s.

    Uses f^(p^k) = phi^k(f) (Frobenius on coefficients included), so only the
    base-p digits of s below the target precision matter.
    """
    N = f.prec if prec is None else min(f.prec, prec)
    if N == INF:
        raise InsufficientPrecision("p-adic power of an exact series needs a target precision")
    N = int(N)
    if N <= 0:
        return CharSeries.zero(f.field, N, f.batch)
    if f.v < 0 or not np.all(f.coeff_array(0, 1)[..., 0, :] == f.field.one.array()):
        raise NotOneUnit("p-adic powers need a series congruent to 1 mod X")
    p = f.p
    if s.is_zero():
        return CharSeries.one(f.field, N)
    if s.val < 0:
        raise ValueError("exponent must be integral")
    digits = _required_digits(p, N)
    if s.abs_prec() < digits:
        raise InsufficientPadicPrecision(f"exponent needed mod {p}^{digits} for precision {N}")
    n = s.to_int_mod(digits)
    result = CharSeries.one(f.field, N)
    base = f.truncate(N)
    k = 0
    while n:
        n, d = divmod(n, p)
        if d:
            result = (result * base**d).truncate(N)
        k += 1
        base = phi(base).truncate(N)
    return result


def padic_pow_binomial(f: CharSeries, s: PadicScalar, prec=None) -> CharSeries:
    """sum_k C(s, k) (f - 1)^k; the defining expansion, kept as an independent route."""
    N = f.prec if prec is None else min(f.prec, prec)
    N = int(N)
    h = (f - 1).truncate(N)
    if h.val_bound < 1:
        raise NotOneUnit("p-adic powers need a series congruent to 1 mod X")
    total = CharSeries.one(f.field, N)
    term = CharSeries.one(f.field, N)
    for k in range(1, N):
        term = (term * h).truncate(N)
        c = binom_padic(s, k)
        if c:
            total = total + term.scale(c)
    return total


def one_plus_x_power(field: Field, s: PadicScalar, prec: int) -> CharSeries:
    """(1+X)^s mod X^prec for integral s (a PadicScalar or an int)."""
    if isinstance(s, int):
        s = PadicScalar.from_int(s, field.p)
    return padic_pow(CharSeries.from_list(field, [1, 1]), s, prec)


@functools.lru_cache(maxsize=512)
def _f_gamma_fp(p: int, a_mod: int, digits: int, n: int) -> np.ndarray:
    u = _one_plus_x_power_unit(p, a_mod, digits, n)
    w = a_mod % p
    return _inverse_fp(u, n, p) * w % p


def f_gamma(a: PadicScalar, N: int, field: Field | None = None) -> CharSeries:
    """omega(a) X / ((1+X)^a - 1) mod X^N; lies in 1 + X F_p[[X]]."""
    if not a.is_unit():
        raise ValueError("f_gamma needs a p-adic unit")
    F = field or GF(a.p)
    if N <= 0:
        return CharSeries.zero(F, N)
    digits = _required_digits(a.p, max(2, N + 1))
    if a.abs_prec() < digits:
        raise InsufficientPadicPrecision(f"f_gamma to X^{N} needs a mod {a.p}^{digits}")
    coeffs = _f_gamma_fp(a.p, a.to_int_mod(digits), digits, N)
    arr = np.zeros((N, F.m), dtype=np.int64)
    arr[:, 0] = coeffs
    return CharSeries(F, arr, 0, N)


# -- psi section ---------------------------------------------------------------------


def psi_section(t: CharSeries, s: int = 0, rng: np.random.Generator | None = None, frobenius: bool = True) -> CharSeries:
    """Some u with X^s | u and psi(u) = t modulo X^prec(t).

    Each coefficient of psi(u) only involves the block u_{pt}, ..., u_{pt+p-1},
    so the linear system is block diagonal: free coordinates are drawn from
    `rng` (zero when rng is None) and the top coordinate of every block is
    solved for.
    """
    if t.prec == INF:
        raise InsufficientPrecision("psi_section needs a target with finite precision")
    F, p = t.field, t.p
    K = int(t.prec)
    first_free = -((-(s - p + 1)) // p)  # smallest block index with a degree >= s
    t_lo = min(t.val_bound if t.length else K, first_free)
    if t_lo >= K:
        return CharSeries.zero(F, p * K, t.batch)
    target = t.coeff_array(t_lo, K)
    if frobenius:
        target = F.frob_coords(target, 1)
    nblocks = K - t_lo
    shape = t.batch + (nblocks, p, F.m)
    if rng is None:
        u = np.zeros(shape, dtype=np.int64)
    else:
        u = rng.integers(0, p, size=shape).astype(np.int64)
    degrees = p * (t_lo + np.arange(nblocks))[:, None] + np.arange(p)[None, :]
    u = u * (degrees >= s)[..., None]
    signs = np.array([(-1) ** i for i in range(p)], dtype=np.int64)[:, None]
    partial = np.sum(u[..., : p - 1, :] * signs[: p - 1], axis=-2)
    top_free = degrees[:, p - 1] >= s
    need = (target - partial) % p
    if np.any(need[..., ~top_free, :]):
        raise NoSolutionAtPrecision(f"no preimage divisible by X^{s} exists at this precision")
    u[..., p - 1, :] = np.where(top_free[:, None], need, 0)  # (-1)^(p-1) = 1
    return CharSeries(F, u.reshape(t.batch + (nblocks * p, F.m)), p * t_lo, p * K)


# -- finite combinatorial identities ---------------------------------------------


def moment_binomial_sum(p: int, k: int, t: int) -> int:
    """sum_{j=0}^{p-1} j^k C(j, t) mod p."""
    return sum(pow(j, k, p) * math.comb(j, t) for j in range(p)) % p


def wilson_product(p: int, r: int) -> int:
    """r! (p-1-r)! mod p."""
    return math.factorial(r) * math.factorial(p - 1 - r) % p


def lifted_sum_one_plus_x(field: Field, exponents, weights=None, prec=None) -> CharSeries:
    """sum_j w_j (1+X)^{e_j} for integral p-adic exponents e_j."""
    total = None
    for idx, e in enumerate(exponents):
        term = one_plus_x_power(field, e, prec)
        if weights is not None:
            term = term.scale(weights[idx])
        total = term if total is None else total + term
    return total
