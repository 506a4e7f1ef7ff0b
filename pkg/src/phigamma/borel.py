"""psi-compatible windows, the action of the Borel subgroup, theta and the vanishing checks."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    InsufficientPrecision,
    InsufficientWindow,
    InvalidConfig,
    MomentConditionViolated,
    NonUnitDiagonal,
    NotInBKZ,
)
from .ffield import Field, FqElem
from .modules import ModVec, PhiGammaModule, apply_psi_module, dsharp_contains, dsharp_random, psi_lift_dsharp
from .padic import DEFAULT_PREC, PadicScalar
from .series import CharSeries, one_plus_x_power

# -- Borel elements --------------------------------------------------------------------


@dataclass(frozen=True)
class BorelElem:
    """The upper-triangular matrix [[a, b], [0, d]] with p-adic entries."""

    a: PadicScalar
    b: PadicScalar
    d: PadicScalar

    def __post_init__(self):
        if self.a.is_zero() or self.d.is_zero():
            raise ValueError("diagonal entries of a Borel element must be nonzero")

    @classmethod
    def from_rationals(cls, a, b, d, p: int, prec: int = DEFAULT_PREC) -> BorelElem:
        return cls(*(PadicScalar.from_rational(x, p, prec) for x in (a, b, d)))

    @classmethod
    def identity(cls, p: int) -> BorelElem:
        return cls.from_rationals(1, 0, 1, p)

    @property
    def p(self) -> int:
        return self.a.p

    def __mul__(self, other: BorelElem) -> BorelElem:
        return BorelElem(self.a * other.a, self.a * other.b + self.b * other.d, self.d * other.d)

    def inverse(self) -> BorelElem:
        ai, di = self.a.inverse(), self.d.inverse()
        return BorelElem(ai, -(self.b * ai * di), di)

    def agrees(self, other: BorelElem) -> bool:
        return self.a.agrees(other.a) and self.b.agrees(other.b) and self.d.agrees(other.d)

    def in_bkz(self) -> bool:
        """Membership in B cap KZ: equal valuations on the diagonal and b no more singular."""
        v = self.a.val
        if self.d.val != v:
            return False
        return self.b.is_zero() or self.b.val >= v

    def factor(self):
        """(x, z, u, j) with self = x I . [[1, z], [0, 1]] . diag(1, u) . diag(1, p^j), u a unit."""
        x = self.a
        z = self.b / self.d if not self.b.is_zero() else PadicScalar.zero(self.p)
        ratio = self.d / self.a
        j = ratio.val
        u = ratio.unit_part()
        p = self.p
        pj = PadicScalar.from_int(1, p).shift(j)
        rebuilt = BorelElem(x, x * z * u * pj, x * u * pj)
        if not rebuilt.agrees(self):
            raise NonUnitDiagonal("factorisation does not reproduce the element")
        return x, z, u, j

    def __repr__(self):
        return f"BorelElem({self.a.to_fraction()}, {self.b.to_fraction()}, {self.d.to_fraction()})"


def random_borel(p: int, rng: np.random.Generator, max_val: int = 1, bkz: bool = False, upper: bool = False) -> BorelElem:
    """A random element with diagonal valuations in [-max_val, max_val] and b of valuation >= -max_val.

    `bkz` forces an element of B cap KZ; `upper` forces val(d) >= val(a).
    """

    def unit():
        return PadicScalar.from_int(int(rng.integers(1, p)) + p * int(rng.integers(0, p**12)), p)

    va = int(rng.integers(-max_val, max_val + 1))
    vd = va if bkz else int(rng.integers(va if upper else -max_val, max_val + 1))
    a, d = unit().shift(va), unit().shift(vd)
    if rng.random() < 0.2:
        b = PadicScalar.zero(p)
    else:
        vb = va if bkz else int(rng.integers(-max_val, max_val + 1))
        b = unit().shift(vb + int(rng.integers(0, 2)))
    return BorelElem(a, b, d)


# -- windows ---------------------------------------------------------------------------


class PsiWindow:
    """A finite prefix (y_0, ..., y_M) of an element of the psi-limit of D#."""

    def __init__(self, module: PhiGammaModule, entries, check: bool = True):
        self.module = module
        self.entries = tuple(entries)
        if not self.entries:
            raise ValueError("a window needs at least one entry")
        if check:
            self.check()

    @property
    def depth(self) -> int:
        return len(self.entries) - 1

    @property
    def batch(self) -> tuple:
        return self.entries[0].batch

    def __getitem__(self, i) -> ModVec:
        return self.entries[i]

    def select(self, idx) -> PsiWindow:
        return PsiWindow(self.module, [e.select(idx) for e in self.entries], check=False)

    def check(self):
        m = self.module
        for i, y in enumerate(self.entries):
            if not np.all(dsharp_contains(m, y)):
                raise ValueError(f"entry {i} is not in D#")
        for i in range(self.depth):
            if not np.all(apply_psi_module(m, self.entries[i + 1]).agrees(self.entries[i])):
                raise ValueError(f"psi(y_{i + 1}) != y_{i}")

    def compatible(self):
        """Per-batch truth value of psi(y_{i+1}) == y_i for every link."""
        m = self.module
        ok = True
        for i in range(self.depth):
            ok = ok & apply_psi_module(m, self.entries[i + 1]).agrees(self.entries[i])
        return ok


def window_build(m: PhiGammaModule, top: ModVec, depth: int) -> PsiWindow:
    """y_depth = top and y_i = psi^{depth - i}(top)."""
    entries = [top]
    for _ in range(depth):
        entries.append(apply_psi_module(m, entries[-1]))
    return PsiWindow(m, entries[::-1], check=False)


def window_lift(m: PhiGammaModule, bottom: ModVec, depth: int, rng: np.random.Generator | None = None) -> PsiWindow:
    """Extend y_0 = bottom upwards by psi-lifts inside D#."""
    entries = [bottom]
    for _ in range(depth):
        entries.append(psi_lift_dsharp(m, entries[-1], rng))
    return PsiWindow(m, entries, check=False)


def random_window(m: PhiGammaModule, prec0: int, depth: int, rng: np.random.Generator, batch=()) -> PsiWindow:
    """Random y_0 in D# modulo X^prec0, lifted upwards with random sections."""
    return window_lift(m, dsharp_random(m, prec0, rng, batch), depth, rng)


# -- the action ------------------------------------------------------------------------


@functools.lru_cache(maxsize=4096)
def _power_cached(field: Field, p: int, s_mod: int, digits: int, prec: int) -> CharSeries:
    return one_plus_x_power(field, PadicScalar.from_int(s_mod, p, digits) if s_mod else PadicScalar.zero(p), prec)


def _one_plus_x_to(field: Field, s: PadicScalar, prec: int) -> CharSeries:
    p = field.p
    digits = 1
    while p**digits < prec:
        digits += 1
    digits += 1
    return _power_cached(field, p, s.to_int_mod(digits), digits, prec)


def _psi_iter(m: PhiGammaModule, v: ModVec, k: int) -> ModVec:
    for _ in range(k):
        v = apply_psi_module(m, v)
    return v


def _cut(v: ModVec, n) -> ModVec:
    return v if n is None else v.truncate(n)


def borel_act(g: BorelElem, w: PsiWindow, upto: int | None = None, prec: int | None = None) -> PsiWindow:
    """g * w for g = x I . n_z . diag(1, u) . diag(1, p^j).

    Output entry i is psi^{k-i}((1+X)^{p^k z} E_k) with k = max(i, -val z),
    where E is the window after the diagonal factors. `prec` asks for entry i
    only modulo X^{prec p^i}; inputs are truncated accordingly.
    """
    m = w.module
    p = m.p
    x, z, u, j = g.factor()
    t = 0 if z.is_zero() else max(0, -z.val)
    top = w.depth + j
    if t > top:
        raise InsufficientWindow(t - top, f"unipotent part needs intermediate index {t}, window reaches {top}")
    if upto is None:
        upto = top
    if upto > top:
        raise InsufficientWindow(upto - top)
    unit_trivial = u.agrees(PadicScalar.from_int(1, p))
    u_inv = u.inverse()
    central = m.character.central(x).inverse()
    out = []
    for i in range(upto + 1):
        k = max(i, t)
        need = None if prec is None else prec * p**k
        src = k - j
        if src >= 0:
            E = _cut(w.entries[src], need)
        else:
            base = _cut(w.entries[0], None if need is None else need * p ** (-src))
            E = _psi_iter(m, base, -src)
        if not unit_trivial:
            E = m.apply_gamma(E, u_inv)
        if not z.is_zero():
            s = z.shift(k)
            if not s.is_zero():
                N = int(E.prec)
                E = E.scale(_one_plus_x_to(m.field, s, N))
        y = _psi_iter(m, E, k - i).scale(central)
        out.append(y)
    return PsiWindow(m, out, check=False)


def theta(w: PsiWindow):
    """Constant term of the e-coordinate of y_0 (coordinates array when batched)."""
    alpha = w.entries[0][0]
    if alpha.prec < 1:
        raise InsufficientPrecision("theta needs y_0 modulo X at least")
    return alpha.coefficient(0)


def theta_coords(w: PsiWindow) -> np.ndarray:
    """theta as an integer coordinate array of shape batch + (m,)."""
    c = theta(w)
    return c.array() if isinstance(c, FqElem) else np.asarray(c)


def _scal(field: Field, coords, c: FqElem) -> np.ndarray:
    return field.mul_coords(np.asarray(coords), np.broadcast_to(c.array(), np.shape(coords)))


def check_acbormu(g: BorelElem, w: PsiWindow):
    """theta(g^{-1} * w) == chi(ad) omega^r(a) theta(w)."""
    if not g.in_bkz():
        raise NotInBKZ("element is not in B cap KZ")
    m = w.module
    F = m.field
    ch = m.character
    lhs = theta_coords(borel_act(g.inverse(), w, upto=0, prec=1))
    factor = ch.chi(g.a * g.d) * ch.omega(g.a) ** m.r
    rhs = _scal(F, theta_coords(w), factor)
    eq = np.all(lhs == rhs, axis=-1)
    return bool(eq) if eq.ndim == 0 else eq


# -- vanishing ---------------------------------------------------------------------------


def moment_ok(lamvec, r: int) -> bool:
    F = lamvec[0].field
    for ell in range(r):
        total = F.zero
        for i, li in enumerate(lamvec):
            total = total + li * F(pow(i, ell, F.p) if (i or ell) else 1)
        if not total.is_zero():
            return False
    return True


def _pow_res(j: PadicScalar, k: int, p: int) -> int:
    """(-j)^k mod p, with 0^0 = 1."""
    base = (-j.to_int_mod(1)) % p
    return pow(base, k, p) if k else 1


def _mat(a, b, d, p):
    return BorelElem.from_rationals(a, b, d, p)


def _jmat(j: PadicScalar) -> BorelElem:
    p = j.p
    return BorelElem(PadicScalar.from_int(p, p), j, PadicScalar.from_int(1, p))


def vanishing_combination(case: int, p: int, r: int, J, k: int | None = None, lamvec=None, field: Field | None = None):
    """The Borel-side combination sum c_b b * theta as a list of (c, b) with c in k."""
    F = field
    if case == 1:
        if r != 0:
            raise InvalidConfig("case 1 needs r = 0")
        terms = [(F.one, _mat(1, 0, p, p))]
        terms += [(F.one, _jmat(j)) for j in J]
        return terms
    if r < 1:
        raise InvalidConfig(f"case {case} needs r >= 1")
    if case == 2:
        if k is None or not 0 <= k <= r - 1:
            raise InvalidConfig("case 2 needs 0 <= k <= r - 1")
        return [(F(_pow_res(j, k, p)), _jmat(j)) for j in J]
    if case == 3:
        if lamvec is None or len(lamvec) != p:
            raise InvalidConfig("case 3 needs p coefficients lambda_i")
        tr = sum((li * F(pow(i, r, p)) for i, li in enumerate(lamvec)), F.zero)
        terms = [(tr, BorelElem.identity(p))]
        for i, li in enumerate(lamvec):
            left = _mat(1, i, 1, p) * _mat(1, 0, Fraction(1, p), p)
            for j in J:
                terms.append((li * F(_pow_res(j, r, p)), left * _jmat(j)))
        return terms
    raise InvalidConfig(f"unknown case {case}")


def vanishing_value(case: int, w: PsiWindow, J, k: int | None = None, lamvec=None, method: str = "direct", strict: bool = True):
    """theta of the combination attached to the given case; coordinates (batched) of an element of k."""
    m = w.module
    p, r, F = m.p, m.r, m.field
    if w.depth < 2:
        raise InsufficientWindow(2 - w.depth)
    if case == 3 and strict and lamvec is not None and not moment_ok(lamvec, r):
        raise MomentConditionViolated("sum_i i^l lambda_i must vanish for l < r")
    if method == "direct":
        total = np.zeros(w.batch + (F.m,), dtype=np.int64)
        for c, b in vanishing_combination(case, p, r, J, k, lamvec, F):
            if c.is_zero():
                continue
            val = theta_coords(borel_act(b.inverse(), w, upto=0, prec=1))
            total = (total + _scal(F, val, c)) % p
        return total
    if method == "reduced":
        return _reduced_value(case, w, J, k, lamvec)
    raise ValueError(f"unknown method {method}")


def _reduced_value(case, w, J, k, lamvec):
    """The same quantity through the simplified expressions used in the proofs."""
    m = w.module
    p, r, F = m.p, m.r, m.field
    lam2 = m.lam * m.lam
    y0 = w.entries[0]
    N = int(y0.prec)

    def twist(v: ModVec, s: PadicScalar) -> ModVec:
        return v.scale(_one_plus_x_to(F, s, int(v.prec)))

    if case in (1, 2):
        kk = 0 if case == 1 else k
        acc = None
        for j in J:
            term = apply_psi_module(m, twist(y0, -j)).scale(F(_pow_res(j, kk, p)))
            acc = term if acc is None else acc + term
        val = theta_coords(PsiWindow(m, [acc.scale(lam2)], check=False))
        if case == 1:
            val = (val + theta_coords(PsiWindow(m, [w.entries[1]], check=False))) % p
        return val
    inner = None
    for i, li in enumerate(lamvec):
        term = twist(y0, PadicScalar.from_int(-i, p) if i else PadicScalar.zero(p)).scale(li)
        inner = term if inner is None else inner + term
    inner = apply_psi_module(m, inner)
    outer = None
    for j in J:
        term = twist(inner, -j).scale(F(_pow_res(j, r, p)))
        outer = term if outer is None else outer + term
    z = apply_psi_module(m, outer).scale(lam2)
    tr = sum((li * F(pow(i, r, p)) for i, li in enumerate(lamvec)), F.zero)
    z = z + y0.truncate(N).scale(tr)
    return theta_coords(PsiWindow(m, [z], check=False))


def check_vanishing(case: int, w: PsiWindow, J, k: int | None = None, lamvec=None, method: str = "direct"):
    val = vanishing_value(case, w, J, k, lamvec, method)
    ok = np.all(val == 0, axis=-1)
    return bool(ok) if ok.ndim == 0 else ok


def random_lifts(p: int, rng: np.random.Generator, prec: int = DEFAULT_PREC):
    """A system J of representatives of F_p in Z_p with J[i] = i mod p."""
    return [PadicScalar.from_int(i + p * int(rng.integers(0, p**12)), p, prec) for i in range(p)]
