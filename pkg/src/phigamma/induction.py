"""Compact induction from B cap KZ to B, the Hecke operator T, and the pairing with windows."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .borel import BorelElem, PsiWindow, borel_act, moment_ok, theta_coords
from .errors import MomentConditionViolated, SingularInput, ValueOutsideLine
from .ffield import Field, FqElem
from .padic import CharacterData, PadicScalar


@dataclass(frozen=True, order=True)
class CosetRep:
    """b_{beta, delta} = [[1, beta], [0, p^delta]] with beta = num / p^n in [0, 1)."""

    p: int
    num: int
    n: int
    delta: int

    def __post_init__(self):
        if not 0 <= self.num < self.p**self.n:
            raise ValueError("numerator out of range")
        if self.num == 0 and self.n != 0:
            raise ValueError("zero beta must have exponent 0")
        if self.num and self.num % self.p == 0:
            raise ValueError("numerator must be prime to p")

    @property
    def beta(self) -> Fraction:
        return Fraction(self.num, self.p**self.n)

    def matrix(self) -> BorelElem:
        return BorelElem.from_rationals(1, self.beta, Fraction(self.p) ** self.delta, self.p)


def coset_reduce(g: BorelElem):
    """(rep, u) with g = rep . u and u in B cap KZ."""
    p = g.p
    if g.a.is_zero() or g.d.is_zero():
        raise SingularInput("a and d must be nonzero")
    mv = g.a.val
    delta = g.d.val - mv
    d0 = g.d.unit_part()
    b1 = g.b.shift(-mv)
    q = b1 / d0
    if q.is_zero() or q.val >= 0:
        num, n = 0, 0
    else:
        n = -q.val
        num = q.unit % p**n
    rep = CosetRep(p, num, n, delta)
    beta = PadicScalar.from_rational(rep.beta, p)
    b0 = b1 - beta * d0
    u = BorelElem(g.a, b0.shift(mv), d0.shift(mv))
    if not (rep.matrix() * u).agrees(g):
        raise SingularInput("coset decomposition failed to reproduce the element")
    return rep, u


# -- Sym^r ------------------------------------------------------------------------------


def _binom(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def sym_transform(P: np.ndarray, a0: int, b0: int, d0: int, field: Field) -> np.ndarray:
    """P(a0 x, b0 x + d0 y) for P given by coordinates of x^{r-i} y^i (shape (r+1, m))."""
    r = P.shape[0] - 1
    p = field.p
    out = np.zeros_like(P)
    for i in range(r + 1):
        if not np.any(P[i]):
            continue
        # x^{r-i} y^i -> a0^{r-i} x^{r-i} (b0 x + d0 y)^i
        for t in range(i + 1):
            c = pow(a0, r - i, p) * _binom(i, t) * pow(d0, t, p) * pow(b0, i - t, p) % p
            if c:
                out[t] = (out[t] + c * P[i]) % p
    return out


def sym_monomial(r: int, i: int, field: Field, c=1) -> np.ndarray:
    P = np.zeros((r + 1, field.m), dtype=np.int64)
    P[i] = field(c).array()
    return P


def sym_eval_line(P: np.ndarray, j: int, field: Field) -> np.ndarray:
    """P(x, -j x) as a multiple of x^r."""
    r = P.shape[0] - 1
    p = field.p
    out = np.zeros_like(P)
    for i in range(r + 1):
        c = pow(-j % p, i, p) if i else 1
        out[0] = (out[0] + c * P[i]) % p
    return out


def sym_y_part(P: np.ndarray) -> np.ndarray:
    """P(0, y)."""
    out = np.zeros_like(P)
    out[-1] = P[-1]
    return out


# -- the induced representation ------------------------------------------------------------


class IndVec:
    """A finite sum of [b_{beta,delta}, P] in the induction of Sym^r twisted by chi o det."""

    def __init__(self, character: CharacterData, terms: dict | None = None):
        self.character = character
        self.field = character.field
        self.r = character.r
        self.terms: dict = {}
        for rep, P in (terms or {}).items():
            self._add(rep, np.asarray(P, dtype=np.int64))

    @property
    def p(self) -> int:
        return self.character.p

    def _add(self, rep: CosetRep, P: np.ndarray):
        cur = self.terms.get(rep)
        new = P % self.p if cur is None else (cur + P) % self.p
        if np.any(new):
            self.terms[rep] = new
        else:
            self.terms.pop(rep, None)

    def copy(self) -> IndVec:
        return IndVec(self.character, {k: v.copy() for k, v in self.terms.items()})

    @classmethod
    def basic(cls, character: CharacterData, P: np.ndarray) -> IndVec:
        """[1, P]."""
        return cls(character, {CosetRep(character.p, 0, 0, 0): P})

    def __add__(self, other: IndVec) -> IndVec:
        out = self.copy()
        for rep, P in other.terms.items():
            out._add(rep, P)
        return out

    def __neg__(self) -> IndVec:
        return self.scale(self.field(-1))

    def __sub__(self, other: IndVec) -> IndVec:
        return self + (-other)

    def scale(self, c: FqElem) -> IndVec:
        F = self.field
        c = F(c)
        return IndVec(self.character, {k: F.mul_coords(v, np.broadcast_to(c.array(), v.shape)) for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, IndVec):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return f"IndVec({len(self.terms)} terms, r={self.r})"

    def to_records(self) -> list:
        """Sorted (beta_num, beta_den_exp, delta, coefficient indices) records."""
        F = self.field
        out = []
        for rep in sorted(self.terms):
            P = self.terms[rep]
            out.append((rep.num, rep.n, rep.delta, [int(F.from_coords(P[i])) for i in range(self.r + 1)]))
        return out

    @classmethod
    def from_records(cls, character: CharacterData, records) -> IndVec:
        F = character.field
        p = character.p
        terms = {}
        for num, n, delta, coeffs in records:
            terms[CosetRep(p, num, n, delta)] = np.array([F.from_index(c).array() for c in coeffs], dtype=np.int64)
        return cls(character, terms)


def _apply_bkz(u: BorelElem, P: np.ndarray, character: CharacterData) -> np.ndarray:
    """u = p^m [[a0, b0], [0, d0]] acting on Sym^r twisted by chi o det."""
    F = character.field
    p = character.p
    mv = u.a.val
    a0 = u.a.unit % p
    d0 = u.d.unit % p
    b0 = 0 if u.b.is_zero() else u.b.shift(-mv).to_int_mod(1)
    Q = sym_transform(P, a0, b0, d0, F)
    c = character.chi(u.a * u.d)
    return F.mul_coords(Q, np.broadcast_to(c.array(), Q.shape))


def act_induction(g: BorelElem, vec: IndVec) -> IndVec:
    """g . [b, P] = [b', u . P] where g b = b' u."""
    out = IndVec(vec.character)
    for rep, P in vec.terms.items():
        new_rep, u = coset_reduce(g * rep.matrix())
        out._add(new_rep, _apply_bkz(u, P, vec.character))
    return out


def _place(g: BorelElem, P: np.ndarray, character: CharacterData) -> IndVec:
    """[g, P] written on the canonical representatives."""
    rep, u = coset_reduce(g)
    return IndVec(character, {rep: _apply_bkz(u, P, character)})


def _jmat(j: PadicScalar) -> BorelElem:
    p = j.p
    return BorelElem(PadicScalar.from_int(p, p), j, PadicScalar.from_int(1, p))


def hecke_T(vec: IndVec, J) -> IndVec:
    """T[g, P] = sum_j [g [[p, j], [0, 1]], P(x, -j x)] + [g diag(1, p), P(0, y)]."""
    ch = vec.character
    F = vec.field
    p = vec.p
    diag_p = BorelElem.from_rationals(1, 0, p, p)
    out = IndVec(ch)
    for rep, P in vec.terms.items():
        g = rep.matrix()
        for j in J:
            Q = sym_eval_line(P, j.to_int_mod(1), F)
            if np.any(Q):
                out = out + _place(g * _jmat(j), Q, ch)
        Q = sym_y_part(P)
        if np.any(Q):
            out = out + _place(g * diag_p, Q, ch)
    return out


# -- kernel generators -----------------------------------------------------------------


def moment_vectors(p: int, r: int) -> list:
    """Basis of {lambda in F_p^p : sum_i i^l lambda_i = 0 for 0 <= l < r} (row reduction mod p)."""
    A = np.array([[pow(i, ell, p) if (i or ell) else 1 for i in range(p)] for ell in range(r)], dtype=np.int64).reshape(r, p)
    A = A % p
    pivots = []
    row = 0
    for col in range(p):
        if row >= r:
            break
        nz = [k for k in range(row, r) if A[k, col]]
        if not nz:
            continue
        A[[row, nz[0]]] = A[[nz[0], row]]
        A[row] = A[row] * pow(int(A[row, col]), -1, p) % p
        for k in range(r):
            if k != row and A[k, col]:
                A[k] = (A[k] - A[k, col] * A[row]) % p
        pivots.append(col)
        row += 1
    free = [c for c in range(p) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(p, dtype=np.int64)
        v[f] = 1
        for k, pc in enumerate(pivots):
            v[pc] = -A[k, f] % p
        basis.append(tuple(int(x) for x in v))
    return basis


def kernel_generators(character: CharacterData, J, lamvecs=None) -> list:
    """The generators whose B-translates span the relevant piece of the image of T.

    For r = 0 a single vector; for r >= 1 the r vectors sum_j (-j)^i [[p, j], [0, 1]] [1, x^r]
    and one vector per lambda in `lamvecs` (defaults to a basis of the moment space).
    """
    p, r = character.p, character.r
    F = character.field
    xr = sym_monomial(r, 0, F)
    one = IndVec.basic(character, xr)
    if r == 0:
        gen = act_induction(BorelElem.from_rationals(1, 0, p, p), one)
        for j in J:
            gen = gen + act_induction(_jmat(j), one)
        return [gen]
    gens = []
    for i in range(r):
        v = IndVec(character)
        for j in J:
            c = pow(-j.to_int_mod(1) % p, i, p) if i else 1
            v = v + act_induction(_jmat(j), one).scale(F(c))
        gens.append(v)
    if lamvecs is None:
        lamvecs = [[F(x) for x in vec] for vec in moment_vectors(p, r)]
    inner = IndVec(character)
    for j in J:
        inner = inner + act_induction(_jmat(j), one).scale(F(pow(-j.to_int_mod(1) % p, r, p)))
    for lv in lamvecs:
        lv = [F(x) for x in lv]
        if not moment_ok(lv, r):
            raise MomentConditionViolated("sum_i i^l lambda_i must vanish for l < r")
        gens.append(third_family(character, lv, J, inner))
    return gens


def third_family(character: CharacterData, lamvec, J, inner: IndVec | None = None) -> IndVec:
    """sum_i lambda_i i^r [1, x^r] + sum_i lambda_i [[1, i/p], [0, 1/p]] sum_j (-j)^r [[p, j], [0, 1]] [1, x^r]."""
    p, r = character.p, character.r
    F = character.field
    one = IndVec.basic(character, sym_monomial(r, 0, F))
    if inner is None:
        inner = IndVec(character)
        for j in J:
            inner = inner + act_induction(_jmat(j), one).scale(F(pow(-j.to_int_mod(1) % p, r, p)))
    tr = sum((F(x) * F(pow(i, r, p)) for i, x in enumerate(lamvec)), F.zero)
    v = one.scale(tr)
    for i, li in enumerate(lamvec):
        li = F(li)
        if li.is_zero():
            continue
        g = BorelElem.from_rationals(1, Fraction(i, p), Fraction(1, p), p)
        v = v + act_induction(g, inner).scale(li)
    return v


# -- pairing with windows ----------------------------------------------------------------


class Pairing:
    """Evaluates pi_W(F) on a fixed (batched) window, memoising theta(b^{-1} * w) per coset."""

    def __init__(self, window: PsiWindow):
        self.window = window
        self._cache: dict = {}

    def theta_translate(self, rep: CosetRep) -> np.ndarray:
        val = self._cache.get(rep)
        if val is None:
            val = theta_coords(borel_act(rep.matrix().inverse(), self.window, upto=0, prec=1))
            self._cache[rep] = val
        return val


def window_requirement(vecs, p: int, r: int) -> tuple:
    """(depth, prec0) of an upward-lifted window on which every vector in `vecs` can be evaluated."""
    depth, shift = 0, 0
    for vec in vecs:
        for rep in vec.terms:
            depth = max(depth, rep.n + rep.delta)
            shift = max(shift, -rep.delta)
    return max(depth, 2), p**shift + (r + 1) * (p - 1)


def evaluate_pi(vec: IndVec, w) -> np.ndarray:
    """sum over the support of c * theta(b^{-1} * w), c the x^r-coefficient; coordinates in k."""
    pairing = w if isinstance(w, Pairing) else Pairing(w)
    F = vec.field
    total = np.zeros(pairing.window.batch + (F.m,), dtype=np.int64)
    for rep, P in vec.terms.items():
        if np.any(P[1:]):
            raise ValueOutsideLine(f"value at {rep} is not a multiple of x^r")
        val = pairing.theta_translate(rep)
        total = (total + F.mul_coords(val, np.broadcast_to(P[0], val.shape))) % F.p
    return total
