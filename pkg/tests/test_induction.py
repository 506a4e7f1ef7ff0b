from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phigamma import GF, CharacterData, PadicScalar
from phigamma import borel as B
from phigamma import induction as I
from phigamma import modules as M
from phigamma.errors import MomentConditionViolated, SingularInput, ValueOutsideLine


def char(p, r, s=0, m=2):
    return CharacterData(p, r, s, GF(p, m).generator)


def rand_vec(ch, rng, terms=3):
    F, p, r = ch.field, ch.p, ch.r
    out = I.IndVec(ch)
    for _ in range(terms):
        g = B.random_borel(p, rng)
        P = np.array([F.random(rng).array() for _ in range(r + 1)])
        out = out + I.act_induction(g, I.IndVec.basic(ch, P))
    return out


def test_coset_reduce_identity():
    rep, u = I.coset_reduce(B.BorelElem.identity(3))
    assert rep == I.CosetRep(3, 0, 0, 0)
    assert u.agrees(B.BorelElem.identity(3))


@pytest.mark.parametrize("j", [0, 1, 2, 7, 3**9 + 5])
def test_coset_reduce_hecke_matrix(j):
    p = 3
    g = B.BorelElem.from_rationals(p, j, 1, p)
    rep, u = I.coset_reduce(g)
    j0 = j % p
    assert rep == I.CosetRep(p, j0, 1 if j0 else 0, -1)
    assert u.agrees(B.BorelElem.from_rationals(p, j - j0, p, p))


def test_coset_reduce_representative():
    rep, u = I.coset_reduce(B.BorelElem.from_rationals(1, Fraction(1, 3), 1, 3))
    assert rep == I.CosetRep(3, 1, 1, 0)
    assert u.agrees(B.BorelElem.identity(3))


@given(st.sampled_from([3, 5]), st.integers(0, 2**32))
def test_coset_reduce_reproduces(p, seed):
    g = B.random_borel(p, np.random.default_rng(seed), max_val=3)
    rep, u = I.coset_reduce(g)
    assert u.in_bkz() and (rep.matrix() * u).agrees(g)


@given(st.sampled_from([(3, 0), (3, 2), (5, 1), (5, 4)]), st.integers(0, 2**32))
def test_action_is_a_group_action(pr, seed):
    p, r = pr
    ch = char(p, r, 1)
    rng = np.random.default_rng(seed)
    v = rand_vec(ch, rng)
    g, h = B.random_borel(p, rng), B.random_borel(p, rng)
    assert I.act_induction(B.BorelElem.identity(p), v) == v
    assert I.act_induction(g, I.act_induction(h, v)) == I.act_induction(g * h, v)


@given(st.sampled_from([(3, 0), (3, 1), (5, 2), (5, 4)]), st.integers(0, 2**32))
def test_hecke_is_equivariant(pr, seed):
    p, r = pr
    ch = char(p, r)
    rng = np.random.default_rng(seed)
    J = B.random_lifts(p, rng)
    v = rand_vec(ch, rng, 2)
    g = B.random_borel(p, rng)
    assert I.hecke_T(I.act_induction(g, v), J) == I.act_induction(g, I.hecke_T(v, J))


def test_hecke_examples():
    p = 3
    J = [PadicScalar.from_int(j, p) for j in range(p)]
    for r in (1, 2):
        ch = char(p, r)
        xr = I.IndVec.basic(ch, I.sym_monomial(r, 0, ch.field))
        want = I.IndVec(ch)
        for j in J:
            want = want + I.act_induction(B.BorelElem(PadicScalar.from_int(p, p), j, PadicScalar.from_int(1, p)), xr)
        assert I.hecke_T(xr, J) == want
    ch = char(p, 0)
    one = I.IndVec.basic(ch, I.sym_monomial(0, 0, ch.field))
    want = I.act_induction(B.BorelElem.from_rationals(1, 0, p, p), one)
    for j in J:
        want = want + I.act_induction(B.BorelElem(PadicScalar.from_int(p, p), j, PadicScalar.from_int(1, p)), one)
    assert I.hecke_T(one, J) == want


def test_hecke_is_independent_of_lifts():
    ch = char(5, 2)
    rng = np.random.default_rng(4)
    v = rand_vec(ch, rng)
    assert I.hecke_T(v, B.random_lifts(5, rng)) == I.hecke_T(v, B.random_lifts(5, rng))


def test_moment_vectors():
    assert I.moment_vectors(3, 1) == [(2, 1, 0), (2, 0, 1)]
    assert I.moment_vectors(3, 2) == [(1, 1, 1)]
    for p in (3, 5, 7):
        for r in range(1, p):
            basis = I.moment_vectors(p, r)
            assert len(basis) == p - r
            for vec in basis:
                assert all(sum(pow(i, ell, p) * x for i, x in enumerate(vec)) % p == 0 for ell in range(1, r))
                assert sum(vec) % p == 0


def test_kernel_generators_shape():
    p = 3
    J = [PadicScalar.from_int(j, p) for j in range(p)]
    ch = char(p, 0)
    (gen,) = I.kernel_generators(ch, J)
    support = {I.CosetRep(p, 0, 0, 1)} | {I.coset_reduce(B.BorelElem.from_rationals(p, j, 1, p))[0] for j in range(p)}
    assert set(gen.terms) == support
    for r in range(1, p):
        ch = char(p, r, 1)
        gens = I.kernel_generators(ch, J)
        assert len(gens) == r + len(I.moment_vectors(p, r))
        for gen in gens:
            assert all(not np.any(P[1:]) for P in gen.terms.values())
        for i in range(r):
            assert I.hecke_T(I.IndVec.basic(ch, I.sym_monomial(r, i, ch.field)), J) == gens[i]


def test_kernel_generators_reject_bad_lambda():
    ch = char(3, 1)
    J = [PadicScalar.from_int(j, 3) for j in range(3)]
    with pytest.raises(MomentConditionViolated):
        I.kernel_generators(ch, J, [[1, 0, 0]])


def test_records_round_trip():
    ch = char(5, 2, 3)
    v = rand_vec(ch, np.random.default_rng(8), 4)
    assert I.IndVec.from_records(ch, v.to_records()) == v


def pairing_for(ch, vecs, seed, batch=20):
    p, r = ch.p, ch.r
    m = M.build_rho(p, r, ch.s, ch.lam)
    depth, prec0 = I.window_requirement(vecs, p, r)
    w = B.random_window(m, prec0, depth, np.random.default_rng(seed), batch=(batch,))
    return I.Pairing(w)


@pytest.mark.parametrize("p,r", [(3, 0), (3, 1), (3, 2), (5, 0), (5, 3)])
def test_generators_pair_to_zero(p, r):
    ch = char(p, r, 1)
    rng = np.random.default_rng(10 * p + r)
    J = B.random_lifts(p, rng)
    gens = I.kernel_generators(ch, J)
    moved = [I.act_induction(B.random_borel(p, rng, upper=True), g) for g in gens for _ in range(2)]
    pairing = pairing_for(ch, gens + moved, p + r)
    for v in gens + moved:
        assert np.all(I.evaluate_pi(v, pairing) == 0)


def test_pi_on_basic_and_bkz_translate():
    ch = char(5, 2, 1)
    F = ch.field
    xr = I.IndVec.basic(ch, I.sym_monomial(2, 0, F))
    rng = np.random.default_rng(2)
    g = B.random_borel(5, rng, bkz=True)
    pairing = pairing_for(ch, [xr], 3)
    th = B.theta_coords(pairing.window)
    assert np.array_equal(I.evaluate_pi(xr, pairing), th)
    factor = ch.chi(g.a * g.d) * ch.omega(g.a) ** 2
    want = F.mul_coords(th, factor.array())
    assert np.array_equal(I.evaluate_pi(I.act_induction(g, xr), pairing), want)


def test_pi_needs_values_on_the_line():
    ch = char(3, 1)
    v = I.IndVec.basic(ch, I.sym_monomial(1, 1, ch.field))
    with pytest.raises(ValueOutsideLine):
        I.evaluate_pi(v, pairing_for(ch, [v], 0, batch=2))


def test_singular_input():
    with pytest.raises((SingularInput, ValueError)):
        I.coset_reduce(B.BorelElem(PadicScalar.zero(3), PadicScalar.zero(3), PadicScalar.from_int(1, 3)))
