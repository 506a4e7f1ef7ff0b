import numpy as np
import pytest
from hypothesis import given, strategies as st

from phigamma import GF, CharSeries, PadicScalar
from phigamma import borel as B
from phigamma import modules as M
from phigamma.errors import InsufficientWindow, InvalidConfig, MomentConditionViolated, NotInBKZ
from phigamma.induction import moment_vectors


def rho(p, r, s=0, m=2):
    F = GF(p, m)
    return M.build_rho(p, r, s, F.generator)


def window(mod, seed, batch=6, prec0=None, depth=2):
    p = mod.p
    prec0 = prec0 or p * p + (mod.r + 1) * (p - 1)
    return B.random_window(mod, prec0, depth, np.random.default_rng(seed), batch=(batch,))


def same(w1, w2, depth):
    return all(np.all(w1[i].agrees(w2[i])) for i in range(depth + 1))


def test_factorisation_round_trip():
    rng = np.random.default_rng(0)
    for p in (3, 5):
        for _ in range(30):
            g = B.random_borel(p, rng, max_val=2)
            x, z, u, j = g.factor()
            assert u.is_unit()


def test_window_build_depth_zero():
    mod = rho(3, 1)
    top = M.dsharp_random(mod, 10, np.random.default_rng(1))
    w = B.window_build(mod, top, 0)
    assert w.depth == 0 and w[0].agrees(top)


@pytest.mark.parametrize("p,r", [(3, 0), (3, 2), (5, 1)])
def test_identity_and_group_law(p, r):
    mod = rho(p, r, 1)
    w = window(mod, 2, depth=3, prec0=p)
    rng = np.random.default_rng(3)
    assert same(B.borel_act(B.BorelElem.identity(p), w), w, 3)
    for _ in range(6):
        g, h = B.random_borel(p, rng), B.random_borel(p, rng)
        lhs = B.borel_act(g, B.borel_act(h, w))
        rhs = B.borel_act(g * h, w)
        assert same(lhs, rhs, min(lhs.depth, rhs.depth))


@pytest.mark.parametrize("p,r,s", [(3, 1, 0), (5, 2, 1), (5, 0, 3)])
def test_central_character(p, r, s):
    mod = rho(p, r, s)
    w = window(mod, 4, depth=2, prec0=3 * p)
    ch = mod.character
    for x in (PadicScalar.from_int(p, p), PadicScalar.from_int(2 + p, p)):
        act = B.borel_act(B.BorelElem(x, PadicScalar.zero(p), x), w)
        want = ch.central(x).inverse()
        assert same(act, B.PsiWindow(mod, [w[i].scale(want) for i in range(w.depth + 1)], check=False), w.depth)


def test_theta_examples():
    F = GF(3)
    mod = M.build_rho(3, 1, 0, F.one)
    y = M.ModVec((CharSeries.from_list(F, [1, 2], 0, 5), CharSeries.zero(F, 5)))
    assert B.theta(B.PsiWindow(mod, [y], check=False)) == F.one
    y = M.ModVec((CharSeries.monomial(F, 1, 1, 5), CharSeries.monomial(F, 1, 1, 5)))
    assert B.theta(B.PsiWindow(mod, [y], check=False)) == F.zero


@given(st.sampled_from([(3, 0), (3, 2), (5, 3)]), st.integers(0, 2**32))
def test_acbormu(pr, seed):
    p, r = pr
    mod = rho(p, r, 1)
    w = window(mod, seed, prec0=2 * p, depth=1)
    rng = np.random.default_rng(seed)
    g = B.random_borel(p, rng, bkz=True)
    assert np.all(B.check_acbormu(g, w))
    assert np.all(B.check_acbormu(B.BorelElem.identity(p), w))


def test_acbormu_scalar_p():
    mod = rho(5, 2, 1)
    w = window(mod, 9, prec0=10, depth=1)
    x = PadicScalar.from_int(5, 5)
    assert np.all(B.check_acbormu(B.BorelElem(x, PadicScalar.zero(5), x), w))


def test_acbormu_rejects_outside_bkz():
    mod = rho(3, 0)
    w = window(mod, 1, prec0=6, depth=1)
    with pytest.raises(NotInBKZ):
        B.check_acbormu(B.BorelElem.from_rationals(1, 0, 3, 3), w)


def test_case_one():
    mod = rho(3, 0, 1)
    w = window(mod, 11, batch=20)
    J = B.random_lifts(3, np.random.default_rng(5))
    assert np.all(B.check_vanishing(1, w, J))
    assert np.all(B.check_vanishing(1, w, J, method="reduced"))


@pytest.mark.parametrize("p,r", [(5, 3), (3, 1), (5, 1)])
def test_case_two(p, r):
    mod = rho(p, r)
    w = window(mod, 12)
    J = B.random_lifts(p, np.random.default_rng(6))
    for k in range(r):
        assert np.all(B.check_vanishing(2, w, J, k=k))
        assert np.all(B.check_vanishing(2, w, J, k=k, method="reduced"))


@pytest.mark.parametrize("p,r", [(3, 1), (3, 2), (5, 2), (5, 4)])
def test_case_three_and_control(p, r):
    mod = rho(p, r, 1)
    F = mod.field
    w = window(mod, 13, batch=30)
    J = B.random_lifts(p, np.random.default_rng(7))
    for vec in moment_vectors(p, r):
        lam = [F(x) for x in vec]
        assert np.all(B.check_vanishing(3, w, J, lamvec=lam))
        assert np.all(B.check_vanishing(3, w, J, lamvec=lam, method="reduced"))
    bad = [F(x) for x in moment_vectors(p, r)[0]]
    bad[0] = bad[0] + F.one
    with pytest.raises(MomentConditionViolated):
        B.check_vanishing(3, w, J, lamvec=bad)
    val = B.vanishing_value(3, w, J, lamvec=bad, strict=False)
    assert np.mean(np.any(val != 0, axis=-1)) >= 0.9


def test_vanishing_preconditions():
    mod = rho(3, 0)
    J = B.random_lifts(3, np.random.default_rng(0))
    with pytest.raises(InsufficientWindow):
        B.check_vanishing(1, window(mod, 0, depth=1), J)
    with pytest.raises(InvalidConfig):
        B.check_vanishing(2, window(mod, 0), J, k=0)
