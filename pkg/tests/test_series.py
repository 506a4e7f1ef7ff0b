import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phigamma import GF, CharSeries, PadicScalar, f_gamma, gamma_subst, padic_pow, phi, psi, psi_section
from phigamma.errors import NoSolutionAtPrecision, NotOneUnit
from phigamma.series import (
    lifted_sum_one_plus_x,
    moment_binomial_sum,
    one_plus_x_power,
    padic_pow_binomial,
    wilson_product,
)

primes = st.sampled_from([3, 5, 7])


def coeffs(f, n):
    """First n coefficients (from X^0) of a prime-field power series, as ints."""
    return [int(f.coefficient(d)) for d in range(n)]


def naive_mul(a, b, p, n):
    out = [0] * n
    for i, x in enumerate(a[:n]):
        for j, y in enumerate(b[: n - i]):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def solve_mod_p(A, b, p):
    A = [row[:] + [v] for row, v in zip(A, b)]
    n = len(A)
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] % p)
        A[col], A[piv] = A[piv], A[col]
        inv = pow(A[col][col], -1, p)
        A[col] = [x * inv % p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[col])]
    return [row[-1] for row in A]


def psi_oracle(vals, p, K):
    """Decompose f = sum_i (1+X)^i phi(c_i) mod X^{pK} by linear algebra and return c_0."""
    n = p * K
    cols = []
    for i in range(p):
        base = [math.comb(i, d) % p for d in range(n)]
        for k in range(K):
            cols.append([0] * (p * k) + base[: n - p * k])
    A = [[cols[c][row] for c in range(n)] for row in range(n)]
    sol = solve_mod_p(A, vals, p)
    return sol[:K]


@st.composite
def series(draw, max_len=30):
    p = draw(primes)
    vals = draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=max_len))
    return p, vals


@given(series())
def test_mul_matches_schoolbook(data):
    p, vals = data
    F = GF(p)
    f = CharSeries.from_list(F, vals, 0, len(vals))
    g = CharSeries.from_list(F, vals[::-1], 0, len(vals))
    n = len(vals)
    assert coeffs(f * g, n) == naive_mul(vals, vals[::-1], p, n)
    assert (f * g).prec >= n


def test_fft_and_batched_paths_agree():
    F = GF(5, 2)
    rng = np.random.default_rng(0)
    a = CharSeries.random(F, rng, 80, batch=(3,))
    b = CharSeries.random(F, rng, 80, batch=(3,))
    prod = a * b
    for i in range(3):
        assert prod[i].agrees(a[i] * b[i])


@given(series(max_len=24))
def test_psi_matches_decomposition(data):
    p, vals = data
    K = max(1, len(vals) // p)
    vals = (vals + [0] * (p * K))[: p * K]
    f = CharSeries.from_list(GF(p), vals, 0, p * K)
    assert coeffs(psi(f), K) == psi_oracle(vals, p, K)
    assert psi(f).prec == K


@pytest.mark.parametrize("p", [3, 5, 7])
def test_psi_of_small_monomials(p):
    F = GF(p)
    for t in range(p):
        img = psi(CharSeries.monomial(F, t))
        assert img == CharSeries.constant(F, (-1) ** t)


def test_phi_examples():
    F = GF(3)
    X = CharSeries.gen(F)
    assert phi(X) == CharSeries.monomial(F, 3)
    assert phi(CharSeries.monomial(F, -1)) == CharSeries.monomial(F, -3)
    assert phi(1 + 2 * X) == 1 + 2 * CharSeries.monomial(F, 3)


@given(primes, st.integers(0, 2**32))
def test_psi_phi_identity_and_projection(p, seed):
    rng = np.random.default_rng(seed)
    F = GF(p, 2)
    a = CharSeries.random(F, rng, 12, v=-2)
    b = CharSeries.random(F, rng, 40)
    assert psi(phi(a)).agrees(a)
    assert psi(phi(a) * b).agrees(a * psi(b))
    c = CharSeries.random(F, rng, 12)
    for i in range(1, p):
        assert psi(one_plus_x_power(F, i, 40) * phi(c)).agrees(CharSeries.zero(F, 12))


@given(primes, st.integers(0, 2**32), st.integers(1, 10**6))
def test_gamma_commutes_with_phi(p, seed, a):
    if a % p == 0:
        a += 1
    rng = np.random.default_rng(seed)
    F = GF(p, 2)
    f = CharSeries.random(F, rng, 10)
    u = PadicScalar.from_int(a, p)
    assert gamma_subst(phi(f), u).agrees(phi(gamma_subst(f, u)))


@given(primes, st.integers(0, 2**32), st.integers(1, 500))
def test_gamma_subst_matches_composition(p, seed, a):
    if a % p == 0:
        a += 1
    F = GF(p)
    N = 12
    vals = list(np.random.default_rng(seed).integers(0, p, N))
    f = CharSeries.from_list(F, vals, 0, N)
    # (1+X)^a - 1 as an honest polynomial, then Horner
    g = [math.comb(a, d) % p for d in range(N)]
    g[0] = 0
    acc = [0] * N
    for c in reversed(vals):
        acc = naive_mul(acc, g, p, N)
        acc[0] = (acc[0] + int(c)) % p
    assert coeffs(gamma_subst(f, PadicScalar.from_int(a, p)), N) == acc


def test_gamma_subst_examples():
    F = GF(5)
    X = CharSeries.gen(F)
    f = CharSeries.random(F, np.random.default_rng(1), 20)
    assert gamma_subst(f, PadicScalar.from_int(1, 5)).agrees(f)
    got = gamma_subst(X.truncate(20), PadicScalar.from_int(-1, 5))
    assert coeffs(got, 20) == [0] + [(-1) ** d % 5 for d in range(1, 20)]


@given(primes, st.integers(0, 2**32), st.integers(-10**5, 10**5))
def test_padic_pow_routes_agree(p, seed, s):
    rng = np.random.default_rng(seed)
    F = GF(p, 2)
    f = 1 + CharSeries.random(F, rng, 25, v=1)
    s = PadicScalar.from_int(s, p)
    assert padic_pow(f, s).agrees(padic_pow_binomial(f, s))


def test_padic_pow_examples():
    F = GF(3)
    f = 1 + CharSeries.random(F, np.random.default_rng(2), 15, v=1)
    assert padic_pow(f, PadicScalar.zero(3)).agrees(CharSeries.one(F, 15))
    assert padic_pow(f, PadicScalar.from_int(1, 3)).agrees(f)
    with pytest.raises(NotOneUnit):
        padic_pow(2 + f, PadicScalar.from_int(1, 3))


@given(primes, st.integers(1, 10**6), st.integers(1, 10**6))
def test_f_gamma_cocycle(p, a, b):
    a += a % p == 0
    b += b % p == 0
    N = 20
    A, Bs = PadicScalar.from_int(a, p), PadicScalar.from_int(b, p)
    lhs = f_gamma(A * Bs, N)
    rhs = f_gamma(A, N) * gamma_subst(f_gamma(Bs, N), A, N)
    assert lhs.agrees(rhs)
    assert f_gamma(PadicScalar.from_int(1, p), N).agrees(CharSeries.one(GF(p), N))


@given(primes, st.integers(0, 2**32), st.integers(0, 9))
def test_psi_section_round_trip(p, seed, s):
    rng = np.random.default_rng(seed)
    F = GF(p, 2)
    t = CharSeries.random(F, rng, 15)
    try:
        u = psi_section(t, s, rng)
    except NoSolutionAtPrecision:
        # only possible when the low blocks are fully forced to zero
        assert s > p - 1
        return
    assert u.val_bound >= s
    assert psi(u).agrees(t)


def test_psi_section_examples():
    F = GF(3)
    one = CharSeries.one(F, 10)
    assert psi_section(one, 0).agrees(phi(one)) or psi(psi_section(one, 0)).agrees(one)
    u = psi_section(one, 2)
    assert u.val_bound >= 2 and psi(u).agrees(one)
    assert psi(CharSeries.monomial(F, 2)) == CharSeries.one(F)


@given(primes, st.integers(0, 2**32))
def test_precision_ledger_is_sound(p, seed):
    rng = np.random.default_rng(seed)
    F = GF(p, 2)
    hi = CharSeries.random(F, rng, 60, v=-1)
    lo = hi.truncate(30)
    g = CharSeries.random(F, rng, 60)
    for op in (phi, psi, lambda f: f * g, lambda f: gamma_subst(f, PadicScalar.from_int(1 + p, p), 200)):
        a, b = op(lo), op(hi)
        assert b.agrees(a, a.prec)


def test_text_round_trip():
    F = GF(5, 2)
    f = CharSeries.random(F, np.random.default_rng(3), 12, v=-3)
    assert CharSeries.from_text(f.to_text()).agrees(f)
    assert CharSeries.monomial(GF(3), 2, 1, 10).to_text() == "3 1 2 10 : 1 0 0 0 0 0 0 0"


@pytest.mark.parametrize("p", [3, 5, 7])
def test_sum_of_one_plus_x(p):
    F = GF(p)
    total = lifted_sum_one_plus_x(F, range(p), prec=4 * p)
    assert total.agrees(CharSeries.monomial(F, p - 1, 1, 4 * p))


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_moment_sums(p):
    for k in range(p):
        for t in range(p - k):
            s = moment_binomial_sum(p, k, t)
            if k + t <= p - 2:
                assert s == 0
            else:
                # the boundary k + t = p - 1 is never zero
                assert s == -pow(math.factorial(t), -1, p) % p


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_wilson(p):
    for r in range(p):
        assert wilson_product(p, r) == (-1) ** (r + 1) % p


@pytest.mark.parametrize("p", [3, 5, 7])
def test_leading_term_of_weighted_sum(p):
    F = GF(p)
    N = 3 * p
    for r in range(p):
        total = lifted_sum_one_plus_x(F, [-j for j in range(p)], [(-j) ** r for j in range(p)], prec=N)
        d = p - 1 - r
        assert total.val_bound == d
        assert int(total.coefficient(d)) == -pow(math.factorial(d), -1, p) % p


@pytest.mark.parametrize("p", [3, 5, 7])
def test_moment_vector_coefficient(p):
    from phigamma.induction import moment_vectors

    F = GF(p)
    for r in range(1, p):
        for lam in moment_vectors(p, r):
            total = lifted_sum_one_plus_x(F, [-i for i in range(p)], list(lam), prec=2 * p)
            want = (-1) ** r * sum(i**r * x for i, x in enumerate(lam)) * pow(math.factorial(r), -1, p) % p
            assert total.val_bound >= r
            assert int(total.coefficient(r)) == want


@given(primes, st.integers(0, 2**32), st.integers(1, 10**6), st.integers(-4, 3))
def test_gamma_subst_is_multiplicative_on_laurent_series(p, seed, a, v):
    a += a % p == 0
    rng = np.random.default_rng(seed)
    F = GF(p, 2)
    f = CharSeries.random(F, rng, 30, v=v)
    g = CharSeries.random(F, rng, 30, v=-1)
    u = PadicScalar.from_int(a, p)
    lhs = gamma_subst(f * g, u)
    rhs = gamma_subst(f, u) * gamma_subst(g, u)
    assert lhs.agrees(rhs)
    X = CharSeries.gen(F, 30)
    inv = gamma_subst(CharSeries.monomial(F, -1, 1, 30), u)
    assert (inv * gamma_subst(X, u)).agrees(CharSeries.one(F, 28))
