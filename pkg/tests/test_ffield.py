import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phigamma import GF, conway_polynomial, frobenius, solve_alpha
from phigamma.errors import FieldError

# published Conway polynomials, lowest degree first
CONWAY = {
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
}

FIELDS = [(3, 1), (3, 2), (3, 4), (5, 1), (5, 2), (7, 2)]


@pytest.mark.parametrize("pm", sorted(CONWAY))
def test_conway_table(pm):
    assert conway_polynomial(*pm) == CONWAY[pm]


@pytest.mark.parametrize("p", [2, 4, 17])
def test_rejects_bad_characteristic(p):
    with pytest.raises((FieldError, ValueError)):
        GF(p, 1)


def elems(pm):
    F = GF(*pm)
    return st.integers(0, F.q - 1).map(F.from_index)


@st.composite
def triple(draw):
    pm = draw(st.sampled_from(FIELDS))
    e = elems(pm)
    return draw(e), draw(e), draw(e)


@given(triple())
def test_field_axioms(t):
    x, y, z = t
    F = x.field
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + F.zero == x and x * F.one == x
    if not x.is_zero():
        assert x * x.inverse() == F.one


@given(triple())
def test_frobenius_is_ring_hom(t):
    x, y, _ = t
    assert frobenius(x + y) == frobenius(x) + frobenius(y)
    assert frobenius(x * y) == frobenius(x) * frobenius(y)
    assert frobenius(x) == x ** x.field.p


def test_frobenius_examples():
    F = GF(3, 2)
    g = F.generator
    assert frobenius(g) == g**3
    for c in range(3):
        assert frobenius(F(c)) == F(c)


def test_generator_is_primitive():
    for pm in FIELDS:
        F = GF(*pm)
        assert F.generator.multiplicative_order() == F.q - 1


def test_mul_coords_matches_elementwise():
    F = GF(3, 4)
    rng = np.random.default_rng(5)
    a = rng.integers(0, 3, (6, 4))
    c = rng.integers(0, 3, 4)
    want = np.array([(F.from_coords(row) * F.from_coords(c)).array() for row in a])
    assert np.array_equal(F.mul_coords(a, c), want)
    assert np.array_equal(F.mul_coords(c, a), want)
    b = rng.integers(0, 3, (6, 4))
    want = np.array([(F.from_coords(x) * F.from_coords(y)).array() for x, y in zip(a, b)])
    assert np.array_equal(F.mul_coords(a, b), want)


def test_alpha_level_one():
    assert solve_alpha(3, 1) == GF(3, 1).one


def test_alpha_order_sixteen():
    # brute force over F_81: the elements with a^8 = -1 are exactly those of order 16
    a = solve_alpha(3, 2)
    assert a.multiplicative_order() == 16
    F = a.field
    roots = [x for x in F.elements() if x**8 == -F.one]
    assert a in roots and all(x.multiplicative_order() == 16 for x in roots)


@pytest.mark.parametrize("p,n", list(itertools.product([3, 5, 7], [1, 2])))
def test_alpha_defining_equation(p, n):
    a = solve_alpha(p, n)
    assert a ** (p**n - 1) == a.field((-1) ** (n - 1))
