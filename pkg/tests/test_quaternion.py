from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padictheta.algebra import QuadExt, det
from padictheta.quaternion import (
    NotHyperbolicError,
    Order,
    QuaternionAlgebra,
    apply_matrix,
    conj_action_matrix,
    conjugate_order,
    eigendecompose,
    intersect_orders,
    nrd_gamma_check,
)

A = QuaternionAlgebra(-2, -13)
coord = st.fractions(min_value=-10, max_value=10, max_denominator=6)
elements = st.builds(lambda *c: A.element(*c), coord, coord, coord, coord)


def test_basis_relations():
    i, j, k = A.i(), A.j(), A.k()
    assert i * i == A.element(-2, 0, 0, 0)
    assert j * j == A.element(-13, 0, 0, 0)
    assert i * j == k
    assert j * i == -k
    assert k * k == A.element(-26, 0, 0, 0)


@given(elements, elements)
def test_nrd_multiplicative(x, y):
    assert (x * y).nrd() == x.nrd() * y.nrd()


@given(elements, elements, elements)
def test_associative(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(elements)
def test_trace_zero_norm_matches_form(x):
    pure = x - A.element(x.trd() / 2, 0, 0, 0)
    v = pure.vector()
    assert pure.nrd() == A.Q(v)
    assert A.pairing(v, v) == 2 * A.Q(v)


def test_form_diagonal():
    assert A.form_diagonal() == (2, 13, 26)
    assert A.Q((1, 0, 0)) == 2
    # a norm 5 vector of the order's trace-zero lattice
    assert A.Q((Fraction(1, 4), Fraction(1, 2), Fraction(1, 4))) == 5


def test_order_and_unit(setup):
    R, Rc = setup.order, setup.conjugate
    assert R.is_closed() and Rc.is_closed()
    gamma = setup.eig.gamma
    assert nrd_gamma_check(gamma, intersect_orders(R, Rc))
    assert gamma.nrd() == 1


def test_non_order_rejected():
    with pytest.raises(ValueError):
        conjugate_order(A.element(1, 1, 0, 0), Order(A, (A.one(), A.element(0, Fraction(1, 3), 0, 0), A.j(), A.k())))


def test_trace_zero_gram(setup):
    L = setup.lattices["order"]
    S, K = L.integer_form()
    assert K == 2
    assert sorted(map(sorted, S)) == sorted(map(sorted, [[10, 13, 13], [13, 26, 0], [13, 0, 52]]))


@given(elements)
def test_conjugation_matrix_is_isometry(x):
    if x.nrd() == 0:
        return
    M = conj_action_matrix(x)
    assert det(M) == 1
    for v in [(1, 0, 0), (0, 1, 0), (1, 2, 3)]:
        assert A.Q(apply_matrix(M, v)) == A.Q(v)


@given(elements, elements)
def test_conjugation_matrix_homomorphism(x, y):
    if x.nrd() == 0 or y.nrd() == 0:
        return
    Mx, My, Mxy = conj_action_matrix(x), conj_action_matrix(y), conj_action_matrix(x * y)
    prod = [[sum(Mx[r][t] * My[t][c] for t in range(3)) for c in range(3)] for r in range(3)]
    assert prod == Mxy


def test_eigen_data_matches_reference(eig):
    c = Fraction(5)
    x = QuadExt.gen(c)
    assert eig.c == 5
    assert eig.varpi == -12 * x / 49 - Fraction(41, 49)
    assert eig.e == (1, 2, 1)
    assert eig.w_plus == (1, 4 * x / 39 - Fraction(2, 39), -4 * x / 39 - Fraction(1, 39))
    assert eig.w_minus == (1, -4 * x / 39 - Fraction(2, 39), 4 * x / 39 - Fraction(1, 39))
    assert eig.t == 1


def test_swapped_orientation(eig):
    s = eig.swapped()
    assert s.w_plus == eig.w_minus and s.varpi == eig.varpi.inverse()
    assert s.orient(eig.embedding).w_plus == eig.w_plus


def test_elliptic_unit_rejected():
    # i / sqrt2 style rotation: conjugation by 1 + i has finite order
    with pytest.raises(NotHyperbolicError):
        eigendecompose(A.element(1, 1, 0, 0), 7)
