import random

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.polys.matrices import DomainMatrix

from oracles import hypothesis_pair, random_unitriangular

from cayley_machines.laurent import (
    ONE,
    ZERO,
    DimensionError,
    E,
    HypothesisViolation,
    LaurentMatrix,
    LaurentPoly,
    NotUnitriangularError,
    closed_commutator_entry,
    commutator,
    commutator_entry,
    inverse,
    mat_mul,
    t_pow,
    unitriangular_inverse,
)

t = sympy.Symbol("t")
FIELD = sympy.GF(2)[t].get_field()

polys = st.builds(
    lambda lo, exps: LaurentPoly.from_exponents(lo + e for e in exps),
    st.integers(-6, 6),
    st.lists(st.integers(0, 8), max_size=6),
)


def to_field(p: LaurentPoly):
    expr = sum((t**e for e in p.exponents()), sympy.Integer(0))
    return FIELD.from_sympy(expr) if p.bits else FIELD.zero


def to_domain(M: LaurentMatrix) -> DomainMatrix:
    return DomainMatrix([[to_field(p) for p in row] for row in M.entries], (M.dim, M.dim), FIELD)


@given(polys, polys, polys)
def test_ring_laws(p, q, r):
    assert p + p == ZERO
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p * ONE == p and p + ZERO == p


@given(polys, polys)
def test_product_matches_sympy(p, q):
    assert to_field(p * q) == to_field(p) * to_field(q)
    assert to_field(p + q) == to_field(p) + to_field(q)


def test_poly_examples():
    tp1 = LaurentPoly.from_exponents([0, 1])
    assert tp1 * tp1 == LaurentPoly.from_exponents([0, 2])
    assert t_pow(-1) * t_pow(1) == ONE
    assert str(LaurentPoly.from_exponents([-1, 0])) == "t^-1+1"
    assert str(ZERO) == "0"
    with pytest.raises(ZeroDivisionError):
        tp1 ** -1
    assert t_pow(3) ** -2 == t_pow(-6)


@given(polys)
def test_poly_json(p):
    assert LaurentPoly.from_json(p.to_json()) == p


def test_matrix_unit_algebra():
    I = LaurentMatrix.identity(4)
    lhs = (I + E(4, 1, 2)) * (I + E(4, 2, 3))
    assert lhs == I + E(4, 1, 2) + E(4, 2, 3) + E(4, 1, 3)
    A = random_unitriangular(4, random.Random(0))
    assert A * I == A == I * A
    with pytest.raises(DimensionError):
        mat_mul(I, LaurentMatrix.identity(3))


def test_unitriangular_inverse_examples():
    I = LaurentMatrix.identity(5)
    assert unitriangular_inverse(I) == I
    X = I + E(5, 1, 2)
    assert unitriangular_inverse(X) == X
    with pytest.raises(NotUnitriangularError):
        unitriangular_inverse(I + E(5, 2, 1))


@pytest.mark.parametrize("seed", range(20))
def test_unitriangular_inverse_matches_gaussian_elimination(seed):
    rng = random.Random(seed)
    A = random_unitriangular(rng.randint(2, 7), rng)
    inv = unitriangular_inverse(A)
    assert (A * inv).is_identity() and (inv * A).is_identity()
    assert to_domain(inv) == to_domain(A).inv()


@pytest.mark.parametrize("seed", range(10))
def test_general_inverse_with_monomial_diagonal(seed):
    rng = random.Random(100 + seed)
    m = rng.randint(2, 6)
    D = LaurentMatrix.from_dict(m, {(i, i): t_pow(rng.randint(-3, 3)) for i in range(1, m + 1)})
    A = D * random_unitriangular(m, rng)
    assert to_domain(inverse(A)) == to_domain(A).inv()
    assert (A ** -3) * (A ** 3) == LaurentMatrix.identity(m)


@pytest.mark.parametrize("m", range(4, 11))
def test_commutator_entry_on_hypothesis_pairs(m):
    rng = random.Random(m)
    for _ in range(20):
        g, h = hypothesis_pair(m, rng)
        direct = commutator(g, h)
        assert commutator_entry(g, h) == direct[1, m]


def test_commutator_entry_hypothesis_violation():
    m = 4
    I = LaurentMatrix.identity(m)
    g, h = I + E(m, 1, 2), I + E(m, 2, 3)
    with pytest.raises(HypothesisViolation):
        commutator_entry(g, h)
    # the closed formula alone would return a wrong answer here
    assert closed_commutator_entry(g, h) == ZERO


def test_commutator_entry_commuting_pair():
    I = LaurentMatrix.identity(5)
    g = I + E(5, 1, 5)
    assert commutator_entry(g, I + E(5, 1, 5, t_pow(2))) == ZERO


def test_matrix_json_and_pretty():
    A = random_unitriangular(4, random.Random(9))
    assert LaurentMatrix.from_json(A.to_json()) == A
    rows = A.pretty().splitlines()
    assert len(rows) == 4 and len({len(r) for r in rows}) == 1
