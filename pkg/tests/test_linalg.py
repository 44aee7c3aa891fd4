from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from twostep import linalg

from conftest import invertible_matrices, small_ints


def matrices(rows, cols):
    return st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@given(st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(lambda c: matrices(r, c))))
def test_rank_and_nullity_match_sympy(m):
    ncols = len(m[0])
    ref = sympy.Matrix(m)
    assert linalg.rank(m) == ref.rank()
    ns = linalg.nullspace(m, ncols)
    assert len(ns) == ncols - ref.rank()
    for v in ns:
        assert all(x == 0 for x in linalg.matvec(m, v))


@given(st.integers(1, 4).flatmap(lambda n: invertible_matrices(n)))
def test_inverse_and_det(m):
    inv = linalg.inverse(m)
    assert linalg.matmul(m, inv) == linalg.identity(len(m))
    assert linalg.det(m) == sympy.Matrix(m).det()


def test_singular_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        linalg.inverse([[1, 2], [2, 4]])


@given(matrices(3, 3), st.lists(small_ints, min_size=3, max_size=3))
def test_solve_is_a_solution_or_none(m, rhs):
    x = linalg.solve(m, rhs)
    consistent = sympy.Matrix(m).rank() == sympy.Matrix(m).row_join(sympy.Matrix(rhs)).rank()
    assert (x is not None) == consistent
    if x is not None:
        assert linalg.matvec(m, x) == [Fraction(r) for r in rhs]


def test_rref_pivots():
    rows, piv = linalg.rref([[0, 2, 4], [1, 1, 1]], 3)
    assert piv == [0, 1]
    assert rows[0] == [1, 0, -1]
    assert rows[1] == [0, 1, 2]


def test_integer_division_stays_exact():
    assert linalg.inverse([[2, 0], [0, 3]]) == [[Fraction(1, 2), 0], [0, Fraction(1, 3)]]
