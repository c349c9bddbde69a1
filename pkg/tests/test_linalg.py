from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pomcp.errors import ArgumentError, DimensionError
from pomcp.linalg import det_sign, determinant, identity, matvec, solve, to_matrix

fractions = st.fractions(min_value=-6, max_value=6, max_denominator=5)


def cofactor_det(a):
    """Independent oracle: Laplace expansion along the first row."""
    n = len(a)
    if n == 1:
        return Fraction(a[0][0])
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in a[1:]]
        total += (-1) ** j * Fraction(a[0][j]) * cofactor_det(minor)
    return total


def square(n):
    return st.lists(st.lists(fractions, min_size=n, max_size=n), min_size=n, max_size=n)


def test_determinant_examples():
    assert determinant(identity(3)) == 1
    assert determinant([[1, 2], [3, 4]]) == -2
    assert determinant([[Fraction(1, 2), 1], [1, 2]]) == 0
    assert det_sign([[0, 1], [1, 0]]) == -1


@given(st.integers(1, 5).flatmap(square))
def test_determinant_matches_cofactor_oracle(a):
    assert determinant(a) == cofactor_det(a)


@given(square(4))
def test_random_4x4_against_oracle(a):
    assert determinant(a) == cofactor_det(a)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(square(n), st.lists(fractions, min_size=n, max_size=n))))
def test_solve_roundtrip(data):
    a, b = data
    if determinant(a) == 0:
        with pytest.raises(ArgumentError):
            solve(a, b)
    else:
        assert matvec(to_matrix(a), solve(a, b)) == tuple(Fraction(x) for x in b)


def test_shape_errors():
    with pytest.raises(ArgumentError):
        determinant([[1, 2]])
    with pytest.raises(DimensionError):
        to_matrix([[1, 2], [3]])
    with pytest.raises(DimensionError):
        solve([[1]], [1, 2])
