from itertools import combinations, permutations
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pomcp.errors import ArgumentError, DimensionError, ParseError
from pomcp.signs import (
    SignVector,
    colex_index,
    colex_rank,
    colex_subsets,
    colex_unrank,
    compose,
    conforms,
    format_signs,
    normalize_tuple,
    parse_signs,
    separation,
    sign,
    tuple_parity,
)

sv = SignVector.from_string
signvecs = st.integers(1, 8).flatmap(lambda n: st.tuples(*[st.lists(st.sampled_from([-1, 0, 1]), min_size=n, max_size=n)] * 2))


def test_sign_of_numbers():
    from fractions import Fraction

    assert [sign(-3), sign(0), sign(Fraction(1, 7)), sign(-0.5)] == [-1, 0, 1, -1]


def test_sign_products_closed():
    for a in (-1, 0, 1):
        for b in (-1, 0, 1):
            assert a * b in (-1, 0, 1)


def test_parse_format_roundtrip_and_errors():
    assert parse_signs("+-0") == (1, -1, 0)
    assert format_signs((1, -1, 0)) == "+-0"
    assert parse_signs("+−") == (1, -1)
    with pytest.raises(ParseError) as exc:
        parse_signs("++x")
    assert exc.value.offset == 2
    with pytest.raises(ParseError):
        parse_signs("+0", allow_zero=False)


def test_sign_vector_indexing():
    x = sv("+0-")
    assert len(x) == 3
    assert (x[1], x[2], x[3]) == (1, 0, -1)
    with pytest.raises(IndexError):
        x[0]
    assert x.support() == {1, 3}
    assert str(-x) == "-0+"
    with pytest.raises(ArgumentError):
        SignVector((2,))


def test_compose_examples():
    assert str(compose(sv("+0-"), sv("0-+"))) == "+--"
    assert str(compose(sv("00"), sv("-+"))) == "-+"
    with pytest.raises(DimensionError):
        compose(sv("+"), sv("++"))


def test_separation_examples():
    assert separation(sv("+-0"), sv("--+")) == {1}
    assert separation(sv("+-0"), sv("+-0")) == frozenset()
    assert separation(sv("++"), sv("--")) == {1, 2}


def test_conforms_examples():
    assert conforms(sv("0+0"), sv("-++"))
    assert not conforms(sv("+0"), sv("-0"))
    assert conforms(sv("000"), sv("-+0"))


@given(signvecs)
def test_composition_properties(pair):
    x, y = SignVector(tuple(pair[0])), SignVector(tuple(pair[1]))
    assert compose(x, x) == x
    assert conforms(x, compose(x, y))
    assert separation(x, y) == separation(y, x)
    assert compose(x, y).support() == x.support() | y.support()


def test_colex_order_of_pairs():
    order = [(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]
    assert [colex_rank(s) for s in order] == list(range(6))
    assert [tuple(e + 1 for e in s) for s in colex_subsets(4, 2)] == order


@pytest.mark.parametrize("r,n", [(1, 1), (2, 4), (3, 6), (4, 8), (3, 7)])
def test_colex_bijection(r, n):
    assert colex_unrank(0, r, n) == tuple(range(1, r + 1))
    for k in range(comb(n, r)):
        assert colex_rank(colex_unrank(k, r, n)) == k
    ranks = sorted(colex_rank(s) for s in combinations(range(1, n + 1), r))
    assert ranks == list(range(comb(n, r)))
    assert all(colex_index(n, r)[s] == k for k, s in enumerate(colex_subsets(n, r)))


def test_colex_errors():
    with pytest.raises(ArgumentError):
        colex_unrank(70, 4, 8)
    with pytest.raises(ArgumentError):
        colex_rank([1, 1])


def test_normalize_tuple_examples():
    t = normalize_tuple((2, 1, 3))
    assert (t.sorted_subset, t.parity) == ((1, 2, 3), -1)
    assert normalize_tuple((1, 2, 3)).parity == 1
    t = normalize_tuple((1, 1, 2))
    assert (t.sorted_subset, t.parity) == ((1, 2), 0)


def _inversion_parity(p):
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inv % 2 else 1


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_parity_matches_permutation_sign(k):
    for p in permutations(range(k)):
        assert tuple_parity(p) == _inversion_parity(p)
