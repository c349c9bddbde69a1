import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pomcp.chirotope import Chirotope, Symmetry, check_axioms, perturb, restrict
from pomcp.errors import ArgumentError, DimensionError, ParseError
from pomcp.extension import (
    ExtensionSignature,
    brute_force_extensions,
    edge_product,
    enumerate_uniform_extensions,
    extension_prefixes,
    extension_subtree,
    is_nondegenerate_pomcp,
    is_valid_extension,
    transport_extension,
)
from pomcp.lcp import extended_realization
from pomcp.pmatroid import enumerate_uniform_p_matroids


@pytest.fixture(scope="module")
def reps3():
    return enumerate_uniform_p_matroids(3).representatives


@pytest.fixture(scope="module")
def c_reps3():
    return enumerate_uniform_p_matroids(3).c_representatives()


def rows(a):
    return sorted(map(tuple, np.asarray(a).tolist()))


def rank2_bases():
    out = []
    for code in range(2**6):
        chi = Chirotope(2, 4, tuple(-1 if code >> k & 1 else 1 for k in range(6)))
        if check_axioms(chi):
            out.append(chi)
    return out


def test_signature_text_and_shape():
    base = Chirotope.alternating(2, 4)
    e = ExtensionSignature(base, (1, 1, 1, 1))
    assert str(e) == "2 4 ++++++ ++++"
    assert ExtensionSignature.from_string(str(e)) == e
    assert e.extended() == Chirotope.alternating(2, 5)
    assert ExtensionSignature.from_extended(e.extended()) == e
    assert e.element == 5
    with pytest.raises(DimensionError):
        ExtensionSignature(base, (1, 1))
    with pytest.raises(ParseError):
        ExtensionSignature.from_string("2 4 ++++++")


def axiom_filter(base):
    """All +/- assignments whose extended map passes check_axioms."""
    return [
        c
        for c in itertools.product((1, -1), repeat=base.n)
        if check_axioms(ExtensionSignature(base, c).extended())
    ]


def test_alternating_rank2_against_exhaustive_filter():
    base = Chirotope.alternating(2, 4)
    assert rows(enumerate_uniform_extensions(base).new_values) == sorted(axiom_filter(base))


def test_every_uniform_rank2_base_against_exhaustive_filter():
    bases = rank2_bases()
    assert len(bases) == 48
    for base in bases:
        assert rows(enumerate_uniform_extensions(base).new_values) == sorted(axiom_filter(base))


def test_class_representatives_against_brute_force(reps3, c_reps3):
    counts = []
    for base in reps3:
        exts = enumerate_uniform_extensions(base)
        assert rows(exts.new_values) == rows(brute_force_extensions(base))
        counts.append(len(exts))
    # frozen from the brute-force oracle above
    assert counts == [148, 144, 148, 148, 148, 160]
    assert sum(len(enumerate_uniform_extensions(b)) for b in c_reps3) == 1920


def test_extensions_are_distinct_valid_and_restrict(reps3):
    exts = enumerate_uniform_extensions(reps3[1])
    assert len({e.new_values for e in exts}) == len(exts)
    for e in list(exts)[:20]:
        assert is_valid_extension(e) and e.is_uniform() and is_nondegenerate_pomcp(e)
        assert restrict(e.extended(), range(1, 7)) == e.base


def test_prefix_split_matches_full_search(reps3):
    for base in reps3:
        full = enumerate_uniform_extensions(base).new_values
        parts = [extension_subtree(base, p) for p in extension_prefixes(base, 4)]
        assert np.concatenate(parts).tolist() == full.tolist()


def test_non_uniform_base_rejected():
    with pytest.raises(ArgumentError):
        enumerate_uniform_extensions(Chirotope(2, 3, (1, 0, 1)))


@given(st.permutations(range(1, 7)), st.sets(st.integers(1, 6)), st.sampled_from([1, -1]), st.integers(0, 147))
def test_transport_maps_extensions_onto_extensions(perm, flips, sign, k):
    base = Chirotope.from_string("3 6 +++-++++++-+++-++++-")
    ext = list(enumerate_uniform_extensions(base))[k]
    moved = transport_extension(ext, perm, flips, sign)
    g = Symmetry(tuple(perm), frozenset(flips))
    target = g.apply(base) if sign == 1 else -g.apply(base)
    assert moved.base == target
    assert restrict(moved.extended(), range(1, 7)) == target
    assert check_axioms(moved.extended())
    inv = g.inverse()
    assert transport_extension(moved, inv.perm, inv.flips, sign) == ext


def test_transport_is_a_bijection(reps3):
    base = reps3[0]
    rng = random.Random(2)
    perm = list(range(1, 7))
    rng.shuffle(perm)
    g = Symmetry(tuple(perm), frozenset({2, 5}))
    image = {transport_extension(e, g.perm, g.flips).new_values for e in enumerate_uniform_extensions(base)}
    direct = {tuple(r) for r in enumerate_uniform_extensions(g.apply(base)).new_values.tolist()}
    assert image == direct
    ident = next(iter(enumerate_uniform_extensions(base)))
    assert transport_extension(ident, range(1, 7)) == ident


def test_degenerate_extension_detection():
    realized = extended_realization([[1, 0], [0, 1]], [0, -1])
    ext = ExtensionSignature.from_extended(realized)
    assert not is_nondegenerate_pomcp(ext)
    eps = Chirotope.alternating(2, 5)
    fixed = ExtensionSignature.from_extended(perturb(realized, eps))
    assert is_nondegenerate_pomcp(fixed)


def test_edge_product_of_realized_extension():
    # (I_2, -I_2, -q) with q = (-1, -1): every edge points up, so no edge leaves {1,2}
    ext = ExtensionSignature.from_extended(extended_realization([[1, 0], [0, 1]], [-1, -1]))
    assert [edge_product(ext, 3, i) for i in range(2)] == [-1, -1]
    assert [edge_product(ext, 0, i) for i in range(2)] == [1, 1]
