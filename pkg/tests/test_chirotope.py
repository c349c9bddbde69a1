import itertools
import random
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pomcp.chirotope import (
    ActionTable,
    Chirotope,
    Symmetry,
    check_axioms,
    evaluate,
    gp_relations,
    is_uniform,
    perturb,
    realize_chirotope,
    relabel,
    relabel_tables,
    reorient,
    restrict,
    satisfies_c3prime,
)
from pomcp.errors import ArgumentError, DimensionError, ParseError


def c3_oracle(chi):
    """Exhaustive (C3') over all ordered tuple pairs, via evaluate only."""
    ground = range(1, chi.n + 1)
    for x in itertools.product(ground, repeat=chi.r):
        for y in itertools.product(ground, repeat=chi.r):
            terms = {
                evaluate(chi, (y[i],) + x[1:]) * evaluate(chi, y[:i] + (x[0],) + y[i + 1 :]) for i in range(chi.r)
            }
            terms.add(-evaluate(chi, x) * evaluate(chi, y))
            if not ({1, -1} <= terms or terms == {0}):
                return False
    return any(chi.values)


def random_sign_map(r, n, rng, zeros=True):
    choices = (-1, 0, 1) if zeros else (-1, 1)
    return Chirotope(r, n, tuple(rng.choice(choices) for _ in range(comb(n, r))))


def int_matrix(r, n):
    return st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=r, max_size=r)


def test_text_form():
    chi = Chirotope.from_string("2 4 +-0+-+")
    assert str(chi) == "2 4 +-0+-+"
    with pytest.raises(ParseError):
        Chirotope.from_string("2 4")
    with pytest.raises(DimensionError):
        Chirotope(2, 4, (1,) * 5)
    with pytest.raises(ArgumentError):
        Chirotope(3, 2, (1,))


def test_evaluate_examples():
    a = Chirotope.alternating(2, 4)
    assert evaluate(a, (2, 1)) == -1
    assert evaluate(a, (1, 1)) == 0
    v = realize_chirotope([[1, 0, -1, 0], [0, 1, 0, -1]])
    assert evaluate(v, (3, 2)) == -1
    with pytest.raises(ArgumentError):
        evaluate(a, (1, 5))


def test_check_axioms_examples():
    assert check_axioms(Chirotope.alternating(3, 6))
    assert not check_axioms(Chirotope(2, 4, (0,) * 6))
    # chi(12)=+, chi(13)=+, chi(23)=+, chi(14)=+, chi(24)=-, chi(34)=+ in colex order
    chi = Chirotope.from_string("2 4 ++++-+")
    assert check_axioms(chi) == c3_oracle(chi)
    assert check_axioms(chi) is False  # frozen from the exhaustive oracle


@pytest.mark.parametrize("r,n,zeros", [(2, 4, True), (2, 4, False), (2, 5, True), (3, 5, False), (3, 5, True)])
def test_axioms_agree_with_exhaustive_oracle(r, n, zeros):
    rng = random.Random(f"{r}{n}{zeros}")
    for _ in range(25 if r == 2 else 6):
        chi = random_sign_map(r, n, rng, zeros)
        assert check_axioms(chi) == c3_oracle(chi), chi


def test_all_rank2_maps_on_four_elements():
    for vals in itertools.product((-1, 0, 1), repeat=6):
        chi = Chirotope(2, 4, vals)
        assert check_axioms(chi) == c3_oracle(chi), chi


def test_three_term_relations_decide_uniform_maps():
    rng = random.Random(5)
    for _ in range(40):
        chi = random_sign_map(3, 6, rng, zeros=False)
        assert check_axioms(chi) == satisfies_c3prime(chi)
    pos, sgn = gp_relations(3, 6)
    assert pos.shape[1] == 6 and sgn.shape[1] == 3


@given(int_matrix(2, 5))
def test_realized_maps_satisfy_axioms_rank2(rows):
    chi = realize_chirotope(rows)
    if any(chi.values):
        assert check_axioms(chi)


@given(int_matrix(3, 6))
def test_realized_maps_satisfy_axioms_rank3(rows):
    chi = realize_chirotope(rows)
    if any(chi.values):
        assert check_axioms(chi)


def test_uniformity_examples():
    assert is_uniform(Chirotope.alternating(4, 8))
    assert not is_uniform(realize_chirotope([[1, 0, -1, 0], [0, 1, 0, -1]]))
    assert not is_uniform(Chirotope(2, 3, (1, 0, 1)))


def test_reorient_examples():
    a = Chirotope.alternating(2, 4)
    assert reorient(a, []) == a
    b = reorient(a, [1])
    assert b.basis_value([1, 2]) == -1 and b.basis_value([3, 4]) == 1
    assert reorient(b, [1]) == a


def test_relabel_examples():
    a = Chirotope.alternating(2, 4)
    assert relabel(a, (1, 2, 3, 4)) == a
    assert relabel(a, (2, 1, 3, 4)).basis_value([1, 2]) == -1


@given(st.permutations(range(1, 7)), st.sets(st.integers(1, 6)), int_matrix(3, 6))
def test_actions_commute_with_realization(perm, flips, rows):
    # relabel/reorient of chi_V equals chi of the permuted / negated columns
    v = [list(r) for r in rows]
    chi = realize_chirotope(v)
    moved = [[row[p - 1] for p in perm] for row in v]
    assert relabel(chi, perm) == realize_chirotope(moved)
    flipped = [[-x if c + 1 in flips else x for c, x in enumerate(row)] for row in v]
    assert reorient(chi, flips) == realize_chirotope(flipped)


@given(st.permutations(range(1, 7)), st.permutations(range(1, 7)), st.sets(st.integers(1, 6)), st.sets(st.integers(1, 6)))
def test_symmetry_composition(p1, p2, f1, f2):
    chi = Chirotope.from_string("3 6 +++-++++++-+++-+++--")
    g, h = Symmetry(tuple(p1), f1), Symmetry(tuple(p2), f2)
    assert g.then(h).apply(chi) == h.apply(g.apply(chi))
    assert g.inverse().apply(g.apply(chi)) == chi
    assert relabel(relabel(chi, p1), Symmetry(tuple(p1)).inverse().perm) == chi


def test_restrict_examples():
    a = Chirotope.alternating(3, 7)
    assert restrict(a, range(1, 8)) == a
    assert restrict(a, range(1, 7)) == Chirotope.alternating(3, 6)
    with pytest.raises(ArgumentError):
        restrict(a, [1, 2])


def test_realize_examples():
    assert realize_chirotope([[1, 0, -1], [0, 1, -1]]).values == (1, -1, 1)
    assert realize_chirotope([[1, 1, 1, 1], [1, 2, 3, 4]]) == Chirotope.alternating(2, 4)
    assert not is_uniform(realize_chirotope([[1, 1, 0], [2, 2, 1]]))


def test_perturb_examples():
    eps = Chirotope.alternating(2, 4)
    a = reorient(eps, [2])
    assert perturb(a, eps) == a
    deg = realize_chirotope([[1, 0, -1, 0], [0, 1, 0, -1]])
    p = perturb(deg, eps)
    assert p.values[1] == 1 and is_uniform(p)
    with pytest.raises(ArgumentError):
        perturb(deg, deg)


def test_perturbing_degenerate_realization_by_every_uniform_map():
    deg = realize_chirotope([[1, 0, -1, 0], [0, 1, 0, -1]])
    for vals in itertools.product((-1, 1), repeat=6):
        eps = Chirotope(2, 4, vals)
        if check_axioms(eps):
            p = perturb(deg, eps)
            assert is_uniform(p) and check_axioms(p)


def test_relabel_tables_match_scalar():
    perms = list(itertools.permutations(range(5)))[::7]
    idx, par = relabel_tables(2, 5, np.array(perms))
    chi = Chirotope.from_string("2 5 +-++-+--++")
    for k, p in enumerate(perms):
        assert relabel(chi, [e + 1 for e in p]).values == tuple(int(x) for x in chi.array[idx[k]] * par[k])


def test_action_table_canonical_is_orbit_constant():
    subsets = [{e for e in range(1, 5) if m >> (e - 1) & 1} for m in range(16)]
    syms = [Symmetry(tuple(p), frozenset(f)) for p in itertools.permutations(range(1, 5)) for f in subsets]
    table = ActionTable(2, 4, syms)
    chi = Chirotope.from_string("2 4 +-++-+")
    canon, g = table.canonical(chi)
    assert g.apply(chi).normalized() == canon
    for s in syms[::5]:
        assert table.canonical(s.apply(chi))[0] == canon
