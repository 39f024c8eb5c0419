from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from hopfpath.bhz import (
    ONE,
    Degree,
    Delta_minus,
    I,
    I_lin,
    NegCharacter,
    Symbol,
    Xi,
    compose_characters,
    degree,
    delta_minus,
    delta_plus,
    gamma_cocycle_defect,
    negative_generators,
    phi,
    phi_inv,
    phi_lin,
    phi_tensor,
    renormalize_M_ell,
    reversed_ck,
)
from hopfpath.freevec import LinComb
from hopfpath.monomial import Monomial
from hopfpath.roughpath import lift_branched_piecewise_linear
from hopfpath.syntax import parse_symbol, parse_tree
from hopfpath.translation import delta, dual_translate_M, half_cherries, ito_strat_convert
from hopfpath.trees import UNIT, Forest, trees_up_to

from .strategies import trees

A3 = Fraction(3, 10)
A4 = Fraction(2, 5)


def test_degree_examples():
    assert degree(Xi(1)) == Degree(-1, 1)
    assert degree(parse_symbol("I(Xi1)I(Xi2)Xi3")) == Degree(-1, 3)
    assert degree(parse_symbol("I(I())")) == Degree(2, 0)
    assert str(Degree(-1, 3)) == "3alpha-1"


def test_phi_example():
    assert phi(parse_tree("(3 (1) (2))")) == parse_symbol("I(Xi1)I(Xi2)Xi3")
    assert phi(parse_tree("(0)")) == ONE


def test_negative_generators_ranges():
    two = negative_generators(A4, 1)
    assert set(two) == {Xi(1), parse_symbol("I(Xi1)Xi1")}
    three = negative_generators(A3, 1)
    assert set(three) == set(two) | {parse_symbol("I(Xi1)I(Xi1)Xi1"), parse_symbol("I(I(Xi1)Xi1)Xi1")}
    assert negative_generators(Fraction(3, 5), 2) == [Xi(1), Xi(2)]


def test_delta_minus_unit_node():
    t = parse_tree("(0)")
    assert delta_minus(t, A4) == LinComb.basis((Monomial(), Forest((t,))))
    assert delta(Forest((t,))) == LinComb({(Monomial(), Forest((t,))): 1, (Monomial((t,)), Forest((t,))): 1})


def test_delta_plus_examples():
    assert delta_plus(Xi(1)) == LinComb.basis((Xi(1), UNIT))
    got = delta_plus(I(Xi(1)))
    assert got == LinComb({(I(Xi(1)), UNIT): 1, (ONE, Forest((parse_tree("(1)"),))): 1})


def test_counit_character_is_identity():
    ell = NegCharacter.counit(A3, 2)
    for t in trees_up_to(4, 2):
        assert renormalize_M_ell(ell, phi(t)) == LinComb.basis(phi(t))
    assert compose_characters(ell, ell) == ell


def test_ito_strat_through_characters():
    ell = NegCharacter.from_translation(half_cherries(2), A3)
    for t in trees_up_to(3, 2):
        assert renormalize_M_ell(ell, phi(t)) == phi_lin(ito_strat_convert(t, 2))


@given(trees(2, 4))
def test_phi_round_trip(t):
    assert phi_inv(phi(t)) == t


@given(trees(2, 4), st.sampled_from([A3, A4]))
def test_delta_minus_matches_projected_delta(t, alpha):
    assert Delta_minus(phi(t), alpha) == phi_tensor(delta_minus(t, alpha))


def translations(alpha):
    gens = negative_generators(alpha, 2)
    vals = st.lists(st.integers(-3, 3), min_size=len(gens), max_size=len(gens))
    return vals.map(lambda xs: NegCharacter(alpha, 2, dict(zip(gens, xs))))


@given(translations(A3), trees(2, 4))
def test_M_ell_matches_dual_translation(ell, t):
    v = ell.to_translation()
    assert renormalize_M_ell(ell, phi(t)) == phi_lin(dual_translate_M(v, LinComb.basis(Forest((t,)))))


@given(translations(A3), trees(2, 3))
def test_M_ell_commutes_with_I(ell, t):
    s = phi(t)
    assert renormalize_M_ell(ell, I(s)) == I_lin(renormalize_M_ell(ell, s))


@given(translations(A3), translations(A3))
def test_composition_adds(ell, other):
    comp = compose_characters(ell, other)
    for g in negative_generators(A3, 2):
        key = Monomial((g,))
        assert comp(key) == ell(key) + other(key)
    assert comp == compose_characters(other, ell)


@given(trees(2, 4))
def test_delta_plus_is_reversed_ck(t):
    # I(phi(t)) is the symbol whose single planted branch is t
    planted = LinComb.basis(Symbol(Forest((t,))))
    assert delta_plus(planted) == reversed_ck(Forest((t,)))


def test_gamma_cocycle_on_piecewise_linear_trace():
    rng = np.random.default_rng(7)
    m = 6
    grid = np.linspace(0.0, 1.0, m + 1)
    path = np.column_stack([grid, np.cumsum(np.r_[0.0, rng.standard_normal(m)]), np.cumsum(np.r_[0.0, rng.standard_normal(m)])])
    X = lift_branched_piecewise_linear(path, 4, pairs="all")
    worst = max(gamma_cocycle_defect(X, i, j, k, 3, 2) for i, j, k in [(0, 2, 5), (1, 3, 6), (0, 1, 6)])
    assert worst < 1e-9
