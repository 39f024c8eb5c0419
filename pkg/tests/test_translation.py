
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfpath.forest import ForestAlgebra
from hopfpath.freevec import LinComb, pairing
from hopfpath.monomial import Monomial
from hopfpath.tensor import TensorAlgebra, WordTranslation, letter, lie_bracket
from hopfpath.translation import (
    DualTranslation,
    TreeTranslation,
    delta,
    dual_translate_M,
    half_cherries,
    hat_D_sum,
    iota_translation,
    ito_strat_convert,
    translate_M,
    translate_M_prelie,
)
from hopfpath.syntax import parse, parse_tree
from hopfpath.trees import UNIT, Forest

from .strategies import forests, tree_series, trees

F = ForestAlgebra(d=2, N=4)


def T(text):
    return parse_tree(text)


def mono(*texts):
    return Monomial(T(x) for x in texts)


def test_delta_golden_cherry():
    expected = LinComb(
        {
            (mono(), T("(1 (2) (3))")): 1,
            (mono("(1)"), T("(0 (2) (3))")): 1,
            (mono("(2)"), T("(1 (0) (3))")): 1,
            (mono("(3)"), T("(1 (2) (0))")): 1,
            (mono("(1)", "(2)"), T("(0 (0) (3))")): 1,
            (mono("(1)", "(3)"), T("(0 (2) (0))")): 1,
            (mono("(2)", "(3)"), T("(1 (0) (0))")): 1,
            (mono("(1)", "(2)", "(3)"), T("(0 (0) (0))")): 1,
            (mono("(1 (2))"), T("(0 (3))")): 1,
            (mono("(1 (3))"), T("(0 (2))")): 1,
            (mono("(1 (2))", "(3)"), T("(0 (0))")): 1,
            (mono("(1 (3))", "(2)"), T("(0 (0))")): 1,
            (mono("(1 (2) (3))"), T("(0)")): 1,
        }
    )
    got = delta(Forest((T("(1 (2) (3))"),))).map_keys(lambda k: (k[0], k[1].tree()))
    assert got == expected


def test_ito_strat_goldens():
    assert ito_strat_convert(T("(3 (1) (2))"), 3) == parse("(3 (1) (2))")
    assert ito_strat_convert(T("(2 (1) (1))"), 2) == parse("(2 (1) (1))")
    assert ito_strat_convert(T("(2 (2) (1))"), 2) == parse("(2 (2) (1)) + 1/2*(0 (1))")
    assert ito_strat_convert(T("(1 (1) (1))"), 1) == parse("(1 (1) (1)) + (0 (1))")


def test_ito_strat_chain():
    # [•1]•1 turns into •0 with weight 1/2
    assert hat_D_sum(T("(1 (1))")) == parse("(1 (1)) + 1/2*(0)")


def test_half_cherries_leave_distinct_labels():
    t = parse("(1 (2 (3)))")
    assert dual_translate_M(half_cherries(3), t) == t


def test_M_on_nodes():
    v = TreeTranslation(2, {0: parse("(2 (1))"), 1: parse("3*(2)")})
    M = DualTranslation(F, v)
    assert M(parse("(0)")) == parse("(0) + (2 (1))")
    assert M(parse("(1)")) == parse("(1) + 3*(2)")
    assert M(parse("(2)")) == parse("(2)")


def test_M_golden_chain():
    # M_v([•1]•0) with v_0 = •2 grafts •1 onto the new •2 root
    v = TreeTranslation(2, {0: parse("(2)")})
    got = translate_M(F, v, parse("(0 (1))"))
    assert got == parse("(0 (1)) + (2 (1))")


def test_non_tree_entry_rejected():
    with pytest.raises(ValueError):
        TreeTranslation(2, {0: parse("{(1) (2)}")})


def small_translation(d=2, special=False):
    labels = st.sampled_from([0] if special else list(range(d + 1)))
    return st.dictionaries(labels, tree_series(d, 2, 2), max_size=2).map(lambda e: TreeTranslation(d, e))


@settings(max_examples=15)
@given(small_translation(), forests(2, 4))
def test_M_transpose_matches_prelie(v, f):
    x = LinComb.basis(f)
    assert translate_M(F, v, x, check=False) == translate_M_prelie(F, v, x)


@given(small_translation(), forests(2, 2), forests(2, 2))
def test_M_star_morphism(v, a, b):
    M = DualTranslation(F, v)
    x, y = LinComb.basis(a), LinComb.basis(b)
    assert M(F.gl_product(x, y)) == F.truncate(F.gl_product(M(x), M(y)))


@given(small_translation(), trees(2, 2), trees(2, 2))
def test_M_graft_morphism(v, s, t):
    M = DualTranslation(F, v)
    x, y = LinComb.basis(Forest((s,))), LinComb.basis(Forest((t,)))
    assert M(F.graft(x, y)) == F.truncate(F.graft(M(x), M(y)))


@given(small_translation(), forests(2, 4), forests(2, 4))
def test_M_adjoint(v, f, g):
    lhs = pairing(DualTranslation(F, v)(LinComb.basis(f)), LinComb.basis(g))
    rhs = pairing(LinComb.basis(f), dual_translate_M(v, LinComb.basis(g)))
    assert lhs == rhs


@given(small_translation(special=True), forests(2, 4))
def test_special_form_fixes_zero_free_forests(v, f):
    if f.count_label(0):
        return
    assert translate_M_prelie(F, v, LinComb.basis(f)) == LinComb.basis(f)


@settings(max_examples=10)
@given(st.integers(-2, 2), st.integers(-2, 2))
def test_M_extends_T_on_words(a, b):
    A = TensorAlgebra(2, 4)
    wv = WordTranslation(2, {0: lie_bracket(A, letter(1), letter(2)) * a, 2: letter(1) * b})
    M = DualTranslation(F, iota_translation(F, wv))
    for word in A.words(3):
        x = LinComb.basis(word)
        lhs = M(F.embed_iota(x))
        rhs = F.truncate(F.embed_iota(A.translate(wv, x)))
        assert lhs == rhs


@given(small_translation(), small_translation(), forests(2, 4))
def test_dual_composition(v, u, f):
    # M_u^* M_v^* is again the dual of a translation only when entries commute;
    # here we check linearity in the argument instead
    y = LinComb.basis(f) * 2 + LinComb.basis(UNIT)
    assert dual_translate_M(v, y) == dual_translate_M(v, LinComb.basis(f)) * 2 + LinComb.basis(UNIT)
