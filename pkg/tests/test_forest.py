from fractions import Fraction

from hypothesis import given

from hopfpath.freevec import LinComb
from hopfpath.forest import ForestAlgebra
from hopfpath.suites import antipode_ok, coassociative, counital
from hopfpath.syntax import parse, parse_forest
from hopfpath.trees import UNIT, Forest, symmetry_factor, trees_of_size

from .strategies import forests, trees

F = ForestAlgebra(d=2, N=4)


def P(text):
    return parse(text)


def pair(a, b):
    return (parse_forest(a), parse_forest(b))


def test_ck_golden_chain():
    # pruned part on the left, trunk on the right
    expected = LinComb({pair("1", "(1 (2))"): 1, pair("(2)", "(1)"): 1, pair("(1 (2))", "1"): 1})
    assert F.ck(P("(1 (2))")) == expected


def test_ck_golden_cherry():
    got = F.ck(P("(0 (1) (2))"))
    expected = LinComb(
        {
            pair("1", "(0 (1) (2))"): 1,
            pair("(1)", "(0 (2))"): 1,
            pair("(2)", "(0 (1))"): 1,
            pair("{(1) (2)}", "(0)"): 1,
            pair("(0 (1) (2))", "1"): 1,
        }
    )
    assert got == expected


def test_gl_golden():
    assert F.gl_product(P("(1)"), P("(2 (1))")) == P("2*(2 (1) (1)) + (2 (1 (1))) + {(1) (2 (1))}")


def test_graft_counts_single_cuts():
    assert F.graft(P("(1)"), P("(2 (1))")) == P("2*(2 (1) (1)) + (2 (1 (1)))")
    assert F.graft(P("(1)"), P("(2)")) == P("(2 (1))")


def test_graft_adjoint_golden():
    assert F.graft_adjoint(P("(2 (1) (1))")) == LinComb({pair("(1)", "(2 (1))"): 2})


def test_odot_golden():
    got = F.odot_coproduct(P("{(1) (1) (2)}"))
    assert got == P("1 ⊗ {(1) (1) (2)} + (1) ⊗ {(1) (2)} + (2) ⊗ {(1) (1)} + {(1) (1)} ⊗ (2) + {(1) (2)} ⊗ (1) + {(1) (1) (2)} ⊗ 1")


def test_antipodes_golden():
    assert F.ck_antipode(P("(1 (2))")) == P("-(1 (2)) + {(1) (2)}")
    assert F.gl_antipode(P("(1 (2))")) == P("-(1 (2))")


def test_embedding_of_words():
    assert F.embed_iota(P("e[1,2]")) == P("(2 (1)) + {(1) (2)}")
    assert F.project_linear(F.embed_iota(P("e[1,2]"))) == P("e[1,2]")


def test_tree_counts():
    # rooted unlabelled trees: 1, 1, 2, 4, 9
    assert [len(trees_of_size(n, 0)) for n in range(1, 6)] == [1, 1, 2, 4, 9]


def test_symmetry_factor():
    assert symmetry_factor(parse_forest("(0 (1) (1))").tree()) == 2
    assert symmetry_factor(parse_forest("(0 (1) (2))").tree()) == 1
    assert symmetry_factor(parse_forest("(0 (0 (0)) (0 (0)))").tree()) == 2
    assert symmetry_factor(parse_forest("(0 (0 (0) (0)) (0 (0) (0)))").tree()) == 8


@given(forests(2, 4))
def test_ck_coassociative_counital(f):
    x = LinComb.basis(f)
    assert coassociative(F.ck, x)
    assert counital(F.ck, UNIT, x)


@given(forests(2, 4))
def test_ck_antipode(f):
    assert antipode_ok(F.ck, F.forest_product, F.ck_antipode, F.unit(), F.counit, LinComb.basis(f))


@given(forests(2, 4))
def test_gl_antipode(f):
    assert antipode_ok(F.odot_coproduct, F.gl_product, F.gl_antipode, F.unit(), F.counit, LinComb.basis(f))


@given(forests(2, 2), forests(2, 2), forests(2, 4))
def test_star_dual_to_ck(a, b, f):
    # <a ⋆ b, f> = <a ⊗ b, Δ f>
    if a.size + b.size > F.N:
        return
    lhs = F.gl_product(LinComb.basis(a), LinComb.basis(b))[f]
    assert lhs == F.ck(LinComb.basis(f))[(a, b)]


@given(forests(2, 2), forests(2, 2), forests(2, 4))
def test_forest_product_dual_to_odot(a, b, f):
    lhs = F.forest_product(LinComb.basis(a), LinComb.basis(b))[f]
    assert lhs == F.odot_coproduct(LinComb.basis(f))[(a, b)]


@given(trees(2, 2), trees(2, 2), trees(2, 1))
def test_prelie_identity(s, t, u):
    x, y, z = (LinComb.basis(Forest((q,))) for q in (s, t, u))
    assoc = lambda a, b, c: F.graft(F.graft(a, b), c) - F.graft(a, F.graft(b, c))
    assert assoc(x, y, z) == assoc(y, x, z)


@given(trees(2, 2), trees(2, 2))
def test_gl_tree_part_is_graft(s, t):
    x, y = LinComb.basis(Forest((s,))), LinComb.basis(Forest((t,)))
    assert F.gl_product(x, y).filter(lambda f: f.is_tree) == F.graft(x, y)


@given(forests(2, 4))
def test_exp_log_star(f):
    if f == UNIT or not f.is_tree:
        return
    x = LinComb.basis(f) * Fraction(1, 2)
    g = F.exp_star(x)
    assert F.is_grouplike_star(g)
    assert F.log_star(g) == x
