from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from hopfpath.forest import ForestAlgebra
from hopfpath.freevec import LinComb
from hopfpath.rde import (
    FieldError,
    PolyVectorField,
    calibrate_euler_weights,
    elementary_differential,
    equivalence_experiment,
    euler_table,
    euler_weight,
    field_of_word,
    pre_lie_field,
    solve,
    translated_field,
)
from hopfpath.roughpath import lift_branched_piecewise_linear
from hopfpath.syntax import parse, parse_tree
from hopfpath.translation import TreeTranslation
from hopfpath.trees import Forest, symmetry_factor

from .strategies import trees

F2 = PolyVectorField.from_strings([["y2", "1"], ["y1*y2", "y1"], ["1 + y1**2", "y2**2"]])
ALG = ForestAlgebra(2, 3)


def Phi(f, x):
    out = [sp.Integer(0)] * f.e
    for key, c in x.raw_items():
        t = key.tree()
        vec = elementary_differential(f, t)
        wgt = sp.Rational(c.numerator, c.denominator) / symmetry_factor(t)
        out = [a + wgt * b for a, b in zip(out, vec)]
    return [sp.expand(a) for a in out]


def test_elementary_differentials_of_linear_field():
    f = PolyVectorField.from_strings([["y1"]])
    y = f.symbols()[0]
    assert elementary_differential(f, parse_tree("(0 (0 (0)))")) == [y]
    assert elementary_differential(f, parse_tree("(0 (0) (0))")) == [0]


def test_elementary_differential_cherry():
    f = PolyVectorField.from_strings([["y1**2"]])
    y = f.symbols()[0]
    # D^2 f (f, f) = 2 y^4
    assert elementary_differential(f, parse_tree("(0 (0) (0))")) == [2 * y**4]


def test_word_fields_are_vector_field_compositions():
    f = PolyVectorField.from_strings([["y2", "0"], ["0", "y1"]])
    y1, y2 = f.symbols()
    assert field_of_word(f, (0,)) == [y2, 0]
    assert field_of_word(f, (1, 0)) == [y1, 0]


def test_non_polynomial_rejected():
    with pytest.raises(FieldError):
        PolyVectorField.from_strings([["sin(y1)"]])
    with pytest.raises(FieldError):
        PolyVectorField.from_strings([["z"]])


@settings(max_examples=25)
@given(trees(2, 2), trees(2, 2))
def test_phi_is_prelie_morphism(s, t):
    if s.size + t.size > 3:
        return
    x, y = LinComb.basis(Forest((s,))), LinComb.basis(Forest((t,)))
    lhs = Phi(F2, ALG.graft(x, y))
    rhs = pre_lie_field(F2, Phi(F2, x), Phi(F2, y))
    assert [sp.expand(a - b) for a, b in zip(lhs, rhs)] == [0, 0]


def test_calibration_matches_committed_table():
    table = euler_table()
    assert calibrate_euler_weights(4) == {k: v for k, v in table.items() if parse_tree(k).size <= 4}


def test_euler_weight_uses_symmetry():
    assert euler_weight(parse_tree("(0 (1) (1))")) == Fraction(1, 2)
    assert euler_weight(parse_tree("(0 (1) (2))")) == Fraction(1, 1)


def test_zero_field_is_stationary():
    f = PolyVectorField.from_strings([["0"], ["0"], ["0"]])
    path = np.column_stack([np.linspace(0, 1, 5), np.sin(np.linspace(0, 1, 5)), np.cos(np.linspace(0, 1, 5))])
    X = lift_branched_piecewise_linear(path, 3)
    assert np.all(solve(f, X, [0.7], 3) == 0.7)


def test_exponential_step():
    f = PolyVectorField.from_strings([["y1"]])
    for h in (0.1, 0.05):
        X = lift_branched_piecewise_linear(np.array([[0.0], [h]]), 4)
        y = solve(f, X, [1.0], 4)[-1, 0]
        assert abs(y - np.exp(h)) < 2 * h**5 / 120


def test_zero_translation_gives_zero_discrepancy():
    path = np.column_stack([np.linspace(0, 1, 9), np.linspace(0, 1, 9) ** 2, np.sin(np.linspace(0, 3, 9))])
    X = lift_branched_piecewise_linear(path, 2)
    res = equivalence_experiment(F2, TreeTranslation.zero(2), X, [0.1, 0.2], 2)
    assert res.discrepancy == 0.0


def test_special_form_adds_drift_only():
    v = TreeTranslation(2, {0: parse("(2 (1))")})
    fv = translated_field(F2, v)
    assert fv.fields[1:] == F2.fields[1:]
    drift = elementary_differential(F2, parse_tree("(2 (1))"))
    assert [sp.expand(a - b - c) for a, b, c in zip(fv.fields[0], F2.fields[0], drift)] == [0, 0]


def test_equivalence_improves_under_refinement():
    f = PolyVectorField.from_strings([["0", "0"], ["y2", "1"], ["1", "y1"]])
    v = TreeTranslation(2, {0: parse("(2 (1))")})
    errs = []
    for m in (16, 32, 64):
        t = np.linspace(0, 1, m + 1)
        X = lift_branched_piecewise_linear(np.column_stack([t, np.sin(2 * t), np.cos(3 * t)]), 4)
        errs.append(equivalence_experiment(f, v, X, [0.3, -0.2], 2).discrepancy)
    assert errs[0] > errs[1] > errs[2]
