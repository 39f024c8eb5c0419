import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hopfpath.freevec import LinComb
from hopfpath.roughpath import (
    TraceError,
    brownian_lift,
    chen_defect,
    grouplike_defect,
    holder_norm,
    lift_branched_piecewise_linear,
    lift_branched_via_iota,
    lift_piecewise_linear,
    mixed_norm,
    translate_trace,
)
from hopfpath.syntax import parse
from hopfpath.tensor import TensorAlgebra, WordTranslation, letter, lie_bracket, w
from hopfpath.translation import TreeTranslation, dual_translate_M
from hopfpath.trees import Forest


def random_path(seed, m=5, d=2):
    rng = np.random.default_rng(seed)
    grid = np.linspace(0.0, 1.0, m + 1)
    walk = np.cumsum(np.vstack([np.zeros(d), rng.standard_normal((m, d))]), axis=0)
    return np.column_stack([grid, walk])


seeds = st.integers(0, 10_000)


@given(seeds)
def test_geometric_lift_is_chen_and_grouplike(seed):
    X = lift_piecewise_linear(random_path(seed), 3, pairs="all")
    assert chen_defect(X) < 1e-10
    assert grouplike_defect(X) < 1e-10


@given(seeds)
def test_branched_lift_is_chen(seed):
    X = lift_branched_piecewise_linear(random_path(seed), 3, pairs="all")
    assert chen_defect(X) < 1e-10


@given(seeds)
def test_branched_lift_equals_iota_of_signature(seed):
    path = random_path(seed)
    a = lift_branched_piecewise_linear(path, 3, pairs="all")
    b = lift_branched_via_iota(lift_piecewise_linear(path, 3, pairs="all"))
    for p in a.pairs():
        assert np.allclose(a.pair(*p), b.pair(*p), atol=1e-12)


def test_single_segment_signature():
    path = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, -1.0]])
    X = lift_piecewise_linear(path, 2)
    assert X.coefficient(0, 1, w(1)) == pytest.approx(2.0)
    assert X.coefficient(0, 1, w(1, 2)) == pytest.approx(-1.0)
    assert X.coefficient(0, 1, w(1, 1)) == pytest.approx(2.0)


def test_translate_zero_is_identity():
    X = lift_branched_piecewise_linear(random_path(1), 3, pairs="all")
    Y = translate_trace(TreeTranslation.zero(2), X)
    for p in X.pairs():
        assert np.allclose(X.pair(*p), Y.pair(*p))


def test_translated_trace_is_still_chen():
    v = TreeTranslation(2, {0: parse("(2 (1))"), 1: parse("1/2*(2)")})
    X = lift_branched_piecewise_linear(random_path(3), 4, pairs="all")
    assert chen_defect(translate_trace(v, X)) < 1e-9
    A = TensorAlgebra(2, 3)
    g = lift_piecewise_linear(random_path(3), 3, pairs="all")
    wv = WordTranslation(2, {0: lie_bracket(A, letter(1), letter(2))})
    Tg = translate_trace(wv, g)
    assert chen_defect(Tg) < 1e-9
    assert grouplike_defect(Tg) < 1e-9


def test_translate_trace_matches_dual_operator():
    v = TreeTranslation(2, {0: parse("(2 (1))")})
    X = lift_branched_piecewise_linear(random_path(4), 3)
    Y = translate_trace(v, X)
    t = Forest((parse("(0 (1))").keys()[0].tree(),))
    expected = sum(c * X.coefficient(0, 1, f) for f, c in dual_translate_M(v, LinComb.basis(t)).raw_items())
    assert Y.coefficient(0, 1, t) == pytest.approx(expected)


def test_level_shortfall():
    X = lift_branched_piecewise_linear(random_path(0), 2)
    with pytest.raises(TraceError):
        translate_trace(TreeTranslation.zero(2), X, level=3)


def test_ito_and_strat_agree_on_single_nodes():
    grid = np.linspace(0, 1, 33)
    a = brownian_lift(5, grid, 1, "ito")
    b = brownian_lift(5, grid, 1, "strat")
    t = parse("(1)").keys()[0]
    assert a.coefficient(0, 32, t) == pytest.approx(b.coefficient(0, 32, t))


def test_norms_of_linear_path():
    path = np.column_stack([np.linspace(0, 1, 9), np.linspace(0, 1, 9)])
    X = lift_branched_piecewise_linear(path, 2, pairs="all")
    # the driver is t -> (t, t); every ratio is bounded by a constant
    assert holder_norm(X, 0.5) <= 1.0 + 1e-12
    assert mixed_norm(X, 0.5) <= 1.0 + 1e-12


def test_to_json_is_valid():
    X = lift_piecewise_linear(random_path(2, m=2), 2)
    data = json.loads(X.to_json())
    assert data
