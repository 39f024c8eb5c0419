from fractions import Fraction

import pytest
from hypothesis import given

from hopfpath.bhz import ONE, I, Xi, phi
from hopfpath.freevec import LinComb
from hopfpath.syntax import (
    ParseError,
    format_forest,
    format_lincomb,
    format_symbol,
    format_tree,
    format_word,
    parse,
    parse_forest,
    parse_fraction,
    parse_symbol,
    parse_tree,
    parse_word,
    to_json_terms,
)
from hopfpath.tensor import Word, w
from hopfpath.trees import UNIT

from .strategies import forests, lincombs, trees, words


def test_word_forms():
    assert parse_word("e[0,1,2]") == w(0, 1, 2)
    assert parse_word("[]") == Word()
    assert format_word(Word()) == "[]"
    assert format_word(w(1, 2)) == "e[1,2]"


def test_forest_forms():
    assert format_forest(UNIT) == "1"
    assert format_forest(parse_forest("{(2) (1)}")) == "{(1) (2)}"
    assert parse_forest("(1 (2) (3))") == parse_forest("(1 (3) (2))")


def test_symbol_forms():
    assert parse_symbol("1") == ONE
    assert parse_symbol("Xi1") == Xi(1)
    assert format_symbol(I(ONE)) == "I(1)"
    assert parse_symbol("I()") == I(ONE)
    s = parse_symbol("I(Xi1)I(Xi2)Xi3")
    assert format_symbol(s) == "I(Xi1)I(Xi2)Xi3"
    assert s == phi(parse_tree("(3 (1) (2))"))


def test_coefficients():
    assert parse_fraction("3/4") == Fraction(3, 4)
    assert parse("0") == LinComb.zero()
    x = parse("e[1] + 2*e[2] - 3/2*e[1,2]")
    assert x == LinComb({w(1): 1, w(2): 2, w(1, 2): Fraction(-3, 2)})
    assert format_lincomb(x) == "e[1] + 2*e[2] - 3/2*e[1,2]"


def test_tensor_keys_ascii_alias():
    assert parse("e[1] & e[2]") == parse("e[1] ⊗ e[2]")


def test_json_terms():
    terms = to_json_terms(parse("2*e[1] - 1/3*e[2]"))
    assert terms == [{"key": "e[1]", "coef": "2"}, {"key": "e[2]", "coef": "-1/3"}]


@pytest.mark.parametrize("bad", ["(1 (2)", "e[1,", "2*", "e[1] +", "(x)", "{(1)"])
def test_parse_errors_point_at_position(bad):
    with pytest.raises(ParseError) as info:
        parse(bad)
    assert "^" in str(info.value)
    assert 0 <= info.value.pos <= len(bad)


@given(words(3, 5))
def test_word_round_trip(u):
    assert parse_word(format_word(u)) == u


@given(trees(3, 5))
def test_tree_round_trip(t):
    assert parse_tree(format_tree(t)) == t


@given(forests(2, 4))
def test_forest_round_trip(f):
    assert parse_forest(format_forest(f)) == f


@given(trees(3, 5))
def test_symbol_round_trip(t):
    s = phi(t)
    assert parse_symbol(format_symbol(s)) == s


@given(lincombs(forests(2, 3)))
def test_lincomb_round_trip_forests(x):
    assert parse(format_lincomb(x), "forest") == x


@given(lincombs(words(2, 3)))
def test_lincomb_round_trip_words(x):
    assert parse(format_lincomb(x), "word") == x
