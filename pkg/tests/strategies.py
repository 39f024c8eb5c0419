"""Hypothesis strategies for exact algebra elements."""

from fractions import Fraction

from hypothesis import strategies as st

from hopfpath.freevec import LinComb
from hopfpath.tensor import Word
from hopfpath.trees import Forest, forests_up_to, trees_up_to

fractions = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


def words(d: int, max_len: int):
    return st.lists(st.integers(0, d), max_size=max_len).map(Word)


def trees(d: int, max_nodes: int):
    return st.sampled_from(trees_up_to(max_nodes, d))


def forests(d: int, max_nodes: int):
    return st.sampled_from(forests_up_to(max_nodes, d))


def lincombs(keys, max_terms: int = 4):
    return st.lists(st.tuples(keys, fractions), max_size=max_terms).map(LinComb)


def tree_series(d: int, max_nodes: int, max_terms: int = 3):
    return lincombs(trees(d, max_nodes).map(lambda t: Forest((t,))), max_terms)
