"""Translations of rough paths: exact Hopf-algebraic kernels and float trace numerics."""

from .freevec import LinComb
from .tensor import TensorAlgebra, Word, WordTranslation
from .trees import Forest, LabeledTree
from .forest import ForestAlgebra
from .translation import TreeTranslation, translate_M, dual_translate_M
from .syntax import format_lincomb, parse

__all__ = [
    "LinComb",
    "TensorAlgebra",
    "Word",
    "WordTranslation",
    "Forest",
    "LabeledTree",
    "ForestAlgebra",
    "TreeTranslation",
    "translate_M",
    "dual_translate_M",
    "format_lincomb",
    "parse",
]

__version__ = "0.1.0"
