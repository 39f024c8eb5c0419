"""Labelled unordered rooted trees and forests in canonical form."""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from math import factorial
from typing import Iterable, Sequence


class LabeledTree:
    """Rooted tree ``[c_1 ... c_n]_{label}`` with children sorted canonically."""

    __slots__ = ("label", "children", "size", "sort_key", "_hash")

    def __init__(self, label: int, children: Iterable["LabeledTree"] = ()):
        ch = tuple(sorted(children, key=_sk))
        self.label = int(label)
        self.children = ch
        self.size = 1 + sum(c.size for c in ch)
        self.sort_key = (self.size, (self.label, tuple(c.sort_key for c in ch)))
        self._hash = hash(self.sort_key)

    @property
    def grade(self) -> int:
        return self.size

    def __eq__(self, other) -> bool:
        return isinstance(other, LabeledTree) and self._hash == other._hash and self.sort_key == other.sort_key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.children:
            return f"({self.label})"
        return f"({self.label} " + " ".join(map(repr, self.children)) + ")"

    def count_label(self, label: int) -> int:
        return (self.label == label) + sum(c.count_label(label) for c in self.children)

    def labels(self) -> list[int]:
        out = [self.label]
        for c in self.children:
            out.extend(c.labels())
        return out

    def max_label(self) -> int:
        return max(self.labels())

    def is_linear(self) -> bool:
        return len(self.children) == 0 or (len(self.children) == 1 and self.children[0].is_linear())


def _sk(t: LabeledTree):
    return t.sort_key


def node(i: int) -> LabeledTree:
    return LabeledTree(i)


def b_plus(children: Iterable[LabeledTree], label: int, d: int | None = None) -> LabeledTree:
    """Graft ``children`` onto a new root labelled ``label``."""
    if label < 0 or (d is not None and label > d):
        raise ValueError(f"label {label} out of range")
    return LabeledTree(label, children)


class Forest:
    """Multiset of trees; the empty forest is the unit."""

    __slots__ = ("trees", "size", "sort_key", "_hash")

    def __init__(self, trees: Iterable[LabeledTree] = ()):
        ts = tuple(sorted(trees, key=_sk))
        self.trees = ts
        self.size = sum(t.size for t in ts)
        self.sort_key = (self.size, (len(ts), tuple(t.sort_key for t in ts)))
        self._hash = hash(("F",) + self.sort_key)

    @property
    def grade(self) -> int:
        return self.size

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self):
        return iter(self.trees)

    def __mul__(self, other: "Forest") -> "Forest":
        return Forest(self.trees + other.trees)

    def __eq__(self, other) -> bool:
        return isinstance(other, Forest) and self._hash == other._hash and self.sort_key == other.sort_key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        if not self.trees:
            return "1"
        if len(self.trees) == 1:
            return repr(self.trees[0])
        return "{" + " ".join(map(repr, self.trees)) + "}"

    @property
    def is_tree(self) -> bool:
        return len(self.trees) == 1

    def tree(self) -> LabeledTree:
        if len(self.trees) != 1:
            raise ValueError(f"{self!r} is not a single tree")
        return self.trees[0]

    def count_label(self, label: int) -> int:
        return sum(t.count_label(label) for t in self.trees)

    def multiplicities(self) -> dict[LabeledTree, int]:
        out: dict = {}
        for t in self.trees:
            out[t] = out.get(t, 0) + 1
        return out


UNIT = Forest()


def as_forest(t: LabeledTree | Forest) -> Forest:
    return t if isinstance(t, Forest) else Forest((t,))


# --- node arrays -------------------------------------------------------------


@lru_cache(maxsize=None)
def tree_nodes(t: LabeledTree) -> tuple[tuple[int, ...], tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Preorder arrays (labels, parents, children); the root is node 0 with parent -1."""
    labels: list[int] = []
    parents: list[int] = []
    children: list[list[int]] = []

    def visit(s: LabeledTree, parent: int) -> None:
        idx = len(labels)
        labels.append(s.label)
        parents.append(parent)
        children.append([])
        if parent >= 0:
            children[parent].append(idx)
        for c in s.children:
            visit(c, idx)

    visit(t, -1)
    return tuple(labels), tuple(parents), tuple(tuple(c) for c in children)


def build_from_nodes(labels: Sequence[int], children: Sequence[Sequence[int]], root: int) -> LabeledTree:
    return LabeledTree(labels[root], (build_from_nodes(labels, children, c) for c in children[root]))


def forest_from_parents(labels: Sequence[int], parents: Sequence[int]) -> Forest:
    """Canonical forest from a parent array (parent -1 marks a root)."""
    ch: list[list[int]] = [[] for _ in labels]
    roots = []
    for i, p in enumerate(parents):
        if p < 0:
            roots.append(i)
        else:
            ch[p].append(i)
    return Forest(build_from_nodes(labels, ch, r) for r in roots)


# --- combinatorics -------------------------------------------------------------


def symmetry_factor(t: LabeledTree) -> int:
    """Order of the automorphism group of a labelled tree."""
    out = 1
    counts: dict = {}
    for c in t.children:
        counts[c] = counts.get(c, 0) + 1
    for c, m in counts.items():
        out *= factorial(m) * symmetry_factor(c) ** m
    return out


def forest_symmetry(f: Forest) -> int:
    out = 1
    for t, m in f.multiplicities().items():
        out *= factorial(m) * symmetry_factor(t) ** m
    return out


def tree_factorial(t: LabeledTree) -> int:
    out = t.size
    for c in t.children:
        out *= tree_factorial(c)
    return out


def shape(t: LabeledTree) -> LabeledTree:
    """The unlabelled shape (all labels set to 0)."""
    return LabeledTree(0, (shape(c) for c in t.children))


@lru_cache(maxsize=None)
def trees_of_size(n: int, d: int) -> tuple[LabeledTree, ...]:
    """All trees with ``n`` nodes and labels in 0..d, canonically ordered."""
    if n <= 0:
        return ()
    out = {LabeledTree(i, f.trees) for i in range(d + 1) for f in forests_of_size(n - 1, d)}
    return tuple(sorted(out, key=_sk))


@lru_cache(maxsize=None)
def forests_of_size(n: int, d: int) -> tuple[Forest, ...]:
    if n == 0:
        return (UNIT,)
    out: set[Forest] = set()
    for k in range(1, n + 1):
        for t in trees_of_size(k, d):
            for f in forests_of_size(n - k, d):
                # keep t as the largest tree to limit duplicates
                if f.trees and f.trees[-1].sort_key > t.sort_key:
                    continue
                out.add(Forest(f.trees + (t,)))
    return tuple(sorted(out, key=lambda f: f.sort_key))


def trees_up_to(n: int, d: int) -> list[LabeledTree]:
    return [t for k in range(1, n + 1) for t in trees_of_size(k, d)]


def forests_up_to(n: int, d: int) -> list[Forest]:
    return [f for k in range(n + 1) for f in forests_of_size(k, d)]


def linear_tree(word: Sequence[int]) -> LabeledTree:
    """Linear tree for a word: first letter is the leaf, last letter the root."""
    if not word:
        raise ValueError("empty word has no linear tree")
    t = LabeledTree(word[0])
    for a in word[1:]:
        t = LabeledTree(a, (t,))
    return t


def linear_word(t: LabeledTree) -> tuple[int, ...]:
    if not t.is_linear():
        raise ValueError(f"{t!r} is not linear")
    out = []
    s = t
    while True:
        out.append(s.label)
        if not s.children:
            break
        s = s.children[0]
    return tuple(reversed(out))


def all_labelings(shape_tree: LabeledTree, d: int) -> set[LabeledTree]:
    labels, parents, _ = tree_nodes(shape_tree)
    return {forest_from_parents(lab, parents).tree() for lab in product(range(d + 1), repeat=len(labels))}
