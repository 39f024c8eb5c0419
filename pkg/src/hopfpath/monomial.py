"""Free commutative monomials and label markings used as left legs of extraction maps."""

from __future__ import annotations

from typing import Hashable, Iterable

from .freevec import sort_key


class Marked:
    """A generator ``item`` marked by a replacement label, written ``(item)_label``."""

    __slots__ = ("item", "label", "_hash", "sort_key")

    def __init__(self, item: Hashable, label: int):
        self.item = item
        self.label = label
        self._hash = hash(("Marked", item, label))
        isk = sort_key(item)
        self.sort_key = (isk[0], (isk, label))

    @property
    def grade(self) -> int:
        return self.sort_key[0]

    def __eq__(self, other) -> bool:
        return isinstance(other, Marked) and self.label == other.label and self.item == other.item

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Marked({self.item!r}, {self.label})"


class Monomial:
    """Element of a free commutative monoid: a sorted multiset of generators."""

    __slots__ = ("factors", "_hash", "sort_key")

    def __init__(self, factors: Iterable[Hashable] = ()):
        fs = tuple(sorted(factors, key=sort_key))
        self.factors = fs
        self._hash = hash(("Monomial", fs))
        sks = tuple(sort_key(f) for f in fs)
        self.sort_key = (sum(s[0] for s in sks), (len(fs), sks))

    @property
    def grade(self) -> int:
        return self.sort_key[0]

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.factors + other.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __eq__(self, other) -> bool:
        return isinstance(other, Monomial) and self.factors == other.factors

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return "Monomial(" + ", ".join(map(repr, self.factors)) + ")"


ONE = Monomial()
