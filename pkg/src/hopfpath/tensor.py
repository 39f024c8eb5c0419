"""Truncated tensor (concatenation) and shuffle Hopf algebras over R^{1+d}.

Words are :class:`Word` keys; letter 0 is the time direction.  Elements are
``LinComb`` objects over words of length at most ``N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Iterable, Sequence

from .freevec import Accumulator, LinComb, add, linear_extend, lsum, scale, tensor
from .monomial import Marked, Monomial


class Word(tuple):
    """A word ``e_{i1 ... ik}`` stored as a tuple of letters."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        return super().__new__(cls, tuple(int(a) for a in letters))

    @property
    def grade(self) -> int:
        return len(self)

    @property
    def sort_key(self):
        return (len(self), tuple(self))

    def count(self, letter: int) -> int:  # type: ignore[override]
        return tuple.count(self, letter)

    def __add__(self, other) -> "Word":
        return Word(tuple(self) + tuple(other))

    def __getitem__(self, item):
        r = tuple.__getitem__(self, item)
        return Word(r) if isinstance(item, slice) else r

    def __repr__(self) -> str:
        return "e[" + ",".join(map(str, self)) + "]"


EMPTY = Word()


def w(*letters: int) -> Word:
    return Word(letters)


def letter(i: int, coef=1) -> LinComb:
    return LinComb.basis(Word((i,)), coef)


class DimensionError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@lru_cache(maxsize=None)
def _shuffle_words(u: Word, v: Word) -> dict:
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out: dict = {}
    for ww, c in _shuffle_words(u[:-1], v).items():
        k = ww + u[-1:]
        out[k] = out.get(k, 0) + c
    for ww, c in _shuffle_words(u, v[:-1]).items():
        k = ww + v[-1:]
        out[k] = out.get(k, 0) + c
    return out


@lru_cache(maxsize=None)
def _unshuffle(word: Word) -> tuple:
    """Terms of the shuffle coproduct of a word: all position subsets."""
    n = len(word)
    out: dict = {}
    idx = range(n)
    for r in range(n + 1):
        for sel in combinations(idx, r):
            s = set(sel)
            left = Word(word[i] for i in sel)
            right = Word(word[i] for i in idx if i not in s)
            out[(left, right)] = out.get((left, right), 0) + 1
    return tuple(out.items())


@dataclass(frozen=True)
class TensorAlgebra:
    """The truncation T^N(R^{1+d}) with concatenation and shuffle structures."""

    d: int
    N: int

    def __post_init__(self):
        if self.d < 0 or self.N < 0:
            raise DimensionError("d and N must be non-negative")

    # basis
    def words(self, max_len: int | None = None) -> list[Word]:
        m = self.N if max_len is None else max_len
        return [Word(p) for k in range(m + 1) for p in product(range(self.d + 1), repeat=k)]

    def check(self, x: LinComb) -> LinComb:
        for k in x.as_dict():
            if not isinstance(k, Word):
                raise DimensionError(f"{k!r} is not a word")
            if len(k) > self.N:
                raise DimensionError(f"word {k!r} exceeds truncation {self.N}")
            if any(a < 0 or a > self.d for a in k):
                raise DimensionError(f"word {k!r} has a letter outside 0..{self.d}")
        return x

    def truncate(self, x: LinComb) -> LinComb:
        return x.filter(lambda k: len(k) <= self.N)

    def unit(self) -> LinComb:
        return LinComb.basis(EMPTY)

    # products
    def concat(self, a: LinComb, b: LinComb) -> LinComb:
        acc = Accumulator()
        for u, cu in a.raw_items():
            for v, cv in b.raw_items():
                if len(u) + len(v) <= self.N:
                    acc.add(u + v, cu * cv)
        return acc.build()

    def shuffle(self, a: LinComb, b: LinComb) -> LinComb:
        acc = Accumulator()
        for u, cu in a.raw_items():
            for v, cv in b.raw_items():
                if len(u) + len(v) <= self.N:
                    for ww, c in _shuffle_words(u, v).items():
                        acc.add(ww, cu * cv * c)
        return acc.build()

    # coproducts
    @staticmethod
    def deconcat_coproduct(word: Word) -> LinComb:
        return LinComb(((word[:i], word[i:]), 1) for i in range(len(word) + 1))

    def deconcat(self, x: LinComb) -> LinComb:
        return linear_extend(self.deconcat_coproduct, x)

    def shuffle_coproduct(self, x: LinComb) -> LinComb:
        acc = Accumulator()
        for word, c in x.raw_items():
            for pair, m in _unshuffle(word):
                acc.add(pair, c * m)
        return acc.build()

    def antipode(self, x: LinComb) -> LinComb:
        return LinComb((Word(reversed(k)), c * (-1) ** len(k)) for k, c in x.raw_items())

    def counit(self, x: LinComb) -> Fraction:
        return x[EMPTY]

    # series
    def exp(self, x: LinComb) -> LinComb:
        if x[EMPTY]:
            raise PreconditionError("exp needs zero constant term")
        result = self.unit()
        term = self.unit()
        for k in range(1, self.N + 1):
            term = scale(self.concat(term, x), Fraction(1, k))
            if not term:
                break
            result = result + term
        return result

    def log(self, g: LinComb) -> LinComb:
        if g[EMPTY] != 1:
            raise PreconditionError("log needs constant term 1")
        y = g - self.unit()
        result = LinComb.zero()
        power = self.unit()
        for k in range(1, self.N + 1):
            power = self.concat(power, y)
            if not power:
                break
            result = result + scale(power, Fraction((-1) ** (k + 1), k))
        return result

    def _pairs_le_N(self, x: LinComb) -> LinComb:
        return x.filter(lambda p: len(p[0]) + len(p[1]) <= self.N)

    def is_grouplike(self, g: LinComb) -> bool:
        if g[EMPTY] != 1:
            return False
        return self.shuffle_coproduct(g) == self._pairs_le_N(tensor(g, g))

    def is_primitive(self, x: LinComb) -> bool:
        one = self.unit()
        return self.shuffle_coproduct(x) == tensor(x, one) + tensor(one, x)

    # translation
    def translate(self, v: "WordTranslation", x: LinComb) -> LinComb:
        """T_v: the concatenation morphism e_i -> e_i + v_i."""
        v.check_primitive(self)
        images = [letter(i) + v.entry(i) for i in range(self.d + 1)]
        cache: dict[Word, LinComb] = {EMPTY: self.unit()}

        def img(word: Word) -> LinComb:
            r = cache.get(word)
            if r is None:
                r = self.concat(img(word[:-1]), images[word[-1]])
                cache[word] = r
            return r

        return linear_extend(img, self.check(x))

    def dual_translate(self, v: "WordTranslation", y: LinComb) -> LinComb:
        """T_v^*: the character of v on the left leg of the extraction map."""
        acc = Accumulator()
        labels = v.support()
        for word, c in self.check(y).raw_items():
            for (mono, rem), m in extraction_S(word, labels).raw_items():
                val = v.character(mono)
                if val:
                    acc.add(rem, c * m * val)
        return acc.build()


class WordTranslation:
    """Translation vector v = (v_0, ..., v_d) of Lie polynomials."""

    def __init__(self, d: int, entries: dict[int, LinComb] | Sequence[LinComb]):
        self.d = d
        if not isinstance(entries, dict):
            entries = dict(enumerate(entries))
        for i in entries:
            if not 0 <= i <= d:
                raise DimensionError(f"translation label {i} outside 0..{d}")
        self.entries = {i: e for i, e in entries.items() if e}
        self._checked = False

    @property
    def special_form(self) -> bool:
        return set(self.entries) <= {0}

    def entry(self, i: int) -> LinComb:
        return self.entries.get(i, LinComb.zero())

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.entries))

    def max_grade(self) -> int:
        return max((e.max_grade() for e in self.entries.values()), default=0)

    def check_primitive(self, alg: TensorAlgebra) -> None:
        if self._checked:
            return
        for i, e in self.entries.items():
            if not alg.is_primitive(e):
                raise PreconditionError(f"v_{i} is not primitive")
        self._checked = True

    def character(self, mono: Monomial) -> Fraction:
        val = Fraction(1)
        for m in mono.factors:
            val *= self.entry(m.label)[m.item]
            if not val:
                return val
        return val

    def __add__(self, other: "WordTranslation") -> "WordTranslation":
        keys = set(self.entries) | set(other.entries)
        return WordTranslation(self.d, {i: self.entry(i) + other.entry(i) for i in keys})

    def __eq__(self, other) -> bool:
        return isinstance(other, WordTranslation) and self.d == other.d and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.d, tuple(sorted((i, e) for i, e in self.entries.items()))))

    def __repr__(self) -> str:
        return f"WordTranslation(d={self.d}, {self.entries!r})"


@lru_cache(maxsize=None)
def _extractions(word: Word, labels: tuple[int, ...]) -> tuple:
    """All (extracted factors, remainder) pairs for disjoint contiguous factors."""
    n = len(word)

    @lru_cache(maxsize=None)
    def rec(p: int) -> tuple:
        if p == n:
            return (((), ()),)
        out = []
        for ext, rem in rec(p + 1):
            out.append((ext, (word[p],) + rem))
        for q in range(p + 1, n + 1):
            factor = word[p:q]
            for ext, rem in rec(q):
                for lab in labels:
                    out.append(((Marked(factor, lab),) + ext, (lab,) + rem))
        return tuple(out)

    return rec(0)


def extraction_S(word: Word, labels: Sequence[int] = (0,)) -> LinComb:
    """The extraction map S on a word.

    Each term selects disjoint non-empty contiguous factors, marks each with a
    label and replaces it by that label letter in the remainder.  With
    ``labels=(0,)`` this is the plain map whose left legs are products of
    subwords and whose remainders carry the letter 0.
    """
    acc = Accumulator()
    for ext, rem in _extractions(Word(word), tuple(sorted(set(labels)))):
        acc.add((Monomial(ext), Word(rem)), 1)
    return acc.build()


def lie_bracket(alg: TensorAlgebra, a: LinComb, b: LinComb) -> LinComb:
    return alg.concat(a, b) - alg.concat(b, a)


__all__ = [
    "Word",
    "EMPTY",
    "w",
    "letter",
    "TensorAlgebra",
    "WordTranslation",
    "extraction_S",
    "lie_bracket",
    "DimensionError",
    "PreconditionError",
    "add",
    "lsum",
]
