"""Exact sparse linear combinations over canonically ordered basis keys.

Every algebra element in the package is a :class:`LinComb`, a finitely
supported map from a hashable basis key to a :class:`fractions.Fraction`.
Coproduct values are ``LinComb`` objects whose keys are 2-tuples of keys.
Pairing is basis-delta: ``<k, k'> = 1`` iff ``k == k'``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Coefficient = Fraction | int


def sort_key(key: Hashable):
    """Total order on keys: (grade, canonical encoding).

    Key types define ``sort_key``; plain tuples are treated as tensor pairs.
    """
    sk = getattr(key, "sort_key", None)
    if sk is not None:
        return sk
    if isinstance(key, tuple):
        inner = tuple(sort_key(k) for k in key)
        return (sum(s[0] for s in inner), inner)
    raise TypeError(f"key {key!r} has no canonical order")


def as_fraction(c: Coefficient | str) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("float coefficients are not allowed in the exact layer")
    return Fraction(c)


class LinComb:
    """Immutable sparse linear combination with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Hashable, Coefficient] | Iterable[tuple[Hashable, Coefficient]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Hashable, Fraction] = {}
        for k, c in items:
            c = as_fraction(c)
            if c:
                acc[k] = acc.get(k, 0) + c
        self._terms = {k: c for k, c in acc.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "LinComb":
        out = cls.__new__(cls)
        out._terms = terms
        out._hash = None
        return out

    @classmethod
    def basis(cls, key: Hashable, coef: Coefficient = 1) -> "LinComb":
        return cls({key: coef})

    @classmethod
    def zero(cls) -> "LinComb":
        return cls._raw({})

    # mapping interface
    def __getitem__(self, key: Hashable) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def coefficient(self, key: Hashable) -> Fraction:
        return self[key]

    def __contains__(self, key: Hashable) -> bool:
        return key in self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Hashable]:
        return iter(self.keys())

    def __bool__(self) -> bool:
        return bool(self._terms)

    def keys(self) -> list:
        return sorted(self._terms, key=sort_key)

    def items(self) -> list[tuple[Hashable, Fraction]]:
        return [(k, self._terms[k]) for k in self.keys()]

    def raw_items(self):
        """Unordered items; use when order does not matter."""
        return self._terms.items()

    def as_dict(self) -> dict:
        return dict(self._terms)

    # vector space
    def __add__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other: "LinComb") -> "LinComb":
        if not isinstance(other, LinComb):
            return NotImplemented
        return add(self, other, -1)

    def __neg__(self) -> "LinComb":
        return LinComb._raw({k: -c for k, c in self._terms.items()})

    def __mul__(self, scalar: Coefficient) -> "LinComb":
        if isinstance(scalar, LinComb):
            return NotImplemented
        return scale(self, scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar: Coefficient) -> "LinComb":
        return scale(self, 1 / as_fraction(scalar))

    def __eq__(self, other) -> bool:
        if isinstance(other, LinComb):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return "LinComb(0)"
        body = " + ".join(f"{c}*{k!r}" for k, c in self.items())
        return f"LinComb({body})"

    # helpers
    def map_keys(self, f: Callable[[Hashable], Hashable]) -> "LinComb":
        return LinComb((f(k), c) for k, c in self._terms.items())

    def filter(self, pred: Callable[[Hashable], bool]) -> "LinComb":
        return LinComb._raw({k: c for k, c in self._terms.items() if pred(k)})

    def max_grade(self) -> int:
        return max((sort_key(k)[0] for k in self._terms), default=0)


def add(a: LinComb, b: LinComb, sign: Coefficient = 1) -> LinComb:
    """Coefficient-wise ``a + sign*b`` with zero terms dropped."""
    out = dict(a._terms)
    s = as_fraction(sign)
    for k, c in b._terms.items():
        v = out.get(k, 0) + s * c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return LinComb._raw(out)


def scale(a: LinComb, scalar: Coefficient) -> LinComb:
    s = as_fraction(scalar)
    if not s:
        return LinComb.zero()
    return LinComb._raw({k: s * c for k, c in a._terms.items()})


def lsum(parts: Iterable[LinComb]) -> LinComb:
    acc: dict = {}
    for p in parts:
        for k, c in p._terms.items():
            acc[k] = acc.get(k, 0) + c
    return LinComb._raw({k: c for k, c in acc.items() if c})


class Accumulator:
    """Mutable builder for a LinComb."""

    __slots__ = ("terms",)

    def __init__(self):
        self.terms: dict = {}

    def add(self, key: Hashable, coef: Coefficient) -> None:
        if coef:
            self.terms[key] = self.terms.get(key, 0) + coef

    def add_lincomb(self, x: LinComb, coef: Coefficient = 1) -> None:
        for k, c in x._terms.items():
            self.add(k, coef * c)

    def build(self) -> LinComb:
        return LinComb._raw({k: Fraction(c) for k, c in self.terms.items() if c})


def linear_extend(f: Callable[[Hashable], LinComb], a: LinComb) -> LinComb:
    """Apply a basis map linearly."""
    acc = Accumulator()
    for k, c in a._terms.items():
        acc.add_lincomb(f(k), c)
    return acc.build()


def bilinear_extend(f: Callable[[Hashable, Hashable], LinComb], a: LinComb, b: LinComb) -> LinComb:
    """``sum_ij a_i b_j f(k_i, k_j)``."""
    acc = Accumulator()
    for ka, ca in a._terms.items():
        for kb, cb in b._terms.items():
            acc.add_lincomb(f(ka, kb), ca * cb)
    return acc.build()


def tensor(a: LinComb, b: LinComb) -> LinComb:
    """Elementary tensor ``a (x) b`` as a LinComb over key pairs."""
    return LinComb._raw({(ka, kb): ca * cb for ka, ca in a._terms.items() for kb, cb in b._terms.items()})


def tensor_map(f: Callable[[Hashable], LinComb], g: Callable[[Hashable], LinComb], x: LinComb) -> LinComb:
    """``(f (x) g)`` applied to a tensor-square combination."""
    acc = Accumulator()
    for (k1, k2), c in x._terms.items():
        fa = f(k1)
        if not fa:
            continue
        gb = g(k2)
        for a, ca in fa._terms.items():
            for b, cb in gb._terms.items():
                acc.add((a, b), c * ca * cb)
    return acc.build()


def pairing(a: LinComb, b: LinComb) -> Fraction:
    """Basis-delta pairing."""
    if len(a) > len(b):
        a, b = b, a
    return sum((c * b[k] for k, c in a._terms.items()), Fraction(0))


class TransposeError(ValueError):
    pass


def matrix_of(op: Callable[[LinComb], LinComb], basis: Sequence[Hashable]) -> dict:
    """Sparse column map ``{key: op(key)}`` checked to stay inside ``basis``."""
    members = set(basis)
    cols = {}
    for k in basis:
        img = op(LinComb.basis(k))
        for j in img._terms:
            if j not in members:
                raise TransposeError(f"image of {k!r} leaves the basis at {j!r}")
        cols[k] = img
    return cols


def transpose_on_truncation(op: Callable[[LinComb], LinComb], basis: Sequence[Hashable]) -> Callable[[LinComb], LinComb]:
    """Transpose of ``op`` with respect to the basis-delta pairing on ``basis``."""
    cols = matrix_of(op, basis)
    rows: dict = {k: {} for k in basis}
    for k, img in cols.items():
        for j, c in img._terms.items():
            rows[j][k] = c
    members = set(basis)
    tcols = {j: LinComb._raw(r) for j, r in rows.items()}

    def transposed(x: LinComb) -> LinComb:
        acc = Accumulator()
        for k, c in x._terms.items():
            if k not in members:
                raise TransposeError(f"{k!r} is outside the truncated basis")
            acc.add_lincomb(tcols[k], c)
        return acc.build()

    return transposed
