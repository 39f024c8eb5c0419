"""Branched translation M_v, the extraction-contraction map delta and its dual.

Two independent constructions of M_v are provided: the transpose of
``M_v^* = (v (x) id) delta`` and a pre-Lie recursion.  ``translate_M`` computes
both and raises :class:`InternalConsistencyError` if they differ.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .forest import ForestAlgebra
from .freevec import Accumulator, LinComb, linear_extend, scale
from .monomial import Marked, Monomial
from .tensor import PreconditionError, TensorAlgebra, WordTranslation
from .trees import UNIT, Forest, LabeledTree, as_forest, build_from_nodes, tree_nodes


class InternalConsistencyError(RuntimeError):
    """The two constructions of M_v disagree."""


# --- delta -----------------------------------------------------------------------


def _components(n: int, nodes: list[int], edges: list[tuple[int, int]]) -> list[int]:
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comp = [-1] * n
    ids: dict[int, int] = {}
    for v in nodes:
        r = find(v)
        comp[v] = ids.setdefault(r, len(ids))
    return comp


@lru_cache(maxsize=None)
def _extraction_families(t: LabeledTree) -> tuple:
    """All families of node-disjoint connected subtrees of ``t``.

    Returns tuples ``(extracted trees, comp)`` where ``comp[v]`` is the component
    index of node ``v`` (or -1).  Families correspond to a node subset U and an
    edge subset inside U; in a tree every component of such a pair is induced.
    """
    labels, parents, children = tree_nodes(t)
    n = len(labels)
    out = []
    for umask in range(1 << n):
        nodes = [v for v in range(n) if umask >> v & 1]
        inner = [v for v in nodes if v > 0 and umask >> parents[v] & 1]
        for emask in range(1 << len(inner)):
            edges = [(inner[i], parents[inner[i]]) for i in range(len(inner)) if emask >> i & 1]
            comp = _components(n, nodes, edges)
            k = max(comp) + 1
            extracted = []
            for c in range(k):
                members = [v for v in nodes if comp[v] == c]
                top = next(v for v in members if parents[v] < 0 or comp[parents[v]] != c)
                sub_children = [tuple(u for u in children[v] if comp[u] == c) for v in range(n)]
                extracted.append((top, build_from_nodes(labels, sub_children, top)))
            out.append((tuple(extracted), tuple(comp)))
    return tuple(out)


def _contract(t: LabeledTree, comp: Sequence[int], comp_labels: Sequence[int]) -> LabeledTree:
    labels, parents, children = tree_nodes(t)
    n = len(labels)
    members: dict[int, list[int]] = {}
    for v in range(n):
        if comp[v] >= 0:
            members.setdefault(comp[v], []).append(v)

    def build(v: int) -> LabeledTree:
        c = comp[v]
        if c < 0:
            return LabeledTree(labels[v], (build(u) for u in children[v]))
        outside = [u for m in members[c] for u in children[m] if comp[u] != c]
        return LabeledTree(comp_labels[c], (build(u) for u in outside))

    return build(0)


@lru_cache(maxsize=None)
def delta_general_tree(t: LabeledTree, labels: tuple[int, ...]) -> tuple:
    """Label-marked delta of a tree as ``((Monomial of Marked, contracted tree), coef)``."""
    acc: dict = {}
    for extracted, comp in _extraction_families(t):
        k = len(extracted)
        # the components are indexed in order of first appearance, as in ``extracted``
        for marks in _label_tuples(labels, k):
            mono = Monomial(Marked(tree, lab) for (_, tree), lab in zip(extracted, marks))
            key = (mono, _contract(t, comp, marks))
            acc[key] = acc.get(key, 0) + 1
    return tuple(acc.items())


def _label_tuples(labels: tuple[int, ...], k: int):
    if k == 0:
        yield ()
        return
    for rest in _label_tuples(labels, k - 1):
        for lab in labels:
            yield rest + (lab,)


def delta_general(f: Forest | LabeledTree, labels: Sequence[int]) -> LinComb:
    """Label-marked delta of a forest, extended multiplicatively."""
    labs = tuple(sorted(set(labels)))
    acc = {(Monomial(), UNIT): Fraction(1)}
    for t in as_forest(f).trees:
        nxt: dict = {}
        for (m1, f1), c1 in acc.items():
            for (m2, t2), c2 in delta_general_tree(t, labs):
                key = (m1 * m2, f1 * Forest((t2,)))
                nxt[key] = nxt.get(key, 0) + c1 * c2
        acc = nxt
    return LinComb(acc)


def delta(f: Forest | LabeledTree) -> LinComb:
    """delta with label 0 at every contracted node; left legs are monomials of trees."""
    return delta_general(f, (0,)).map_keys(lambda k: (Monomial(m.item for m in k[0].factors), k[1]))


# --- translation vectors ----------------------------------------------------------


class TreeTranslation:
    """v = (v_0, ..., v_d), each v_i a linear combination of trees."""

    def __init__(self, d: int, entries: Mapping[int, LinComb] | Sequence[LinComb]):
        self.d = d
        if not isinstance(entries, Mapping):
            entries = dict(enumerate(entries))
        clean = {}
        for i, e in entries.items():
            if not 0 <= i <= d:
                raise ValueError(f"translation label {i} outside 0..{d}")
            for f in e.as_dict():
                if not isinstance(f, Forest) or not f.is_tree:
                    raise PreconditionError(f"v_{i} contains {f!r}, which is not a single tree")
                if f.tree().max_label() > d:
                    raise ValueError(f"v_{i} contains a label outside 0..{d}")
            if e:
                clean[i] = e
        self.entries = clean
        self._values = {i: {f.tree(): c for f, c in e.raw_items()} for i, e in clean.items()}

    @classmethod
    def zero(cls, d: int) -> "TreeTranslation":
        return cls(d, {})

    @property
    def special_form(self) -> bool:
        return set(self.entries) <= {0}

    def entry(self, i: int) -> LinComb:
        return self.entries.get(i, LinComb.zero())

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.entries))

    def max_grade(self) -> int:
        return max((e.max_grade() for e in self.entries.values()), default=0)

    def value(self, i: int, t: LabeledTree) -> Fraction:
        return self._values.get(i, {}).get(t, Fraction(0))

    def character(self, mono: Monomial) -> Fraction:
        val = Fraction(1)
        for m in mono.factors:
            val *= self.value(m.label, m.item)
            if not val:
                break
        return val

    def __add__(self, other: "TreeTranslation") -> "TreeTranslation":
        keys = set(self.entries) | set(other.entries)
        return TreeTranslation(self.d, {i: self.entry(i) + other.entry(i) for i in keys})

    def __eq__(self, other) -> bool:
        return isinstance(other, TreeTranslation) and self.d == other.d and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.d, tuple(sorted((i, e) for i, e in self.entries.items()))))

    def __repr__(self) -> str:
        return f"TreeTranslation(d={self.d}, {self.entries!r})"


def iota_translation(alg: ForestAlgebra, v: WordTranslation) -> TreeTranslation:
    """Image of a Lie-polynomial translation under the embedding iota."""
    return TreeTranslation(v.d, {i: alg.embed_iota(e) for i, e in v.entries.items()})


def half_cherries(d: int) -> TreeTranslation:
    """v_0 = 1/2 sum_i [•_i]_{•_i}."""
    from .trees import LabeledTree as T

    e = LinComb({Forest((T(i, (T(i),)),)): Fraction(1, 2) for i in range(1, d + 1)})
    return TreeTranslation(d, {0: e})


# --- dual translation -------------------------------------------------------------


@lru_cache(maxsize=None)
def _dual_tree(v: TreeTranslation, t: LabeledTree) -> LinComb:
    acc = Accumulator()
    for (mono, contracted), m in delta_general_tree(t, v.support() or (0,)):
        val = v.character(mono)
        if val:
            acc.add(Forest((contracted,)), m * val)
    return acc.build()


@lru_cache(maxsize=None)
def _dual_forest(v: TreeTranslation, f: Forest) -> LinComb:
    acc = {UNIT: Fraction(1)}
    for t in f.trees:
        nxt: dict = {}
        for g1, c1 in acc.items():
            for g2, c2 in _dual_tree(v, t).raw_items():
                k = g1 * g2
                nxt[k] = nxt.get(k, 0) + c1 * c2
        acc = nxt
    return LinComb(acc)


def dual_translate_M(v: TreeTranslation, y: LinComb) -> LinComb:
    """M_v^* y = (v (x) id) delta y."""
    return linear_extend(lambda f: _dual_forest(v, f), y)


# --- pre-Lie construction ---------------------------------------------------------


class PreLieTranslation:
    """M_v on H*^N from the pre-Lie recursion on root branches and tree count."""

    def __init__(self, alg: ForestAlgebra, v: TreeTranslation):
        if v.d != alg.d:
            raise ValueError("dimension mismatch")
        self.alg = alg
        self.v = v
        self._cache: dict[Forest, LinComb] = {UNIT: alg.unit()}

    def image(self, f: Forest) -> LinComb:
        r = self._cache.get(f)
        if r is None:
            r = self._tree(f.tree()) if f.is_tree else self._forest(f)
            self._cache[f] = r
        return r

    def _tree(self, t: LabeledTree) -> LinComb:
        alg = self.alg
        if not t.children:
            return alg.truncate(alg.node(t.label) + self.v.entry(t.label))
        first = t.children[0]
        rest = LabeledTree(t.label, t.children[1:])
        expansion = alg.graft(LinComb.basis(Forest((first,))), LinComb.basis(Forest((rest,))))
        target = Forest((t,))
        c = expansion[target]
        acc = Accumulator()
        acc.add_lincomb(alg.graft(self.image(Forest((first,))), self.image(Forest((rest,)))))
        for h, ch in expansion.raw_items():
            if h != target:
                acc.add_lincomb(self.image(h), -ch)
        return scale(acc.build(), Fraction(1) / c)

    def _forest(self, f: Forest) -> LinComb:
        alg = self.alg
        first = Forest(f.trees[:1])
        rest = Forest(f.trees[1:])
        expansion = alg.gl_product(LinComb.basis(first), LinComb.basis(rest))
        m = expansion[f]
        acc = Accumulator()
        acc.add_lincomb(alg.gl_product(self.image(first), self.image(rest)))
        for h, ch in expansion.raw_items():
            if h != f:
                acc.add_lincomb(self.image(h), -ch)
        return scale(acc.build(), Fraction(1) / m)

    def __call__(self, x: LinComb) -> LinComb:
        return linear_extend(self.image, self.alg.check(x))


def translate_M_prelie(alg: ForestAlgebra, v: TreeTranslation, x: LinComb) -> LinComb:
    return PreLieTranslation(alg, v)(x)


class DualTranslation:
    """M_v on H*^N as the transpose of M_v^* on the truncated forest basis."""

    def __init__(self, alg: ForestAlgebra, v: TreeTranslation):
        self.alg = alg
        self.v = v
        rows: dict[Forest, dict] = {}
        for y in alg.forests():
            for f, c in _dual_forest(v, y).raw_items():
                rows.setdefault(f, {})[y] = c
        self._cols = {f: LinComb(r) for f, r in rows.items()}

    def image(self, f: Forest) -> LinComb:
        return self._cols.get(f, LinComb.zero())

    def __call__(self, x: LinComb) -> LinComb:
        return linear_extend(self.image, self.alg.check(x))


def translate_M(alg: ForestAlgebra, v: TreeTranslation, x: LinComb, check: bool = True) -> LinComb:
    """M_v x as the transpose of the dual; cross-checked against the pre-Lie recursion."""
    out = DualTranslation(alg, v)(x)
    if check:
        other = translate_M_prelie(alg, v, x)
        if other != out:
            raise InternalConsistencyError(f"M_v constructions disagree on {x!r}: {out!r} vs {other!r}")
    return out


# --- Ito-Stratonovich --------------------------------------------------------------


def hat_D_sum(t: LabeledTree) -> LinComb:
    """Sum over extractions of cherries [•_i]_{•_i}, i >= 1, with weight (1/2)^k."""
    acc = Accumulator()
    for (mono, contracted), m in delta_general_tree(t, (0,)):
        if all(_is_noise_cherry(x.item) for x in mono.factors):
            acc.add(Forest((contracted,)), m * Fraction(1, 2 ** len(mono)))
    return acc.build()


def _is_noise_cherry(t: LabeledTree) -> bool:
    return (
        t.label >= 1
        and len(t.children) == 1
        and not t.children[0].children
        and t.children[0].label == t.label
    )


def ito_strat_convert(t: LabeledTree, d: int) -> LinComb:
    """Strat coefficient of ``t`` as a combination of Ito coefficients."""
    if t.max_label() > d:
        raise ValueError(f"{t!r} has a label outside 0..{d}")
    a = dual_translate_M(half_cherries(d), LinComb.basis(Forest((t,))))
    b = hat_D_sum(t)
    if a != b:
        raise InternalConsistencyError(f"Ito-Stratonovich sums disagree on {t!r}")
    return a


# --- Levy generator ------------------------------------------------------------------


def translate_levy_generator(
    alg: ForestAlgebra,
    v: TreeTranslation,
    A: Mapping[tuple[LabeledTree, LabeledTree], Fraction | int],
    B: LinComb,
) -> LinComb:
    """sum_i B^i M_v(tau_i) + 1/2 sum_ij A^{ij} M_v(tau_i) * M_v(tau_j)."""
    half_n = alg.N // 2
    for (s, t), a in A.items():
        if A.get((t, s), 0) != a:
            raise PreconditionError("A must be symmetric")
        if s == t and a and (s.size > half_n or s.count_label(0) > 0):
            raise PreconditionError(f"A^(ii) must vanish for {s!r}")
    for f in B.as_dict():
        if not f.is_tree:
            raise PreconditionError("B must be a combination of trees")
    M = DualTranslation(alg, v)
    out = M(B)
    acc = Accumulator()
    acc.add_lincomb(out)
    for (s, t), a in A.items():
        if a:
            prod = alg.gl_product(M(LinComb.basis(Forest((s,)))), M(LinComb.basis(Forest((t,)))))
            acc.add_lincomb(prod, Fraction(a) / 2)
    return acc.build()


__all__ = [
    "InternalConsistencyError",
    "delta",
    "delta_general",
    "TreeTranslation",
    "iota_translation",
    "half_cherries",
    "dual_translate_M",
    "PreLieTranslation",
    "DualTranslation",
    "translate_M",
    "translate_M_prelie",
    "hat_D_sum",
    "ito_strat_convert",
    "translate_levy_generator",
    "TensorAlgebra",
]
