"""Connes-Kreimer Hopf algebra (H, forest product, Delta_star) and its
Grossman-Larson dual (H*, star, Delta_odot), truncated at N nodes.

Elements are ``LinComb`` objects over :class:`Forest` keys.  The star product
is the basis-delta adjoint of ``ck_coproduct``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable

from .freevec import Accumulator, LinComb, linear_extend, scale, tensor
from .tensor import EMPTY, PreconditionError, TensorAlgebra, Word
from .trees import (
    UNIT,
    Forest,
    LabeledTree,
    as_forest,
    forest_from_parents,
    forests_up_to,
    linear_tree,
    tree_nodes,
    trees_up_to,
)


def fpoly(*items) -> LinComb:
    """Build a LinComb from ``(coef, tree-or-forest)`` pairs or bare trees."""
    acc = Accumulator()
    for it in items:
        if isinstance(it, tuple):
            c, t = it
        else:
            c, t = 1, it
        acc.add(as_forest(t), c)
    return acc.build()


# --- Connes-Kreimer coproduct --------------------------------------------------


@lru_cache(maxsize=None)
def _ck_tree(t: LabeledTree) -> tuple:
    """Delta_star on a tree by the B_+ recursion; branches left, trunk right."""
    out: dict = {(Forest((t,)), UNIT): 1}
    for (left, right), c in _ck_forest(Forest(t.children)):
        key = (left, Forest((LabeledTree(t.label, right.trees),)))
        out[key] = out.get(key, 0) + c
    return tuple(out.items())


@lru_cache(maxsize=None)
def _ck_forest(f: Forest) -> tuple:
    acc: dict = {(UNIT, UNIT): 1}
    for t in f.trees:
        nxt: dict = {}
        for (l1, r1), c1 in acc.items():
            for (l2, r2), c2 in _ck_tree(t):
                key = (l1 * l2, r1 * r2)
                nxt[key] = nxt.get(key, 0) + c1 * c2
        acc = nxt
    return tuple(acc.items())


def ck_coproduct(f: Forest | LabeledTree) -> LinComb:
    return LinComb(_ck_forest(as_forest(f)))


def admissible_cuts(t: LabeledTree) -> LinComb:
    """Brute-force Delta_star of a tree by enumerating admissible cuts.

    Test oracle only.  A cut is a set of edges with at most one edge on any
    root-to-leaf path; the full cut (removing the whole tree) gives ``t (x) 1``.
    """
    labels, parents, _ = tree_nodes(t)
    n = len(labels)
    edges = list(range(1, n))  # edge identified by its lower node

    def ancestors(v: int) -> set[int]:
        out = set()
        p = parents[v]
        while p >= 0:
            out.add(p)
            p = parents[p]
        return out

    anc = {v: ancestors(v) for v in range(n)}
    acc = Accumulator()
    acc.add((Forest((t,)), UNIT), 1)
    for mask in range(1 << len(edges)):
        cut = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        if any(a in anc[b] for a in cut for b in cut if a != b):
            continue
        cutset = set(cut)
        new_parents = [-1 if v in cutset else parents[v] for v in range(n)]
        # nodes reached from a cut node belong to branches
        in_branch = [False] * n
        for v in range(n):
            u = v
            while u >= 0:
                if u in cutset:
                    in_branch[v] = True
                    break
                u = parents[u]
        b_nodes = [v for v in range(n) if in_branch[v]]
        t_nodes = [v for v in range(n) if not in_branch[v]]
        bmap = {v: i for i, v in enumerate(b_nodes)}
        tmap = {v: i for i, v in enumerate(t_nodes)}
        branches = forest_from_parents(
            [labels[v] for v in b_nodes], [-1 if new_parents[v] < 0 else bmap[new_parents[v]] for v in b_nodes]
        )
        trunk = forest_from_parents(
            [labels[v] for v in t_nodes], [-1 if new_parents[v] < 0 else tmap[new_parents[v]] for v in t_nodes]
        )
        acc.add((branches, trunk), 1)
    return acc.build()


@lru_cache(maxsize=None)
def _ck_antipode_tree(t: LabeledTree) -> LinComb:
    acc = Accumulator()
    acc.add(Forest((t,)), -1)
    for (left, right), c in _ck_tree(t):
        if left == UNIT or right == UNIT:
            continue
        for g, cg in ck_antipode_forest(left).raw_items():
            acc.add(g * right, -c * cg)
    return acc.build()


@lru_cache(maxsize=None)
def ck_antipode_forest(f: Forest) -> LinComb:
    acc = {UNIT: Fraction(1)}
    for t in f.trees:
        nxt: dict = {}
        for g1, c1 in acc.items():
            for g2, c2 in _ck_antipode_tree(t).raw_items():
                k = g1 * g2
                nxt[k] = nxt.get(k, 0) + c1 * c2
        acc = nxt
    return LinComb(acc)


# --- attachments ---------------------------------------------------------------


def _forest_arrays(f: Forest) -> tuple[list[int], list[int]]:
    labels: list[int] = []
    parents: list[int] = []
    for t in f.trees:
        lab, par, _ = tree_nodes(t)
        off = len(labels)
        labels.extend(lab)
        parents.extend(-1 if p < 0 else p + off for p in par)
    return labels, parents


@lru_cache(maxsize=None)
def attachment_support(a: Forest, b: Forest) -> tuple[Forest, ...]:
    """Forests obtained by attaching every tree of ``a`` to a node of ``b`` or
    beside it.  This is the support of ``a * b``; coefficients come from Delta_star."""
    bl, bp = _forest_arrays(b)
    nb = len(bl)
    out: set[Forest] = set()
    per_tree = [tree_nodes(t) for t in a.trees]
    for targets in product(range(-1, nb), repeat=len(per_tree)):
        labels = list(bl)
        parents = list(bp)
        for tgt, (lab, par, _) in zip(targets, per_tree):
            off = len(labels)
            labels.extend(lab)
            parents.extend((tgt if p < 0 else p + off) for p in par)
        out.add(forest_from_parents(labels, parents))
    return tuple(out)


@lru_cache(maxsize=None)
def _star_basis(a: Forest, b: Forest) -> tuple:
    out = []
    for h in attachment_support(a, b):
        c = dict(_ck_forest(h)).get((a, b), 0)
        if c:
            out.append((h, c))
    return tuple(out)


@lru_cache(maxsize=None)
def _graft_basis(s: LabeledTree, t: LabeledTree) -> tuple:
    """s grafted onto t: sum over trees tau of the number of edges of tau
    whose cut leaves branch s and trunk t."""
    labels, parents, _ = tree_nodes(t)
    sl, sp, _ = tree_nodes(s)
    candidates = set()
    for tgt in range(len(labels)):
        lab = list(labels) + list(sl)
        par = list(parents) + [(tgt if p < 0 else p + len(labels)) for p in sp]
        candidates.add(forest_from_parents(lab, par).tree())
    out = []
    for tau in candidates:
        n = _count_single_cuts(tau, s, t)
        if n:
            out.append((Forest((tau,)), n))
    return tuple(out)


@lru_cache(maxsize=None)
def single_cuts(tau: LabeledTree) -> tuple:
    """The adjoint of grafting: ``((branch, trunk), count)`` over single-edge cuts."""
    labels, parents, children = tree_nodes(tau)
    out: dict = {}
    for v in range(1, len(labels)):
        sub = []
        stack = [v]
        while stack:
            u = stack.pop()
            sub.append(u)
            stack.extend(children[u])
        sub.sort()
        inside = set(sub)
        pos = {u: i for i, u in enumerate(sub)}
        keep = [u for u in range(len(labels)) if u not in inside]
        m = {u: i for i, u in enumerate(keep)}
        branch = forest_from_parents([labels[u] for u in sub], [-1 if u == v else pos[parents[u]] for u in sub])
        trunk = forest_from_parents([labels[u] for u in keep], [-1 if parents[u] < 0 else m[parents[u]] for u in keep])
        key = (branch.tree(), trunk.tree())
        out[key] = out.get(key, 0) + 1
    return tuple(out.items())


def _count_single_cuts(tau: LabeledTree, s: LabeledTree, t: LabeledTree) -> int:
    return dict(single_cuts(tau)).get((s, t), 0)


# --- the algebra -----------------------------------------------------------------


@dataclass(frozen=True)
class ForestAlgebra:
    """H^N with labels 0..d."""

    d: int
    N: int

    # basis
    def forests(self, max_nodes: int | None = None) -> list[Forest]:
        return forests_up_to(self.N if max_nodes is None else max_nodes, self.d)

    def trees(self, max_nodes: int | None = None) -> list[LabeledTree]:
        return trees_up_to(self.N if max_nodes is None else max_nodes, self.d)

    def unit(self) -> LinComb:
        return LinComb.basis(UNIT)

    def node(self, i: int, coef=1) -> LinComb:
        self._check_label(i)
        return LinComb.basis(Forest((LabeledTree(i),)), coef)

    def _check_label(self, i: int) -> None:
        if not 0 <= i <= self.d:
            raise ValueError(f"label {i} outside 0..{self.d}")

    def check(self, x: LinComb) -> LinComb:
        for f in x.as_dict():
            if not isinstance(f, Forest):
                raise TypeError(f"{f!r} is not a forest")
            if f.size > self.N:
                raise ValueError(f"forest {f!r} exceeds truncation {self.N}")
            for t in f.trees:
                if t.max_label() > self.d:
                    raise ValueError(f"forest {f!r} has a label outside 0..{self.d}")
        return x

    def truncate(self, x: LinComb) -> LinComb:
        return x.filter(lambda f: f.size <= self.N)

    def counit(self, x: LinComb) -> Fraction:
        return x[UNIT]

    # H side
    def forest_product(self, a: LinComb, b: LinComb) -> LinComb:
        acc = Accumulator()
        for f, cf in a.raw_items():
            for g, cg in b.raw_items():
                if f.size + g.size <= self.N:
                    acc.add(f * g, cf * cg)
        return acc.build()

    def ck(self, x: LinComb) -> LinComb:
        acc = Accumulator()
        for f, c in x.raw_items():
            for key, m in _ck_forest(f):
                acc.add(key, c * m)
        return acc.build()

    def ck_antipode(self, x: LinComb) -> LinComb:
        return linear_extend(ck_antipode_forest, x)

    # H* side
    def gl_product(self, a: LinComb, b: LinComb) -> LinComb:
        acc = Accumulator()
        for f, cf in a.raw_items():
            for g, cg in b.raw_items():
                if f.size + g.size > self.N:
                    continue
                for h, c in _star_basis(f, g):
                    acc.add(h, cf * cg * c)
        return acc.build()

    def graft(self, a: LinComb, b: LinComb) -> LinComb:
        """Pre-Lie grafting of tree series, truncated at N."""
        acc = Accumulator()
        for f, cf in a.raw_items():
            for g, cg in b.raw_items():
                if f.size + g.size > self.N:
                    continue
                for h, c in _graft_basis(f.tree(), g.tree()):
                    acc.add(h, cf * cg * c)
        return acc.build()

    def graft_adjoint(self, x: LinComb) -> LinComb:
        """Sum over single cuts of each tree: branch (x) trunk."""
        acc = Accumulator()
        for f, c in x.raw_items():
            for (b, t), m in single_cuts(f.tree()):
                acc.add((Forest((b,)), Forest((t,))), c * m)
        return acc.build()

    def odot_coproduct(self, x: LinComb) -> LinComb:
        """Delta_odot: dual of the forest product; splits forests into sub-multisets."""
        acc = Accumulator()
        for f, c in x.raw_items():
            for pair in _splits(f):
                acc.add(pair, c)
        return acc.build()

    def gl_antipode(self, x: LinComb) -> LinComb:
        return linear_extend(self._gl_antipode_basis, self.check(x))

    def _gl_antipode_basis(self, f: Forest) -> LinComb:
        return _gl_antipode(self, f)

    def exp_star(self, x: LinComb) -> LinComb:
        if x[UNIT]:
            raise PreconditionError("exp_star needs zero constant term")
        result = self.unit()
        term = self.unit()
        for k in range(1, self.N + 1):
            term = scale(self.gl_product(term, x), Fraction(1, k))
            if not term:
                break
            result = result + term
        return result

    def log_star(self, g: LinComb) -> LinComb:
        if g[UNIT] != 1:
            raise PreconditionError("log_star needs constant term 1")
        y = g - self.unit()
        result = LinComb.zero()
        power = self.unit()
        for k in range(1, self.N + 1):
            power = self.gl_product(power, y)
            if not power:
                break
            result = result + scale(power, Fraction((-1) ** (k + 1), k))
        return result

    def is_grouplike_star(self, g: LinComb) -> bool:
        if g[UNIT] != 1:
            return False
        gg = tensor(g, g).filter(lambda p: p[0].size + p[1].size <= self.N)
        return self.odot_coproduct(g) == gg

    def is_primitive_star(self, x: LinComb) -> bool:
        one = self.unit()
        return self.odot_coproduct(x) == tensor(x, one) + tensor(one, x)

    # embedding of words
    def embed_iota(self, x: LinComb) -> LinComb:
        cache: dict[Word, LinComb] = {EMPTY: self.unit()}

        def img(word: Word) -> LinComb:
            r = cache.get(word)
            if r is None:
                r = self.gl_product(img(word[:-1]), self.node(word[-1]))
                cache[word] = r
            return r

        return linear_extend(img, x)

    def project_linear(self, x: LinComb) -> LinComb:
        """pi_l: keep linear trees and read them back as words."""
        from .trees import linear_word

        acc = Accumulator()
        for f, c in x.raw_items():
            if f == UNIT:
                acc.add(EMPTY, c)
            elif f.is_tree and f.tree().is_linear():
                acc.add(Word(linear_word(f.tree())), c)
        return acc.build()

    def tensor_algebra(self) -> TensorAlgebra:
        return TensorAlgebra(self.d, self.N)


@lru_cache(maxsize=None)
def _splits(f: Forest) -> tuple:
    mult = list(f.multiplicities().items())
    out = []
    for counts in product(*(range(m + 1) for _, m in mult)):
        left: list[LabeledTree] = []
        right: list[LabeledTree] = []
        for (t, m), k in zip(mult, counts):
            left.extend([t] * k)
            right.extend([t] * (m - k))
        out.append((Forest(left), Forest(right)))
    return tuple(out)


@lru_cache(maxsize=None)
def _gl_antipode(alg: ForestAlgebra, f: Forest) -> LinComb:
    if f == UNIT:
        return alg.unit()
    acc = Accumulator()
    acc.add(f, -1)
    for left, right in _splits(f):
        if left == f or left == UNIT:
            continue
        acc.add_lincomb(alg.gl_product(_gl_antipode(alg, left), LinComb.basis(right)), -1)
    return acc.build()


def word_to_linear(word: Iterable[int]) -> Forest:
    return Forest((linear_tree(tuple(word)),))
