"""Reduced symbol spaces with a Heaviside kernel: degrees, Delta^-, Delta^+, phi, M_ell.

A :class:`Symbol` is a product ``I(s_1)...I(s_n) Xi_i`` stored as a forest of
trees (the arguments of ``I`` read through ``phi^{-1}``) and a noise tag ``i``
(0 means no noise).  ``phi`` removes the root of a tree and records its label
as the tag, so symbols and trees are in bijection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .forest import _ck_forest
from .freevec import Accumulator, LinComb
from .monomial import Monomial
from .trees import UNIT, Forest, LabeledTree, tree_nodes, trees_up_to
from .translation import TreeTranslation, delta


class Symbol:
    """``I(c_1)...I(c_n) Xi_tag`` with ``c_j`` given as trees (``phi(c_j)`` is the argument)."""

    __slots__ = ("children", "tag", "sort_key", "_hash")

    def __init__(self, children: Forest | Iterable[LabeledTree] = (), tag: int = 0):
        ch = children if isinstance(children, Forest) else Forest(children)
        if tag < 0:
            raise ValueError("noise tag must be non-negative")
        self.children = ch
        self.tag = int(tag)
        t = LabeledTree(tag, ch.trees)
        self.sort_key = t.sort_key
        self._hash = hash(("S",) + t.sort_key)

    @property
    def tree(self) -> LabeledTree:
        return LabeledTree(self.tag, self.children.trees)

    @property
    def grade(self) -> int:
        return self.children.size + 1

    def __mul__(self, other: "Symbol") -> "Symbol":
        if self.tag and other.tag:
            raise ValueError("a symbol carries at most one noise")
        return Symbol(self.children * other.children, self.tag or other.tag)

    def __eq__(self, other) -> bool:
        return isinstance(other, Symbol) and self._hash == other._hash and self.sort_key == other.sort_key

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        from .syntax import format_symbol

        return format_symbol(self)


ONE = Symbol()


def phi(t: LabeledTree) -> Symbol:
    return Symbol(Forest(t.children), t.label)


def phi_inv(s: Symbol) -> LabeledTree:
    return s.tree


def I(s: Symbol) -> Symbol:
    return Symbol(Forest((phi_inv(s),)), 0)


def Xi(i: int) -> Symbol:
    if i < 1:
        raise ValueError("noises are indexed from 1")
    return Symbol((), i)


def I_lin(x: LinComb) -> LinComb:
    return x.map_keys(I)


def phi_lin(x: LinComb) -> LinComb:
    """phi on combinations of single-tree forests."""
    return x.map_keys(lambda f: phi(f.tree()))


# --- degrees ------------------------------------------------------------------------


@dataclass(frozen=True)
class Degree:
    """``a + b*alpha``."""

    a: int
    b: int

    def __add__(self, other: "Degree") -> "Degree":
        return Degree(self.a + other.a, self.b + other.b)

    def value(self, alpha: Fraction) -> Fraction:
        return self.a + self.b * Fraction(alpha)

    def sign(self, alpha: Fraction | None = None) -> int:
        """Sign, symbolic when it does not depend on alpha in (0,1)."""
        if alpha is not None:
            v = self.value(alpha)
            return (v > 0) - (v < 0)
        lo, hi = self.a, self.a + self.b  # values at alpha=0 and alpha=1
        if lo >= 0 and hi >= 0 and (lo > 0 or hi > 0):
            return 1
        if lo <= 0 and hi <= 0 and (lo < 0 or hi < 0):
            return -1
        if lo == 0 and hi == 0:
            return 0
        raise ValueError(f"sign of {self} depends on alpha; supply alpha")

    def __repr__(self) -> str:
        if self.b == 0:
            return str(self.a)
        b = "alpha" if self.b == 1 else f"{self.b}alpha"
        if self.a == 0:
            return b
        return f"{b}{'+' if self.a > 0 else '-'}{abs(self.a)}"


NOISE = Degree(-1, 1)
EDGE_I = Degree(1, 0)


def degree(s: Symbol, alpha: Fraction | None = None) -> Degree:
    """Edge rules: |Xi_i| = alpha - 1, |I(x)| = |x| + 1, additive over products."""
    if alpha is not None and not 0 < Fraction(alpha) < 1:
        raise ValueError("alpha must lie in (0,1)")
    return _degree(s)


@lru_cache(maxsize=None)
def _degree(s: Symbol) -> Degree:
    out = NOISE if s.tag else Degree(0, 0)
    for c in s.children.trees:
        out = out + EDGE_I + _degree(phi(c))
    return out


def planted_degree(t: LabeledTree) -> Degree:
    """|I phi(t)| = |t|_0 (1 - alpha) + |t| alpha."""
    n0 = t.count_label(0)
    return Degree(n0, t.size - n0)


def is_negative(s: Symbol, alpha: Fraction) -> bool:
    return degree(s).value(alpha) < 0


def max_negative_nodes(alpha: Fraction) -> int:
    """Largest n with n*alpha < 1."""
    alpha = Fraction(alpha)
    n = int(1 / alpha)
    return n - 1 if n * alpha == 1 else n


def negative_generators(alpha: Fraction, d: int) -> list[Symbol]:
    """All symbols of negative degree, found by scanning every tree up to floor(1/alpha)+1 nodes."""
    return list(_negative_generators(Fraction(alpha), d))


@lru_cache(maxsize=None)
def _negative_generators(alpha: Fraction, d: int) -> tuple[Symbol, ...]:
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0,1)")
    bound = int(1 / alpha) + 1
    return tuple(phi(t) for t in trees_up_to(bound, d) if is_negative(phi(t), alpha))


def negative_trees(alpha: Fraction, d: int) -> list[LabeledTree]:
    """B_-: trees without label 0 with fewer than 1/alpha nodes."""
    n = max_negative_nodes(alpha)
    return [t for t in trees_up_to(n, d) if t.count_label(0) == 0]


# --- Delta^- --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _delta_minus_symbol(s: Symbol, alpha: Fraction) -> tuple:
    """Delta^- by enumerating edge subgraphs of the symbol.

    Vertices are the nodes of phi^{-1}(s); I-edges join a node to its parent;
    a node labelled i >= 1 carries a noise edge Xi_i.  A term picks edges whose
    connected components all have negative degree, extracts each component as
    a symbol and contracts it to a single vertex.
    """
    t = phi_inv(s)
    labels, parents, children = tree_nodes(t)
    n = len(labels)
    i_edges = [("I", v) for v in range(1, n)]
    x_edges = [("X", v) for v in range(n) if labels[v] != 0]
    edges = i_edges + x_edges
    acc: dict = {}
    for mask in range(1 << len(edges)):
        chosen = [edges[k] for k in range(len(edges)) if mask >> k & 1]
        comp = _edge_components(n, parents, chosen)
        ok = True
        parts = []
        for c, members in comp.items():
            n_i = sum(1 for kind, v in chosen if kind == "I" and v in members)
            n_x = sum(1 for kind, v in chosen if kind == "X" and v in members)
            deg = Degree(n_i - n_x, n_x)
            if deg.value(alpha) >= 0:
                ok = False
                break
            parts.append((c, members))
        if not ok:
            continue
        node_comp = [-1] * n
        for c, members in parts:
            for v in members:
                node_comp[v] = c
        noise_used = {v for kind, v in chosen if kind == "X"}
        i_used = {v for kind, v in chosen if kind == "I"}
        extracted = []
        for c, members in parts:
            top = next(v for v in members if v not in i_used)
            extracted.append(phi(_component_tree(labels, children, members, i_used, noise_used, top)))
        right = _contract_symbol(labels, children, node_comp, noise_used)
        key = (Monomial(extracted), phi(right))
        acc[key] = acc.get(key, 0) + 1
    return tuple(acc.items())


def _edge_components(n: int, parents, chosen) -> dict[int, frozenset]:
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    touched = set()
    for kind, v in chosen:
        touched.add(v)
        if kind == "I":
            touched.add(parents[v])
            ra, rb = find(v), find(parents[v])
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, set] = {}
    for v in touched:
        groups.setdefault(find(v), set()).add(v)
    return {k: frozenset(g) for k, g in groups.items()}


def _component_tree(labels, children, members, i_used, noise_used, top) -> LabeledTree:
    def build(v):
        kids = [u for u in children[v] if u in members and u in i_used]
        return LabeledTree(labels[v] if v in noise_used else 0, (build(u) for u in kids))

    return build(top)


def _contract_symbol(labels, children, node_comp, noise_used) -> LabeledTree:
    members: dict[int, list[int]] = {}
    for v, c in enumerate(node_comp):
        if c >= 0:
            members.setdefault(c, []).append(v)

    def build(v):
        c = node_comp[v]
        if c < 0:
            return LabeledTree(labels[v], (build(u) for u in children[v]))
        rest = [labels[u] for u in members[c] if labels[u] != 0 and u not in noise_used]
        if len(rest) > 1:
            raise ValueError("contracted vertex would carry two noises")
        outside = [u for m in members[c] for u in children[m] if node_comp[u] != c]
        return LabeledTree(rest[0] if rest else 0, (build(u) for u in outside))

    return build(0)


def Delta_minus(x: LinComb | Symbol, alpha: Fraction) -> LinComb:
    """Delta^- on symbols; keys are ``(Monomial of negative symbols, Symbol)``."""
    alpha = Fraction(alpha)
    if isinstance(x, Symbol):
        x = LinComb.basis(x)
    acc = Accumulator()
    for s, c in x.raw_items():
        for key, m in _delta_minus_symbol(s, alpha):
            acc.add(key, c * m)
    return acc.build()


def delta_minus(t: LabeledTree | Forest, alpha: Fraction) -> LinComb:
    """(pi_- (x) id) delta on trees: keep left legs made of trees in B_-."""
    alpha = Fraction(alpha)
    neg = max_negative_nodes(alpha)

    def is_neg(tree: LabeledTree) -> bool:
        return tree.size <= neg and tree.count_label(0) == 0

    return delta(t).filter(lambda k: all(is_neg(tr) for tr in k[0].factors))


def phi_tensor(x: LinComb) -> LinComb:
    """(phi (x) phi) on (Monomial of trees, single-tree Forest) keys."""
    return x.map_keys(lambda k: (Monomial(phi(t) for t in k[0].factors), phi(k[1].tree())))


# --- characters and M_ell --------------------------------------------------------------


class NegCharacter:
    """Character on T_-: values on negative symbols, extended multiplicatively."""

    def __init__(self, alpha: Fraction, d: int, values: Mapping[Symbol, Fraction | int] | None = None):
        self.alpha = Fraction(alpha)
        self.d = d
        gens = set(_negative_generators(self.alpha, d))
        clean = {}
        for s, c in (values or {}).items():
            if s not in gens:
                raise ValueError(f"{s!r} is not a negative generator for alpha={self.alpha}")
            if c:
                clean[s] = Fraction(c)
        self.values = clean

    @classmethod
    def counit(cls, alpha: Fraction, d: int) -> "NegCharacter":
        return cls(alpha, d, {})

    @classmethod
    def from_translation(cls, v: TreeTranslation, alpha: Fraction) -> "NegCharacter":
        """ell(phi(t)) = <v_0, t> for t in B_-; v must be of special form and supported on B_-."""
        if not v.special_form:
            raise ValueError("only special-form translations v = (v_0, 0, ..., 0) induce characters")
        out = {}
        for f, c in v.entry(0).raw_items():
            out[phi(f.tree())] = c
        return cls(alpha, v.d, out)

    def to_translation(self) -> TreeTranslation:
        return TreeTranslation(self.d, {0: LinComb({Forest((phi_inv(s),)): c for s, c in self.values.items()})})

    def __call__(self, mono: Monomial) -> Fraction:
        out = Fraction(1)
        for s in mono.factors:
            out *= self.values.get(s, Fraction(0))
            if not out:
                break
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, NegCharacter) and (self.alpha, self.d, self.values) == (other.alpha, other.d, other.values)

    def __repr__(self) -> str:
        return f"NegCharacter(alpha={self.alpha}, {self.values!r})"


def renormalize_M_ell(ell: NegCharacter, x: LinComb | Symbol) -> LinComb:
    """M_ell x = (ell (x) id) Delta^- x."""
    acc = Accumulator()
    for (mono, s), c in Delta_minus(x, ell.alpha).raw_items():
        val = ell(mono)
        if val:
            acc.add(s, c * val)
    return acc.build()


def tminus_coproduct(s: Symbol, alpha: Fraction) -> LinComb:
    """Delta^- as a coproduct on T_-: right legs are kept if negative, the unit
    symbol is sent to the empty monomial and everything else is dropped."""
    acc = Accumulator()
    for (mono, r), c in Delta_minus(s, alpha).raw_items():
        if r == ONE:
            acc.add((mono, Monomial()), c)
        elif is_negative(r, Fraction(alpha)):
            acc.add((mono, Monomial((r,))), c)
    return acc.build()


def compose_characters(ell: NegCharacter, other: NegCharacter) -> NegCharacter:
    """(ell (x) ell') Delta^- on the generators of T_-."""
    if (ell.alpha, ell.d) != (other.alpha, other.d):
        raise ValueError("characters live on different spaces")
    out = {}
    for s in negative_generators(ell.alpha, ell.d):
        val = Fraction(0)
        for (m1, m2), c in tminus_coproduct(s, ell.alpha).raw_items():
            val += c * ell(m1) * other(m2)
        if val:
            out[s] = val
    return NegCharacter(ell.alpha, ell.d, out)


# --- Delta^+ and the structure group -------------------------------------------------------


@lru_cache(maxsize=None)
def _delta_plus(s: Symbol) -> tuple:
    """Delta^+ with right legs in T_+ written as forests (J(x) <-> phi^{-1}(x))."""
    acc = {(Symbol((), s.tag), UNIT): Fraction(1)}
    for c in s.children.trees:
        planted = {}
        for (l, r), m in _delta_plus(phi(c)):
            key = (I(l), r)
            planted[key] = planted.get(key, 0) + m
        key = (ONE, Forest((c,)))
        planted[key] = planted.get(key, 0) + 1
        nxt: dict = {}
        for (l1, r1), c1 in acc.items():
            for (l2, r2), c2 in planted.items():
                k = (l1 * l2, r1 * r2)
                nxt[k] = nxt.get(k, 0) + c1 * c2
        acc = nxt
    return tuple((k, v) for k, v in acc.items() if v)


def delta_plus(x: LinComb | Symbol) -> LinComb:
    if isinstance(x, Symbol):
        x = LinComb.basis(x)
    acc = Accumulator()
    for s, c in x.raw_items():
        for key, m in _delta_plus(s):
            acc.add(key, c * m)
    return acc.build()


def reversed_ck(f: Forest) -> LinComb:
    """sigma_{12} Delta_star read through I phi on the trunk: keys ``(Symbol, Forest)``."""
    acc = Accumulator()
    for (branches, trunk), c in _ck_forest(f):
        sym = ONE
        for t in trunk.trees:
            sym = sym * I(phi(t))
        acc.add((sym, branches), c)
    return acc.build()


def structure_action(g, x: LinComb | Symbol) -> dict:
    """Gamma_g x = (id (x) g) Delta^+ x for a character ``g`` on forests.

    ``g`` is any callable from forests to floats (or Fractions); the result maps
    symbols to coefficients.
    """
    out: dict = {}
    for (s, f), c in delta_plus(x).raw_items():
        val = g(f)
        if val:
            out[s] = out.get(s, 0) + c * val
    return {k: v for k, v in out.items() if v}


def trace_character(X, i: int, j: int):
    """The character of X_{t_i, t_j} on forests (1 on the empty forest)."""

    def g(f: Forest):
        if f == UNIT:
            return 1.0
        return X.coefficient(i, j, f)

    return g


def apply_structure(g, y: dict) -> dict:
    out: dict = {}
    for s, c in y.items():
        for k, v in structure_action(g, s).items():
            out[k] = out.get(k, 0) + c * v
    return out


def gamma_cocycle_defect(X, i: int, j: int, k: int, max_nodes: int, d: int) -> float:
    """max |Gamma_{X_{t_j,t_k}} Gamma_{X_{t_i,t_j}} s - Gamma_{X_{t_i,t_k}} s| over symbols."""
    g_ij = trace_character(X, i, j)
    g_jk = trace_character(X, j, k)
    g_ik = trace_character(X, i, k)
    worst = 0.0
    for t in trees_up_to(max_nodes, d):
        s = phi(t)
        lhs = apply_structure(g_jk, structure_action(g_ij, s))
        rhs = structure_action(g_ik, s)
        for key in set(lhs) | set(rhs):
            worst = max(worst, abs(float(lhs.get(key, 0)) - float(rhs.get(key, 0))))
    return worst
