"""Polynomial vector fields, elementary differentials and the branched Euler scheme."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np
import sympy as sp

from .forest import ForestAlgebra
from .roughpath import RoughPathTrace, TraceError, basis_keys, lift_branched_via_iota, translate_trace
from .tensor import WordTranslation
from .trees import LabeledTree, shape, symmetry_factor
from .translation import TreeTranslation, iota_translation


class FieldError(ValueError):
    pass


def state_symbols(e: int) -> tuple[sp.Symbol, ...]:
    return tuple(sp.Symbol(f"y{a}") for a in range(1, e + 1))


@dataclass
class PolyVectorField:
    """f = (f_0, ..., f_d), each an e-vector of rational polynomials in y1..ye."""

    e: int
    fields: list[list[sp.Expr]]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ys = set(state_symbols(self.e))
        clean = []
        for i, comp in enumerate(self.fields):
            if len(comp) != self.e:
                raise FieldError(f"f_{i} has {len(comp)} components, expected {self.e}")
            row = []
            for expr in comp:
                ex = sp.sympify(expr, rational=True) if isinstance(expr, str) else sp.nsimplify(expr, rational=True)
                extra = ex.free_symbols - ys
                if extra:
                    raise FieldError(f"unknown symbols {sorted(map(str, extra))} in f_{i}")
                if not ex.is_polynomial(*state_symbols(self.e)):
                    raise FieldError(f"f_{i} is not polynomial")
                row.append(sp.expand(ex))
            clean.append(row)
        self.fields = clean

    @classmethod
    def from_strings(cls, fields: Sequence[Sequence[str]]) -> "PolyVectorField":
        if not fields:
            raise FieldError("need at least one vector field")
        return cls(len(fields[0]), [list(c) for c in fields])

    @property
    def d(self) -> int:
        return len(self.fields) - 1

    def symbols(self) -> tuple[sp.Symbol, ...]:
        return state_symbols(self.e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVectorField) or self.e != other.e or len(self.fields) != len(other.fields):
            return False
        return all(sp.expand(a - b) == 0 for r1, r2 in zip(self.fields, other.fields) for a, b in zip(r1, r2))


# --- elementary differentials -------------------------------------------------


def directional(expr_vec: Sequence[sp.Expr], g: Sequence[sp.Expr], ys: Sequence[sp.Symbol]) -> list[sp.Expr]:
    """(g . grad) applied componentwise."""
    return [sp.expand(sum(sp.diff(ex, y) * gb for y, gb in zip(ys, g))) for ex in expr_vec]


def elementary_differential(f: PolyVectorField, t: LabeledTree) -> list[sp.Expr]:
    """f_{•_i} = f_i; f_{[t_1..t_n]_i} = D^n f_i (f_{t_1}, ..., f_{t_n})."""
    if t.max_label() > f.d:
        raise FieldError(f"{t!r} has a label outside 0..{f.d}")
    cached = f._cache.get(t)
    if cached is not None:
        return cached
    ys = f.symbols()
    base = f.fields[t.label]
    if not t.children:
        out = list(base)
    else:
        # differentiate n times with frozen directions, then substitute
        zs = [tuple(sp.Dummy(f"z{k}_{a}") for a in range(f.e)) for k in range(len(t.children))]
        expr = list(base)
        for z in zs:
            expr = directional(expr, z, ys)
        subs = {}
        for z, c in zip(zs, t.children):
            subs.update(dict(zip(z, elementary_differential(f, c))))
        out = [sp.expand(ex.xreplace(subs)) for ex in expr]
    f._cache[t] = out
    return out


def field_of_word(f: PolyVectorField, word: Sequence[int]) -> list[sp.Expr]:
    """V_{i1} ... V_{ik} applied to the identity, V_i = f_i . grad."""
    ys = f.symbols()
    g = list(ys)
    for a in reversed(tuple(word)):
        g = directional(g, f.fields[a], ys)
    return g


def pre_lie_field(f: PolyVectorField, g: Sequence[sp.Expr], h: Sequence[sp.Expr]) -> list[sp.Expr]:
    """g |> h = (g . grad) h."""
    return directional(h, g, f.symbols())


# --- Euler normalization ---------------------------------------------------------


@lru_cache(maxsize=None)
def euler_table() -> dict:
    """Committed per-shape normalization: ``{shape: "inverse_symmetry" | "unit"}``."""
    text = resources.files("hopfpath").joinpath("data/euler_weights.json").read_text()
    return json.loads(text)["shapes"]


def euler_weight(t: LabeledTree) -> Fraction:
    from .syntax import format_tree

    key = format_tree(shape(t))
    rule = euler_table().get(key)
    if rule is None:
        raise FieldError(f"no calibrated Euler weight for shape {key}; extend the fixture")
    return Fraction(1, symmetry_factor(t)) if rule == "inverse_symmetry" else Fraction(1)


def translated_field(f: PolyVectorField, v: TreeTranslation | WordTranslation) -> PolyVectorField:
    """f^v_i = f_i + Phi_f(v_i), Phi_f(x) = sum_t <x,t> c(t) f_t for trees, or the
    operator composition of letters for Lie polynomials."""
    if v.d != f.d:
        raise FieldError("dimension mismatch")
    out = [list(c) for c in f.fields]
    for i, e in v.entries.items():
        acc = [sp.Integer(0)] * f.e
        for key, c in e.raw_items():
            if isinstance(v, WordTranslation):
                vec = field_of_word(f, key)
                weight = sp.Rational(c.numerator, c.denominator)
            else:
                t = key.tree()
                vec = elementary_differential(f, t)
                cw = c * euler_weight(t)
                weight = sp.Rational(cw.numerator, cw.denominator)
            acc = [a + weight * b for a, b in zip(acc, vec)]
        out[i] = [sp.expand(a + b) for a, b in zip(out[i], acc)]
    return PolyVectorField(f.e, out)


# --- Euler scheme ---------------------------------------------------------------


class EulerScheme:
    """y' = y + sum_{|t| <= L} c(t) <X_{s,t}, t> f_t(y), compiled to numpy."""

    def __init__(self, f: PolyVectorField, d: int, L: int):
        if f.d != d:
            raise FieldError(f"field has {f.d + 1} components, driver needs {d + 1}")
        self.f = f
        self.d = d
        self.L = L
        self.trees = basis_keys("branched", d, L)
        self.weights = np.array([float(euler_weight(t)) for t in self.trees])
        rows = [elementary_differential(f, t) for t in self.trees]
        mat = sp.Matrix(rows)
        self._eval = sp.lambdify([f.symbols()], mat, modules="numpy")
        self._zero = [k for k, r in enumerate(rows) if all(ex == 0 for ex in r)]

    def differentials(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(self._eval(tuple(y)), dtype=float).reshape(len(self.trees), self.f.e)

    def step(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """``x`` holds driver values on the scheme trees."""
        return y + (self.weights * x) @ self.differentials(y)


def _driver_values(X: RoughPathTrace, L: int, i: int, j: int) -> np.ndarray:
    if X.flavor != "branched":
        raise TraceError("Euler scheme needs a branched trace; lift geometric traces with iota")
    if L > X.level:
        raise TraceError(f"trace has level {X.level} < {L}")
    x = X.pair(i, j)
    if L == X.level:
        return x
    n = len(basis_keys("branched", X.d, L))
    return x[:n]


def euler_step(f: PolyVectorField, X: RoughPathTrace, i: int, j: int, y: np.ndarray, L: int) -> np.ndarray:
    scheme = EulerScheme(f, X.d, L)
    return scheme.step(_driver_values(X, L, i, j), np.asarray(y, dtype=float))


def solve(f: PolyVectorField, X: RoughPathTrace, y0: Sequence[float], L: int, scheme: EulerScheme | None = None) -> np.ndarray:
    """Compose Euler steps over consecutive grid points; returns the (m+1, e) trajectory."""
    scheme = scheme or EulerScheme(f, X.d, L)
    y = np.asarray(y0, dtype=float)
    out = [y]
    for k in range(X.m):
        y = scheme.step(_driver_values(X, L, k, k + 1), y)
        out.append(y)
    return np.array(out)


@dataclass
class EquivalenceResult:
    discrepancy: float
    translated_driver: np.ndarray
    translated_field: np.ndarray


def equivalence_experiment(
    f: PolyVectorField,
    v: TreeTranslation | WordTranslation,
    X: RoughPathTrace,
    y0: Sequence[float],
    L: int,
) -> EquivalenceResult:
    """Solve dY = f(Y) d(M_v X) with trees up to N*L and dY = f^v(Y) dX with trees up to L."""
    if X.flavor == "geometric":
        if not isinstance(v, WordTranslation):
            raise TraceError("geometric drivers need a Lie-polynomial translation")
        fv = translated_field(f, v)
        v = iota_translation(ForestAlgebra(v.d, max(v.max_grade(), 1)), v)
        X = lift_branched_via_iota(X)
    else:
        fv = translated_field(f, v)
    N = max(v.max_grade(), 1)
    top = N * L
    if X.level < top:
        raise TraceError(f"driver needs level {top} for the translated side, has {X.level}")
    MX = translate_trace(v, X, level=top)
    a = solve(f, MX, y0, top)
    b = solve(fv, X, y0, L)
    return EquivalenceResult(float(np.max(np.abs(a - b))), a, b)


# --- calibration ------------------------------------------------------------------


def tree_field(t: LabeledTree) -> PolyVectorField:
    """A field on R^{|t|} whose node v moves with the product of its children's coordinates.

    At the origin only trees isomorphic to ``t`` have a nonzero root component,
    which isolates the weight of ``t``.
    """
    from .trees import tree_nodes

    labels, parents, children = tree_nodes(t)
    ys = state_symbols(len(labels))
    comps = [sp.Mul(*(ys[u] for u in children[v])) for v in range(len(labels))]
    return PolyVectorField(len(labels), [comps])


def calibrate_euler_weights(max_nodes: int) -> dict[str, str]:
    """Solve for c(shape) from the exact flow of y' = f(y) and snap to {1, 1/sigma}.

    The flow's order-n Taylor term is D^{n-1} f / n!; the Euler step with the
    canonical lift of X_t = t contributes sum_t c(t) h^n / gamma(t) f_t.  One
    test field per shape gives one equation per shape, read off at the origin
    in the root coordinate.
    """
    from .syntax import format_tree
    from .trees import tree_factorial, trees_of_size

    out: dict[str, str] = {}
    for n in range(1, max_nodes + 1):
        shapes = list(trees_of_size(n, 0))
        cs = sp.symbols(f"c0:{len(shapes)}")
        eqs = []
        for probe in shapes:
            f = tree_field(probe)
            ys = f.symbols()
            origin = {y: 0 for y in ys}
            flow = list(f.fields[0])
            for _ in range(n - 1):
                flow = directional(flow, f.fields[0], ys)
            target = flow[0].xreplace(origin) / sp.factorial(n)
            lhs = sum(
                c * sp.Rational(1, tree_factorial(s)) * elementary_differential(f, s)[0].xreplace(origin)
                for c, s in zip(cs, shapes)
            )
            eqs.append(sp.expand(lhs - target))
        sol = sp.solve(eqs, cs, dict=True)
        if len(sol) != 1 or set(sol[0]) != set(cs):
            raise FieldError(f"calibration is not unique at {n} nodes")
        for c, s in zip(cs, shapes):
            val = sol[0][c]
            sigma = symmetry_factor(s)
            if val == sp.Rational(1, sigma):
                out[format_tree(s)] = "inverse_symmetry"
            elif val == 1:
                out[format_tree(s)] = "unit"
            else:
                raise FieldError(f"shape {format_tree(s)} calibrates to {val}, outside {{1, 1/sigma}}")
    return out
