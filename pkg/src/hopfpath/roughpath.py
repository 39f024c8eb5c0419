"""Truncated rough path traces on time grids.

A geometric trace stores ``<X_{s,t}, w>`` for all words with ``1 <= |w| <= L``.
A branched trace stores values on trees only; forest values are products
(traces are characters by construction).  Exact operators from the algebraic
layer are converted to float evaluation plans.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial, floor
from typing import Literal, Sequence

import numpy as np

from .forest import ForestAlgebra, _ck_tree
from .freevec import LinComb
from .tensor import EMPTY, TensorAlgebra, WordTranslation, _shuffle_words
from .trees import UNIT, Forest, forests_up_to, tree_factorial, trees_up_to
from .translation import TreeTranslation, dual_translate_M

Flavor = Literal["geometric", "branched"]
PairMode = Literal["all", "prefix", "steps"]


class TraceError(ValueError):
    pass


# --- bases and evaluation plans -------------------------------------------------


@lru_cache(maxsize=None)
def basis_keys(flavor: Flavor, d: int, L: int) -> tuple:
    if flavor == "geometric":
        return tuple(w for w in TensorAlgebra(d, L).words() if len(w) > 0)
    return tuple(trees_up_to(L, d))


@dataclass(frozen=True)
class Plan:
    """Per output key, a list of ``(coef, left indices, right indices)`` monomials."""

    terms: tuple

    def product(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        out = np.empty(np.broadcast_shapes(X.shape, Y.shape))
        for k, ts in enumerate(self.terms):
            s = 0.0
            for c, li, ri in ts:
                p = c
                for a in li:
                    p = p * X[..., a]
                for b in ri:
                    p = p * Y[..., b]
                s = s + p
            out[..., k] = s
        return out


@lru_cache(maxsize=None)
def product_plan(flavor: Flavor, d: int, L: int) -> Plan:
    keys = basis_keys(flavor, d, L)
    idx = {k: i for i, k in enumerate(keys)}
    terms = []
    if flavor == "geometric":
        for w in keys:
            ts = []
            for i in range(len(w) + 1):
                u, v = w[:i], w[i:]
                ts.append((1.0, (idx[u],) if u else (), (idx[v],) if v else ()))
            terms.append(tuple(ts))
    else:
        for t in keys:
            ts = []
            for (left, right), c in _ck_tree(t):
                ts.append((float(c), tuple(idx[s] for s in left.trees), tuple(idx[s] for s in right.trees)))
            terms.append(tuple(ts))
    return Plan(tuple(terms))


@dataclass(frozen=True)
class LinearPlan:
    """Per output key, ``sum_j c_j prod X[idx_j]`` (empty index tuple = constant)."""

    terms: tuple

    def apply(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[:-1] + (len(self.terms),))
        for k, ts in enumerate(self.terms):
            s = np.zeros(X.shape[:-1])
            for c, ix in ts:
                p = c
                for a in ix:
                    p = p * X[..., a]
                s = s + p
            out[..., k] = s
        return out


def _monomial_plan(images: Sequence[LinComb], idx: dict, flavor: Flavor) -> LinearPlan:
    terms = []
    for img in images:
        ts = []
        for key, c in img.raw_items():
            if flavor == "geometric":
                ix = () if key == EMPTY else (_lookup(idx, key),)
            else:
                ix = tuple(_lookup(idx, t) for t in key.trees)
            ts.append((float(c), ix))
        terms.append(tuple(ts))
    return LinearPlan(tuple(terms))


def _lookup(idx: dict, key):
    try:
        return idx[key]
    except KeyError:
        raise TraceError(f"trace lacks key {key!r} needed by the operator") from None


# --- traces ----------------------------------------------------------------------


@dataclass
class RoughPathTrace:
    grid: np.ndarray
    flavor: Flavor
    d: int
    level: int
    values: dict[tuple[int, int], np.ndarray]
    alpha: float | None = None
    keys: tuple = field(init=False)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        if self.grid.ndim != 1 or len(self.grid) < 2 or np.any(np.diff(self.grid) <= 0):
            raise TraceError("grid must be strictly increasing with at least 2 points")
        self.keys = basis_keys(self.flavor, self.d, self.level)

    @property
    def m(self) -> int:
        return len(self.grid) - 1

    @property
    def index(self) -> dict:
        return _index(self.flavor, self.d, self.level)

    def pair(self, i: int, j: int) -> np.ndarray:
        if i == j:
            return np.zeros(len(self.keys))
        try:
            return self.values[(i, j)]
        except KeyError:
            raise TraceError(f"pair ({i},{j}) not stored") from None

    def coefficient(self, i: int, j: int, key) -> float:
        """Value on a basis key (forests for branched traces, words for geometric)."""
        x = self.pair(i, j)
        if self.flavor == "geometric":
            return 1.0 if len(key) == 0 else float(x[self.index[key]])
        f = key if isinstance(key, Forest) else Forest((key,))
        out = 1.0
        for t in f.trees:
            out *= x[self.index[t]]
        return float(out)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.values)

    def restrict(self, level: int) -> "RoughPathTrace":
        if level > self.level:
            raise TraceError(f"trace has level {self.level} < {level}")
        keep = [self.index[k] for k in basis_keys(self.flavor, self.d, level)]
        return RoughPathTrace(self.grid, self.flavor, self.d, level, {p: v[keep] for p, v in self.values.items()}, self.alpha)

    def to_json(self) -> str:
        from .syntax import format_key

        names = [format_key(k) for k in self.keys]
        out = {}
        for (i, j), v in sorted(self.values.items()):
            out[f"{float(self.grid[i])!r},{float(self.grid[j])!r}"] = {n: float(c) for n, c in zip(names, v)}
        return json.dumps(out, indent=1)


@lru_cache(maxsize=None)
def _index(flavor: Flavor, d: int, L: int) -> dict:
    return {k: i for i, k in enumerate(basis_keys(flavor, d, L))}


def from_increments(
    grid: Sequence[float],
    increments: np.ndarray,
    flavor: Flavor,
    d: int,
    level: int,
    pairs: PairMode | None = None,
    all_pairs_max: int = 128,
) -> RoughPathTrace:
    """Chain per-step values into grid-pair values by Chen products.

    ``pairs="all"`` stores every pair; ``"prefix"`` stores (0,k) and (k,k+1);
    ``"steps"`` stores only (k,k+1).
    """
    grid = np.asarray(grid, dtype=float)
    m = len(grid) - 1
    inc = np.asarray(increments, dtype=float)
    if inc.shape != (m, len(basis_keys(flavor, d, level))):
        raise TraceError(f"increments have shape {inc.shape}")
    plan = product_plan(flavor, d, level)
    if pairs is None:
        pairs = "all" if m <= all_pairs_max else "prefix"
    values: dict[tuple[int, int], np.ndarray] = {}
    if pairs == "all":
        acc = np.empty((0, inc.shape[1]))
        for j in range(m):
            step = inc[j]
            acc = plan.product(acc, step[None, :]) if len(acc) else acc
            acc = np.vstack([acc, step[None, :]])
            for i in range(j + 1):
                values[(i, j + 1)] = acc[i].copy()
    elif pairs == "steps":
        for j in range(m):
            values[(j, j + 1)] = inc[j].copy()
    else:
        cur = None
        for j in range(m):
            values[(j, j + 1)] = inc[j].copy()
            cur = inc[j] if cur is None else plan.product(cur, inc[j])
            values[(0, j + 1)] = cur
    return RoughPathTrace(grid, flavor, d, level, values)


# --- lifts -------------------------------------------------------------------------


def _exp_increment_geometric(delta: np.ndarray, d: int, level: int) -> np.ndarray:
    keys = basis_keys("geometric", d, level)
    out = np.empty(delta.shape[:-1] + (len(keys),))
    for k, w in enumerate(keys):
        p = np.full(delta.shape[:-1], 1.0 / factorial(len(w)))
        for a in w:
            p = p * delta[..., a]
        out[..., k] = p
    return out


def _exp_increment_branched(delta: np.ndarray, d: int, level: int) -> np.ndarray:
    """exp_star of sum_i delta_i •_i: prod of node increments over the tree factorial."""
    keys = basis_keys("branched", d, level)
    out = np.empty(delta.shape[:-1] + (len(keys),))
    for k, t in enumerate(keys):
        p = np.full(delta.shape[:-1], 1.0 / tree_factorial(t))
        for a in t.labels():
            p = p * delta[..., a]
        out[..., k] = p
    return out


def lift_piecewise_linear(
    path: np.ndarray, level: int, grid: Sequence[float] | None = None, pairs: PairMode | None = None
) -> RoughPathTrace:
    """Geometric lift of the piecewise-linear interpolation of ``path`` (rows are samples in R^{1+d})."""
    path = np.asarray(path, dtype=float)
    if path.ndim != 2 or path.shape[0] < 2:
        raise TraceError("path needs at least 2 samples")
    d = path.shape[1] - 1
    grid = path[:, 0] if grid is None else np.asarray(grid, dtype=float)
    inc = _exp_increment_geometric(np.diff(path, axis=0), d, level)
    return from_increments(grid, inc, "geometric", d, level, pairs=pairs)


@lru_cache(maxsize=None)
def iota_plan(d: int, level: int) -> LinearPlan:
    alg = ForestAlgebra(d, level)
    widx = _index("geometric", d, level)
    images = []
    words = basis_keys("geometric", d, level)
    word_images = {w: alg.embed_iota(LinComb.basis(w)) for w in words}
    for t in basis_keys("branched", d, level):
        f = Forest((t,))
        img = LinComb({w: c[f] for w, c in word_images.items() if c[f]})
        images.append(img)
    return _monomial_plan(images, widx, "geometric")


def _apply_pointwise(plan: LinearPlan, values: dict) -> dict:
    keys = list(values)
    if not keys:
        return {}
    out = plan.apply(np.stack([values[k] for k in keys]))
    return {k: out[n] for n, k in enumerate(keys)}


def lift_branched_via_iota(g: RoughPathTrace) -> RoughPathTrace:
    """Apply iota pointwise to a geometric trace."""
    if g.flavor != "geometric":
        raise TraceError("expected a geometric trace")
    vals = _apply_pointwise(iota_plan(g.d, g.level), g.values)
    return RoughPathTrace(g.grid, "branched", g.d, g.level, vals, g.alpha)


def lift_branched_piecewise_linear(
    path: np.ndarray, level: int, grid: Sequence[float] | None = None, pairs: PairMode | None = None
) -> RoughPathTrace:
    """Branched canonical lift of a piecewise-linear path by per-step tree factorials."""
    path = np.asarray(path, dtype=float)
    d = path.shape[1] - 1
    grid = path[:, 0] if grid is None else np.asarray(grid, dtype=float)
    inc = _exp_increment_branched(np.diff(path, axis=0), d, level)
    return from_increments(grid, inc, "branched", d, level, pairs=pairs)


def brownian_increments(seed: int, grid: Sequence[float], d: int) -> np.ndarray:
    """Rows (dt, dB^1, ..., dB^d) from a per-call seeded generator."""
    grid = np.asarray(grid, dtype=float)
    h = np.diff(grid)
    rng = np.random.default_rng(seed)
    dB = rng.standard_normal((len(h), d)) * np.sqrt(h)[:, None]
    return np.column_stack([h, dB])


def brownian_lift(
    seed: int,
    grid: Sequence[float],
    d: int,
    scheme: Literal["ito", "strat"],
    level: int = 2,
    pairs: PairMode | None = None,
    increments: np.ndarray | None = None,
) -> RoughPathTrace:
    """Sampled branched lift of (t, B) with time on label 0.

    Ito: per-step characters supported on single nodes (left-point sums).
    Strat: per-step canonical lift of the linear segment.
    """
    if increments is None:
        increments = brownian_increments(seed, grid, d)
    inc = sampled_step_values(increments, d, level, scheme)
    return from_increments(grid, inc, "branched", d, level, pairs=pairs)


def sampled_step_values(
    increments: np.ndarray, d: int, level: int, scheme: Literal["ito", "strat"]
) -> np.ndarray:
    """Per-step branched values from rows ``(dt, dB^1, ..., dB^d)``; leading axes are batch axes."""
    if level > 3:
        raise TraceError("sampled lifts support at most 3 nodes")
    if scheme == "strat":
        return _exp_increment_branched(increments, d, level)
    if scheme == "ito":
        keys = basis_keys("branched", d, level)
        inc = np.zeros(increments.shape[:-1] + (len(keys),))
        for k, t in enumerate(keys):
            if t.size == 1:
                inc[..., k] = increments[..., t.label]
        return inc
    raise TraceError(f"unknown scheme {scheme!r}")


# --- checks and norms -----------------------------------------------------------


def chen_defect(X: RoughPathTrace, mode: Literal["all", "consecutive"] = "all") -> float:
    """Max over stored triples s<t<u and keys of |<X_{s,t} X_{t,u} - X_{s,u}, w>|."""
    plan = product_plan(X.flavor, X.d, X.level)
    stored = X.values
    worst = 0.0
    starts: dict[int, list[int]] = {}
    for i, j in stored:
        starts.setdefault(i, []).append(j)
    for i, ends in starts.items():
        for k in ends:
            mids = [j for j in range(i + 1, k) if (i, j) in stored and (j, k) in stored]
            if mode == "consecutive":
                mids = mids[:1] + mids[-1:]
            if not mids:
                continue
            left = np.stack([stored[(i, j)] for j in mids])
            right = np.stack([stored[(j, k)] for j in mids])
            diff = plan.product(left, right) - stored[(i, k)][None, :]
            worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def grouplike_defect(X: RoughPathTrace) -> float:
    """Max of |<X, u sh v> - <X,u><X,v>| for geometric traces; 0 for branched ones."""
    if X.flavor == "branched":
        return 0.0
    idx = X.index
    words = [w for w in X.keys]
    checks = []
    for u in words:
        for v in words:
            if len(u) + len(v) <= X.level and u <= v:
                sh = [(idx[ww], float(c)) for ww, c in _shuffle_words(u, v).items()]
                checks.append((idx[u], idx[v], sh))
    worst = 0.0
    for x in X.values.values():
        for a, b, sh in checks:
            worst = max(worst, abs(sum(c * x[k] for k, c in sh) - x[a] * x[b]))
    return worst


def _norm_keys(X: RoughPathTrace, max_level: int) -> list:
    if max_level > X.level:
        raise TraceError(f"norm needs level {max_level}, trace has {X.level}")
    if X.flavor == "geometric":
        return [w for w in X.keys if len(w) <= max_level]
    return [f for f in forests_up_to(max_level, X.d) if f != UNIT]


def _ratio_sup(X: RoughPathTrace, exponents: dict, keys: list) -> float:
    worst = 0.0
    for (i, j), _ in X.values.items():
        dt = abs(X.grid[j] - X.grid[i])
        for key in keys:
            val = abs(X.coefficient(i, j, key))
            if val:
                worst = max(worst, val / dt ** exponents[key])
    return worst


def _grade0(key) -> tuple[int, int]:
    if isinstance(key, Forest):
        return key.size, key.count_label(0)
    return len(key), key.count(0)


def holder_norm(X: RoughPathTrace, alpha: float, max_level: int | None = None) -> float:
    """max_{|w| <= floor(1/alpha)} sup |<X_{u,v}, w>| / |v-u|^{alpha |w|}."""
    if not 0 < alpha <= 1:
        raise TraceError("alpha must lie in (0, 1]")
    keys = _norm_keys(X, floor(1 / alpha + 1e-12) if max_level is None else max_level)
    return _ratio_sup(X, {k: alpha * _grade0(k)[0] for k in keys}, keys)


def mixed_norm(X: RoughPathTrace, alpha: float, max_level: int | None = None) -> float:
    """Exponent (1-alpha)|w|_0 + alpha|w| with |w|_0 the number of 0 letters/labels."""
    if not 0 < alpha <= 1:
        raise TraceError("alpha must lie in (0, 1]")
    keys = _norm_keys(X, floor(1 / alpha + 1e-12) if max_level is None else max_level)
    exps = {}
    for k in keys:
        n, n0 = _grade0(k)
        exps[k] = (1 - alpha) * n0 + alpha * n
    return _ratio_sup(X, exps, keys)


# --- translation ------------------------------------------------------------------


@lru_cache(maxsize=64)
def translation_plan(v, flavor: Flavor, d: int, level: int) -> LinearPlan:
    """Linear map on stored key values realizing the dual translation."""
    idx = _index(flavor, d, level)
    if flavor == "geometric":
        alg = TensorAlgebra(d, level)
        images = [alg.dual_translate(v, LinComb.basis(w)) for w in basis_keys(flavor, d, level)]
    else:
        images = [dual_translate_M(v, LinComb.basis(Forest((t,)))) for t in basis_keys(flavor, d, level)]
    return _monomial_plan(images, idx, flavor)


def translate_trace(v: WordTranslation | TreeTranslation, X: RoughPathTrace, level: int | None = None) -> RoughPathTrace:
    """Pointwise (T_v X)_{s,t} or (M_v X)_{s,t} via the dual operator."""
    level = X.level if level is None else level
    if level > X.level:
        raise TraceError(f"level shortfall: requested {level}, trace has {X.level}")
    if v.d != X.d:
        raise TraceError("dimension mismatch")
    if X.flavor == "geometric" and not isinstance(v, WordTranslation):
        raise TraceError("geometric traces need a Lie-polynomial translation")
    if X.flavor == "branched" and not isinstance(v, TreeTranslation):
        raise TraceError("branched traces need a tree translation")
    if isinstance(v, WordTranslation):
        v.check_primitive(TensorAlgebra(v.d, max(v.max_grade(), 1)))
    src = X if level == X.level else X.restrict(level)
    plan = translation_plan(v, X.flavor, X.d, level)
    vals = _apply_pointwise(plan, src.values)
    return RoughPathTrace(X.grid, X.flavor, X.d, level, vals, X.alpha)


def read_path_csv(path: str) -> np.ndarray:
    """CSV with header ``t,x1,...,xd``; returns the sample matrix with time in column 0."""
    import csv

    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise TraceError("empty CSV")
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "t":
        raise TraceError("CSV header must start with 't'")
    expected = ["t"] + [f"x{i}" for i in range(1, len(header))]
    if header != expected:
        raise TraceError(f"CSV header must be {','.join(expected)}")
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise TraceError("CSV needs at least 2 samples")
    return data
