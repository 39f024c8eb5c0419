"""Numerical experiments: Ito-Stratonovich convergence, RDE equivalence, Euler order, norm scaling."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import floor
from typing import Sequence

import numpy as np
import sympy as sp

from .rde import PolyVectorField, elementary_differential, equivalence_experiment, euler_weight, solve
from .roughpath import (
    basis_keys,
    holder_norm,
    lift_branched_piecewise_linear,
    lift_piecewise_linear,
    mixed_norm,
    product_plan,
    sampled_step_values,
    translate_trace,
    translation_plan,
)
from .syntax import parse
from .tensor import TensorAlgebra, WordTranslation, letter, lie_bracket
from .translation import TreeTranslation, half_cherries
from .trees import tree_factorial, trees_up_to


def slope(ns: Sequence[float], errs: Sequence[float]) -> float:
    """Least-squares slope of log2(err) against log2(n)."""
    return float(np.polyfit(np.log2(ns), np.log2(errs), 1)[0])


def _chain(plan, steps: np.ndarray) -> np.ndarray:
    """Chen product of per-step values along axis -2, batched over leading axes."""
    cur = steps[..., 0, :]
    for j in range(1, steps.shape[-2]):
        cur = plan.product(cur, steps[..., j, :])
    return cur


# --- Ito-Stratonovich -------------------------------------------------------------


@dataclass
class ItoStratConfig:
    seeds: int = 100
    ks: tuple[int, ...] = (8, 9, 10, 11, 12)
    T: float = 1.0
    base_seed: int = 0


@dataclass
class ItoStratResult:
    ns: list[int]
    rms: list[float]
    slope: float


def ito_strat_convergence(cfg: ItoStratConfig = ItoStratConfig()) -> ItoStratResult:
    """RMS over seeds and 2-node keys of M_v(Ito lift) - Strat lift at (0, T).

    Every seed draws one Brownian path on the finest grid; coarser grids sum its increments.
    """
    d, level = 1, 2
    nmax = 2 ** max(cfg.ks)
    h = cfg.T / nmax
    dB = np.stack([np.random.default_rng(cfg.base_seed + s).standard_normal(nmax) * np.sqrt(h) for s in range(cfg.seeds)])
    plan = product_plan("branched", d, level)
    translate = translation_plan(half_cherries(d), "branched", d, level)
    keys = basis_keys("branched", d, level)
    two = [k for k, t in enumerate(keys) if t.size == 2]
    ns, rms = [], []
    for k in cfg.ks:
        n = 2**k
        coarse = dB.reshape(cfg.seeds, n, nmax // n).sum(axis=2)
        inc = np.stack([np.full_like(coarse, cfg.T / n), coarse], axis=-1)
        ito = _chain(plan, sampled_step_values(inc, d, level, "ito"))
        strat = _chain(plan, sampled_step_values(inc, d, level, "strat"))
        diff = translate.apply(ito)[:, two] - strat[:, two]
        ns.append(n)
        rms.append(float(np.sqrt(np.mean(diff**2))))
    return ItoStratResult(ns, rms, slope(ns, rms))


# --- RDE equivalence ----------------------------------------------------------------


@dataclass
class EquivalenceConfig:
    field: list = field(default_factory=lambda: [["0", "0"], ["y2", "1 - y1*y2/2"], ["1 + y1**2/4", "y1"]])
    driver: tuple[str, str] = ("sin(2*t)", "t**2 - t/2")
    v0: str = "(2 (1))"
    y0: tuple[float, float] = (0.5, -0.25)
    L: int = 2
    T: float = 1.0
    ns: tuple[int, ...] = (256, 512, 1024, 2048)


@dataclass
class RefinementResult:
    ns: list[int]
    errors: list[float]
    order: float


def _expr_path(exprs: Sequence[str], T: float, n: int) -> np.ndarray:
    t = sp.Symbol("t")
    grid = np.linspace(0.0, T, n + 1)
    cols = [grid]
    for e in exprs:
        fn = sp.lambdify(t, sp.sympify(e), modules="numpy")
        cols.append(np.broadcast_to(np.asarray(fn(grid), dtype=float), grid.shape))
    return np.column_stack(cols)


def rde_equivalence(cfg: EquivalenceConfig = EquivalenceConfig()) -> RefinementResult:
    """Max trajectory discrepancy of the two sides of the translated-RDE equivalence per grid."""
    f = PolyVectorField.from_strings(cfg.field)
    d = f.d
    v = TreeTranslation(d, {0: parse(cfg.v0, "forest")})
    top = max(v.max_grade(), 1) * cfg.L
    errs = []
    for n in cfg.ns:
        X = lift_branched_piecewise_linear(_expr_path(cfg.driver, cfg.T, n), top, pairs="steps")
        errs.append(equivalence_experiment(f, v, X, cfg.y0, cfg.L).discrepancy)
    return RefinementResult(list(cfg.ns), errs, -slope(cfg.ns, errs))


# --- Euler scheme -------------------------------------------------------------------


def euler_taylor_gap(L: int) -> sp.Expr:
    """One Euler step for y' = y with the time driver, minus y*exp(h), as a series in h."""
    h, y = sp.symbols("h y")
    f = PolyVectorField.from_strings([["y1"]])
    y1 = f.symbols()[0]
    step = sp.Integer(1) * y1
    for t in trees_up_to(L, 0):
        c = euler_weight(t)
        coef = sp.Rational(c.numerator, c.denominator) / tree_factorial(t) * h ** t.size
        step += coef * elementary_differential(f, t)[0]
    gap = sp.series(step.subs(y1, y) - y * sp.exp(h), h, 0, L + 2).removeO()
    return sp.expand(gap)


def euler_riccati(L: int, ns: Sequence[int] = (8, 16, 32, 64), y0: float = 0.5, T: float = 1.0) -> RefinementResult:
    """Global error of the Euler scheme for y' = y^2 against y0 / (1 - T y0)."""
    f = PolyVectorField.from_strings([["y1**2"]])
    exact = y0 / (1 - T * y0)
    errs = []
    for n in ns:
        grid = np.linspace(0.0, T, n + 1)
        X = lift_branched_piecewise_linear(grid[:, None], L, pairs="steps")
        errs.append(abs(solve(f, X, [y0], L)[-1, 0] - exact))
    return RefinementResult(list(ns), errs, -slope(ns, errs))


# --- norm scaling ---------------------------------------------------------------------


@dataclass
class NormScalingResult:
    ms: list[int]
    mixed: list[float]
    ratios: list[float]


def norm_scaling(ms: Sequence[int] = (8, 16, 32, 64, 128), alpha: float = 0.5) -> NormScalingResult:
    """Mixed norm of the time-space line and translated Holder ratios over dyadic grids.

    The driver is t -> (t, x1(t), x2(t)) sampled on each grid and interpolated linearly.
    The translation is v_0 = [e_1, e_2], of grade N = 2, so the ratio family uses
    the exponent alpha |w| / N up to level floor(N / alpha).
    """
    d, N = 2, 2
    A = TensorAlgebra(d, N)
    v = WordTranslation(d, {0: lie_bracket(A, letter(1), letter(2))})
    top = floor(N / alpha + 1e-12)
    mixed, ratios = [], []
    for m in ms:
        t = np.linspace(0.0, 1.0, m + 1)
        path = np.column_stack([t, np.sin(2 * np.pi * t), np.cos(3 * t) + t])
        Xb = lift_branched_piecewise_linear(path, floor(1 / alpha + 1e-12), pairs="all")
        mixed.append(mixed_norm(Xb, alpha))
        Xg = lift_piecewise_linear(path, top, pairs="all")
        ratios.append(holder_norm(translate_trace(v, Xg), alpha / N, max_level=top))
    return NormScalingResult(list(ms), mixed, ratios)


__all__ = [
    "ItoStratConfig",
    "ito_strat_convergence",
    "EquivalenceConfig",
    "rde_equivalence",
    "euler_taylor_gap",
    "euler_riccati",
    "norm_scaling",
    "slope",
]
