"""Property suites run by ``hopfpath verify``; each check names its basis element."""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Iterator

from .freevec import Accumulator, LinComb, tensor
from .forest import ForestAlgebra
from .monomial import Monomial
from .tensor import TensorAlgebra, Word, WordTranslation, lie_bracket
from .trees import Forest, LabeledTree, trees_up_to
from .translation import (
    DualTranslation,
    TreeTranslation,
    delta,
    dual_translate_M,
    half_cherries,
    hat_D_sum,
    iota_translation,
    ito_strat_convert,
    translate_M_prelie,
)

SUITES = ("hopf", "prelie", "adjoint", "cointeraction", "itostrat", "bhz", "rde")


@dataclass(frozen=True)
class SuiteConfig:
    max_nodes: int = 4
    d: int = 2
    seed: int = 0
    n_translations: int = 5
    alphas: tuple[Fraction, ...] = (Fraction(3, 10), Fraction(2, 5))


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    element: str
    fn: Callable[[], bool]


@dataclass(frozen=True)
class CheckResult:
    check: Check
    ok: bool
    detail: str = ""


def _fmt(k) -> str:
    from .syntax import format_key

    return format_key(k)


def _b(x) -> LinComb:
    return LinComb.basis(x)


# --- random primitive translations -----------------------------------------------------


def random_tree_series(rng: random.Random, d: int, max_nodes: int, terms: int = 3) -> LinComb:
    pool = trees_up_to(max_nodes, d)
    acc = Accumulator()
    for _ in range(terms):
        t = rng.choice(pool)
        acc.add(Forest((t,)), Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3)))
    return acc.build()


def random_tree_translation(rng: random.Random, d: int, max_nodes: int, special: bool = False) -> TreeTranslation:
    labels = [0] if special else list(range(d + 1))
    entries = {}
    for i in labels:
        if special or rng.random() < 0.7:
            entries[i] = random_tree_series(rng, d, max_nodes)
    return TreeTranslation(d, entries)


def random_lie_translation(rng: random.Random, d: int, special: bool = False) -> WordTranslation:
    alg = TensorAlgebra(d, 3)
    gens = [_b(Word((a,))) for a in range(d + 1)]
    labels = [0] if special else list(range(d + 1))
    entries = {}
    for i in labels:
        acc = LinComb.zero()
        for _ in range(2):
            a, b, c = (rng.randrange(d + 1) for _ in range(3))
            q = Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 2))
            kind = rng.randrange(3)
            if kind == 0:
                x = gens[a]
            elif kind == 1:
                x = lie_bracket(alg, gens[a], gens[b])
            else:
                x = lie_bracket(alg, gens[a], lie_bracket(alg, gens[b], gens[c]))
            acc = acc + x * q
        if acc:
            entries[i] = acc
    return WordTranslation(d, entries)


# --- generic Hopf checks -----------------------------------------------------------------


def _apply_left(op, x: LinComb) -> LinComb:
    acc = Accumulator()
    for (a, b), c in x.raw_items():
        for (a1, a2), m in op(_b(a)).raw_items():
            acc.add((a1, a2, b), c * m)
    return acc.build()


def _apply_right(op, x: LinComb) -> LinComb:
    acc = Accumulator()
    for (a, b), c in x.raw_items():
        for (b1, b2), m in op(_b(b)).raw_items():
            acc.add((a, b1, b2), c * m)
    return acc.build()


def coassociative(cop, x: LinComb) -> bool:
    dx = cop(x)
    return _apply_left(cop, dx) == _apply_right(cop, dx)


def counital(cop, counit_key, x: LinComb) -> bool:
    dx = cop(x)
    left = LinComb((b, c) for (a, b), c in dx.raw_items() if a == counit_key)
    right = LinComb((a, c) for (a, b), c in dx.raw_items() if b == counit_key)
    return left == x and right == x


def antipode_ok(cop, prod, anti, unit: LinComb, counit, x: LinComb) -> bool:
    dx = cop(x)
    left = Accumulator()
    right = Accumulator()
    for (a, b), c in dx.raw_items():
        left.add_lincomb(prod(anti(_b(a)), _b(b)), c)
        right.add_lincomb(prod(_b(a), anti(_b(b))), c)
    target = unit * counit(x)
    return left.build() == target and right.build() == target


def _hopf_checks(suite: str, label: str, basis, cop, prod, anti, unit, counit, unit_key) -> Iterator[Check]:
    for k in basis:
        x = _b(k)
        e = _fmt(k)
        yield Check(suite, f"{label}: coassociativity", e, lambda x=x: coassociative(cop, x))
        yield Check(suite, f"{label}: counit", e, lambda x=x: counital(cop, unit_key, x))
        yield Check(suite, f"{label}: antipode", e, lambda x=x: antipode_ok(cop, prod, anti, unit, counit, x))


def suite_hopf(cfg: SuiteConfig) -> Iterator[Check]:
    N, d = cfg.max_nodes, cfg.d
    T = TensorAlgebra(d, N)
    F = ForestAlgebra(d, N)
    words = T.words()
    forests = F.forests()
    yield from _hopf_checks("hopf", "concat/unshuffle", words, T.shuffle_coproduct, T.concat, T.antipode, T.unit(), T.counit, Word())
    yield from _hopf_checks("hopf", "shuffle/deconcat", words, T.deconcat, T.shuffle, T.antipode, T.unit(), T.counit, Word())
    unit_key = Forest(())
    yield from _hopf_checks("hopf", "forest/Delta_star", forests, F.ck, F.forest_product, F.ck_antipode, F.unit(), F.counit, unit_key)
    yield from _hopf_checks("hopf", "star/Delta_odot", forests, F.odot_coproduct, F.gl_product, F.gl_antipode, F.unit(), F.counit, unit_key)


# --- pre-Lie -----------------------------------------------------------------------------


def suite_prelie(cfg: SuiteConfig) -> Iterator[Check]:
    N, d = cfg.max_nodes, cfg.d
    F = ForestAlgebra(d, N)
    trees = F.trees()

    def prelie_identity(x, y, z) -> bool:
        lhs = F.graft(F.graft(x, y), z) - F.graft(x, F.graft(y, z))
        rhs = F.graft(F.graft(y, x), z) - F.graft(y, F.graft(x, z))
        return lhs == rhs

    def commutators(s, t) -> bool:
        return F.graft(s, t) - F.graft(t, s) == F.gl_product(s, t) - F.gl_product(t, s)

    def tree_part(s, t) -> bool:
        return F.gl_product(s, t).filter(lambda f: f.is_tree) == F.graft(s, t)

    for s, t in product(trees, repeat=2):
        if s.size + t.size > N:
            continue
        a, b = _b(Forest((s,))), _b(Forest((t,)))
        e = f"{_fmt(s)} , {_fmt(t)}"
        yield Check("prelie", "graft commutator = star commutator", e, lambda a=a, b=b: commutators(a, b))
        yield Check("prelie", "tree part of star = graft", e, lambda a=a, b=b: tree_part(a, b))
        for u in trees:
            if s.size + t.size + u.size > N:
                continue
            c = _b(Forest((u,)))
            yield Check(
                "prelie",
                "pre-Lie identity",
                f"{e} , {_fmt(u)}",
                lambda a=a, b=b, c=c: prelie_identity(a, b, c),
            )


# --- translations and adjoints --------------------------------------------------------------


def suite_adjoint(cfg: SuiteConfig) -> Iterator[Check]:
    N, d = cfg.max_nodes, cfg.d
    rng = random.Random(cfg.seed)
    F = ForestAlgebra(d, N)
    T = TensorAlgebra(d, N)
    forests = F.forests()
    words = T.words()
    for n in range(cfg.n_translations):
        v = random_tree_translation(rng, d, max(1, min(2, N - 1)), special=(n % 2 == 0))
        M = DualTranslation(F, v)
        dual_f = lru_cache(maxsize=None)(lambda g, v=v: dual_translate_M(v, _b(g)))
        tag = f"v#{n}"
        for f in forests:
            x = _b(f)
            e = f"{tag} {_fmt(f)}"
            yield Check("adjoint", "transpose of delta = pre-Lie M_v", e, lambda x=x, M=M, v=v: M(x) == translate_M_prelie(F, v, x))
            yield Check(
                "adjoint",
                "Delta_odot M_v = (M_v (x) M_v) Delta_odot",
                e,
                lambda x=x, M=M: _within(F.odot_coproduct(M(x)), N) == _within(_tensor_apply(M, F.odot_coproduct(x)), N),
            )
            yield Check(
                "adjoint",
                "antipode commutes with M_v",
                e,
                lambda x=x, M=M: F.gl_antipode(M(x)) == M(F.gl_antipode(x)),
            )
            yield Check(
                "adjoint",
                "<M_v x, y> = <x, M_v* y>",
                e,
                lambda x=x, M=M, f=f, dual_f=dual_f: _adjoint_column(M(x), f, forests, dual_f),
            )
        trees = F.trees()
        for s, t in product(trees, repeat=2):
            if s.size + t.size > N:
                continue
            a, b = _b(Forest((s,))), _b(Forest((t,)))
            yield Check(
                "adjoint",
                "M_v(s graft t) = M_v s graft M_v t",
                f"{tag} {_fmt(s)} , {_fmt(t)}",
                lambda a=a, b=b, M=M: M(F.graft(a, b)) == F.graft(M(a), M(b)),
            )
        u = random_lie_translation(rng, d, special=(n % 2 == 0))
        dual_w = lru_cache(maxsize=None)(lambda y, u=u: T.dual_translate(u, _b(y)))
        tag = f"u#{n}"
        for wd in words:
            x = _b(wd)
            e = f"{tag} {_fmt(wd)}"
            Tu = lambda y, u=u: T.translate(u, y)  # noqa: E731
            yield Check(
                "adjoint",
                "Delta_shuffle T_v = (T_v (x) T_v) Delta_shuffle",
                e,
                lambda x=x, Tu=Tu: T._pairs_le_N(T.shuffle_coproduct(Tu(x))) == T._pairs_le_N(_tensor_apply(Tu, T.shuffle_coproduct(x))),
            )
            yield Check("adjoint", "antipode commutes with T_v", e, lambda x=x, Tu=Tu: T.antipode(Tu(x)) == Tu(T.antipode(x)))
            yield Check(
                "adjoint",
                "<T_v x, y> = <x, T_v* y>",
                e,
                lambda x=x, Tu=Tu, wd=wd, dual_w=dual_w: _adjoint_column(Tu(x), wd, words, dual_w),
            )


def _adjoint_column(image: LinComb, key, basis, dual) -> bool:
    """<T x, y> = <x, T* y> for all basis y, with x the basis element ``key``."""
    return all(image[y] == dual(y)[key] for y in basis)


def _within(x: LinComb, N: int) -> LinComb:
    return x.filter(lambda p: p[0].size + p[1].size <= N)


def _tensor_apply(op, x: LinComb) -> LinComb:
    acc = Accumulator()
    for (a, b), c in x.raw_items():
        acc.add_lincomb(tensor(op(_b(a)), op(_b(b))), c)
    return acc.build()


# --- cointeraction ---------------------------------------------------------------------------


def cointeraction_sides(F: ForestAlgebra, t: LabeledTree) -> tuple[LinComb, LinComb]:
    """(id (x) graft*) delta t and M_13 (delta (x) delta) graft* t."""
    lhs = Accumulator()
    for (mono, rest), c in delta(t).raw_items():
        for (b, tr), m in F.graft_adjoint(_b(rest)).raw_items():
            lhs.add((mono, b, tr), c * m)
    rhs = Accumulator()
    for (b, tr), c in F.graft_adjoint(_b(Forest((t,)))).raw_items():
        for (m1, b2), c1 in delta(b).raw_items():
            for (m2, t2), c2 in delta(tr).raw_items():
                rhs.add((m1 * m2, b2, t2), c * c1 * c2)
    return lhs.build(), rhs.build()


def suite_cointeraction(cfg: SuiteConfig) -> Iterator[Check]:
    F = ForestAlgebra(cfg.d, cfg.max_nodes)
    for t in F.trees():
        yield Check("cointeraction", "(id (x) graft*) delta = M_13 (delta (x) delta) graft*", _fmt(t), lambda t=t: _eq(*cointeraction_sides(F, t)))


def _eq(a, b) -> bool:
    return a == b


# --- Ito-Stratonovich -----------------------------------------------------------------------


def suite_itostrat(cfg: SuiteConfig) -> Iterator[Check]:
    d = cfg.d
    v = half_cherries(d)
    F = ForestAlgebra(d, cfg.max_nodes)
    for t in F.trees():
        x = _b(Forest((t,)))
        yield Check("itostrat", "dual translation = cherry sum", _fmt(t), lambda t=t, x=x: dual_translate_M(v, x) == hat_D_sum(t))
        yield Check("itostrat", "converter self-consistent", _fmt(t), lambda t=t: bool(ito_strat_convert(t, d)))


# --- BHZ bridge -------------------------------------------------------------------------------


def suite_bhz(cfg: SuiteConfig) -> Iterator[Check]:
    from . import bhz

    d, N = cfg.d, cfg.max_nodes
    rng = random.Random(cfg.seed)
    trees = trees_up_to(N, d)
    for t in trees:
        s = bhz.phi(t)
        e = _fmt(s)
        yield Check("bhz", "phi round trip", e, lambda t=t, s=s: bhz.phi_inv(s) == t)
        yield Check("bhz", "edge-rule degree = node-count degree", e, lambda t=t, s=s: bhz.degree(bhz.I(s)) == bhz.planted_degree(t))
    for f in [Forest(ts) for ts in _forests_of_trees(trees, N)]:
        yield Check(
            "bhz",
            "Delta^+ = reversed Delta_star",
            _fmt(bhz.Symbol(f, 0)),
            lambda f=f: bhz.delta_plus(bhz.Symbol(f, 0)) == bhz.reversed_ck(f),
        )
    for alpha in cfg.alphas:
        v = TreeTranslation(d, {0: LinComb({Forest((t,)): Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 3)) for t in bhz.negative_trees(alpha, d)})})
        ell = bhz.NegCharacter.from_translation(v, alpha)
        other = bhz.NegCharacter(alpha, d, {g: Fraction(rng.randint(-3, 3), 2) for g in bhz.negative_generators(alpha, d)})
        a = f"alpha={alpha}"
        yield Check("bhz", "negative generators = phi(B_-)", a, lambda alpha=alpha: set(bhz.negative_generators(alpha, d)) == {bhz.phi(t) for t in bhz.negative_trees(alpha, d)})
        for t in trees:
            s = bhz.phi(t)
            e = f"{a} {_fmt(s)}"
            yield Check(
                "bhz",
                "Delta^- phi = (phi (x) phi) delta^-",
                e,
                lambda t=t, s=s, alpha=alpha: bhz.Delta_minus(s, alpha) == bhz.phi_tensor(bhz.delta_minus(t, alpha)),
            )
            yield Check(
                "bhz",
                "M_ell phi = phi M_v*",
                e,
                lambda t=t, s=s, v=v, ell=ell: bhz.renormalize_M_ell(ell, s) == bhz.phi_lin(dual_translate_M(v, _b(Forest((t,))))),
            )
            yield Check(
                "bhz",
                "M_ell I = I M_ell",
                e,
                lambda s=s, ell=ell: bhz.renormalize_M_ell(ell, bhz.I(s)) == bhz.I_lin(bhz.renormalize_M_ell(ell, s)),
            )
        for ts in _forests_of_trees(trees, N):
            if len(ts) < 2:
                continue
            sym = bhz.Symbol(Forest(ts), 0)
            yield Check(
                "bhz",
                "M_ell multiplicative over planted products",
                f"{a} {_fmt(sym)}",
                lambda ts=ts, ell=ell, sym=sym: bhz.renormalize_M_ell(ell, sym) == _planted_product(ell, ts),
            )
        composed = bhz.compose_characters(ell, other)
        for g in bhz.negative_generators(alpha, d):
            e = f"{a} {_fmt(g)}"
            yield Check("bhz", "generator primitive in T_-", e, lambda g=g, alpha=alpha: _primitive_minus(g, alpha))
            yield Check(
                "bhz",
                "<ell o ell', s> = <ell, s> + <ell', s>",
                e,
                lambda g=g, ell=ell, other=other, composed=composed: composed.values.get(g, 0)
                == ell.values.get(g, 0) + other.values.get(g, 0),
            )


def _forests_of_trees(trees, max_nodes: int):
    """Multisets of trees with total size at most ``max_nodes``."""
    trees = list(trees)

    def rec(start: int, budget: int):
        yield ()
        for k in range(start, len(trees)):
            t = trees[k]
            if t.size <= budget:
                for rest in rec(k, budget - t.size):
                    yield (t,) + rest

    yield from (ts for ts in rec(0, max_nodes) if ts)


def _planted_product(ell, ts) -> LinComb:
    from . import bhz

    acc = {bhz.ONE: Fraction(1)}
    for t in ts:
        img = bhz.I_lin(bhz.renormalize_M_ell(ell, bhz.phi(t)))
        nxt: dict = {}
        for s1, c1 in acc.items():
            for s2, c2 in img.raw_items():
                k = s1 * s2
                nxt[k] = nxt.get(k, 0) + c1 * c2
        acc = nxt
    return LinComb(acc)


def _primitive_minus(g, alpha) -> bool:
    from . import bhz

    expected = LinComb({(Monomial((g,)), Monomial()): 1, (Monomial(), Monomial((g,))): 1})
    return bhz.tminus_coproduct(g, alpha) == expected


# --- RDE --------------------------------------------------------------------------------------


def suite_rde(cfg: SuiteConfig) -> Iterator[Check]:
    from . import rde

    rng = random.Random(cfg.seed)
    d = cfg.d
    yield Check(
        "rde",
        "committed Euler table matches calibration",
        f"shapes <= {min(cfg.max_nodes, 5)} nodes",
        lambda: all(rde.euler_table().get(k) == r for k, r in rde.calibrate_euler_weights(min(cfg.max_nodes, 5)).items()),
    )
    exprs = ["y1*y2 + 1", "y2 - y1**2", "y1", "y2**2/2", "1 - y1*y2", "y1 + y2"]
    f = rde.PolyVectorField.from_strings([[exprs[(2 * i) % 6], exprs[(2 * i + 1) % 6]] for i in range(d + 1)])
    for n in range(cfg.n_translations):
        u = random_lie_translation(rng, d, special=(n % 2 == 0))
        alg = ForestAlgebra(d, max(u.max_grade(), 1))
        yield Check(
            "rde",
            "Lie-polynomial field = tree field of iota(v)",
            f"u#{n}",
            lambda u=u, alg=alg: rde.translated_field(f, u) == rde.translated_field(f, iota_translation(alg, u)),
        )
    for t in trees_up_to(min(cfg.max_nodes, 4), d):
        yield Check("rde", "elementary differential is polynomial", _fmt(t), lambda t=t: all(ex.is_polynomial() for ex in rde.elementary_differential(f, t)))


BUILDERS: dict[str, Callable[[SuiteConfig], Iterator[Check]]] = {
    "hopf": suite_hopf,
    "prelie": suite_prelie,
    "adjoint": suite_adjoint,
    "cointeraction": suite_cointeraction,
    "itostrat": suite_itostrat,
    "bhz": suite_bhz,
    "rde": suite_rde,
}


def thread_count() -> int:
    raw = os.environ.get("HOPFPATH_THREADS")
    cap = os.cpu_count() or 1
    if raw:
        try:
            return max(1, min(int(raw), 64))
        except ValueError:
            raise ValueError(f"HOPFPATH_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(cap, 8))


def _run_one(check: Check) -> CheckResult:
    try:
        ok = bool(check.fn())
        return CheckResult(check, ok, "" if ok else "identity does not hold")
    except Exception as exc:  # a raising check is a failed property
        return CheckResult(check, False, f"{type(exc).__name__}: {exc}")


def run_suite(
    name: str, cfg: SuiteConfig, threads: int | None = None, only: Iterable[str] | None = None
) -> list[CheckResult]:
    """Run a suite; ``only`` restricts it to the named checks."""
    if name not in BUILDERS:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    checks = list(BUILDERS[name](cfg))
    if only is not None:
        keep = set(only)
        checks = [c for c in checks if c.name in keep]
    workers = threads or thread_count()
    if workers == 1:
        return [_run_one(c) for c in checks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, checks))
