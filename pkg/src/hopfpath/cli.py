"""Command-line front end.  Exit codes: 0 ok, 1 usage, 2 parse error, 3 property failure."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .freevec import Accumulator, LinComb
from .translation import InternalConsistencyError
from .trees import Forest
from .syntax import ParseError, format_coefficient, format_key, format_lincomb, parse, parse_fraction, to_json_terms

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_FAIL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- helpers ----------------------------------------------------------------------------


def _labels_of(x: LinComb) -> int:
    """Largest label or letter appearing in the keys of ``x`` (0 if none)."""
    from .bhz import Symbol
    from .monomial import Marked, Monomial
    from .tensor import Word
    from .trees import Forest, LabeledTree

    def top(k) -> int:
        if isinstance(k, Word):
            return max(k, default=0)
        if isinstance(k, LabeledTree):
            return k.max_label()
        if isinstance(k, Forest):
            return max((t.max_label() for t in k.trees), default=0)
        if isinstance(k, Symbol):
            return k.tree.max_label()
        if isinstance(k, Marked):
            return max(top(k.item), k.label)
        if isinstance(k, Monomial):
            return max((top(f) for f in k.factors), default=0)
        if isinstance(k, tuple):
            return max(top(a) for a in k)
        return 0

    return max((top(k) for k in x.as_dict()), default=0)


def _emit(out: TextIO, x: LinComb, as_json: bool, extra: dict | None = None) -> None:
    if as_json:
        payload = {"terms": to_json_terms(x)}
        payload.update(extra or {})
        out.write(json.dumps(payload, indent=1, ensure_ascii=False) + "\n")
    else:
        out.write(format_lincomb(x) + "\n")


def _key_kind(algebra: str) -> str:
    return "word" if algebra in ("shuffle", "concat") else "forest"


def load_translation(path: str, d: int | None = None):
    """Read ``{"d": int, "v": {"i": "<lincomb>"}}``."""
    try:
        block = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}", exc.doc, exc.pos) from None
    if not isinstance(block, dict) or "v" not in block:
        raise UsageError(f"{path}: expected an object with key 'v'")
    return make_translation(block["v"], block.get("d"), d)


def make_translation(raw: dict, d: int | None = None, at_least: int | None = None):
    """Entries ``{"i": "<lincomb>"}``; words give a Lie-polynomial translation, trees a tree one."""
    from .tensor import Word, WordTranslation
    from .translation import TreeTranslation

    entries = {}
    for i, text in raw.items():
        try:
            label = int(i)
        except ValueError:
            raise UsageError(f"translation labels must be integers, got {i!r}") from None
        entries[label] = parse(text)
    top = max([max(entries, default=0)] + [_labels_of(e) for e in entries.values()])
    dim = max(int(d) if d is not None else top, at_least or 0)
    if any(isinstance(k, Word) for e in entries.values() for k in e.as_dict()):
        return WordTranslation(dim, entries)
    return TreeTranslation(dim, entries)


# --- subcommands ----------------------------------------------------------------------------


def cmd_algebra(args, out: TextIO) -> int:
    from .forest import ForestAlgebra
    from .tensor import TensorAlgebra

    kind = _key_kind(args.algebra)
    xs = [parse(e, kind) for e in args.expr]
    need = 2 if args.op == "product" else 1
    if len(xs) != need:
        raise UsageError(f"algebra {args.op} takes {need} expression(s), got {len(xs)}")
    d = max([_labels_of(x) for x in xs] + [args.d or 0])
    N = sum(max(x.max_grade(), 0) for x in xs)
    alg = TensorAlgebra(d, N) if kind == "word" else ForestAlgebra(d, N)
    x = xs[0]
    if args.op == "product":
        name = {"gl": "gl_product", "ck": "forest_product", "shuffle": "shuffle", "concat": "concat"}[args.algebra]
        res = getattr(alg, name)(xs[0], xs[1])
    elif args.op == "coproduct":
        res = {
            "gl": lambda: alg.odot_coproduct(x),
            "ck": lambda: alg.ck(x),
            "shuffle": lambda: alg.deconcat(x),
            "concat": lambda: alg.shuffle_coproduct(x),
        }[args.algebra]()
    else:
        res = {
            "gl": lambda: alg.gl_antipode(x),
            "ck": lambda: alg.ck_antipode(x),
            "shuffle": lambda: alg.antipode(x),
            "concat": lambda: alg.antipode(x),
        }[args.algebra]()
    _emit(out, res, args.json)
    return EXIT_OK


def cmd_translate(args, out: TextIO) -> int:
    from .forest import ForestAlgebra
    from .tensor import TensorAlgebra, WordTranslation
    from .translation import dual_translate_M, translate_M

    probe = parse(args.expr)
    v = load_translation(args.v, _labels_of(probe))
    if isinstance(v, WordTranslation):
        x = parse(args.expr, "word")
        if args.dual:
            res = TensorAlgebra(v.d, max(x.max_grade(), 0)).dual_translate(v, x)
        else:
            N = args.max_nodes or max(x.max_grade(), 0) * max(v.max_grade(), 1)
            res = TensorAlgebra(v.d, N).translate(v, x)
    else:
        x = parse(args.expr, "forest")
        if args.dual:
            res = dual_translate_M(v, x)
        else:
            N = args.max_nodes or max(x.max_grade(), 0) * max(v.max_grade(), 1)
            res = translate_M(ForestAlgebra(v.d, N), v, x)
    _emit(out, res, args.json)
    return EXIT_OK


def cmd_ito_strat(args, out: TextIO) -> int:
    from .freevec import Accumulator
    from .translation import ito_strat_convert

    x = parse(args.expr, "forest")
    if _labels_of(x) > args.dim:
        raise UsageError(f"expression uses labels above --dim {args.dim}")
    acc = Accumulator()
    for f, c in x.raw_items():
        if not f.is_tree:
            raise UsageError(f"ito-strat expects trees, got {format_key(f)}")
        acc.add_lincomb(ito_strat_convert(f.tree(), args.dim), c)
    _emit(out, acc.build(), args.json)
    return EXIT_OK


def cmd_lift(args, out: TextIO) -> int:
    from .roughpath import lift_branched_piecewise_linear, lift_piecewise_linear, read_path_csv

    path = read_path_csv(args.path)
    lift = lift_branched_piecewise_linear if args.branched else lift_piecewise_linear
    X = lift(path, args.levels, pairs=args.pairs)
    text = X.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
        out.write(f"wrote {len(X.values)} grid pairs to {args.out}\n")
    else:
        out.write(text + "\n")
    return EXIT_OK


def build_driver(block: dict, level: int, base: Path):
    """Driver traces from a config block: ``csv``, ``expr`` or ``brownian``."""
    from .roughpath import brownian_lift, lift_piecewise_linear, read_path_csv

    kind = block.get("type")
    if kind == "csv":
        path = read_path_csv(str((base / block["path"]).resolve()))
        return lift_piecewise_linear(path, level, pairs="steps")
    if kind == "expr":
        import sympy as sp

        T = float(block.get("T", 1.0))
        n = int(block["n"])
        t = sp.Symbol("t")
        grid = np.linspace(0.0, T, n + 1)
        cols = [grid]
        for e in block["x"]:
            fn = sp.lambdify(t, sp.sympify(e), modules="numpy")
            cols.append(np.broadcast_to(np.asarray(fn(grid), dtype=float), grid.shape))
        return lift_piecewise_linear(np.column_stack(cols), level, pairs="steps")
    if kind == "brownian":
        T = float(block.get("T", 1.0))
        n = int(block["n"])
        grid = np.linspace(0.0, T, n + 1)
        return brownian_lift(int(block.get("seed", 0)), grid, int(block["d"]), block.get("scheme", "strat"), level=level, pairs="steps")
    raise UsageError(f"unknown driver type {kind!r}; use csv, expr or brownian")


def cmd_rde_run(args, out: TextIO) -> int:
    from .rde import PolyVectorField, equivalence_experiment, solve
    from .roughpath import lift_branched_via_iota
    from .translation import TreeTranslation

    cfg_path = Path(args.config)
    try:
        cfg = json.loads(cfg_path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {cfg_path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {cfg_path}: {exc.msg}", exc.doc, exc.pos) from None
    for key in ("field", "y0", "L", "driver"):
        if key not in cfg:
            raise UsageError(f"config lacks {key!r}")
    f = PolyVectorField.from_strings(cfg["field"])
    L = int(cfg["L"])
    y0 = [float(a) for a in cfg["y0"]]
    result: dict = {}
    if "v" in cfg:
        if isinstance(cfg["v"], str):
            v = load_translation(str(cfg_path.parent / cfg["v"]), f.d)
        else:
            v = make_translation(cfg["v"], f.d)
        N = max(v.max_grade(), 1)
        X = build_driver(cfg["driver"], N * L, cfg_path.parent)
        if X.flavor == "geometric" and isinstance(v, TreeTranslation):
            X = lift_branched_via_iota(X)
        res = equivalence_experiment(f, v, X, y0, L)
        traj = res.translated_field
        result["discrepancy"] = res.discrepancy
    else:
        X = build_driver(cfg["driver"], L, cfg_path.parent)
        if X.flavor == "geometric":
            X = lift_branched_via_iota(X)
        traj = solve(f, X, y0, L)
    grid = np.asarray(X.grid)
    if args.json:
        result.update({"grid": grid.tolist(), "trajectory": traj.tolist()})
        out.write(json.dumps(result) + "\n")
    else:
        header = "t," + ",".join(f"y{a}" for a in range(1, f.e + 1))
        lines = [header] + [",".join(repr(float(a)) for a in (t, *row)) for t, row in zip(grid, traj)]
        target = cfg.get("output")
        if target:
            (cfg_path.parent / target).write_text("\n".join(lines) + "\n")
            out.write(f"wrote trajectory ({len(grid)} rows) to {target}\n")
        else:
            out.write("\n".join(lines) + "\n")
        if "discrepancy" in result:
            out.write(f"discrepancy {result['discrepancy']:.6e}\n")
    return EXIT_OK


def _is_tree_input(text: str) -> bool:
    try:
        keys = parse(text, "auto").as_dict()
    except ParseError:
        return False
    return bool(keys) and all(isinstance(k, Forest) and k.is_tree for k in keys)


def cmd_bhz(args, out: TextIO) -> int:
    from . import bhz

    alpha = parse_fraction(args.alpha)
    if not 0 < alpha < 1:
        raise UsageError("--alpha must lie in (0,1)")
    x = parse(args.expr, "symbol")
    if args.op == "degree":
        rows = []
        for s, _ in x.items():
            deg = bhz.degree(s)
            val = deg.value(alpha)
            rows.append({"symbol": format_key(s), "degree": repr(deg), "value": format_coefficient(val), "negative": val < 0})
        if args.json:
            out.write(json.dumps(rows, indent=1) + "\n")
        else:
            for r in rows:
                tag = "negative" if r["negative"] else "non-negative"
                out.write(f"{r['symbol']}: {r['degree']} = {r['value']} ({tag})\n")
        return EXIT_OK
    tree_input = _is_tree_input(args.expr)
    if args.op == "delta-minus" and tree_input:
        # trees in, trees out: the projected extraction map on H
        acc = Accumulator()
        for f, c in parse(args.expr, "forest").raw_items():
            acc.add_lincomb(bhz.delta_minus(f, alpha), c)
        res = acc.build()
    elif args.op == "delta-minus":
        res = bhz.Delta_minus(x, alpha)
    elif args.op == "delta-plus":
        res = bhz.delta_plus(x)
    else:
        if not args.v:
            raise UsageError("bhz renorm needs --v")
        d = max(_labels_of(x), 1)
        v = load_translation(args.v, d)
        ell = bhz.NegCharacter.from_translation(v, alpha)
        res = bhz.renormalize_M_ell(ell, x)
    _emit(out, res, args.json)
    return EXIT_OK


def cmd_verify(args, out: TextIO) -> int:
    from .suites import SuiteConfig, run_suite, thread_count

    cfg = SuiteConfig(max_nodes=args.max_nodes, d=args.d, seed=args.seed)
    results = run_suite(args.suite, cfg, threads=thread_count())
    failed = [r for r in results if not r.ok]
    if args.json:
        out.write(
            json.dumps(
                {
                    "suite": args.suite,
                    "checks": len(results),
                    "failed": [{"check": r.check.name, "element": r.check.element, "detail": r.detail} for r in failed],
                },
                indent=1,
                ensure_ascii=False,
            )
            + "\n"
        )
    else:
        for r in failed:
            out.write(f"FAIL {r.check.name}: {r.check.element} ({r.detail})\n")
        out.write(f"{args.suite}: {len(results)} checks, {len(failed)} failed\n")
    return EXIT_FAIL if failed else EXIT_OK


# --- parser -----------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .suites import SUITES

    p = _Parser(prog="hopfpath", description="Translations of rough paths: exact algebra and numerics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("algebra", help="products, coproducts and antipodes")
    a.add_argument("op", choices=["product", "coproduct", "antipode"])
    a.add_argument("--algebra", required=True, choices=["gl", "ck", "shuffle", "concat"])
    a.add_argument("--d", type=int, default=None)
    a.add_argument("--json", action="store_true")
    a.add_argument("expr", nargs="+")
    a.set_defaults(func=cmd_algebra)

    t = sub.add_parser("translate", help="apply M_v / T_v or their duals")
    t.add_argument("--v", required=True, help="JSON file {\"d\": d, \"v\": {\"0\": expr, ...}}")
    t.add_argument("--dual", action="store_true")
    t.add_argument("--max-nodes", type=int, default=None, help="truncation for the primal map")
    t.add_argument("--json", action="store_true")
    t.add_argument("expr")
    t.set_defaults(func=cmd_translate)

    i = sub.add_parser("ito-strat", help="Stratonovich coefficient in terms of Ito coefficients")
    i.add_argument("--dim", type=int, required=True)
    i.add_argument("--json", action="store_true")
    i.add_argument("expr")
    i.set_defaults(func=cmd_ito_strat)

    li = sub.add_parser("lift", help="lift a piecewise-linear path from CSV")
    li.add_argument("--path", required=True)
    li.add_argument("--levels", type=int, required=True)
    li.add_argument("--branched", action="store_true")
    li.add_argument("--pairs", choices=["all", "prefix", "steps"], default=None)
    li.add_argument("--out", default=None)
    li.set_defaults(func=cmd_lift)

    r = sub.add_parser("rde", help="rough differential equations")
    rsub = r.add_subparsers(dest="rde_command", required=True, parser_class=_Parser)
    rr = rsub.add_parser("run", help="solve from a JSON config")
    rr.add_argument("--config", required=True)
    rr.add_argument("--json", action="store_true")
    rr.set_defaults(func=cmd_rde_run)

    b = sub.add_parser("bhz", help="reduced symbol computations")
    b.add_argument("op", choices=["degree", "delta-minus", "delta-plus", "renorm"])
    b.add_argument("--alpha", required=True)
    b.add_argument("--v", default=None, help="translation file for renorm")
    b.add_argument("--json", action="store_true")
    b.add_argument("expr")
    b.set_defaults(func=cmd_bhz)

    v = sub.add_parser("verify", help="run a property suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--max-nodes", type=int, required=True)
    v.add_argument("--d", type=int, default=2)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def run(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except InternalConsistencyError as exc:
        err.write(f"property failure: {exc}\n")
        return EXIT_FAIL
    except (ValueError, KeyError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
