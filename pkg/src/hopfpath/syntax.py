"""Text syntax for keys and linear combinations.

Grammar (output is reparseable)::

    lincomb := '0' | term (('+' | '-') term)*
    term    := ['-'] [coef '*'] pair
    coef    := INT ['/' INT]
    pair    := key [('⊗' | '&') key]
    key     := factor ('.' factor)*          several factors form a monomial
    factor  := atom ['_' INT]                a label marks the item
    atom    := word | tree | forest | symbol | '1'
    word    := 'e[' [INT (',' INT)*] ']' | '[]'
    tree    := '(' INT tree* ')'
    forest  := '{' tree* '}'
    symbol  := ('I(' symbol ')' | 'Xi' INT)+ | '1'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .freevec import LinComb, sort_key
from .monomial import Marked, Monomial
from .tensor import Word
from .trees import UNIT, Forest, LabeledTree


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.message = message
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}\n  {text}\n  {' ' * pos}^")


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<xi>Xi)|(?P<op>e\[|I\(|[()\[\]{},.*/+\-_&⊗]))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        tok = m.group(kind)
        if tok == "&":
            tok = "⊗"
        out.append(_Tok("int" if kind == "int" else "xi" if kind == "xi" else tok, tok, start))
        pos = m.end()
    out.append(_Tok("eof", "", n))
    return out


# atoms produced by the parser before coercion
@dataclass(frozen=True)
class _Atom:
    kind: str  # word | forest | symbol | one
    value: Any
    pos: int


KINDS = ("auto", "word", "forest", "tree", "symbol", "monomial")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        t = tok or self.tok
        raise ParseError(msg, self.text, t.pos)

    def take(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            what = self.tok.text or "end of input"
            self.error(f"expected {kind!r}, found {what!r}")
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def end(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    # atoms
    def integer(self) -> int:
        return int(self.take("int").text)

    def word(self) -> Word:
        if self.accept("["):
            self.take("]")
            return Word()
        self.take("e[")
        letters = []
        if self.tok.kind != "]":
            letters.append(self.integer())
            while self.accept(","):
                letters.append(self.integer())
        self.take("]")
        return Word(letters)

    def tree(self) -> LabeledTree:
        self.take("(")
        label = self.integer()
        kids = []
        while self.tok.kind == "(":
            kids.append(self.tree())
        self.take(")")
        return LabeledTree(label, kids)

    def forest(self) -> Forest:
        self.take("{")
        trees = []
        while self.tok.kind == "(":
            trees.append(self.tree())
        self.take("}")
        return Forest(trees)

    def symbol(self):
        from .bhz import ONE, Symbol, phi

        if self.tok.kind == "int" and self.tok.text == "1":
            self.i += 1
            return ONE
        if self.tok.kind == "(":
            return phi(self.tree())
        children = []
        tag = 0
        start = self.tok
        while self.tok.kind in ("I(", "xi"):
            if self.accept("xi"):
                t = self.tok
                i = self.integer()
                if i < 1:
                    self.error("noise index must be at least 1", t)
                if tag:
                    self.error("a symbol carries at most one noise", t)
                tag = i
            else:
                self.take("I(")
                if self.tok.kind == ")":
                    inner = ONE
                else:
                    inner = self.symbol()
                self.take(")")
                children.append(inner.tree)
        if not children and not tag:
            self.error("expected a symbol", start)
        return Symbol(children, tag)

    def atom(self) -> _Atom:
        t = self.tok
        if t.kind in ("e[", "["):
            return _Atom("word", self.word(), t.pos)
        if t.kind == "(":
            return _Atom("forest", Forest((self.tree(),)), t.pos)
        if t.kind == "{":
            return _Atom("forest", self.forest(), t.pos)
        if t.kind in ("I(", "xi"):
            return _Atom("symbol", self.symbol(), t.pos)
        if t.kind == "int" and t.text == "1":
            self.i += 1
            return _Atom("one", None, t.pos)
        self.error(f"expected a word, tree, forest or symbol, found {t.text or 'end of input'!r}")

    def factor(self):
        a = self.atom()
        if self.accept("_"):
            return a, self.integer()
        return a, None

    def key(self) -> list:
        out = [self.factor()]
        while self.accept("."):
            out.append(self.factor())
        return out

    def coefficient(self) -> Fraction | None:
        if self.tok.kind == "int" and self.peek().kind in ("*", "/"):
            num = self.integer()
            den = 1
            if self.accept("/"):
                t = self.tok
                den = self.integer()
                if den == 0:
                    self.error("zero denominator", t)
            self.take("*")
            return Fraction(num, den)
        return None

    def lincomb(self, kinds: tuple) -> LinComb:
        if self.tok.kind == "int" and self.tok.text == "0" and self.peek().kind == "eof":
            self.i += 1
            return LinComb.zero()
        terms = []
        sign = -1 if self.accept("-") else 1
        while True:
            c = self.coefficient()
            coef = sign * (c if c is not None else 1)
            left = self.key()
            if self.accept("⊗"):
                right = self.key()
                if len(kinds) == 1:
                    kinds = (kinds[0], kinds[0])
                key = (self.coerce(left, kinds[0]), self.coerce(right, kinds[1]))
            else:
                key = self.coerce(left, kinds[0])
            terms.append((key, coef))
            if self.accept("+"):
                sign = 1
            elif self.accept("-"):
                sign = -1
            else:
                break
        self.end()
        return LinComb(terms)

    # coercion
    def coerce(self, factors: list, kind: str):
        if len(factors) > 1 or factors[0][1] is not None or kind == "monomial":
            if kind not in ("auto", "monomial"):
                self.error_at(f"expected a {kind}, found a monomial", factors[0][0].pos)
            if len(factors) == 1 and factors[0][0].kind == "one" and factors[0][1] is None:
                return Monomial()
            items = []
            for a, lab in factors:
                item = self.item(a)
                items.append(item if lab is None else Marked(item, lab))
            return Monomial(items)
        a = factors[0][0]
        if kind == "auto":
            if a.kind == "one":
                return UNIT
            return a.value
        if kind == "word":
            if a.kind != "word":
                self.error_at("expected a word", a.pos)
            return a.value
        if kind == "forest":
            if a.kind == "one":
                return UNIT
            if a.kind != "forest":
                self.error_at("expected a forest", a.pos)
            return a.value
        if kind == "tree":
            if a.kind != "forest" or not a.value.is_tree:
                self.error_at("expected a tree", a.pos)
            return a.value.tree()
        if kind == "symbol":
            from .bhz import ONE, phi

            if a.kind == "one":
                return ONE
            if a.kind == "forest" and a.value.is_tree:
                return phi(a.value.tree())
            if a.kind != "symbol":
                self.error_at("expected a symbol", a.pos)
            return a.value
        raise ValueError(f"unknown kind {kind!r}")

    def item(self, a: _Atom):
        if a.kind == "forest":
            if not a.value.is_tree:
                self.error_at("monomial factors must be trees, words or symbols", a.pos)
            return a.value.tree()
        if a.kind == "one":
            self.error_at("'1' cannot be a monomial factor", a.pos)
        return a.value

    def error_at(self, msg: str, pos: int):
        raise ParseError(msg, self.text, pos)


def _kinds(kind: str | tuple) -> tuple:
    ks = (kind,) if isinstance(kind, str) else tuple(kind)
    for k in ks:
        if k not in KINDS:
            raise ValueError(f"unknown kind {k!r}")
    return ks


def parse(text: str, kind: str | tuple = "auto") -> LinComb:
    """Parse a linear combination; ``kind`` (or a pair of kinds) fixes key types."""
    return _Parser(text).lincomb(_kinds(kind))


def parse_key(text: str, kind: str = "auto"):
    p = _Parser(text)
    key = p.coerce(p.key(), kind)
    p.end()
    return key


def parse_word(text: str) -> Word:
    return parse_key(text, "word")


def parse_tree(text: str) -> LabeledTree:
    return parse_key(text, "tree")


def parse_forest(text: str) -> Forest:
    return parse_key(text, "forest")


def parse_symbol(text: str):
    return parse_key(text, "symbol")


def parse_fraction(text: str) -> Fraction:
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:/\s*(\d+))?\s*", text)
    if not m:
        raise ParseError("expected a rational a/b", text, 0)
    den = int(m.group(2) or 1)
    if den == 0:
        raise ParseError("zero denominator", text, text.index("/") + 1)
    return Fraction(int(m.group(1)), den)


# --- formatting -----------------------------------------------------------------------


def format_word(w: Word) -> str:
    return "e[" + ",".join(map(str, w)) + "]" if len(w) else "[]"


def format_tree(t: LabeledTree) -> str:
    if not t.children:
        return f"({t.label})"
    return f"({t.label} " + " ".join(format_tree(c) for c in t.children) + ")"


def format_forest(f: Forest) -> str:
    if not f.trees:
        return "1"
    if len(f.trees) == 1:
        return format_tree(f.trees[0])
    return "{" + " ".join(format_tree(t) for t in f.trees) + "}"


def format_symbol(s) -> str:
    from .bhz import phi

    if not s.children.trees and not s.tag:
        return "1"
    parts = [f"I({format_symbol(phi(c))})" for c in s.children.trees]
    if s.tag:
        parts.append(f"Xi{s.tag}")
    return "".join(parts)


def format_key(k) -> str:
    from .bhz import Symbol

    if isinstance(k, Word):
        return format_word(k)
    if isinstance(k, LabeledTree):
        return format_tree(k)
    if isinstance(k, Forest):
        return format_forest(k)
    if isinstance(k, Symbol):
        return format_symbol(k)
    if isinstance(k, Marked):
        return f"{format_key(k.item)}_{k.label}"
    if isinstance(k, Monomial):
        return ".".join(format_key(f) for f in k.factors) if k.factors else "1"
    if isinstance(k, tuple) and len(k) == 2:
        return f"{format_key(k[0])} ⊗ {format_key(k[1])}"
    raise TypeError(f"no syntax for {type(k).__name__}")


def format_coefficient(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_lincomb(x: LinComb) -> str:
    items = x.items()
    if not items:
        return "0"
    parts = []
    for n, (k, c) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        body = format_key(k) if a == 1 else f"{format_coefficient(a)}*{format_key(k)}"
        if n == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def to_json_terms(x: LinComb) -> list[dict]:
    """Structured form: ``[{"key": str, "coef": "p/q"}, ...]`` in canonical order."""
    return [{"key": format_key(k), "coef": format_coefficient(c)} for k, c in x.items()]


__all__ = [
    "ParseError",
    "parse",
    "parse_key",
    "parse_word",
    "parse_tree",
    "parse_forest",
    "parse_symbol",
    "parse_fraction",
    "format_word",
    "format_tree",
    "format_forest",
    "format_symbol",
    "format_key",
    "format_lincomb",
    "format_coefficient",
    "to_json_terms",
    "sort_key",
]
