"""A small language for set-valued expressions.

Grammar (lowest to highest binding)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | atom
    atom   := NUMBER | NAME | NAME "(" args ")" | "(" expr ")"

Functions are ``sum(E, k)``, ``prod(E, k)`` and ``R(E)``.  Juxtaposition is
not multiplication: ``AA`` is a set name, the product set is ``A*A``.

Every occurrence of a name ranges independently, so ``(A-A)*(A-A)`` is the
four-variable set ``{(a-b)(c-d)}`` and not ``{(a-b)^2}``.  Constructions that
reuse one variable across subterms live in :mod:`expandlab.expanders`.  Scalar
literals denote singleton sets, which makes ``R(A)-1`` expressible.  A number
written ``p/q`` with no spaces is one literal; a minus sign directly in front
of a number folds into the literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .errors import ParseError, UnboundName
from .finset import Budget, FiniteSet, affine, kfold, pairwise
from .numeric import format_scalar, parse_scalar


@dataclass(frozen=True)
class SetName:
    name: str


@dataclass(frozen=True)
class ScalarLit:
    value: Fraction


@dataclass(frozen=True)
class Binary:
    op: str
    left: "SetExpr"
    right: "SetExpr"


@dataclass(frozen=True)
class KFoldSum:
    child: "SetExpr"
    k: int


@dataclass(frozen=True)
class KFoldProd:
    child: "SetExpr"
    k: int


@dataclass(frozen=True)
class RTriple:
    child: "SetExpr"


@dataclass(frozen=True)
class Neg:
    child: "SetExpr"


SetExpr = Union[SetName, ScalarLit, Binary, KFoldSum, KFoldProd, RTriple, Neg]

FUNCTIONS = ("R", "prod", "sum")

_TOKEN = re.compile(
    r"(?P<num>\d+/\d+|\d+\.\d*|\.\d+|\d+)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<sym>[-+*/(),])"
)
# after a "/" a ratio literal would regroup "A/2/3" as "A/(2/3)"
_TOKEN_AFTER_SLASH = re.compile(
    r"(?P<num>\d+\.\d*|\.\d+|\d+)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<sym>[-+*/(),])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, name, sym, end
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            toks.append(_Tok("end", "", pos))
            return toks
        j = len(toks) - 1
        while j >= 0 and toks[j].kind == "sym" and toks[j].text == "-":
            j -= 1
        after_slash = j >= 0 and toks[j].kind == "sym" and toks[j].text == "/"
        m = (_TOKEN_AFTER_SLASH if after_slash else _TOKEN).match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos,
                             ("(", "-", "name", "number"))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, sym):
        tok = self.peek()
        if tok.kind != "sym" or tok.text != sym:
            self.fail(tok, (sym,))
        return self.advance()

    def fail(self, tok, expected):
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {found}", tok.pos, expected)

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.fail(tok, ("+", "-", "*", "/", "end of input"))
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "sym" and self.peek().text in "+-":
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind == "sym" and self.peek().text in "*/":
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "-":
            self.advance()
            if self.peek().kind == "num":
                return ScalarLit(-parse_scalar(self.advance().text))
            return Neg(self.unary())
        return self.atom()

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return ScalarLit(parse_scalar(tok.text))
        if tok.kind == "name":
            self.advance()
            nxt = self.peek()
            if nxt.kind == "sym" and nxt.text == "(":
                return self.call(tok)
            return SetName(tok.text)
        if tok.kind == "sym" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        self.fail(tok, ("(", "-", "name", "number"))

    def call(self, name_tok):
        if name_tok.text not in FUNCTIONS:
            raise ParseError(f"unknown function {name_tok.text!r}", name_tok.pos, FUNCTIONS)
        self.expect("(")
        child = self.expr()
        if name_tok.text == "R":
            self.expect(")")
            return RTriple(child)
        self.expect(",")
        ktok = self.peek()
        if ktok.kind != "num" or not ktok.text.isdigit() or int(ktok.text) < 1:
            self.fail(ktok, ("positive integer",))
        self.advance()
        self.expect(")")
        cls = KFoldSum if name_tok.text == "sum" else KFoldProd
        return cls(child, int(ktok.text))


def parse(text: str) -> SetExpr:
    """Parse expression text into a tree of frozen dataclass nodes."""
    return _Parser(text).parse()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    return 3


def to_text(node: SetExpr) -> str:
    """Canonical text with the fewest parentheses that still round-trips."""
    if isinstance(node, SetName):
        return node.name
    if isinstance(node, ScalarLit):
        return format_scalar(node.value)
    if isinstance(node, Neg):
        child = to_text(node.child)
        if isinstance(node.child, Binary) or (
            isinstance(node.child, ScalarLit) and node.child.value >= 0
        ):
            child = f"({child})"
        return "-" + child
    if isinstance(node, RTriple):
        return f"R({to_text(node.child)})"
    if isinstance(node, (KFoldSum, KFoldProd)):
        fn = "sum" if isinstance(node, KFoldSum) else "prod"
        return f"{fn}({to_text(node.child)},{node.k})"
    p = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p or (
        node.op == "/" and isinstance(node.right, ScalarLit) and node.right.value.denominator != 1
    ):
        right = f"({right})"
    if node.op == "/" and left[-1].isdigit() and right[0].isdigit():
        # "1/2" would lex as a single literal
        return f"{left} / {right}"
    return f"{left}{node.op}{right}"


print_expr = to_text


def names(node: SetExpr) -> set[str]:
    """Set names referenced by an expression."""
    if isinstance(node, SetName):
        return {node.name}
    if isinstance(node, ScalarLit):
        return set()
    if isinstance(node, Binary):
        return names(node.left) | names(node.right)
    return names(node.child)


def evaluate(node: SetExpr, env: Mapping[str, FiniteSet], budget: Budget | None = None) -> FiniteSet:
    """Evaluate with independent ranges for every occurrence of a name.

    Structurally equal subtrees are evaluated once per call.
    """
    from .expanders import r_set

    budget = budget or Budget()
    memo: dict = {}

    def ev(n):
        if n in memo:
            return memo[n]
        if isinstance(n, SetName):
            if n.name not in env:
                raise UnboundName(n.name)
            out = env[n.name]
        elif isinstance(n, ScalarLit):
            out = FiniteSet([n.value])
        elif isinstance(n, Binary):
            out = pairwise(n.op, ev(n.left), ev(n.right), budget)
        elif isinstance(n, KFoldSum):
            out = kfold("+", ev(n.child), n.k, budget)
        elif isinstance(n, KFoldProd):
            out = kfold("*", ev(n.child), n.k, budget)
        elif isinstance(n, RTriple):
            out = r_set(ev(n.child), budget)
        elif isinstance(n, Neg):
            out = affine(ev(n.child), -1, 0)
        else:
            raise TypeError(f"not an expression node: {n!r}")
        memo[n] = out
        return out

    return ev(node)


def eval_text(text: str, env: Mapping[str, FiniteSet], budget: Budget | None = None) -> FiniteSet:
    return evaluate(parse(text), env, budget)
