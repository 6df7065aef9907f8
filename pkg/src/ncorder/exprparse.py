"""Text syntax for operator expressions.

Grammar (products bind tighter than sums, unary minus tightest)::

    expr    := term (("+" | "-") term)*
    term    := unary ("*" unary)*
    unary   := "-" unary | primary
    primary := INT ["/" INT]
             | symbol
             | NAME "[" expr "]"                      ordering application
             | "[" expr "," expr "]"                  commutator
             | "(" expr ")"
             | "exp" "(" expr ";" INT ")"             truncated exponential
             | "D" "(" expr "->" symbol ")" "(" expr ")"   directional derivative
    symbol  := NAME ["@" INT]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Union

from .gotcore import directional_derivative
from .ncalg import Generator, NCPoly, commutator, exp_truncated, gen
from .ordering import MonomialOrdering, apply_monomial_poly, parse_rule

KEYWORDS = {"exp", "D"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # NAME, INT, KEYWORD, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<NAME>[A-Za-z][A-Za-z0-9_]*)|(?P<INT>[0-9]+)|(?P<OP>->|[-+*/\[\],();@])"
)


def tokenize(src: str) -> list:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"illegal character {src[pos]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rfind("\n") + 1
        else:
            if kind == "NAME" and text in KEYWORDS:
                kind = "KEYWORD"
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Sym:
    name: str
    time: Optional[int] = None


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Sum:
    left: "Node"
    right: "Node"
    sign: int = 1


@dataclass(frozen=True)
class Product:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Commutator:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Exp:
    arg: "Node"
    degree: int


@dataclass(frozen=True)
class Ordered:
    ordering: str
    arg: "Node"


@dataclass(frozen=True)
class Derivative:
    direction: "Node"
    target: Sym
    arg: "Node"


Node = Union[Sym, Num, Neg, Sum, Product, Commutator, Exp, Ordered, Derivative]


class _Parser:
    def __init__(self, tokens: list, orderings: Optional[Mapping[str, object]]):
        self.toks = tokens
        self.i = 0
        self.orderings = orderings

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> Optional[Token]:
        if self.tok.kind in ("OP", "KEYWORD") and self.tok.text == text:
            t = self.tok
            self.i += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return t

    def expect_int(self) -> int:
        if self.tok.kind != "INT":
            self.error(f"expected an integer, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return int(t.text)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "EOF":
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            if self.accept("+"):
                node = Sum(node, self.term(), 1)
            elif self.accept("-"):
                node = Sum(node, self.term(), -1)
            else:
                return node

    def term(self) -> Node:
        node = self.unary()
        while self.accept("*"):
            node = Product(node, self.unary())
        return node

    def unary(self) -> Node:
        if self.accept("-"):
            return Neg(self.unary())
        return self.primary()

    def symbol(self) -> Sym:
        if self.tok.kind != "NAME":
            self.error(f"expected a symbol, found {self.tok.text or 'end of input'!r}")
        name = self.tok.text
        self.i += 1
        if self.accept("@"):
            return Sym(name, self.expect_int())
        return Sym(name)

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "INT":
            self.i += 1
            num = int(t.text)
            if self.accept("/"):
                den_tok = self.tok
                den = self.expect_int()
                if den == 0:
                    self.error("zero denominator", den_tok)
                return Num(Fraction(num, den))
            return Num(Fraction(num))
        if t.kind == "NAME":
            nxt = self.toks[self.i + 1]
            if nxt.kind == "OP" and nxt.text == "[":
                if self.orderings is not None and t.text not in self.orderings:
                    self.error(f"undeclared ordering {t.text!r}")
                self.i += 2
                arg = self.expr()
                self.expect("]")
                return Ordered(t.text, arg)
            return self.symbol()
        if self.accept("["):
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            return Commutator(a, b)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        if self.accept("exp"):
            self.expect("(")
            arg = self.expr()
            if not self.accept(";"):
                self.error("exp needs an explicit truncation degree: exp(expr; n)")
            n = self.expect_int()
            self.expect(")")
            return Exp(arg, n)
        if self.accept("D"):
            self.expect("(")
            direction = self.expr()
            self.expect("->")
            target = self.symbol()
            self.expect(")")
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Derivative(direction, target, arg)
        self.error(f"unexpected {t.text or 'end of input'!r}")


def default_orderings() -> dict:
    return {
        "T": parse_rule("time"),
        "Tbar": parse_rule("antitime"),
        "Alpha": parse_rule("alpha"),
        "N": parse_rule("nxy:X,Y"),
    }


@dataclass
class Environment:
    orderings: dict = field(default_factory=default_orderings)
    symbols: Optional[set] = None  # None accepts any symbol

    def declare(self, name: str, rule: Union[str, MonomialOrdering]) -> None:
        self.orderings[name] = parse_rule(rule) if isinstance(rule, str) else rule


def parse(src_or_tokens, env: Optional[Environment] = None) -> Node:
    tokens = tokenize(src_or_tokens) if isinstance(src_or_tokens, str) else list(src_or_tokens)
    return _Parser(tokens, env.orderings if env is not None else None).parse()


def _generator(s: Sym, env: Environment) -> Generator:
    g = gen(s.name, time=s.time)
    if env.symbols is not None and g not in env.symbols and s.name not in env.symbols:
        raise ValueError(f"unbound symbol {g}")
    return g


def compile(node: Node, env: Optional[Environment] = None) -> NCPoly:
    env = env or Environment()
    if isinstance(node, Sym):
        return NCPoly.word((_generator(node, env),))
    if isinstance(node, Num):
        return NCPoly.const(node.value)
    if isinstance(node, Neg):
        return -compile(node.arg, env)
    if isinstance(node, Sum):
        left, right = compile(node.left, env), compile(node.right, env)
        return left + right if node.sign > 0 else left - right
    if isinstance(node, Product):
        return compile(node.left, env) * compile(node.right, env)
    if isinstance(node, Commutator):
        return commutator(compile(node.left, env), compile(node.right, env))
    if isinstance(node, Exp):
        return exp_truncated(compile(node.arg, env), node.degree).total()
    if isinstance(node, Ordered):
        if node.ordering not in env.orderings:
            raise ValueError(f"undeclared ordering {node.ordering!r}")
        return apply_monomial_poly(env.orderings[node.ordering], compile(node.arg, env))
    if isinstance(node, Derivative):
        return directional_derivative(
            compile(node.direction, env), _generator(node.target, env), compile(node.arg, env)
        )
    raise TypeError(f"not an expression node: {node!r}")


def evaluate_expr(src: str, env: Optional[Environment] = None) -> NCPoly:
    env = env or Environment()
    return compile(parse(src, env), env)
