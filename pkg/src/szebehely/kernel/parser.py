"""Expression parser.

Grammar (EBNF)::

    expr    = term , { ("+" | "-") , term } ;
    term    = factor , { ("*" | "/") , factor } ;
    factor  = "-" , factor | power ;
    power   = atom , [ "^" , factor ] ;
    atom    = NUMBER | IDENT | "ln" , "(" , expr , ")"
            | "exp" , "(" , expr , ")" | "(" , expr , ")" ;
    NUMBER  = digit , { digit } ;
    IDENT   = letter , { letter | digit | "_" } ;

Power binds tighter than unary minus, which binds tighter than "*"/"/",
which bind tighter than "+"/"-".  "^" is right-associative and its exponent
must evaluate to an exact rational constant.  Rational sub-expressions
collapse eagerly, so parsing "x/z - x/z" yields the zero function.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .exprtree import (
    NonRationalError,
    Tree,
    to_rational,
    tree_const,
    tree_div,
    tree_exp,
    tree_ln,
    tree_mul,
    tree_neg,
    tree_pow,
    tree_sum,
    tree_symbol,
)
from .symbols import Context, KernelError, UndeclaredSymbolError


class ExprSyntaxError(KernelError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _Token(NamedTuple):
    kind: str  # "num" | "ident" | "op"
    text: str
    pos: int


_OPS = set("+-*/^()")


def tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("num", text[i:j], i))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], i))
            i = j
            continue
        if ch in _OPS:
            tokens.append(_Token("op", ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], ctx: Context, length: int):
        self.tokens = tokens
        self.ctx = ctx
        self.i = 0
        self.length = length

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", self.length)
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.next()
        if tok.kind != "op" or tok.text != text:
            raise ExprSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.pos)

    def expr(self) -> Tree:
        node = self.term()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in "+-":
                return node
            self.next()
            rhs = self.term()
            node = tree_sum(node, rhs if tok.text == "+" else tree_neg(rhs))

    def term(self) -> Tree:
        node = self.factor()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != "op" or tok.text not in "*/":
                return node
            self.next()
            rhs = self.factor()
            if tok.text == "*":
                node = tree_mul(node, rhs)
            else:
                try:
                    node = tree_div(node, rhs)
                except ZeroDivisionError:
                    raise ExprSyntaxError("division by the zero function", tok.pos) from None
        return node

    def factor(self) -> Tree:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == "-":
            self.next()
            return tree_neg(self.factor())
        return self.power()

    def power(self) -> Tree:
        base = self.atom()
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text != "^":
            return base
        self.next()
        exp_tree = self.factor()
        try:
            exp_rf = to_rational(exp_tree)
            if not exp_rf.is_constant:
                raise NonRationalError("non-constant")
            exponent = exp_rf.constant_value()
        except NonRationalError:
            raise ExprSyntaxError("exponent must be a rational constant", tok.pos) from None
        try:
            return tree_pow(base, exponent)
        except ZeroDivisionError:
            raise ExprSyntaxError("zero raised to a negative power", tok.pos) from None

    def atom(self) -> Tree:
        tok = self.next()
        if tok.kind == "num":
            return tree_const(self.ctx, Fraction(int(tok.text)))
        if tok.kind == "ident":
            nxt = self.peek()
            if tok.text in ("ln", "exp") and nxt is not None and nxt.kind == "op" and nxt.text == "(":
                self.next()
                arg = self.expr()
                self.expect(")")
                return tree_ln(arg) if tok.text == "ln" else tree_exp(arg)
            if tok.text not in self.ctx:
                raise UndeclaredSymbolError(tok.text, tok.pos)
            return tree_symbol(self.ctx, tok.text)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected token {tok.text!r}", tok.pos)


def parse(text: str, ctx: Context) -> Tree:
    """Parse an expression over the context's symbols into a tree."""
    tokens = tokenize(text)
    parser = _Parser(tokens, ctx, len(text))
    node = parser.expr()
    tail = parser.peek()
    if tail is not None:
        raise ExprSyntaxError(f"unexpected trailing input {tail.text!r}", tail.pos)
    return node


def parse_rational(text: str, ctx: Context):
    """Parse and insist on a rational-function result."""
    return to_rational(parse(text, ctx))
