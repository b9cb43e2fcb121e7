"""Exact symbolic kernel: symbols, polynomials, rational functions,
expression trees, parsing and printing."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .exprtree import (
    Exp,
    Ln,
    NonRationalError,
    Pow,
    Prod,
    Rat,
    Sum,
    Tree,
    to_rational,
    tree_const,
    tree_diff,
    tree_div,
    tree_evaluate,
    tree_exp,
    tree_ln,
    tree_mul,
    tree_neg,
    tree_pow,
    tree_rational,
    tree_substitute,
    tree_sum,
    tree_symbol,
    tree_variables,
)
from .parser import ExprSyntaxError, parse, parse_rational, tokenize
from .polynomial import DifferentiationError, EvaluationError, Polynomial, poly_gcd, poly_lcm
from .printer import format_polynomial, format_rational, format_tree
from .rational import RationalFunction, fraction_gcd
from .symbols import Context, KernelError, Symbol, SymbolKind, UndeclaredSymbolError

Value = RationalFunction | Tree


def differentiate(f: Value, sym: Symbol | str):
    """Exact partial derivative of a rational function or expression tree."""
    if isinstance(f, RationalFunction):
        return f.diff(sym)
    return tree_diff(f, sym)


def evaluate(f: Value, assignment: Mapping[Symbol | str, Fraction | int | float]):
    """Evaluate at a point given as {symbol: value}; exact when possible."""
    if isinstance(f, RationalFunction):
        ctx = f.ctx
    else:
        from .exprtree import _ctx_of

        ctx = _ctx_of(f)
    values = {ctx.index(k): (v if isinstance(v, float) else Fraction(v)) for k, v in assignment.items()}
    if isinstance(f, RationalFunction):
        return f.evaluate(values)
    return tree_evaluate(f, values)


def substitute(f: Value, bindings: Mapping[Symbol | str, Value]):
    """Simultaneous substitution of expressions for symbols."""
    if isinstance(f, RationalFunction):
        ctx = f.ctx
        if all(isinstance(v, RationalFunction) for v in bindings.values()):
            return f.substitute({ctx.index(k): v for k, v in bindings.items()})
        f = tree_rational(f)
    from .exprtree import _ctx_of

    ctx = _ctx_of(f)
    tree_bindings = {
        ctx.index(k): (tree_rational(v) if isinstance(v, RationalFunction) else v) for k, v in bindings.items()
    }
    return tree_substitute(f, tree_bindings)


def format_value(f: Value) -> str:
    if isinstance(f, RationalFunction):
        return format_rational(f)
    return format_tree(f)
