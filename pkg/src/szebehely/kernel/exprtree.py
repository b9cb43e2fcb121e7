"""General expression trees on top of the rational kernel.

Rational sub-expressions are eagerly collapsed into embedded
:class:`RationalFunction` leaves; only logarithms, exponentials and
non-integer rational powers remain as genuine tree nodes.  Such values have
no canonical form (no transcendental identities are applied); they are
differentiated symbolically and evaluated numerically.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping

from .polynomial import EvaluationError, Polynomial
from .rational import RationalFunction
from .symbols import Context, KernelError, Symbol


class NonRationalError(KernelError):
    """Raised when a rational-only code path meets ln/exp/real powers."""


class Tree:
    __slots__ = ()

    @property
    def is_rational(self) -> bool:
        return isinstance(self, Rat)

    def __repr__(self) -> str:
        from .printer import format_tree

        return f"Tree({format_tree(self)})"

    def __eq__(self, other: object) -> bool:
        raise NotImplementedError

    def __hash__(self) -> int:
        raise NotImplementedError


class Rat(Tree):
    __slots__ = ("value",)

    def __init__(self, value: RationalFunction):
        self.value = value

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Rat) and self.value == other.value

    def __hash__(self) -> int:
        return hash(("rat", self.value))


class Sum(Tree):
    """n-ary sum; non-rational children in construction order, at most one
    rational child, kept last."""

    __slots__ = ("children",)

    def __init__(self, children: tuple[Tree, ...]):
        self.children = children

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Sum) and self.children == other.children

    def __hash__(self) -> int:
        return hash(("sum", self.children))


class Prod(Tree):
    """n-ary product; at most one rational child, kept first."""

    __slots__ = ("children",)

    def __init__(self, children: tuple[Tree, ...]):
        self.children = children

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Prod) and self.children == other.children

    def __hash__(self) -> int:
        return hash(("prod", self.children))


class Pow(Tree):
    """base ** exponent with an exact rational exponent."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Tree, exponent: Fraction):
        self.base = base
        self.exponent = exponent

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Pow) and self.base == other.base and self.exponent == other.exponent

    def __hash__(self) -> int:
        return hash(("pow", self.base, self.exponent))


class Ln(Tree):
    __slots__ = ("arg",)

    def __init__(self, arg: Tree):
        self.arg = arg

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ln) and self.arg == other.arg

    def __hash__(self) -> int:
        return hash(("ln", self.arg))


class Exp(Tree):
    __slots__ = ("arg",)

    def __init__(self, arg: Tree):
        self.arg = arg

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Exp) and self.arg == other.arg

    def __hash__(self) -> int:
        return hash(("exp", self.arg))


# -- smart constructors ---------------------------------------------------


def tree_const(ctx: Context, value: Fraction | int) -> Tree:
    return Rat(RationalFunction.constant(ctx, value))


def tree_symbol(ctx: Context, sym: Symbol | str) -> Tree:
    return Rat(RationalFunction.symbol(ctx, sym))


def tree_rational(value: RationalFunction) -> Tree:
    return Rat(value)


def tree_sum(*parts: Tree) -> Tree:
    flat: list[Tree] = []
    rat: RationalFunction | None = None
    for part in parts:
        items = part.children if isinstance(part, Sum) else (part,)
        for item in items:
            if isinstance(item, Rat):
                rat = item.value if rat is None else rat + item.value
            else:
                flat.append(item)
    if not flat:
        if rat is None:
            raise KernelError("empty sum")
        return Rat(rat)
    if rat is not None and not rat.is_zero:
        flat.append(Rat(rat))
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def tree_neg(t: Tree) -> Tree:
    if isinstance(t, Rat):
        return Rat(-t.value)
    return tree_mul(tree_const(_ctx_of(t), -1), t)


def tree_mul(*parts: Tree) -> Tree:
    flat: list[Tree] = []
    rat: RationalFunction | None = None
    for part in parts:
        items = part.children if isinstance(part, Prod) else (part,)
        for item in items:
            if isinstance(item, Rat):
                rat = item.value if rat is None else rat * item.value
            else:
                flat.append(item)
    if rat is not None and rat.is_zero:
        return Rat(rat)
    if not flat:
        if rat is None:
            raise KernelError("empty product")
        return Rat(rat)
    if rat is not None and not (rat.is_constant and rat.constant_value() == 1):
        flat.insert(0, Rat(rat))
    if len(flat) == 1:
        return flat[0]
    return Prod(tuple(flat))


def tree_pow(base: Tree, exponent: Fraction | int) -> Tree:
    exponent = Fraction(exponent)
    if exponent == 0:
        return tree_const(_ctx_of(base), 1)
    if exponent == 1:
        return base
    if isinstance(base, Rat) and exponent.denominator == 1:
        return Rat(base.value ** int(exponent))
    return Pow(base, exponent)


def tree_div(a: Tree, b: Tree) -> Tree:
    if isinstance(b, Rat):
        return tree_mul(a, Rat(b.value.inverse()))
    return tree_mul(a, tree_pow(b, -1))


def tree_ln(arg: Tree) -> Tree:
    return Ln(arg)


def tree_exp(arg: Tree) -> Tree:
    return Exp(arg)


def _ctx_of(t: Tree) -> Context:
    while True:
        if isinstance(t, Rat):
            return t.value.ctx
        if isinstance(t, (Sum, Prod)):
            t = t.children[0]
        elif isinstance(t, Pow):
            t = t.base
        else:
            t = t.arg  # type: ignore[union-attr]


def to_rational(t: Tree) -> RationalFunction:
    """Unwrap an eagerly-collapsed tree; error on any non-rational node."""
    if isinstance(t, Rat):
        return t.value
    raise NonRationalError("expression contains ln/exp/non-integer powers; use the numeric path")


# -- calculus ---------------------------------------------------------------


def tree_diff(t: Tree, sym: Symbol | str) -> Tree:
    if isinstance(t, Rat):
        return Rat(t.value.diff(sym))
    if isinstance(t, Sum):
        return tree_sum(*[tree_diff(c, sym) for c in t.children])
    if isinstance(t, Prod):
        parts = []
        for i, c in enumerate(t.children):
            rest = t.children[:i] + t.children[i + 1 :]
            parts.append(tree_mul(tree_diff(c, sym), *rest))
        return tree_sum(*parts)
    if isinstance(t, Pow):
        ctx = _ctx_of(t)
        coeff = Rat(RationalFunction.constant(ctx, t.exponent))
        return tree_mul(coeff, tree_pow(t.base, t.exponent - 1), tree_diff(t.base, sym))
    if isinstance(t, Ln):
        return tree_mul(tree_diff(t.arg, sym), tree_pow(t.arg, -1))
    if isinstance(t, Exp):
        return tree_mul(Exp(t.arg), tree_diff(t.arg, sym))
    raise KernelError(f"cannot differentiate {t!r}")


def tree_evaluate(t: Tree, values: Mapping[int, Fraction | float]):
    """Evaluate at a point (symbol index -> value).  Exact Fractions survive
    sums, products and integer powers; ln/exp/real powers go through float."""
    if isinstance(t, Rat):
        return t.value.evaluate(values)
    if isinstance(t, Sum):
        total = None
        for c in t.children:
            v = tree_evaluate(c, values)
            total = v if total is None else total + v
        return total
    if isinstance(t, Prod):
        total = None
        for c in t.children:
            v = tree_evaluate(c, values)
            total = v if total is None else total * v
        return total
    if isinstance(t, Pow):
        v = tree_evaluate(t.base, values)
        if t.exponent.denominator == 1:
            k = int(t.exponent)
            if v == 0 and k < 0:
                raise EvaluationError("zero base with negative exponent")
            return v**k
        fv = float(v)
        if fv < 0:
            raise EvaluationError("negative base with non-integer exponent")
        if fv == 0 and t.exponent < 0:
            raise EvaluationError("zero base with negative exponent")
        return fv ** float(t.exponent)
    if isinstance(t, Ln):
        v = float(tree_evaluate(t.arg, values))
        if v <= 0:
            raise EvaluationError("logarithm of a non-positive value")
        return math.log(v)
    if isinstance(t, Exp):
        return math.exp(float(tree_evaluate(t.arg, values)))
    raise KernelError(f"cannot evaluate {t!r}")


def tree_substitute(t: Tree, bindings: "Mapping[int, Tree]") -> Tree:
    """Simultaneous substitution; rational results collapse eagerly."""
    if not bindings:
        return t
    if isinstance(t, Rat):
        occurring = t.value.variables() & set(bindings)
        if not occurring:
            return t
        if all(isinstance(bindings[i], Rat) for i in occurring):
            rmap = {i: bindings[i].value for i in occurring}  # type: ignore[union-attr]
            return Rat(t.value.substitute(rmap))
        num_t = _poly_to_tree(t.value.num, bindings)
        den_t = tree_const(t.value.ctx, 1)
        for p, e in t.value.factors:
            den_t = tree_mul(den_t, tree_pow(_poly_to_tree(p, bindings), e))
        return tree_div(num_t, den_t)
    if isinstance(t, Sum):
        return tree_sum(*[tree_substitute(c, bindings) for c in t.children])
    if isinstance(t, Prod):
        return tree_mul(*[tree_substitute(c, bindings) for c in t.children])
    if isinstance(t, Pow):
        return tree_pow(tree_substitute(t.base, bindings), t.exponent)
    if isinstance(t, Ln):
        return Ln(tree_substitute(t.arg, bindings))
    if isinstance(t, Exp):
        return Exp(tree_substitute(t.arg, bindings))
    raise KernelError(f"cannot substitute into {t!r}")


def _poly_to_tree(p: Polynomial, bindings: "Mapping[int, Tree]") -> Tree:
    ctx = p.ctx
    parts: list[Tree] = []
    for e, c in p.sorted_terms():
        factors: list[Tree] = [tree_const(ctx, c)]
        for i, k in enumerate(e):
            if not k:
                continue
            base = bindings.get(i)
            if base is None:
                base = tree_symbol(ctx, ctx.symbols[i])
            factors.append(tree_pow(base, k))
        parts.append(tree_mul(*factors))
    if not parts:
        return tree_const(ctx, 0)
    return tree_sum(*parts)


def tree_variables(t: Tree) -> set[int]:
    if isinstance(t, Rat):
        return t.value.variables()
    if isinstance(t, (Sum, Prod)):
        out: set[int] = set()
        for c in t.children:
            out |= tree_variables(c)
        return out
    if isinstance(t, Pow):
        return tree_variables(t.base)
    return tree_variables(t.arg)  # type: ignore[union-attr]
