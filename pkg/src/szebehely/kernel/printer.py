"""Canonical text form for kernel values.

The printer emits exactly the grammar the parser accepts, and parsing a
printed canonical value reproduces it structurally.
"""

from __future__ import annotations

from fractions import Fraction

from .exprtree import Exp, Ln, Pow, Prod, Rat, Sum, Tree
from .polynomial import Polynomial
from .rational import RationalFunction


def _format_monomial(p: Polynomial, exp: tuple[int, ...]) -> str:
    parts = []
    for i, k in enumerate(exp):
        if not k:
            continue
        name = p.ctx.symbols[i].name
        parts.append(name if k == 1 else f"{name}^{k}")
    return "*".join(parts)


def format_polynomial(p: Polynomial) -> str:
    if p.is_zero:
        return "0"
    chunks: list[str] = []
    for exp, coeff in p.sorted_terms():
        mono = _format_monomial(p, exp)
        mag = abs(coeff)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not chunks:
            chunks.append(f"-{body}" if coeff < 0 else body)
        else:
            chunks.append(f"- {body}" if coeff < 0 else f"+ {body}")
    return " ".join(chunks)


def _is_single_atom_power(p: Polynomial) -> bool:
    # one term, coefficient 1, a single symbol to some power: safe after '/'
    if len(p.terms) != 1:
        return False
    ((exp, coeff),) = p.terms.items()
    return coeff == 1 and sum(1 for k in exp if k) == 1


def format_rational(r: RationalFunction) -> str:
    num, den = r.num, r.den
    if den.is_constant:
        return format_polynomial(num)
    num_s = format_polynomial(num)
    if len(num.terms) > 1:
        num_s = f"({num_s})"
    den_s = format_polynomial(den)
    if not _is_single_atom_power(den):
        den_s = f"({den_s})"
    return f"{num_s}/{den_s}"


def _rat_is_atom(r: RationalFunction) -> bool:
    # a bare symbol: the only rational that can stand unparenthesized as a
    # power base ("x^2"; anything else would re-associate when reparsed)
    if not r.den.is_constant or len(r.num.terms) != 1:
        return False
    ((exp, coeff),) = r.num.terms.items()
    return coeff == 1 and sum(exp) == 1


def format_tree(t: Tree) -> str:
    if isinstance(t, Rat):
        return format_rational(t.value)
    if isinstance(t, Sum):
        chunks = []
        for c in t.children:
            s = format_tree(c)
            if not chunks:
                chunks.append(s)
            elif s.startswith("-"):
                chunks.append("- " + s[1:])
            else:
                chunks.append("+ " + s)
        return " ".join(chunks)
    if isinstance(t, Prod):
        chunks = []
        for c in t.children:
            s = format_tree(c)
            needs_parens = isinstance(c, Sum) or (
                isinstance(c, Rat) and c.value.den.is_constant and len(c.value.num.terms) > 1
            )
            if needs_parens:
                s = f"({s})"
            chunks.append(s)
        return "*".join(chunks)
    if isinstance(t, Pow):
        base = format_tree(t.base)
        if not (isinstance(t.base, (Ln, Exp)) or (isinstance(t.base, Rat) and _rat_is_atom(t.base.value))):
            base = f"({base})"
        e = t.exponent
        exp_s = str(e.numerator) if e.denominator == 1 and e >= 0 else f"({e})"
        return f"{base}^{exp_s}"
    if isinstance(t, Ln):
        return f"ln({format_tree(t.arg)})"
    if isinstance(t, Exp):
        return f"exp({format_tree(t.arg)})"
    raise TypeError(f"unprintable value {t!r}")
