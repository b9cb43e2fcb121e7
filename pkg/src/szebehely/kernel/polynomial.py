"""Exact multivariate polynomials over the rationals.

Terms are stored as a map from exponent tuples (one slot per context symbol)
to nonzero ``Fraction`` coefficients.  The monomial order is graded
lexicographic with the context's global symbol order, so every polynomial has
exactly one stored form and structural equality is mathematical equality.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .symbols import Context, KernelError, Symbol

_ZERO = Fraction(0)
_ONE = Fraction(1)


class DifferentiationError(KernelError):
    pass


class EvaluationError(KernelError):
    pass


def _grlex_key(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), exp)


class Polynomial:
    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: Context, terms: dict[tuple[int, ...], Fraction]):
        # terms must already be clean: no zero coefficients
        self.ctx = ctx
        self.terms = terms

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(ctx: Context, value: Fraction | int) -> "Polynomial":
        value = Fraction(value)
        if value == 0:
            return Polynomial(ctx, {})
        return Polynomial(ctx, {ctx.zero_exponents: value})

    @staticmethod
    def symbol(ctx: Context, sym: Symbol | str) -> "Polynomial":
        i = ctx.index(sym)
        exp = list(ctx.zero_exponents)
        exp[i] = 1
        return Polynomial(ctx, {tuple(exp): _ONE})

    @staticmethod
    def zero(ctx: Context) -> "Polynomial":
        return Polynomial(ctx, {})

    @staticmethod
    def one(ctx: Context) -> "Polynomial":
        return Polynomial(ctx, {ctx.zero_exponents: _ONE})

    # -- basic queries -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        if not self.terms:
            return True
        return len(self.terms) == 1 and self.ctx.zero_exponents in self.terms

    def constant_value(self) -> Fraction:
        if not self.terms:
            return _ZERO
        if not self.is_constant:
            raise KernelError("polynomial is not constant")
        return self.terms[self.ctx.zero_exponents]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def variables(self) -> set[int]:
        seen: set[int] = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k and i not in seen:
                    seen.add(i)
        return seen

    def involves(self, i: int) -> bool:
        return any(e[i] for e in self.terms)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        if not self.terms:
            raise KernelError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx is other.ctx and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((id(self.ctx), frozenset(self.terms.items())))

    def __repr__(self) -> str:
        from .printer import format_polynomial

        return f"Polynomial({format_polynomial(self)})"

    # -- arithmetic ----------------------------------------------------

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ctx, {e: -c for e, c in self.terms.items()})

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        big, small = (self.terms, other.terms) if len(self.terms) >= len(other.terms) else (other.terms, self.terms)
        out = dict(big)
        for e, c in small.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial(self.ctx, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = -c
            else:
                s = s - c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial(self.ctx, out)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial(self.ctx, {})
        if len(a) > len(b):
            a, b = b, a
        out: dict[tuple[int, ...], Fraction] = {}
        get = out.get
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(map(sum, zip(ea, eb)))
                s = get(e)
                if s is None:
                    out[e] = ca * cb
                else:
                    s = s + ca * cb
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return Polynomial(self.ctx, out)

    def scale(self, k: Fraction | int) -> "Polynomial":
        k = Fraction(k)
        if k == 0:
            return Polynomial(self.ctx, {})
        return Polynomial(self.ctx, {e: c * k for e, c in self.terms.items()})

    def mul_monomial(self, exp: tuple[int, ...], coeff: Fraction = _ONE) -> "Polynomial":
        if coeff == 0:
            return Polynomial(self.ctx, {})
        return Polynomial(self.ctx, {tuple(map(sum, zip(e, exp))): c * coeff for e, c in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise KernelError("negative power of a polynomial")
        result = Polynomial.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def _check(self, other: "Polynomial") -> None:
        if self.ctx is not other.ctx:
            raise KernelError("polynomials from different contexts")

    # -- calculus ------------------------------------------------------

    def diff(self, sym: Symbol | str) -> "Polynomial":
        i = self.ctx.index(sym)
        s = self.ctx.symbols[i]
        if not s.differentiable:
            raise DifferentiationError(f"cannot differentiate with respect to constant symbol {s.name!r}")
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = list(e)
                e2[i] = k - 1
                key = tuple(e2)
                prev = out.get(key)
                val = c * k if prev is None else prev + c * k
                if val:
                    out[key] = val
                elif prev is not None:
                    del out[key]
        return Polynomial(self.ctx, out)

    def evaluate(self, values: Mapping[int, Fraction | float]):
        """Evaluate at a point given as index -> value.  Exact when every
        value is a Fraction/int; float otherwise.  Missing symbols that
        actually occur raise."""
        total = _ZERO
        exact = all(not isinstance(v, float) for v in values.values())
        if not exact:
            total = 0.0
        powers: dict[tuple[int, int], object] = {}
        for e, c in self.terms.items():
            term = c if exact else float(c)
            for i, k in enumerate(e):
                if not k:
                    continue
                key = (i, k)
                p = powers.get(key)
                if p is None:
                    if i not in values:
                        raise EvaluationError(
                            f"no value assigned to {self.ctx.symbols[i].name!r}"
                        )
                    p = values[i] ** k
                    powers[key] = p
                term = term * p
            total = total + term
        return total

    def substitute(self, mapping: "Mapping[int, Polynomial]") -> "Polynomial":
        """Simultaneously substitute polynomials for symbols (by index)."""
        out = Polynomial.zero(self.ctx)
        pow_cache: dict[tuple[int, int], Polynomial] = {}
        for e, c in self.terms.items():
            term = Polynomial.constant(self.ctx, c)
            rest: list[int] = []
            exp = list(self.ctx.zero_exponents)
            for i, k in enumerate(e):
                if not k:
                    continue
                if i in mapping:
                    key = (i, k)
                    p = pow_cache.get(key)
                    if p is None:
                        p = mapping[i] ** k
                        pow_cache[key] = p
                    term = term * p
                else:
                    exp[i] = k
            term = term.mul_monomial(tuple(exp))
            out = out + term
        return out

    # -- content, division, gcd ---------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive; 0 for zero."""
        if not self.terms:
            return _ZERO
        num_gcd = 0
        den_lcm = 1
        for c in self.terms.values():
            num_gcd = math.gcd(num_gcd, c.numerator)
            den_lcm = den_lcm * (c.denominator // math.gcd(den_lcm, c.denominator))
        return Fraction(num_gcd, den_lcm)

    def primitive(self) -> tuple["Polynomial", Fraction]:
        """Return (primitive part, content): integer coprime coefficients and
        positive leading coefficient; self == content * part."""
        if not self.terms:
            return self, _ZERO
        c = self.content()
        _, lead = self.leading()
        if lead < 0:
            c = -c
        return self.scale(1 / c), c

    def monomial_gcd(self) -> tuple[int, ...]:
        it = iter(self.terms)
        acc = list(next(it))
        for e in it:
            for i, k in enumerate(e):
                if k < acc[i]:
                    acc[i] = k
            if not any(acc):
                break
        return tuple(acc)

    def div_monomial(self, exp: tuple[int, ...]) -> "Polynomial":
        return Polynomial(self.ctx, {tuple(a - b for a, b in zip(e, exp)): c for e, c in self.terms.items()})

    def exact_div(self, divisor: "Polynomial") -> "Polynomial | None":
        """Exact polynomial quotient, or None when the division fails."""
        self._check(divisor)
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero:
            return self
        if divisor.is_constant:
            return self.scale(1 / divisor.constant_value())
        dlead_exp, dlead_c = divisor.leading()
        if sum(dlead_exp) > self.total_degree():
            return None
        rem = dict(self.terms)
        out: dict[tuple[int, ...], Fraction] = {}
        dterms = divisor.terms
        while rem:
            rexp = max(rem, key=_grlex_key)
            q = tuple(a - b for a, b in zip(rexp, dlead_exp))
            if any(k < 0 for k in q):
                return None
            qc = rem[rexp] / dlead_c
            out[q] = qc
            for e, c in dterms.items():
                key = tuple(map(sum, zip(q, e)))
                s = rem.get(key)
                val = -qc * c if s is None else s - qc * c
                if val:
                    rem[key] = val
                else:
                    rem.pop(key, None)
        return Polynomial(self.ctx, out)

    # main-variable views, used by the gcd routine

    def _coeffs_in(self, v: int) -> dict[int, "Polynomial"]:
        buckets: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for e, c in self.terms.items():
            k = e[v]
            e2 = list(e)
            e2[v] = 0
            buckets.setdefault(k, {})[tuple(e2)] = c
        return {k: Polynomial(self.ctx, t) for k, t in buckets.items()}


def _from_coeffs(ctx: Context, v: int, coeffs: dict[int, Polynomial]) -> Polynomial:
    terms: dict[tuple[int, ...], Fraction] = {}
    for k, p in coeffs.items():
        for e, c in p.terms.items():
            e2 = list(e)
            e2[v] += k
            terms[tuple(e2)] = c
    return Polynomial(ctx, terms)


def _content_in(p: Polynomial, v: int) -> Polynomial:
    """GCD of the coefficients of p viewed as univariate in v."""
    coeffs = list(p._coeffs_in(v).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        if g.is_constant and not g.is_zero:
            break
        g = poly_gcd(g, c)
    return g


def _pseudo_rem(a: dict[int, Polynomial], b: dict[int, Polynomial], ctx: Context) -> dict[int, Polynomial]:
    """Pseudo-remainder of univariate-in-v polynomials with Polynomial
    coefficients (dict degree -> coeff)."""
    da, db = max(a), max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        shift = dr - db
        new: dict[int, Polynomial] = {}
        for k, c in r.items():
            if k == dr:
                continue
            new[k] = c * lb
        for k, c in b.items():
            if k == db:
                continue
            t = c * lr
            s = new.get(k + shift)
            s = -t if s is None else s - t
            if s.is_zero:
                new.pop(k + shift, None)
            else:
                new[k + shift] = s
        r = new
    return r


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """GCD over Q, canonicalized: integer-primitive with positive leading
    coefficient (a positive constant's gcd contribution is 1).

    Strategy: strip monomial factors and contents, try cheap exact
    divisions, then a primitive pseudo-remainder sequence in the variable
    where the smaller operand has the lowest positive degree.
    """
    if a.ctx is not b.ctx:
        raise KernelError("polynomials from different contexts")
    ctx = a.ctx
    if a.is_zero:
        return b.primitive()[0] if not b.is_zero else a
    if b.is_zero:
        return a.primitive()[0]
    ma, mb = a.monomial_gcd(), b.monomial_gcd()
    mg = tuple(min(i, j) for i, j in zip(ma, mb))
    a = a.div_monomial(ma)
    b = b.div_monomial(mb)
    a, _ = a.primitive()
    b, _ = b.primitive()
    g = _ppgcd(a, b)
    if any(mg):
        g = g.mul_monomial(mg)
    return g


def _ppgcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """GCD of integer-primitive, monomial-free polynomials."""
    ctx = a.ctx
    one = Polynomial.one(ctx)
    if a.is_constant or b.is_constant:
        return one
    if a.terms == b.terms:
        return a
    common = a.variables() & b.variables()
    if not common:
        return one
    # try the cheap case: one divides the other
    if len(a.terms) > len(b.terms):
        big, small = a, b
    else:
        big, small = b, a
    if big.exact_div(small) is not None:
        return small
    # primitive PRS in the most favourable common variable
    v = min(common, key=lambda i: min(a.degree_in(i), b.degree_in(i)))
    ca = _content_in(a, v)
    cb = _content_in(b, v)
    cg = poly_gcd(ca, cb)
    pa = a.exact_div(ca)
    pb = b.exact_div(cb)
    assert pa is not None and pb is not None
    ua = pa._coeffs_in(v)
    ub = pb._coeffs_in(v)
    if max(ua) < max(ub):
        ua, ub = ub, ua
    while True:
        r = _pseudo_rem(ua, ub, ctx)
        if not r:
            g = _from_coeffs(ctx, v, ub)
            break
        if max(r) == 0:
            g = Polynomial.one(ctx)
            break
        rp = _from_coeffs(ctx, v, r)
        rc = _content_in(rp, v)
        rp = rp.exact_div(rc)
        assert rp is not None
        ua, ub = ub, rp._coeffs_in(v)
    if not g.is_constant:
        # the PRS result divides the true gcd only up to content; both inputs
        # are v-primitive so a final check against them is enough
        g, _ = g.primitive()
        if a.exact_div(g) is None or b.exact_div(g) is None:
            g = Polynomial.one(ctx)
    result = g * cg if not cg.is_constant else g
    result, _ = result.primitive()
    return result


def poly_lcm(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero or b.is_zero:
        return Polynomial.zero(a.ctx)
    g = poly_gcd(a, b)
    q = a.exact_div(g)
    assert q is not None
    out, _ = (q * b).primitive()
    return out
