"""Canonical rational functions.

A value is numerator/denominator in lowest terms with the denominator
integer-primitive and positive-leading under the monomial order, so equal
functions have equal representations.  Internally the denominator is kept as
a list of pairwise-coprime factors; cancellation against the numerator then
needs only small gcds and divisibility probes instead of one giant
multivariate gcd, which is what keeps the Case-2 classification expressions
of this problem tractable.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Mapping, Sequence

from .polynomial import EvaluationError, Polynomial, poly_gcd
from .symbols import Context, KernelError, Symbol

_ONE = Fraction(1)

Factors = tuple[tuple[Polynomial, int], ...]


def _coprime_basis(items: Sequence[tuple[Polynomial, int]]) -> list[list]:
    """Rewrite a factor multiset as pairwise-coprime factors with the same
    product.  Constant factors are dropped (callers track scale in the
    numerator)."""
    out: list[list] = []
    work = [[p, e] for p, e in items]
    fuel = 64 * (len(work) + 1) * (1 + sum(max(p.total_degree(), 1) for p, _ in items))
    while work:
        fuel -= 1
        if fuel < 0:  # pragma: no cover - would indicate a refinement bug
            raise KernelError("factor refinement did not terminate")
        p, e = work.pop()
        if p.is_constant:
            continue
        placed = False
        for slot in out:
            q, eq = slot
            if p == q:
                slot[1] = eq + e
                placed = True
                break
            g = poly_gcd(p, q)
            if g.is_constant:
                continue
            out.remove(slot)
            work.append([g, e + eq])
            q1 = q.exact_div(g)
            p1 = p.exact_div(g)
            assert q1 is not None and p1 is not None
            if not q1.is_constant:
                work.append([q1, eq])
            if not p1.is_constant:
                work.append([p1, e])
            placed = True
            break
        if not placed:
            out.append([p, e])
    return out


def _cancel(num: Polynomial, factors: Sequence[tuple[Polynomial, int]]) -> tuple[Polynomial, Factors]:
    """Reduce num against pairwise-coprime factors until coprime to all."""
    if num.is_zero:
        return num, ()
    out: list[tuple[Polynomial, int]] = []
    work = [(p, e) for p, e in factors]
    while work:
        f, k = work.pop()
        while k > 0:
            q = num.exact_div(f)
            if q is None:
                break
            num = q
            k -= 1
        if k == 0:
            continue
        g = poly_gcd(num, f)
        if g.is_constant:
            out.append((f, k))
            continue
        f1 = f.exact_div(g)
        assert f1 is not None
        work.append((g, k))
        if not f1.is_constant:
            work.append((f1, k))
    out.sort(key=lambda fk: (fk[0].total_degree(), len(fk[0].terms)))
    return num, tuple(out)


def _decompose(factors: Factors, basis: Sequence[tuple[Polynomial, int]]) -> dict[int, int]:
    """Exponent of each basis element in the product of `factors`."""
    exps: dict[int, int] = {}
    for f, k in factors:
        rem = f
        for i, (p, _) in enumerate(basis):
            while True:
                q = rem.exact_div(p)
                if q is None:
                    break
                rem = q
                exps[i] = exps.get(i, 0) + k
            if rem.is_constant:
                break
        if not rem.is_constant:  # pragma: no cover - basis covers its inputs
            raise KernelError("factor not covered by refined basis")
    return exps


class RationalFunction:
    """Callers hand ``__init__`` factors that are already integer-primitive
    and pairwise coprime; ``_reduce=False`` additionally asserts they are
    coprime to the numerator (the representation is then final)."""

    __slots__ = ("num", "factors", "_den")

    def __init__(self, num: Polynomial, factors: Factors = (), _reduce: bool = True):
        if num.is_zero:
            factors = ()
        elif _reduce and factors:
            num, factors = _cancel(num, factors)
        self.num = num
        self.factors = factors
        self._den: Polynomial | None = None

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_polys(num: Polynomial, den: Polynomial) -> "RationalFunction":
        if den.is_zero:
            raise ZeroDivisionError("denominator is identically zero")
        if den.is_constant:
            return RationalFunction(num.scale(1 / den.constant_value()), (), _reduce=False)
        pp, c = den.primitive()
        num = num.scale(1 / c)
        if pp.is_constant:
            return RationalFunction(num, (), _reduce=False)
        return RationalFunction(num, ((pp, 1),))

    @staticmethod
    def from_poly(num: Polynomial) -> "RationalFunction":
        return RationalFunction(num, (), _reduce=False)

    @staticmethod
    def constant(ctx: Context, value: Fraction | int) -> "RationalFunction":
        return RationalFunction(Polynomial.constant(ctx, value), (), _reduce=False)

    @staticmethod
    def symbol(ctx: Context, sym: Symbol | str) -> "RationalFunction":
        return RationalFunction(Polynomial.symbol(ctx, sym), (), _reduce=False)

    # -- queries ----------------------------------------------------------

    @property
    def ctx(self) -> Context:
        return self.num.ctx

    @property
    def den(self) -> Polynomial:
        if self._den is None:
            d = Polynomial.one(self.num.ctx)
            for p, e in self.factors:
                d = d * p**e
            self._den = d
        return self._den

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and not self.factors

    @property
    def is_polynomial(self) -> bool:
        return not self.factors

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise KernelError("rational function is not constant")
        return self.num.constant_value()

    def variables(self) -> set[int]:
        seen = self.num.variables()
        for p, _ in self.factors:
            seen |= p.variables()
        return seen

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __bool__(self) -> bool:
        return not self.num.is_zero

    def __repr__(self) -> str:
        from .printer import format_rational

        return f"RationalFunction({format_rational(self)})"

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.factors, _reduce=False)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.num.is_zero:
            return other
        if other.num.is_zero:
            return self
        if not self.factors and not other.factors:
            return RationalFunction(self.num + other.num, (), _reduce=False)
        basis = [(p, e) for p, e in _coprime_basis(list(self.factors) + list(other.factors))]
        da = _decompose(self.factors, basis)
        db = _decompose(other.factors, basis)
        lcm = {i: max(da.get(i, 0), db.get(i, 0)) for i in range(len(basis))}
        ma = self.num
        mb = other.num
        for i, (p, _) in enumerate(basis):
            ka = lcm[i] - da.get(i, 0)
            kb = lcm[i] - db.get(i, 0)
            if ka:
                ma = ma * p**ka
            if kb:
                mb = mb * p**kb
        new_factors = tuple((basis[i][0], k) for i, k in lcm.items() if k)
        return RationalFunction(ma + mb, new_factors)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if self.num.is_zero or other.num.is_zero:
            return RationalFunction(Polynomial.zero(self.num.ctx), (), _reduce=False)
        # cross-cancel before multiplying the numerators
        na, fb = _cancel(self.num, other.factors)
        nb, fa = _cancel(other.num, self.factors)
        merged: dict[Polynomial, int] = {}
        distinct: list[tuple[Polynomial, int]] = []
        for p, e in list(fa) + list(fb):
            if p in merged:
                merged[p] += e
            else:
                merged[p] = e
        items = list(merged.items())
        need_refine = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                if not poly_gcd(items[i][0], items[j][0]).is_constant:
                    need_refine = True
                    break
            if need_refine:
                break
        factors = tuple(items)
        if need_refine:
            factors = tuple((p, e) for p, e in _coprime_basis(items))
        # every factor piece divides one of the original denominators, so it
        # stays coprime to both (already cross-cancelled) numerators
        return RationalFunction(na * nb, factors, _reduce=False)

    def scale(self, k: Fraction | int) -> "RationalFunction":
        if k == 0:
            return RationalFunction(Polynomial.zero(self.num.ctx), (), _reduce=False)
        return RationalFunction(self.num.scale(k), self.factors, _reduce=False)

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero:
            raise ZeroDivisionError("inverse of the zero function")
        pp, c = self.num.primitive()
        new_num = self.den.scale(1 / c)
        if pp.is_constant:
            return RationalFunction(new_num, (), _reduce=False)
        return RationalFunction(new_num, ((pp, 1),), _reduce=False)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, k: int) -> "RationalFunction":
        if k == 0:
            return RationalFunction.constant(self.num.ctx, 1)
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num**k, tuple((p, e * k) for p, e in self.factors), _reduce=False)

    # -- calculus -------------------------------------------------------

    def diff(self, sym: Symbol | str) -> "RationalFunction":
        i = self.ctx.index(sym)
        dn = self.num.diff(sym)
        if not self.factors:
            return RationalFunction(dn, (), _reduce=False)
        relevant = [(p, e) for p, e in self.factors if p.involves(i)]
        if not relevant:
            return RationalFunction(dn, self.factors)
        square_free = Polynomial.one(self.ctx)
        for p, _ in relevant:
            square_free = square_free * p
        total = dn * square_free
        for p, e in relevant:
            cofactor = Polynomial.one(self.ctx)
            for q, _ in relevant:
                if q is not p:
                    cofactor = cofactor * q
            total = total - self.num * p.diff(sym).scale(e) * cofactor
        new_factors = tuple((p, e + 1) if p.involves(i) else (p, e) for p, e in self.factors)
        return RationalFunction(total, new_factors)

    def evaluate(self, values: Mapping[int, Fraction | float]):
        den_val = None
        for p, e in self.factors:
            v = p.evaluate(values)
            if v == 0:
                raise EvaluationError("denominator vanishes at the evaluation point")
            pv = v**e
            den_val = pv if den_val is None else den_val * pv
        n = self.num.evaluate(values)
        if den_val is None:
            return n
        return n / den_val

    def substitute(self, mapping: "Mapping[int, RationalFunction]") -> "RationalFunction":
        """Simultaneous substitution of rational functions for symbols."""
        if not mapping:
            return self
        n = _subst_poly(self.num, mapping)
        if not self.factors:
            return n
        d = RationalFunction.constant(self.ctx, 1)
        for p, e in self.factors:
            pv = _subst_poly(p, mapping)
            if pv.is_zero:
                raise ZeroDivisionError("substitution makes a denominator identically zero")
            d = d * pv**e
        return n / d


def _subst_poly(p: Polynomial, mapping: Mapping[int, RationalFunction]) -> RationalFunction:
    ctx = p.ctx
    relevant = {i for i in mapping if p.involves(i)}
    if not relevant:
        return RationalFunction(p, (), _reduce=False)
    out = RationalFunction.constant(ctx, 0)
    cache: dict[tuple[int, int], RationalFunction] = {}
    for e, c in p.terms.items():
        exp = list(ctx.zero_exponents)
        term = RationalFunction.constant(ctx, c)
        for i, k in enumerate(e):
            if not k:
                continue
            if i in relevant:
                key = (i, k)
                v = cache.get(key)
                if v is None:
                    v = mapping[i] ** k
                    cache[key] = v
                term = term * v
            else:
                exp[i] = k
        mono = tuple(exp)
        if any(mono):
            term = term * RationalFunction.from_poly(Polynomial(ctx, {mono: _ONE}))
        out = out + term
    return out


def fraction_gcd(values: Sequence[Fraction]) -> Fraction:
    num = 0
    den = 1
    for v in values:
        num = math.gcd(num, v.numerator)
        den = den * (v.denominator // math.gcd(den, v.denominator))
    return Fraction(num, den)
