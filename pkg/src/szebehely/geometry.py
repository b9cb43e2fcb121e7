"""Geometric objects built from two surface families and a constant metric.

Everything here is exact: vector fields and one-forms are triples of rational
functions, and all the structure fields of the inverse problem (the tangent
field, its acceleration, the metric-raised gradients, the compatibility field
X, the Szebehely coefficient A, the frame brackets) are produced by pure
functions of the input data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .kernel import (
    Context,
    KernelError,
    Polynomial,
    RationalFunction,
    Tree,
    format_rational,
    fraction_gcd,
    poly_gcd,
    poly_lcm,
    tree_diff,
    tree_mul,
    tree_rational,
    tree_sum,
)

GEOM = ("x", "y", "z")


class GeometryError(KernelError):
    pass


class DependentDataError(GeometryError):
    """The two surface gradients are everywhere parallel."""


class SingularMetricError(GeometryError):
    pass


class DegenerateFrameError(GeometryError):
    pass


class StraightLineDataError(GeometryError):
    """Raised when X- or A-type objects are requested for data whose
    acceleration field is tangent to the curves (the straight-line case)."""


class NullTangentError(GeometryError):
    """g(Z0, Z0) vanishes identically (possible for indefinite metrics)."""


def _zero(ctx: Context) -> RationalFunction:
    return RationalFunction.constant(ctx, 0)


class VectorField:
    __slots__ = ("components",)

    def __init__(self, components: Sequence[RationalFunction]):
        self.components = tuple(components)
        if len(self.components) != 3:
            raise GeometryError("vector fields have three components")

    @property
    def ctx(self) -> Context:
        return self.components[0].ctx

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def __getitem__(self, i: int) -> RationalFunction:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField([a + b for a, b in zip(self, other)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField([a - b for a, b in zip(self, other)])

    def __neg__(self) -> "VectorField":
        return VectorField([-a for a in self.components])

    def scale(self, f: RationalFunction) -> "VectorField":
        return VectorField([f * a for a in self.components])

    def apply(self, f: "RationalFunction | Tree"):
        """Directional derivative v^i dF/dx^i; trees stay trees."""
        ctx = self.ctx
        if isinstance(f, RationalFunction):
            out = _zero(ctx)
            for name, comp in zip(GEOM, self.components):
                if not comp.is_zero:
                    out = out + comp * f.diff(name)
            return out
        parts = [tree_mul(tree_rational(comp), tree_diff(f, name)) for name, comp in zip(GEOM, self.components)]
        return tree_sum(*parts)

    def evaluate(self, values) -> tuple:
        return tuple(c.evaluate(values) for c in self.components)

    def __repr__(self) -> str:
        return "VectorField(" + ", ".join(format_rational(c) for c in self.components) + ")"


class OneForm:
    __slots__ = ("components",)

    def __init__(self, components: Sequence[RationalFunction]):
        self.components = tuple(components)
        if len(self.components) != 3:
            raise GeometryError("one-forms have three components")

    @property
    def ctx(self) -> Context:
        return self.components[0].ctx

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def __getitem__(self, i: int) -> RationalFunction:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.components == other.components

    def __call__(self, v: VectorField) -> RationalFunction:
        out = _zero(self.ctx)
        for a, b in zip(self.components, v.components):
            out = out + a * b
        return out

    def scale(self, f: RationalFunction) -> "OneForm":
        return OneForm([f * a for a in self.components])

    def __repr__(self) -> str:
        return "OneForm(" + ", ".join(format_rational(c) for c in self.components) + ")"


def gradient(f: RationalFunction) -> OneForm:
    return OneForm([f.diff(name) for name in GEOM])


def curl(omega: OneForm) -> VectorField:
    """Vector density of the exterior derivative under the standard volume
    form (dimension three hard-coded)."""
    a, b, c = omega.components
    return VectorField(
        [
            c.diff("y") - b.diff("z"),
            a.diff("z") - c.diff("x"),
            b.diff("x") - a.diff("y"),
        ]
    )


def cross(u: OneForm, w: OneForm) -> VectorField:
    """Vector density of the wedge of two one-forms."""
    return VectorField(
        [
            u[1] * w[2] - u[2] * w[1],
            u[2] * w[0] - u[0] * w[2],
            u[0] * w[1] - u[1] * w[0],
        ]
    )


def det3(rows: Sequence[Sequence[RationalFunction]]) -> RationalFunction:
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


class Metric:
    """Constant symmetric multiplier matrix; entries are rational functions
    of the six parameters (or plain numbers), never of x, y, z."""

    def __init__(self, entries: Sequence[Sequence[RationalFunction]]):
        self.entries = tuple(tuple(row) for row in entries)
        if len(self.entries) != 3 or any(len(r) != 3 for r in self.entries):
            raise GeometryError("metric must be 3x3")
        for i in range(3):
            for j in range(i + 1, 3):
                if self.entries[i][j] != self.entries[j][i]:
                    raise GeometryError("metric must be symmetric")
        geom_idx = {self.ctx.index(n) for n in GEOM}
        for row in self.entries:
            for e in row:
                if e.variables() & geom_idx:
                    raise GeometryError("metric entries must be constant in x, y, z")
        if self.det.is_zero:
            raise SingularMetricError("metric determinant vanishes identically")

    @property
    def ctx(self) -> Context:
        return self.entries[0][0].ctx

    @cached_property
    def det(self) -> RationalFunction:
        return det3(self.entries)

    @cached_property
    def adjugate(self) -> tuple:
        e = self.entries
        co = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != i]
                c = [k for k in range(3) if k != j]
                minor = e[r[0]][c[0]] * e[r[1]][c[1]] - e[r[0]][c[1]] * e[r[1]][c[0]]
                sign = 1 if (i + j) % 2 == 0 else -1
                co[j][i] = minor.scale(sign)  # transposed
        return tuple(tuple(row) for row in co)

    @staticmethod
    def euclidean(ctx: Context) -> "Metric":
        one = RationalFunction.constant(ctx, 1)
        zero = _zero(ctx)
        return Metric([[one, zero, zero], [zero, one, zero], [zero, zero, one]])

    @staticmethod
    def symbolic(ctx: Context, bindings: dict[str, RationalFunction] | None = None) -> "Metric":
        """Fully symbolic metric, optionally with some entries bound to
        expressions in the remaining parameters (e.g. g33 -> g23)."""
        vals = {}
        for name in ("g11", "g12", "g13", "g22", "g23", "g33"):
            v = RationalFunction.symbol(ctx, name)
            if bindings and name in bindings:
                v = bindings[name]
            vals[name] = v
        return Metric(
            [
                [vals["g11"], vals["g12"], vals["g13"]],
                [vals["g12"], vals["g22"], vals["g23"]],
                [vals["g13"], vals["g23"], vals["g33"]],
            ]
        )

    @staticmethod
    def explicit(ctx: Context, six: Sequence[Fraction | int]) -> "Metric":
        g11, g12, g13, g22, g23, g33 = [RationalFunction.constant(ctx, v) for v in six]
        return Metric([[g11, g12, g13], [g12, g22, g23], [g13, g23, g33]])

    def raise_index(self, omega: OneForm) -> VectorField:
        adj = self.adjugate
        det = self.det
        comps = []
        for i in range(3):
            s = _zero(self.ctx)
            for k in range(3):
                if not omega[k].is_zero:
                    s = s + adj[i][k] * omega[k]
            comps.append(s / det)
        return VectorField(comps)

    def lower(self, v: VectorField) -> OneForm:
        comps = []
        for i in range(3):
            s = _zero(self.ctx)
            for j in range(3):
                if not v[j].is_zero:
                    s = s + self.entries[i][j] * v[j]
            comps.append(s)
        return OneForm(comps)

    def pairing(self, v: VectorField, w: VectorField) -> RationalFunction:
        return self.lower(v)(w)

    def evaluate(self, values) -> tuple:
        return tuple(tuple(e.evaluate(values) for e in row) for row in self.entries)

    def __repr__(self) -> str:
        return f"Metric({[[format_rational(e) for e in row] for row in self.entries]})"


def z0_from_data(phi: RationalFunction, psi: RationalFunction) -> VectorField:
    """Cross product of the two gradients; tangent to the data curves."""
    raw = cross(gradient(phi), gradient(psi))
    if raw.is_zero:
        raise DependentDataError("the surface gradients are everywhere parallel")
    return raw


def rescale_primitive(v: VectorField) -> tuple[VectorField, RationalFunction]:
    """Clear denominators and strip the component gcd, preserving
    orientation; returns (w, scale) with v == scale * w and the scale
    positive under the monomial order."""
    if v.is_zero:
        raise GeometryError("cannot rescale the zero field")
    ctx = v.ctx
    lcm = Polynomial.one(ctx)
    for c in v.components:
        if not c.is_zero:
            lcm = poly_lcm(lcm, c.den)
    ws = []
    for c in v.components:
        q = lcm.exact_div(c.den)
        assert q is not None
        ws.append(c.num * q)
    nonzero = [w for w in ws if not w.is_zero]
    g = nonzero[0]
    for w in nonzero[1:]:
        g = poly_gcd(g, w)
    content = fraction_gcd([w.content() for w in nonzero])
    d = g.scale(content)
    out = []
    for w in ws:
        q = w.exact_div(d)
        assert q is not None
        out.append(RationalFunction.from_poly(q))
    scale = RationalFunction.from_polys(d, lcm)
    return VectorField(out), scale


def covariant_accel(z0: VectorField) -> VectorField:
    """Acceleration field of the tangent field: components Z0(Z0^i); for a
    constant metric this is the covariant derivative along Z0."""
    return VectorField([z0.apply(c) for c in z0.components])


def lie_bracket(v: VectorField, w: VectorField) -> VectorField:
    return VectorField([v.apply(w[i]) - w.apply(v[i]) for i in range(3)])


@dataclass(frozen=True)
class FrameDecomposition:
    names: tuple[str, str, str]
    basis: tuple[VectorField, VectorField, VectorField]
    coefficients: dict

    def __getitem__(self, name: str) -> RationalFunction:
        return self.coefficients[name]

    def reconstruct(self) -> VectorField:
        out = self.basis[0].scale(self.coefficients[self.names[0]])
        for name, b in zip(self.names[1:], self.basis[1:]):
            out = out + b.scale(self.coefficients[name])
        return out


def frame_decompose(
    w: VectorField,
    basis: Sequence[VectorField],
    names: Sequence[str] = ("X", "Z1", "Z0"),
) -> FrameDecomposition:
    """Exact coefficients of w in a 3-frame by Cramer's rule."""
    cols = list(basis)
    det = det3([[cols[j][i] for j in range(3)] for i in range(3)])
    if det.is_zero:
        raise DegenerateFrameError("frame determinant vanishes identically")
    coeffs = {}
    for j, name in enumerate(names):
        rows = []
        for i in range(3):
            row = [cols[k][i] if k != j else w[i] for k in range(3)]
            rows.append(row)
        coeffs[name] = det3(rows) / det
    return FrameDecomposition(tuple(names), tuple(cols), coeffs)


def integrability_test(v: VectorField, w: VectorField) -> bool:
    """Frobenius test for span{v, w}: det(v, w, [v, w]) identically zero."""
    if cross(OneForm(v.components), OneForm(w.components)).is_zero:
        raise DegenerateFrameError("integrability test requires independent fields")
    br = lie_bracket(v, w)
    det = det3([[v[i], w[i], br[i]] for i in range(3)])
    return det.is_zero


def alpha0(g: Metric, z0: VectorField) -> OneForm:
    """The one-form metric-dual to the tangent field."""
    return g.lower(z0)


def beta0(g: Metric, z0: VectorField) -> OneForm:
    """(2 / g(Z0,Z0)) * covariant derivative of alpha0 along Z0; the
    normalization makes beta0(A Z1) identically one."""
    norm = g.pairing(z0, z0)
    if norm.is_zero:
        raise NullTangentError("g(Z0, Z0) vanishes identically; beta0 undefined")
    return g.lower(covariant_accel(z0)).scale(RationalFunction.constant(g.ctx, 2) / norm)


def wedge_with_differential(omega: OneForm) -> RationalFunction:
    """Scalar density of d(omega) wedge omega under the standard volume form."""
    return OneForm(curl(omega).components)(VectorField(omega.components))


def frobenius_dual_holds(g: Metric, z0: VectorField) -> bool:
    """dual form of the Frobenius test for the orthogonal complement of Z0:
    d(alpha0) wedge alpha0 == 0."""
    return wedge_with_differential(alpha0(g, z0)).is_zero


class GeometrySession:
    """All geometric objects of one problem (phi, psi, g), built from a
    single deterministic primitively-rescaled tangent field.

    When the acceleration pairs to zero with d(phi) but not d(psi), the two
    surface functions are swapped first (recorded in `swapped`); every
    downstream object refers to the post-swap names.
    """

    def __init__(
        self,
        phi: RationalFunction,
        psi: RationalFunction,
        g: Metric,
        z0_override: VectorField | None = None,
    ):
        self.user_phi, self.user_psi = phi, psi
        self.g = g
        raw = z0_from_data(phi, psi) if z0_override is None else z0_override
        if raw.is_zero:
            raise DependentDataError("tangent field vanishes identically")
        self.z0, self.z0_scale = rescale_primitive(raw)
        self.delta_z = covariant_accel(self.z0)
        dzphi = self.delta_z.apply(phi)
        dzpsi = self.delta_z.apply(psi)
        self.swapped = False
        if dzphi.is_zero and not dzpsi.is_zero:
            phi, psi = psi, phi
            dzphi, dzpsi = dzpsi, dzphi
            self.swapped = True
        self.phi, self.psi = phi, psi
        self.dz_phi, self.dz_psi = dzphi, dzpsi
        self.dphi = gradient(phi)
        self.dpsi = gradient(psi)
        self.z1 = g.raise_index(self.dphi)
        self.z2 = g.raise_index(self.dpsi)

    @property
    def ctx(self) -> Context:
        return self.z0.ctx

    @cached_property
    def straight_line(self) -> bool:
        """All 2x2 minors of (delta_z, z0) vanish: acceleration tangent to
        the curves, i.e. the data are straight lines."""
        return cross(OneForm(self.delta_z.components), OneForm(self.z0.components)).is_zero

    @property
    def case0(self) -> bool:
        return self.dz_phi.is_zero and self.dz_psi.is_zero

    def _require_not_case0(self) -> None:
        if self.case0:
            raise StraightLineDataError(
                "delta_z(phi) = delta_z(psi) = 0: straight-line data, X and A are undefined"
            )

    @cached_property
    def _x_and_scale(self) -> tuple[VectorField, RationalFunction]:
        self._require_not_case0()
        raw = self.z1.scale(self.dz_psi) - self.z2.scale(self.dz_phi)
        if raw.is_zero:  # impossible for admissible data; guard anyway
            raise DegenerateFrameError("compatibility field X vanishes identically")
        return rescale_primitive(raw)

    @property
    def X(self) -> VectorField:
        return self._x_and_scale[0]

    @property
    def x_scale(self) -> RationalFunction:
        return self._x_and_scale[1]

    @cached_property
    def A(self) -> RationalFunction:
        self._require_not_case0()
        return self.g.pairing(self.z0, self.z0) / self.dz_phi.scale(2)

    @cached_property
    def z0_norm(self) -> RationalFunction:
        return self.g.pairing(self.z0, self.z0)

    def complement_integrable(self) -> bool:
        """Frobenius test for the g-orthogonal complement of Z0, computed
        both as a bracket-determinant and in the dual exterior form; the two
        must agree."""
        if self.case0:
            primal = integrability_test(self.z1, self.z2)
        else:
            primal = integrability_test(self.X, self.z1)
        if not self.z0_norm.is_zero:
            dual = frobenius_dual_holds(self.g, self.z0)
            if dual != primal:  # pragma: no cover - would falsify Frobenius duality
                raise GeometryError("bracket and dual Frobenius tests disagree (internal error)")
        return primal

    def compose_energy(self, energy: "Tree | RationalFunction"):
        """Substitute the surface functions for the formal PHI, PSI slots of
        an energy expression (always the user's original phi and psi)."""
        from .kernel import substitute

        return substitute(energy, {"PHI": self.user_phi, "PSI": self.user_psi})
