"""Integrability classification of the inverse problem.

The decision tree:

* both acceleration pairings vanish -> straight-line data (Case 0); the
  orthogonal complement of the tangent field is spanned by the two raised
  gradients, and the case splits on whether that span is integrable (0a)
  or not (0b);
* otherwise the compatibility field X exists and the bracket [X, Z1]
  decomposes in the frame {X, Z1, Z0}.  A vanishing Z0-component is Case 1,
  where X(A) + b A = 0 must hold identically (a theorem, asserted here, not
  a branch) and the subcase 1a1/1a2 is the integrability of span{X, Z0};
* a nonvanishing Z0-component is Case 2, with the two linear-in-V relations
  F1 V = G1(E), F2 V = G2(E) and subcases by which of F1, F2 vanish.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .geometry import (
    GeometryError,
    GeometrySession,
    Metric,
    VectorField,
    cross,
    frame_decompose,
    integrability_test,
    lie_bracket,
    rescale_primitive,
    z0_from_data,
    covariant_accel,
    OneForm,
)
from .kernel import (
    RationalFunction,
    Tree,
    format_rational,
    format_value,
    to_rational,
    tree_mul,
    tree_neg,
    tree_rational,
    tree_sum,
)


class CaseLabel(enum.Enum):
    CASE_0A = "Case0a"
    CASE_0B = "Case0b"
    CASE_1A1 = "Case1a1"
    CASE_1A2 = "Case1a2"
    CASE_2A = "Case2a"
    CASE_2B = "Case2b"
    CASE_2C = "Case2c"

    @property
    def is_case0(self) -> bool:
        return self in (CaseLabel.CASE_0A, CaseLabel.CASE_0B)

    @property
    def is_case1(self) -> bool:
        return self in (CaseLabel.CASE_1A1, CaseLabel.CASE_1A2)

    @property
    def is_case2(self) -> bool:
        return self in (CaseLabel.CASE_2A, CaseLabel.CASE_2B, CaseLabel.CASE_2C)


class ClassifierError(GeometryError):
    pass


class CaseMismatchError(ClassifierError):
    pass


class IntegrabilityTheoremError(ClassifierError):
    """span{X, Z1} integrable but X(A) + b A != 0.  The theory proves this
    cannot happen; raising it means the implementation is wrong."""


_SLOTS = ("E", "XE", "X2E", "Z1E", "Z1XE")


@dataclass(frozen=True)
class EnergyOperator:
    """Linear differential operator acting on energy candidates E(phi,psi),
    stored as coefficients of E, X(E), X^2(E), Z1(E), Z1(X(E))."""

    coefficients: dict

    def __post_init__(self):
        unknown = set(self.coefficients) - set(_SLOTS)
        if unknown:
            raise ClassifierError(f"unknown derivative slots {unknown}")

    def apply(self, session: GeometrySession, energy: "Tree | RationalFunction"):
        """Apply to an energy expression in the formal PHI, PSI arguments;
        derivatives expand through the composition with (phi, psi)."""
        e = session.compose_energy(energy)
        X, Z1 = session.X, session.z1
        cache: dict = {"E": e}

        def slot(name: str):
            if name not in cache:
                if name == "XE":
                    cache[name] = X.apply(slot("E"))
                elif name == "X2E":
                    cache[name] = X.apply(slot("XE"))
                elif name == "Z1E":
                    cache[name] = Z1.apply(slot("E"))
                elif name == "Z1XE":
                    cache[name] = Z1.apply(slot("XE"))
            return cache[name]

        rational = isinstance(e, RationalFunction)
        total = None
        for name in _SLOTS:
            coeff = self.coefficients.get(name)
            if coeff is None or coeff.is_zero:
                continue
            value = slot(name)
            if rational:
                part = coeff * value
                total = part if total is None else total + part
            else:
                part = tree_mul(tree_rational(coeff), value)
                total = part if total is None else tree_sum(total, part)
        if total is None:
            ctx = session.ctx
            total = RationalFunction.constant(ctx, 0)
        return total

    def to_dict(self) -> dict:
        return {k: format_rational(v) for k, v in self.coefficients.items()}


@dataclass
class ClassificationReport:
    label: CaseLabel
    session: GeometrySession
    straight_line: bool
    swapped: bool
    notes: list = field(default_factory=list)
    # frame data, populated exactly on the branches that define them
    a: Optional[RationalFunction] = None
    b: Optional[RationalFunction] = None
    c: Optional[RationalFunction] = None
    l: Optional[RationalFunction] = None
    m: Optional[RationalFunction] = None
    n: Optional[RationalFunction] = None
    p: Optional[RationalFunction] = None
    q: Optional[RationalFunction] = None
    r: Optional[RationalFunction] = None
    B: Optional[RationalFunction] = None
    C: Optional[RationalFunction] = None
    F1: Optional[RationalFunction] = None
    F2: Optional[RationalFunction] = None
    G1: Optional[EnergyOperator] = None
    G2: Optional[EnergyOperator] = None
    span_basis: Optional[tuple] = None  # Case 0: rescaled (Z1, Z2)

    @property
    def z0(self) -> VectorField:
        return self.session.z0

    @property
    def delta_z(self) -> VectorField:
        return self.session.delta_z

    @property
    def z1(self) -> VectorField:
        return self.session.z1

    @property
    def z2(self) -> VectorField:
        return self.session.z2

    @property
    def X(self) -> VectorField:
        return self.session.X

    @property
    def A(self) -> RationalFunction:
        return self.session.A

    def to_dict(self) -> dict:
        out = {
            "label": self.label.value,
            "swapped": self.swapped,
            "straight_line": self.straight_line,
            "notes": list(self.notes),
            "objects": {
                "Z0": [format_rational(c) for c in self.session.z0],
                "deltaZ": [format_rational(c) for c in self.session.delta_z],
                "Z1": [format_rational(c) for c in self.session.z1],
                "Z2": [format_rational(c) for c in self.session.z2],
            },
        }
        if not self.label.is_case0:
            out["objects"]["X"] = [format_rational(c) for c in self.session.X]
            out["objects"]["A"] = format_rational(self.session.A)
        for name in ("a", "b", "c", "l", "m", "n", "p", "q", "r", "B", "C", "F1", "F2"):
            v = getattr(self, name)
            if v is not None:
                out.setdefault("frame", {})[name] = format_rational(v)
        if self.G1 is not None:
            out["G1"] = self.G1.to_dict()
        if self.G2 is not None:
            out["G2"] = self.G2.to_dict()
        if self.span_basis is not None:
            out["span_basis"] = [[format_rational(c) for c in v] for v in self.span_basis]
        return out


def is_straight_line_family(phi: RationalFunction, psi: RationalFunction) -> bool:
    """True iff the acceleration field is proportional to the tangent field
    (all 2x2 minors vanish), i.e. the data curves are straight lines.  This
    depends on the data only, not on any metric."""
    z0, _ = rescale_primitive(z0_from_data(phi, psi))
    dz = covariant_accel(z0)
    return cross(OneForm(dz.components), OneForm(z0.components)).is_zero


def classify(phi: RationalFunction, psi: RationalFunction, g: Metric) -> ClassificationReport:
    session = GeometrySession(phi, psi, g)
    return classify_session(session)


def classify_session(session: GeometrySession) -> ClassificationReport:
    notes = [f"z0 scale: {format_rational(session.z0_scale)}"]
    if session.swapped:
        notes.append("phi and psi swapped: original delta_z(phi) was identically zero")
    straight = session.straight_line
    if session.case0 != straight:  # pragma: no cover - equivalent by construction
        raise ClassifierError("straight-line and case-0 tests disagree (internal error)")

    if session.case0:
        integrable = session.complement_integrable()
        label = CaseLabel.CASE_0A if integrable else CaseLabel.CASE_0B
        z1p, s1 = rescale_primitive(session.z1)
        z2p, s2 = rescale_primitive(session.z2)
        notes.append(f"span basis scales: {format_rational(s1)}, {format_rational(s2)}")
        return ClassificationReport(
            label=label,
            session=session,
            straight_line=True,
            swapped=session.swapped,
            notes=notes,
            span_basis=(z1p, z2p),
        )

    notes.append(f"X scale: {format_rational(session.x_scale)}")
    X, Z1, Z0 = session.X, session.z1, session.z0
    basis = (X, Z1, Z0)
    dec = frame_decompose(lie_bracket(X, Z1), basis)
    a, b, c = dec["X"], dec["Z1"], dec["Z0"]
    A = session.A

    if c.is_zero:
        integrable = session.complement_integrable()
        if not integrable:  # pragma: no cover - same determinant, must agree
            raise ClassifierError("c == 0 but complement not integrable (internal error)")
        theorem = X.apply(A) + b * A
        if not theorem.is_zero:
            raise IntegrabilityTheoremError(
                "span{X, Z1} is integrable but X(A) + b*A != 0; "
                "this contradicts the no-Case-1b theorem and signals a bug: "
                f"residual = {format_rational(theorem)}"
            )
        sub_integrable = integrability_test(X, Z0)
        label = CaseLabel.CASE_1A1 if sub_integrable else CaseLabel.CASE_1A2
        return ClassificationReport(
            label=label,
            session=session,
            straight_line=False,
            swapped=session.swapped,
            notes=notes,
            a=a,
            b=b,
            c=c,
        )

    dec_xz0 = frame_decompose(lie_bracket(X, Z0), basis)
    dec_z1z0 = frame_decompose(lie_bracket(Z1, Z0), basis)
    l, m, n = dec_xz0["X"], dec_xz0["Z1"], dec_xz0["Z0"]
    p, q, r = dec_z1z0["X"], dec_z1z0["Z1"], dec_z1z0["Z0"]
    B = (X.apply(A) + b * A) / A
    C = c * A
    XC = X.apply(C)
    XB = X.apply(B)
    F1 = -(B / C) * (XC + n * C) + (C / A) * m + XB
    F2 = q * C - (C / A) * Z0.apply(A) - B * (r * A + (A / C) * Z1.apply(C)) + A * Z1.apply(B)
    one = RationalFunction.constant(session.ctx, 1)
    G1 = EnergyOperator(
        {
            "E": F1,
            "XE": B + (XC + n * C) / C,
            "X2E": -one,
        }
    )
    G2 = EnergyOperator(
        {
            "E": F2,
            "XE": r * A + one + (A / C) * Z1.apply(C),
            "Z1E": A * B,
            "Z1XE": -A,
        }
    )
    if F1.is_zero and F2.is_zero:
        label = CaseLabel.CASE_2A
    elif F1.is_zero or F2.is_zero:
        label = CaseLabel.CASE_2B
    else:
        label = CaseLabel.CASE_2C
    return ClassificationReport(
        label=label,
        session=session,
        straight_line=False,
        swapped=session.swapped,
        notes=notes,
        a=a,
        b=b,
        c=c,
        l=l,
        m=m,
        n=n,
        p=p,
        q=q,
        r=r,
        B=B,
        C=C,
        F1=F1,
        F2=F2,
        G1=G1,
        G2=G2,
    )


def case0_subcase(phi: RationalFunction, psi: RationalFunction, g: Metric) -> tuple[CaseLabel, tuple]:
    """Label (0a or 0b) plus the rescaled spanning fields of the orthogonal
    complement, for straight-line data."""
    report = classify(phi, psi, g)
    if not report.label.is_case0:
        raise CaseMismatchError(f"data are not straight lines (classified {report.label.value})")
    return report.label, report.span_basis


def energy_conditions(report: ClassificationReport, energy: "Tree | RationalFunction") -> list:
    """Residuals that must vanish identically for the energy candidate to be
    admissible in the reported case."""
    session = report.session
    label = report.label
    if label.is_case1:
        e = session.compose_energy(energy)
        x_of_e = session.X.apply(e)
        z0_of_e = session.z0.apply(e)  # identically zero by construction; kept as a sanity entry
        return [x_of_e, z0_of_e]
    if label is CaseLabel.CASE_2A:
        return [report.G1.apply(session, energy), report.G2.apply(session, energy)]
    if label is CaseLabel.CASE_2B:
        if report.F1.is_zero:
            return [report.G1.apply(session, energy)]
        return [report.G2.apply(session, energy)]
    if label is CaseLabel.CASE_2C:
        g1 = report.G1.apply(session, energy)
        g2 = report.G2.apply(session, energy)
        if isinstance(g1, RationalFunction) and isinstance(g2, RationalFunction):
            return [report.F2 * g1 - report.F1 * g2]
        t1 = tree_mul(tree_rational(report.F2), g1 if isinstance(g1, Tree) else tree_rational(g1))
        t2 = tree_mul(tree_rational(report.F1), g2 if isinstance(g2, Tree) else tree_rational(g2))
        return [tree_sum(t1, tree_neg(t2))]
    raise CaseMismatchError(f"no energy conditions are defined for {label.value}")


def candidate_V_from_energy(report: ClassificationReport, energy: "Tree | RationalFunction"):
    """Algebraic potential candidate V = G_i(E)/F_i from the linear relation
    with nonvanishing F_i.  The result is NOT certified; pass it to the
    verifier."""
    if report.label is CaseLabel.CASE_2A:
        raise CaseMismatchError("both F1 and F2 vanish (Case 2a): no algebraic candidate available")
    if not report.label.is_case2:
        raise CaseMismatchError(f"algebraic candidates require a Case 2 report, got {report.label.value}")
    if not report.F1.is_zero:
        F, G = report.F1, report.G1
    else:
        F, G = report.F2, report.G2
    value = G.apply(report.session, energy)
    if isinstance(value, RationalFunction):
        return value / F
    from .kernel import tree_div

    return tree_div(value, tree_rational(F))
