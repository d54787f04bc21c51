"""Jet modules J^W: sections O(U) (x) W with vector fields acting through the jets."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from avjets.algebra import linalg
from avjets.algebra.rings import FnElem, FnRing
from avjets.avmod.base import AVModule, av_axiom_check
from avjets.errors import MixedContext, UnknownName
from avjets.geometry import Transition, transition_jet
from avjets.jets import JetDerivation
from avjets.report import CheckReport
from avjets.repn import RepSpec, builtin_rep, rep_apply, rep_dual, rep_integrate, rep_tensor
from avjets.smash import VectorField, delta, random_poly_elem


class JetModuleElement:
    """sum_k coeffs[k] (x) e_k over a chart ring."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: FnRing, coeffs: Sequence):
        self.ring = ring
        self.coeffs = tuple(ring.coerce(c) for c in coeffs)

    @classmethod
    def basis(cls, ring: FnRing, dim: int, k: int, coeff=1) -> JetModuleElement:
        return cls(ring, [coeff if a == k else 0 for a in range(dim)])

    def _check(self, other) -> None:
        if not isinstance(other, JetModuleElement) or other.ring != self.ring or len(other.coeffs) != len(self.coeffs):
            raise MixedContext("sections of different jet modules")

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetModuleElement):
            return NotImplemented
        return self.ring == other.ring and len(self.coeffs) == len(other.coeffs) and \
            all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __add__(self, other) -> JetModuleElement:
        self._check(other)
        return JetModuleElement(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other) -> JetModuleElement:
        self._check(other)
        return JetModuleElement(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> JetModuleElement:
        return JetModuleElement(self.ring, [-a for a in self.coeffs])

    def scale(self, c) -> JetModuleElement:
        return JetModuleElement(self.ring, [a * c for a in self.coeffs])

    def __str__(self) -> str:
        parts = [f"({c})*e{k + 1}" for k, c in enumerate(self.coeffs) if c]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"JetModuleElement({self})"


def virtual_part(field: VectorField, order: int) -> JetDerivation:
    """sum_i delta(f_i) d/dX_i for field = sum_i f_i d/dx_i."""
    return JetDerivation([delta(f, order) for f in field.coeffs])


def jet_action(rep: RepSpec, field: VectorField, elt: JetModuleElement) -> JetModuleElement:
    """f d/dx_i (g (x) w) = f dg/dx_i (x) w + g rho(delta(f) d/dX_i) w, summed over i."""
    if field.ring != elt.ring:
        raise MixedContext("vector field and section live on different charts")
    if len(elt.coeffs) != rep.dim:
        raise MixedContext(f"section of rank {len(elt.coeffs)} for a representation of dimension {rep.dim}")
    ring = elt.ring
    order = max(rep.nilpotency_order, 1)
    mat = rep_apply(rep, virtual_part(field, order))
    base = [field.apply(c) for c in elt.coeffs]
    fiber = linalg.matvec(mat, elt.coeffs, ring)
    return JetModuleElement(ring, [a + b for a, b in zip(base, fiber)])


def jet_glue_matrix(rep: RepSpec, t: Transition, order: int | None = None):
    """rho(phi_G): e_a^x = sum_b M[b][a] e_b^y."""
    N = max(rep.nilpotency_order, 1) if order is None else order
    return rep_integrate(rep, transition_jet(t, N))


def transport(M, t: Transition, elt: JetModuleElement) -> JetModuleElement:
    """Rewrite a section given in the x-frame over the target overlap in the y-frame."""
    pulled = [t.pull(c) for c in elt.coeffs]
    return JetModuleElement(t.source_overlap, linalg.matvec(M, pulled, t.source_overlap))


def push_field(t: Transition, field: VectorField) -> VectorField:
    """sum_i f_i(x) d/dx_i in y-coordinates: sum_j (sum_i f_i(G) dH_j/dx_i(G)) d/dy_j."""
    dH = t.dH_at_G()
    pulled = [t.pull(f) for f in field.coeffs]
    ring = t.source_overlap
    coeffs = []
    for j in range(t.source.n):
        acc = ring.zero
        for i, f in enumerate(pulled):
            if f and dH[i][j]:
                acc = acc + f * dH[i][j]
        coeffs.append(acc)
    return VectorField(ring, coeffs)


class JetModule(AVModule):
    """J^W on one chart."""

    def __init__(self, rep: RepSpec, ring: FnRing, name: str | None = None):
        self.rep = rep
        self.ring = ring
        self.name = name or f"J^{rep.name or 'W'} on {ring}"

    def act_function(self, f, m: JetModuleElement) -> JetModuleElement:
        f = self.ring.coerce(f)
        return JetModuleElement(self.ring, [f * c for c in m.coeffs])

    def act_field(self, eta: VectorField, m: JetModuleElement) -> JetModuleElement:
        return jet_action(self.rep, eta, m)

    def random_element(self, rng: random.Random, cutoff: int = 4) -> JetModuleElement:
        return JetModuleElement(self.ring, [random_poly_elem(rng, self.ring, cutoff) for _ in range(self.rep.dim)])


def random_overlap_elem(rng: random.Random, ring: FnRing, degree: int = 4, span: int = 3) -> FnElem:
    """Random polynomial times a random product of the ring's denominators to a power <= 2."""
    f = random_poly_elem(rng, ring, degree, span)
    for k in range(len(ring.denominators)):
        e = rng.randint(0, 2)
        if e:
            f = f * ring.denominator_elem(k).inverse() ** e
    return f


def glue_equivariance_check(rep: RepSpec, t: Transition, samples: int = 20, seed: int = 0,
                            degree: int = 4, fields: Sequence[VectorField] = ()) -> CheckReport:
    """Transport then act in the y-chart equals act in the x-chart then transport."""
    report = CheckReport(f"glue_equivariance {rep.name}", seed=seed)
    rng = random.Random(seed)
    M = jet_glue_matrix(rep, t)
    xring = t.target_overlap
    with report.timed():
        probes = list(fields)
        while len(probes) < samples:
            probes.append(VectorField(xring, [random_overlap_elem(rng, xring, degree) for _ in range(xring.n)]))
        for k, eta in enumerate(probes):
            s = JetModuleElement(xring, [random_overlap_elem(rng, xring, degree) for _ in range(rep.dim)])
            lhs = jet_action(rep, push_field(t, eta), transport(M, t, s))
            rhs = transport(M, t, jet_action(rep, eta, s))
            report.checked += 1
            if lhs != rhs:
                report.fail(f"sample {k}: field={eta}, section={s}", str(rhs), str(lhs), str(lhs - rhs))
    return report


def glue_inverse_check(rep: RepSpec, t: Transition) -> CheckReport:
    """M(t) times M(t^-1), moved to the y-chart, is the identity."""
    report = CheckReport(f"glue inverse {rep.name}")
    M = jet_glue_matrix(rep, t)
    back = tuple(tuple(t.pull(c) for c in row) for row in jet_glue_matrix(rep, t.inverse()))
    ring = t.source_overlap
    ident = linalg.identity(rep.dim, ring)
    for label, prod in (("M(t) M(t^-1)", linalg.matmul(M, back, ring)),
                        ("M(t^-1) M(t)", linalg.matmul(back, M, ring))):
        report.checked += 1
        if not linalg.equal(prod, ident):
            report.fail(label, linalg.render(ident, ring), linalg.render(prod, ring))
    return report


def tensor_glue_check(r1: RepSpec, r2: RepSpec, t: Transition) -> CheckReport:
    """Glue matrix of a tensor product is the Kronecker product of the factors'."""
    report = CheckReport(f"tensor glue {r1.name} (x) {r2.name}")
    ring = t.source_overlap
    expected = linalg.kron(jet_glue_matrix(r1, t), jet_glue_matrix(r2, t))
    actual = jet_glue_matrix(rep_tensor(r1, r2), t)
    report.checked += 1
    if not linalg.equal(expected, actual):
        report.fail("M(r1 (x) r2)", linalg.render(expected, ring), linalg.render(actual, ring))
    return report


def dual_glue_check(rep: RepSpec, t: Transition) -> CheckReport:
    """Glue matrix of the dual is the inverse transpose."""
    report = CheckReport(f"dual glue {rep.name}")
    ring = t.source_overlap
    expected = linalg.transpose(linalg.inverse(jet_glue_matrix(rep, t), ring))
    actual = jet_glue_matrix(rep_dual(rep), t)
    report.checked += 1
    if not linalg.equal(expected, actual):
        report.fail("M(W*)", linalg.render(expected, ring), linalg.render(actual, ring))
    return report


# -- the two rank 2 families on the projective line ---------------------------

def family_rep(family: str, m: int) -> RepSpec:
    if family not in ("rho", "sigma"):
        raise UnknownName(f"unknown family {family!r}")
    return builtin_rep(family, m)


def family_glue_closed_form(family: str, m: int, ring: FnRing):
    """rho_m: y^(-2m) [[y^-2, -y^-1], [0, 1]];  sigma_m: y^(-2m) [[y^-4, 0], [0, 1]]."""
    y = ring.var(0)
    yi = y.inverse()
    scale = yi ** (2 * m) if m >= 0 else y ** (-2 * m)
    if family == "rho":
        return ((scale * yi ** 2, -scale * yi), (ring.zero, scale))
    return ((scale * yi ** 4, ring.zero), (ring.zero, scale))


def family_action_closed_form(family: str, m: int, f, elt: JetModuleElement) -> JetModuleElement:
    """f d/dx . (g1 e1 + g2 e2) for the rank 2 families, written out by hand.

    rho_m:   e1: f g1' + (m+1) f' g1 + (1/2) f'' g2,   e2: f g2' + m f' g2
    sigma_m: e1: f g1' + (m+2) f' g1 + (1/6) f''' g2,  e2: f g2' + m f' g2
    """
    ring = elt.ring
    f = ring.coerce(f)
    g1, g2 = elt.coeffs
    df = f.derive(0)
    if family == "rho":
        top = f * g1.derive(0) + df * g1 * (m + 1) + df.derive(0) * g2 * Fraction(1, 2)
    else:
        top = f * g1.derive(0) + df * g1 * (m + 2) + df.derive(0).derive(0) * g2 * Fraction(1, 6)
    return JetModuleElement(ring, [top, f * g2.derive(0) + df * g2 * m])


def p1_family_check(family: str, m: int, t: Transition, samples: int = 100, seed: int = 0,
                    degree: int = 4) -> CheckReport:
    """Glue matrix and section law, hand-written action formulas, AV axioms in both charts."""
    rep = family_rep(family, m)
    report = CheckReport(f"P1 {family}({m})", seed=seed)
    with report.timed():
        ring = t.source_overlap
        M = jet_glue_matrix(rep, t)
        expected = family_glue_closed_form(family, m, ring)
        report.checked += 1
        if not linalg.equal(M, expected):
            report.fail("glue matrix rho(phi_G)", linalg.render(expected, ring), linalg.render(M, ring))
        report.info["glue"] = linalg.render(M, ring)
        report.info["sections"] = section_law(M, ring)
        report.merge(glue_inverse_check(rep, t))

        rng = random.Random(seed)
        for chart_ring in (t.target.ring, t.source.ring):
            for k in range(samples):
                f = random_poly_elem(rng, chart_ring, degree)
                s = JetModuleElement(chart_ring, [random_poly_elem(rng, chart_ring, degree) for _ in range(2)])
                field = VectorField.partial(chart_ring, 0, f)
                report.expect_equal(f"displayed action in {chart_ring} sample {k}: f={f}, section={s}",
                                    family_action_closed_form(family, m, f, s), jet_action(rep, field, s))
            report.merge(av_axiom_check(JetModule(rep, chart_ring), samples, seed, degree))
        report.merge(glue_equivariance_check(rep, t, samples=max(1, samples // 5), seed=seed, degree=degree))
    return report


def section_law(M, ring: FnRing) -> list[str]:
    """e_a^x = sum_b M[b][a] e_b^y, rendered one line per basis vector."""
    lines = []
    for a in range(len(M)):
        terms = [(M[b][a], b) for b in range(len(M)) if M[b][a]]
        rhs = " + ".join(f"({ring.render(c)})*e{b + 1}^y" for c, b in terms) or "0"
        lines.append(f"e{a + 1}^x = {rhs}")
    return lines
