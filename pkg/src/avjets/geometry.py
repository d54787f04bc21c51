"""Charts, rational transitions and the transformation laws they induce.

A transition goes from a source chart with coordinates y to a target chart
with coordinates x and is given by x = G(y), y = H(x).  G lives in the
source overlap ring (y-functions with the overlap denominators inverted) and
H in the target overlap ring.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from avjets.algebra import linalg
from avjets.algebra.rings import QQ, FnElem, FnRing, Poly, as_fraction
from avjets.algebra.series import TruncSeries, taylor_shift
from avjets.errors import (
    DenominatorVanishes,
    MixedContext,
    NonzeroConstantTerm,
    NotInLplus,
)
from avjets.jets import (
    JetAutomorphism,
    JetDerivation,
    aut_compose,
    aut_conjugate_derivation,
    lie_bracket,
    random_derivation,
)
from avjets.report import CheckReport
from avjets.smash import JetVF, VectorField, delta, jet_bracket


@dataclass(frozen=True)
class Chart:
    name: str
    coords: tuple
    denominators: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "denominators", tuple(self.denominators))
        for d in self.denominators:
            if not isinstance(d, Poly) or d.nvars != len(self.coords):
                raise MixedContext(f"denominator {d!r} is not a polynomial in {self.coords}")
            if d.is_zero():
                raise ValueError(f"chart {self.name}: zero denominator")

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def ring(self) -> FnRing:
        return FnRing(self.coords, self.denominators)


@dataclass(frozen=True)
class Point:
    chart: Chart
    coordinates: tuple

    def __post_init__(self):
        coords = tuple(as_fraction(c) for c in self.coordinates)
        object.__setattr__(self, "coordinates", coords)
        if len(coords) != self.chart.n:
            raise MixedContext(f"point with {len(coords)} coordinates on an {self.chart.n}-dimensional chart")
        for d in self.chart.denominators:
            if d.evaluate(coords) == 0:
                raise DenominatorVanishes(f"{d.to_str(self.chart.coords)} vanishes at {coords}")

    @property
    def ring(self) -> FnRing:
        return self.chart.ring


@dataclass(frozen=True)
class Transition:
    """x = G(y) from the source chart (y) to the target chart (x), with inverse y = H(x)."""

    source: Chart
    target: Chart
    G: tuple
    H: tuple
    source_overlap: FnRing
    target_overlap: FnRing
    name: str = field(default="")

    def __post_init__(self):
        G = tuple(self.source_overlap.coerce(g) for g in self.G)
        H = tuple(self.target_overlap.coerce(h) for h in self.H)
        if len(G) != self.target.n or len(H) != self.source.n:
            raise MixedContext("G and H must give every coordinate of the other chart")
        if self.source_overlap.names != self.source.coords or self.target_overlap.names != self.target.coords:
            raise MixedContext("overlap rings must use the chart coordinates")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "H", H)

    @property
    def n(self) -> int:
        return self.source.n

    def inverse(self) -> Transition:
        return Transition(self.target, self.source, self.H, self.G, self.target_overlap,
                          self.source_overlap, f"{self.name}^-1" if self.name else "")

    def pull(self, f) -> FnElem:
        """f(G(y)) for a function f of x in the target overlap ring."""
        return self.target_overlap.coerce(f).substitute(self.source_overlap, self.G)

    def jacobian_G(self):
        """d G_l / d y_j as a matrix [l][j]."""
        return tuple(tuple(g.derive(j) for j in range(self.source.n)) for g in self.G)

    def dH_at_G(self):
        """d H_j / d x_i evaluated at G(y), as a matrix [i][j]."""
        return tuple(tuple(self.pull(h.derive(i)) for h in self.H) for i in range(self.target.n))


def make_transition(source: Chart, target: Chart, G: Sequence, H: Sequence,
                    source_dens: Sequence[Poly] = (), target_dens: Sequence[Poly] = (),
                    name: str = "") -> Transition:
    src = source.ring.with_denominators(source_dens)
    tgt = target.ring.with_denominators(target_dens)
    return Transition(source, target, tuple(G), tuple(H), src, tgt, name)


def transition_validate(t: Transition) -> CheckReport:
    report = CheckReport(f"transition_validate {t.name}".strip())
    ys = t.source_overlap.gens()
    xs = t.target_overlap.gens()
    if t.source.n != t.target.n:
        report.fail("dimensions", str(t.source.n), str(t.target.n), "")
        return report
    # the overlap must be nondegenerate: each side's denominators pull back to units
    for d in t.target_overlap.denominators:
        try:
            t.pull(t.target_overlap.from_poly(d)).inverse()
        except Exception:
            report.fail(f"denominator {d.to_str(t.target.coords)} pulled back by G",
                        "a unit of the source overlap", "not a unit", "")
    for d in t.source_overlap.denominators:
        try:
            t.source_overlap.from_poly(d).substitute(t.target_overlap, t.H).inverse()
        except Exception:
            report.fail(f"denominator {d.to_str(t.source.coords)} pulled back by H",
                        "a unit of the target overlap", "not a unit", "")
    if not report.passed:
        return report
    for j, h in enumerate(t.H):
        back = t.pull(h)
        report.expect_equal(f"H_{j + 1}(G(y))", ys[j], back)
    for l, g in enumerate(t.G):
        back = g.substitute(t.target_overlap, t.H)
        report.expect_equal(f"G_{l + 1}(H(x))", xs[l], back)
    product = linalg.matmul(t.dH_at_G(), t.jacobian_G(), t.source_overlap)
    ident = linalg.identity(t.n, t.source_overlap)
    for i in range(t.n):
        for l in range(t.n):
            report.expect_equal(f"sum_j dH_j/dx_{i + 1}(G) dG_{l + 1}/dy_j", ident[i][l], product[l][i])
    return report


def transition_jet(t: Transition, order: int) -> JetAutomorphism:
    """phi_G: X_i -> G_i(y + Y) - G_i(y)."""
    images = [delta(g, order) for g in t.G]
    return JetAutomorphism(images)


def pull_series(t: Transition, s: TruncSeries) -> TruncSeries:
    """Move the coefficients of a series from x-functions to y-functions via x = G(y)."""
    ring = s.ring
    if isinstance(ring, FnRing):
        return s.map_coeffs(t.pull, t.source_overlap)
    return s.map_coeffs(t.source_overlap.coerce, t.source_overlap)


def pull_derivation(t: Transition, d: JetDerivation) -> JetDerivation:
    return JetDerivation([pull_series(t, c) for c in d.components])


def pull_automorphism(t: Transition, F: JetAutomorphism) -> JetAutomorphism:
    return JetAutomorphism([pull_series(t, c) for c in F.images])


def transform_derivation(t: Transition, d: JetDerivation, order: int | None = None) -> JetDerivation:
    """sum_p g_p(G(y+Y) - G(y)) dH_q/dx_p(G(y+Y)) d/dY_q, coefficients pulled back by G."""
    if not d.is_in_lplus():
        raise NotInLplus("transform_derivation needs an element of L_+")
    N = d.order if order is None else order
    if N != d.order:
        d = d.truncate(N) if N < d.order else JetDerivation([c.extend(N) for c in d.components])
    phi_G = transition_jet(t, N)
    pulled = pull_derivation(t, d)
    dH = t.dH_at_G()
    n = t.n
    out = [TruncSeries.zero(t.source_overlap, n, N) for _ in range(n)]
    for p, gp in enumerate(pulled.components):
        if not gp:
            continue
        moved = gp.compose(phi_G.images)
        for q in range(n):
            if dH[p][q]:
                out[q] = out[q] + moved * taylor_shift(dH[p][q], N)
    return JetDerivation(out)


def transform_partial(t: Transition, i: int, order: int) -> JetVF:
    """d/dx_i -> sum_j dH_j/dx_i(G(y)) d/dy_j + delta(dH_j/dx_i o G) d/dY_j."""
    row = t.dH_at_G()[i]
    anchor = VectorField(t.source_overlap, row)
    virtual = JetDerivation([delta(c, order) for c in row])
    return JetVF(anchor, virtual)


def charged_compat_check(t: Transition, g: TruncSeries, j: int, order: int) -> CheckReport:
    """[transform_partial(i), transform_derivation(g d/dX_j)] == 0 for every i."""
    report = CheckReport(f"charged_compat j={j}")
    if g.constant_term():
        raise NonzeroConstantTerm("g must lie in the maximal ideal")
    n = t.n
    g = g.extend(order) if g.order < order else g.truncate(order)
    comps = [g if k == j else TruncSeries.zero(g.ring, n, order) for k in range(n)]
    transformed = transform_derivation(t, JetDerivation(comps), order)
    virtual = JetVF(VectorField.zero(t.source_overlap), transformed)
    for i in range(n):
        comm = jet_bracket(transform_partial(t, i, order), virtual)
        report.checked += 1
        if comm:
            report.fail(f"i={i} g={g} j={j} N={order}", "0", str(comm), str(comm))
    return report


def _pulled_back_overlap(ring: FnRing, dens: Sequence[Poly], names: Sequence[str], values) -> FnRing:
    """``ring`` with the denominators of the middle chart, pulled back through ``values``, inverted too."""
    middle = FnRing(tuple(names))
    extra = []
    for d in dens:
        num = middle.from_poly(d).substitute(ring, values).num
        for known in ring.denominators:
            while (q := num.exact_div(known)) is not None:
                num = q
        if not num.is_constant():
            extra.append(num)
    return ring.with_denominators(extra)


def _triple_overlap(outer: Transition, inner: Transition) -> FnRing:
    if outer.source.coords != inner.target.coords:
        raise MixedContext("transitions do not chain")
    return _pulled_back_overlap(inner.source_overlap, outer.source_overlap.denominators,
                                inner.target.coords, inner.G)


def jet_cocycle(outer: Transition, inner: Transition, order: int) -> JetAutomorphism:
    """(phi_G1 with coefficients pulled back by G2) o phi_G2 for a -> b -> c.

    Computed over the a-chart functions regular on all three charts.
    """
    ring = _triple_overlap(outer, inner)
    values = [ring.coerce(v) for v in inner.G]
    first = [F.map_coeffs(lambda c: c.substitute(ring, values), ring) for F in transition_jet(outer, order).images]
    second = [F.map_coeffs(ring.coerce, ring) for F in transition_jet(inner, order).images]
    return aut_compose(JetAutomorphism(first, check=False), JetAutomorphism(second, check=False))


def compose_transitions(outer: Transition, inner: Transition, name: str = "") -> Transition:
    """a -> b -> c as one transition a -> c, on the overlap of all three charts."""
    src = _triple_overlap(outer, inner)
    tgt = _pulled_back_overlap(outer.target_overlap, inner.target_overlap.denominators,
                               outer.source.coords, outer.H)
    G = tuple(g.substitute(src, [src.coerce(v) for v in inner.G]) for g in outer.G)
    H = tuple(h.substitute(tgt, [tgt.coerce(v) for v in outer.H]) for h in inner.H)
    return Transition(inner.source, outer.target, G, H, src, tgt, name)


def triple_cocycle_check(t_ab: Transition, t_bc: Transition, t_ac: Transition, order: int) -> CheckReport:
    """phi along a -> b -> c equals phi along a -> c."""
    report = CheckReport("triple cocycle")
    lhs = jet_cocycle(t_bc, t_ab, order)
    ring = lhs.ring
    rhs = JetAutomorphism([F.map_coeffs(ring.coerce, ring) for F in transition_jet(t_ac, order).images], check=False)
    for i, (a, b) in enumerate(zip(lhs.images, rhs.images)):
        report.expect_equal(f"component {i}", b, a)
    return report


@dataclass
class Atlas:
    charts: dict
    transitions: list
    name: str = ""

    def chart(self, name: str) -> Chart:
        return self.charts[name]

    def transition(self, source: str, target: str) -> Transition:
        for t in self.transitions:
            if t.source.name == source and t.target.name == target:
                return t
            if t.source.name == target and t.target.name == source:
                return t.inverse()
        raise KeyError(f"no transition {source} -> {target}")


def p1_atlas() -> Atlas:
    """The projective line: x = -1/y on the overlap of the two affine charts."""
    U0 = Chart("U0", ("x",))
    U1 = Chart("U1", ("y",))
    x = Poly.var(1, 0)
    ring_y = FnRing(("y",), [x])
    ring_x = FnRing(("x",), [x])
    t = Transition(U1, U0, (-ring_y.var(0).inverse(),), (-ring_x.var(0).inverse(),), ring_y, ring_x, "p1")
    return Atlas({"U0": U0, "U1": U1}, [t], "P1")


def p1_transition() -> Transition:
    return p1_atlas().transitions[0]


def mobius_transition(a, b, c, d) -> Transition:
    """x = (a y + b)/(c y + d) with ad - bc != 0, on the overlap where both sides are finite."""
    a, b, c, d = (Fraction(v) for v in (a, b, c, d))
    det = a * d - b * c
    if not det:
        raise ValueError("degenerate Mobius map")
    y = Poly.var(1, 0)
    xv = Poly.var(1, 0)
    one = Poly.const(1, 1)
    den_y = y.scale(c) + one.scale(d)
    den_x = xv.scale(-c) + one.scale(a)  # y = (d x - b)/(-c x + a)
    ring_y = FnRing(("y",), [den_y] if c else [])
    ring_x = FnRing(("x",), [den_x] if c else [])
    G = ring_y.from_poly(y.scale(a) + one.scale(b)) * ring_y.from_poly(den_y).inverse()
    H = ring_x.from_poly(xv.scale(d) - one.scale(b)) * ring_x.from_poly(den_x).inverse()
    return Transition(Chart("V", ("y",)), Chart("U", ("x",)), (G,), (H,), ring_y, ring_x, "mobius")


def transition_check(t: Transition, order: int, samples: int = 20, seed: int = 0) -> CheckReport:
    """Cocycle, transform = Ad(phi_G), brackets, anchor pushforward, charged compatibility."""
    report = CheckReport(f"geometry {t.name or 'transition'} N={order}", seed=seed)
    rng = random.Random(seed)
    n = t.n
    with report.timed():
        report.merge(transition_validate(t))
        for N in range(1, order + 1):
            cocycle = jet_cocycle(t.inverse(), t, N)
            ident = JetAutomorphism.identity(t.source_overlap, n, N)
            for i, (a, b) in enumerate(zip(cocycle.images, ident.images)):
                report.expect_equal(f"phi(t^-1) o phi(t) component {i} at N={N}", b, a)

        phi_G = transition_jet(t, order)
        for k in range(samples):
            d1 = random_derivation(rng, QQ, n, order)
            d2 = random_derivation(rng, QQ, n, order)
            T1, T2 = transform_derivation(t, d1), transform_derivation(t, d2)
            report.expect_equal(f"transform = Ad(phi_G) sample {k}: d={d1}",
                                aut_conjugate_derivation(phi_G, pull_derivation(t, d1)), T1)
            report.expect_equal(f"transform preserves brackets sample {k}: d1={d1}, d2={d2}",
                                lie_bracket(T1, T2), transform_derivation(t, lie_bracket(d1, d2)))

        # d/dx_i = sum_j (J_G^-1)_{j i} d/dy_j, computed independently of H
        Jinv = linalg.inverse(t.jacobian_G(), t.source_overlap)
        for i in range(n):
            expected = VectorField(t.source_overlap, [Jinv[j][i] for j in range(n)])
            report.expect_equal(f"anchor of transformed d/dx_{i + 1}", expected,
                                transform_partial(t, i, order).anchor)

        for j in range(n):
            for k in range(1, order):
                exps = tuple(k if a == j else 0 for a in range(n))
                g = TruncSeries.monomial(QQ, n, order, exps)
                report.merge(charged_compat_check(t, g, j, order))
    return report


def p1_laws_check(order: int = 6) -> CheckReport:
    """Transformation laws on the projective line, y = -1/x, read in the y-chart.

    X d/dX   -> Y d/dY + y^-1 Y^2 d/dY
    X^2 d/dX -> y^-2 Y^2 d/dY
    X^3 d/dX -> y^-4 Y^3 d/dY + (degree >= 4)
    d/dx     -> y^2 d/dy + 2y Y d/dY + Y^2 d/dY
    """
    order = max(order, 3)
    t = p1_transition()
    ring = t.source_overlap
    y = ring.var(0)
    yi = y.inverse()
    report = CheckReport(f"P1 transformation laws N={order}")

    def image(k):
        return transform_derivation(t, JetDerivation.from_terms(QQ, 1, order, {((k,), 0): 1}))

    def series(terms):
        return JetDerivation.from_terms(ring, 1, order, {((e,), 0): c for e, c in terms.items()})

    report.expect_equal("X d/dX", series({1: 1, 2: yi}), image(1))
    report.expect_equal("X^2 d/dX", series({2: yi ** 2}), image(2))
    report.expect_equal("X^3 d/dX up to degree 3", series({3: yi ** 4}).truncate(3), image(3).truncate(3))
    expected = JetVF(VectorField(ring, [y ** 2]), series({1: y * 2, 2: 1}))
    report.expect_equal("d/dx", expected, transform_partial(t, 0, order))
    return report
