"""Vector fields on a chart, the Lie algebra A#V, and jets of vector fields.

``A#V`` is stored through the identification A (x) V = (A (x) A)^n: the pair
``f # g d/dx_i`` becomes ``f(x) g(x')`` in component i of an n-tuple over the
doubled ring in the variables x and x'.  A general element is then a finite
sum of such pairs automatically, with equal terms merged.

Jets of vector fields are stored in the coordinates given by ``phi``:
an anchor vector field plus a virtual part in A (x) L_+, with bracket

    [(eta, u), (mu, v)] = ([eta, mu], eta.v - mu.u + [u, v])

where ``eta.v`` differentiates the coefficient functions of v.
"""
from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from avjets.algebra.rings import FnElem, FnRing, Poly
from avjets.algebra.series import TruncSeries, mi_factorial, monomials, taylor_shift
from avjets.errors import MixedContext
from avjets.jets import JetDerivation, lie_bracket
from avjets.report import CheckReport


class VectorField:
    """sum_i coeffs[i] d/dx_i over a chart ring."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: FnRing, coeffs: Sequence):
        coeffs = tuple(ring.coerce(c) for c in coeffs)
        if len(coeffs) != ring.n:
            raise MixedContext(f"{len(coeffs)} coefficients for {ring.n} coordinates")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def partial(cls, ring: FnRing, i: int, coeff=1) -> VectorField:
        return cls(ring, [coeff if k == i else 0 for k in range(ring.n)])

    @classmethod
    def zero(cls, ring: FnRing) -> VectorField:
        return cls(ring, [0] * ring.n)

    @property
    def n(self) -> int:
        return self.ring.n

    def _check(self, other: VectorField) -> None:
        if not isinstance(other, VectorField) or other.ring != self.ring:
            raise MixedContext("vector fields on different charts")

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.ring == other.ring and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    __hash__ = None

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __add__(self, other: VectorField) -> VectorField:
        self._check(other)
        return VectorField(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: VectorField) -> VectorField:
        self._check(other)
        return VectorField(self.ring, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> VectorField:
        return VectorField(self.ring, [-a for a in self.coeffs])

    def scale(self, f) -> VectorField:
        f = self.ring.coerce(f)
        return VectorField(self.ring, [f * a for a in self.coeffs])

    def apply(self, f: FnElem) -> FnElem:
        f = self.ring.coerce(f)
        total = self.ring.zero
        for i, c in enumerate(self.coeffs):
            if c:
                total = total + c * f.derive(i)
        return total

    __call__ = apply

    def bracket(self, other: VectorField) -> VectorField:
        self._check(other)
        return VectorField(self.ring, [self.apply(b) - other.apply(a)
                                       for a, b in zip(self.coeffs, other.coeffs)])

    def __str__(self) -> str:
        parts = [f"({c})*d/d{name}" for c, name in zip(self.coeffs, self.ring.names) if c]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"VectorField({self})"


def vf_bracket(a: VectorField, b: VectorField) -> VectorField:
    return a.bracket(b)


# -- the doubled ring A (x) A ------------------------------------------------

def _shift_poly(p: Poly, offset: int, total: int) -> Poly:
    terms = {}
    for e, c in p.terms.items():
        full = [0] * total
        full[offset:offset + len(e)] = e
        terms[tuple(full)] = c
    return Poly(total, terms)


@lru_cache(maxsize=None)
def doubled_ring(A: FnRing) -> FnRing:
    """Q[x, x'] localized at d(x) and d(x') for every denominator d of A."""
    n = A.n
    names = A.names + tuple(f"{v}'" for v in A.names)
    dens = [_shift_poly(d, 0, 2 * n) for d in A.denominators]
    dens += [_shift_poly(d, n, 2 * n) for d in A.denominators]
    return FnRing(names, dens)


def left(f, A: FnRing) -> FnElem:
    """f(x) in the doubled ring."""
    return A.coerce(f).rename(doubled_ring(A), range(A.n))


def right(f, A: FnRing) -> FnElem:
    """f(x') in the doubled ring."""
    return A.coerce(f).rename(doubled_ring(A), range(A.n, 2 * A.n))


def collapse(P: FnElem, A: FnRing) -> FnElem:
    """P(x, x): the multiplication map A (x) A -> A."""
    return P.rename(A, tuple(range(A.n)) * 2)


def expand_right(P: FnElem, A: FnRing, order: int) -> TruncSeries:
    """P(x, x + X) as a series over A."""
    n = A.n
    derivs = {(0,) * n: P}
    out = {}
    for s in monomials(n, order):
        if s not in derivs:
            j = max(i for i, k in enumerate(s) if k)
            prev = list(s)
            prev[j] -= 1
            derivs[s] = derivs[tuple(prev)].derive(n + j)
        d = derivs[s]
        if d:
            c = collapse(d, A)
            if c:
                out[s] = c * Fraction(1, mi_factorial(s))
    return TruncSeries(A, n, order, out)


class SmashTerm:
    """An element of A#V as n components over the doubled ring."""

    __slots__ = ("base", "components")

    def __init__(self, base: FnRing, components: Sequence):
        AA = doubled_ring(base)
        comps = tuple(AA.coerce(c) for c in components)
        if len(comps) != base.n:
            raise MixedContext(f"{len(comps)} components for {base.n} coordinates")
        self.base = base
        self.components = comps

    @classmethod
    def pair(cls, f, eta: VectorField) -> SmashTerm:
        """f # eta."""
        A = eta.ring
        lf = left(f, A)
        return cls(A, [lf * right(c, A) for c in eta.coeffs])

    @classmethod
    def from_pairs(cls, A: FnRing, pairs) -> SmashTerm:
        total = cls.zero(A)
        for f, eta in pairs:
            total = total + cls.pair(f, eta)
        return total

    @classmethod
    def zero(cls, A: FnRing) -> SmashTerm:
        return cls(A, [0] * A.n)

    @property
    def ring(self) -> FnRing:
        return doubled_ring(self.base)

    def _check(self, other: SmashTerm) -> None:
        if not isinstance(other, SmashTerm) or other.base != self.base:
            raise MixedContext("smash elements over different charts")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SmashTerm):
            return NotImplemented
        return self.base == other.base and all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def __bool__(self) -> bool:
        return any(self.components)

    def __add__(self, other: SmashTerm) -> SmashTerm:
        self._check(other)
        return SmashTerm(self.base, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: SmashTerm) -> SmashTerm:
        self._check(other)
        return SmashTerm(self.base, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> SmashTerm:
        return SmashTerm(self.base, [-a for a in self.components])

    def scale(self, c) -> SmashTerm:
        return SmashTerm(self.base, [a * c for a in self.components])

    def left_multiply(self, f) -> SmashTerm:
        """g # eta -> f g # eta."""
        lf = left(f, self.base)
        return SmashTerm(self.base, [lf * a for a in self.components])

    def __str__(self) -> str:
        A = self.base
        parts = [f"[{c}]*d/d{name}" for c, name in zip(self.components, A.names) if c]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"SmashTerm({self})"


def smash_bracket(u: SmashTerm, v: SmashTerm) -> SmashTerm:
    """[f#eta, g#mu] = f eta(g) # mu - g mu(f) # eta + fg # [eta, mu], bilinearly."""
    u._check(v)
    A = u.base
    n = A.n
    AA = u.ring
    diagonal = tuple(range(n)) * 2

    def diag(P):
        return P.rename(AA, diagonal)

    Pd = [diag(p) for p in u.components]
    Qd = [diag(q) for q in v.components]
    out = []
    for k in range(n):
        acc = AA.zero
        for i in range(n):
            if Pd[i]:
                acc = acc + Pd[i] * v.components[k].derive(i)
            if u.components[i]:
                acc = acc + u.components[i] * v.components[k].derive(n + i)
            if Qd[i]:
                acc = acc - Qd[i] * u.components[k].derive(i)
            if v.components[i]:
                acc = acc - v.components[i] * u.components[k].derive(n + i)
        out.append(acc)
    return SmashTerm(A, out)


class JetVF:
    """anchor + virtual, the chart realization of a jet of a vector field."""

    __slots__ = ("anchor", "virtual")

    def __init__(self, anchor: VectorField, virtual: JetDerivation):
        if virtual.ring != anchor.ring or virtual.nvars != anchor.n:
            raise MixedContext("anchor and virtual part disagree on the chart")
        if not virtual.is_in_lplus():
            # constant-in-X terms belong to the anchor
            const = [c.constant_term() for c in virtual.components]
            anchor = anchor + VectorField(anchor.ring, const)
            virtual = JetDerivation([c - c.like({(0,) * c.nvars: k})
                                     for c, k in zip(virtual.components, const)])
        self.anchor = anchor
        self.virtual = virtual

    @classmethod
    def zero(cls, A: FnRing, order: int) -> JetVF:
        return cls(VectorField.zero(A), JetDerivation.zero(A, A.n, order))

    @classmethod
    def from_terms(cls, A: FnRing, order: int, terms) -> JetVF:
        """``{(k, i): a}`` meaning a(x) X^k d/dx_i (k = 0 is the anchor)."""
        return cls(VectorField.zero(A), JetDerivation.from_terms(A, A.n, order, terms))

    @property
    def ring(self) -> FnRing:
        return self.anchor.ring

    @property
    def order(self) -> int:
        return self.virtual.order

    @property
    def terms(self) -> dict:
        out = {((0,) * self.anchor.n, i): c for i, c in enumerate(self.anchor.coeffs) if c}
        out.update(self.virtual.terms())
        return out

    def _check(self, other: JetVF) -> None:
        if not isinstance(other, JetVF) or other.ring != self.ring or other.order != self.order:
            raise MixedContext("jets of vector fields in different contexts")

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetVF):
            return NotImplemented
        return self.anchor == other.anchor and self.virtual == other.virtual

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.anchor) or bool(self.virtual)

    def __add__(self, other: JetVF) -> JetVF:
        self._check(other)
        return JetVF(self.anchor + other.anchor, self.virtual + other.virtual)

    def __sub__(self, other: JetVF) -> JetVF:
        self._check(other)
        return JetVF(self.anchor - other.anchor, self.virtual - other.virtual)

    def __neg__(self) -> JetVF:
        return JetVF(-self.anchor, -self.virtual)

    def scale(self, f) -> JetVF:
        f = self.ring.coerce(f)
        return JetVF(self.anchor.scale(f), self.virtual.scale(f))

    def bracket(self, other: JetVF) -> JetVF:
        return jet_bracket(self, other)

    def __str__(self) -> str:
        names = self.ring.names
        jet_names = [v.upper() for v in names]
        if len(set(jet_names)) != len(jet_names) or set(jet_names) & set(names):
            jet_names = ["X"] if len(names) == 1 else [f"X{i + 1}" for i in range(len(names))]
        parts = []
        if self.anchor:
            parts.append(str(self.anchor))
        if self.virtual:
            parts.append(self.virtual.to_str(jet_names))
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"JetVF({self})"


def act_on_coefficients(eta: VectorField, d: JetDerivation) -> JetDerivation:
    return d.map_coeffs(eta.apply)


def jet_bracket(a: JetVF, b: JetVF) -> JetVF:
    a._check(b)
    virtual = (act_on_coefficients(a.anchor, b.virtual)
               - act_on_coefficients(b.anchor, a.virtual)
               + lie_bracket(a.virtual, b.virtual))
    return JetVF(a.anchor.bracket(b.anchor), virtual)


def phi(u: SmashTerm, order: int) -> JetVF:
    """g # f d/dx_i -> gf d/dx_i + g(x)(f(x+X) - f(x)) d/dX_i."""
    A = u.base
    anchor = VectorField(A, [collapse(c, A) for c in u.components])
    comps = []
    for c in u.components:
        series = expand_right(c, A, order)
        comps.append(series - series.like({(0,) * A.n: series.constant_term()}))
    return JetVF(anchor, JetDerivation(comps))


def psi(v: JetVF) -> SmashTerm:
    """g X^m d/dX_i -> (g (x) 1)(1 (x) x - x (x) 1)^m d/dx_i, anchor g d/dx_i -> g # d/dx_i."""
    A = v.ring
    n = A.n
    AA = doubled_ring(A)
    gens = AA.gens()
    diffs = [gens[n + j] - gens[j] for j in range(n)]
    comps = [left(c, A) for c in v.anchor.coeffs]
    for i, series in enumerate(v.virtual.components):
        for s, c in series.coeffs.items():
            term = left(c, A)
            for j, e in enumerate(s):
                if e:
                    term = term * diffs[j] ** e
            comps[i] = comps[i] + term
    return SmashTerm(A, comps)


def anchor(v) -> VectorField:
    if isinstance(v, SmashTerm):
        return VectorField(v.base, [collapse(c, v.base) for c in v.components])
    return v.anchor


def delta(f: FnElem, order: int) -> TruncSeries:
    """f(x+X) - f(x)."""
    series = taylor_shift(f, order)
    return series - series.like({(0,) * series.nvars: series.constant_term()})


def diff_smash(f, eta: VectorField, N: int) -> SmashTerm:
    """sum_k (-1)^k C(N,k) f^k # f^(N-k) eta."""
    A = eta.ring
    f = A.coerce(f)
    total = SmashTerm.zero(A)
    for k in range(N + 1):
        total = total + SmashTerm.pair(f ** k, eta.scale(f ** (N - k))).scale((-1) ** k * comb(N, k))
    return total


def diff_element(f, eta: VectorField, N: int, order: int | None = None) -> JetVF:
    """phi of the N-differentiability element; virtual part delta(f)^N * eta(x+X)."""
    return phi(diff_smash(f, eta, N), N if order is None else order)


def random_poly_elem(rng, A: FnRing, degree: int = 4, span: int = 3, density: float = 0.5) -> FnElem:
    """Seeded random polynomial in the chart coordinates with integer coefficients."""
    terms = {}
    for s in monomials(A.n, degree):
        if rng.random() < density:
            c = rng.randint(-span, span)
            if c:
                terms[s] = c
    return A.from_poly(Poly(A.n, terms))


def random_vector_field(rng, A: FnRing, degree: int = 4) -> VectorField:
    return VectorField(A, [random_poly_elem(rng, A, degree) for _ in range(A.n)])


def random_smash(rng, A: FnRing, degree: int = 4, pairs: int = 2) -> SmashTerm:
    return SmashTerm.from_pairs(A, [(random_poly_elem(rng, A, degree), random_vector_field(rng, A, degree))
                                    for _ in range(pairs)])


def random_jet_vf(rng, A: FnRing, order: int, degree: int = 4) -> JetVF:
    terms = {}
    for s in monomials(A.n, order):
        for i in range(A.n):
            if rng.random() < 0.4:
                terms[(s, i)] = random_poly_elem(rng, A, degree)
    return JetVF.from_terms(A, order, terms)


def chart_ring(n: int) -> FnRing:
    """Polynomial functions in x (n = 1) or x1..xn."""
    return FnRing(("x",) if n == 1 else tuple(f"x{i + 1}" for i in range(n)))


def iso_check(n: int, order: int, samples: int = 100, seed: int = 0, degree: int = 4,
              ring: FnRing | None = None) -> CheckReport:
    """phi is a Lie homomorphism, phi psi = id, and psi phi = id modulo m^(N+1).

    The last identity is tested as phi(psi(phi(u))) == phi(u): the kernel of
    phi at order N is exactly the part of A#V lying in m^(N+1).
    """
    A = chart_ring(n) if ring is None else ring
    report = CheckReport(f"iso n={A.n} N={order}", seed=seed)
    rng = random.Random(seed)
    with report.timed():
        for k in range(samples):
            u = random_smash(rng, A, degree)
            v = random_smash(rng, A, degree)
            w = random_jet_vf(rng, A, order, degree)
            pu, pv = phi(u, order), phi(v, order)
            report.expect_equal(f"phi([u, v]) sample {k}: u={u}, v={v}",
                                jet_bracket(pu, pv), phi(smash_bracket(u, v), order))
            report.expect_equal(f"phi(psi(w)) sample {k}: w={w}", w, phi(psi(w), order))
            report.expect_equal(f"psi(phi(u)) = u mod m^(N+1) sample {k}: u={u}", pu, phi(psi(pu), order))
            report.expect_equal(f"anchor([u, v]) sample {k}",
                                anchor(pu).bracket(anchor(pv)), anchor(smash_bracket(u, v)))
    return report
