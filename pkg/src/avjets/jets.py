"""Truncated derivations and automorphisms of K[[X_1..X_n]].

Conventions
-----------
* An automorphism is stored as the tuple of images ``F = (F_1, ..., F_n)`` of
  the generators.  ``aut_compose(F, G)`` is tuple substitution,
  ``(F o G)_i = F_i(G_1, ..., G_n)``.
* The algebra automorphism attached to ``F`` is ``g -> g o F``; its matrix on
  the monomial basis is ``aut_to_operator(F)``.  Because substitution reverses
  order, ``aut_to_operator(F o G) = aut_to_operator(G) @ aut_to_operator(F)``.
* Representations and the adjoint action are homomorphisms for composition
  of algebra automorphisms, so in tuple notation they reverse order too:
  ``Ad(F o G) = Ad(G) Ad(F)``.  ``aut_exp`` and ``aut_conjugate_derivation``
  agree with the operator picture: ``op(aut_exp(d)) = exp(D)`` and
  ``Ad(F) d = op(F) D op(F)^-1``.

Directions and multi-index slots are 0-based.
"""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from typing import Sequence

from avjets.algebra import linalg
from avjets.algebra.rings import QQ
from avjets.algebra.series import (
    TruncSeries,
    mi_factorial,
    monomials,
    unit_index,
)
from avjets.errors import (
    MixedContext,
    NonInvertibleLinearPart,
    NonUnit,
    NotProNilpotent,
    NotUnipotent,
    OutOfOrder,
)
from avjets.report import CheckReport


def _same(series: Sequence[TruncSeries]) -> None:
    first = series[0]
    for s in series[1:]:
        if not first.same_context(s):
            raise MixedContext(f"{first.context()} vs {s.context()}")


class JetDerivation:
    """sum_i components[i] * d/dX_i, truncated."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[TruncSeries]):
        components = tuple(components)
        if not components:
            raise ValueError("need at least one component")
        _same(components)
        if len(components) != components[0].nvars:
            raise MixedContext(f"{len(components)} components for {components[0].nvars} variables")
        self.components = components

    @classmethod
    def zero(cls, ring, n: int, order: int) -> JetDerivation:
        return cls([TruncSeries.zero(ring, n, order)] * n)

    @classmethod
    def from_terms(cls, ring, n: int, order: int, terms) -> JetDerivation:
        """Build from ``{(s, i): coefficient}`` meaning coefficient * X^s d/dX_i."""
        comps = [dict() for _ in range(n)]
        for (s, i), c in dict(terms).items():
            comps[i][tuple(s)] = ring.coerce(c) + comps[i].get(tuple(s), ring.zero)
        return cls([TruncSeries(ring, n, order, c) for c in comps])

    @property
    def ring(self):
        return self.components[0].ring

    @property
    def nvars(self) -> int:
        return self.components[0].nvars

    @property
    def order(self) -> int:
        return self.components[0].order

    def terms(self) -> dict:
        return {(s, i): c for i, comp in enumerate(self.components) for s, c in comp.coeffs.items()}

    def _check(self, other: JetDerivation) -> None:
        if not isinstance(other, JetDerivation) or not self.components[0].same_context(other.components[0]):
            raise MixedContext("derivations live in different contexts")

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetDerivation):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components)) and \
            self.components[0].same_context(other.components[0])

    __hash__ = None

    def __bool__(self) -> bool:
        return any(self.components)

    def __add__(self, other: JetDerivation) -> JetDerivation:
        self._check(other)
        return JetDerivation([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: JetDerivation) -> JetDerivation:
        self._check(other)
        return JetDerivation([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> JetDerivation:
        return JetDerivation([-a for a in self.components])

    def scale(self, c) -> JetDerivation:
        """Multiply by a coefficient-ring element or by a series."""
        return JetDerivation([a * c for a in self.components])

    __mul__ = scale
    __rmul__ = scale

    def map_coeffs(self, fn, ring=None) -> JetDerivation:
        return JetDerivation([c.map_coeffs(fn, ring) for c in self.components])

    def truncate(self, order: int) -> JetDerivation:
        return JetDerivation([c.truncate(order) for c in self.components])

    def is_in_lplus(self) -> bool:
        return all(not c.constant_term() for c in self.components)

    def filtration_degree(self) -> int:
        """Lowest total degree among the components (order + 1 for zero).

        ``d`` lies in m^k L_+ iff its filtration degree is at least k + 1.
        """
        return min(c.valuation() for c in self.components)

    def apply(self, f: TruncSeries) -> TruncSeries:
        return apply_derivation(self, f)

    def bracket(self, other: JetDerivation) -> JetDerivation:
        return lie_bracket(self, other)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        n = self.nvars
        if names is None:
            names = ["X"] if n == 1 else [f"X{i + 1}" for i in range(n)]
        parts = []
        for i, comp in enumerate(self.components):
            if comp:
                parts.append(f"({comp.to_str(names)})*d/d{names[i]}")
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"JetDerivation({self})"


def apply_derivation(d: JetDerivation, f: TruncSeries) -> TruncSeries:
    """sum_i d_i * df/dX_i."""
    if not d.components[0].same_context(f):
        raise MixedContext("derivation and series live in different contexts")
    total = TruncSeries.zero(f.ring, f.nvars, f.order)
    for i, di in enumerate(d.components):
        if di:
            total = total + di * f.derivative(i)
    return total


def lie_bracket(d1: JetDerivation, d2: JetDerivation) -> JetDerivation:
    d1._check(d2)
    return JetDerivation([apply_derivation(d1, b) - apply_derivation(d2, a)
                          for a, b in zip(d1.components, d2.components)])


class JetAutomorphism:
    """X_i -> images[i]; zero constant terms, unit jacobian determinant."""

    __slots__ = ("images", "_linear")

    def __init__(self, images: Sequence[TruncSeries], check: bool = True):
        images = tuple(images)
        _same(images)
        if len(images) != images[0].nvars:
            raise MixedContext(f"{len(images)} images for {images[0].nvars} variables")
        self.images = images
        self._linear = None
        if check:
            for F in images:
                if F.constant_term():
                    raise NonInvertibleLinearPart("images must have zero constant term")
            d = linalg.det(self.linear_part, self.ring)
            if not self.ring.is_unit(d):
                raise NonInvertibleLinearPart(f"jacobian determinant {self.ring.render(d)} is not a unit")

    @classmethod
    def identity(cls, ring, n: int, order: int) -> JetAutomorphism:
        return cls([TruncSeries.var(ring, n, order, i) for i in range(n)], check=False)

    @classmethod
    def linear(cls, L, ring, order: int) -> JetAutomorphism:
        n = len(L)
        X = [TruncSeries.var(ring, n, order, j) for j in range(n)]
        images = []
        for row in L:
            F = TruncSeries.zero(ring, n, order)
            for c, Xj in zip(row, X):
                if c:
                    F = F + Xj.scale(c)
            images.append(F)
        return cls(images)

    @property
    def ring(self):
        return self.images[0].ring

    @property
    def nvars(self) -> int:
        return self.images[0].nvars

    @property
    def order(self) -> int:
        return self.images[0].order

    @property
    def linear_part(self):
        """Matrix L with L[i][j] = coefficient of X_j in F_i."""
        if self._linear is None:
            n = self.nvars
            self._linear = tuple(tuple(F[unit_index(n, j)] for j in range(n)) for F in self.images)
        return self._linear

    def is_unipotent(self) -> bool:
        return linalg.equal(self.linear_part, linalg.identity(self.nvars, self.ring))

    def truncate(self, order: int) -> JetAutomorphism:
        return JetAutomorphism([F.truncate(order) for F in self.images], check=False)

    def map_coeffs(self, fn, ring=None) -> JetAutomorphism:
        return JetAutomorphism([F.map_coeffs(fn, ring) for F in self.images])

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetAutomorphism):
            return NotImplemented
        return len(self.images) == len(other.images) and all(a == b for a, b in zip(self.images, other.images))

    __hash__ = None

    def __matmul__(self, other: JetAutomorphism) -> JetAutomorphism:
        return aut_compose(self, other)

    def to_str(self, names: Sequence[str] | None = None) -> str:
        n = self.nvars
        if names is None:
            names = ["X"] if n == 1 else [f"X{i + 1}" for i in range(n)]
        return "; ".join(f"{names[i]} -> {F.to_str(names)}" for i, F in enumerate(self.images))

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"JetAutomorphism({self})"


def aut_compose(F: JetAutomorphism, G: JetAutomorphism) -> JetAutomorphism:
    if not F.images[0].same_context(G.images[0]):
        raise MixedContext("automorphisms live in different contexts")
    return JetAutomorphism([Fi.compose(G.images) for Fi in F.images], check=False)


def aut_invert(F: JetAutomorphism) -> JetAutomorphism:
    """Degree-by-degree inverse: G = L^-1 (X - Q(G)) with Q the nonlinear part of F.

    Each pass fixes one more homogeneous degree, so ``order`` passes suffice.
    """
    ring, n, N = F.ring, F.nvars, F.order
    Linv = linalg.inverse(F.linear_part, ring)
    L = JetAutomorphism.linear(F.linear_part, ring, N)
    nonlinear = [Fi - Li for Fi, Li in zip(F.images, L.images)]
    X = [TruncSeries.var(ring, n, N, i) for i in range(n)]

    def apply_linv(vec):
        out = []
        for row in Linv:
            acc = TruncSeries.zero(ring, n, N)
            for c, v in zip(row, vec):
                if c:
                    acc = acc + v.scale(c)
            out.append(acc)
        return out

    G = apply_linv(X)
    for _ in range(N - 1):
        G = apply_linv([Xi - Qi.compose(G) for Xi, Qi in zip(X, nonlinear)])
    return JetAutomorphism(G, check=False)


def operator_basis(n: int, order: int) -> tuple:
    return monomials(n, order)


def aut_to_operator(F: JetAutomorphism):
    """Matrix of g -> g o F on the monomial basis of degree <= N (graded-lex).

    Column j holds the coordinates of ``basis[j] o F``.
    """
    ring, n, N = F.ring, F.nvars, F.order
    basis = operator_basis(n, N)
    index = {s: k for k, s in enumerate(basis)}
    cols = []
    for s in basis:
        image = TruncSeries.monomial(ring, n, N, s).compose(F.images)
        col = [ring.zero] * len(basis)
        for t, c in image.coeffs.items():
            col[index[t]] = c
        cols.append(col)
    return linalg.transpose(tuple(tuple(c) for c in cols))


def aut_exp(d: JetDerivation) -> JetAutomorphism:
    """exp(d) for d in m L_+ (every component in m^2), as images exp(D) X_i."""
    if d.filtration_degree() < 2:
        raise NotProNilpotent("exp is only defined when every component lies in m^2")
    ring, n, N = d.ring, d.nvars, d.order
    images = []
    for i in range(n):
        term = TruncSeries.var(ring, n, N, i)
        total = term
        for k in range(1, N + 1):
            term = apply_derivation(d, term).scale(Fraction(1, k))
            if not term:
                break
            total = total + term
        images.append(total)
    return JetAutomorphism(images, check=False)


def aut_log(F: JetAutomorphism) -> JetDerivation:
    """Inverse of aut_exp: log of the unipotent operator, read off on X_i."""
    if not F.is_unipotent():
        raise NotUnipotent("log needs linear part equal to the identity")
    ring, n, N = F.ring, F.nvars, F.order
    M = aut_to_operator(F)
    size = len(M)
    nil = linalg.sub(M, linalg.identity(size, ring))
    basis = operator_basis(n, N)
    comps = []
    for i in range(n):
        v = [ring.zero] * size
        v[basis.index(unit_index(n, i))] = ring.one
        acc = [ring.zero] * size
        power = tuple(v)
        for k in range(1, N + 1):
            power = linalg.matvec(nil, power, ring)
            if not any(power):
                break
            c = Fraction((-1) ** (k + 1), k)
            acc = [a + c * p for a, p in zip(acc, power)]
        comps.append(TruncSeries(ring, n, N, {basis[j]: acc[j] for j in range(size)}))
    return JetDerivation(comps)


def aut_conjugate_derivation(F: JetAutomorphism, d: JetDerivation) -> JetDerivation:
    """Ad(F) d = op(F) D op(F)^-1; component j is d((F^-1)_j) o F."""
    if not F.images[0].same_context(d.components[0]):
        raise MixedContext("automorphism and derivation live in different contexts")
    Finv = aut_invert(F)
    return JetDerivation([apply_derivation(d, H).compose(F.images) for H in Finv.images])


def coefficient(F: JetAutomorphism, i: int, s) -> object:
    """A_{i,s} = s! * [X^s] F_i."""
    s = tuple(s)
    if len(s) != F.nvars:
        raise MixedContext(f"multi-index {s} for {F.nvars} variables")
    if sum(s) > F.order:
        raise OutOfOrder(f"|s| = {sum(s)} exceeds truncation order {F.order}")
    if sum(s) < 1:
        raise OutOfOrder("coefficients start at |s| = 1")
    return F.images[i][s] * mi_factorial(s)


def set_partitions(items: Sequence):
    """All partitions of ``items`` into nonempty blocks, blocks ordered by first element."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def faa_di_bruno(i: int, s, F: JetAutomorphism, G: JetAutomorphism):
    """A_{i,s}(F o G) from the coefficients of F and G.

    The |s| derivative slots are labeled; each set partition of the slots
    into blocks B_1..B_r, together with a free choice of directions
    j_1..j_r, contributes A_{i, e_j1+..+e_jr}(F) * prod_b A_{j_b, p(B_b)}(G).
    Blocks are unordered, so no symmetry factor appears.
    """
    n = F.nvars
    slots = [k for k, mult in enumerate(s) for _ in range(mult)]
    ring = F.ring
    total = ring.zero
    for blocks in set_partitions(list(range(len(slots)))):
        parts = []
        for block in blocks:
            p = [0] * n
            for pos in block:
                p[slots[pos]] += 1
            parts.append(tuple(p))
        for dirs in product(range(n), repeat=len(parts)):
            outer = [0] * n
            for j in dirs:
                outer[j] += 1
            term = coefficient(F, i, tuple(outer))
            if not term:
                continue
            for j, p in zip(dirs, parts):
                term = term * coefficient(G, j, p)
                if not term:
                    break
            if term:
                total = total + term
    return total


def coproduct_check(i: int, s, F: JetAutomorphism, G: JetAutomorphism) -> CheckReport:
    """Compare the coproduct (Faa di Bruno) sum with direct composition."""
    report = CheckReport(f"coproduct i={i} s={tuple(s)}")
    direct = coefficient(aut_compose(F, G), i, s)
    summed = faa_di_bruno(i, s, F, G)
    report.info["composition"] = F.ring.render(direct)
    report.info["coproduct"] = F.ring.render(summed)
    report.expect_equal(f"A[{i},{tuple(s)}](F o G)", direct, summed)
    return report


def _ring_monomial(rng, ring, spread: int):
    """A random monomial in the coefficient ring's generators, negative powers only for units."""
    out = ring.one
    for i in range(len(getattr(ring, "names", ()))):
        v = ring.var(i)
        low = -spread if ring.is_unit(v) else 0
        e = rng.randint(low, spread)
        out = out * (v ** e if e >= 0 else ring.inv(v) ** (-e))
    return out


def random_series(rng, ring, n: int, order: int, min_degree: int = 0, density: float = 0.6,
                  span: int = 3, spread: int = 0) -> TruncSeries:
    """Seeded random series with small integer or unit-fraction coefficients.

    With ``spread > 0`` each coefficient is also multiplied by a random
    monomial of the coefficient ring, so series over Q[y, 1/y] really depend on y.
    """
    coeffs = {}
    for s in monomials(n, order, min_degree):
        if rng.random() < density:
            c = Fraction(rng.randint(-span, span), rng.choice((1, 1, 2, 3)))
            if c:
                coeffs[s] = ring.coerce(c) * _ring_monomial(rng, ring, spread) if spread else c
    return TruncSeries(ring, n, order, coeffs)


def random_derivation(rng, ring, n: int, order: int, min_degree: int = 1, **kw) -> JetDerivation:
    return JetDerivation([random_series(rng, ring, n, order, min_degree, **kw) for _ in range(n)])


def random_automorphism(rng, ring, n: int, order: int, unipotent: bool = False, **kw) -> JetAutomorphism:
    spread = kw.get("spread", 0)
    while True:
        if unipotent:
            L = linalg.identity(n, ring)
        else:
            L = tuple(tuple(ring.coerce(Fraction(rng.randint(-3, 3), rng.choice((1, 2))))
                            * (_ring_monomial(rng, ring, spread) if spread else ring.one)
                            for _ in range(n)) for _ in range(n))
        try:
            if not ring.is_unit(linalg.det(L, ring)):
                continue
        except NonUnit:
            continue
        lin = JetAutomorphism.linear(L, ring, order)
        images = [Li + random_series(rng, ring, n, order, 2, **kw) for Li in lin.images]
        return JetAutomorphism(images)


def group_law_check(n: int, order: int, samples: int = 50, seed: int = 0, ring=QQ) -> CheckReport:
    """Jacobi, exp/log bijectivity, operator anti-multiplicativity, Ad and low-order BCH."""
    report = CheckReport(f"jets group laws n={n} N={order}", seed=seed)
    rng = random.Random(seed)
    with report.timed():
        for k in range(samples):
            d1, d2, d3 = (random_derivation(rng, ring, n, order) for _ in range(3))
            jac = (lie_bracket(d1, lie_bracket(d2, d3)) + lie_bracket(d2, lie_bracket(d3, d1))
                   + lie_bracket(d3, lie_bracket(d1, d2)))
            report.expect_equal(f"Jacobi sample {k}: {d1}; {d2}; {d3}", JetDerivation.zero(ring, n, order), jac)

            p1, p2 = (random_derivation(rng, ring, n, order, 2) for _ in range(2))
            report.expect_equal(f"log(exp(d)) sample {k}: d={p1}", p1, aut_log(aut_exp(p1)))
            U = random_automorphism(rng, ring, n, order, unipotent=True)
            back = aut_exp(aut_log(U))
            for i, (a, b) in enumerate(zip(U.images, back.images)):
                report.expect_equal(f"exp(log(F)) component {i} sample {k}: F={U}", a, b)

            F = random_automorphism(rng, ring, n, order)
            G = random_automorphism(rng, ring, n, order)
            lhs = aut_to_operator(aut_compose(F, G))
            rhs = linalg.matmul(aut_to_operator(G), aut_to_operator(F), ring)
            report.checked += 1
            if not linalg.equal(lhs, rhs):
                report.fail(f"op(F o G) = op(G) op(F) sample {k}: F={F}, G={G}",
                            linalg.render(rhs, ring), linalg.render(lhs, ring))

            ad_fg = aut_conjugate_derivation(aut_compose(F, G), d1)
            ad_g_ad_f = aut_conjugate_derivation(G, aut_conjugate_derivation(F, d1))
            report.expect_equal(f"Ad(F o G) = Ad(G) Ad(F) sample {k}", ad_g_ad_f, ad_fg)
            report.expect_equal(f"Ad(F)[d1, d2] sample {k}",
                                lie_bracket(aut_conjugate_derivation(F, d1), aut_conjugate_derivation(F, d2)),
                                aut_conjugate_derivation(F, lie_bracket(d1, d2)))

            # log(exp p1 o exp p2) = p1 + p2 - [p1, p2]/2 + (terms in m^3 L_+)
            bch = aut_log(aut_compose(aut_exp(p1), aut_exp(p2)))
            residual = bch - (p1 + p2 - lie_bracket(p1, p2).scale(Fraction(1, 2)))
            report.checked += 1
            if residual and residual.filtration_degree() < 4:
                report.fail(f"BCH sample {k}: d1={p1}, d2={p2}", "filtration degree >= 4",
                            f"filtration degree {residual.filtration_degree()}", str(residual))
    return report


# Two variables, second order: the chain rule written out.
def displayed_second_order(F: JetAutomorphism, G: JetAutomorphism, i: int, s) -> object:
    """A_{i,s}(F o G) for n = 2, |s| = 2, spelled out term by term.

    With slots (a, b): sum_{j,k} A_{i,e_j+e_k}(F) A_{j,e_a}(G) A_{k,e_b}(G)
    + sum_j A_{i,e_j}(F) A_{j,e_a+e_b}(G).
    """
    if F.nvars != 2 or sum(s) != 2:
        raise OutOfOrder("the displayed case is n = 2, |s| = 2")
    a, b = [k for k, m in enumerate(s) for _ in range(m)]
    e = [(1, 0), (0, 1)]
    total = F.ring.zero
    for j in range(2):
        for k in range(2):
            jk = tuple(x + y for x, y in zip(e[j], e[k]))
            total = total + coefficient(F, i, jk) * coefficient(G, j, e[a]) * coefficient(G, k, e[b])
        total = total + coefficient(F, i, e[j]) * coefficient(G, j, tuple(x + y for x, y in zip(e[a], e[b])))
    return total


def coproduct_suite(n: int, max_degree: int = 4, samples: int = 50, seed: int = 0, ring=QQ) -> CheckReport:
    """coproduct_check for every i and 1 <= |s| <= max_degree on random pairs."""
    report = CheckReport(f"coproduct n={n} |s|<={max_degree}", seed=seed)
    rng = random.Random(seed)
    keys = [(i, s) for s in monomials(n, max_degree, 1) for i in range(n)]
    with report.timed():
        for k in range(samples):
            F = random_automorphism(rng, ring, n, max_degree)
            G = random_automorphism(rng, ring, n, max_degree)
            FG = aut_compose(F, G)
            for i, s in keys:
                report.expect_equal(f"A[{i},{s}] sample {k}: F={F}, G={G}",
                                    coefficient(FG, i, s), faa_di_bruno(i, s, F, G))
                if n == 2 and sum(s) == 2:
                    report.expect_equal(f"displayed second-order A[{i},{s}] sample {k}",
                                        coefficient(FG, i, s), displayed_second_order(F, G, i, s))
    return report


def exp_closed_form_check(alphas=(1, -2, Fraction(3, 5)), order: int = 10) -> CheckReport:
    """exp(alpha X^2 d/dX) is X/(1 - alpha X) = sum_k alpha^(k-1) X^k."""
    report = CheckReport(f"exp(alpha X^2 d/dX) N={order}")
    for alpha in alphas:
        alpha = Fraction(alpha)
        d = JetDerivation.from_terms(QQ, 1, order, {((2,), 0): alpha})
        expected = TruncSeries(QQ, 1, order, {(k,): alpha ** (k - 1) for k in range(1, order + 1)})
        report.expect_equal(f"alpha={alpha}", expected, aut_exp(d).images[0])
    return report
