"""Modules supported at a point: Rudakov modules, delta functions, and their tensor model.

All three share the basis d^a (x) w (a a multi-index, w in W) and the same
rewriting scheme: a generator is commuted past d^a one partial at a time,

    f d_i X      = d_i (f X) - (d_i f) X
    f d_j d_i X  = d_i (f d_j X) - ((d_i f) d_j) X,

until it reaches the bottom layer 1 (x) W, where each module has its own rule.
Every correction term has strictly smaller |a|, so the recursion terminates.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Mapping

from avjets.algebra import linalg
from avjets.algebra.rings import QQ, FnElem
from avjets.algebra.series import TruncSeries, mi_factorial, monomials, taylor_shift, unit_index
from avjets.avmod.base import AVModule, differentiability_check
from avjets.errors import MixedContext, NotVanishingAtP
from avjets.geometry import Point
from avjets.jets import JetDerivation
from avjets.report import CheckReport
from avjets.repn import RepSpec, rep_apply
from avjets.smash import VectorField, random_poly_elem


class PointElement:
    """sum_a d^a (x) terms[a], vectors of rationals of a fixed dimension."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping = ()):
        clean = {}
        for a, v in dict(terms).items():
            v = tuple(Fraction(c) for c in v)
            if len(v) != dim:
                raise MixedContext(f"vector of length {len(v)} in a module of dimension {dim}")
            if any(v):
                clean[tuple(a)] = v
        self.dim = dim
        self.terms = clean

    @classmethod
    def _raw(cls, dim: int, terms: dict):
        obj = object.__new__(cls)
        obj.dim = dim
        obj.terms = terms
        return obj

    @classmethod
    def basis(cls, n: int, dim: int, a, k: int):
        a = tuple(a) if a else (0,) * n
        return cls(dim, {a: tuple(1 if j == k else 0 for j in range(dim))})

    def _like(self, terms: dict):
        return type(self)._raw(self.dim, terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointElement):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    __hash__ = None

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for a, v in other.terms.items():
            w = out.get(a)
            if w is None:
                out[a] = v
            else:
                s = tuple(p + q for p, q in zip(w, v))
                if any(s):
                    out[a] = s
                else:
                    del out[a]
        return self._like(out)

    def __neg__(self):
        return self._like({a: tuple(-c for c in v) for a, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return self._like({})
        return self._like({a: tuple(c * x for x in v) for a, v in self.terms.items()})

    def shift(self, i: int):
        """Free left action of d_i."""
        out = {}
        for a, v in self.terms.items():
            b = list(a)
            b[i] += 1
            out[tuple(b)] = v
        return self._like(out)

    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=-1)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms, key=lambda a: (sum(a), tuple(-x for x in a))):
            v = self.terms[a]
            op = "*".join(f"d{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(a) if k) or "1"
            vec = "(" + ", ".join(str(c) for c in v) + ")"
            parts.append(f"{op} (x) {vec}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


class RudakovElement(PointElement):
    __slots__ = ()


class DeltaElement(PointElement):
    """sum_a c_a d^a delta_P, stored with one-dimensional vectors."""

    __slots__ = ()

    @classmethod
    def from_scalars(cls, terms: Mapping) -> DeltaElement:
        return cls(1, {a: (c,) for a, c in dict(terms).items()})

    @property
    def scalars(self) -> dict:
        return {a: v[0] for a, v in self.terms.items()}


def localize_at_point(field: VectorField, P: Point, order: int) -> JetDerivation:
    """sum_i f_i d/dx_i -> sum_{0 < |s| <= N} (1/s!) d^s f_i(P) X^s d/dX_i, needs f_i(P) = 0."""
    comps = []
    for i, f in enumerate(field.coeffs):
        if f.evaluate(P.coordinates) != 0:
            raise NotVanishingAtP(f"coefficient {i} = {f} does not vanish at {P.coordinates}")
        jet = taylor_shift(f, order)
        comps.append(TruncSeries(QQ, field.n, order,
                                 {s: c.evaluate(P.coordinates) for s, c in jet.coeffs.items()}))
    return JetDerivation(comps)


class _PointModule(AVModule):
    """Shared rewriting machinery; subclasses define the bottom layer."""

    element_type = PointElement

    def __init__(self, P: Point, dim: int):
        self.P = P
        self.ring = P.ring
        self.dim = dim
        self.n = P.chart.n

    # -- functions -------------------------------------------------------
    def _function_on(self, f: FnElem, a: tuple, v: tuple):
        if not any(a):
            return self.element_type._raw(self.dim, {a: v}).scale(f.evaluate(self.P.coordinates))
        i = next(k for k, e in enumerate(a) if e)
        b = list(a)
        b[i] -= 1
        b = tuple(b)
        out = self._function_on(f, b, v).shift(i)
        df = f.derive(i)
        if df:
            out = out - self._function_on(df, b, v)
        return out

    def act_function(self, f, m):
        f = self.ring.coerce(f)
        total = self.element_type._raw(self.dim, {})
        if not f:
            return total
        for a, v in m.terms.items():
            total = total + self._function_on(f, a, v)
        return total

    # -- vector fields ---------------------------------------------------
    def _bottom_field(self, f: FnElem, j: int, v: tuple):
        raise NotImplementedError

    def _field_on(self, f: FnElem, j: int, a: tuple, v: tuple):
        if not any(a):
            return self._bottom_field(f, j, v)
        i = next(k for k, e in enumerate(a) if e)
        b = list(a)
        b[i] -= 1
        b = tuple(b)
        out = self._field_on(f, j, b, v).shift(i)
        df = f.derive(i)
        if df:
            out = out - self._field_on(df, j, b, v)
        return out

    def act_field(self, eta: VectorField, m):
        total = self.element_type._raw(self.dim, {})
        for j, f in enumerate(eta.coeffs):
            if not f:
                continue
            for a, v in m.terms.items():
                total = total + self._field_on(f, j, a, v)
        return total

    def act_partial(self, i: int, m):
        return m.shift(i)

    def random_element(self, rng: random.Random, cutoff: int = 3):
        terms = {}
        for a in monomials(self.n, cutoff):
            if rng.random() < 0.5:
                terms[a] = tuple(rng.randint(-3, 3) for _ in range(self.dim))
        return self.element_type(self.dim, terms)

    def basis(self, cutoff: int):
        for a in monomials(self.n, cutoff):
            for k in range(self.dim):
                yield self.element_type.basis(self.n, self.dim, a, k)


class RudakovModule(_PointModule):
    """R^W_P: induced from W, with functions acting by f(P) and m_P V through L_+."""

    element_type = RudakovElement

    def __init__(self, rep: RepSpec, P: Point, name: str | None = None):
        super().__init__(P, rep.dim)
        if rep.n != self.n:
            raise MixedContext("representation and chart have different dimensions")
        self.rep = rep
        self.order = max(rep.nilpotency_order, 1)
        self.name = name or f"R^{rep.name or 'W'}_P"

    def _bottom_field(self, f: FnElem, j: int, v: tuple):
        fp = f.evaluate(self.P.coordinates)
        out = {}
        if fp:
            out[unit_index(self.n, j)] = tuple(fp * c for c in v)
        rest = VectorField.partial(self.ring, j, f - fp)
        mat = rep_apply(self.rep, localize_at_point(rest, self.P, self.order))
        w = linalg.matvec(mat, v)
        elt = RudakovElement._raw(self.dim, out)
        if any(w):
            elt = elt + RudakovElement._raw(self.dim, {(0,) * self.n: w})
        return elt


def rudakov_act(rep: RepSpec, P: Point, generator, elt: RudakovElement) -> RudakovElement:
    """Act by a function (FnElem or rational) or a vector field."""
    module = RudakovModule(rep, P)
    if isinstance(generator, VectorField):
        return module.act_field(generator, elt)
    return module.act_function(generator, elt)


class DeltaModule(_PointModule):
    """F_P = K[d_1..d_n] delta_P with f delta_P = f(P) delta_P; a D-module."""

    element_type = DeltaElement

    def __init__(self, P: Point, dim: int = 1, name: str | None = None):
        super().__init__(P, dim)
        self.name = name or "F_P"

    def _bottom_field(self, f: FnElem, j: int, v: tuple):
        return self._function_on(f, unit_index(self.n, j), v)

    def act_field(self, eta: VectorField, m):
        # a D-module: f d_j acts as f . (d_j m)
        total = self.element_type._raw(self.dim, {})
        for j, f in enumerate(eta.coeffs):
            if f:
                total = total + self.act_function(f, m.shift(j))
        return total


def delta_module_act(P: Point, generator, elt: DeltaElement) -> DeltaElement:
    """Act by a function, a vector field, or a bare partial index ``("d", i)``."""
    module = DeltaModule(P)
    if isinstance(generator, VectorField):
        return module.act_field(generator, elt)
    if isinstance(generator, tuple) and generator and generator[0] == "d":
        return module.act_partial(generator[1], elt)
    return module.act_function(generator, elt)


class TensorRealization(_PointModule):
    """F_P (x)_A J^{W (x) K_tr} on the basis d^a delta_P (x) w.

    A function acts on the delta factor.  A vector field f d_i acts by the
    Leibniz rule: (f d_i . d^a delta) (x) w plus, for the jet factor,
    sum_{0<|s|<=N} (1/s!) (d^s f . d^a delta) (x) rho'(X^s d/dX_i) w with
    rho' = rho (x) K_tr.  With ``twist=False`` the trace shift is omitted.
    """

    element_type = RudakovElement

    def __init__(self, rep: RepSpec, P: Point, twist: bool = True, name: str | None = None):
        super().__init__(P, rep.dim)
        self.rep = rep
        self.twist = twist
        self.order = max(rep.nilpotency_order, 1)
        self.delta = DeltaModule(P, rep.dim)
        self.name = name or f"F_P (x) J^({rep.name or 'W'}{' (x) K_tr' if twist else ''})"
        self._jets = {}
        for s in monomials(self.n, self.order, 1):
            for i in range(self.n):
                mat = rep.generator(s, i)
                if twist and s == unit_index(self.n, i):
                    mat = linalg.add(mat, linalg.identity(rep.dim))
                if not linalg.is_zero(mat):
                    self._jets[(s, i)] = linalg.scale(Fraction(1, mi_factorial(s)), mat)

    def act_function(self, f, m):
        return self.delta.act_function(f, m)

    def act_field(self, eta: VectorField, m):
        total = self.element_type._raw(self.dim, {})
        for i, f in enumerate(eta.coeffs):
            if not f:
                continue
            total = total + self.delta.act_function(f, m.shift(i))
            for (s, k), mat in self._jets.items():
                if k != i:
                    continue
                ds = f
                for var, e in enumerate(s):
                    for _ in range(e):
                        ds = ds.derive(var)
                if not ds:
                    continue
                moved = RudakovElement._raw(self.dim, {})
                for a, v in m.terms.items():
                    w = linalg.matvec(mat, v)
                    if any(w):
                        moved = moved + RudakovElement._raw(self.dim, {a: w})
                total = total + self.delta.act_function(ds, moved)
        return total


def rudakov_realization_check(rep: RepSpec, P: Point, cutoff: int = 4, samples: int = 30, seed: int = 0,
                              degree: int = 4, twist: bool = True) -> CheckReport:
    """Compare R^W_P with F_P (x) J^{W (x) K_tr} on the basis d^a (x) e_k, |a| <= cutoff."""
    report = CheckReport(f"rudakov_realization {rep.name}{'' if twist else ' (untwisted)'}", seed=seed)
    rng = random.Random(seed)
    R = RudakovModule(rep, P)
    T = TensorRealization(rep, P, twist=twist)
    basis = list(R.basis(cutoff))
    with report.timed():
        for k in range(samples):
            f = random_poly_elem(rng, R.ring, degree)
            eta = VectorField(R.ring, [random_poly_elem(rng, R.ring, degree) for _ in range(R.n)])
            for b in basis:
                for label, lhs, rhs in (("f", R.act_function(f, b), T.act_function(f, b)),
                                        ("f d", R.act_field(eta, b), T.act_field(eta, b))):
                    report.checked += 1
                    if lhs != rhs:
                        report.fail(f"sample {k} ({label}): f={f if label == 'f' else eta}, basis={b}",
                                    str(lhs), str(rhs), str(rhs - lhs))
                        if len(report.findings) >= 20:
                            return report
    return report


def is_trace_twist(rep: RepSpec) -> bool:
    """W (x) K_tr is trivial, i.e. W is a sum of copies of K_tr^-1; then R^W_P is a D-module."""
    for (s, i) in rep.keys():
        mat = rep.generator(s, i)
        if s == unit_index(rep.n, i):
            mat = linalg.add(mat, linalg.identity(rep.dim))
        if not linalg.is_zero(mat):
            return False
    return True


def rudakov_differentiability_check(rep: RepSpec, P: Point, samples: int = 20, seed: int = 0,
                                    cutoff: int = 5, degree: int = 4, slack: int = 2) -> CheckReport:
    """Search [N_rep, N_rep + slack] for the minimal N at which R^W_P is N-differentiable.

    Passes when some candidate passes and, unless W is a trace twist, N = 1 fails.
    """
    module = RudakovModule(rep, P)
    low = max(rep.nilpotency_order, 1)
    report = CheckReport(f"rudakov differentiability {rep.name}", seed=seed)
    kw = dict(samples=samples, seed=seed, cutoff=cutoff, degree=degree)
    with report.timed():
        verdicts = {}
        for N in range(low, low + slack + 1):
            verdicts[N] = differentiability_check(module, N, **kw).passed
            if verdicts[N]:
                break
        passing = [N for N, ok in verdicts.items() if ok]
        report.info["verdicts"] = {str(N): ok for N, ok in verdicts.items()}
        report.info["minimal_N"] = passing[0] if passing else None
        report.checked += 1
        if not passing:
            report.fail(f"N in [{low}, {low + slack}]", "some N passes", "all fail")
        at_one = differentiability_check(module, 1, **kw)
        report.info["N=1"] = at_one.passed
        report.checked += 1
        if at_one.passed != is_trace_twist(rep):
            report.fail("N = 1", "passes (D-module)" if is_trace_twist(rep) else "fails (not a D-module)",
                        "passes" if at_one.passed else "fails")
    return report


def localize_check(P: Point, order: int, samples: int = 30, seed: int = 0, degree: int = 3) -> CheckReport:
    """localize_at_point([u, v]) == [localize(u), localize(v)] for fields vanishing at P."""
    report = CheckReport(f"localize at {P.coordinates} N={order}", seed=seed)
    rng = random.Random(seed)
    ring = P.ring
    n = ring.n
    shifted = [ring.var(i) - P.coordinates[i] for i in range(n)]

    def vanishing_field():
        coeffs = []
        for _ in range(n):
            f = ring.zero
            for x in shifted:
                f = f + x * random_poly_elem(rng, ring, degree)
            coeffs.append(f)
        return VectorField(ring, coeffs)

    with report.timed():
        for k in range(samples):
            u, v = vanishing_field(), vanishing_field()
            report.expect_equal(f"sample {k}: u={u}, v={v}",
                                localize_at_point(u, P, order).bracket(localize_at_point(v, P, order)),
                                localize_at_point(u.bracket(v), P, order))
    return report
