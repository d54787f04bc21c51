"""Finite-dimensional rational representations of L_+ and their integration.

A representation is stored by the matrices of the monomial derivations
X^s d/dX_i with 1 <= |s| <= N_rep; everything of higher degree acts by zero.
Multi-indices and directions are 0-based.

Integration follows the tuple-composition convention of ``avjets.jets``:
``rep_integrate(F o G) == rep_integrate(G) @ rep_integrate(F)``, which is the
orientation under which rho_m(aX + bX^2) = a^m [[a, b/a], [0, 1]].
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from avjets.algebra import linalg
from avjets.algebra.rings import QQ
from avjets.algebra.series import TruncSeries, mi_degree, monomials, unit_index
from avjets.errors import (
    MixedContext,
    NonInvertibleLinearPart,
    NotInLplus,
    OutOfOrder,
    UnknownName,
    ValidationFailed,
)
from avjets.jets import (
    JetAutomorphism,
    JetDerivation,
    aut_compose,
    aut_conjugate_derivation,
    aut_exp,
    aut_invert,
    aut_log,
    lie_bracket,
    random_automorphism,
    random_derivation,
)
from avjets.report import CheckReport


def monomial_label(s, i: int) -> str:
    """Canonical text key, e.g. ``X1^2*X2 d/dX1`` (1-based names)."""
    n = len(s)
    names = ["X"] if n == 1 else [f"X{k + 1}" for k in range(n)]
    parts = [names[k] if e == 1 else f"{names[k]}^{e}" for k, e in enumerate(s) if e]
    return f"{'*'.join(parts) or '1'} d/d{names[i]}"


@dataclass(frozen=True)
class RepSpec:
    """rho(X^s d/dX_i) for 1 <= |s| <= nilpotency_order, plus a torus weight basis.

    ``torus_basis`` has the weight vectors as columns; ``weights[k][j]`` is the
    eigenvalue of rho(X_j d/dX_j) on column k.
    """

    n: int
    dim: int
    nilpotency_order: int
    generators: Mapping = field(default_factory=dict)
    torus_basis: tuple | None = None
    weights: tuple = ()
    name: str = ""

    def __post_init__(self):
        gens = {}
        for (s, i), m in dict(self.generators).items():
            s = tuple(s)
            if len(s) != self.n or not 0 <= i < self.n:
                raise MixedContext(f"generator key {(s, i)} does not fit n={self.n}")
            if not 1 <= mi_degree(s):
                raise NotInLplus(f"generator {(s, i)} has degree 0")
            m = linalg.mat(m)
            if linalg.shape(m) != (self.dim, self.dim):
                raise MixedContext(f"generator {(s, i)} is not {self.dim}x{self.dim}")
            if not linalg.is_zero(m):
                gens[(s, i)] = m
        object.__setattr__(self, "generators", gens)
        basis = linalg.identity(self.dim) if self.torus_basis is None else linalg.mat(self.torus_basis)
        object.__setattr__(self, "torus_basis", basis)
        object.__setattr__(self, "weights", tuple(tuple(w) for w in self.weights))

    @property
    def N_rep(self) -> int:
        return self.nilpotency_order

    def generator(self, s, i: int):
        return self.generators.get((tuple(s), i), linalg.zeros(self.dim, self.dim))

    def keys(self):
        return [(s, i) for s in monomials(self.n, max(self.nilpotency_order, 1), 1) for i in range(self.n)]


def nilpotency_of(generators: Mapping) -> int:
    """Largest degree carrying a nonzero matrix (0 if none)."""
    degs = [mi_degree(s) for (s, _), m in generators.items() if not linalg.is_zero(linalg.mat(m))]
    return max(degs, default=0)


def make_rep(n: int, dim: int, generators: Mapping, torus_basis=None, weights=None, name: str = "") -> RepSpec:
    """RepSpec with N_rep inferred and, when no weights are given, read off a diagonal torus."""
    gens = {(tuple(s), i): linalg.mat(m) for (s, i), m in dict(generators).items()}
    if weights is None:
        basis = linalg.identity(dim) if torus_basis is None else linalg.mat(torus_basis)
        binv = linalg.inverse(basis)
        weights = []
        diag = [linalg.matmul(linalg.matmul(binv, gens.get((unit_index(n, j), j), linalg.zeros(dim, dim))), basis)
                for j in range(n)]
        for k in range(dim):
            weights.append(tuple(diag[j][k][k] for j in range(n)))
        weights = [tuple(int(w) if Fraction(w).denominator == 1 else w for w in ws) for ws in weights]
    return RepSpec(n, dim, nilpotency_of(gens), gens, torus_basis, tuple(weights), name)


def _derivation_terms(d: JetDerivation):
    for i, comp in enumerate(d.components):
        for s, c in comp.coeffs.items():
            yield s, i, c


def rep_apply(r: RepSpec, d: JetDerivation):
    """O-linear extension of rho; monomials above N_rep contribute zero."""
    if d.nvars != r.n:
        raise MixedContext(f"derivation in {d.nvars} variables, representation in {r.n}")
    if not d.is_in_lplus():
        raise NotInLplus("derivation has a nonzero constant term")
    ring = d.ring
    out = [[ring.zero] * r.dim for _ in range(r.dim)]
    for s, i, c in _derivation_terms(d):
        m = r.generators.get((s, i))
        if m is None:
            continue
        for a in range(r.dim):
            for b in range(r.dim):
                if m[a][b]:
                    out[a][b] = out[a][b] + c * m[a][b]
    return tuple(tuple(row) for row in out)


def monomial_derivation(n: int, order: int, s, i: int, ring=QQ, coeff=1) -> JetDerivation:
    return JetDerivation.from_terms(ring, n, order, {(tuple(s), i): coeff})


def rep_validate(r: RepSpec) -> CheckReport:
    report = CheckReport(f"rep_validate {r.name}".strip())
    n, N = r.n, max(r.nilpotency_order, 1)
    for (s, i) in r.generators:
        if mi_degree(s) > r.nilpotency_order:
            report.fail(f"generator {monomial_label(s, i)}", f"zero above N_rep={r.nilpotency_order}",
                        "nonzero", "")
    keys = r.keys()
    for a, (s, i) in enumerate(keys):
        da = monomial_derivation(n, N, s, i)
        for (t, j) in keys[a + 1:]:
            db = monomial_derivation(n, N, t, j)
            lhs = rep_apply(r, lie_bracket(da, db))
            rhs = linalg.commutator(r.generator(s, i), r.generator(t, j))
            if not linalg.equal(lhs, rhs):
                report.fail(f"[{monomial_label(s, i)}, {monomial_label(t, j)}]",
                            linalg.render(lhs), linalg.render(rhs),
                            linalg.render(linalg.sub(lhs, rhs)))
            report.checked += 1
    basis = r.torus_basis
    if linalg.shape(basis) != (r.dim, r.dim) or len(r.weights) != r.dim:
        report.fail("torus data", f"{r.dim} weight vectors", f"{len(r.weights)}", "")
        return report
    try:
        binv = linalg.inverse(basis)
    except NonInvertibleLinearPart:
        report.fail("torus basis", "invertible", "singular", "")
        return report
    for j in range(n):
        h = linalg.matmul(linalg.matmul(binv, r.generator(unit_index(n, j), j)), basis)
        expected = tuple(tuple(Fraction(r.weights[k][j]) if k == l else Fraction(0) for l in range(r.dim))
                         for k in range(r.dim))
        if not linalg.equal(h, expected):
            report.fail(f"torus X{j + 1} d/dX{j + 1}", linalg.render(expected), linalg.render(h), "")
    for k, ws in enumerate(r.weights):
        for w in ws:
            if Fraction(w).denominator != 1:
                report.fail(f"weight of basis vector {k}", "integer", str(w), "")
    for i in range(n):
        for j in range(n):
            if i != j and not linalg.is_nilpotent(r.generator(unit_index(n, j), i)):
                report.fail(f"rho({monomial_label(unit_index(n, j), i)})", "nilpotent", "not nilpotent", "")
    return report


def ensure_valid(r: RepSpec) -> RepSpec:
    report = rep_validate(r)
    if not report.passed:
        raise ValidationFailed(f"representation {r.name or '?'} failed validation", report)
    return r


def _torus_action(r: RepSpec, diag, ring):
    """rho of X_j -> t_j X_j: multiplication by prod t_j^w_j on each weight vector."""
    factors = []
    for ws in r.weights:
        f = ring.one
        for t, w in zip(diag, ws):
            w = int(w)
            if w > 0:
                f = f * t ** w
            elif w < 0:
                f = f * ring.inv(t) ** (-w)
        factors.append(f)
    P = linalg.convert(r.torus_basis, ring)
    Pinv = linalg.convert(linalg.inverse(r.torus_basis), ring)
    D = tuple(tuple(factors[a] if a == b else ring.zero for b in range(r.dim)) for a in range(r.dim))
    return linalg.matmul(linalg.matmul(P, D, ring), Pinv, ring)


def _elementary_rho(r: RepSpec, row: int, col: int, c, ring):
    """rho of the transvection X_row -> X_row + c X_col (exp of c X_col d/dX_row)."""
    g = linalg.convert(r.generator(unit_index(r.n, col), row), ring)
    return linalg.exp_nilpotent(linalg.scale(c, g), ring)


def linear_rho(r: RepSpec, L, ring):
    """rho of the linear automorphism with matrix L.

    Row operations T_k..T_1 L = D with D diagonal; the T are transvections so
    L = T_1^-1 .. T_k^-1 D and rho(L) = rho(D) rho(T_k^-1) .. rho(T_1^-1).
    """
    n = len(L)
    M = [list(row) for row in L]
    ops = []  # (target, source, c): row_target += c * row_source

    def add_row(target, source, c):
        M[target] = [a + c * b for a, b in zip(M[target], M[source])]
        ops.append((target, source, c))

    for k in range(n):
        if not ring.is_unit(M[k][k]):
            src = next((r_ for r_ in range(k + 1, n) if ring.is_unit(M[r_][k])), None)
            if src is None:
                raise NonInvertibleLinearPart("no unit pivot available in the linear part")
            add_row(k, src, (ring.one - M[k][k]) * ring.inv(M[src][k]))
        inv = ring.inv(M[k][k])
        for r_ in range(n):
            if r_ != k and M[r_][k]:
                add_row(r_, k, -(M[r_][k] * inv))
    diag = [M[k][k] for k in range(n)]
    out = _torus_action(r, diag, ring)
    for target, source, c in reversed(ops):
        out = linalg.matmul(out, _elementary_rho(r, target, source, -c, ring), ring)
    return out


def rep_integrate(r: RepSpec, F: JetAutomorphism):
    """rho(F) = rho(L) rho(E) with F = E o L, L the linear part and E unipotent."""
    if F.nvars != r.n:
        raise MixedContext(f"automorphism in {F.nvars} variables, representation in {r.n}")
    N = max(r.nilpotency_order, 1)
    if F.order < N:
        raise OutOfOrder(f"need truncation order >= {N}, got {F.order}")
    ring = F.ring
    F = F.truncate(N)
    L = F.linear_part
    Linv = JetAutomorphism.linear(linalg.inverse(L, ring), ring, N)
    E = aut_compose(F, Linv)
    rho_e = linalg.exp_nilpotent(rep_apply(r, aut_log(E)), ring)
    return linalg.matmul(linear_rho(r, L, ring), rho_e, ring)


def rep_tensor(r1: RepSpec, r2: RepSpec) -> RepSpec:
    if r1.n != r2.n:
        raise MixedContext(f"representations in {r1.n} and {r2.n} variables")
    I1, I2 = linalg.identity(r1.dim), linalg.identity(r2.dim)
    gens = {}
    for key in set(r1.generators) | set(r2.generators):
        gens[key] = linalg.add(linalg.kron(r1.generator(*key), I2), linalg.kron(I1, r2.generator(*key)))
    weights = tuple(tuple(a + b for a, b in zip(w1, w2)) for w1 in r1.weights for w2 in r2.weights)
    return RepSpec(r1.n, r1.dim * r2.dim, max(r1.nilpotency_order, r2.nilpotency_order), gens,
                   linalg.kron(r1.torus_basis, r2.torus_basis), weights, f"{r1.name} (x) {r2.name}")


def rep_dual(r: RepSpec) -> RepSpec:
    gens = {key: linalg.scale(-1, linalg.transpose(m)) for key, m in r.generators.items()}
    basis = linalg.transpose(linalg.inverse(r.torus_basis))
    weights = tuple(tuple(-w for w in ws) for ws in r.weights)
    return RepSpec(r.n, r.dim, r.nilpotency_order, gens, basis, weights, f"{r.name}*")


_CALL = re.compile(r"^\s*([A-Za-z_]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def builtin_rep(name: str, *params, n: int = 1) -> RepSpec:
    """rho(m), sigma(m), K_tr, weight(k), trivial.

    Accepts either ``builtin_rep("rho", 2)`` or ``builtin_rep("rho(2)")``.
    """
    match = _CALL.match(name)
    if not match:
        raise UnknownName(name)
    base, inner = match.group(1), match.group(2)
    if inner:
        params = tuple(Fraction(p.strip()) for p in inner.split(",")) + tuple(params)
    params = tuple(Fraction(p) for p in params)

    def need(k):
        if len(params) != k:
            raise UnknownName(f"{base} takes {k} parameter(s)")
        for p in params:
            if p.denominator != 1:
                raise UnknownName(f"{base}: weights must be integers")
        return [int(p) for p in params]

    if base in ("rho", "sigma"):
        (m,) = need(1)
        top = 2 if base == "rho" else 3
        shift = 1 if base == "rho" else 2
        gens = {((1,), 0): [[m + shift, 0], [0, m]], ((top,), 0): [[0, 1], [0, 0]]}
        return RepSpec(1, 2, top, gens, None, ((m + shift,), (m,)), f"{base}({m})")
    if base == "weight":
        (k,) = need(1)
        return RepSpec(1, 1, 1 if k else 0, {((1,), 0): [[k]]}, None, ((k,),), f"weight({k})")
    if base == "K_tr":
        need(0)
        gens = {(unit_index(n, i), i): [[1]] for i in range(n)}
        return RepSpec(n, 1, 1, gens, None, ((1,) * n,), "K_tr")
    if base == "trivial":
        need(0)
        return RepSpec(n, 1, 0, {}, None, ((0,) * n,), "trivial")
    raise UnknownName(f"unknown representation {name!r}")


def rho_closed_form(m: int, a, b, ring=QQ):
    """a^m [[a, b/a], [0, 1]]."""
    am = a ** m if m >= 0 else ring.inv(a) ** (-m)
    return ((am * a, am * b * ring.inv(a)), (ring.zero, am))


def sigma_closed_form(m: int, a, b, c, ring=QQ):
    """a^m [[a^2, c/a - b^2/a^2], [0, 1]]."""
    am = a ** m if m >= 0 else ring.inv(a) ** (-m)
    ainv = ring.inv(a)
    return ((am * a * a, am * (c * ainv - b * b * ainv * ainv)), (ring.zero, am))


def series_aut(ring, order: int, coeffs) -> JetAutomorphism:
    """One-variable automorphism X -> sum_k coeffs[k-1] X^k."""
    return JetAutomorphism([TruncSeries(ring, 1, order, {(k + 1,): c for k, c in enumerate(coeffs)})])


def rep_coherence_check(r: RepSpec, samples: int = 50, seed: int = 0, order: int | None = None,
                        ring=QQ, spread: int = 0) -> CheckReport:
    """Group/algebra coherence of rho on seeded random inputs.

    * rho(F o G) = rho(G) rho(F)  (anti-homomorphism for tuple composition)
    * rho(exp d) = exp(rho(d))
    * rho(F) rho(exp eta) rho(F)^-1 = rho(exp(Ad(F) eta))
    * rho([d1, d2]) = [rho(d1), rho(d2)]
    * factoring F as (unipotent) o (linear) or (linear) o (unipotent) gives the same rho(F)
    """
    N = max(r.nilpotency_order, 1) + 1 if order is None else order
    n = r.n
    report = CheckReport(f"rep coherence {r.name}", seed=seed)
    rng = random.Random(seed)

    def compare(label, expected, actual):
        report.checked += 1
        if not linalg.equal(expected, actual):
            report.fail(label, linalg.render(expected, ring), linalg.render(actual, ring),
                        linalg.render(linalg.sub(actual, expected), ring))

    with report.timed():
        for k in range(samples):
            F = random_automorphism(rng, ring, n, N, spread=spread)
            G = random_automorphism(rng, ring, n, N, spread=spread)
            rF, rG = rep_integrate(r, F), rep_integrate(r, G)
            compare(f"rho(F o G) sample {k}: F={F}, G={G}",
                    linalg.matmul(rG, rF, ring), rep_integrate(r, aut_compose(F, G)))

            eta = random_derivation(rng, ring, n, N, 2, spread=spread)
            rho_exp = rep_integrate(r, aut_exp(eta))
            compare(f"rho(exp eta) sample {k}: eta={eta}",
                    linalg.exp_nilpotent(rep_apply(r, eta), ring), rho_exp)
            conj = linalg.matmul(linalg.matmul(rF, rho_exp, ring), linalg.inverse(rF, ring), ring)
            compare(f"conj sample {k}: F={F}, eta={eta}",
                    conj, rep_integrate(r, aut_exp(aut_conjugate_derivation(F, eta))))

            d1 = random_derivation(rng, ring, n, N, 1, spread=spread)
            d2 = random_derivation(rng, ring, n, N, 1, spread=spread)
            compare(f"rho([d1, d2]) sample {k}: d1={d1}, d2={d2}",
                    linalg.commutator(rep_apply(r, d1), rep_apply(r, d2), ring),
                    rep_apply(r, lie_bracket(d1, d2)))
            # the other factorization, F = L o E' with E' unipotent, gives the same matrix
            Linv = JetAutomorphism.linear(linalg.inverse(F.linear_part, ring), ring, N)
            L = JetAutomorphism.linear(F.linear_part, ring, N)
            compare(f"rho(E') rho(L) sample {k}: F={F}",
                    rF, linalg.matmul(rep_integrate(r, aut_compose(Linv, F)), rep_integrate(r, L), ring))
            if k == 0:
                # the inverse is integrated consistently as well
                compare("rho(F^-1) rho(F) = 1", linalg.identity(r.dim, ring),
                        linalg.matmul(rep_integrate(r, aut_invert(F)), rF, ring))
    return report
