"""Module protocol shared by the concrete AV-modules, and the generic checks."""
from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb

from avjets.algebra.rings import FnRing
from avjets.report import CheckReport
from avjets.smash import VectorField, random_poly_elem


@dataclass(frozen=True)
class Sampling:
    """Seeded sampling: integer coefficients in [-span, span], total degree <= degree."""

    samples: int = 100
    seed: int = 0
    degree: int = 4
    span: int = 3
    cutoff: int = 4


class AVModule:
    """An A-module with a compatible action of vector fields on one chart.

    Subclasses implement ``act_function``, ``act_field`` and
    ``random_element``; elements must support ``+``, ``-``, ``==``,
    ``scale`` by a rational and ``bool`` (nonzero).
    """

    ring: FnRing
    name: str = "module"

    def act_function(self, f, m):
        raise NotImplementedError

    def act_field(self, eta: VectorField, m):
        raise NotImplementedError

    def random_element(self, rng: random.Random, cutoff: int):
        raise NotImplementedError

    def random_function(self, rng: random.Random, degree: int = 4, span: int = 3):
        return random_poly_elem(rng, self.ring, degree, span)

    def random_field(self, rng: random.Random, degree: int = 4, span: int = 3) -> VectorField:
        return VectorField(self.ring, [random_poly_elem(rng, self.ring, degree, span) for _ in range(self.ring.n)])

    def render(self, m) -> str:
        return str(m)


def _compare(report: CheckReport, module: AVModule, label, expected, actual) -> None:
    """``label`` is a callable so inputs are only rendered on failure."""
    report.checked += 1
    if expected != actual:
        report.fail(label(), module.render(expected), module.render(actual), module.render(actual - expected))


def av_axiom_check(module: AVModule, samples: int = 100, seed: int = 0, degree: int = 4,
                   cutoff: int = 3) -> CheckReport:
    """Leibniz, bracket and A-module associativity on seeded random inputs."""
    report = CheckReport(f"av_axioms {module.name}", seed=seed)
    rng = random.Random(seed)
    with report.timed():
        for k in range(samples):
            f = module.random_function(rng, degree)
            g = module.random_function(rng, degree)
            eta = module.random_field(rng, degree)
            mu = module.random_field(rng, degree)
            m = module.random_element(rng, cutoff)

            def tag(kind, k=k, f=f, g=g, eta=eta, mu=mu, m=m):
                return lambda: f"{kind} sample {k}: f={f}, g={g}, eta={eta}, mu={mu}, m={module.render(m)}"

            # (i) eta(f m) = eta(f) m + f (eta m)
            lhs = module.act_field(eta, module.act_function(f, m))
            rhs = module.act_function(eta.apply(f), m) + module.act_function(f, module.act_field(eta, m))
            _compare(report, module, tag("Leibniz"), rhs, lhs)
            # (ii) [eta, mu] m = eta(mu m) - mu(eta m)
            lhs = module.act_field(eta.bracket(mu), m)
            rhs = module.act_field(eta, module.act_field(mu, m)) - module.act_field(mu, module.act_field(eta, m))
            _compare(report, module, tag("bracket"), rhs, lhs)
            # (iii) f (g m) = (f g) m and 1 m = m
            lhs = module.act_function(f, module.act_function(g, m))
            rhs = module.act_function(f * g, m)
            _compare(report, module, tag("associativity"), rhs, lhs)
            one = module.act_function(module.ring.one, m)
            _compare(report, module, tag("unit"), m, one)
    return report


def diff_action(module: AVModule, f, eta: VectorField, N: int, m):
    """sum_k (-1)^k C(N,k) f^k ((f^(N-k) eta) m)."""
    total = None
    for k in range(N + 1):
        term = module.act_function(f ** k, module.act_field(eta.scale(f ** (N - k)), m))
        term = term.scale((-1) ** k * comb(N, k))
        total = term if total is None else total + term
    return total


def probe_fields(ring: FnRing) -> list[VectorField]:
    """d/dx_i and x_j d/dx_i."""
    fields = []
    xs = ring.gens()
    for i in range(ring.n):
        fields.append(VectorField.partial(ring, i))
        for j in range(ring.n):
            fields.append(VectorField.partial(ring, i, xs[j]))
    return fields


def differentiability_check(module: AVModule, N: int, samples: int = 20, seed: int = 0,
                            cutoff: int = 3, degree: int = 4) -> CheckReport:
    """Apply the N-differentiability element through the module action."""
    report = CheckReport(f"differentiability N={N} {module.name}", seed=seed)
    rng = random.Random(seed)
    fields = probe_fields(module.ring)
    with report.timed():
        for k in range(samples):
            f = module.random_function(rng, degree)
            m = module.random_element(rng, cutoff)
            for eta in fields:
                out = diff_action(module, f, eta, N, m)
                report.checked += 1
                if out:
                    report.fail(f"sample {k}: f={f}, eta={eta}, m={module.render(m)}", "0", module.render(out))
                    return report
    return report


def minimal_differentiable_order(module: AVModule, low: int, high: int, **kw) -> tuple[int | None, dict]:
    """Smallest N in [low, high] that passes, with every candidate's verdict."""
    verdicts = {}
    best = None
    for N in range(low, high + 1):
        verdicts[N] = differentiability_check(module, N, **kw).passed
        if verdicts[N] and best is None:
            best = N
    return best, verdicts
