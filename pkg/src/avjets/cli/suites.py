"""Named verification suites for ``avjets verify``."""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from pathlib import Path

from avjets.algebra.rings import laurent_ring
from avjets.avmod import (
    JetModule,
    RudakovModule,
    av_axiom_check,
    dual_glue_check,
    glue_equivariance_check,
    glue_inverse_check,
    localize_check,
    p1_family_check,
    rudakov_differentiability_check,
    rudakov_realization_check,
    tensor_glue_check,
)
from avjets.cli.formats import parse_atlas, parse_rep, read_json
from avjets.errors import UnknownSuite
from avjets.geometry import Atlas, Chart, Point, mobius_transition, p1_atlas, p1_laws_check, transition_check
from avjets.jets import coproduct_suite, exp_closed_form_check, group_law_check
from avjets.report import CheckReport
from avjets.repn import RepSpec, builtin_rep, rep_coherence_check
from avjets.smash import iso_check

# suite -> (order, samples, cutoff)
DEFAULTS = {
    "iso": (4, 100, 4),
    "jets-group": (5, 50, 4),
    "coproduct": (4, 50, 4),
    "geometry": (6, 20, 4),
    "jet-av": (6, 100, 4),
    "rudakov": (6, 20, 5),
    "p1": (6, 100, 4),
}
SUITES = tuple(DEFAULTS)


@dataclass(frozen=True)
class SuiteConfig:
    """``order``, ``samples`` and ``cutoff`` fall back to the suite defaults when None."""

    suite: str
    order: int | None = None
    seed: int = 0
    samples: int | None = None
    cutoff: int | None = None
    output_format: str = "text"
    m_range: tuple = (-2, 3)
    reps: tuple = ()
    atlas: str | None = None

    def resolved(self) -> SuiteConfig:
        if self.suite not in DEFAULTS:
            raise UnknownSuite(f"unknown suite {self.suite!r}; known: {', '.join(SUITES)}")
        order, samples, cutoff = DEFAULTS[self.suite]
        cfg = replace(self,
                      order=order if self.order is None else self.order,
                      samples=samples if self.samples is None else self.samples,
                      cutoff=cutoff if self.cutoff is None else self.cutoff)
        if cfg.order < 1:
            raise ValueError("order must be >= 1")
        if cfg.samples < 1:
            raise ValueError("samples must be >= 1")
        if cfg.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if cfg.output_format not in ("text", "json"):
            raise ValueError("format must be text or json")
        lo, hi = cfg.m_range
        if lo > hi:
            raise ValueError(f"empty m-range {lo}..{hi}")
        return cfg


def parse_m_range(text: str) -> tuple[int, int]:
    """"-2..3" -> (-2, 3); a single integer gives a one-point range."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        return int(text), int(text)
    except ValueError:
        raise ValueError(f"bad m-range {text!r}; expected e.g. -2..3") from None


def load_rep(arg: str) -> RepSpec:
    """A built-in name such as ``rho(1)``, or ``path.json[:name=value,...]``."""
    path, _, assigns = arg.partition(":")
    if path.endswith(".json"):
        params = {}
        for item in filter(None, assigns.split(",")):
            key, _, value = item.partition("=")
            params[key.strip()] = value.strip()
        return parse_rep(read_json(path), params, source=path)
    return builtin_rep(arg)


def _family_reps(cfg: SuiteConfig) -> list[RepSpec]:
    if cfg.reps:
        return [load_rep(r) for r in cfg.reps]
    lo, hi = cfg.m_range
    reps = [builtin_rep(f, m) for f in ("rho", "sigma") for m in range(lo, hi + 1)]
    return reps + [builtin_rep("weight", 2), builtin_rep("weight", -1), builtin_rep("K_tr")]


def _atlas(cfg: SuiteConfig) -> Atlas:
    if cfg.atlas is None:
        return p1_atlas()
    return parse_atlas(read_json(cfg.atlas), source=str(Path(cfg.atlas)))


def suite_iso(cfg: SuiteConfig) -> CheckReport:
    report = CheckReport("iso", seed=cfg.seed)
    for n in (1, 2):
        report.merge(iso_check(n, cfg.order, cfg.samples, cfg.seed, cfg.cutoff))
    return report


def suite_jets_group(cfg: SuiteConfig) -> CheckReport:
    report = CheckReport("jets-group", seed=cfg.seed)
    for n in (1, 2):
        report.merge(group_law_check(n, cfg.order, cfg.samples, cfg.seed))
    report.merge(exp_closed_form_check(order=max(cfg.order, 10)))
    laurent = laurent_ring("y")
    for rep in _family_reps(cfg):
        report.merge(rep_coherence_check(rep, cfg.samples, cfg.seed))
        report.merge(rep_coherence_check(rep, cfg.samples, cfg.seed, ring=laurent, spread=1),
                     f"{rep.name} over {laurent}")
    for rep in (builtin_rep("K_tr", n=2), builtin_rep("trivial", n=2)):
        report.merge(rep_coherence_check(rep, cfg.samples, cfg.seed), f"{rep.name} n=2")
    return report


def suite_coproduct(cfg: SuiteConfig) -> CheckReport:
    report = CheckReport("coproduct", seed=cfg.seed)
    for n in (1, 2):
        report.merge(coproduct_suite(n, cfg.order, cfg.samples, cfg.seed))
    return report


def suite_geometry(cfg: SuiteConfig) -> CheckReport:
    report = CheckReport("geometry", seed=cfg.seed)
    atlas = _atlas(cfg)
    for t in atlas.transitions:
        report.merge(transition_check(t, cfg.order, cfg.samples, cfg.seed))
        report.merge(transition_check(t.inverse(), cfg.order, cfg.samples, cfg.seed))
    rng = random.Random(cfg.seed)
    for k in range(3):
        while True:
            a, b, c, d = (rng.randint(-3, 3) for _ in range(4))
            if a * d - b * c:
                break
        report.merge(transition_check(mobius_transition(a, b, c, d), cfg.order, cfg.samples, cfg.seed),
                     f"mobius ({a}y+{b})/({c}y+{d})")
    return report


def suite_jet_av(cfg: SuiteConfig) -> CheckReport:
    report = CheckReport("jet-av", seed=cfg.seed)
    atlas = _atlas(cfg)
    reps = _family_reps(cfg)
    for rep in reps:
        for chart in atlas.charts.values():
            report.merge(av_axiom_check(JetModule(rep, chart.ring), cfg.samples, cfg.seed, cfg.cutoff))
        for t in atlas.transitions:
            report.merge(glue_equivariance_check(rep, t, max(1, cfg.samples // 5), cfg.seed, cfg.cutoff))
            report.merge(glue_inverse_check(rep, t))
            report.merge(dual_glue_check(rep, t))
    for t in atlas.transitions:
        for r1 in reps[:3]:
            for r2 in reps[-3:]:
                report.merge(tensor_glue_check(r1, r2, t))
    return report


def suite_rudakov(cfg: SuiteConfig) -> CheckReport:
    report = CheckReport("rudakov", seed=cfg.seed)
    line = Chart("U0", ("x",))
    for rep in _family_reps(cfg):
        coords = ("x",) if rep.n == 1 else tuple(f"x{i + 1}" for i in range(rep.n))
        P = Point(Chart("U0", coords), (0,) * rep.n)
        report.merge(av_axiom_check(RudakovModule(rep, P), cfg.samples, cfg.seed, 4, min(cfg.cutoff, 3)),
                     f"av_axioms R^{rep.name}")
        report.merge(rudakov_differentiability_check(rep, P, cfg.samples, cfg.seed, cfg.cutoff))
        real_cutoff = max(cfg.cutoff - 1, 1)
        report.merge(rudakov_realization_check(rep, P, real_cutoff, max(cfg.samples, 30), cfg.seed))
        # negative control: without the trace twist the comparison must fail
        control = rudakov_realization_check(rep, P, real_cutoff, 1, cfg.seed, twist=False)
        verdict = CheckReport(f"untwisted control {rep.name}")
        verdict.expect_true("the untwisted tensor model differs from R^W_P", not control.passed)
        report.merge(verdict)
    for origin in (0, 2):
        report.merge(localize_check(Point(line, (origin,)), cfg.order, cfg.samples, cfg.seed))
    return report


def suite_p1(cfg: SuiteConfig) -> CheckReport:
    report = CheckReport("p1", seed=cfg.seed)
    t = p1_atlas().transitions[0]
    lo, hi = cfg.m_range
    glue = {}
    for family in ("rho", "sigma"):
        for m in range(lo, hi + 1):
            sub = p1_family_check(family, m, t, cfg.samples, cfg.seed, cfg.cutoff)
            glue[f"{family}({m})"] = sub.info["sections"]
            sub.info = {}
            report.merge(sub)
    report.info["sections"] = glue
    report.merge(p1_laws_check(cfg.order))
    report.merge(transition_check(t, cfg.order, min(cfg.samples, 20), cfg.seed))
    return report


RUNNERS = {
    "iso": suite_iso,
    "jets-group": suite_jets_group,
    "coproduct": suite_coproduct,
    "geometry": suite_geometry,
    "jet-av": suite_jet_av,
    "rudakov": suite_rudakov,
    "p1": suite_p1,
}


def run_suite(cfg: SuiteConfig) -> CheckReport:
    cfg = cfg.resolved()
    report = RUNNERS[cfg.suite](cfg)
    report.info["config"] = {"suite": cfg.suite, "order": cfg.order, "samples": cfg.samples,
                             "cutoff": cfg.cutoff, "m_range": f"{cfg.m_range[0]}..{cfg.m_range[1]}"}
    return report
