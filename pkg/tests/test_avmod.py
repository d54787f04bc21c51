"""Jet modules, Rudakov modules and delta modules with their checks."""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avjets.algebra import laurent_ring, linalg, poly_ring
from avjets.avmod import (
    DeltaElement,
    DeltaModule,
    JetModule,
    JetModuleElement,
    RudakovElement,
    RudakovModule,
    av_axiom_check,
    delta_module_act,
    differentiability_check,
    dual_glue_check,
    family_action_closed_form,
    family_glue_closed_form,
    glue_equivariance_check,
    glue_inverse_check,
    is_trace_twist,
    jet_action,
    jet_glue_matrix,
    localize_at_point,
    localize_check,
    minimal_differentiable_order,
    p1_family_check,
    rudakov_act,
    rudakov_differentiability_check,
    rudakov_realization_check,
    section_law,
    tensor_glue_check,
)
from avjets.errors import MixedContext
from avjets.geometry import Chart, Point, p1_transition
from avjets.jets import JetDerivation
from avjets.repn import builtin_rep, make_rep
from avjets.smash import VectorField, random_poly_elem

T = p1_transition()
LINE = Chart("U0", ("x",))
ORIGIN = Point(LINE, (0,))
Rx = poly_ring("x")
x = Rx.var(0)
seeds = st.integers(0, 10 ** 6)
ms = st.integers(-2, 3)


# -- jet modules --------------------------------------------------------------

def test_rho_one_action_example():
    # x^3 d/dx on e1 + x e2 for rho(1): (9x^2) e1 + (4x^3) e2
    out = jet_action(builtin_rep("rho(1)"), VectorField.partial(Rx, 0, x ** 3), JetModuleElement(Rx, [1, x]))
    assert out == JetModuleElement(Rx, [x ** 2 * 9, x ** 3 * 4])


def test_weight_module_is_tensor_density():
    # weight(k): f d/dx (g) = f g' + k f' g
    rep = builtin_rep("weight(3)")
    f, g = x ** 2 + 1, x ** 3
    out = jet_action(rep, VectorField.partial(Rx, 0, f), JetModuleElement(Rx, [g]))
    assert out == JetModuleElement(Rx, [f * g.derive(0) + f.derive(0) * g * 3])


@pytest.mark.parametrize("family", ["rho", "sigma"])
@pytest.mark.parametrize("m", [-2, 0, 3])
def test_glue_matrix_closed_form(family, m):
    rep = builtin_rep(family, m)
    assert linalg.equal(jet_glue_matrix(rep, T), family_glue_closed_form(family, m, T.source_overlap))


def test_section_law_rho_zero():
    M = jet_glue_matrix(builtin_rep("rho(0)"), T)
    assert section_law(M, T.source_overlap) == ["e1^x = (y^-2)*e1^y", "e2^x = (-y^-1)*e1^y + (1)*e2^y"]


def test_section_law_sigma_one():
    M = jet_glue_matrix(builtin_rep("sigma(1)"), T)
    assert section_law(M, T.source_overlap) == ["e1^x = (y^-6)*e1^y", "e2^x = (y^-2)*e2^y"]


def test_displayed_formula_catches_a_dropped_term():
    # the hand formula with the f'' term removed disagrees with the jet action
    rep = builtin_rep("rho(0)")
    s = JetModuleElement(Rx, [0, 1])
    field = VectorField.partial(Rx, 0, x ** 2)
    full = family_action_closed_form("rho", 0, x ** 2, s)
    assert full.coeffs[0] == Rx.one  # (1/2) f'' g2 with f = x^2, g2 = 1
    dropped = JetModuleElement(Rx, [0, full.coeffs[1]])
    assert jet_action(rep, field, s) == full
    assert jet_action(rep, field, s) != dropped


def test_action_rejects_wrong_rank():
    with pytest.raises(MixedContext):
        jet_action(builtin_rep("rho(0)"), VectorField.partial(Rx, 0), JetModuleElement(Rx, [1]))


@pytest.mark.parametrize("name", ["rho(1)", "sigma(-1)", "weight(2)", "K_tr"])
def test_glue_inverse_and_dual(name):
    rep = builtin_rep(name)
    assert glue_inverse_check(rep, T).passed
    assert dual_glue_check(rep, T).passed


def test_tensor_glue():
    assert tensor_glue_check(builtin_rep("rho(1)"), builtin_rep("sigma(-2)"), T).passed


def test_glue_equivariance_small():
    assert glue_equivariance_check(builtin_rep("rho(2)"), T, samples=4).passed


def test_rescaled_rep_has_different_glue():
    # doubling the X^2 d/dX matrix gives a valid rep whose glue no longer matches rho(1)
    twisted = make_rep(1, 2, {((1,), 0): [[2, 0], [0, 1]], ((2,), 0): [[0, 2], [0, 0]]})
    M = jet_glue_matrix(twisted, T)
    assert not linalg.equal(M, family_glue_closed_form("rho", 1, T.source_overlap))


def test_p1_family_small():
    report = p1_family_check("sigma", 1, T, samples=3)
    assert report.passed
    assert report.info["sections"][0] == "e1^x = (y^-6)*e1^y"


@settings(max_examples=10, deadline=None)
@given(seeds, ms, st.sampled_from(["rho", "sigma"]))
def test_displayed_action_formulas(seed, m, family):
    rng = random.Random(seed)
    rep = builtin_rep(family, m)
    for ring in (Rx, laurent_ring("y")):
        f = random_poly_elem(rng, ring, 4)
        s = JetModuleElement(ring, [random_poly_elem(rng, ring, 4) for _ in range(2)])
        assert jet_action(rep, VectorField.partial(ring, 0, f), s) == family_action_closed_form(family, m, f, s)


@settings(max_examples=5, deadline=None)
@given(seeds, ms)
def test_jet_module_axioms(seed, m):
    assert av_axiom_check(JetModule(builtin_rep("rho", m), Rx), samples=3, seed=seed).passed


@pytest.mark.parametrize("name, expected", [("rho(0)", 3), ("sigma(1)", 4), ("weight(2)", 2), ("weight(-1)", 2)])
def test_jet_module_differentiability(name, expected):
    # jet modules are never D-modules, even over the trace twist
    N, verdicts = minimal_differentiable_order(JetModule(builtin_rep(name), Rx), 1, expected + 1,
                                               samples=4, cutoff=3)
    assert N == expected and verdicts[1] is False


# -- Rudakov and delta modules --------------------------------------------------

def test_delta_module_relations():
    d = DeltaElement.basis(1, 1, (1,), 0)
    assert delta_module_act(ORIGIN, x, d) == DeltaElement.basis(1, 1, (0,), 0).scale(-1)
    assert delta_module_act(ORIGIN, x ** 2, DeltaElement.basis(1, 1, (2,), 0)) == \
        DeltaElement.basis(1, 1, (0,), 0).scale(2)


def test_delta_module_is_a_d_module():
    assert differentiability_check(DeltaModule(ORIGIN), 1, samples=5, cutoff=3).passed


def test_rudakov_bottom_action():
    rep = builtin_rep("rho(1)")
    e2 = RudakovElement.basis(1, 2, (0,), 1)
    assert rudakov_act(rep, ORIGIN, VectorField.partial(Rx, 0, x ** 2), e2) == RudakovElement.basis(1, 2, (0,), 0)
    assert rudakov_act(rep, ORIGIN, VectorField.partial(Rx, 0, x), e2) == e2
    assert rudakov_act(rep, ORIGIN, x + 3, e2) == e2.scale(3)


def test_rudakov_function_moves_derivatives_down():
    # x (d (x) w) = -(1 (x) w)
    rep = builtin_rep("weight(0)")
    m = RudakovElement.basis(1, 1, (1,), 0)
    assert rudakov_act(rep, ORIGIN, x, m) == RudakovElement.basis(1, 1, (0,), 0).scale(-1)


def test_localize_at_shifted_point():
    P = Point(LINE, (2,))
    field = VectorField.partial(Rx, 0, (x - 2) ** 2)
    assert localize_at_point(field, P, 3) == JetDerivation.from_terms(localize_at_point(field, P, 3).ring, 1, 3,
                                                                      {((2,), 0): 1})


def test_localize_bracket_report():
    assert localize_check(Point(LINE, (Fraction(1, 2),)), 4, samples=5).passed


@pytest.mark.parametrize("name, expected", [
    ("rho(0)", 3), ("sigma(1)", 4), ("weight(2)", 2), ("K_tr", 2), ("weight(-1)", 1),
])
def test_minimal_differentiability_orders(name, expected):
    rep = builtin_rep(name)
    report = rudakov_differentiability_check(rep, ORIGIN, samples=4, cutoff=4)
    assert report.passed
    assert report.info["minimal_N"] == expected
    assert report.info["N=1"] is is_trace_twist(rep)


def test_minimal_order_search_helper():
    module = RudakovModule(builtin_rep("rho(0)"), ORIGIN)
    N, verdicts = minimal_differentiable_order(module, 1, 4, samples=3, cutoff=3)
    assert N == 3 and verdicts[1] is False


def test_trace_twist_detection():
    assert is_trace_twist(builtin_rep("weight(-1)"))
    assert not is_trace_twist(builtin_rep("K_tr"))


@pytest.mark.parametrize("name", ["weight(3)", "weight(-1)", "rho(0)", "sigma(2)"])
def test_realization(name):
    rep = builtin_rep(name)
    assert rudakov_realization_check(rep, ORIGIN, cutoff=3, samples=3).passed
    assert not rudakov_realization_check(rep, ORIGIN, cutoff=3, samples=1, twist=False).passed


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_rudakov_module_axioms(seed):
    module = RudakovModule(builtin_rep("sigma(0)"), ORIGIN)
    assert av_axiom_check(module, samples=3, seed=seed, cutoff=3).passed
