"""Representations of L_+ and their integration to the jet group."""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avjets.algebra import QQ, laurent_ring
from avjets.algebra import linalg
from avjets.errors import MixedContext, OutOfOrder, UnknownName
from avjets.jets import JetAutomorphism, aut_compose, random_automorphism
from avjets.repn import (
    builtin_rep,
    make_rep,
    monomial_label,
    rep_coherence_check,
    rep_dual,
    rep_integrate,
    rep_tensor,
    rep_validate,
    rho_closed_form,
    series_aut,
    sigma_closed_form,
)

nonzero = st.builds(Fraction, st.integers(-6, 6).filter(bool), st.integers(1, 4))
rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))
weights = st.integers(-3, 3)


def test_builtin_names():
    assert builtin_rep("rho(1)").name == "rho(1)"
    assert builtin_rep("sigma", -2).nilpotency_order == 3
    assert builtin_rep("K_tr", n=2).weights == ((1, 1),)
    assert builtin_rep("trivial").nilpotency_order == 0
    with pytest.raises(UnknownName):
        builtin_rep("tau(1)")
    with pytest.raises(UnknownName):
        builtin_rep("rho(1/2)")


def test_monomial_label():
    assert monomial_label((2,), 0) == "X^2 d/dX"
    assert monomial_label((1, 1), 1) == "X1*X2 d/dX2"


@pytest.mark.parametrize("name", ["rho(0)", "rho(-2)", "sigma(3)", "K_tr", "weight(4)", "trivial"])
def test_builtins_validate(name):
    assert rep_validate(builtin_rep(name)).passed


def test_broken_bracket_is_caught():
    # [X d, X^3 d] = 2 X^3 d, but these matrices give only one copy
    bad = make_rep(1, 2, {((1,), 0): [[1, 0], [0, 0]], ((3,), 0): [[0, 1], [0, 0]]})
    assert not rep_validate(bad).passed


def test_make_rep_reads_weights():
    r = make_rep(1, 2, {((1,), 0): [[3, 0], [0, 1]], ((2,), 0): [[0, 1], [0, 0]]})
    assert r.weights == ((3,), (1,)) and r.nilpotency_order == 2


def test_generator_shape_checked():
    with pytest.raises(MixedContext):
        make_rep(1, 2, {((1,), 0): [[1]]})


def test_integrate_needs_enough_order():
    with pytest.raises(OutOfOrder):
        rep_integrate(builtin_rep("sigma(0)"), JetAutomorphism.identity(QQ, 1, 2))


def test_weight_is_a_power_of_the_jacobian():
    F = series_aut(QQ, 3, [Fraction(2), 5, -1])
    assert rep_integrate(builtin_rep("weight(3)"), F) == ((8,),)
    assert rep_integrate(builtin_rep("K_tr"), F) == ((2,),)


@settings(max_examples=40, deadline=None)
@given(weights, nonzero, rationals)
def test_rho_closed_form(m, a, b):
    F = series_aut(QQ, 2, [a, b])
    assert linalg.equal(rep_integrate(builtin_rep("rho", m), F), rho_closed_form(m, a, b))


@settings(max_examples=40, deadline=None)
@given(weights, nonzero, rationals, rationals)
def test_sigma_closed_form(m, a, b, c):
    F = series_aut(QQ, 3, [a, b, c])
    assert linalg.equal(rep_integrate(builtin_rep("sigma", m), F), sigma_closed_form(m, a, b, c))


def test_closed_form_over_laurent_ring():
    R = laurent_ring("y")
    y = R.var(0)
    a, b = y.inverse() ** 2, y.inverse() ** 3
    F = series_aut(R, 2, [a, b])
    assert linalg.equal(rep_integrate(builtin_rep("rho(2)"), F), rho_closed_form(2, a, b, R))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["rho(1)", "sigma(-1)", "weight(2)", "K_tr"]))
def test_integration_reverses_composition(seed, name):
    r = builtin_rep(name)
    rng = random.Random(seed)
    F, G = (random_automorphism(rng, QQ, 1, 4) for _ in range(2))
    assert linalg.equal(rep_integrate(r, aut_compose(F, G)),
                        linalg.matmul(rep_integrate(r, G), rep_integrate(r, F)))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_tensor_and_dual_integrate_consistently(seed):
    r1, r2 = builtin_rep("rho(1)"), builtin_rep("sigma(0)")
    F = random_automorphism(random.Random(seed), QQ, 1, 4)
    assert linalg.equal(rep_integrate(rep_tensor(r1, r2), F),
                        linalg.kron(rep_integrate(r1, F), rep_integrate(r2, F)))
    assert linalg.equal(rep_integrate(rep_dual(r1), F),
                        linalg.transpose(linalg.inverse(rep_integrate(r1, F))))


def test_coherence_report_n2():
    assert rep_coherence_check(builtin_rep("K_tr", n=2), samples=5).passed


def test_coherence_report_catches_broken_rep():
    bad = make_rep(1, 2, {((1,), 0): [[1, 0], [0, 0]], ((3,), 0): [[0, 1], [0, 0]]})
    assert not rep_coherence_check(bad, samples=5).passed
