"""The smash product A#V, jets of vector fields and the maps between them."""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avjets.algebra import taylor_shift
from avjets.errors import MixedContext
from avjets.jets import JetDerivation
from avjets.smash import (
    JetVF,
    SmashTerm,
    VectorField,
    anchor,
    chart_ring,
    delta,
    diff_element,
    iso_check,
    jet_bracket,
    phi,
    psi,
    random_jet_vf,
    random_smash,
    smash_bracket,
)

seeds = st.integers(0, 10 ** 6)
A1 = chart_ring(1)
A2 = chart_ring(2)


def jvf(A, order, terms):
    return JetVF.from_terms(A, order, terms)


def test_phi_of_x_squared_field():
    x = A1.var(0)
    u = SmashTerm.pair(1, VectorField.partial(A1, 0, x ** 2))
    expected = JetVF(VectorField.partial(A1, 0, x ** 2),
                     JetDerivation.from_terms(A1, 1, 3, {((1,), 0): x * 2, ((2,), 0): 1}))
    assert phi(u, 3) == expected


def test_psi_of_euler_field():
    # X d/dX  ->  (1 (x) x - x (x) 1) d/dx
    v = jvf(A1, 3, {((1,), 0): 1})
    u = psi(v)
    assert anchor(u) == VectorField.zero(A1)
    assert phi(u, 3) == v


def test_commutation_rule_in_smash():
    # [1 # d, x # d] = 1 # d
    x = A1.var(0)
    d = VectorField.partial(A1, 0)
    assert smash_bracket(SmashTerm.pair(1, d), SmashTerm.pair(x, d)) == SmashTerm.pair(1, d)


def test_delta_is_shift_minus_value():
    x = A1.var(0)
    assert str(delta(x ** 2, 3)) == "2*x*X + X^2"


def test_differentiability_element_is_delta_power():
    # f = x, eta = d/dx, N = 2: the anchor cancels and the virtual part is X^2 d/dX
    x = A1.var(0)
    out = diff_element(x, VectorField.partial(A1, 0), 2, 4)
    assert out == jvf(A1, 4, {((2,), 0): 1})


def test_differentiability_element_general_shape():
    # virtual part is delta(f)^N * eta(x + X)
    x = A1.var(0)
    f, g = x ** 2 + x, x ** 3
    N, order = 2, 5
    out = diff_element(f, VectorField.partial(A1, 0, g), N, order)
    expected = (delta(f, order) ** N) * taylor_shift(g, order)
    assert not out.anchor
    assert out.virtual.components[0] == expected


def test_mixed_charts_rejected():
    with pytest.raises(MixedContext):
        SmashTerm.zero(A1) + SmashTerm.zero(A2)


@pytest.mark.parametrize("n", [1, 2])
def test_iso_report_small(n):
    report = iso_check(n, 3, samples=4)
    assert report.passed and report.checked > 0


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from([A1, A2]))
def test_phi_is_a_lie_homomorphism(seed, A):
    rng = random.Random(seed)
    u, v = random_smash(rng, A, 3), random_smash(rng, A, 3)
    assert phi(smash_bracket(u, v), 3) == jet_bracket(phi(u, 3), phi(v, 3))


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from([A1, A2]))
def test_phi_psi_is_identity(seed, A):
    v = random_jet_vf(random.Random(seed), A, 3, 3)
    assert phi(psi(v), 3) == v


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_psi_phi_is_identity_modulo_high_order(seed):
    u = random_smash(random.Random(seed), A1, 3)
    assert phi(psi(phi(u, 4)), 4) == phi(u, 4)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_anchor_commutes_with_phi(seed):
    u = random_smash(random.Random(seed), A2, 3)
    assert anchor(phi(u, 2)) == anchor(u)
