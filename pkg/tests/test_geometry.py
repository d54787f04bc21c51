"""Charts, transitions and the transformation laws of jets."""
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avjets.algebra import QQ, Poly, TruncSeries
from avjets.errors import DenominatorVanishes, NonzeroConstantTerm, NotInLplus
from avjets.expr import parse_function
from avjets.geometry import (
    Chart,
    Point,
    charged_compat_check,
    compose_transitions,
    jet_cocycle,
    make_transition,
    mobius_transition,
    p1_atlas,
    p1_laws_check,
    p1_transition,
    pull_derivation,
    transform_derivation,
    transform_partial,
    transition_check,
    transition_jet,
    transition_validate,
    triple_cocycle_check,
)
from avjets.jets import JetAutomorphism, JetDerivation, aut_conjugate_derivation, random_derivation

T = p1_transition()
seeds = st.integers(0, 10 ** 6)


def d1(order, coeffs, ring=QQ):
    return JetDerivation.from_terms(ring, 1, order, {((k,), 0): c for k, c in coeffs.items()})


def test_p1_transition_jet():
    # x = -1/y:  phi_G(Y) = -1/(y+Y) + 1/y = sum_k (-1)^(k+1) y^-(k+1) Y^k
    y = T.source_overlap.var(0)
    yi = y.inverse()
    F = transition_jet(T, 4)
    expected = TruncSeries(T.source_overlap, 1, 4, {(k,): (-1) ** (k + 1) * yi ** (k + 1) for k in range(1, 5)})
    assert F.images[0] == expected


def test_p1_laws():
    y = T.source_overlap.var(0)
    yi = y.inverse()
    R = T.source_overlap
    assert transform_derivation(T, d1(5, {1: 1})) == d1(5, {1: 1, 2: yi}, R)
    assert transform_derivation(T, d1(5, {2: 1})) == d1(5, {2: yi ** 2}, R)
    assert transform_derivation(T, d1(5, {3: 1})).truncate(3) == d1(3, {3: yi ** 4}, R)
    partial = transform_partial(T, 0, 4)
    assert str(partial) == "(y^2)*d/dy + (2*y*Y + Y^2)*d/dY"
    assert p1_laws_check(6).passed


def test_transform_is_adjoint_of_transition_jet():
    rng = random.Random(11)
    d = random_derivation(rng, QQ, 1, 5)
    phi_G = transition_jet(T, 5)
    assert transform_derivation(T, d) == aut_conjugate_derivation(phi_G, pull_derivation(T, d))


def test_cocycle_at_order_six():
    back = jet_cocycle(T.inverse(), T, 6)
    assert back == JetAutomorphism.identity(T.source_overlap, 1, 6)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_charged_compat_vanishes(k):
    g = TruncSeries.monomial(QQ, 1, 6, (k,))
    report = charged_compat_check(T, g, 0, 6)
    assert report.passed and report.checked == 1


def test_charged_compat_rejects_constant():
    with pytest.raises(NonzeroConstantTerm):
        charged_compat_check(T, TruncSeries.one(QQ, 1, 4), 0, 4)


def test_transform_rejects_non_lplus():
    with pytest.raises(NotInLplus):
        transform_derivation(T, d1(4, {0: 1}))


def test_point_on_pole_rejected():
    chart = Chart("V", ("y",), (Poly.var(1, 0),))
    with pytest.raises(DenominatorVanishes):
        Point(chart, (0,))


def test_atlas_lookup_both_directions():
    atlas = p1_atlas()
    assert atlas.transition("U1", "U0") is atlas.transitions[0]
    assert atlas.transition("U0", "U1").source.name == "U0"
    with pytest.raises(KeyError):
        atlas.transition("U0", "U2")


def test_broken_transition_fails_validation():
    good = p1_transition()
    bad = type(good)(good.source, good.target, good.G, (good.target_overlap.var(0),),
                     good.source_overlap, good.target_overlap, "bad")
    assert not transition_validate(bad).passed


def line_transition(src, tgt, G, H, src_dens=(), tgt_dens=()):
    """One-dimensional transition src -> tgt given by expressions tgt = G(src), src = H(tgt)."""
    a, b = Chart(src, (src,)), Chart(tgt, (tgt,))
    ra = a.ring.with_denominators([parse_function(d, a.ring).num for d in src_dens])
    rb = b.ring.with_denominators([parse_function(d, b.ring).num for d in tgt_dens])
    return make_transition(a, b, [parse_function(G, ra)], [parse_function(H, rb)],
                           ra.denominators, rb.denominators, f"{src}->{tgt}")


def test_triple_cocycle_through_a_pole():
    # u -> v = u + 1 -> w = -1/v; the composite lives where u + 1 is invertible
    t_ab = line_transition("u", "v", "u + 1", "v - 1")
    t_bc = line_transition("v", "w", "-1/v", "-1/w", ["v"], ["w"])
    t_ac = compose_transitions(t_bc, t_ab, "u->w")
    u = t_ac.source_overlap.var(0)
    assert t_ac.G[0] == -(u + 1).inverse()
    assert transition_validate(t_ac).passed
    assert triple_cocycle_check(t_ab, t_bc, t_ac, 5).passed


def test_triple_cocycle_detects_wrong_composite():
    t_ab = line_transition("u", "v", "u + 1", "v - 1")
    t_bc = line_transition("v", "w", "-1/v", "-1/w", ["v"], ["w"])
    wrong = line_transition("u", "w", "1/(u + 1)", "1/w - 1", ["u + 1"], ["w"])
    assert not triple_cocycle_check(t_ab, t_bc, wrong, 4).passed


def test_transition_report_p1():
    report = transition_check(T, 4, samples=3)
    assert report.passed


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_transform_preserves_brackets(seed):
    rng = random.Random(seed)
    a, b = (random_derivation(rng, QQ, 1, 5) for _ in range(2))
    assert transform_derivation(T, a.bracket(b)) == transform_derivation(T, a).bracket(transform_derivation(T, b))


@settings(max_examples=15, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_mobius_transitions_validate(a, b, c, d):
    if a * d - b * c == 0:
        return
    assert transition_validate(mobius_transition(a, b, c, d)).passed
