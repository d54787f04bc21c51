"""Derivations and automorphisms of truncated power series."""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avjets.algebra import QQ, TruncSeries, laurent_ring
from avjets.algebra import linalg
from avjets.errors import NonInvertibleLinearPart, NotProNilpotent, NotUnipotent, OutOfOrder
from avjets.jets import (
    JetAutomorphism,
    JetDerivation,
    apply_derivation,
    aut_compose,
    aut_conjugate_derivation,
    aut_exp,
    aut_invert,
    aut_log,
    aut_to_operator,
    coefficient,
    coproduct_suite,
    displayed_second_order,
    exp_closed_form_check,
    faa_di_bruno,
    group_law_check,
    lie_bracket,
    random_automorphism,
    random_derivation,
    set_partitions,
)

seeds = st.integers(0, 10 ** 6)


def one_var(order, coeffs):
    return TruncSeries(QQ, 1, order, {(k,): c for k, c in coeffs.items()})


def deriv(order, coeffs):
    return JetDerivation([one_var(order, coeffs)])


# -- oracle examples ----------------------------------------------------------

@pytest.mark.parametrize("alpha", [1, -2, Fraction(3, 5)])
def test_exp_of_x_squared_is_mobius(alpha):
    N = 10
    F = aut_exp(deriv(N, {2: alpha}))
    assert F.images[0] == one_var(N, {k: Fraction(alpha) ** (k - 1) for k in range(1, N + 1)})


def test_log_of_x_plus_x_squared():
    F = JetAutomorphism([one_var(4, {1: 1, 2: 1})])
    assert aut_log(F) == deriv(4, {2: 1, 3: -1, 4: Fraction(3, 2)})


def test_invert_x_plus_x_squared_is_catalan():
    # X + X^2 has inverse sum (-1)^(k-1) C_(k-1) X^k
    F = JetAutomorphism([one_var(6, {1: 1, 2: 1})])
    catalan = [1, 1, 2, 5, 14, 42]
    expected = one_var(6, {k: (-1) ** (k - 1) * catalan[k - 1] for k in range(1, 7)})
    assert aut_invert(F).images[0] == expected


def test_bracket_of_monomial_fields():
    # [X^a d, X^b d] = (b - a) X^(a+b-1) d
    assert lie_bracket(deriv(6, {2: 1}), deriv(6, {3: 1})) == deriv(6, {4: 1})


def test_ad_is_conjugation_of_operators():
    # Ad(F) d = op(F) D op(F)^-1 on the truncated monomial basis
    rng = random.Random(3)
    F = random_automorphism(rng, QQ, 1, 4)
    d = random_derivation(rng, QQ, 1, 4, 2)
    D = aut_to_operator(aut_exp(d))
    op = aut_to_operator(F)
    lhs = aut_to_operator(aut_exp(aut_conjugate_derivation(F, d)))
    rhs = linalg.matmul(linalg.matmul(op, D), linalg.inverse(op))
    assert linalg.equal(lhs, rhs)


def test_ad_of_scaling_on_x_squared():
    # F = aX:  Ad(F)(X^2 d/dX) = a X^2 d/dX with the op-conjugation orientation
    a = Fraction(3)
    F = JetAutomorphism([one_var(5, {1: a})])
    assert aut_conjugate_derivation(F, deriv(5, {2: 1})) == deriv(5, {2: a})


def test_one_variable_chain_rule():
    # (f o g)'' = f''(g')^2 + f' g''
    F = JetAutomorphism([one_var(4, {1: 2, 2: 3, 3: -1})])
    G = JetAutomorphism([one_var(4, {1: -1, 2: 5, 4: 1})])
    f1, f2 = coefficient(F, 0, (1,)), coefficient(F, 0, (2,))
    g1, g2 = coefficient(G, 0, (1,)), coefficient(G, 0, (2,))
    assert coefficient(aut_compose(F, G), 0, (2,)) == f2 * g1 ** 2 + f1 * g2
    assert faa_di_bruno(0, (2,), F, G) == f2 * g1 ** 2 + f1 * g2


def test_set_partitions_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(k))) for k in range(6)] == [1, 1, 2, 5, 15, 52]


def test_displayed_second_order_rejects_other_shapes():
    F = JetAutomorphism.identity(QQ, 1, 3)
    with pytest.raises(OutOfOrder):
        displayed_second_order(F, F, 0, (2,))


def test_exp_requires_m_squared():
    with pytest.raises(NotProNilpotent):
        aut_exp(deriv(4, {1: 1}))


def test_log_requires_unipotent():
    with pytest.raises(NotUnipotent):
        aut_log(JetAutomorphism([one_var(4, {1: 2})]))


def test_singular_linear_part_rejected():
    with pytest.raises(NonInvertibleLinearPart):
        JetAutomorphism([one_var(4, {2: 1})])


def test_coefficient_out_of_order():
    with pytest.raises(OutOfOrder):
        coefficient(JetAutomorphism.identity(QQ, 1, 3), 0, (4,))


def test_exp_closed_form_report():
    assert exp_closed_form_check().passed


def test_group_laws_report_small():
    assert group_law_check(1, 4, samples=5).passed
    assert group_law_check(2, 3, samples=3).passed


def test_coproduct_suite_small():
    report = coproduct_suite(2, 3, samples=3)
    assert report.passed and report.checked > 0


# -- properties ---------------------------------------------------------------

@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 2))
def test_log_exp_roundtrip(seed, n):
    d = random_derivation(random.Random(seed), QQ, n, 5 if n == 1 else 4, 2)
    assert aut_log(aut_exp(d)) == d


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 2))
def test_invert_is_two_sided(seed, n):
    F = random_automorphism(random.Random(seed), QQ, n, 4)
    ident = JetAutomorphism.identity(QQ, n, 4)
    assert aut_compose(F, aut_invert(F)) == ident
    assert aut_compose(aut_invert(F), F) == ident


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_operator_reverses_composition(seed):
    rng = random.Random(seed)
    F, G = (random_automorphism(rng, QQ, 2, 3) for _ in range(2))
    assert linalg.equal(aut_to_operator(aut_compose(F, G)),
                        linalg.matmul(aut_to_operator(G), aut_to_operator(F)))


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_exp_is_the_flow_on_functions(seed):
    # g o exp(d) = sum_k D^k g / k!
    rng = random.Random(seed)
    d = random_derivation(rng, QQ, 1, 6, 2)
    g = TruncSeries(QQ, 1, 6, {(k,): rng.randint(-3, 3) for k in range(7)})
    expected, term = g, g
    for k in range(1, 7):
        term = apply_derivation(d, term).scale(Fraction(1, k))
        expected = expected + term
    assert g.compose(aut_exp(d).images) == expected


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_faa_di_bruno_two_variables(seed):
    rng = random.Random(seed)
    F, G = (random_automorphism(rng, QQ, 2, 3) for _ in range(2))
    FG = aut_compose(F, G)
    for s in [(1, 0), (2, 0), (1, 1), (0, 2), (2, 1)]:
        for i in range(2):
            assert coefficient(FG, i, s) == faa_di_bruno(i, s, F, G)
            if sum(s) == 2:
                assert displayed_second_order(F, G, i, s) == coefficient(FG, i, s)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_conjugation_over_laurent_coefficients(seed):
    R = laurent_ring("y")
    rng = random.Random(seed)
    F = random_automorphism(rng, R, 1, 4, spread=1)
    d1, d2 = (random_derivation(rng, R, 1, 4, spread=1) for _ in range(2))
    assert aut_conjugate_derivation(F, lie_bracket(d1, d2)) == lie_bracket(
        aut_conjugate_derivation(F, d1), aut_conjugate_derivation(F, d2))
