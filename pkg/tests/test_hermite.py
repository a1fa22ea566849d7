import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultraspace.core import Verdict, enumerate_indices
from ultraspace.hermite import (A_minus, A_plus, HermiteExpansion, RationalExpansion, apply_monomial_derivative,
                                apply_power, check_lowering_identity, commutator_defect, diff, gauss_hermite_quadrature,
                                gram_matrix, hermite_eval, hermite_table, l2_weight_constant,
                                lowering_coefficient_squared, monomial_bound_log, mult_x, normal_order_A_plus,
                                random_expansion, random_rational_expansion, seminorm, seminorm_bound_box,
                                seminorm_equivalence_check, sup_norm, verify_normal_ordering, verify_seminorm_bound)
from ultraspace.weight_func import gevrey, matrix_from_weight
from ultraspace.weight_seq import factorial_power

PI_QUARTER = math.pi ** -0.25
# (int_R (1 + x^2)^-2 dx)^(1/2) = sqrt(pi/2), mpmath quadrature
SOBOLEV_C1_D1 = 1.25331413731550025121


def explicit_h(n, x):
    """Normalized Hermite function from the physicists' polynomial (independent oracle, small n)."""
    from numpy.polynomial.hermite import hermval
    c = np.zeros(n + 1)
    c[n] = 1.0
    return hermval(x, c) * np.exp(-x * x / 2) / math.sqrt(2.0 ** n * math.factorial(n) * math.sqrt(math.pi))


def test_eval_examples():
    assert hermite_eval((0,), 0.0) == pytest.approx(PI_QUARTER, rel=1e-15)
    assert hermite_eval((1,), 0.0) == 0.0
    assert hermite_eval((0, 0), (0.0, 0.0)) == pytest.approx(PI_QUARTER ** 2, rel=1e-15)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 9, 14])
def test_recurrence_matches_explicit_formula(n):
    x = np.linspace(-6, 6, 101)
    np.testing.assert_allclose(hermite_table(n, x)[n], explicit_h(n, x), atol=1e-13)


def test_recurrence_is_stable_at_high_degree():
    x = np.linspace(-40, 40, 2001)
    t = hermite_table(800, x)
    assert np.all(np.isfinite(t))
    assert np.max(np.abs(t)) < 1.0


def test_quadrature_rules():
    x, w = gauss_hermite_quadrature(1)
    assert x.tolist() == [0.0] and w[0] == pytest.approx(math.sqrt(math.pi))
    x, w = gauss_hermite_quadrature(2)
    np.testing.assert_allclose(x, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-14)
    np.testing.assert_allclose(w, [math.sqrt(math.pi) / 2] * 2, rtol=1e-14)
    # x^3 + 2x^2 + 1 against e^{-x^2}: 0 + 2 * sqrt(pi)/2 + sqrt(pi)
    assert np.sum(w * (x ** 3 + 2 * x ** 2 + 1)) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-14)
    for n in (0, 513):
        with pytest.raises(ValueError):
            gauss_hermite_quadrature(n)


@given(st.integers(1, 60), st.integers(0, 10))
def test_quadrature_exact_for_monomials(n, k):
    k = min(k, 2 * n - 1)
    x, w = gauss_hermite_quadrature(n)
    exact = 0.0 if k % 2 else math.gamma((k + 1) / 2)
    assert np.sum(w * x ** k) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_orthonormality_small():
    _, G = gram_matrix(1, 10)
    np.testing.assert_allclose(G, np.eye(G.shape[0]), atol=1e-10)


def test_ladder_examples():
    H0, H1 = HermiteExpansion.basis((0,)), HermiteExpansion.basis((1,))
    assert A_minus(0, H1).allclose(HermiteExpansion.basis((0,), math.sqrt(2)))
    assert mult_x(0, H0).allclose(HermiteExpansion.basis((1,), 1 / math.sqrt(2)))
    assert A_minus(0, H0).is_zero
    assert A_plus(0, H0).allclose(HermiteExpansion.basis((1,), math.sqrt(2)))


def test_mult_x_against_quadrature():
    x = np.linspace(-8, 8, 4001)
    lhs = x * explicit_h(0, x)
    rhs = explicit_h(1, x) / math.sqrt(2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_monomial_derivative_examples():
    H1 = HermiteExpansion.basis((1,))
    assert apply_monomial_derivative(H1, (0,), (0,)).allclose(H1)
    assert apply_monomial_derivative(H1, (1,), (0,)).norm() == pytest.approx(math.sqrt(1.5), rel=1e-15)
    # differentiate first, then multiply: x d H_0 = -x^2 H_0
    H0 = HermiteExpansion.basis((0,))
    got = apply_monomial_derivative(H0, (1,), (1,))
    want = mult_x(0, diff(0, H0))
    assert got.allclose(want)


def test_lowering_identity_exact_form():
    for d in (1, 2):
        assert check_lowering_identity(d, 12, "exact").verdict == Verdict.VERIFIED
    assert lowering_coefficient_squared((2,), (3,)) == Fraction(4 * 20)


def test_lowering_with_power_weight_form_is_not_exact():
    rep = check_lowering_identity(1, 12, "stated")
    assert rep.verdict == Verdict.VIOLATED
    assert rep.counterexample["alpha"] == [1] and rep.counterexample["gamma"] == [0]


@given(st.integers(1, 2), st.integers(0, 8), st.integers(0, 2 ** 31))
def test_commutator_identity(d, degree, seed):
    f = random_rational_expansion(d, degree, seed)
    for j in range(d):
        assert commutator_defect(f, j) == RationalExpansion(d)


@given(st.integers(0, 6), st.integers(0, 2 ** 31))
def test_commutator_identity_float(degree, seed):
    f = random_expansion(1, degree, seed)
    lhs = diff(0, mult_x(0, f)) - mult_x(0, diff(0, f))
    assert lhs.allclose(f, atol=1e-12)


def test_normal_ordering_examples():
    assert normal_order_A_plus((1,)).terms == {((1,), (0,)): 1, ((0,), (1,)): -1}
    assert normal_order_A_plus((2,)).terms == {((2,), (0,)): 1, ((1,), (1,)): -2, ((0,), (2,)): 1,
                                              ((0,), (0,)): -1}
    rep = verify_normal_ordering((2,))
    assert rep.verdict == Verdict.VERIFIED
    # C_{0,0} = -1 against 3^2 (2!/0!)^{1/2} = 9 sqrt 2
    assert rep.details["min_log_margin"] <= math.log(9 * math.sqrt(2)) + 1e-12
    with pytest.raises(ValueError):
        normal_order_A_plus((11,))


@given(st.lists(st.integers(0, 5), min_size=1, max_size=2), st.integers(0, 2 ** 31))
def test_normal_ordering_application(gamma, seed):
    f = random_expansion(len(gamma), 4, seed)
    rep = verify_normal_ordering(tuple(gamma), f)
    assert rep.verdict == Verdict.VERIFIED
    assert rep.details["application_rel_error"] <= 1e-10


def test_seminorm_bound_examples():
    assert verify_seminorm_bound((0,), (0,), (5,)).witnesses["lhs"] == pytest.approx(1.0)
    rep = verify_seminorm_bound((1,), (0,), (1,))
    assert rep.verdict == Verdict.VERIFIED
    assert rep.witnesses["lhs"] == pytest.approx(math.sqrt(1.5))
    assert rep.witnesses["rhs"] == pytest.approx(2.0)
    assert verify_seminorm_bound((1, 0), (0, 1), (1, 1)).verdict == Verdict.VERIFIED


@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 6)), min_size=1, max_size=2))
def test_seminorm_bound_property(triples):
    a, b, g = zip(*triples)
    f = apply_monomial_derivative(HermiteExpansion.basis(g), a, b)
    assert math.log(f.norm()) <= monomial_bound_log(a, b, g) + 1e-12


def test_seminorm_bound_box_small():
    rep = seminorm_bound_box(1, 10)
    assert rep.verdict == Verdict.VERIFIED


@given(st.integers(1, 2), st.integers(0, 8), st.integers(0, 2 ** 31))
def test_parseval(d, degree, seed):
    f = random_expansion(d, degree, seed)
    assert f.quadrature_norm() == pytest.approx(f.norm(), rel=1e-9)


@given(st.integers(0, 6), st.integers(0, 2 ** 31))
def test_ladder_grows_degree_by_one(degree, seed):
    f = random_expansion(1, degree, seed)
    for op in (mult_x, diff, A_plus, A_minus):
        assert op(0, f).max_degree <= degree + 1


def test_apply_power_matches_repeated_steps():
    f = random_expansion(2, 3, 7)
    g = f
    for _ in range(2):
        g = A_plus(1, g)
    g = A_plus(0, g)
    assert apply_power("A_plus", (1, 2), f).allclose(g)


def test_sup_norm_of_ground_state():
    val, _ = sup_norm(HermiteExpansion.basis((0,)))
    assert val == pytest.approx(PI_QUARTER, rel=1e-6)


def test_seminorm_examples():
    H0 = HermiteExpansion.basis((0,))
    r = seminorm(H0, factorial_power(1), 1.0)
    assert r.value == pytest.approx(1.0) and r.argmax == ((0,), (0,))
    r = seminorm(H0, factorial_power(2), 1.0)
    assert r.certified and r.value == pytest.approx(1.0)
    r = seminorm(H0, factorial_power(1), 1.0, "SUP")
    assert r.value == pytest.approx(PI_QUARTER, rel=1e-6)
    # with tiny h the weights 0.01^{-p}/p! keep growing past any cap: no certificate
    assert not seminorm(H0, factorial_power(1), 0.01).certified


def test_seminorm_zero_function():
    r = seminorm(HermiteExpansion.zero(1), factorial_power(1), 1.0)
    assert r.log_value == -math.inf


@given(st.integers(0, 6), st.integers(0, 2 ** 31))
def test_absolute_seminorm_dominates(degree, seed):
    f = random_expansion(1, degree, seed)
    M = factorial_power(2)
    plain = seminorm(f, M, 1.0)
    absolute = seminorm(f, M, 1.0, absolute=True)
    assert plain.log_value <= absolute.log_value + 1e-12


def test_sobolev_constant():
    assert l2_weight_constant(1) == pytest.approx(SOBOLEV_C1_D1, rel=1e-12)


@pytest.fixture(scope="module")
def gev():
    return matrix_from_weight(gevrey(2))


@pytest.mark.parametrize("kind", ["roumieu", "beurling"])
def test_seminorm_equivalence_ground_state(gev, kind):
    rep = seminorm_equivalence_check(HermiteExpansion.basis((0,)), gev, kind)
    assert rep.verdict == Verdict.VERIFIED
    assert rep.witnesses["min_log_margin"] > 0


def test_seminorm_equivalence_zero(gev):
    rep = seminorm_equivalence_check(HermiteExpansion.zero(1), gev, "roumieu")
    assert rep.verdict == Verdict.VERIFIED


def test_seminorm_equivalence_random_degree_six(gev):
    f = random_expansion(1, 6, 3)
    rep = seminorm_equivalence_check(f, gev, "roumieu", directions=["sup_by_l2"])
    assert rep.verdict == Verdict.VERIFIED
    for sub in rep.sub_reports:
        w, rng = sub.witnesses, sub.tested_range
        assert rng["left"]["h"] == pytest.approx(2 * w["A_lambda"] * w["H"] * rng["h"])
