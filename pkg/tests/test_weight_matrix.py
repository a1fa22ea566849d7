import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultraspace.core import Verdict
from ultraspace.weight_func import gevrey, log_power, matrix_from_weight
from ultraspace.weight_matrix import (HypothesisError, WeightMatrix, check_matrix_condition, constant_matrix,
                                      derivation_chain, hermite_membership_test, matrix_from_tables,
                                      polynomial_absorption, quotient_profile)
from ultraspace.weight_seq import (associated_function, exp_poly, factorial_power, from_order_table, ones)


@pytest.fixture(scope="module")
def gev():
    return matrix_from_weight(gevrey(2))


@pytest.fixture(scope="module")
def ep3():
    return constant_matrix(exp_poly([(3, 1.0)]))


def test_constructor_rejects_non_monotone_family():
    with pytest.raises(ValueError, match="monotone"):
        WeightMatrix(1, lambda lam: factorial_power(1.0 / lam), [1.0, 2.0])


def test_constructor_rejects_unnormalized_member():
    bad = from_order_table([0.5, 1.0, 2.0])
    with pytest.raises(ValueError, match="normalized"):
        constant_matrix(bad)


def test_constructor_rejects_empty_grid():
    with pytest.raises(ValueError):
        constant_matrix(factorial_power(1), [])


def test_grid_only_family_refuses_off_grid_lambda():
    M = matrix_from_tables({1.0: factorial_power(1)}, 1)
    with pytest.raises(KeyError):
        M.sequence(2.0)


@pytest.mark.parametrize("cond", ["product_roumieu", "product_beurling"])
def test_product_conditions_exact_witness(gev, cond):
    rep = check_matrix_condition(gev, cond)
    assert rep.verdict == Verdict.VERIFIED
    for sub in rep.sub_reports:
        assert sub.witnesses["A"] == 1.0


@pytest.mark.parametrize("cond", ["derivation_roumieu", "derivation_beurling", "mg_roumieu", "mg_beurling"])
def test_gevrey_matrix_conditions(gev, cond):
    assert check_matrix_condition(gev, cond).verdict == Verdict.VERIFIED


def test_exp_p3_derivation_violated(ep3):
    rep = check_matrix_condition(ep3, "derivation_beurling")
    assert rep.verdict == Verdict.VIOLATED
    assert rep.counterexample is not None


def test_unknown_condition(gev):
    with pytest.raises(ValueError):
        check_matrix_condition(gev, "nope")


def test_derivation_witness_replays(gev):
    # M^(kappa)_{p+1} <= A^{p+1} M^(lam)_p with the reported witnesses, at every tested p
    rep = check_matrix_condition(gev, "derivation_beurling", lambdas=[1.0])
    w = rep.sub_reports[0].witnesses
    kap, A = w["kappa"], w["A"]
    P = rep.sub_reports[0].tested_range["max_order"]
    lk = gev.sequence(kap).log_orders(P + 1)
    ll = gev.sequence(1.0).log_orders(P + 1)
    p = np.arange(P + 1)
    rhs = (p + 1) * math.log(A) + ll[: P + 1]
    assert np.all(lk[1: P + 2] <= rhs + 1e-9 * np.maximum(1.0, np.abs(rhs)))


def test_polynomial_absorption_with_N(gev):
    rep = polynomial_absorption(gev, "beurling", N=3)
    assert rep.verdict == Verdict.VERIFIED
    w = rep.sub_reports[0].witnesses
    kap, A, B = w["kappa"], w["A"], w["B"]
    # N log t + omega_{M^(1)}(t) <= log B + omega_{M^(kappa)}(A t) re-evaluated on a log grid
    for t in np.geomspace(1e-2, 1e4, 60):
        lhs = 3 * math.log(t) + associated_function(gev.sequence(1.0), [t])
        rhs = math.log(B) + associated_function(gev.sequence(kap), [A * t])
        assert lhs <= rhs + 1e-9 * max(1.0, abs(rhs))


def test_polynomial_absorption_at_zero_is_normalization(gev):
    rep = polynomial_absorption(gev, "roumieu", N=None)
    w = rep.sub_reports[0].witnesses
    assert w["B1"] >= 1.0


def test_absorption_reports_missing_derivation(ep3):
    rep = polynomial_absorption(ep3, "beurling", N=3)
    assert rep.verdict == Verdict.INCONCLUSIVE
    assert "derivation_beurling" in rep.sub_reports[0].details["reason"]


def test_derivation_chain(gev):
    ch = derivation_chain(gev, "beurling", 1.0, 4)
    assert ch.kappa <= 1.0 and ch.A >= 1.0
    with pytest.raises(HypothesisError):
        derivation_chain(constant_matrix(exp_poly([(3, 1.0)])), "beurling", 1.0, 2)


@pytest.mark.parametrize("weight, roumieu, beurling", [
    (gevrey(2), Verdict.VERIFIED, Verdict.VERIFIED),
    (log_power(2), Verdict.VERIFIED, Verdict.VERIFIED),
    (gevrey(0.5), Verdict.VERIFIED, Verdict.VIOLATED),
])
def test_membership_dichotomy(weight, roumieu, beurling):
    M = matrix_from_weight(weight)
    assert hermite_membership_test(M, "roumieu").verdict == roumieu
    assert hermite_membership_test(M, "beurling").verdict == beurling


def test_membership_all_ones():
    M = constant_matrix(ones())
    assert hermite_membership_test(M, "roumieu").verdict == Verdict.VIOLATED
    assert hermite_membership_test(M, "beurling").verdict == Verdict.VIOLATED


def test_quotient_profile(gev, ep3):
    assert quotient_profile(gev).report.verdict == Verdict.VERIFIED
    assert quotient_profile(ep3).report.verdict == Verdict.VERIFIED
    tabs = {1.0: from_order_table([0, 1, 1.5, 1.8]), 2.0: from_order_table([0, 1.2, 2.0, 2.2])}
    rep = quotient_profile(matrix_from_tables(tabs, 1), 3).report
    assert rep.verdict == Verdict.VIOLATED
    assert rep.counterexample["p"] == 3
    with pytest.raises(ValueError):
        quotient_profile(matrix_from_weight(gevrey(2), d=2))


def test_constant_matrix_single_grid_collapses():
    M = constant_matrix(factorial_power(1))
    assert M.lambda_grid.tolist() == [1.0]
    assert check_matrix_condition(M, "derivation_beurling").verdict == Verdict.VERIFIED


@given(st.sampled_from([0.25, 0.5, 1.0, 2.0]), st.sampled_from([0.25, 0.5, 1.0, 2.0]), st.integers(0, 60))
def test_monotone_in_lambda(a, b, p):
    M = matrix_from_weight(gevrey(2))
    lo, hi = sorted((a, b))
    assert M.log_m(lo, (p,)) <= M.log_m(hi, (p,)) + 1e-9
