import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gammaln

from ultraspace.core import Verdict
from ultraspace.weight_seq import (WeightSequence, associated_function, associated_function_detail, check_condition,
                                   check_mixed_condition, check_shift_equivalence, counting_function, exp_poly,
                                   factorial_power, from_index_table, from_order_table, omega_many, omega_via_integral,
                                   ones, quotients, sequence_from_association, verify_lower_bound)

# brute-force sup_p (p log t - log p!) with mpmath, p < 200
OMEGA_FACTORIAL_AT_E = 1.30685281944005469058
OMEGA_FACTORIAL_AT_10 = 7.92143835686494154495


def brute_omega(log_m, t, P=4000):
    p = np.arange(P + 1)
    return float(np.max(p * math.log(t) - log_m(p))) if t > 0 else 0.0


def test_omega_examples():
    assert associated_function(factorial_power(1), [0.0]) == 0.0
    assert associated_function(factorial_power(1), [math.e]) == pytest.approx(OMEGA_FACTORIAL_AT_E, rel=1e-14)
    assert associated_function(factorial_power(2), [1.0]) == 0.0
    assert associated_function(factorial_power(1), [10.0]) == pytest.approx(OMEGA_FACTORIAL_AT_10, rel=1e-14)


def test_omega_infinite_for_ones():
    assert associated_function(ones(), [2.0]) == math.inf
    assert associated_function(ones(), [0.5]) == 0.0


def test_omega_multi_index_support_set():
    M = factorial_power(1, d=2)
    # with t_2 = 0 only alpha_2 = 0 is admissible, so the value is the 1-D one
    assert associated_function(M, [math.e, 0.0]) == pytest.approx(OMEGA_FACTORIAL_AT_E, rel=1e-12)
    det = associated_function_detail(M, [math.e, 0.0])
    assert det.argmax[1] == 0


@given(st.floats(0.01, 500.0), st.floats(1.0, 3.0))
def test_omega_matches_brute_force(t, s):
    M = factorial_power(s)
    ref = brute_omega(lambda p: s * gammaln(p + 1.0), t)
    assert associated_function(M, [t]) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@given(st.floats(0.0, 1e3), st.floats(0.0, 1e3))
def test_omega_monotone_and_nonnegative(a, b):
    M = factorial_power(1.5)
    lo, hi = sorted((a, b))
    wl, wh = associated_function(M, [lo]), associated_function(M, [hi])
    assert 0.0 <= wl <= wh + 1e-12


@given(st.floats(0.1, 1e3))
def test_omega_reverses_sequence_order(t):
    # p! <= p!^2 pointwise, hence omega_{p!^2} <= omega_{p!}
    assert associated_function(factorial_power(2), [t]) <= associated_function(factorial_power(1), [t]) + 1e-12


def test_sequence_from_association_examples():
    assert sequence_from_association(factorial_power(1), 0) == 0.0
    assert sequence_from_association(factorial_power(1), 3) == pytest.approx(math.log(6), rel=1e-6)
    assert sequence_from_association(factorial_power(2), 5) == pytest.approx(2 * math.log(120), rel=1e-6)
    with pytest.raises(ValueError):
        sequence_from_association(factorial_power(1, d=2), 2)


@pytest.mark.parametrize("M", [factorial_power(1), factorial_power(2), exp_poly([(1, math.log(3.0))]) ])
def test_round_trip_property(M):
    lm = M.log_orders(30)
    for p in range(1, 31):
        got = sequence_from_association(M, p)
        assert got == pytest.approx(lm[p], rel=1e-6, abs=1e-9)


def test_condition_examples():
    M = factorial_power(1)
    assert check_condition(M, "log_convex", 50).verdict == Verdict.VERIFIED
    mg = check_condition(M, "moderate_growth")
    assert mg.verdict == Verdict.VERIFIED and mg.witnesses["A"] == 2.0
    assert check_condition(ones(), "root_divergence").verdict == Verdict.VIOLATED
    with pytest.raises(ValueError):
        check_condition(M, "no_such_condition")


def test_factorial_moderate_growth_witness_by_integer_check():
    # (p+q)! <= 2^{p+q} p! q! since binom(p+q, p) <= 2^{p+q}
    for p in range(30):
        for q in range(30):
            assert math.factorial(p + q) <= 2 ** (p + q) * math.factorial(p) * math.factorial(q)


@pytest.mark.parametrize("cid", ["supermultiplicative", "root_increasing", "root_positive", "log_convex",
                                 "derivation_closed", "almost_supermultiplicative"])
def test_gevrey_sequence_conditions(cid):
    assert check_condition(factorial_power(2), cid).verdict == Verdict.VERIFIED


def test_log_convexity_violation_has_counterexample():
    M = from_order_table([0.0, 2.0, 2.5, 6.0])
    rep = check_condition(M, "log_convex", 3)
    assert rep.verdict == Verdict.VIOLATED
    assert rep.counterexample is not None


def test_exp_p2_not_moderate_growth():
    assert check_condition(exp_poly([(2, 1.0)]), "moderate_growth").verdict == Verdict.VIOLATED


def test_shift_equivalence_examples():
    M = factorial_power(1)
    rep = check_shift_equivalence(M, M)
    assert [r.verdict for r in rep.sub_reports] == [Verdict.VERIFIED, Verdict.VERIFIED]
    assert rep.details["agreement"]
    assert check_shift_equivalence(M, factorial_power(2)).sub_reports[0].verdict == Verdict.VERIFIED
    assert check_shift_equivalence(exp_poly([(2, 1.0)]), M).sub_reports[0].verdict == Verdict.VIOLATED
    with pytest.raises(ValueError):
        check_shift_equivalence(factorial_power(1, 2), factorial_power(1, 2))


def test_lower_bound_examples():
    M = factorial_power(1)
    assert verify_lower_bound(M, (0,), 1.0, np.linspace(0, 50, 101)).verdict == Verdict.VERIFIED
    assert verify_lower_bound(M, (2,), 1.0, np.linspace(0, 50, 501)).verdict == Verdict.VERIFIED
    pts = np.random.default_rng(0).uniform(0, 20, (200, 2))
    assert verify_lower_bound(factorial_power(2, 2), (1, 1), 0.5, pts).verdict == Verdict.VERIFIED


def test_mixed_condition_examples():
    rep = check_mixed_condition(factorial_power(1), factorial_power(2))
    assert rep.verdict == Verdict.VERIFIED
    assert {"C", "H", "log_B"} <= set(rep.witnesses)
    assert check_mixed_condition(ones(), ones()).verdict == Verdict.VIOLATED


def test_counting_function_and_integral():
    M = factorial_power(1)
    for t in (1.0, 2.5, 5.5, 17.2):
        assert counting_function(M, t) == math.floor(t)
    assert counting_function(M, 0.5) == 0
    assert omega_via_integral(M, 0.5) == 0.0
    assert omega_via_integral(M, 10.0) == pytest.approx(OMEGA_FACTORIAL_AT_10, rel=1e-3)
    with pytest.raises(ValueError):
        counting_function(from_order_table([0.0, 2.0, 2.5, 6.0]), 3.0)


@given(st.floats(1.0, 1e3))
def test_integral_formula_matches_sup(t):
    M = factorial_power(2)
    assert omega_via_integral(M, t) == pytest.approx(associated_function(M, [t]), rel=1e-3, abs=1e-9)


def test_quotients_of_factorial():
    q = quotients(factorial_power(1), 10)
    assert q[0] == 1.0
    np.testing.assert_allclose(q[1:], np.arange(1, 11), rtol=1e-12)


def test_index_table_sequence():
    M = from_index_table([((0, 0), 0.0), ((1, 0), 1.0), ((0, 1), 2.0)], 2)
    assert M.log_m((0, 1)) == 2.0
    with pytest.raises(ValueError):
        from_index_table([((0, 0), 0.0), ((0, 1), 2.0)], 2)


def test_memoised_values_are_stable():
    M = factorial_power(1.5, d=2)
    a = M.log_m((3, 4))
    assert M.log_m((3, 4)) == a


@given(st.floats(-5.0, 14.0), st.floats(0.5, 3.0))
def test_log_convex_search_matches_hull(logt, s):
    plain = factorial_power(s)
    flagged = WeightSequence(1, log_order=lambda p: s * gammaln(np.asarray(p, dtype=float) + 1), log_convex=True)
    # keep the maximiser p ~ t^{1/s} inside the tabulated range of the hull path
    t = np.array([math.exp(min(logt, 14.0 * s))])
    assert omega_many(flagged, t)[0] == pytest.approx(omega_many(plain, t)[0], rel=1e-12, abs=1e-12)


def test_log_convex_search_bounded_quotients():
    # quotients stay at 1, so omega(t) = inf for every t > 1
    flagged = WeightSequence(1, log_order=lambda p: np.zeros(np.shape(p)), log_convex=True)
    assert omega_many(flagged, np.array([0.5, 2.0])).tolist() == [0.0, math.inf]


def test_large_finite_values_are_not_declared_infinite():
    # M_p = p! 1e4^p: omega_M(t) = omega_{p!}(t / 1e4), attained at p = floor(t / 1e4)
    M = WeightSequence(1, log_order=lambda p: gammaln(np.asarray(p, dtype=float) + 1) + np.asarray(p) * math.log(1e4))
    x = 3e6
    want = math.floor(x) * math.log(x) - math.lgamma(math.floor(x) + 1)
    got = omega_many(M, np.array([x * 1e4]))[0]
    assert want > 1e6
    assert got == pytest.approx(want, rel=1e-9)
