import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultraspace.core import Verdict
from ultraspace.weight_func import (GrowthClass, audit_weight_matrix, from_callable, from_points, gevrey,
                                    growth_class, isotropic_omega, log_power, matrix_from_weight, sandwich_check,
                                    validate_weight_function, young_conjugate)


def sqrt_conjugate(x):
    """Closed form for omega = sqrt(t) normalized, x >= 1/2 (stationary point u = 2 log 2x)."""
    x = np.asarray(x, dtype=float)
    return 2 * x * (np.log(2 * x) - 1) + 1


def brute_conjugate(phi, s, u_max=60.0, n=600001):
    u = np.linspace(0.0, u_max, n)
    return float(np.max(s * u - phi(u)))


@pytest.fixture(scope="module")
def sqrt_w():
    return gevrey(2)


def test_normalization(sqrt_w):
    assert sqrt_w(0.5) == 0.0 and sqrt_w(1.0) == 0.0
    assert sqrt_w(4.0) == pytest.approx(1.0)
    assert sqrt_w(np.array([[3.0, 4.0]]))[0] == pytest.approx(math.sqrt(5.0) - 1.0)


@pytest.mark.parametrize("w", [gevrey(2), log_power(2), log_power(1.5), gevrey(1)])
def test_admissible_weights_validate(w):
    rep = validate_weight_function(w)
    assert rep.verdict == Verdict.VERIFIED
    assert [r.condition_id for r in rep.sub_reports] == ["doubling", "quadratic_bound", "log_dominance",
                                                         "log_convexity"]


def test_sqrt_doubling_constant(sqrt_w):
    L = validate_weight_function(sqrt_w).sub_reports[0].witnesses["L"]
    assert L <= math.sqrt(2) + 1


def test_log1p_fails_log_dominance():
    rep = validate_weight_function(log_power(1))
    assert rep.verdict == Verdict.VIOLATED
    bad = [r.condition_id for r in rep.sub_reports if r.verdict == Verdict.VIOLATED]
    assert bad == ["log_dominance"]


def test_conjugate_closed_form(sqrt_w):
    yc = young_conjugate(sqrt_w, 200.0)
    x = np.linspace(1, 100, 200)
    np.testing.assert_allclose(yc(x), sqrt_conjugate(x), rtol=1e-6)
    assert yc(0.0)[0] == 0.0
    assert not yc.convexified


@pytest.mark.parametrize("s", [0.7, 1.3, 4.0])
def test_conjugate_against_brute_force(sqrt_w, s):
    assert sqrt_w.conjugate(s)[0] == pytest.approx(brute_conjugate(sqrt_w.phi, s), rel=1e-6)


def test_conjugate_shape(sqrt_w):
    yc = young_conjugate(sqrt_w, 50.0)
    s, v = yc.s_grid, yc.values
    assert np.all(np.diff(v) >= 0)
    assert np.all(np.diff(np.diff(v) / np.diff(s)) >= -1e-9)
    ratio = v[1:] / s[1:]
    assert np.all(np.diff(ratio) >= 0)


@pytest.mark.parametrize("w", [gevrey(2), log_power(2), gevrey(1)])
def test_biconjugate(w):
    yc = young_conjugate(w, 400.0)
    u = np.linspace(0.1, 5.0, 40)
    phi = w.phi(u)
    np.testing.assert_allclose(yc.biconjugate(u), phi, rtol=1e-6, atol=1e-9)


def test_conjugate_rejects_bad_smax(sqrt_w):
    with pytest.raises(ValueError):
        young_conjugate(sqrt_w, 0.0)


def test_conjugate_grid_too_short_for_linear_growth():
    with pytest.raises(ValueError, match="conjugate grid"):
        log_power(1).conjugate(5.0)


def test_matrix_entries_closed_form(sqrt_w):
    M = matrix_from_weight(sqrt_w)
    for lam in (0.5, 1.0, 4.0):
        p = np.arange(1, 40)
        p = p[lam * p >= 0.5]
        want = sqrt_conjugate(lam * p) / lam
        np.testing.assert_allclose(M.sequence(lam).log_orders(int(p[-1]))[p], want, rtol=1e-9)
        assert M.log_m(lam, (0,)) == 0.0


def test_matrix_is_isotropic(sqrt_w):
    M = matrix_from_weight(sqrt_w, d=3)
    assert M.log_m(1.0, (3, 0, 1)) == M.log_m(1.0, (1, 1, 2)) == M.log_m(1.0, (0, 4, 0))


@pytest.mark.parametrize("w", [gevrey(2), log_power(2)])
def test_matrix_audit_all_items(w):
    rep = audit_weight_matrix(matrix_from_weight(w))
    assert rep.verdict == Verdict.VERIFIED
    items = {r.condition_id: r for r in rep.sub_reports}
    assert list(items) == ["normalized", "log_convex", "monotone", "doubling_split", "absorption", "derivation",
                           "product"]
    assert items["product"].witnesses == {"kappa": "lambda", "A": 1.0}


def test_sandwich_one_dimensional(sqrt_w):
    M = matrix_from_weight(sqrt_w)
    ts = np.concatenate([[0.0], np.geomspace(1e-2, 1e6, 999)])
    rep = sandwich_check(sqrt_w, M, 1.0, ts)
    assert rep.verdict == Verdict.VERIFIED
    L = validate_weight_function(sqrt_w).sub_reports[0].witnesses["L"]
    assert rep.witnesses["B"] <= 2 * L


def test_sandwich_two_dimensional_with_zero_coordinates(sqrt_w):
    M = matrix_from_weight(sqrt_w, d=2)
    pts = np.random.default_rng(1).uniform(0, 100, (1000, 2))
    pts[:50, 1] = 0.0
    assert sandwich_check(sqrt_w, M, 1.0, pts).verdict == Verdict.VERIFIED


@given(st.floats(0.0, 1e5), st.sampled_from([0.25, 1.0, 4.0]))
def test_sandwich_left_inequality_exact(t, lam):
    w = gevrey(2)
    M = matrix_from_weight(w)
    assert lam * isotropic_omega(M, lam, np.array([t]))[0] <= w(t) + 1e-9 * max(1.0, w(t))


@pytest.mark.parametrize("w, r, cls", [
    (gevrey(2), 2.0, GrowthClass.BIG_O),
    (gevrey(2), 0.5, GrowthClass.LITTLE_O),
    (log_power(2), 0.5, GrowthClass.LITTLE_O),
    (gevrey(0.5), 0.5, GrowthClass.BIG_O),
])
def test_growth_class(w, r, cls):
    got, rep = growth_class(w, r)
    assert got == cls
    assert len(rep.sub_reports) == 2


def test_from_points_and_callable():
    pts = [[0.0, 0.0], [1.0, 1.0], [4.0, 2.0], [100.0, 10.0]]
    w = from_points(pts)
    assert w(4.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        from_points([[0.0, 2.0], [1.0, 1.0], [4.0, 3.0]])
    c = from_callable(np.sqrt)
    assert c(9.0) == pytest.approx(2.0)
