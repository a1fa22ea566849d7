import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultraspace.core import Verdict
from ultraspace.expansion import (DecayModel, QuadratureError, analyze, classify_sequence, coeff_norm,
                                  fourier_check, fourier_quadrature, fourier_transform, summability_constant,
                                  synthesize, verify_hermite_norm_bound, verify_raising_bound, verify_T_continuity,
                                  verify_Tinv_continuity)
from ultraspace.hermite import HermiteExpansion, hermite_eval, random_expansion
from ultraspace.weight_func import gevrey, matrix_from_weight
from ultraspace.weight_seq import factorial_power, ones

PI_QUARTER = math.pi ** -0.25
# mpmath quadrature of (2 pi)^{-1/2} int H_1(x) e^{-i x xi} dx (imaginary parts)
FOURIER_H1 = {0.0: 0.0, 1.0: -0.64428836511347518151, 2.0: -0.28752033217907949445, -0.7: 0.58200058556771562615}
# same for H_2 (real parts)
FOURIER_H2 = {0.0: 0.53112596601359845724, 1.0: -0.32214418255673759076, 2.0: -0.50316058131338911528}
# sum_{n=0}^{10^6} 2 / (2 + n^2), mpmath nsum
SUMMABILITY_A2_D1 = 2.72205420114845584664


@pytest.fixture(scope="module")
def gev():
    return matrix_from_weight(gevrey(2))


def test_analyze_expansion_is_identity():
    f = random_expansion(2, 5, 1)
    assert analyze(f).allclose(f)
    assert analyze(f, max_degree=2).max_degree <= 2


def test_analyze_callables():
    g = analyze(lambda x: PI_QUARTER * np.exp(-x[..., 0] ** 2 / 2), 8, 1)
    assert g.coefficient((0,)) == pytest.approx(1.0, abs=1e-12)
    assert np.sum(np.abs(g.array) ** 2) == pytest.approx(1.0, abs=1e-12)
    h = analyze(lambda x: x[..., 0] * PI_QUARTER * np.exp(-x[..., 0] ** 2 / 2), 8, 1)
    assert h.coefficient((1,)) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert abs(h.coefficient((0,))) < 1e-12 and abs(h.coefficient((2,))) < 1e-12


def test_analyze_basis_function():
    g = analyze(lambda x: hermite_eval((3,), x[..., 0]), 8, 1)
    want = np.zeros(9)
    want[3] = 1.0
    np.testing.assert_allclose(np.abs(g.array), want, atol=1e-12)


def test_analyze_reports_quadrature_disagreement():
    with pytest.raises(QuadratureError):
        analyze(lambda x: np.exp(-np.abs(x[..., 0])) * np.sign(x[..., 0]), 6, 1, quad_order=20, tol=1e-14)


@given(st.integers(1, 2), st.integers(0, 6), st.integers(0, 2 ** 31))
def test_round_trip_through_quadrature(d, degree, seed):
    f = random_expansion(d, degree, seed)
    g = analyze(lambda x: f.evaluate_points(x.reshape(-1, d)).reshape(x.shape[:-1]), degree, d)
    assert np.max(np.abs(g.truncated(degree).array - f.array)) <= 1e-9


def test_synthesize_round_trip():
    c = {(0, 1): 2.0, (3, 0): 1j}
    assert analyze(synthesize(c, 2)).coeffs == {(0, 1): 2.0 + 0j, (3, 0): 1j}


def test_coeff_norm_examples():
    M = factorial_power(1)
    assert coeff_norm(HermiteExpansion.basis((0,)), M, 1.0) == 0.0
    # omega_{p!}(2) = max_p (p log 2 - log p!) = log 2
    assert coeff_norm(HermiteExpansion.basis((4,)), M, 1.0) == pytest.approx(math.log(2.0), rel=1e-14)
    assert coeff_norm(HermiteExpansion.basis((4,)), ones(), 1.0) == math.inf
    assert coeff_norm(HermiteExpansion.zero(1), M, 1.0) == -math.inf


def test_classify_finite_sequence(gev):
    f = random_expansion(1, 8, 2)
    for mode in ("roumieu", "beurling"):
        rep = classify_sequence(f, gev, mode)
        assert rep.verdict == Verdict.VERIFIED
        assert "norms" in rep.details


def test_classify_decay_models(gev):
    expo = DecayModel(1, np.arange(41.0), tail="linear")
    assert classify_sequence(expo, gev, "roumieu").verdict == Verdict.VERIFIED
    flat = DecayModel(1, np.zeros(41))
    assert classify_sequence(flat, gev, "roumieu").verdict == Verdict.VIOLATED
    assert classify_sequence(flat, gev, "beurling").verdict == Verdict.VIOLATED
    with pytest.raises(ValueError):
        classify_sequence(expo, gev, "neither")


@pytest.mark.parametrize("mode", ["roumieu", "beurling"])
def test_T_continuity(gev, mode):
    for f in (HermiteExpansion.basis((0,)), HermiteExpansion.zero(1), random_expansion(1, 8, 11)):
        rep = verify_T_continuity(f, gev, mode)
        assert rep.verdict == Verdict.VERIFIED


@pytest.mark.parametrize("mode", ["roumieu", "beurling"])
def test_Tinv_continuity(gev, mode):
    delta = HermiteExpansion.basis((0,))
    assert verify_Tinv_continuity(delta, gev, mode).verdict == Verdict.VERIFIED
    unit = HermiteExpansion(1, {(g,): 1.0 for g in range(7)})
    rep = verify_Tinv_continuity(unit, gev, mode)
    assert rep.verdict == Verdict.VERIFIED
    assert rep.witnesses["C_tilde"] > 0 and rep.witnesses["C_tilde_tail"] > 0
    assert rep.witnesses["plain_below_absolute"]
    assert rep.details["cauchy"]["tail_nonincreasing"]


def test_summability_constant():
    total, tail = summability_constant(2.0, 1, 10 ** 6)
    assert total == pytest.approx(SUMMABILITY_A2_D1, rel=1e-10)
    assert tail == pytest.approx(2.0 / 10 ** 6)


@given(st.floats(0.5, 50.0), st.integers(1, 3))
def test_summability_partial_sums_monotone_and_bounded(a, d):
    values = [summability_constant(a, d, K) for K in (10, 100, 1000)]
    totals = [v[0] for v in values]
    assert totals == sorted(totals)
    # truncated sum plus tail bound stays above every later truncation
    for (t0, b0), t1 in zip(values, totals[1:]):
        assert t1 <= t0 + b0 + 1e-9


def test_raising_bound():
    M, N = factorial_power(1), factorial_power(2)
    assert verify_raising_bound(HermiteExpansion.basis((0,)), M, N, 8).verdict == Verdict.VERIFIED
    assert verify_raising_bound(random_expansion(1, 6, 4), M, N, 6).verdict == Verdict.VERIFIED


def test_hermite_norm_bound():
    assert verify_hermite_norm_bound(factorial_power(1), factorial_power(2), 8).verdict == Verdict.VERIFIED


def test_fourier_examples():
    H0, H1 = HermiteExpansion.basis((0,)), HermiteExpansion.basis((1,))
    assert fourier_transform(H0).allclose(H0)
    assert fourier_transform(H1).allclose(HermiteExpansion.basis((1,), -1j))
    xi = np.array(sorted(FOURIER_H1))[:, None]
    got = fourier_quadrature(H1, xi, 60)
    np.testing.assert_allclose(got.imag, [FOURIER_H1[v] for v in sorted(FOURIER_H1)], atol=1e-12)
    np.testing.assert_allclose(got.real, 0.0, atol=1e-12)
    xi2 = np.array(sorted(FOURIER_H2))[:, None]
    got2 = fourier_quadrature(HermiteExpansion.basis((2,)), xi2, 60)
    np.testing.assert_allclose(got2.real, [FOURIER_H2[v] for v in sorted(FOURIER_H2)], atol=1e-12)
    assert fourier_check(H1).verdict == Verdict.VERIFIED


@given(st.integers(1, 2), st.integers(0, 6), st.integers(0, 2 ** 31), st.floats(0.25, 4.0))
def test_fourier_preserves_coefficient_norms(d, degree, seed, h):
    f = random_expansion(d, degree, seed)
    F = fourier_transform(f)
    assert np.array_equal(np.abs(F.array), np.abs(f.array))
    M = factorial_power(1.5, d)
    assert coeff_norm(analyze(F), M, h) == coeff_norm(analyze(f), M, h)
