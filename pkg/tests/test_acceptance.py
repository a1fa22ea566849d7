"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from ultraspace.cli import main as cli_main
from ultraspace.core import Verdict, combine_verdicts, enumerate_indices
from ultraspace.expansion import fourier_check, fourier_quadrature, fourier_transform, verify_T_continuity, \
    verify_Tinv_continuity
from ultraspace.hermite import (HermiteExpansion, check_lowering_identity, commutator_defect, gram_matrix,
                                random_expansion, random_rational_expansion, RationalExpansion, seminorm_bound_box,
                                verify_normal_ordering)
from ultraspace.nuclearity import Nuclearity, nuclearity_verdict
from ultraspace.weight_func import audit_weight_matrix, gevrey, log_power, matrix_from_weight, sandwich_check, \
    young_conjugate
from ultraspace.weight_matrix import DEFAULT_LAMBDA_GRID, constant_matrix, hermite_membership_test
from ultraspace.weight_seq import (WeightSequence, exp_poly, factorial_power, omega_many, omega_via_integral, ones,
                                   sequence_from_association)

CONFIGS = Path(__file__).resolve().parent.parent / "demos" / "configs"


@pytest.fixture
def report(capsys):
    """Print ``criterion N: PASS|FAIL (note)`` outside pytest's capture."""

    def emit(n: int, ok: bool, note: str = "") -> bool:
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}" + (f" ({note})" if note else ""))
        return ok

    return emit


def test_criterion_01_orthonormality_parseval(report):
    t0 = time.perf_counter()
    gram_err = 0.0
    for d, top in ((1, 40), (2, 12)):
        _, G = gram_matrix(d, top)
        gram_err = max(gram_err, float(np.abs(G - np.eye(G.shape[0])).max()))
    parseval_err = 0.0
    for seed in range(40):
        d = 1 + seed % 2
        f = random_expansion(d, 40 if d == 1 else 12, seed)
        parseval_err = max(parseval_err, abs(f.quadrature_norm() - f.norm()) / f.norm())
    dt = time.perf_counter() - t0
    ok = gram_err <= 1e-9 and parseval_err <= 1e-9 and dt <= 30
    assert report(1, ok, f"gram {gram_err:.1e}, parseval {parseval_err:.1e}, {dt:.1f}s")


@pytest.mark.xfail(strict=True, reason="the identity with gamma^alpha is not exact; "
                                       "the exact constant is (gamma+alpha)!/gamma!")
def test_criterion_02_ladder_exactness(report):
    stated = [check_lowering_identity(d, 12, "stated") for d in (1, 2)]
    exact = [check_lowering_identity(d, 12, "exact") for d in (1, 2)]
    comm = True
    for seed in range(100):
        d = 1 + seed % 2
        f = random_rational_expansion(d, 8, seed)
        comm &= all(commutator_defect(f, j) == RationalExpansion(d) for j in range(d))
    ok_stated = all(r.verdict == Verdict.VERIFIED for r in stated)
    ok_exact = all(r.verdict == Verdict.VERIFIED for r in exact)
    ce = stated[0].counterexample
    note = (f"stated form {'exact' if ok_stated else 'fails'} (first alpha={ce and ce['alpha']}, "
            f"gamma={ce and ce['gamma']}, {stated[0].details['failures']} of {stated[0].tested_range['cases']} "
            f"cases in d=1); (gamma+alpha)!/gamma! form exact: {ok_exact}; commutator exact: {comm}")
    assert ok_exact and comm
    assert report(2, ok_stated and ok_exact and comm, note)


def test_criterion_03_monomial_norm_bound(report):
    t0 = time.perf_counter()
    reps = [seminorm_bound_box(d, 16) for d in (1, 2)]
    cases = sum(r.tested_range["cases"] for r in reps)
    dt = time.perf_counter() - t0
    ok = all(r.verdict == Verdict.VERIFIED for r in reps) and cases >= 2000 and dt <= 60
    assert report(3, ok, f"{cases} cases, min log margin {min(r.witnesses['min_log_margin'] for r in reps):.3g}, "
                         f"{dt:.1f}s")


def test_criterion_04_normal_ordering(report):
    bad, worst = 0, 0.0
    count = 0
    for d in (1, 2):
        for g in enumerate_indices(d, 10):
            rep = verify_normal_ordering(g, random_expansion(d, 4, count))
            bad += rep.verdict != Verdict.VERIFIED
            worst = max(worst, rep.details["application_rel_error"])
            count += 1
    assert report(4, bad == 0 and worst <= 1e-10, f"{count} multi-indices, application error {worst:.1e}")


def test_criterion_05_association_round_trip(report):
    c = 3.0
    half = WeightSequence(1, log_order=lambda p: 0.5 * np.asarray([math.lgamma(v + 1) for v in np.ravel(p)])
                          .reshape(np.shape(p)) + np.asarray(p, dtype=float) * math.log(c), name="sqrt(p!) 3^p")
    worst_rt = 0.0
    for M in (factorial_power(1), factorial_power(2), half):
        lm = M.log_orders(30)
        for p in range(1, 31):
            # log M_1 = 0 for p!, so the relative error is taken against max(1, |log M_p|)
            worst_rt = max(worst_rt, abs(sequence_from_association(M, p) - lm[p]) / max(1.0, abs(lm[p])))
    worst_int = 0.0
    ts = np.geomspace(1.0, 1e3, 40)
    for M in (factorial_power(1), factorial_power(2), half):
        direct = omega_many(M, ts)
        for t, w in zip(ts, direct):
            if w > 0:
                worst_int = max(worst_int, abs(omega_via_integral(M, float(t)) - w) / w)
    ok = worst_rt <= 1e-6 and worst_int <= 1e-3
    assert report(5, ok, f"round trip {worst_rt:.1e}, integral {worst_int:.1e}")


def test_criterion_06_young_conjugate(report):
    yc = young_conjugate(gevrey(2), 200.0)
    x = np.linspace(1.0, 100.0, 500)
    closed = 2 * x * (np.log(2 * x) - 1) + 1
    err = float(np.max(np.abs(yc(x) - closed) / np.abs(closed)))
    u = np.linspace(0.1, 5.0, 60)
    phi = gevrey(2).phi(u)
    bi = float(np.max(np.abs(yc.biconjugate(u) - phi) / phi))
    s, v = yc.s_grid[1:], yc.values[1:]
    mono = bool(np.all(np.diff(v / s) >= 0))
    assert report(6, err <= 1e-6 and bi <= 1e-6 and mono, f"closed form {err:.1e}, biconjugate {bi:.1e}")


def test_criterion_07_matrix_audit(report):
    ok, notes = True, []
    for w in (gevrey(2), log_power(2)):
        rep = audit_weight_matrix(matrix_from_weight(w))
        items = {r.condition_id: r for r in rep.sub_reports}
        ok &= len(items) == 7 and all(r.verdict == Verdict.VERIFIED for r in items.values())
        ok &= items["product"].witnesses == {"kappa": "lambda", "A": 1.0}
        notes.append(f"{w.name}: {rep.verdict.value}")
    assert report(7, ok, ", ".join(notes))


def test_criterion_08_sandwich(report):
    rng = np.random.default_rng(8)
    w = gevrey(2)
    ok, worst_B = True, 0.0
    for d in (1, 2, 3):
        M = matrix_from_weight(w, d=d)
        radii = np.geomspace(1e-2, 1e12, 1000)
        dirs = np.abs(rng.normal(size=(1000, d)))
        pts = dirs / np.linalg.norm(dirs, axis=1, keepdims=True) * radii[:, None]
        for lam in DEFAULT_LAMBDA_GRID:
            rep = sandwich_check(w, M, lam, pts)
            left, right = rep.sub_reports
            ok &= left.verdict == Verdict.VERIFIED and right.verdict == Verdict.VERIFIED
            ok &= math.isfinite(right.witnesses.get("B", math.inf)) and math.isfinite(right.witnesses.get("C", math.inf))
            worst_B = max(worst_B, right.witnesses.get("B", math.inf))
    assert report(8, ok, f"{3 * len(DEFAULT_LAMBDA_GRID)} cases, largest B {worst_B:.3g}")


def test_criterion_09_membership_dichotomy(report):
    cases = [(matrix_from_weight(log_power(2)), Verdict.VERIFIED, Verdict.VERIFIED),
             (matrix_from_weight(gevrey(0.5)), Verdict.VERIFIED, Verdict.VIOLATED),
             (constant_matrix(ones()), Verdict.VIOLATED, Verdict.VIOLATED)]
    got = [(hermite_membership_test(M, "roumieu").verdict, hermite_membership_test(M, "beurling").verdict)
           for M, _, _ in cases]
    ok = all(g == (r, b) for g, (_, r, b) in zip(got, cases))
    assert report(9, ok, "; ".join(f"{r.value}/{b.value}" for r, b in got))


def test_criterion_10_basis_estimates(report):
    M = matrix_from_weight(gevrey(2))
    violations, inconclusive, n = 0, 0, 0
    for seed in range(25):
        f = random_expansion(1, int(seed % 9), seed)
        for mode in ("roumieu", "beurling"):
            for rep in (verify_T_continuity(f, M, mode), verify_Tinv_continuity(f, M, mode)):
                n += 1
                violations += rep.verdict == Verdict.VIOLATED
                inconclusive += rep.verdict == Verdict.INCONCLUSIVE
                if rep.condition_id.startswith("Tinv"):
                    assert math.isfinite(rep.witnesses["C_tilde"] + rep.witnesses["C_tilde_tail"])
    assert report(10, violations == 0 and inconclusive == 0, f"{n} checks, {violations} violated, "
                                                             f"{inconclusive} inconclusive")


def test_criterion_11_fourier(report):
    exact, worst = True, 0.0
    for d in (1, 2):
        for g in enumerate_indices(d, 6):
            f = HermiteExpansion.basis(g)
            rep = fourier_check(f, tol=1e-8)
            exact &= rep.witnesses["magnitudes_exact"]
            worst = max(worst, rep.witnesses["max_pointwise_error"])
            want = (-1j) ** sum(g)
            exact &= fourier_transform(f).allclose(HermiteExpansion.basis(g, want), atol=0.0)
    for seed in range(20):
        f = random_expansion(2, 6, seed)
        exact &= bool(np.array_equal(np.abs(fourier_transform(f).array), np.abs(f.array)))
    xi = np.array([[0.3], [-1.1]])
    spot = fourier_quadrature(HermiteExpansion.basis((6,)), xi, 80)
    worst = max(worst, float(np.max(np.abs(spot + HermiteExpansion.basis((6,)).evaluate_points(xi)))))
    assert report(11, exact and worst <= 1e-8, f"pointwise error {worst:.1e}")


def test_criterion_12_nuclearity_agreement(report):
    t0 = time.perf_counter()
    fixtures = {"gevrey(1)": (matrix_from_weight(gevrey(1)), Nuclearity.NUCLEAR),
                "gevrey(2)": (matrix_from_weight(gevrey(2)), Nuclearity.NUCLEAR),
                "log_power(2)": (matrix_from_weight(log_power(2)), Nuclearity.NUCLEAR),
                "p!": (constant_matrix(factorial_power(1)), Nuclearity.NUCLEAR),
                "e^(p^3)": (constant_matrix(exp_poly([(3, 1.0)])), Nuclearity.NOT_NUCLEAR)}
    ok, rows = True, []
    for name, (M, want) in fixtures.items():
        for mode in ("roumieu", "beurling"):
            rep = nuclearity_verdict(M, mode)
            series = combine_verdicts([r.verdict for r in rep.reports if r.condition_id.startswith("series")], "all")
            cond = next(r.verdict for r in rep.reports if r.condition_id.startswith("derivation"))
            agree = series == cond and series != Verdict.INCONCLUSIVE
            ok &= agree and rep.verdict == want and rep.consistent
            if not (agree and rep.verdict == want):
                rows.append(f"{name}/{mode}: series {series.value}, condition {cond.value}, {rep.verdict.value}")
    dt = time.perf_counter() - t0
    ok &= dt <= 120
    assert report(12, ok, "; ".join(rows) or f"10 fixture/mode pairs agree, {dt:.1f}s")


def test_criterion_13_determinism(report, tmp_path):
    def suite(root: Path) -> dict[str, bytes]:
        out = {}
        for cfg in sorted(CONFIGS.glob("*.json")):
            target = root / cfg.stem
            cli_main([cfg.stem.split("_")[0], "--config", str(cfg), "--out", str(target)])
            for f in sorted(target.iterdir()):
                out[f"{cfg.stem}/{f.name}"] = f.read_bytes()
        return out

    a, b = suite(tmp_path / "a"), suite(tmp_path / "b")
    diff = sorted(k for k in a if a[k] != b.get(k))
    assert report(13, bool(a) and a.keys() == b.keys() and not diff,
                  f"{len(a)} files" + (f", differing: {diff}" if diff else ""))
