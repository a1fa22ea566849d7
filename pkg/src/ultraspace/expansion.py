"""Hermite coefficients, coefficient-space norms and continuity estimates.

The coefficient map ``T: f -> (xi_gamma(f))`` with ``xi_gamma = int f H_gamma``
and its inverse (synthesis) are checked against weighted seminorms of the
function side.  The Fourier transform acts diagonally on Hermite
coefficients and is checked against direct quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .core import (
    ConditionReport,
    LogValue,
    Verdict,
    combine_verdicts,
    enumerate_indices,
    log_close_le,
    settle_status,
)
from .hermite import (
    HermiteExpansion,
    SeminormResult,
    _scaled_rule,
    _tensor_nodes,
    apply_power,
    compare_bounds,
    gauss_hermite_quadrature,
    hermite_table,
    seminorm,
)
from .weight_matrix import HypothesisError, WeightMatrix, check_matrix_condition, polynomial_absorption
from .weight_seq import WeightSequence, check_mixed_condition, omega_many

QUAD_TOL = 1e-9
SUMMATION_ORDERS = 10 ** 6
DECAY_HORIZON = 1e12
DEFAULT_H_GRID = tuple(2.0 ** k for k in range(-4, 5))


class QuadratureError(RuntimeError):
    """Two quadrature orders disagree beyond the tolerance."""


# ---------------------------------------------------------------------------
# analysis and synthesis


def synthesize(c: Mapping[Sequence[int], complex] | HermiteExpansion, d: int | None = None) -> HermiteExpansion:
    """``sum_gamma c_gamma H_gamma`` for a finitely supported coefficient map."""
    if isinstance(c, HermiteExpansion):
        return c
    if d is None:
        if not c:
            raise ValueError("dimension needed for an empty coefficient map")
        d = len(next(iter(c)))
    return HermiteExpansion(d, c)


def _quadrature_coeffs(f: Callable[[np.ndarray], np.ndarray], d: int, max_degree: int, n: int) -> np.ndarray:
    x, W = _scaled_rule(n)
    pts, wt = _tensor_nodes(x, W, d)
    vals = np.asarray(f(pts), dtype=complex).reshape(-1) * wt
    tab = hermite_table(max_degree, x)  # (K+1, n)
    res = vals.reshape((n,) * d)
    for _ in range(d):
        # contract the leading node axis; the new degree axis goes last
        res = np.tensordot(res, tab, axes=([0], [1]))
    out = np.zeros((max_degree + 1,) * d, dtype=complex)
    for g in enumerate_indices(d, max_degree):
        out[g] = res[g]
    return out


def analyze(f: HermiteExpansion | Callable[[np.ndarray], np.ndarray], max_degree: int | None = None,
            d: int | None = None, quad_order: int | None = None, tol: float = QUAD_TOL) -> HermiteExpansion:
    """Hermite coefficients ``xi_gamma(f) = int f H_gamma dx`` for ``|gamma| <= max_degree``.

    Parameters
    ----------
    f : HermiteExpansion or callable
        Callables map an array of points of shape ``(n, d)`` to values.
    max_degree : int
        Truncation order (required for callables).
    d : int
        Dimension (required for callables).
    quad_order : int, optional
        Gauss-Hermite order per coordinate; a second order
        ``quad_order + max(8, quad_order // 4)`` is used as a check.

    Raises
    ------
    QuadratureError
        When the two quadrature orders disagree by more than ``tol``.

    Notes
    -----
    The integral is computed against the weight ``e^{-x^2}`` with the scaled
    weights ``w_i e^{x_i^2}``, so products of polynomials with ``e^{-x^2}``
    (in particular finite Hermite expansions) are integrated exactly.
    """
    if isinstance(f, HermiteExpansion):
        return f if max_degree is None else f.truncated(max_degree)
    if max_degree is None or d is None:
        raise ValueError("callables need max_degree and d")
    n1 = quad_order if quad_order is not None else max(2 * max_degree + 8, 40)
    n2 = n1 + max(8, n1 // 4)
    if n2 > 512:
        raise ValueError("quadrature order too large")
    c1 = _quadrature_coeffs(f, d, max_degree, n1)
    c2 = _quadrature_coeffs(f, d, max_degree, n2)
    err = float(np.max(np.abs(c1 - c2)))
    if err > tol * max(1.0, float(np.max(np.abs(c2)))):
        raise QuadratureError(f"quadrature orders {n1} and {n2} differ by {err:.3e}")
    c2[np.abs(c2) <= tol * max(1.0, float(np.max(np.abs(c2))))] = 0.0
    return HermiteExpansion(d, c2)


# ---------------------------------------------------------------------------
# coefficient-space norms


def _as_expansion(c) -> HermiteExpansion:
    if isinstance(c, HermiteExpansion):
        return c
    return synthesize(c)


def coeff_norm(c, M: WeightSequence, h: float) -> LogValue:
    """``log sup_gamma |c_gamma| exp(omega_M(gamma^{1/2} / h))``.

    ``gamma^{1/2}`` is the coordinate-wise square root.  Returns ``-inf`` for
    the zero sequence and ``+inf`` when ``omega_M`` is infinite at a point
    carrying a nonzero coefficient.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    f = _as_expansion(c)
    sup = f.coeffs
    if not sup:
        return -math.inf
    G = np.array(list(sup), dtype=float).reshape(-1, f.d)
    mags = np.abs(np.array(list(sup.values())))
    om = omega_many(M, np.sqrt(G) / h)
    return float(np.max(np.log(mags) + om))


def coeff_norm_argmax(c, M: WeightSequence, h: float) -> tuple[LogValue, tuple[int, ...] | None]:
    """:func:`coeff_norm` together with the maximising index."""
    f = _as_expansion(c)
    sup = f.coeffs
    if not sup:
        return -math.inf, None
    keys = list(sup)
    G = np.array(keys, dtype=float).reshape(-1, f.d)
    vals = np.log(np.abs(np.array(list(sup.values())))) + omega_many(M, np.sqrt(G) / h)
    i = int(np.argmax(vals))
    return float(vals[i]), keys[i]


@dataclass
class DecayModel:
    """Coefficients bounded by ``|c_gamma| <= exp(-g(|gamma|))``.

    ``g`` is tabulated on orders ``0..K`` and extended beyond ``K`` either by
    its last value (``tail="constant"``) or by its last slope
    (``tail="linear"``).
    """

    d: int
    g: np.ndarray
    tail: str = "constant"
    name: str = "decay"

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=float)
        if self.tail not in ("constant", "linear"):
            raise ValueError("tail must be 'constant' or 'linear'")
        if self.g.size < 2:
            raise ValueError("decay table needs at least two orders")

    def at(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        K = self.g.size - 1
        inner = np.interp(np.minimum(n, K), np.arange(K + 1), self.g)
        if self.tail == "constant":
            return np.where(n <= K, inner, self.g[-1])
        slope = self.g[-1] - self.g[-2]
        return np.where(n <= K, inner, self.g[-1] + slope * (n - K))


def _decay_cell(model: DecayModel, M: WeightSequence, h: float, margin: float = 1.0) -> tuple[Verdict, float]:
    """Whether ``sup_gamma exp(omega_M(gamma^{1/2}/h) - g(|gamma|))`` is finite."""
    K = model.g.size - 1
    dense = np.arange(0, K + 1, dtype=float)
    far = np.geomspace(max(K, 1) + 1, DECAY_HORIZON, 400)
    n = np.concatenate([dense, far])
    if M.structure == "isotropic" or M.d == 1:
        t = np.zeros((n.size, M.d))
        t[:, 0] = np.sqrt(n) / h
        om = omega_many(M, t)
    else:
        # product layout: the sup over |gamma| = n is taken on the balanced
        # and the axis-concentrated indices
        t_axis = np.zeros((n.size, M.d))
        t_axis[:, 0] = np.sqrt(n) / h
        t_bal = np.tile(np.sqrt(n / M.d)[:, None] / h, (1, M.d))
        om = np.maximum(omega_many(M, t_axis), omega_many(M, t_bal))
    r = om - model.at(n)
    if not np.all(np.isfinite(r[: K + 1])):
        return Verdict.VIOLATED, math.inf
    # far points where omega exceeded the evaluation threshold carry no
    # information about the sup and are dropped
    keep = np.isfinite(r)
    r, n = r[keep], n[keep]
    st, m = settle_status(r, np.log1p(n), margin)
    if st == "settled":
        return Verdict.VERIFIED, float(np.max(r))
    if st == "growing":
        return Verdict.VIOLATED, math.inf
    return Verdict.INCONCLUSIVE, float(np.max(r))


def classify_sequence(c, M: WeightMatrix, mode: str, lambdas: Sequence[float] | None = None,
                      hs: Sequence[float] = DEFAULT_H_GRID) -> ConditionReport:
    """Membership of a coefficient sequence in the Roumieu or Beurling sequence space.

    Parameters
    ----------
    c : HermiteExpansion, mapping or DecayModel
        Finitely supported coefficients or a tabulated decay bound.
    M : WeightMatrix
    mode : {"roumieu", "beurling"}
        Roumieu membership needs one finite norm on the ``(lambda, h)``
        grid, Beurling membership needs all of them.

    Returns
    -------
    ConditionReport
        ``VERIFIED`` for a member, ``VIOLATED`` for a non-member.  The full
        norm table is in ``details["norms"]``.
    """
    if mode not in ("roumieu", "beurling"):
        raise ValueError("mode must be 'roumieu' or 'beurling'")
    lams = M.lambda_grid if lambdas is None else [float(v) for v in lambdas]
    table, verdicts = [], []
    for lam in lams:
        seq = M.sequence(lam)
        for h in hs:
            if isinstance(c, DecayModel):
                v, val = _decay_cell(c, seq, h)
                entry = {"lambda": float(lam), "h": float(h), "log_norm": val, "verdict": v.value}
            else:
                val = coeff_norm(c, seq, h)
                v = Verdict.VERIFIED if val < math.inf else Verdict.VIOLATED
                entry = {"lambda": float(lam), "h": float(h), "log_norm": val, "verdict": v.value}
            table.append(entry)
            verdicts.append(v)
    quant = "any" if mode == "roumieu" else "all"
    verdict = combine_verdicts(verdicts, quant)
    rng = {"lambdas": [float(v) for v in lams], "hs": [float(v) for v in hs],
           "model": "decay" if isinstance(c, DecayModel) else "finite"}
    wit = {}
    if verdict == Verdict.VERIFIED:
        best = min((e for e in table if e["verdict"] == "VERIFIED"), key=lambda e: e["log_norm"])
        wit = {"lambda": best["lambda"], "h": best["h"], "log_norm": best["log_norm"]}
    ce = None
    if verdict == Verdict.VIOLATED:
        bad = next(e for e in table if e["verdict"] == "VIOLATED")
        ce = {"lambda": bad["lambda"], "h": bad["h"]}
    return ConditionReport(f"membership_{mode}", verdict, wit, rng, ce, {"norms": table})


# ---------------------------------------------------------------------------
# continuity of the coefficient map


def _hermite_witness(M: WeightMatrix, cond: str, lam: float) -> dict[str, Any]:
    rep = check_matrix_condition(M, cond, lambdas=[lam])
    sub = rep.sub_reports[0]
    if sub.verdict != Verdict.VERIFIED:
        raise HypothesisError(f"{cond} has no witness at lambda={lam:g} ({sub.verdict.value})")
    return dict(sub.witnesses)


def _absorption_witness(M: WeightMatrix, kind: str, lam: float) -> dict[str, Any]:
    rep = polynomial_absorption(M, kind, None, lambdas=[lam])
    sub = rep.sub_reports[0]
    if sub.verdict != Verdict.VERIFIED:
        raise HypothesisError(f"absorption ({kind}) has no witness at lambda={lam:g} ({sub.verdict.value})")
    return dict(sub.witnesses)


def verify_T_continuity(f: HermiteExpansion, M: WeightMatrix, mode: str, lam: float = 1.0,
                        index_cap: int | None = None) -> ConditionReport:
    """Check ``||T f||_coeff <= B e^{d/2} ||f||_L2-seminorm`` with matrix witnesses.

    * Roumieu: with ``(kappa, B, C, H)`` from the Hermite-type condition at
      ``lam``, ``||xi(f)||_{M^(kappa), 9 sqrt2 H C} <= B e^{d/2} ||f||_{2, M^(lam), C}``.
    * Beurling: with ``(kappa, B, H)`` at ``lam``, for every probed ``C``,
      ``||xi(f)||_{M^(lam), 9 sqrt2 H C} <= B e^{d/2} ||f||_{2, M^(kappa), C}``.

    The left side is exact for finite expansions; the right side is a
    truncated seminorm (a lower bound), so ``VERIFIED`` is sound.
    """
    if mode not in ("roumieu", "beurling"):
        raise ValueError("mode must be 'roumieu' or 'beurling'")
    d = f.d
    xi = analyze(f)
    subs = []
    if mode == "roumieu":
        w = _hermite_witness(M, "hermite_roumieu", lam)
        kap, C, H, logB = w["kappa"], w["C"], w["H"], w["log_B"]
        probes = [(C, M.sequence(kap), M.sequence(lam))]
    else:
        w = _hermite_witness(M, "hermite_beurling", lam)
        kap, H, logB = w["kappa"], w["H"], w["log_B_max"]
        probes = [(C, M.sequence(lam), M.sequence(kap)) for C in w["C_probes"]]
    for C, coeff_seq, fun_seq in probes:
        scale = 9 * math.sqrt(2) * H * C
        lhs = coeff_norm(xi, coeff_seq, scale)
        rhs = seminorm(f, fun_seq, C, "L2", index_cap)
        rng = {"C": C, "coeff_scale": scale, "rhs_status": rhs.status}
        subs.append(compare_bounds(lhs, logB + 0.5 * d, rhs, f"coefficient_bound@C={C:g}", rng))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    margins = [s.witnesses["log_margin"] for s in subs]
    wit = {"kappa": kap, "H": H, "log_B": logB, "min_log_margin": min(margins)}
    return ConditionReport(f"T_continuity_{mode}", verdict, wit, {"lambda": lam, "d": d}, None, {}, subs)


def summability_constant(a: float, d: int, K: int = SUMMATION_ORDERS) -> tuple[float, float]:
    """``sum_{gamma in N^d} a / (a + |gamma|^{d+1})`` as (truncated value, tail bound).

    Orders ``n = |gamma| <= K`` are summed with multiplicity
    ``binom(n + d - 1, d - 1)``; the remainder is at most
    ``a d^{d-1} / ((d-1)! K)``.
    """
    n = np.arange(K + 1, dtype=float)
    logmult = gammaln(n + d) - gammaln(n + 1) - math.lgamma(d)
    with np.errstate(divide="ignore"):
        logterm = math.log(a) - np.logaddexp(math.log(a), (d + 1) * np.log(n))
    total = float(np.sum(np.exp(logmult + logterm)))
    tail = a * d ** (d - 1) / (math.factorial(d - 1) * K)
    return total, tail


def _block_increments(f: HermiteExpansion, seq: WeightSequence, h: float, index_cap: int | None) -> dict[str, Any]:
    """Seminorms of the order blocks and the resulting Cauchy tail bounds."""
    K = f.max_degree
    inc = []
    for n in range(K + 1):
        b = f.block(n)
        inc.append(seminorm(b, seq, h, "L2", index_cap).value if not b.is_zero else 0.0)
    inc = np.array(inc)
    tails = np.array([float(np.sum(inc[k + 1:])) for k in range(K + 1)])
    return {"increments": inc.tolist(), "tail_bounds": tails.tolist(),
            "tail_nonincreasing": bool(np.all(np.diff(tails) <= 1e-12 * max(1.0, tails.max(initial=0.0))))}


def verify_Tinv_continuity(c, M: WeightMatrix, mode: str, lam: float = 1.0, scale: float = 1.0,
                           index_cap: int | None = None, K: int = SUMMATION_ORDERS) -> ConditionReport:
    """Check the synthesis bound for ``f = sum c_gamma H_gamma``.

    * Roumieu: absorption at ``lam`` gives ``(kappa, B1, B2)``, the
      Hermite-type condition at ``kappa`` gives ``(kappa', B, C, H)`` with
      ``C`` raised to at least ``B2 C*``; checks
      ``sum_gamma |c_gamma| ||x^a d^b H_gamma|| / ((2HC)^{|a+b|} M^(kappa')_{a+b})
      <= B B1 C~ ||c||_{M^(lam), C*}``.
    * Beurling: the Hermite-type condition at ``lam`` gives ``(kappa, B, H)``,
      ``C = h / (2H)`` is a probed value, absorption at ``kappa`` gives
      ``(kappa', B1, B2)``; checks the same sum against
      ``B B1 C~ ||c||_{M^(kappa'), h / (2 H B2)}`` with ``h = 2HC``.

    ``C~ = sum_gamma a / (a + |gamma|^{d+1})`` with ``a = (B2 C*)^{2(d+1)}``
    (Roumieu) or ``a = C^{2(d+1)}`` (Beurling), reported as a truncated sum
    plus a tail bound.  ``scale`` is ``C*`` (Roumieu) or ``h`` (Beurling,
    rounded to the nearest probe).
    """
    if mode not in ("roumieu", "beurling"):
        raise ValueError("mode must be 'roumieu' or 'beurling'")
    f = _as_expansion(c)
    d = f.d
    if mode == "roumieu":
        ab = _absorption_witness(M, "roumieu", lam)
        kap, B1, B2 = ab["kappa"], ab["B1"], ab["B2"]
        w = _hermite_witness(M, "hermite_roumieu", kap)
        kap2, H, logB = w["kappa"], w["H"], w["log_B"]
        Cs = float(scale)
        C = max(w["C"], B2 * Cs)
        a = (B2 * Cs) ** (2 * (d + 1))
        fun_seq, fun_scale = M.sequence(kap2), 2 * H * C
        coef_seq, coef_scale = M.sequence(lam), Cs
        wit = {"kappa": kap, "kappa_prime": kap2, "B1": B1, "B2": B2, "log_B": logB, "C": C, "H": H,
               "C_star": Cs}
    else:
        w = _hermite_witness(M, "hermite_beurling", lam)
        kap, H, logB = w["kappa"], w["H"], w["log_B_max"]
        probes = np.array(w["C_probes"])
        C = float(probes[np.argmin(np.abs(np.log(probes) - math.log(scale / (2 * H))))])
        ab = _absorption_witness(M, "beurling", kap)
        kap2, B1, B2 = ab["kappa"], ab["B1"], ab["B2"]
        h = 2 * H * C
        a = C ** (2 * (d + 1))
        fun_seq, fun_scale = M.sequence(lam), h
        coef_seq, coef_scale = M.sequence(kap2), h / (2 * H * B2)
        wit = {"kappa": kap, "kappa_prime": kap2, "B1": B1, "B2": B2, "log_B": logB, "C": C, "H": H,
               "h": h, "h_tilde": coef_scale}
    Ct, tail = summability_constant(a, d, K)
    log_const = logB + math.log(B1) + math.log(Ct + tail)
    rhs = coeff_norm(f, coef_seq, coef_scale)
    lhs = seminorm(f, fun_seq, fun_scale, "L2", index_cap, absolute=True)
    plain = seminorm(f, fun_seq, fun_scale, "L2", index_cap)
    rng = {"lambda": lam, "d": d, "summation_orders": K, "fun_scale": fun_scale, "coeff_scale": coef_scale}
    rep = compare_bounds(lhs, log_const, rhs, f"Tinv_continuity_{mode}", rng)
    rep.witnesses.update(wit)
    rep.witnesses.update({"C_tilde": Ct, "C_tilde_tail": tail, "log_plain_seminorm": plain.log_value,
                          "plain_below_absolute": bool(log_close_le(plain.log_value, lhs.log_value))})
    rep.details["cauchy"] = _block_increments(f, fun_seq, fun_scale, index_cap)
    return rep


# ---------------------------------------------------------------------------
# bounds behind the coefficient estimates


def verify_raising_bound(f: HermiteExpansion, M: WeightSequence, N: WeightSequence, gamma_max: int,
                         mixed: ConditionReport | None = None, index_cap: int | None = None) -> ConditionReport:
    """Check ``||A_+^gamma f||_2 <= C1 B e^{d/2} (9 sqrt2 H C)^{|gamma|} N_gamma`` for ``|gamma| <= gamma_max``.

    ``(B, C, H)`` are the witnesses of the mixed condition for ``(M, N)`` and
    ``C1 = ||f||_{2, M, C}``.  The left side is exact.

    Raises
    ------
    HypothesisError
        When the mixed condition is not verified.
    """
    if mixed is None:
        mixed = check_mixed_condition(M, N)
    if mixed.verdict != Verdict.VERIFIED:
        raise HypothesisError(f"mixed condition is {mixed.verdict.value}")
    C, H, logB = mixed.witnesses["C"], mixed.witnesses["H"], mixed.witnesses["log_B"]
    d = f.d
    C1 = seminorm(f, M, C, "L2", index_cap)
    base = math.log(9 * math.sqrt(2) * H * C)
    worst, first, checked = math.inf, None, 0
    cache: dict[tuple[int, ...], HermiteExpansion] = {(0,) * d: f}
    for gamma in enumerate_indices(d, gamma_max):
        if gamma not in cache:
            j = next(i for i, v in enumerate(gamma) if v > 0)
            prev = gamma[:j] + (gamma[j] - 1,) + gamma[j + 1:]
            cache[gamma] = apply_power("A_plus", tuple(int(i == j) for i in range(d)), cache[prev])
        lhs = cache[gamma].norm()
        if lhs <= 0:
            continue
        log_lhs = math.log(lhs)
        log_rhs = C1.log_value + logB + 0.5 * d + sum(gamma) * base + N.log_m(gamma)
        checked += 1
        worst = min(worst, log_rhs - log_lhs)
        if first is None and not log_close_le(log_lhs, log_rhs):
            first = {"gamma": list(gamma), "log_lhs": log_lhs, "log_rhs": log_rhs}
    if first is None:
        verdict = Verdict.VERIFIED
    else:
        verdict = Verdict.VIOLATED if C1.certified else Verdict.INCONCLUSIVE
    wit = {"B": math.exp(logB), "C": C, "H": H, "log_C1": C1.log_value, "C1_status": C1.status,
           "min_log_margin": worst}
    return ConditionReport("raising_bound", verdict, wit, {"gamma_max": gamma_max, "cases": checked}, first,
                           {}, [mixed])


def verify_hermite_norm_bound(M: WeightSequence, N: WeightSequence, gamma_max: int,
                              mixed: ConditionReport | None = None, index_cap: int | None = None) -> ConditionReport:
    """Check ``||H_gamma||_{2, N, 2HC} <= B exp(omega_M(gamma^{1/2} / C))`` for ``|gamma| <= gamma_max``.

    ``(B, C, H)`` are the mixed-condition witnesses for ``(M, N)``.  The
    left side is a truncated seminorm, so only certified values can refute.
    """
    if mixed is None:
        mixed = check_mixed_condition(M, N)
    if mixed.verdict != Verdict.VERIFIED:
        raise HypothesisError(f"mixed condition is {mixed.verdict.value}")
    C, H, logB = mixed.witnesses["C"], mixed.witnesses["H"], mixed.witnesses["log_B"]
    d = M.d
    subs = []
    for gamma in enumerate_indices(d, gamma_max):
        lhs = seminorm(HermiteExpansion.basis(gamma), N, 2 * H * C, "L2", index_cap)
        log_rhs = logB + float(omega_many(M, np.sqrt(np.array([gamma], dtype=float)) / C)[0])
        subs.append(compare_bounds(lhs, 0.0, log_rhs, f"hermite_norm@{list(gamma)}", {"gamma": list(gamma)}))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    wit = {"B": math.exp(logB), "C": C, "H": H,
           "min_log_margin": min(s.witnesses["log_margin"] for s in subs)}
    return ConditionReport("hermite_norm_bound", verdict, wit, {"gamma_max": gamma_max}, None, {}, subs)


# ---------------------------------------------------------------------------
# Fourier transform


def fourier_transform(f: HermiteExpansion) -> HermiteExpansion:
    """Unitary Fourier transform ``(2 pi)^{-d/2} int f(x) e^{-i x.xi} dx``.

    Acts by ``H_gamma -> (-i)^{|gamma|} H_gamma``.  The rotation by powers of
    ``-i`` only swaps and negates real and imaginary parts, so coefficient
    magnitudes are preserved bit for bit.
    """
    arr = f.array
    orders = np.indices(arr.shape).sum(axis=0) % 4 if arr.ndim else np.zeros((), dtype=int)
    re, im = arr.real, arr.imag
    new_re = np.select([orders == 0, orders == 1, orders == 2, orders == 3], [re, im, -re, -im])
    new_im = np.select([orders == 0, orders == 1, orders == 2, orders == 3], [im, -re, -im, re])
    return HermiteExpansion(f.d, new_re + 1j * new_im)


def fourier_quadrature(f: HermiteExpansion, xi: np.ndarray, n: int) -> np.ndarray:
    """``(2 pi)^{-d/2} int f(x) e^{-i x.xi} dx`` by Gauss-Hermite quadrature.

    After ``x = sqrt2 y`` the integrand is ``(f e^{x^2/2})(sqrt2 y) e^{-i sqrt2 y.xi}``
    against ``e^{-|y|^2}``, an entire function times the Gauss weight.
    """
    d = f.d
    y, w = gauss_hermite_quadrature(n)
    pts, wt = _tensor_nodes(y, w, d)
    x = math.sqrt(2.0) * pts
    fv = f.evaluate_points(x, scaled=True)
    xi = np.asarray(xi, dtype=float).reshape(-1, d)
    phase = np.exp(-1j * xi @ x.T)
    return math.pi ** (-d / 2) * (phase * (wt * fv)[None, :]).sum(axis=1)


def fourier_check(f: HermiteExpansion, xi: np.ndarray | None = None, n: int | None = None,
                  tol: float = 1e-8) -> ConditionReport:
    """Check the Hermite eigen-relation of the Fourier transform.

    (a) coefficient magnitudes of ``F f`` equal those of ``f`` exactly;
    (b) ``F f`` evaluated from its coefficients agrees with direct
    quadrature at sample points ``xi`` within ``tol`` (relative to the
    coefficient ``l1`` norm).

    Raises
    ------
    QuadratureError
        When two quadrature orders disagree beyond ``tol``.
    """
    d = f.d
    if xi is None:
        base = np.array([0.0, 1.0, 2.0, -0.7])
        xi = np.stack(np.meshgrid(*([base] * d), indexing="ij"), axis=-1).reshape(-1, d)
    xi = np.asarray(xi, dtype=float).reshape(-1, d)
    Ff = fourier_transform(f)
    exact_mag = bool(np.array_equal(np.abs(Ff.array), np.abs(f.array)))
    scale = max(1.0, float(np.sum(np.abs(f.array))))
    n1 = n if n is not None else f.max_degree + 48
    q1 = fourier_quadrature(f, xi, n1)
    q2 = fourier_quadrature(f, xi, n1 + 16)
    if float(np.max(np.abs(q1 - q2), initial=0.0)) > tol * scale:
        raise QuadratureError("Fourier quadrature has not converged")
    ev = Ff.evaluate_points(xi)
    err = float(np.max(np.abs(ev - q2), initial=0.0))
    ok = exact_mag and err <= tol * scale
    wit = {"max_pointwise_error": err, "magnitudes_exact": exact_mag}
    ce = None if ok else {"max_pointwise_error": err, "magnitudes_exact": exact_mag}
    return ConditionReport("fourier_eigen", Verdict.VERIFIED if ok else Verdict.VIOLATED, wit,
                           {"xi": xi.tolist(), "quadrature_order": n1 + 16, "tol": tol}, ce)
