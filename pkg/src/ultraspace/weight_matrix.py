"""Weight matrices ``(M^{(lambda)})_{lambda > 0}`` and their condition calculus.

Quantifiers over ``lambda`` range over a declared finite grid.  For the
inner ``exists kappa`` the search walks grid values on the allowed side of
``lambda`` (nearest first); matrices defined by a callable family may also
use a few extra doublings or halvings beyond the grid.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    ConditionReport,
    Verdict,
    combine_verdicts,
    enumerate_indices,
    geometric_grid,
    log_alpha_pow_half_alpha,
    log_close_le,
    search_witness,
    settle_status,
)
from .weight_seq import WeightSequence, _pairs, omega_many, root_divergence_report

DEFAULT_LAMBDA_GRID = tuple(2.0 ** k for k in range(-6, 7))
MONOTONE_CHECK_ORDER = 24
EXTRA_STEPS = 4

MATRIX_CONDITIONS = {
    # name: (kind, shape)
    "hermite_roumieu": ("roumieu", "hermite"),
    "hermite_beurling": ("beurling", "hermite"),
    "product_roumieu": ("roumieu", "product"),
    "product_beurling": ("beurling", "product"),
    "derivation_roumieu": ("roumieu", "derivation"),
    "derivation_beurling": ("beurling", "derivation"),
    "mg_roumieu": ("roumieu", "mg"),
    "mg_beurling": ("beurling", "mg"),
}


def default_max_order(d: int) -> int:
    return {1: 48, 2: 16, 3: 8}.get(d, 6)


class HypothesisError(ValueError):
    """A prerequisite condition was found violated."""


class WeightMatrix:
    """A family of weight sequences indexed by ``lambda > 0``.

    Parameters
    ----------
    d : int
        Dimension.
    family : callable
        ``lambda -> WeightSequence``; results are memoised per ``lambda``.
    lambda_grid : sequence of float
        Sampled ``lambda`` values.
    name : str
        Label for reports.
    callable_family : bool
        Whether ``family`` accepts ``lambda`` off the grid.
    check_order : int
        Orders up to which monotonicity in ``lambda`` is asserted at
        construction.
    """

    def __init__(self, d: int, family: Callable[[float], WeightSequence], lambda_grid: Sequence[float],
                 name: str = "matrix", callable_family: bool = True,
                 check_order: int = MONOTONE_CHECK_ORDER):
        grid = np.array(sorted(float(v) for v in lambda_grid))
        if grid.size == 0:
            raise ValueError("lambda grid is empty")
        if np.any(grid <= 0):
            raise ValueError("lambda values must be positive")
        self.d = int(d)
        self.lambda_grid = grid
        self.name = name
        self.callable_family = callable_family
        self._family = family
        self._cache: dict[float, WeightSequence] = {}
        self._lock = threading.Lock()
        self._check_monotone(check_order)

    def __repr__(self) -> str:
        return f"WeightMatrix(d={self.d}, name={self.name!r}, lambdas={self.lambda_grid.size})"

    def sequence(self, lam: float) -> WeightSequence:
        lam = float(lam)
        seq = self._cache.get(lam)
        if seq is None:
            if not self.callable_family and not np.any(np.isclose(self.lambda_grid, lam, rtol=0, atol=0)):
                raise KeyError(f"lambda={lam:g} is not on the grid of {self.name!r}")
            seq = self._family(lam)
            if seq.d != self.d:
                raise ValueError("family returned a sequence of the wrong dimension")
            with self._lock:
                seq = self._cache.setdefault(lam, seq)
        return seq

    def log_m(self, lam: float, alpha: Sequence[int]) -> float:
        return self.sequence(lam).log_m(alpha)

    @property
    def isotropic(self) -> bool:
        return self.sequence(self.lambda_grid[0]).structure == "isotropic"

    def _check_monotone(self, P: int) -> None:
        idx = np.array(enumerate_indices(self.d, P), dtype=int).reshape(-1, self.d)
        prev = None
        for lam in self.lambda_grid:
            seq = self.sequence(lam)
            if abs(seq.log_m((0,) * self.d)) > 1e-12:
                raise ValueError(f"member lambda={lam:g} is not normalized")
            n = P if seq.max_order is None else min(P, seq.max_order)
            cur = seq.log_many(idx[idx.sum(axis=1) <= n])
            if prev is not None:
                k = min(prev[1].size, cur.size)
                ok = log_close_le(prev[1][:k], cur[:k])
                if not ok.all():
                    i = int(np.argmin(ok))
                    raise ValueError(f"matrix not monotone in lambda: M^({prev[0]:g}) > M^({lam:g}) "
                                     f"at alpha={idx[i].tolist()}")
            prev = (lam, cur)

    def kappa_candidates(self, lam: float, kind: str) -> list[float]:
        """``kappa`` values searched for a given ``lambda``, nearest first."""
        g = self.lambda_grid
        if kind == "roumieu":
            c = [float(v) for v in g if v >= lam * (1 - 1e-12)]
            if self.callable_family:
                top = max(c) if c else lam
                c += [top * 2.0 ** k for k in range(1, EXTRA_STEPS + 1)]
        else:
            c = [float(v) for v in g[::-1] if v <= lam * (1 + 1e-12)]
            if self.callable_family:
                bot = min(c) if c else lam
                c += [bot * 2.0 ** -k for k in range(1, EXTRA_STEPS + 1)]
        if not c:
            c = [float(lam)]
        return c


# ---------------------------------------------------------------------------
# constructors


def constant_matrix(M: WeightSequence, lambda_grid: Sequence[float] = (1.0,)) -> WeightMatrix:
    """The matrix with ``M^{(lambda)} = M`` for every ``lambda``."""
    return WeightMatrix(M.d, lambda lam: M, lambda_grid, name=f"constant[{M.name}]")


def matrix_from_tables(tables: dict[float, WeightSequence], d: int, name: str = "table") -> WeightMatrix:
    """Matrix defined only at the listed ``lambda`` values."""
    tab = {float(k): v for k, v in tables.items()}
    return WeightMatrix(d, lambda lam: tab[float(lam)], list(tab), name=name, callable_family=False)


# ---------------------------------------------------------------------------
# condition data


def _derivation_points(d: int, P: int):
    idx = np.array(enumerate_indices(d, P - 1), dtype=int).reshape(-1, d)
    base = np.vstack([idx] * d)
    jj = np.repeat(np.arange(d), idx.shape[0])
    shifted = base.copy()
    shifted[np.arange(base.shape[0]), jj] += 1
    return base, shifted, jj


def _simple_data(M: WeightMatrix, shape: str, kind: str, lam: float, kap: float, P: int):
    """``D`` and exponent for ``D <= e log A`` at one ``(lambda, kappa)`` pair.

    ``small`` is the member on the left-hand side for Roumieu conditions
    (``lambda``) and for Beurling conditions (``kappa``).
    """
    lhs_seq = M.sequence(lam if kind == "roumieu" else kap)
    rhs_seq = M.sequence(kap if kind == "roumieu" else lam)
    d = M.d
    if shape == "derivation":
        base, sh, jj = _derivation_points(d, P)
        D = lhs_seq.log_many(sh) - rhs_seq.log_many(base)
        e = base.sum(axis=1) + 1.0
        desc = lambda i: {"alpha": base[i].tolist(), "j": int(jj[i])}
        return D, e, desc
    a, b = _pairs(d, P)
    s = a + b
    e = s.sum(axis=1).astype(float)
    if shape == "product":
        D = lhs_seq.log_many(a) + lhs_seq.log_many(b) - rhs_seq.log_many(s)
    else:  # mg
        D = lhs_seq.log_many(s) - rhs_seq.log_many(a) - rhs_seq.log_many(b)
    desc = lambda i: {"alpha": a[i].tolist(), "beta": b[i].tolist()}
    return D, e, desc


def _order_set(P: int, dense: int = 16, sparse: int = 24) -> np.ndarray:
    """Orders ``0..dense`` plus a geometric sample up to ``P``."""
    extra = np.unique(np.round(np.geomspace(dense, max(P, dense), sparse)).astype(int))
    return np.unique(np.concatenate([np.arange(min(dense, P) + 1), extra[extra <= P]]))


def _hermite_data(M: WeightMatrix, kind: str, lam: float, kap: float, P: int):
    """``D`` with exponents of ``C`` and ``H`` for the Hermite-type conditions.

    For isotropic members the supremum over ``|alpha| = p`` of
    ``alpha^{alpha/2}`` is ``p^{p/2}``, so the check runs over pairs of
    orders ``(p, q)`` with ``p <= P`` and ``q`` in a sparse set.
    """
    lhs_seq = M.sequence(lam if kind == "roumieu" else kap)
    rhs_seq = M.sequence(kap if kind == "roumieu" else lam)
    if lhs_seq.structure == "isotropic" and rhs_seq.structure == "isotropic":
        qs = _order_set(P)
        p, q = np.meshgrid(np.arange(P + 1), qs, indexing="ij")
        p, q = p.ravel(), q.ravel()
        keep = p + q <= P
        p, q = p[keep], q[keep]
        half = np.where(p > 0, 0.5 * p * np.log(np.maximum(p, 1)), 0.0)
        D = half + lhs_seq.log_orders(int(qs.max()))[q] - rhs_seq.log_orders(P)[p + q]
        return D, p.astype(float), (p + q).astype(float), lambda i: {"order_alpha": int(p[i]), "order_beta": int(q[i])}
    a, b = _pairs(M.d, P)
    half = np.array([log_alpha_pow_half_alpha(r) for r in a])
    D = half + lhs_seq.log_many(b) - rhs_seq.log_many(a + b)
    return (D, a.sum(axis=1).astype(float), (a + b).sum(axis=1).astype(float),
            lambda i: {"alpha": a[i].tolist(), "beta": b[i].tolist()})


def beurling_probes(H: float | None = None, kmin: int = -8) -> np.ndarray:
    """Probe values for a universally quantified ``C``: ``2^k / H`` for ``kmin <= k <= 0``."""
    base = 2.0 ** np.arange(kmin, 1)
    return base / H if H else base


def _long_root_check(seq: WeightSequence, P: int) -> ConditionReport:
    n = max(P, 512) if seq.structure == "isotropic" else P
    if seq.max_order is not None:
        n = min(n, seq.max_order)
    return root_divergence_report(seq, max(n, 8))


def _beurling_probe_status(D, ea, es, H: float, margin: float) -> tuple[str, float]:
    """Combined settle status over the probes ``C = 2^k / H``.

    With ``C H = 2^k`` the exponent of ``H`` reduces to ``|beta|``.
    """
    worst, st_all = 0.0, "settled"
    eb = es - ea
    for k in range(-8, 1):
        R = D - ea * (k * math.log(2.0)) - eb * math.log(H)
        st, m = settle_status(R, es, margin)
        if st == "growing":
            return "growing", m
        if st == "unclear":
            st_all = "unclear"
        worst = max(worst, m)
    return st_all, worst


def _per_lambda_hermite(M: WeightMatrix, cond: str, lam: float, P0: int, grid: np.ndarray,
                        margin: float, P_cap: int) -> ConditionReport:
    kind = MATRIX_CONDITIONS[cond][0]
    cands = M.kappa_candidates(lam, kind)
    extreme = max(cands) if kind == "roumieu" else min(cands)
    root_seq = M.sequence(extreme if kind == "roumieu" else lam)
    roots = _long_root_check(root_seq, P0)
    if roots.verdict == Verdict.VIOLATED:
        return ConditionReport(f"{cond}@{lam:g}", Verdict.VIOLATED, {}, {"lambda": lam},
                               {"reason": "bounded roots", "kappa": extreme, **(roots.counterexample or {})})
    iso = M.isotropic
    P = P0
    cG, hG = math.log(grid[-1]), math.log(grid[-1])
    while True:
        D, ea, es, desc = _hermite_data(M, kind, lam, extreme, P)
        if kind == "roumieu":
            st, _ = settle_status(D - ea * cG - es * hG, es, margin)
        else:
            st, _ = _beurling_probe_status(D, ea, es, grid[-1], margin)
        if st == "settled" or not iso or P >= P_cap:
            break
        P *= 2
    rng = {"lambda": lam, "max_order": P}
    if st != "settled":
        verdict = Verdict.VIOLATED if st == "growing" else Verdict.INCONCLUSIVE
        ce = {"kappa": extreme, "reason": "residual keeps growing"} if st == "growing" else None
        return ConditionReport(f"{cond}@{lam:g}", verdict, {}, rng, ce)
    # the extreme member works; report the nearest kappa and smallest constants
    for kap in cands:
        D, ea, es, desc = _hermite_data(M, kind, lam, kap, P)
        if kind == "roumieu":
            res = search_witness(D, [ea, es], [grid, grid], ["C", "H"], free="B", orders=es, margin=margin)
            if res.status == Verdict.VERIFIED:
                return ConditionReport(f"{cond}@{lam:g}", Verdict.VERIFIED,
                                       {"kappa": kap, **res.constants, "log_B": max(res.log_free, 0.0)}, rng)
            continue
        for H in grid:
            st, worst = _beurling_probe_status(D, ea, es, H, margin)
            if st == "settled":
                return ConditionReport(f"{cond}@{lam:g}", Verdict.VERIFIED,
                                       {"kappa": kap, "H": float(H), "log_B_max": max(worst, 0.0),
                                        "C_probes": [float(c) for c in beurling_probes(H)]}, rng)
    return ConditionReport(f"{cond}@{lam:g}", Verdict.INCONCLUSIVE, {}, rng)


def _per_lambda(M: WeightMatrix, cond: str, lam: float, P: int, grid: np.ndarray,
                margin: float, P_cap: int = 4096) -> ConditionReport:
    kind, shape = MATRIX_CONDITIONS[cond]
    if shape == "hermite":
        return _per_lambda_hermite(M, cond, lam, P, grid, margin, P_cap)
    rng = {"lambda": lam, "max_order": P}
    agrid = grid[grid >= 1.0]
    statuses = []
    for kap in M.kappa_candidates(lam, kind):
        D, e, desc = _simple_data(M, shape, kind, lam, kap, P)
        res = search_witness(D, [e], [agrid], ["A"])
        if res.status == Verdict.VERIFIED:
            return ConditionReport(f"{cond}@{lam:g}", Verdict.VERIFIED, {"kappa": kap, **res.constants}, rng)
        ce = None
        if res.status == Verdict.VIOLATED:
            ce = {**desc(res.worst), "kappa": kap, "log_gap": float(D[res.worst]), "A_max": float(agrid[-1])}
        statuses.append((res.status, ce))
    if statuses and all(s == Verdict.VIOLATED for s, _ in statuses):
        return ConditionReport(f"{cond}@{lam:g}", Verdict.VIOLATED, {}, rng, statuses[0][1])
    return ConditionReport(f"{cond}@{lam:g}", Verdict.INCONCLUSIVE, {}, rng)


def check_matrix_condition(M: WeightMatrix, condition: str, max_order: int | None = None,
                           lambdas: Sequence[float] | None = None, grid: np.ndarray | None = None,
                           margin: float = 1.0) -> ConditionReport:
    """Audit a matrix condition for every sampled ``lambda``.

    Conditions
    ----------
    ``hermite_roumieu``
        ``alpha^{alpha/2} M^(lam)_beta <= B C^|alpha| H^|alpha+beta| M^(kap)_{alpha+beta}``, ``kap >= lam``.
    ``hermite_beurling``
        ``alpha^{alpha/2} M^(kap)_beta <= B C^|alpha| H^|alpha+beta| M^(lam)_{alpha+beta}``,
        ``kap <= lam``, some ``H`` and every probed ``C``.
    ``product_roumieu`` / ``product_beurling``
        ``M_alpha M_beta <= A^|alpha+beta| M_{alpha+beta}`` across members.
    ``derivation_roumieu`` / ``derivation_beurling``
        ``M_{alpha+e_j} <= A^{|alpha|+1} M_alpha`` across members.
    ``mg_roumieu`` / ``mg_beurling``
        ``M_{alpha+beta} <= A^|alpha+beta| M_alpha M_beta`` across members.

    The Roumieu forms take the smaller member on the left side and search
    ``kappa >= lambda``; the Beurling forms search ``kappa <= lambda``.
    """
    if condition not in MATRIX_CONDITIONS:
        raise ValueError(f"unknown matrix condition {condition!r}")
    lams = M.lambda_grid if lambdas is None else np.array(sorted(float(v) for v in lambdas))
    if len(lams) == 0:
        raise ValueError("lambda grid is empty")
    grid = geometric_grid() if grid is None else np.asarray(grid, dtype=float)
    P = default_max_order(M.d) if max_order is None else int(max_order)
    subs = [_per_lambda(M, condition, float(lam), P, grid, margin) for lam in lams]
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    table = [{"lambda": float(lam), "verdict": s.verdict.value, **s.witnesses} for lam, s in zip(lams, subs)]
    ce = None
    if verdict == Verdict.VIOLATED:
        bad = next(s for s in subs if s.verdict == Verdict.VIOLATED)
        ce = {"lambda": bad.tested_range["lambda"], **(bad.counterexample or {})}
    wit = {"per_lambda": table} if verdict == Verdict.VERIFIED else {}
    rng = {"lambdas": [float(v) for v in lams], "max_order": P,
           "grid": [float(grid[0]), float(grid[-1]), int(grid.size)]}
    return ConditionReport(condition, verdict, wit, rng, ce, {"per_lambda": table}, subs)


# ---------------------------------------------------------------------------
# polynomial absorption


@dataclass
class ChainWitness:
    kappa: float
    A: float
    steps: list[dict]


def derivation_chain(M: WeightMatrix, kind: str, lam: float, steps: int, max_order: int | None = None,
                     grid: np.ndarray | None = None) -> ChainWitness:
    """Iterate the derivation condition ``steps`` times starting at ``lam``.

    Each step searches a witness ``(kappa_i, A_i)`` at the current member;
    the result is ``kappa = kappa_steps`` and ``A = (max A_i)^steps``.
    """
    grid = geometric_grid() if grid is None else np.asarray(grid, dtype=float)
    cond = "derivation_roumieu" if kind == "roumieu" else "derivation_beurling"
    P = default_max_order(M.d) if max_order is None else int(max_order)
    cur, rec = float(lam), []
    for _ in range(steps):
        r = _per_lambda(M, cond, cur, P, grid, 1.0)
        if r.verdict != Verdict.VERIFIED:
            raise HypothesisError(f"{cond} has no witness at lambda={cur:g} ({r.verdict.value})")
        rec.append({"from": cur, "kappa": r.witnesses["kappa"], "A": r.witnesses["A"]})
        cur = r.witnesses["kappa"]
    amax = max(s["A"] for s in rec) if rec else 1.0
    return ChainWitness(cur, amax ** steps, rec)


def polynomial_absorption(M: WeightMatrix, kind: str, N: int | None = None,
                          t_samples: np.ndarray | None = None, lambdas: Sequence[float] | None = None,
                          max_order: int | None = None) -> ConditionReport:
    """Absorb a polynomial factor into the associated function.

    With ``N`` given, checks for ``t != 0``

    * Beurling: ``omega_{M^(lam)}(t) + N log|t| <= omega_{M^(kap)}(A t) + B``, ``kap <= lam``;
    * Roumieu: ``omega_{M^(lam)}(t) + N log|t| <= omega_{M^(kap)}(A t) + B``, ``kap >= lam``
      (this form implies the one with the members swapped on both sides);

    with ``A = (max A_i)^N`` from ``N`` chained derivation witnesses and
    ``B = max{(N/2) log d, 1}``.  With ``N = None`` checks

    * Roumieu: ``(1+|t|)^{2(d+1)} e^{omega_{M^(kap)}(t)} <= B1 e^{omega_{M^(lam)}(B2 t)}``;
    * Beurling: ``(1+|t|)^{2(d+1)} e^{omega_{M^(lam)}(t)} <= B1 e^{omega_{M^(kap)}(B2 t)}``;

    with ``2(d+1)`` chained steps, ``B2 = A`` and ``B1`` the larger of
    ``(4d)^{d+1}`` and the maximum of the left side over ``|t|_inf <= 1``.
    """
    if kind not in ("roumieu", "beurling"):
        raise ValueError("kind must be 'roumieu' or 'beurling'")
    d = M.d
    if t_samples is None:
        rng = np.random.default_rng(0)
        radii = np.logspace(-2, 4, 200)
        dirs = rng.normal(size=(200, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        t_samples = radii[:, None] * dirs
    ts = np.asarray(t_samples, dtype=float).reshape(-1, d)
    lams = M.lambda_grid if lambdas is None else [float(v) for v in lambdas]
    steps = 2 * (d + 1) if N is None else int(N)
    norms = np.linalg.norm(ts, axis=1)
    subs = []
    for lam in lams:
        try:
            chain = derivation_chain(M, kind, lam, steps, max_order)
        except HypothesisError as exc:
            subs.append(ConditionReport(f"absorption@{lam:g}", Verdict.INCONCLUSIVE, {}, {"lambda": lam},
                                        None, {"reason": str(exc)}))
            continue
        kap, A = chain.kappa, chain.A
        Ml, Mk = M.sequence(lam), M.sequence(kap)
        if N is not None:
            B = max(0.5 * N * math.log(d), 1.0)
            keep = norms > 0
            lhs = omega_many(Ml, ts[keep]) + N * np.log(norms[keep])
            rhs = omega_many(Mk, A * ts[keep]) + B
            wit = {"kappa": kap, "A": A, "B": B}
            pts = ts[keep]
        else:
            small, big = (Mk, Ml) if kind == "roumieu" else (Ml, Mk)
            corner = float(omega_many(small, np.ones((1, d)))[0])
            C_lam = 2 * (d + 1) * math.log1p(math.sqrt(d)) + corner
            logB1 = max((d + 1) * math.log(4 * d), C_lam)
            lhs = 2 * (d + 1) * np.log1p(norms) + omega_many(small, ts)
            rhs = logB1 + omega_many(big, A * ts)
            wit = {"kappa": kap, "B1": math.exp(logB1), "B2": A}
            pts = ts
        ok = log_close_le(lhs, rhs)
        rng = {"lambda": lam, "samples": int(pts.shape[0]), "steps": steps}
        if ok.all():
            subs.append(ConditionReport(f"absorption@{lam:g}", Verdict.VERIFIED, wit, rng, None,
                                        {"chain": chain.steps}))
        else:
            i = int(np.argmin(ok))
            subs.append(ConditionReport(f"absorption@{lam:g}", Verdict.VIOLATED, wit, rng,
                                        {"t": pts[i].tolist(), "lhs": float(lhs[i]), "rhs": float(rhs[i])},
                                        {"chain": chain.steps}))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    cid = f"absorption_{kind}_" + ("power" if N is not None else "one_plus")
    return ConditionReport(cid, verdict, {}, {"lambdas": [float(v) for v in lams], "N": N}, None, {}, subs)


# ---------------------------------------------------------------------------
# Hermite membership


def _membership_profile(M: WeightSequence, P: int) -> tuple[np.ndarray, np.ndarray, int]:
    """``D_p = max_{|alpha|=p} (log alpha^{alpha/2} - log M_alpha)`` and its multiplicity.

    Product sequences reduce to one axis (the sup splits over coordinates,
    so the free constant scales by ``d``).
    """
    if M.structure == "isotropic":
        p = np.arange(P + 1, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            half = np.where(p > 0, 0.5 * p * np.log(np.where(p > 0, p, 1.0)), 0.0)
        return half - M.log_orders(P), p, 1
    if M.structure == "product":
        k = np.arange(P + 1, dtype=float)
        half = np.where(k > 0, 0.5 * k * np.log(np.where(k > 0, k, 1.0)), 0.0)
        return half - M.log_axis(P), k, M.d
    idx = np.array(enumerate_indices(M.d, P), dtype=int).reshape(-1, M.d)
    half = np.array([log_alpha_pow_half_alpha(r) for r in idx])
    return half - M.log_many(idx), idx.sum(axis=1).astype(float), 1


def _membership_single(M: WeightSequence, logC: float, P_start: int, P_max: int,
                       margin: float) -> tuple[str, float, int]:
    """Settle test for ``sup_alpha log alpha^{alpha/2} - |alpha| log C - log M_alpha``."""
    P = P_start
    cap = P_max if M.structure != "general" else min(P_max, default_max_order(M.d) * 2)
    if M.max_order is not None:
        cap = min(cap, M.max_order)
    while True:
        P = min(P, cap)
        D, orders, mult = _membership_profile(M, P)
        st, m = settle_status(D - orders * logC, orders, margin)
        # a residual still rising may turn later, so only the cap decides growth
        if st == "settled" or P >= cap:
            return st, mult * m, P
        P *= 2


def hermite_membership_test(M: WeightMatrix, kind: str, lambdas: Sequence[float] | None = None,
                            grid: np.ndarray | None = None, check_hypotheses: bool = True,
                            P_start: int = 256, P_max: int = 1 << 16, margin: float = 1.0) -> ConditionReport:
    """Decide whether the Hermite functions have finite matrix seminorms.

    Roumieu: some ``lambda`` and ``C`` admit ``C1`` with
    ``alpha^{alpha/2} <= C1 C^|alpha| M^(lam)_alpha``.  Beurling: every
    sampled ``lambda`` and every probe ``C = 2^k`` (``-8 <= k <= 0``) admit
    such a ``C1``.  ``C1`` is fitted and accepted once the residual stops
    growing; ranges are doubled from ``P_start`` up to ``P_max`` while the
    settle test is undecided.
    """
    if kind not in ("roumieu", "beurling"):
        raise ValueError("kind must be 'roumieu' or 'beurling'")
    lams = M.lambda_grid if lambdas is None else np.array(sorted(float(v) for v in lambdas))
    grid = geometric_grid() if grid is None else np.asarray(grid, dtype=float)
    hyps = []
    if check_hypotheses:
        names = ("product_roumieu", "derivation_roumieu") if kind == "roumieu" else \
            ("product_beurling", "derivation_beurling")
        for nm in names:
            r = check_matrix_condition(M, nm, max_order=min(default_max_order(M.d), 24), lambdas=lams)
            if r.verdict == Verdict.VIOLATED:
                raise HypothesisError(f"hypothesis {nm} is violated for {M.name!r}")
            hyps.append(r)
    rng = {"lambdas": [float(v) for v in lams], "P_max": P_max}
    subs: list[ConditionReport] = []
    if kind == "roumieu":
        any_unclear = False
        for lam in lams[::-1]:
            seq = M.sequence(lam)
            roots = _long_root_check(seq, 64)
            if roots.verdict == Verdict.VIOLATED:
                subs.append(ConditionReport(f"membership@{lam:g}", Verdict.VIOLATED, {}, {"lambda": float(lam)},
                                            {"reason": "bounded roots", **(roots.counterexample or {})}))
                continue
            # the largest C decides existence; the smallest working C is then
            # read off at the same range
            st, m, P = _membership_single(seq, math.log(grid[-1]), P_start, P_max, margin)
            if st == "settled":
                D, orders, mult = _membership_profile(seq, P)
                for C in grid:
                    st2, m2 = settle_status(D - orders * math.log(C), orders, margin)
                    if st2 == "settled":
                        wit = {"lambda": float(lam), "C": float(C), "log_C1": max(mult * m2, 0.0),
                               "max_order": P}
                        return ConditionReport("membership_roumieu", Verdict.VERIFIED, wit, rng, None, {},
                                               hyps + subs)
            any_unclear |= st == "unclear"
            subs.append(ConditionReport(f"membership@{lam:g}", Verdict.INCONCLUSIVE if any_unclear
                                        else Verdict.VIOLATED, {}, {"lambda": float(lam)}))
        verdict = Verdict.INCONCLUSIVE if any_unclear else Verdict.VIOLATED
        return ConditionReport("membership_roumieu", verdict, {}, rng,
                               None if any_unclear else {"reason": "no (lambda, C) on the grids settles"},
                               {}, hyps + subs)
    table, verdicts = [], []
    for lam in lams:
        seq = M.sequence(lam)
        for C in beurling_probes(None):
            st, m, P = _membership_single(seq, math.log(C), P_start, P_max, margin)
            v = {"settled": Verdict.VERIFIED, "growing": Verdict.VIOLATED}.get(st, Verdict.INCONCLUSIVE)
            verdicts.append(v)
            table.append({"lambda": float(lam), "C": float(C), "verdict": v.value,
                          "log_C1": max(m, 0.0) if v == Verdict.VERIFIED else None, "max_order": P})
            if v == Verdict.VIOLATED:
                break
        if verdicts[-1] == Verdict.VIOLATED:
            break
    verdict = combine_verdicts(verdicts, "all")
    ce = next((r for r in table if r["verdict"] == "VIOLATED"), None)
    wit = {"per_probe": table} if verdict == Verdict.VERIFIED else {}
    return ConditionReport("membership_beurling", verdict, wit, rng, ce, {"per_probe": table}, hyps)


# ---------------------------------------------------------------------------
# quotient profile


@dataclass
class QuotientProfile:
    lambdas: np.ndarray
    log_mu: np.ndarray  # shape (len(lambdas), P + 1); column 0 is log mu_0 = 0
    report: ConditionReport


def quotient_profile(M: WeightMatrix, max_order: int = 60) -> QuotientProfile:
    """Quotients ``mu_p^(lam) = M_p^(lam) / M_{p-1}^(lam)`` and their hypotheses.

    Checks that every member is normalized (``mu_0 = 1``) and that
    ``mu^(lam) <= mu^(kap)`` pointwise for ``lam <= kap``.
    """
    if M.d != 1:
        raise ValueError("quotient profiles are one-dimensional")
    lams = M.lambda_grid
    P = int(max_order)
    rows = []
    for lam in lams:
        seq = M.sequence(lam)
        n = P if seq.max_order is None else min(P, seq.max_order)
        lm = seq.log_orders(n)
        row = np.full(P + 1, np.nan)
        row[0] = 0.0
        row[1:n + 1] = np.diff(lm)
        rows.append(row)
    L = np.array(rows)
    norm_bad = [float(l) for l in lams if abs(M.log_m(l, (0,))) > 1e-12]
    subs = [ConditionReport("normalized", Verdict.VIOLATED if norm_bad else Verdict.VERIFIED, {},
                            {"lambdas": [float(v) for v in lams]},
                            {"lambda": norm_bad[0]} if norm_bad else None)]
    ce = None
    for i in range(len(lams) - 1):
        a, b = L[i, 1:], L[i + 1, 1:]
        valid = np.isfinite(a) & np.isfinite(b)
        ok = log_close_le(a[valid], b[valid])
        if not ok.all():
            p = int(np.nonzero(valid)[0][np.argmin(ok)]) + 1
            ce = {"p": p, "lambda": float(lams[i]), "kappa": float(lams[i + 1]),
                  "log_mu_lambda": float(L[i, p]), "log_mu_kappa": float(L[i + 1, p])}
            break
    subs.append(ConditionReport("quotients_monotone_in_lambda", Verdict.VIOLATED if ce else Verdict.VERIFIED,
                                {}, {"max_order": P}, ce))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    rep = ConditionReport("quotient_profile", verdict, {}, {"max_order": P, "lambdas": [float(v) for v in lams]},
                          ce, {}, subs)
    return QuotientProfile(lams, L, rep)
