"""Series diagnostics for the nuclearity of the Hermite coefficient spaces.

The Beurling space is nuclear iff for every ``j`` some ``l > j`` makes
``sum_gamma exp(omega_{M^(1/j)}(j gamma^{1/2}) - omega_{M^(1/l)}(l gamma^{1/2}))``
finite; the Roumieu space iff for every ``k`` some ``m > k`` makes
``sum_gamma exp(omega_{M^(m)}(gamma^{1/2}/m) - omega_{M^(k)}(gamma^{1/2}/k))``
finite.  Verdicts are certificate based: convergence needs a power-law
domination coming from polynomial absorption, divergence needs an
unbounded trend of ``n`` times the per-order mass.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.special import logsumexp

from .core import (
    LOG_RTOL,
    ConditionReport,
    Verdict,
    combine_verdicts,
    enumerate_indices,
    log_close_le,
)
from .weight_matrix import (
    HypothesisError,
    WeightMatrix,
    check_matrix_condition,
    polynomial_absorption,
    quotient_profile,
)
from .weight_seq import check_condition, omega_many, root_divergence_report

DEFAULT_CAPS = {1: 4000, 2: 200, 3: 60}
DIVERGENCE_FACTOR = 4.0
QUOTIENT_ORDER = 60


class SeriesVerdict(str, enum.Enum):
    CONVERGENT = "CONVERGENT"
    DIVERGENT = "DIVERGENT"
    INCONCLUSIVE = "INCONCLUSIVE"


class Nuclearity(str, enum.Enum):
    NUCLEAR = "NUCLEAR"
    NOT_NUCLEAR = "NOT_NUCLEAR"
    UNDETERMINED = "UNDETERMINED"


# ---------------------------------------------------------------------------
# Koethe matrix


@dataclass
class KoetheMatrix:
    """Entries ``log a_{alpha, j} = -omega_{M^(j)}(alpha^{1/2} / j)``.

    Attributes
    ----------
    indices : ndarray of shape (n, d)
    j_values : ndarray of int
    log_entries : ndarray of shape (n, len(j_values))
    """

    indices: np.ndarray
    j_values: np.ndarray
    log_entries: np.ndarray
    index_cap: int

    def entry(self, alpha: Sequence[int], j: int) -> float:
        """``a_{alpha, j}`` (not in log form)."""
        row = np.nonzero(np.all(self.indices == np.asarray(alpha), axis=1))[0]
        col = np.nonzero(self.j_values == j)[0]
        if row.size == 0 or col.size == 0:
            raise KeyError("index outside the tabulated range")
        return float(np.exp(self.log_entries[row[0], col[0]]))


def _index_array(d: int, cap: int) -> np.ndarray:
    if d == 1:
        return np.arange(cap + 1).reshape(-1, 1)
    return np.array(enumerate_indices(d, cap), dtype=int).reshape(-1, d)


def build_koethe(M: WeightMatrix, j_range: Sequence[int], index_cap: int | None = None) -> KoetheMatrix:
    """Tabulate the Koethe matrix of a weight matrix at integer ``j``.

    Raises
    ------
    ValueError
        When an entry vanishes (``omega`` infinite) or the entries are not
        nondecreasing in ``j``.
    """
    js = np.array(sorted(int(j) for j in j_range))
    if js.size == 0 or js[0] < 1:
        raise ValueError("j values must be positive integers")
    cap = DEFAULT_CAPS.get(M.d, 40) if index_cap is None else int(index_cap)
    idx = _index_array(M.d, cap)
    root = np.sqrt(idx.astype(float))
    cols = []
    for j in js:
        om = omega_many(M.sequence(float(j)), root / j)
        if not np.all(np.isfinite(om)):
            bad = idx[int(np.argmax(~np.isfinite(om)))]
            raise ValueError(f"entry a_(alpha={bad.tolist()}, j={j}) vanishes: omega is infinite")
        cols.append(-om)
    L = np.stack(cols, axis=1)
    if js.size > 1:
        ok = log_close_le(L[:, :-1], L[:, 1:])
        if not ok.all():
            r, c = np.argwhere(~ok)[0]
            raise ValueError(f"Koethe entries decrease in j at alpha={idx[r].tolist()}, j={js[c]}")
    return KoetheMatrix(idx, js, L, cap)


# ---------------------------------------------------------------------------
# series


def _series_terms(M: WeightMatrix, mode: str, j: int, ell: int, idx: np.ndarray) -> np.ndarray:
    """Log terms of the nuclearity series at every index."""
    root = np.sqrt(idx.astype(float))
    if mode == "beurling":
        a = omega_many(M.sequence(1.0 / j), j * root)
        b = omega_many(M.sequence(1.0 / ell), ell * root)
    else:
        a = omega_many(M.sequence(float(ell)), root / ell)
        b = omega_many(M.sequence(float(j)), root / j)
    with np.errstate(invalid="ignore"):
        t = a - b
    # an infinite subtracted omega (beyond the evaluation threshold) makes
    # the term vanish; an infinite leading omega is a genuine divergence
    t = np.where(np.isinf(b) & np.isfinite(a), -np.inf, t)
    t = np.where(np.isinf(a), np.inf, t)
    return t


def _per_order(logt: np.ndarray, orders: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """Log mass and log max of the terms at each order ``0..cap``."""
    mass = np.full(cap + 1, -np.inf)
    mx = np.full(cap + 1, -np.inf)
    if orders.size == cap + 1 and np.array_equal(orders, np.arange(cap + 1)):
        return logt.copy(), logt.copy()
    for n in range(cap + 1):
        sel = logt[orders == n]
        if sel.size:
            mass[n] = logsumexp(sel)
            mx[n] = sel.max()
    return mass, mx


@dataclass
class Certificate:
    """Power-law domination ``term_gamma <= e^B c |gamma|^{-N/2}`` from absorption."""

    N: int
    A: float
    B: float
    kappa: float
    ell_min: int
    log_scale: float  # log of the factor multiplying |gamma|^{-N/2}, at ell_min

    def log_bound_scale(self, mode: str, j: int, ell: int) -> float:
        if mode == "beurling":
            return self.B - self.N * math.log(j)
        return self.B + self.N * math.log(ell)


def _certificate(M: WeightMatrix, mode: str, j: int) -> Certificate | None:
    d = M.d
    N = 2 * d + 1
    lam = 1.0 / j if mode == "beurling" else float(j)
    rep = polynomial_absorption(M, mode, N, lambdas=[lam])
    sub = rep.sub_reports[0]
    if sub.verdict != Verdict.VERIFIED:
        return None
    kap, A, B = sub.witnesses["kappa"], sub.witnesses["A"], sub.witnesses["B"]
    if mode == "beurling":
        h = int(math.floor(1.0 / kap)) + 2
        ell_min = max(int(math.ceil(A * h - 1e-9)), j + 1)
        scale = B - N * math.log(j)
    else:
        ell_min = max(int(math.ceil(max(kap, A * j) - 1e-9)), j + 1)
        scale = B + N * math.log(ell_min)
    return Certificate(N, A, B, kap, ell_min, scale)


def tail_bound_log(log_scale: float, d: int, N: int, K: int) -> float:
    """``log`` of ``e^{log_scale} d^{d-1}/(d-1)! K^{d - N/2} / (N/2 - d)``, a bound for orders above ``K``."""
    s = N / 2 - d
    return (log_scale + (d - 1) * math.log(d) - math.lgamma(d) + (d - N / 2) * math.log(K) - math.log(s))


def _divergence_trend(log_mass: np.ndarray, cap: int) -> tuple[bool, list[float]]:
    """Whether ``n * mass_n`` grows by ``DIVERGENCE_FACTOR`` over two decades, monotonically per decade."""
    pts = [max(1, cap // 100), max(1, cap // 10), cap]
    vals = [math.log(n) + float(log_mass[n]) for n in pts]
    grows = (vals[1] >= vals[0] and vals[2] >= vals[1]
             and vals[2] - vals[0] >= math.log(DIVERGENCE_FACTOR))
    return bool(grows and all(np.isfinite(vals))), vals


def gp_series_diagnose(M: WeightMatrix, mode: str, j: int, candidate_ls: Sequence[int] | None = None,
                       cap: int | None = None) -> ConditionReport:
    """Diagnose the nuclearity series for one ``j`` over candidate ``l > j``.

    Per candidate ``l`` the verdict is

    * ``CONVERGENT`` when the absorption certificate applies to ``l`` and the
      power-law domination holds at every computed order, so the sum is at
      most the partial sum plus an explicit tail bound;
    * ``DIVERGENT`` when ``n * mass_n`` increases by a factor of at least
      four over the last two decades of orders;
    * ``INCONCLUSIVE`` otherwise.

    The overall verdict is the best one over the candidates.  The report's
    ``witnesses["verdict"]`` holds the :class:`SeriesVerdict`.
    """
    if mode not in ("roumieu", "beurling"):
        raise ValueError("mode must be 'roumieu' or 'beurling'")
    j = int(j)
    d = M.d
    K = DEFAULT_CAPS.get(d, 40) if cap is None else int(cap)
    try:
        cert = _certificate(M, mode, j)
    except HypothesisError:
        cert = None
    if candidate_ls is None:
        ls = {j + 1, 2 * j, 4 * j}
        if cert is not None:
            ls.add(cert.ell_min)
        candidate_ls = sorted(v for v in ls if v > j)
    idx = _index_array(d, K)
    orders = idx.sum(axis=1)
    rows, subs = [], []
    for ell in candidate_ls:
        ell = int(ell)
        if ell <= j:
            raise ValueError("candidates must exceed j")
        logt = _series_terms(M, mode, j, ell, idx)
        mass, mx = _per_order(logt, orders, K)
        partial = np.logaddexp.accumulate(mass)
        verdict = SeriesVerdict.INCONCLUSIVE
        info: dict[str, Any] = {"ell": ell, "log_partial_sum": float(partial[-1])}
        if np.isinf(mass).any() and (mass == np.inf).any():
            verdict = SeriesVerdict.DIVERGENT
            info["reason"] = "infinite term"
        elif cert is not None and ell >= cert.ell_min:
            scale = cert.log_bound_scale(mode, j, ell)
            n = np.arange(1, K + 1)
            bound = scale - 0.5 * cert.N * np.log(n)
            ok = log_close_le(mx[1:], bound)
            info["certificate"] = {"N": cert.N, "A": cert.A, "B": cert.B, "kappa": cert.kappa,
                                   "ell_min": cert.ell_min, "log_scale": scale}
            if ok.all():
                tails = {int(k): tail_bound_log(scale, d, cert.N, int(k))
                         for k in sorted({max(1, K // 100), max(1, K // 10), K})}
                info["log_tail_bounds"] = tails
                info["log_sum_upper"] = float(np.logaddexp(partial[-1], tails[K]))
                verdict = SeriesVerdict.CONVERGENT
            else:
                bad = int(np.argmin(ok)) + 1
                info["certificate_failure"] = {"order": bad, "log_term": float(mx[bad]),
                                               "log_bound": float(bound[bad - 1])}
        if verdict == SeriesVerdict.INCONCLUSIVE:
            div, trend = _divergence_trend(mass, K)
            info["log_n_mass_trend"] = trend
            if div:
                verdict = SeriesVerdict.DIVERGENT
        info["verdict"] = verdict.value
        rows.append(info)
        v = {SeriesVerdict.CONVERGENT: Verdict.VERIFIED, SeriesVerdict.DIVERGENT: Verdict.VIOLATED,
             SeriesVerdict.INCONCLUSIVE: Verdict.INCONCLUSIVE}[verdict]
        subs.append(ConditionReport(f"series@l={ell}", v, {"verdict": verdict.value}, {"cap": K}, None,
                                    {"per_order_log_mass": mass.tolist(), "log_partial_sums": partial.tolist(),
                                     **info}))
    verdicts = [SeriesVerdict(r["verdict"]) for r in rows]
    if SeriesVerdict.CONVERGENT in verdicts:
        best = SeriesVerdict.CONVERGENT
    elif verdicts and all(v == SeriesVerdict.DIVERGENT for v in verdicts):
        best = SeriesVerdict.DIVERGENT
    else:
        best = SeriesVerdict.INCONCLUSIVE
    top = {SeriesVerdict.CONVERGENT: Verdict.VERIFIED, SeriesVerdict.DIVERGENT: Verdict.VIOLATED,
           SeriesVerdict.INCONCLUSIVE: Verdict.INCONCLUSIVE}[best]
    rng = {"mode": mode, "j": j, "candidate_ls": [int(v) for v in candidate_ls], "cap": K}
    return ConditionReport(f"series_{mode}", top, {"verdict": best.value}, rng, None,
                           {"per_ell": rows, "certificate_available": cert is not None}, subs)


# ---------------------------------------------------------------------------
# one-dimensional equivalence


def _difference_map(M: WeightMatrix, mode: str, j: int, ell: int, K: int) -> np.ndarray:
    k = np.arange(1, K + 1).reshape(-1, 1)
    return _series_terms(M, mode, j, ell, k)


def _structural_hypotheses(M: WeightMatrix, lams: Sequence[float], max_order: int) -> ConditionReport:
    qp = quotient_profile(M, max_order)
    subs = [qp.report]
    for lam in lams:
        seq = M.sequence(lam)
        subs.append(check_condition(seq, "log_convex", max_order))
        subs.append(root_divergence_report(seq, max(512, max_order)))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    return ConditionReport("structural_hypotheses", verdict, {}, {"lambdas": [float(v) for v in lams]},
                           None, {}, subs)


def check_quotient_equivalence(M: WeightMatrix, mode: str = "beurling", j_values: Sequence[int] = (1, 2, 3),
                               cap: int | None = None, max_order: int = QUOTIENT_ORDER) -> ConditionReport:
    """Compare the series verdict with the derivation condition for a 1-D matrix.

    Under the structural hypotheses (normalized log-convex members with
    divergent roots, quotients nondecreasing in ``lambda``) the series
    converges for every ``j`` iff ``M^(kappa)_{p+1} <= A^{p+1} M^(lambda)_p``
    (Beurling, ``kappa < lambda``; Roumieu with the roles swapped).  Also
    checks that the exponent map ``k -> log term_k`` is nonincreasing for
    every tested ``(j, l)``.

    Raises
    ------
    HypothesisError
        When the structural hypotheses are not verified.
    """
    if M.d != 1:
        raise ValueError("the equivalence is one-dimensional")
    if mode not in ("roumieu", "beurling"):
        raise ValueError("mode must be 'roumieu' or 'beurling'")
    lams = sorted({1.0 / j for j in j_values} | {float(j) for j in j_values} | set(M.lambda_grid.tolist())) \
        if M.callable_family else list(M.lambda_grid)
    hyp = _structural_hypotheses(M, lams, max_order)
    if hyp.verdict != Verdict.VERIFIED:
        raise HypothesisError(f"structural hypotheses are {hyp.verdict.value}")
    K = DEFAULT_CAPS[1] if cap is None else int(cap)
    series = [gp_series_diagnose(M, mode, j, cap=K) for j in j_values]
    s_verdict = combine_verdicts([s.verdict for s in series], "all")
    cond = "derivation_beurling" if mode == "beurling" else "derivation_roumieu"
    cond_rep = check_matrix_condition(M, cond)
    mono_rows, mono_ok = [], True
    for s in series:
        j = s.tested_range["j"]
        for ell in s.tested_range["candidate_ls"]:
            m = _difference_map(M, mode, j, ell, K)
            fin = np.isfinite(m)
            diffs = np.diff(m[fin])
            tol = LOG_RTOL * np.maximum(1.0, np.abs(m[fin][1:]))
            ok = bool(np.all(diffs <= tol))
            mono_ok &= ok
            mono_rows.append({"j": j, "ell": ell, "nonincreasing": ok,
                              "max_increase": float(diffs.max()) if diffs.size else 0.0})
    mono = ConditionReport("difference_map_nonincreasing", Verdict.VERIFIED if mono_ok else Verdict.VIOLATED,
                           {}, {"cap": K}, None if mono_ok else {"rows": [r for r in mono_rows if not r["nonincreasing"]]},
                           {"rows": mono_rows})
    resolved = {s_verdict, cond_rep.verdict}
    if s_verdict == cond_rep.verdict:
        agree = Verdict.VERIFIED
    elif Verdict.INCONCLUSIVE in resolved:
        agree = Verdict.INCONCLUSIVE
    else:
        agree = Verdict.VIOLATED
    wit = {"series": s_verdict.value, "condition": cond_rep.verdict.value, "map_nonincreasing": mono_ok}
    ce = None if agree != Verdict.VIOLATED else dict(wit)
    return ConditionReport(f"quotient_equivalence_{mode}", agree, wit,
                           {"j_values": [int(j) for j in j_values], "cap": K}, ce, {},
                           [hyp, *series, cond_rep, mono])


# ---------------------------------------------------------------------------
# overall verdict


@dataclass
class NuclearityReport:
    mode: str
    route: str
    verdict: Nuclearity
    certificates: dict[str, Any] = field(default_factory=dict)
    grids: dict[str, Any] = field(default_factory=dict)
    reports: list[ConditionReport] = field(default_factory=list)
    consistent: bool = True

    def to_dict(self) -> dict[str, Any]:
        return {"mode": self.mode, "route": self.route, "verdict": self.verdict.value,
                "consistent": self.consistent, "certificates": self.certificates, "grids": self.grids,
                "reports": [r.to_dict() for r in self.reports]}

    def iter_verdicts(self):
        for r in self.reports:
            yield from r.iter_verdicts()


def _from_series(vs: Sequence[Verdict]) -> Nuclearity:
    v = combine_verdicts(vs, "all")
    return {Verdict.VERIFIED: Nuclearity.NUCLEAR, Verdict.VIOLATED: Nuclearity.NOT_NUCLEAR,
            Verdict.INCONCLUSIVE: Nuclearity.UNDETERMINED}[v]


def nuclearity_verdict(M: WeightMatrix, mode: str, j_values: Sequence[int] = (1, 2, 3),
                       cap: int | None = None) -> NuclearityReport:
    """Combine condition audits and series diagnostics into one verdict.

    Routes
    ------
    ``weight_function``
        Matrices built from a weight function: Roumieu spaces are nuclear,
        Beurling spaces when ``omega(t) = o(t^2)``.  The series diagnostics
        are run as a cross-check and a disagreement is flagged.
    ``iff_one_dimensional``
        ``d = 1`` with the structural hypotheses verified: nuclear iff the
        derivation condition holds, cross-checked against the series.
    ``sufficient_condition``
        The derivation condition holds, hence nuclear.
    ``series``
        Otherwise the series verdict decides (the series criterion is an
        equivalence for the coefficient space).
    """
    if mode not in ("roumieu", "beurling"):
        raise ValueError("mode must be 'roumieu' or 'beurling'")
    K = DEFAULT_CAPS.get(M.d, 40) if cap is None else int(cap)
    cond = "derivation_beurling" if mode == "beurling" else "derivation_roumieu"
    series = [gp_series_diagnose(M, mode, j, cap=K) for j in j_values]
    s_nuc = _from_series([s.verdict for s in series])
    cond_rep = check_matrix_condition(M, cond)
    grids = {"j_values": [int(j) for j in j_values], "cap": K,
             "lambdas": [float(v) for v in M.lambda_grid]}
    certs = {"series": [s.details["per_ell"] for s in series], "condition": cond_rep.witnesses}
    reports: list[ConditionReport] = [*series, cond_rep]
    weight = getattr(M, "weight", None)
    if weight is not None:
        from .weight_func import GrowthClass, growth_class

        if mode == "roumieu":
            expected = Nuclearity.NUCLEAR
            certs["growth"] = "unconditional"
        else:
            cls, grep = growth_class(weight, 0.5)
            if cls is None:
                # the matrix route cannot confirm slow little-o decay on a
                # finite range; the ratio route decides unless refuted
                ratio = grep.sub_reports[0].witnesses.get("class")
                rows = grep.sub_reports[1].details.get("per_lambda", [])
                refuted = any(r.get("little_o") == Verdict.VIOLATED.value for r in rows)
                if ratio == GrowthClass.LITTLE_O.value and not refuted:
                    cls = GrowthClass.LITTLE_O
            certs["growth"] = cls.value if cls is not None else None
            reports.append(grep)
            expected = Nuclearity.NUCLEAR if cls == GrowthClass.LITTLE_O else Nuclearity.UNDETERMINED
        consistent = s_nuc in (expected, Nuclearity.UNDETERMINED) and cond_rep.verdict != Verdict.VIOLATED
        return NuclearityReport(mode, "weight_function", expected, certs, grids, reports, consistent)
    if cond_rep.verdict == Verdict.VIOLATED:
        c_nuc = Nuclearity.NOT_NUCLEAR
    elif cond_rep.verdict == Verdict.VERIFIED:
        c_nuc = Nuclearity.NUCLEAR
    else:
        c_nuc = Nuclearity.UNDETERMINED
    if M.d == 1:
        try:
            hyp = _structural_hypotheses(M, list(M.lambda_grid), QUOTIENT_ORDER)
        except (ValueError, IndexError):
            hyp = None
        if hyp is not None:
            reports.append(hyp)
        if hyp is not None and hyp.verdict == Verdict.VERIFIED:
            verdict = c_nuc if c_nuc != Nuclearity.UNDETERMINED else s_nuc
            consistent = Nuclearity.UNDETERMINED in (c_nuc, s_nuc) or c_nuc == s_nuc
            return NuclearityReport(mode, "iff_one_dimensional", verdict, certs, grids, reports, consistent)
    if c_nuc == Nuclearity.NUCLEAR:
        consistent = s_nuc != Nuclearity.NOT_NUCLEAR
        return NuclearityReport(mode, "sufficient_condition", Nuclearity.NUCLEAR, certs, grids, reports, consistent)
    return NuclearityReport(mode, "series", s_nuc, certs, grids, reports, True)
