"""Multi-index arithmetic, log-domain helpers and the shared witness search.

Every quantity that can overflow (weight sequences, exponentials of
associated functions, norms) is carried as the logarithm of a nonnegative
number.  ``+inf`` encodes an infinite quantity and ``-inf`` encodes zero.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.special import gammaln

MultiIndex = tuple[int, ...]
LogValue = float

# Relative slack used when comparing two log-domain quantities that are equal
# in exact arithmetic (for example superadditivity of a conjugate at 0).
LOG_RTOL = 1e-9


class Verdict(str, enum.Enum):
    VERIFIED = "VERIFIED"
    VIOLATED = "VIOLATED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class ConditionReport:
    """Outcome of a finite-range audit of an inequality.

    Attributes
    ----------
    condition_id : str
        Name of the audited condition.
    verdict : Verdict
        ``VERIFIED`` when a witness re-validates at every tested point,
        ``VIOLATED`` when a counterexample defeats every searched witness.
    witnesses : dict
        Named constants, e.g. ``{"A": 2.0}``.
    tested_range : dict
        Description of the index box and parameter grids.
    counterexample : dict or None
        Index, left and right hand sides at a failing point.
    details : dict
        Free-form extra data (per-parameter tables, flags).
    sub_reports : list of ConditionReport
    """

    condition_id: str
    verdict: Verdict
    witnesses: dict[str, Any] = field(default_factory=dict)
    tested_range: dict[str, Any] = field(default_factory=dict)
    counterexample: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)
    sub_reports: list["ConditionReport"] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.verdict == Verdict.VERIFIED

    @property
    def violated(self) -> bool:
        return self.verdict == Verdict.VIOLATED

    def to_dict(self) -> dict[str, Any]:
        out = {
            "condition": self.condition_id,
            "verdict": self.verdict.value,
            "witnesses": to_jsonable(self.witnesses),
            "tested_range": to_jsonable(self.tested_range),
            "counterexample": to_jsonable(self.counterexample),
            "details": to_jsonable(self.details),
        }
        if self.sub_reports:
            out["sub_reports"] = [r.to_dict() for r in self.sub_reports]
        return out

    def iter_verdicts(self) -> Iterable[Verdict]:
        yield self.verdict
        for r in self.sub_reports:
            yield from r.iter_verdicts()


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars, tuples and enums into plain JSON types."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, ConditionReport):
        return obj.to_dict()
    return str(obj)


def combine_verdicts(verdicts: Iterable[Verdict], quantifier: str = "all") -> Verdict:
    """Aggregate verdicts of sub-claims.

    ``quantifier="all"`` means every sub-claim must hold; ``"any"`` means one
    witness suffices.
    """
    vs = list(verdicts)
    if not vs:
        return Verdict.VERIFIED if quantifier == "all" else Verdict.INCONCLUSIVE
    if quantifier == "all":
        if any(v == Verdict.VIOLATED for v in vs):
            return Verdict.VIOLATED
        if all(v == Verdict.VERIFIED for v in vs):
            return Verdict.VERIFIED
        return Verdict.INCONCLUSIVE
    if any(v == Verdict.VERIFIED for v in vs):
        return Verdict.VERIFIED
    if all(v == Verdict.VIOLATED for v in vs):
        return Verdict.VIOLATED
    return Verdict.INCONCLUSIVE


# ---------------------------------------------------------------------------
# multi-indices


def _check_index(alpha: Sequence[int]) -> MultiIndex:
    a = tuple(int(v) for v in alpha)
    if any(v < 0 for v in a):
        raise ValueError(f"multi-index entries must be nonnegative, got {a}")
    return a


def order(alpha: Sequence[int]) -> int:
    """Total order |alpha|."""
    return int(sum(alpha))


def unit(d: int, j: int) -> MultiIndex:
    e = [0] * d
    e[j] = 1
    return tuple(e)


def add(alpha: Sequence[int], beta: Sequence[int]) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


@lru_cache(maxsize=256)
def _enumerate_cached(d: int, max_order: int) -> tuple[MultiIndex, ...]:
    out: list[MultiIndex] = []

    def compositions(n: int, parts: int):
        # first entry runs from n down to 0, which gives (1,0) before (0,1)
        if parts == 1:
            yield (n,)
            return
        for first in range(n, -1, -1):
            for rest in compositions(n - first, parts - 1):
                yield (first,) + rest

    for n in range(max_order + 1):
        out.extend(compositions(n, d))
    return tuple(out)


def enumerate_indices(d: int, max_order: int) -> list[MultiIndex]:
    """All multi-indices of length ``d`` with ``|alpha| <= max_order``.

    Ordered by total order, then lexicographically with larger leading
    entries first, so ``(1, 0)`` precedes ``(0, 1)``.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    return list(_enumerate_cached(int(d), int(max_order)))


def indices_of_order(d: int, n: int) -> list[MultiIndex]:
    """Multi-indices with ``|alpha| == n`` in enumeration order."""
    if n < 0:
        return []
    start = math.comb(d + n - 1, d) if n > 0 else 0
    return enumerate_indices(d, n)[start:]


def log_factorial(alpha: Sequence[int]) -> LogValue:
    """``log(alpha!)`` as the sum of ``log(alpha_j!)``.

    Exact integer accumulation is used when ``|alpha| <= 20``.
    """
    a = _check_index(alpha)
    if sum(a) <= 20:
        prod = 1
        for v in a:
            prod *= math.factorial(v)
        return math.log(prod)
    return float(sum(gammaln(v + 1.0) for v in a))


def support_set_member(alpha: Sequence[int], t: Sequence[float]) -> bool:
    """True iff ``alpha_j == 0`` wherever ``t_j == 0``."""
    if len(alpha) != len(t):
        raise ValueError("alpha and t must have the same length")
    return all(a == 0 or tj != 0 for a, tj in zip(alpha, t))


def log_power(t: Sequence[float], alpha: Sequence[int]) -> LogValue:
    """``log|t^alpha|`` with the convention ``0^0 = 1``."""
    s = 0.0
    for tj, aj in zip(t, alpha):
        if aj == 0:
            continue
        if tj == 0:
            return -math.inf
        s += aj * math.log(abs(tj))
    return s


def log_alpha_pow_half_alpha(alpha: Sequence[int]) -> float:
    """``log(alpha^{alpha/2})`` with ``0^0 = 1``."""
    return 0.5 * sum(a * math.log(a) for a in alpha if a > 0)


# ---------------------------------------------------------------------------
# log-domain arithmetic


def log_mul(a: LogValue, b: LogValue) -> LogValue:
    """Log of a product; ``0 * inf`` is taken as 0."""
    if (a == -math.inf and b == math.inf) or (a == math.inf and b == -math.inf):
        return -math.inf
    return a + b


def log_add(a: LogValue, b: LogValue) -> LogValue:
    """Log of a sum."""
    return float(np.logaddexp(a, b))


def log_sum(values: Iterable[LogValue]) -> LogValue:
    from scipy.special import logsumexp

    arr = np.fromiter(values, dtype=float)
    if arr.size == 0:
        return -math.inf
    return float(logsumexp(arr))


def geometric_grid(kmin: int = -4, kmax: int = 40, base: float = 2.0) -> np.ndarray:
    """Constants ``base**k`` for ``kmin <= k <= kmax``."""
    return base ** np.arange(kmin, kmax + 1, dtype=float)


def log_close_le(lhs, rhs, rtol: float = LOG_RTOL):
    """Vectorised ``lhs <= rhs`` with relative slack for log-domain values."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    scale = np.maximum(1.0, np.maximum(np.abs(np.where(np.isfinite(lhs), lhs, 0.0)),
                                       np.abs(np.where(np.isfinite(rhs), rhs, 0.0))))
    with np.errstate(invalid="ignore"):
        return (lhs <= rhs) | (lhs - rhs <= rtol * scale)


# ---------------------------------------------------------------------------
# witness search


@dataclass
class WitnessSearch:
    """Result of :func:`search_witness`."""

    status: Verdict
    constants: dict[str, float]
    log_free: float | None = None
    worst: int | None = None
    settle: str | None = None


def settle_status(r: np.ndarray, orders: np.ndarray, margin: float = 1.0) -> tuple[str, float]:
    """Decide whether a residual sequence has stopped growing.

    The index range is split at half of the largest order.  The residual
    is ``settled`` when its maximum over the upper half does not exceed the
    maximum over the lower half, and ``growing`` when it exceeds it by more
    than ``margin`` (in log units) without slowing down over the last
    quarter of the range.
    """
    pmax = orders.max() if orders.size else 0
    low = orders <= pmax / 2.0
    m_all = float(np.max(r)) if r.size else -math.inf
    if low.all() or not low.any():
        return "settled", m_all
    m1 = float(np.max(r[low]))
    m2 = float(np.max(r[~low]))
    if m2 <= m1 + 1e-12 * max(1.0, abs(m1)):
        return "settled", m_all
    if m2 > m1 + margin and not _decelerating(r, orders):
        return "growing", m_all
    return "unclear", m_all


def _decelerating(r: np.ndarray, orders: np.ndarray, rel: float = 0.01) -> bool:
    """Whether the per-order maxima rise markedly slower in the last quarter.

    Slopes of the per-order maxima are fitted on the third and fourth
    quarters of the order range.  A residual that rises but keeps slowing
    down may still turn, so it is not reported as growing.
    """
    o = np.asarray(orders, dtype=float)
    uniq, inv = np.unique(o, return_inverse=True)
    m = np.full(uniq.size, -np.inf)
    np.maximum.at(m, inv, r)
    pmax = uniq[-1]
    q3 = (uniq > pmax / 2) & (uniq <= 0.75 * pmax) & np.isfinite(m)
    q4 = (uniq > 0.75 * pmax) & np.isfinite(m)
    if q3.sum() < 2 or q4.sum() < 2:
        return False
    s3 = float(np.polyfit(uniq[q3], m[q3], 1)[0])
    s4 = float(np.polyfit(uniq[q4], m[q4], 1)[0])
    return s4 < s3 - rel * abs(s3)


def search_witness(
    D: np.ndarray,
    exps: Sequence[np.ndarray],
    grids: Sequence[np.ndarray],
    names: Sequence[str],
    free: str | None = None,
    orders: np.ndarray | None = None,
    margin: float = 1.0,
) -> WitnessSearch:
    """Smallest grid witness for ``D_i <= sum_k e_k[i] log c_k (+ log B)``.

    Parameters
    ----------
    D : ndarray
        Left side minus the constant-free part of the right side, per point.
    exps : sequence of ndarray
        Exponent of each gridded constant at each point (nonnegative).
    grids : sequence of ndarray
        Ascending candidate values of each constant.
    names : sequence of str
        Names of the gridded constants.
    free : str, optional
        Name of an additive free constant (exponent one everywhere).  Its
        value is fitted exactly and accepted only when the residual has
        settled over the tested orders (see :func:`settle_status`).
    orders : ndarray, optional
        Order of each point, needed when ``free`` is given.

    Returns
    -------
    WitnessSearch
        Candidates are scanned lexicographically in the order of ``names``.
        Without a free constant the last gridded constant is solved in
        closed form.  ``VIOLATED`` means the maximal candidate fails at
        ``worst`` (so every candidate fails there, by monotonicity) or, with
        a free constant, that every candidate keeps growing.
    """
    D = np.asarray(D, dtype=float)
    E = np.array([np.asarray(e, dtype=float) for e in exps]).reshape(len(exps), D.size)
    logs = [np.log(np.asarray(g, dtype=float)) for g in grids]
    k = len(logs)
    if D.size == 0:
        return WitnessSearch(Verdict.VERIFIED, {n: float(np.exp(l[0])) for n, l in zip(names, logs)},
                             0.0 if free else None)

    if free is None:
        if k == 0:
            ok = log_close_le(D, 0.0)
            if ok.all():
                return WitnessSearch(Verdict.VERIFIED, {})
            worst = int(np.argmax(D))
            return WitnessSearch(Verdict.VIOLATED, {}, worst=worst)
        outer = list(itertools.product(*[range(len(l)) for l in logs[:-1]]))
        last = logs[-1]
        e_last = E[-1]
        pos = e_last > 0
        for combo in outer:
            R = D.copy()
            for j, idx in enumerate(combo):
                R -= E[j] * logs[j][idx]
            if (~pos).any() and not log_close_le(R[~pos], 0.0).all():
                continue
            if pos.any():
                req = float(np.max(R[pos] / e_last[pos]))
            else:
                req = -math.inf
            # smallest grid value at or above the requirement, with slack
            slack = LOG_RTOL * max(1.0, abs(req)) if np.isfinite(req) else 0.0
            cand = np.nonzero(last >= req - slack)[0]
            if cand.size == 0:
                continue
            consts = {names[j]: float(np.exp(logs[j][idx])) for j, idx in enumerate(combo)}
            consts[names[-1]] = float(np.exp(last[cand[0]]))
            return WitnessSearch(Verdict.VERIFIED, consts)
        # every candidate failed: test the largest one point by point
        R = D - sum(E[j] * logs[j][-1] for j in range(k))
        bad = ~log_close_le(R, 0.0)
        if bad.any():
            worst = int(np.argmax(np.where(bad, R, -np.inf)))
            return WitnessSearch(Verdict.VIOLATED, {n: float(np.exp(l[-1])) for n, l in zip(names, logs)},
                                 worst=worst)
        return WitnessSearch(Verdict.INCONCLUSIVE, {})

    if orders is None:
        raise ValueError("orders are required with a free constant")
    orders = np.asarray(orders, dtype=float)
    combos = list(itertools.product(*[range(len(l)) for l in logs])) if k else [()]
    statuses: list[str] = []
    for combo in combos:
        R = D.copy()
        for j, idx in enumerate(combo):
            R -= E[j] * logs[j][idx]
        st, m = settle_status(R, orders, margin)
        statuses.append(st)
        if st == "settled":
            consts = {names[j]: float(np.exp(logs[j][idx])) for j, idx in enumerate(combo)}
            return WitnessSearch(Verdict.VERIFIED, consts, log_free=m, settle=st)
    if all(s == "growing" for s in statuses):
        R = D - sum(E[j] * logs[j][-1] for j in range(k)) if k else D
        worst = int(np.argmax(R))
        return WitnessSearch(Verdict.VIOLATED, {n: float(np.exp(l[-1])) for n, l in zip(names, logs)},
                             worst=worst, settle="growing")
    return WitnessSearch(Verdict.INCONCLUSIVE, {}, settle="unclear")
