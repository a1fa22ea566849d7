"""Single weight sequences, their associated functions and growth conditions.

A :class:`WeightSequence` stores ``log M_alpha``.  Three layouts are
supported:

``isotropic``
    ``M_alpha`` depends on ``|alpha|`` only (all one-dimensional sequences).
``product``
    ``M_alpha = m(alpha_1) ... m(alpha_d)``.
``general``
    an arbitrary function of the multi-index.

The associated function is

    omega_M(t) = sup_{alpha in N_{0,t}^d} log|t^alpha| - log M_alpha,

where ``N_{0,t}^d`` only allows ``alpha_j > 0`` when ``t_j != 0``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammaln

from .core import (
    ConditionReport,
    MultiIndex,
    Verdict,
    enumerate_indices,
    geometric_grid,
    indices_of_order,
    log_alpha_pow_half_alpha,
    log_close_le,
    log_power,
    search_witness,
    settle_status,
)

DEFAULT_CAP_PER_DIM = 512
HARD_CAP = 1 << 22
DIVERGENCE_THRESHOLD = 1e6
TAIL_RUN = 8
# largest increase of the top hull slope over a doubling that counts as stalled
SLOPE_STALL = 1e-9
QUOTIENT_SEARCH_CAP = 1 << 52
QUOTIENT_TABLE = 4096


class WeightSequence:
    """A multi-index weight sequence held in the log domain.

    Parameters
    ----------
    d : int
        Dimension.
    log_order : callable, optional
        Vectorised ``p -> log M_p`` for isotropic sequences.
    log_axis : callable, optional
        Vectorised ``k -> log m(k)`` for product sequences.
    log_index : callable, optional
        ``alpha -> log M_alpha`` for general sequences.
    name : str
        Label used in reports.
    max_order : int, optional
        Largest order at which the sequence is defined (tables).
    log_convex : bool
        Declares ``p -> log M_p`` convex (isotropic layout).  The associated
        function is then located by a quotient search instead of a table, so
        large arguments stay cheap.
    """

    def __init__(
        self,
        d: int,
        log_order: Callable[[np.ndarray], np.ndarray] | None = None,
        log_axis: Callable[[np.ndarray], np.ndarray] | None = None,
        log_index: Callable[[MultiIndex], float] | None = None,
        name: str = "sequence",
        max_order: int | None = None,
        log_convex: bool = False,
    ):
        if d < 1:
            raise ValueError("dimension must be at least 1")
        given = [f is not None for f in (log_order, log_axis, log_index)]
        if sum(given) != 1:
            raise ValueError("give exactly one of log_order, log_axis, log_index")
        self.d = int(d)
        self.name = name
        self.max_order = max_order
        self.log_convex = bool(log_convex)
        if log_axis is not None and d == 1:
            log_order, log_axis = log_axis, None
        if log_index is not None and d == 1:
            f = log_index
            log_order = lambda p, f=f: np.array([f((int(v),)) for v in np.atleast_1d(p)], dtype=float)
            log_index = None
        self._log_order = log_order
        self._log_axis = log_axis
        self._log_index = log_index
        self._orders = np.zeros(0)
        self._axis = np.zeros(0)
        self._memo: dict[MultiIndex, float] = {}
        self._lock = threading.Lock()
        self._hulls: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    # -- layout ---------------------------------------------------------
    @property
    def structure(self) -> str:
        if self._log_order is not None:
            return "isotropic"
        if self._log_axis is not None:
            return "product"
        return "general"

    @property
    def normalized(self) -> bool:
        return abs(self.log_m((0,) * self.d)) <= 1e-12

    def __repr__(self) -> str:
        return f"WeightSequence(d={self.d}, name={self.name!r}, structure={self.structure})"

    # -- evaluation -----------------------------------------------------
    def _limit(self, p: int) -> int:
        if self.max_order is not None:
            return min(p, self.max_order)
        return p

    def log_orders(self, P: int) -> np.ndarray:
        """``log M_p`` for ``p = 0..P`` (isotropic layout only)."""
        if self._log_order is None:
            raise ValueError("log_orders needs an isotropic sequence")
        if self.max_order is not None and P > self.max_order:
            raise IndexError(f"sequence {self.name!r} is tabulated up to order {self.max_order}")
        if P >= self._orders.size:
            n = max(P + 1, 2 * self._orders.size, 64)
            n = self._limit(n - 1) + 1
            vals = np.asarray(self._log_order(np.arange(n)), dtype=float)
            with self._lock:
                if n > self._orders.size:
                    self._orders = vals
        return self._orders[: P + 1]

    def log_axis(self, K: int) -> np.ndarray:
        """``log m(k)`` for ``k = 0..K`` (product layout only)."""
        if self._log_axis is None:
            raise ValueError("log_axis needs a product sequence")
        if K >= self._axis.size:
            n = max(K + 1, 2 * self._axis.size, 64)
            n = self._limit(n - 1) + 1
            vals = np.asarray(self._log_axis(np.arange(n)), dtype=float)
            with self._lock:
                if n > self._axis.size:
                    self._axis = vals
        return self._axis[: K + 1]

    def log_m(self, alpha: Sequence[int]) -> float:
        """``log M_alpha``."""
        a = tuple(int(v) for v in alpha)
        if len(a) != self.d:
            raise ValueError(f"expected a multi-index of length {self.d}")
        if self._log_order is not None:
            p = sum(a)
            return float(self.log_orders(p)[p])
        if self._log_axis is not None:
            ax = self.log_axis(max(a))
            return float(sum(ax[v] for v in a))
        val = self._memo.get(a)
        if val is None:
            val = float(self._log_index(a))
            with self._lock:
                self._memo.setdefault(a, val)
        return val

    def log_many(self, idx: np.ndarray) -> np.ndarray:
        """``log M_alpha`` for the rows of an integer array of shape (n, d)."""
        idx = np.asarray(idx, dtype=int).reshape(-1, self.d)
        if idx.size == 0:
            return np.zeros(0)
        if self._log_order is not None:
            p = idx.sum(axis=1)
            return self.log_orders(int(p.max()))[p]
        if self._log_axis is not None:
            ax = self.log_axis(int(idx.max()))
            return ax[idx].sum(axis=1)
        return np.array([self.log_m(tuple(r)) for r in idx])

    def min_log_of_order(self, n: int) -> float:
        """``min_{|alpha| = n} log M_alpha``."""
        if self._log_order is not None:
            return float(self.log_orders(n)[n])
        if self._log_axis is not None:
            return float(self.min_log_orders(n)[n])
        return float(min(self.log_m(a) for a in indices_of_order(self.d, n)))

    def min_log_orders(self, N: int) -> np.ndarray:
        """``min_{|alpha| = n} log M_alpha`` for ``n = 0..N``.

        Product sequences use a ``d``-fold min-plus convolution of the axis
        profile; general sequences enumerate each order.
        """
        if self._log_order is not None:
            return self.log_orders(N).copy()
        if self._log_axis is not None:
            ax = self.log_axis(N)
            out = ax.copy()
            for _ in range(self.d - 1):
                out = np.array([np.min(out[: k + 1] + ax[k::-1]) for k in range(N + 1)])
            return out
        return np.array([min(self.log_m(a) for a in indices_of_order(self.d, k)) for k in range(N + 1)])

    # -- derived sequences ----------------------------------------------
    def scaled(self, log_c: float, name: str | None = None) -> "WeightSequence":
        """The sequence ``c^{|alpha|} M_alpha``."""
        nm = name or f"{self.name}*c^p"
        if self._log_order is not None:
            f = self._log_order
            return WeightSequence(self.d, log_order=lambda p: f(p) + log_c * np.asarray(p), name=nm,
                                  max_order=self.max_order)
        if self._log_axis is not None:
            g = self._log_axis
            return WeightSequence(self.d, log_axis=lambda k: g(k) + log_c * np.asarray(k), name=nm,
                                  max_order=self.max_order)
        h = self._log_index
        return WeightSequence(self.d, log_index=lambda a: h(a) + log_c * sum(a), name=nm,
                              max_order=self.max_order)

    # -- hull used by the associated function ----------------------------
    def _hull(self, values: np.ndarray, key: int) -> tuple[np.ndarray, np.ndarray]:
        """Vertices and slopes of the lower convex hull of ``(p, values[p])``."""
        cached = self._hulls.get(key)
        if cached is not None and cached[0][-1] == values.size - 1:
            return cached
        v = values
        second = v[2:] - 2 * v[1:-1] + v[:-2] if v.size > 2 else np.zeros(0)
        if np.all(second >= -1e-12 * np.maximum(1.0, np.abs(v[1:-1]))):
            verts = np.arange(v.size)
        else:
            stack: list[int] = []
            for p in range(v.size):
                while len(stack) >= 2:
                    a, b = stack[-2], stack[-1]
                    # drop b if it lies on or above the chord from a to p
                    if (v[b] - v[a]) * (p - a) >= (v[p] - v[a]) * (b - a):
                        stack.pop()
                    else:
                        break
                stack.append(p)
            verts = np.array(stack, dtype=int)
        slopes = np.diff(v[verts]) / np.diff(verts) if verts.size > 1 else np.zeros(0)
        with self._lock:
            self._hulls[key] = (verts, slopes)
        return verts, slopes


# ---------------------------------------------------------------------------
# constructors


def factorial_power(s: float, d: int = 1, name: str | None = None) -> WeightSequence:
    """``M_alpha = (alpha!)^s``."""
    nm = name or f"factorial_power({s:g})"
    f = lambda k: s * gammaln(np.asarray(k, dtype=float) + 1.0)
    if d == 1:
        return WeightSequence(1, log_order=f, name=nm)
    return WeightSequence(d, log_axis=f, name=nm)


def exp_poly(exponents: Sequence[Sequence[float]], d: int = 1, name: str | None = None) -> WeightSequence:
    """``log M_alpha = sum_k c_k |alpha|^k`` from pairs ``(k, c_k)``."""
    pairs = [(float(k), float(c)) for k, c in exponents]
    nm = name or "exp_poly(" + ",".join(f"{c:g}p^{k:g}" for k, c in pairs) + ")"

    def f(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros_like(p)
        for k, c in pairs:
            out = out + c * np.where(p == 0, 1.0 if k == 0 else 0.0, p ** k)
        return out

    return WeightSequence(d, log_order=f, name=nm)


def ones(d: int = 1) -> WeightSequence:
    """The degenerate sequence ``M_alpha = 1``."""
    return WeightSequence(d, log_order=lambda p: np.zeros(np.shape(p)), name="ones")


def from_order_table(log_values: Sequence[float], d: int = 1, name: str = "table") -> WeightSequence:
    """Isotropic sequence from tabulated ``log M_p``."""
    arr = np.asarray(log_values, dtype=float)

    def f(p):
        p = np.asarray(p, dtype=int)
        return arr[np.minimum(p, arr.size - 1)]

    return WeightSequence(d, log_order=f, name=name, max_order=arr.size - 1)


def from_index_table(entries: Sequence[tuple[Sequence[int], float]], d: int,
                     name: str = "table") -> WeightSequence:
    """General sequence from ``[(alpha, log M_alpha), ...]``."""
    table = {tuple(int(v) for v in a): float(v) for a, v in entries}
    if any(len(a) != d for a in table):
        raise ValueError("table entries must have length d")
    top = max(sum(a) for a in table)
    missing = [a for a in enumerate_indices(d, top) if a not in table]
    if missing:
        raise ValueError(f"table must list every index up to order {top}; missing {missing[0]}")
    if d == 1:
        return from_order_table([table[(p,)] for p in range(top + 1)], 1, name)
    return WeightSequence(d, log_index=lambda a: table[a], name=name, max_order=top)


# ---------------------------------------------------------------------------
# associated function


@dataclass
class OmegaResult:
    value: float
    argmax: MultiIndex
    certified: bool
    cap: int


def _omega_convex(M: WeightSequence, L: np.ndarray, m0: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Associated function of a log-convex isotropic sequence.

    ``p -> p L - log M_p`` is concave, so its maximiser is the first ``p``
    whose quotient ``log M_{p+1} - log M_p`` reaches ``L``; it is found by
    doubling and bisection.  Quotients that stay below ``L`` up to
    ``QUOTIENT_SEARCH_CAP`` give ``inf``.
    """
    n = L.size
    vals = np.full(n, -m0)
    arg = np.zeros(n, dtype=np.int64)
    cert = np.ones(n, dtype=bool)
    live = np.isfinite(L)
    if not live.any():
        return vals, arg, cert, 0
    Ls = L[live]

    def q(p):
        p = np.asarray(p, dtype=np.int64)
        return M._log_order(p + 1) - M._log_order(p)

    lo = np.full(Ls.size, -1, dtype=np.int64)  # invariant q(lo) < L (lo = -1 is vacuous)
    hi = np.zeros(Ls.size, dtype=np.int64)
    found = np.zeros(Ls.size, dtype=bool)
    while True:
        todo = ~found
        try:
            ok = q(hi[todo]) >= Ls[todo]
        except ValueError:
            break
        idx = np.nonzero(todo)[0]
        found[idx[ok]] = True
        lo[idx[~ok]] = hi[idx[~ok]]
        hi[idx[~ok]] = np.maximum(1, 2 * hi[idx[~ok]])
        if found.all() or hi.max() > QUOTIENT_SEARCH_CAP:
            break
    while True:
        open_ = found & (hi - lo > 1)
        if not open_.any():
            break
        mid = (lo[open_] + hi[open_]) // 2
        ok = q(mid) >= Ls[open_]
        idx = np.nonzero(open_)[0]
        hi[idx[ok]] = mid[ok]
        lo[idx[~ok]] = mid[~ok]
    p = np.where(found, hi, 0)
    v = np.where(found, p * Ls - M._log_order(p), math.inf)
    vals[live] = v
    arg[live] = p
    return vals, arg, cert, int(p.max())


def _omega_isotropic(M: WeightSequence, L: np.ndarray, cap: int | None, threshold: float,
                     m0: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """sup_p p L - log M_p for each entry of L (``-inf`` means only p = 0)."""
    convex = M.log_convex and cap is None and M.max_order is None
    n = L.size
    vals = np.full(n, -m0)
    arg = np.zeros(n, dtype=int)
    cert = np.ones(n, dtype=bool)
    live = np.isfinite(L)
    if not live.any():
        return vals, arg, cert, 0
    P = cap if cap is not None else DEFAULT_CAP_PER_DIM * M.d
    P = M._limit(P)
    prev_top = None
    while True:
        m = M.log_orders(P)
        verts, slopes = M._hull(m, P)
        Ls = L[live]
        i = np.searchsorted(slopes, Ls, side="left")
        p = verts[i]
        v = p * Ls - m[p]
        near_end = p > P - TAIL_RUN
        if convex and near_end.any():
            # maximisers past the cached table: quotient search
            idx = np.nonzero(live)[0][near_end]
            fv, fp, _, top = _omega_convex(M, L[idx], m0)
            v, p = v.astype(float), p.astype(np.int64)
            v[near_end], p[near_end] = fv, fp
            vals[live], arg[live] = v, p
            return vals, arg, cert, max(P, top)
        fixed_cap = cap is not None or (M.max_order is not None and P >= M.max_order)
        if not near_end.any() or fixed_cap or P >= HARD_CAP:
            break
        # infinite only once the quotients stop growing: large finite values
        # of slowly growing sequences keep doubling the table
        top = float(slopes[-1]) if slopes.size else -math.inf
        stalled = prev_top is not None and top - prev_top <= SLOPE_STALL
        if np.all(v[near_end] > threshold) and stalled:
            break
        prev_top = top
        P = M._limit(2 * P)
    vals[live] = v
    arg[live] = p
    cert[live] = ~near_end
    over = live.copy()
    over[live] = near_end & (v > threshold)
    vals[over] = math.inf
    return vals, arg, cert, P


def omega_many(M: WeightSequence, ts: np.ndarray, cap: int | None = None,
               threshold: float = DIVERGENCE_THRESHOLD) -> np.ndarray:
    """Vectorised associated function.

    ``ts`` has shape ``(n,)`` when ``d == 1`` or ``(n, d)``.  Isotropic and
    product sequences are evaluated exactly through the lower convex hull of
    ``p -> log M_p``; general sequences fall back to enumeration.
    """
    ts = np.asarray(ts, dtype=float)
    if M.d == 1:
        ts = ts.reshape(-1, 1)
    ts = ts.reshape(-1, M.d)
    absd = np.abs(ts)
    m0 = M.log_m((0,) * M.d)
    if M.structure == "isotropic":
        tmax = absd.max(axis=1)
        with np.errstate(divide="ignore"):
            L = np.where(tmax > 0, np.log(tmax), -np.inf)
        return _omega_isotropic(M, L, cap, threshold, m0)[0]
    if M.structure == "product":
        axis_seq = WeightSequence(1, log_order=M._log_axis, name=M.name + "[axis]", max_order=M.max_order)
        a0 = float(axis_seq.log_orders(0)[0])
        total = np.zeros(ts.shape[0])
        for j in range(M.d):
            with np.errstate(divide="ignore"):
                L = np.where(absd[:, j] > 0, np.log(absd[:, j]), -np.inf)
            total = total + _omega_isotropic(axis_seq, L, cap, threshold, a0)[0]
        return total
    return np.array([associated_function_detail(M, t, cap, threshold).value for t in ts])


def associated_function_detail(M: WeightSequence, t: Sequence[float], cap: int | None = None,
                               threshold: float = DIVERGENCE_THRESHOLD) -> OmegaResult:
    """Associated function with the maximising index and a tail flag."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.size != M.d:
        raise ValueError(f"t must have length {M.d}")
    m0 = M.log_m((0,) * M.d)
    if M.structure == "isotropic":
        tmax = float(np.max(np.abs(t)))
        L = np.array([math.log(tmax) if tmax > 0 else -math.inf])
        vals, arg, cert, P = _omega_isotropic(M, L, cap, threshold, m0)
        p = int(arg[0])
        # place the whole order on the first coordinate of largest modulus
        j = int(np.argmax(np.abs(t)))
        alpha = [0] * M.d
        alpha[j] = p
        return OmegaResult(float(vals[0]), tuple(alpha), bool(cert[0]), P)
    if M.structure == "product":
        axis_seq = WeightSequence(1, log_order=M._log_axis, name=M.name + "[axis]", max_order=M.max_order)
        a0 = float(axis_seq.log_orders(0)[0])
        total, alpha, certified, P = 0.0, [], True, 0
        for tj in t:
            L = np.array([math.log(abs(tj)) if tj != 0 else -math.inf])
            v, a, c, P = _omega_isotropic(axis_seq, L, cap, threshold, a0)
            total += float(v[0])
            alpha.append(int(a[0]))
            certified &= bool(c[0])
        return OmegaResult(total, tuple(alpha), certified, P)
    # general layout: enumerate by total order with an early exit
    P = cap if cap is not None else DEFAULT_CAP_PER_DIM * M.d
    P = M._limit(P)
    best, best_a = -m0, (0,) * M.d
    prev, run = -math.inf, 0
    certified = False
    for n in range(1, P + 1):
        level = -math.inf
        for a in indices_of_order(M.d, n):
            lp = log_power(t, a)
            if lp == -math.inf:
                continue
            v = lp - M.log_m(a)
            if v > level:
                level = v
            if v > best:
                best, best_a = v, a
        if best > threshold:
            return OmegaResult(math.inf, best_a, False, n)
        run = run + 1 if level < prev else 0
        prev = level
        if run >= TAIL_RUN:
            certified = True
            break
    return OmegaResult(best, best_a, certified, P)


def associated_function(M: WeightSequence, t: Sequence[float] | float, cap: int | None = None,
                        threshold: float = DIVERGENCE_THRESHOLD) -> float:
    """``omega_M(t)``; ``+inf`` once the running sup passes ``threshold``."""
    return associated_function_detail(M, np.atleast_1d(t), cap, threshold).value


# ---------------------------------------------------------------------------
# inverse relation


@dataclass
class AssociationInverse:
    value: float
    converged: bool
    log_t: float


def sequence_from_association(M: WeightSequence, p: int, full: bool = False,
                              grid_size: int = 4001):
    """Recover ``log M_p = sup_t p log t - omega_M(t)`` numerically.

    The sup is taken over a logarithmic grid in ``s = log t`` and refined by
    a bounded scalar search around the best grid point.  When the best
    point sits on the grid boundary after widening, ``converged`` is False.
    """
    if M.d != 1:
        raise ValueError("the inverse relation is one-dimensional")
    if p == 0:
        res = AssociationInverse(float(-associated_function(M, [0.0])), True, -math.inf)
        return res if full else res.value
    lo, hi = -10.0, 10.0
    converged = False
    for _ in range(12):
        s = np.linspace(lo, hi, grid_size)
        g = p * s - omega_many(M, np.exp(s))
        k = int(np.argmax(g))
        if 0 < k < grid_size - 1:
            converged = True
            break
        if k == grid_size - 1:
            hi = lo + 2.0 * (hi - lo)
        else:
            lo = hi - 2.0 * (hi - lo)
    a, b = s[max(k - 1, 0)], s[min(k + 1, grid_size - 1)]
    obj = lambda x: -(p * x - associated_function(M, [math.exp(x)]))
    r = optimize.minimize_scalar(obj, bounds=(a, b), method="bounded", options={"xatol": 1e-13})
    cand = [(g[k], s[k]), (-r.fun, r.x)]
    val, where = max(cand)
    res = AssociationInverse(float(val), converged, float(where))
    return res if full else res.value


# ---------------------------------------------------------------------------
# counting function and integral representation


def quotients(M: WeightSequence, P: int) -> np.ndarray:
    """``mu_p = M_p / M_{p-1}`` for ``p = 1..P`` (index 0 holds ``mu_0 = 1``)."""
    if M.d != 1:
        raise ValueError("quotients are one-dimensional")
    m = M.log_orders(P)
    return np.concatenate([[1.0], np.exp(np.diff(m))])


def _require_log_convex(M: WeightSequence, P: int) -> np.ndarray:
    if M.max_order is not None:
        P = min(P, M.max_order)
    m = M.log_orders(P)
    lq = np.diff(m)
    if np.any(np.diff(lq) < -1e-12 * np.maximum(1.0, np.abs(lq[1:]))):
        raise ValueError("sequence is not log-convex on the tested range")
    return lq


def _log_quotients_past(M: WeightSequence, t: float, cap: int | None) -> np.ndarray:
    """Log quotients up to ``cap``, or (``cap=None``) until one exceeds ``log t``."""
    if cap is not None:
        return _require_log_convex(M, cap)
    P = QUOTIENT_TABLE
    while True:
        lq = _require_log_convex(M, P)
        done = t <= 0 or lq[-1] > math.log(t) or P >= HARD_CAP
        if done or (M.max_order is not None and P >= M.max_order):
            return lq
        P *= 2


def counting_function(M: WeightSequence, t: float, cap: int | None = None) -> int:
    """``#{p >= 1 : mu_p <= t}``; the table grows until a quotient exceeds ``t`` unless ``cap`` is given."""
    if M.d != 1:
        raise ValueError("the counting function is one-dimensional")
    lq = _log_quotients_past(M, t, cap)
    if t <= 0:
        return 0
    return int(np.searchsorted(lq, math.log(t), side="right"))


def omega_via_integral(M: WeightSequence, t: float, cap: int | None = None) -> float:
    """``int_0^t Sigma(s)/s ds`` with the counting function ``Sigma``.

    ``Sigma`` is a step function, so the integral is the sum of
    ``k * log(mu_{k+1}/mu_k)`` pieces; each piece is evaluated with
    ``scipy.integrate.quad`` on its own interval.  Without ``cap`` the
    quotient table grows until it passes ``t``.
    """
    if M.d != 1:
        raise ValueError("the integral representation is one-dimensional")
    lq = _log_quotients_past(M, t, cap)
    if t <= 0:
        return 0.0
    mu = np.exp(lq)
    total = 0.0
    for k in range(1, mu.size + 1):
        a = mu[k - 1]
        if a >= t:
            break
        b = min(mu[k], t) if k < mu.size else t
        if b > a:
            piece, _ = integrate.quad(lambda s, k=k: k / s, a, b)
            total += piece
    return total


# ---------------------------------------------------------------------------
# condition audits

SEQUENCE_CONDITIONS = (
    "log_convex",
    "derivation_closed",
    "moderate_growth",
    "almost_supermultiplicative",
    "derivation_closed_multi",
    "moderate_growth_multi",
    "supermultiplicative",
    "root_increasing",
    "root_positive",
    "root_divergence",
)


def _pairs(d: int, P: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.array(enumerate_indices(d, P), dtype=int).reshape(-1, d)
    orders = idx.sum(axis=1)
    ii, jj = np.nonzero(orders[:, None] + orders[None, :] <= P)
    return idx[ii], idx[jj]


def root_divergence_report(M: WeightSequence, max_order: int, slope_tol: float = 0.05,
                           name: str = "root_divergence") -> ConditionReport:
    """Trend test for ``(M_alpha)^{1/|alpha|} -> infinity``.

    Uses ``r_n = min_{|alpha|=n} log M_alpha / n``.  A log-log slope of at
    least ``slope_tol`` over the upper half of the range counts as
    divergence; a flat or falling profile counts as bounded roots.
    """
    P = max_order
    n = np.arange(1, P + 1)
    r = np.array([M.min_log_of_order(int(k)) / k for k in n])
    half = n >= P / 2
    x = np.log(n[half])
    slope = float(np.polyfit(x, r[half], 1)[0]) if half.sum() >= 2 else 0.0
    rng = {"max_order": P, "slope_tol": slope_tol}
    wit = {"log_root_at_max": float(r[-1]), "log_log_slope": slope}
    if slope >= slope_tol:
        return ConditionReport(name, Verdict.VERIFIED, wit, rng)
    if slope <= 1e-9 and r[-1] <= r[half][0] + 1e-12:
        ce = {"order": int(P), "log_root": float(r[-1]), "log_root_half": float(r[half][0])}
        return ConditionReport(name, Verdict.VIOLATED, wit, rng, ce)
    return ConditionReport(name, Verdict.INCONCLUSIVE, wit, rng)


def check_condition(M: WeightSequence, condition: str, max_order: int = 60,
                    grid: np.ndarray | None = None) -> ConditionReport:
    """Audit one growth condition of a weight sequence on ``|alpha| <= max_order``.

    Conditions
    ----------
    ``log_convex``
        ``M_p^2 <= M_{p-1} M_{p+1}`` (along every coordinate direction).
    ``derivation_closed``
        ``M_{p+1} <= A H^p M_p``.
    ``moderate_growth``
        ``M_{p+q} <= A^{p+q} M_p M_q``.
    ``almost_supermultiplicative``
        ``M_alpha M_beta <= A^{|alpha+beta|} M_{alpha+beta}``.
    ``derivation_closed_multi``
        ``M_{alpha+e_j} <= A^{|alpha|+1} M_alpha``.
    ``moderate_growth_multi``
        ``M_{alpha+beta} <= A^{|alpha+beta|} M_alpha M_beta``.
    ``supermultiplicative``
        ``M_j M_k <= M_{j+k}``.
    ``root_increasing``
        ``p -> M_p^{1/p}`` nondecreasing.
    ``root_positive``
        ``inf_p M_p^{1/p} > 0``.
    ``root_divergence``
        ``M_p^{1/p} -> infinity`` (trend test).
    """
    if condition not in SEQUENCE_CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if max_order < 1:
        raise ValueError("range must contain at least one order")
    grid = geometric_grid() if grid is None else np.asarray(grid, dtype=float)
    d, P = M.d, int(max_order)
    rng = {"max_order": P, "dimension": d, "grid": [float(grid[0]), float(grid[-1]), int(grid.size)]}

    if condition == "root_divergence":
        return root_divergence_report(M, P)

    if condition in ("log_convex", "supermultiplicative", "root_increasing", "root_positive"):
        return _exact_condition(M, condition, P, rng)

    if condition == "derivation_closed":
        if d != 1:
            raise ValueError("derivation_closed is one-dimensional; use derivation_closed_multi")
        m = M.log_orders(P)
        p = np.arange(P)
        D = m[1:] - m[:-1]
        res = search_witness(D, [np.ones(P), p.astype(float)], [grid, grid], ["A", "H"])
        return _report_from_search(condition, res, rng, lambda i: {"p": int(p[i])}, D, None)

    if condition in ("moderate_growth", "almost_supermultiplicative", "moderate_growth_multi"):
        a, b = _pairs(d, P)
        s = a + b
        la, lb, ls = M.log_many(a), M.log_many(b), M.log_many(s)
        D = ls - la - lb if condition != "almost_supermultiplicative" else la + lb - ls
        e = s.sum(axis=1).astype(float)
        res = search_witness(D, [e], [grid], ["A"])
        return _report_from_search(condition, res, rng,
                                   lambda i: {"alpha": a[i].tolist(), "beta": b[i].tolist()}, D, e)

    # derivation_closed_multi
    idx = np.array(enumerate_indices(d, P - 1), dtype=int).reshape(-1, d)
    rows, shifted, which = [], [], []
    for j in range(d):
        sh = idx.copy()
        sh[:, j] += 1
        rows.append(idx)
        shifted.append(sh)
        which.append(np.full(idx.shape[0], j))
    base = np.vstack(rows)
    sh = np.vstack(shifted)
    jj = np.concatenate(which)
    D = M.log_many(sh) - M.log_many(base)
    e = base.sum(axis=1) + 1.0
    res = search_witness(D, [e], [grid], ["A"])
    return _report_from_search(condition, res, rng,
                               lambda i: {"alpha": base[i].tolist(), "j": int(jj[i])}, D, e)


def _report_from_search(cid, res, rng, describe, D, e) -> ConditionReport:
    if res.status == Verdict.VIOLATED and res.worst is not None:
        ce = describe(res.worst)
        ce["log_gap"] = float(D[res.worst])
        return ConditionReport(cid, res.status, res.constants, rng, ce)
    return ConditionReport(cid, res.status, res.constants, rng)


def _exact_condition(M: WeightSequence, cid: str, P: int, rng: dict) -> ConditionReport:
    d = M.d
    if cid == "log_convex":
        idx = np.array(enumerate_indices(d, P - 1), dtype=int).reshape(-1, d)
        worst = None
        for j in range(d):
            sel = idx[idx[:, j] >= 1]
            if sel.size == 0:
                continue
            up, dn = sel.copy(), sel.copy()
            up[:, j] += 1
            dn[:, j] -= 1
            lhs = 2 * M.log_many(sel)
            rhs = M.log_many(up) + M.log_many(dn)
            ok = log_close_le(lhs, rhs)
            if not ok.all():
                i = int(np.argmax(np.where(ok, -np.inf, lhs - rhs)))
                worst = {"alpha": sel[i].tolist(), "j": j, "lhs": float(lhs[i]), "rhs": float(rhs[i])}
                break
        if worst:
            return ConditionReport(cid, Verdict.VIOLATED, {}, rng, worst)
        return ConditionReport(cid, Verdict.VERIFIED, {}, rng)
    if cid == "supermultiplicative":
        a, b = _pairs(d, P)
        lhs = M.log_many(a) + M.log_many(b)
        rhs = M.log_many(a + b)
        ok = log_close_le(lhs, rhs)
        if ok.all():
            return ConditionReport(cid, Verdict.VERIFIED, {}, rng)
        i = int(np.argmax(np.where(ok, -np.inf, lhs - rhs)))
        return ConditionReport(cid, Verdict.VIOLATED, {}, rng,
                               {"alpha": a[i].tolist(), "beta": b[i].tolist(), "lhs": float(lhs[i]),
                                "rhs": float(rhs[i])})
    r = np.array([M.min_log_of_order(n) / n for n in range(1, P + 1)])
    if cid == "root_increasing":
        ok = log_close_le(r[:-1], r[1:])
        if ok.all():
            return ConditionReport(cid, Verdict.VERIFIED, {}, rng)
        i = int(np.argmin(ok))
        return ConditionReport(cid, Verdict.VIOLATED, {}, rng,
                               {"p": i + 1, "log_root": float(r[i]), "log_root_next": float(r[i + 1])})
    # root_positive
    lo = float(np.min(r))
    if np.isfinite(lo):
        return ConditionReport(cid, Verdict.VERIFIED, {"min_root": math.exp(lo)}, rng)
    return ConditionReport(cid, Verdict.VIOLATED, {}, rng, {"p": int(np.argmin(r)) + 1})


# ---------------------------------------------------------------------------
# two-sequence statements


def check_shift_equivalence(M: WeightSequence, N: WeightSequence, max_order: int = 60,
                            t_samples: np.ndarray | None = None,
                            grid: np.ndarray | None = None) -> ConditionReport:
    """Audit the two equivalent shift conditions for a pair of sequences.

    Side (i): ``M_{p+1} <= A^{p+1} N_p``.  Side (ii):
    ``omega_N(t) + log t <= omega_M(A t) + B`` on the sampled ``t``; the
    additive constant is accepted when the gap has stopped growing over the
    upper half of the sampled decades.
    """
    if M.d != 1 or N.d != 1:
        raise ValueError("shift equivalence is one-dimensional")
    grid = geometric_grid() if grid is None else np.asarray(grid, dtype=float)
    P = int(max_order)
    m, n = M.log_orders(P + 1), N.log_orders(P)
    D = m[1:] - n
    e = np.arange(1, P + 2, dtype=float)
    res1 = search_witness(D, [e], [grid], ["A"])
    rng1 = {"max_order": P, "grid": [float(grid[0]), float(grid[-1]), int(grid.size)]}
    side1 = _report_from_search("shift_i", res1, rng1, lambda i: {"p": int(i)}, D, e)

    ts = np.logspace(-2, 3, 121) if t_samples is None else np.asarray(t_samples, dtype=float)
    ts = ts[ts > 0]
    lhs = omega_many(N, ts) + np.log(ts)
    dec = np.log10(ts)
    # orders for the settle test: position in decades above the smallest sample
    pos = dec - dec.min()
    side2 = None
    for A in grid:
        rhs = omega_many(M, A * ts)
        gap = lhs - rhs
        if not np.all(np.isfinite(gap)):
            continue
        st, mx = settle_status(gap, pos)
        if st == "settled":
            side2 = ConditionReport("shift_ii", Verdict.VERIFIED, {"A": float(A), "B": float(max(mx, 0.0))},
                                    {"t_min": float(ts.min()), "t_max": float(ts.max()), "samples": int(ts.size)})
            break
    if side2 is None:
        A = grid[-1]
        gap = lhs - omega_many(M, A * ts)
        st, mx = settle_status(gap, pos)
        verdict = Verdict.VIOLATED if st == "growing" else Verdict.INCONCLUSIVE
        i = int(np.argmax(gap))
        side2 = ConditionReport("shift_ii", verdict, {},
                                {"t_min": float(ts.min()), "t_max": float(ts.max()), "samples": int(ts.size)},
                                {"t": float(ts[i]), "gap": float(gap[i])})
    agree = (side1.verdict == side2.verdict)
    overall = side1.verdict if agree else Verdict.INCONCLUSIVE
    return ConditionReport("shift_equivalence", overall, {}, {"max_order": P}, None,
                           {"agreement": agree}, [side1, side2])


def verify_lower_bound(M: WeightSequence, alpha: Sequence[int], h: float,
                       t_samples: np.ndarray) -> ConditionReport:
    """Check ``log M_alpha + |alpha| log h >= log|t^alpha| - omega_M(t/h)`` at samples."""
    if h <= 0:
        raise ValueError("h must be positive")
    alpha = tuple(int(v) for v in alpha)
    ts = np.asarray(t_samples, dtype=float).reshape(-1, M.d)
    lhs = M.log_m(alpha) + sum(alpha) * math.log(h)
    om = omega_many(M, ts / h)
    rhs = np.array([log_power(t, alpha) for t in ts]) - om
    ok = log_close_le(rhs, lhs)
    rng = {"samples": int(ts.shape[0]), "alpha": list(alpha), "h": h}
    if ok.all():
        return ConditionReport("lower_bound", Verdict.VERIFIED, {"margin": float(lhs - np.max(rhs))}, rng)
    i = int(np.argmin(ok))
    return ConditionReport("lower_bound", Verdict.VIOLATED, {}, rng,
                           {"t": ts[i].tolist(), "lhs": lhs, "rhs": float(rhs[i])})


def check_mixed_condition(M: WeightSequence, N: WeightSequence, max_order: int = 40,
                          grid: np.ndarray | None = None, root_bound: float = 1e3,
                          margin: float = 1.0) -> ConditionReport:
    """Audit ``alpha^{alpha/2} M_beta <= B C^{|alpha|} H^{|alpha+beta|} N_{alpha+beta}``.

    ``C`` and ``H`` are searched on the grid and ``B`` is fitted.  The
    inequality forces ``N_alpha^{1/|alpha|} -> infinity``; when the roots of
    ``N`` are flat on the range the condition is reported violated through
    that consequence.
    """
    if M.d != N.d:
        raise ValueError("dimension mismatch")
    grid = geometric_grid() if grid is None else np.asarray(grid, dtype=float)
    d, P = M.d, int(max_order)
    roots = root_divergence_report(N, max(P, 8))
    n_root = math.exp(N.min_log_of_order(P) / P)
    rng = {"max_order": P, "grid": [float(grid[0]), float(grid[-1]), int(grid.size)]}
    details = {"root_of_N_at_max_order": n_root, "root_exceeds_bound": n_root > root_bound,
               "root_bound": root_bound}
    if roots.verdict == Verdict.VIOLATED:
        return ConditionReport("mixed", Verdict.VIOLATED, {}, rng,
                               {"reason": "roots of N stay bounded", **(roots.counterexample or {})},
                               details, [roots])
    a, b = _pairs(d, P)
    D = (np.array([log_alpha_pow_half_alpha(r) for r in a]) + M.log_many(b) - N.log_many(a + b))
    ea = a.sum(axis=1).astype(float)
    es = (a + b).sum(axis=1).astype(float)
    res = search_witness(D, [ea, es], [grid, grid], ["C", "H"], free="B", orders=es, margin=margin)
    wit = dict(res.constants)
    if res.status == Verdict.VERIFIED:
        wit["log_B"] = max(res.log_free, 0.0)
    ce = None
    if res.status == Verdict.VIOLATED and res.worst is not None:
        ce = {"alpha": a[res.worst].tolist(), "beta": b[res.worst].tolist(), "reason": "residual keeps growing"}
    return ConditionReport("mixed", res.status, wit, rng, ce, details, [roots])
