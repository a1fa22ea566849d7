"""Weight functions, Young conjugates and the induced weight matrices.

Everything is computed in the logarithmic variable ``u = log t``:
``phi(u) = omega(e^u)`` for the weight normalized to vanish on ``[0, 1]``.
The families below have closed forms for ``phi`` that avoid overflow.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .core import ConditionReport, Verdict, combine_verdicts, geometric_grid, log_close_le, settle_status
from .weight_matrix import (
    DEFAULT_LAMBDA_GRID,
    WeightMatrix,
    check_matrix_condition,
)
from .weight_seq import WeightSequence, omega_many

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_STEPS = 90
U_GRID_SIZE = 2001
U_LIMIT = 1e13
LITTLE_O_THRESHOLD = 0.05


class WeightFunction:
    """A weight ``omega : [0, inf) -> [0, inf)``.

    Parameters
    ----------
    raw : callable
        Vectorised raw weight ``t -> omega(t)``.
    phi : callable
        Vectorised ``u -> omega~(e^u)`` on ``u >= 0`` for the normalized
        weight ``omega~ = max(0, omega - omega(1))``.
    family : str
        ``gevrey``, ``log_power``, ``table`` or ``custom``.
    params : dict
        Family parameters.
    """

    def __init__(self, raw: Callable[[np.ndarray], np.ndarray], phi: Callable[[np.ndarray], np.ndarray],
                 family: str, params: dict | None = None, name: str | None = None):
        self.raw = raw
        self.phi = phi
        self.family = family
        self.params = dict(params or {})
        self.name = name or family
        self._conj: Conjugate | None = None
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"WeightFunction({self.name})"

    @property
    def normalized_on_unit(self) -> bool:
        return abs(float(self.raw(np.array([1.0]))[0])) <= 1e-12

    def __call__(self, t) -> np.ndarray:
        """Normalized weight ``max(0, omega(|t|) - omega(1))``, zero on ``[0, 1]``.

        ``t`` may be scalar, an array of radii, or an ``(n, d)`` array of
        points (radial extension by the Euclidean norm).
        """
        t = np.asarray(t, dtype=float)
        r = np.linalg.norm(t, axis=-1) if t.ndim == 2 else np.abs(t)
        out = np.zeros(r.shape)
        big = r > 1.0
        out[big] = self.phi(np.log(r[big]))
        return np.maximum(out, 0.0)

    @property
    def conjugate(self) -> "Conjugate":
        with self._lock:
            if self._conj is None:
                self._conj = Conjugate(self.phi)
        return self._conj


def gevrey(s: float) -> WeightFunction:
    """``omega(t) = t^{1/s}``; ``s = 1/2`` gives ``t^2``."""
    if s <= 0:
        raise ValueError("s must be positive")
    raw = lambda t: np.power(np.asarray(t, dtype=float), 1.0 / s)
    phi = lambda u: np.expm1(np.asarray(u, dtype=float) / s)
    return WeightFunction(raw, phi, "gevrey", {"s": s}, f"gevrey({s:g})")


def log_power(beta: float) -> WeightFunction:
    """``omega(t) = log^beta(1 + t)``."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    raw = lambda t: np.power(np.log1p(np.asarray(t, dtype=float)), beta)
    c = math.log(2.0) ** beta

    def phi(u):
        u = np.asarray(u, dtype=float)
        return np.power(u + np.log1p(np.exp(-u)), beta) - c

    return WeightFunction(raw, phi, "log_power", {"beta": beta}, f"log_power({beta:g})")


def from_points(points: Sequence[Sequence[float]], name: str = "table") -> WeightFunction:
    """Weight from samples ``[[t, omega], ...]`` with monotone interpolation.

    Interpolation is PCHIP in ``log t``; beyond the last sample the weight
    continues linearly in ``log t`` with the end slope.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be pairs [t, omega]")
    pts = pts[np.argsort(pts[:, 0])]
    if np.any(np.diff(pts[:, 1]) < 0):
        raise ValueError("tabulated weight must be nondecreasing")
    pos = pts[pts[:, 0] > 0]
    if pos.shape[0] < 2 or pos[0, 0] > 1.0 or pos[-1, 0] <= 1.0:
        raise ValueError("table needs at least two positive samples bracketing t = 1")
    x, y = np.log(pos[:, 0]), pos[:, 1]
    f = PchipInterpolator(x, y, extrapolate=False)
    end_slope = float(f.derivative()(x[-1]))
    lo = float(pts[0, 1])

    def phi_raw(u):
        u = np.asarray(u, dtype=float)
        out = np.where(u > x[-1], y[-1] + end_slope * (u - x[-1]), 0.0)
        inside = (u >= x[0]) & (u <= x[-1])
        out = np.where(inside, f(np.clip(u, x[0], x[-1])), out)
        return np.where(u < x[0], lo, out)

    base = float(phi_raw(np.array([0.0]))[0])

    def raw(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(t > 0, phi_raw(np.log(np.where(t > 0, t, 1.0))), lo)

    phi = lambda u: np.maximum(phi_raw(u) - base, 0.0)
    return WeightFunction(raw, phi, "table", {"points": pts.tolist()}, name)


def from_callable(omega: Callable[[np.ndarray], np.ndarray], name: str = "custom") -> WeightFunction:
    """Weight from an arbitrary vectorised callable."""
    base = float(np.asarray(omega(np.array([1.0])))[0])
    phi = lambda u: np.maximum(np.asarray(omega(np.exp(np.asarray(u, dtype=float)))) - base, 0.0)
    return WeightFunction(omega, phi, "custom", {}, name)


# ---------------------------------------------------------------------------
# Young conjugate


def _golden_max(f: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray,
                steps: int = GOLDEN_STEPS) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised golden-section search for the maximum of concave ``f`` on ``[a, b]``."""
    a, b = a.astype(float).copy(), b.astype(float).copy()
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c, None), f(d, None)
    for _ in range(steps):
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        nc = np.where(left, b - GOLDEN * (b - a), d)
        nd = np.where(left, c, a + GOLDEN * (b - a))
        new_x = np.where(left, nc, nd)
        fn = f(new_x, None)
        fc, fd = np.where(left, fn, fd), np.where(left, fc, fn)
        c, d = nc, nd
    x = np.where(fc > fd, c, d)
    return x, np.maximum(fc, fd)


class Conjugate:
    """Exact-on-demand Young conjugate ``phi*(s) = sup_{u >= 0} s u - phi(u)``.

    A log-spaced ``u`` grid brackets the maximiser through the slopes of
    ``phi``; golden-section search then refines it.  The grid is widened
    until its last slope exceeds every requested ``s``.
    """

    def __init__(self, phi: Callable[[np.ndarray], np.ndarray], n: int = U_GRID_SIZE):
        self.phi = phi
        self.n = n
        self.u_max = 8.0
        self._lock = threading.Lock()
        self._build()

    def _build(self) -> None:
        u = np.concatenate([[0.0], np.logspace(-3, math.log10(self.u_max), self.n)])
        with np.errstate(over="ignore"):
            v = np.asarray(self.phi(u), dtype=float)
        self.u, self.v = u, v
        self.slopes = np.diff(v) / np.diff(u)

    def ensure(self, s_max: float) -> None:
        with self._lock:
            while not (self.slopes[-1] > s_max):
                if self.u_max >= U_LIMIT:
                    raise ValueError(f"conjugate grid too short: phi grows too slowly to reach slope {s_max:g}")
                self.u_max *= 4.0
                self._build()

    def __call__(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros(s.shape)
        pos = s > 0
        if not pos.any():
            return out
        sp = s[pos]
        self.ensure(float(sp.max()))
        u, slopes = self.u, self.slopes
        i = np.searchsorted(slopes, sp, side="left")
        a = u[np.maximum(i - 1, 0)]
        b = u[np.minimum(i + 1, u.size - 1)]

        def f(x, _):
            with np.errstate(over="ignore", invalid="ignore"):
                return sp * x - self.phi(x)

        _, best = _golden_max(f, a, b)
        at_grid = sp * u[i] - self.v[i]
        out[pos] = np.maximum(np.maximum(best, at_grid), 0.0)
        return out

    def argmax(self, s) -> np.ndarray:
        """Maximising ``u`` for each ``s`` (``0`` when ``s <= phi'(0)``)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros(s.shape)
        pos = s > 0
        if not pos.any():
            return out
        sp = s[pos]
        self.ensure(float(sp.max()))
        i = np.searchsorted(self.slopes, sp, side="left")
        a = self.u[np.maximum(i - 1, 0)]
        b = self.u[np.minimum(i + 1, self.u.size - 1)]
        x, best = _golden_max(lambda x, _: sp * x - self.phi(x), a, b)
        out[pos] = np.where(best > 0, x, 0.0)
        return out


@dataclass
class YoungConjugate:
    """Tabulated conjugate on ``s_grid``.

    ``values`` are convex and ``values / s`` is nondecreasing; when the
    post-hoc convexification changed any value by more than ``tol`` the
    flag ``convexified`` is set.
    """

    s_grid: np.ndarray
    values: np.ndarray
    convexified: bool
    evaluator: Conjugate = field(repr=False)
    max_change: float = 0.0

    def __call__(self, s) -> np.ndarray:
        return self.evaluator(s)

    def biconjugate(self, u) -> np.ndarray:
        """``phi**(u) = sup_{s >= 0} s u - phi*(s)`` by golden-section search over ``s``."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        s, v = self.s_grid, self.values
        slopes = np.diff(v) / np.diff(s)
        if u.size and u.max() >= slopes[-1]:
            raise ValueError("s grid too short for the requested biconjugate range")
        i = np.searchsorted(slopes, u, side="left")
        a = s[np.maximum(i - 1, 0)]
        b = s[np.minimum(i + 1, s.size - 1)]
        ev = self.evaluator
        _, best = _golden_max(lambda x, _: u * x - ev(x), a, b)
        at_grid = u * s[i] - v[i]
        return np.maximum(np.maximum(best, at_grid), 0.0)


def _lower_hull_values(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    stack: list[int] = []
    for k in range(x.size):
        while len(stack) >= 2:
            i, j = stack[-2], stack[-1]
            if (y[j] - y[i]) * (x[k] - x[i]) >= (y[k] - y[i]) * (x[j] - x[i]):
                stack.pop()
            else:
                break
        stack.append(k)
    return np.interp(x, x[stack], y[stack])


def young_conjugate(omega: WeightFunction, s_max: float, grid_size: int = 2001,
                    tol: float = 1e-9) -> YoungConjugate:
    """Tabulate ``phi*_omega`` on ``[0, s_max]``.

    The grid holds ``0`` and ``grid_size - 1`` log-spaced points in
    ``[1e-3 s_max, s_max]``.  Values are computed by
    :class:`Conjugate` and then made convex (lower hull) with
    ``phi*(s)/s`` nondecreasing.
    """
    if s_max <= 0:
        raise ValueError("s_max must be positive")
    s = np.concatenate([[0.0], np.logspace(math.log10(s_max) - 3.0, math.log10(s_max), grid_size - 1)])
    raw = omega.conjugate(s)
    hull = _lower_hull_values(s, raw)
    ratio = np.maximum.accumulate(np.where(s > 0, hull / np.where(s > 0, s, 1.0), 0.0))
    vals = np.where(s > 0, ratio * s, 0.0)
    change = float(np.max(np.abs(vals - raw) / np.maximum(1.0, np.abs(raw))))
    return YoungConjugate(s, vals, change > tol, omega.conjugate, change)


def matrix_from_weight(omega: WeightFunction, lambda_grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
                       d: int = 1) -> WeightMatrix:
    """The matrix ``W^(lam)_alpha = exp(phi*(lam |alpha|) / lam)``."""
    conj = omega.conjugate

    def family(lam: float) -> WeightSequence:
        f = lambda p, lam=lam: conj(lam * np.asarray(p, dtype=float)) / lam
        return WeightSequence(d, log_order=f, name=f"W[{omega.name}]^({lam:g})", log_convex=True)

    M = WeightMatrix(d, family, lambda_grid, name=f"M[{omega.name}]")
    M.weight = omega
    return M


# ---------------------------------------------------------------------------
# validation of the defining properties


def _decade_grid(t_min: float, t_max: float, per_decade: int = 40) -> np.ndarray:
    n = max(int(round(per_decade * math.log10(t_max / t_min))) + 1, 8)
    return np.logspace(math.log10(t_min), math.log10(t_max), n)


def validate_weight_function(omega: WeightFunction, t_range: tuple[float, float] = (1e-3, 1e6)) -> ConditionReport:
    """Check the four defining properties of a weight function on samples.

    ``doubling``
        ``omega(2t) <= L (omega(t) + 1)``; ``L`` is the largest sampled
        ratio and the property holds when that ratio stops growing.
    ``quadratic_bound``
        ``omega(t) = O(t^2)``: log-log slope over the last two decades.
    ``log_dominance``
        ``log t = o(omega(t))``: slope of ``log(log t / omega)`` against
        ``log log t`` over the upper half of the range.
    ``log_convexity``
        ``u -> omega(e^u)`` convex: second differences on a uniform grid.
    """
    t_min, t_max = t_range
    if t_max < 1e6 or t_min > 1.0:
        raise ValueError("t_range must span at least [1, 1e6]")
    rng = {"t_min": t_min, "t_max": t_max}
    t = _decade_grid(t_min, t_max)
    w = np.asarray(omega.raw(t), dtype=float)
    w2 = np.asarray(omega.raw(2 * t), dtype=float)
    subs = []

    # doubling
    ratio = w2 / (w + 1.0)
    L = max(1.0, float(ratio.max()))
    last = t >= t_max / 10
    prev = (t >= t_max / 100) & ~last
    grow = float(ratio[last].max() / max(ratio[prev].max(), 1e-300))
    if grow <= 1.05:
        subs.append(ConditionReport("doubling", Verdict.VERIFIED, {"L": L}, rng, None, {"decade_growth": grow}))
    elif grow >= 2.0:
        i = int(np.argmax(ratio))
        subs.append(ConditionReport("doubling", Verdict.VIOLATED, {}, rng,
                                    {"t": float(t[i]), "ratio": float(ratio[i])}, {"decade_growth": grow}))
    else:
        subs.append(ConditionReport("doubling", Verdict.INCONCLUSIVE, {"L": L}, rng, None, {"decade_growth": grow}))

    # quadratic bound
    tail = t >= t_max / 100
    pos = w[tail] > 0
    if pos.sum() >= 2:
        slope = float(np.polyfit(np.log(t[tail][pos]), np.log(w[tail][pos]), 1)[0])
    else:
        slope = 0.0
    big = t >= 1
    c = float(np.max(w[big] / t[big] ** 2))
    if slope <= 2.0 + 1e-6:
        subs.append(ConditionReport("quadratic_bound", Verdict.VERIFIED, {"c": c}, rng, None, {"slope": slope}))
    elif slope > 2.05:
        subs.append(ConditionReport("quadratic_bound", Verdict.VIOLATED, {}, rng, {"slope": slope}))
    else:
        subs.append(ConditionReport("quadratic_bound", Verdict.INCONCLUSIVE, {}, rng, None, {"slope": slope}))

    # log dominance
    sel = (t >= math.sqrt(t_max)) & (w > 0)
    lt = np.log(t[sel])
    r = lt / w[sel]
    slope_g = float(np.polyfit(np.log(lt), np.log(r), 1)[0])
    if slope_g <= -0.1:
        subs.append(ConditionReport("log_dominance", Verdict.VERIFIED, {}, rng, None, {"slope": slope_g}))
    elif slope_g >= -0.01:
        subs.append(ConditionReport("log_dominance", Verdict.VIOLATED, {}, rng,
                                    {"t": float(t[sel][-1]), "log_t_over_omega": float(r[-1])}, {"slope": slope_g}))
    else:
        subs.append(ConditionReport("log_dominance", Verdict.INCONCLUSIVE, {}, rng, None, {"slope": slope_g}))

    # convexity of u -> omega(e^u)
    u = np.linspace(0.0, math.log(t_max), 4001)
    phi = np.asarray(omega.phi(u), dtype=float)
    sec = phi[2:] - 2 * phi[1:-1] + phi[:-2]
    tol = 1e-9 * np.maximum(1.0, np.abs(phi[1:-1]))
    if np.all(sec >= -tol):
        subs.append(ConditionReport("log_convexity", Verdict.VERIFIED, {}, {"u_max": float(u[-1]), "points": 4001}))
    else:
        i = int(np.argmin(sec + tol))
        subs.append(ConditionReport("log_convexity", Verdict.VIOLATED, {}, {"u_max": float(u[-1])},
                                    {"u": float(u[i + 1]), "second_difference": float(sec[i])}))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    return ConditionReport("weight_function", verdict, {"L": L}, rng, None, {}, subs)


# ---------------------------------------------------------------------------
# audit of the induced matrix


def doubling_constant(omega: WeightFunction, t_max: float = 1e8) -> float:
    """Smallest ``L >= 1`` with ``omega(2t) <= L(omega(t) + 1)`` on sampled ``t``."""
    t = _decade_grid(1e-3, t_max)
    w = np.asarray(omega.raw(t), dtype=float)
    return max(1.0, float(np.max(np.asarray(omega.raw(2 * t)) / (w + 1.0))))


def _log_w(M: WeightMatrix, lam: float, P: int) -> np.ndarray:
    return M.sequence(lam).log_orders(P)


def audit_weight_matrix(M: WeightMatrix, max_order: int = 200, h_values: Sequence[float] = (2.0, math.e, 10.0),
                        lambdas: Sequence[float] | None = None) -> ConditionReport:
    """Audit the structural properties of a matrix built from a weight.

    Items: ``normalized`` (``W_0 = 1``), ``log_convex`` (along every
    coordinate), ``monotone`` (in ``lambda``), ``doubling_split``
    (``W^(lam)_{a+b} <= W^(2lam)_a W^(2lam)_b``), ``absorption``
    (``h^|a| W^(lam)_a <= D W^(A lam)_a``), ``derivation`` (both derivation
    conditions) and ``product`` (both product conditions with ``kappa =
    lambda`` and ``A = 1``).  Entries depend only on ``|alpha|`` so index
    checks run over orders.
    """
    omega: WeightFunction | None = getattr(M, "weight", None)
    lams = M.lambda_grid if lambdas is None else np.array(sorted(float(v) for v in lambdas))
    P = int(max_order)
    rng = {"max_order": P, "lambdas": [float(v) for v in lams]}
    subs: list[ConditionReport] = []
    tables = {float(l): _log_w(M, l, P) for l in lams}

    bad = [l for l, w in tables.items() if w[0] != 0.0]
    subs.append(ConditionReport("normalized", Verdict.VIOLATED if bad else Verdict.VERIFIED, {}, rng,
                                {"lambda": bad[0]} if bad else None))

    ce = None
    for l, w in tables.items():
        ok = log_close_le(2 * w[1:-1], w[:-2] + w[2:])
        if not ok.all():
            i = int(np.argmin(ok)) + 1
            ce = {"lambda": l, "p": i}
            break
    subs.append(ConditionReport("log_convex", Verdict.VIOLATED if ce else Verdict.VERIFIED, {}, rng, ce))

    ce = None
    keys = sorted(tables)
    for a, b in zip(keys, keys[1:]):
        ok = log_close_le(tables[a], tables[b])
        if not ok.all():
            ce = {"kappa": a, "lambda": b, "p": int(np.argmin(ok))}
            break
    subs.append(ConditionReport("monotone", Verdict.VIOLATED if ce else Verdict.VERIFIED, {}, rng, ce))

    ce = None
    Q = min(P, 120)
    p, q = np.meshgrid(np.arange(Q + 1), np.arange(Q + 1), indexing="ij")
    mask = p + q <= Q
    for l in keys:
        w1 = _log_w(M, l, Q)
        w2 = _log_w(M, 2 * l, Q)
        ok = log_close_le(w1[(p + q)[mask]], w2[p[mask]] + w2[q[mask]])
        if not ok.all():
            i = int(np.argmin(ok))
            ce = {"lambda": l, "p": int(p[mask][i]), "q": int(q[mask][i])}
            break
    subs.append(ConditionReport("doubling_split", Verdict.VIOLATED if ce else Verdict.VERIFIED, {},
                                {**rng, "max_order": Q}, ce))

    subs.append(_absorption_item(M, keys, P, h_values, omega))

    der = [check_matrix_condition(M, c, max_order=min(P, 48), lambdas=lams)
           for c in ("derivation_roumieu", "derivation_beurling")]
    subs.append(ConditionReport("derivation", combine_verdicts([r.verdict for r in der]), {}, rng, None, {}, der))

    ce = None
    Qp = min(P, 120)
    for l in keys:
        w = _log_w(M, l, Qp)
        ok = log_close_le(w[p[mask]] + w[q[mask]], w[(p + q)[mask]])
        if not ok.all():
            i = int(np.argmin(ok))
            ce = {"lambda": l, "p": int(p[mask][i]), "q": int(q[mask][i])}
            break
    subs.append(ConditionReport("product", Verdict.VIOLATED if ce else Verdict.VERIFIED,
                                {} if ce else {"kappa": "lambda", "A": 1.0}, {**rng, "max_order": Qp}, ce))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    return ConditionReport("weight_matrix_audit", verdict, {}, rng, None, {}, subs)


def _absorption_item(M: WeightMatrix, lams: list[float], P: int, h_values, omega) -> ConditionReport:
    """``forall h exists A forall lam exists D``: ``h^p W^(lam)_p <= D W^(A lam)_p``."""
    L = doubling_constant(omega) if omega is not None else None
    rows, verdicts = [], []
    p = np.arange(P + 1, dtype=float)
    for h in h_values:
        found = None
        any_unclear = False
        for A in geometric_grid(0, 20):
            worst_D, ok_all, unclear = 0.0, True, False
            for l in lams:
                R = p * math.log(h) + _log_w(M, l, P) - _log_w(M, A * l, P)
                st, m = settle_status(R, p)
                if st != "settled":
                    ok_all = False
                    unclear |= st == "unclear"
                    break
                worst_D = max(worst_D, m)
            if ok_all:
                found = (float(A), max(worst_D, 0.0))
                break
            any_unclear |= unclear
        row = {"h": float(h)}
        if L is not None:
            k = math.ceil(math.log(h) + 1)
            row["reference_A"] = L ** (2 * k)
        if found:
            row.update({"A": found[0], "log_D_max": found[1]})
            verdicts.append(Verdict.VERIFIED)
        else:
            verdicts.append(Verdict.INCONCLUSIVE if any_unclear else Verdict.VIOLATED)
        rows.append(row)
    verdict = combine_verdicts(verdicts, "all")
    return ConditionReport("absorption", verdict, {"per_h": rows} if verdict == Verdict.VERIFIED else {},
                           {"max_order": P, "h_values": [float(h) for h in h_values]}, None, {"per_h": rows})


# ---------------------------------------------------------------------------
# comparison of associated functions


def isotropic_omega(M: WeightMatrix, lam: float, ts: np.ndarray) -> np.ndarray:
    """``omega_{W^(lam)}`` at points ``ts`` of shape ``(n, d)``."""
    return omega_many(M.sequence(lam), np.asarray(ts, dtype=float).reshape(-1, M.d))


def sandwich_check(omega: WeightFunction, M: WeightMatrix, lam: float, t_samples: np.ndarray,
                   B_grid: np.ndarray | None = None) -> ConditionReport:
    """Compare ``omega`` with ``lam * omega_{W^(lam)}`` in both directions.

    The left inequality ``lam omega_W(t) <= omega(t)`` is checked at every
    sample.  For the right inequality ``omega(t) <= B lam omega_W(t) + C``
    the smallest ``B`` on ``B_grid`` whose residual stops growing in
    ``|t|`` is reported with ``C`` the largest residual.  The reference
    constants ``B = 2 D_d`` and ``C = D_d + omega(exp(phi*(lam)/lam))``
    with ``D_d = max(1, L + ... + L^{d-1})`` are also replayed.
    """
    d = M.d
    ts = np.asarray(t_samples, dtype=float).reshape(-1, d)
    w = omega(ts)
    ow = isotropic_omega(M, lam, ts)
    left_ok = log_close_le(lam * ow, w)
    rng = {"lambda": lam, "samples": int(ts.shape[0]), "dimension": d}
    subs = []
    if left_ok.all():
        subs.append(ConditionReport("left", Verdict.VERIFIED, {}, rng))
    else:
        i = int(np.argmin(left_ok))
        subs.append(ConditionReport("left", Verdict.VIOLATED, {}, rng,
                                    {"t": ts[i].tolist(), "lhs": float(lam * ow[i]), "rhs": float(w[i])}))
    B_grid = 2.0 ** (np.arange(0, 41) / 4.0) if B_grid is None else np.asarray(B_grid, dtype=float)
    norms = np.linalg.norm(ts, axis=1)
    order = np.log1p(norms)
    found = None
    for B in B_grid:
        R = w - B * lam * ow
        st, m = settle_status(R, order)
        if st == "settled":
            found = {"B": float(B), "C": float(max(m, 0.0))}
            break
    L = doubling_constant(omega)
    D_d = max(1.0, sum(L ** k for k in range(1, d)))
    B_ref = 2.0 * D_d
    C_ref = D_d + float(omega(np.array([math.exp(float(omega.conjugate(lam)[0]) / lam)]))[0])
    ref_ok = bool(log_close_le(w, B_ref * lam * ow + C_ref).all())
    details = {"reference_B": B_ref, "reference_C": C_ref, "reference_holds": ref_ok, "L": L}
    if found:
        subs.append(ConditionReport("right", Verdict.VERIFIED, found, rng, None, details))
    else:
        subs.append(ConditionReport("right", Verdict.INCONCLUSIVE, {}, rng, None, details))
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    return ConditionReport("sandwich", verdict, found or {}, rng, subs[0].counterexample, details, subs)


# ---------------------------------------------------------------------------
# growth classes


class GrowthClass(str, enum.Enum):
    BIG_O = "BIG_O"
    LITTLE_O = "LITTLE_O"
    NEITHER = "NEITHER"


def _power_profile(seq: WeightSequence, P: int, r: float) -> tuple[np.ndarray, np.ndarray]:
    p = np.arange(P + 1, dtype=float)
    lp = np.where(p > 0, r * p * np.log(np.where(p > 0, p, 1.0)), 0.0)
    return lp - seq.log_orders(P), p


def _power_settle(seq: WeightSequence, logD: float, r: float, P_start: int, P_max: int) -> tuple[str, float, int]:
    P = P_start
    while True:
        D, p = _power_profile(seq, P, r)
        st, m = settle_status(D - p * logD, p)
        if st == "settled" or P >= P_max:
            return st, m, P
        P = min(2 * P, P_max)


def growth_class(omega: WeightFunction, r: float, lambdas: Sequence[float] | None = None,
                 quantifier: str = "all", t_max: float = 1e8, P_start: int = 256,
                 P_max: int = 1 << 16) -> tuple[GrowthClass | None, ConditionReport]:
    """Classify ``omega(t)`` against ``t^{1/r}`` by two independent routes.

    Route one looks at ``rho(t) = omega(t) / t^{1/r}`` on a log grid: a
    ratio at most ``0.05`` of its value one decade earlier, or a log-log
    slope below ``-0.05`` over the last two decades, means ``LITTLE_O``;
    a slope within ``0.05`` of zero means ``BIG_O``; otherwise ``NEITHER``.

    Route two runs witness searches on the induced matrix for
    ``alpha^{r alpha} <= C D^|alpha| W_alpha``: some ``D`` (big-O form) or
    every probe ``D = 2^k``, ``-8 <= k <= 0`` (little-o form), for all (or
    some, with ``quantifier='any'``) sampled ``lambda``.

    Returns the class, or ``None`` when the routes disagree, with both
    sub-reports.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    t = np.logspace(0, math.log10(t_max), int(40 * math.log10(t_max)) + 1)
    with np.errstate(over="ignore", divide="ignore"):
        rho = np.asarray(omega.raw(t), dtype=float) / t ** (1.0 / r)
    last, prev = rho[-1], float(rho[np.argmin(np.abs(t - t_max / 10))])
    tail = t >= t_max / 100
    pos = rho[tail] > 0
    slope = float(np.polyfit(np.log(t[tail][pos]), np.log(rho[tail][pos]), 1)[0]) if pos.sum() > 1 else -np.inf
    if last <= LITTLE_O_THRESHOLD * prev or slope < -0.05:
        cls1 = GrowthClass.LITTLE_O
    elif abs(slope) <= 0.05:
        cls1 = GrowthClass.BIG_O
    else:
        cls1 = GrowthClass.NEITHER
    rep1 = ConditionReport("ratio_route", Verdict.VERIFIED, {"class": cls1.value},
                           {"t_max": t_max, "threshold": LITTLE_O_THRESHOLD},
                           None, {"decade_ratio": float(last / prev) if prev > 0 else None, "slope": slope})

    M = matrix_from_weight(omega, DEFAULT_LAMBDA_GRID if lambdas is None else lambdas)
    lams = M.lambda_grid
    big_v, little_v, rows = [], [], []
    for lam in lams:
        seq = M.sequence(lam)
        # the largest D decides existence; the smallest working D is then
        # read off at the same range
        Dgrid = geometric_grid(-4, 40)
        st, m, P = _power_settle(seq, math.log(Dgrid[-1]), r, P_start, P_max)
        big_w = None
        if st == "settled":
            bv = Verdict.VERIFIED
            prof, pp = _power_profile(seq, P, r)
            for D in Dgrid:
                st2, m2 = settle_status(prof - pp * math.log(D), pp)
                if st2 == "settled":
                    big_w = {"D": float(D), "log_C": max(m2, 0.0), "max_order": P}
                    break
        else:
            bv = Verdict.VIOLATED if st == "growing" else Verdict.INCONCLUSIVE
        lv = Verdict.VERIFIED
        for D in 2.0 ** np.arange(-8, 1):
            st, m, P = _power_settle(seq, math.log(D), r, P_start, P_max)
            if st == "growing":
                lv = Verdict.VIOLATED
                break
            if st == "unclear":
                lv = Verdict.INCONCLUSIVE
        big_v.append(bv)
        little_v.append(lv)
        rows.append({"lambda": float(lam), "big_o": bv.value, "little_o": lv.value, "witness": big_w})
    q = "all" if quantifier == "all" else "any"
    bigV, littleV = combine_verdicts(big_v, q), combine_verdicts(little_v, q)
    if littleV == Verdict.VERIFIED:
        cls2 = GrowthClass.LITTLE_O
    elif bigV == Verdict.VERIFIED and littleV == Verdict.VIOLATED:
        cls2 = GrowthClass.BIG_O
    elif bigV == Verdict.VIOLATED:
        cls2 = GrowthClass.NEITHER
    else:
        cls2 = None
    rep2 = ConditionReport("matrix_route", Verdict.VERIFIED if cls2 else Verdict.INCONCLUSIVE,
                           {"class": cls2.value if cls2 else None}, {"lambdas": [float(v) for v in lams],
                                                                    "P_max": P_max, "quantifier": quantifier},
                           None, {"per_lambda": rows})
    agree = cls2 is not None and cls1 == cls2
    cls = cls1 if agree else None
    rep = ConditionReport(f"growth_class(r={r:g})", Verdict.VERIFIED if agree else Verdict.INCONCLUSIVE,
                          {"class": cls.value if cls else None}, {"r": r}, None,
                          {"ratio_route": cls1.value, "matrix_route": cls2.value if cls2 else None},
                          [rep1, rep2])
    return cls, rep
