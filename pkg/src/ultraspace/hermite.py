"""Hermite functions, ladder operators and weighted seminorms.

Functions are held as finite Hermite expansions ``f = sum c_gamma H_gamma``
with a dense complex coefficient array, so multiplication by ``x_j`` and
differentiation in ``x_j`` act as exact sparse shifts.  An exact rational
variant in the unnormalised basis is provided for identities that must hold
without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import integrate
from scipy.special import gammaln

from .core import (
    LOG_RTOL,
    ConditionReport,
    MultiIndex,
    Verdict,
    combine_verdicts,
    enumerate_indices,
    indices_of_order,
    log_close_le,
    settle_status,
)
from .weight_seq import WeightSequence

PI_QUARTER = math.pi ** -0.25
LADDER_OPS = ("mult_x", "diff", "A_plus", "A_minus")
NORMAL_ORDER_CAP = 10
QUADRATURE_MAX = 512
TAIL_RUN = 8
SUP_RTOL = 1e-6
DEFAULT_L2_CAP = {1: 60, 2: 24, 3: 12}
DEFAULT_SUP_CAP = {1: 24, 2: 10, 3: 6}


# ---------------------------------------------------------------------------
# evaluation


def hermite_table(n_max: int, x, scaled: bool = False) -> np.ndarray:
    """Values ``H_n(x)`` for ``n = 0..n_max`` as an array of shape ``(n_max + 1, len(x))``.

    Uses the normalised three-term recurrence
    ``H_{n+1} = sqrt(2/(n+1)) x H_n - sqrt(n/(n+1)) H_{n-1}``
    with a running exponent, so neither factorials nor overflow occur.
    ``scaled=True`` drops the Gaussian factor ``exp(-x^2/2)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    out = np.empty((n_max + 1, x.size))
    E = np.zeros_like(x) if scaled else -0.5 * x * x
    a = np.full_like(x, PI_QUARTER)
    b = np.zeros_like(x)
    big = 1e150
    for k in range(n_max + 1):
        with np.errstate(divide="ignore"):
            out[k] = np.sign(a) * np.exp(np.log(np.abs(a)) + E)
        nxt = math.sqrt(2.0 / (k + 1)) * x * a - math.sqrt(k / (k + 1)) * b
        b, a = a, nxt
        over = np.abs(a) > big
        if over.any():
            a[over] /= big
            b[over] /= big
            E[over] += math.log(big)
    return out


def hermite_eval(gamma: Sequence[int], x, scaled: bool = False) -> float | np.ndarray:
    """``H_gamma(x)``, the product of one-dimensional Hermite functions.

    ``x`` is a point of length ``d`` or an array of shape ``(n, d)``.
    """
    gamma = tuple(int(g) for g in gamma)
    d = len(gamma)
    pts = np.asarray(x, dtype=float)
    single = pts.ndim <= 1 and pts.size == d
    pts = pts.reshape(-1, d)
    val = np.ones(pts.shape[0])
    for j, g in enumerate(gamma):
        val = val * hermite_table(g, pts[:, j], scaled)[g]
    return float(val[0]) if single else val


# ---------------------------------------------------------------------------
# quadrature


def gauss_hermite_quadrature(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int p(x) exp(-x^2) dx``, exact up to degree ``2n - 1``."""
    if not 1 <= int(n) <= QUADRATURE_MAX:
        raise ValueError(f"quadrature order must lie in [1, {QUADRATURE_MAX}], got {n}")
    return hermgauss(int(n))


@lru_cache(maxsize=64)
def _scaled_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights ``w_i exp(x_i^2)`` for ``int g(x) dx``.

    The scaled weights come from the Christoffel formula
    ``1 / sum_{k<n} H_k(x_i)^2``, which avoids underflow of ``w_i``.
    """
    x, _ = gauss_hermite_quadrature(n)
    tab = hermite_table(n - 1, x)
    return x, 1.0 / np.sum(tab * tab, axis=0)


def _tensor_nodes(x: np.ndarray, w: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    grids = np.meshgrid(*([x] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    wt = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return pts, wt


def gram_matrix(d: int, max_order: int, n: int | None = None) -> tuple[list[MultiIndex], np.ndarray]:
    """Quadrature Gram matrix ``int H_gamma H_delta`` over ``|gamma|, |delta| <= max_order``."""
    idx = enumerate_indices(d, max_order)
    n = max_order + 2 if n is None else n
    x, w = gauss_hermite_quadrature(n)
    tab = hermite_table(max_order, x, scaled=True)
    if d == 1:
        V = tab[[g[0] for g in idx]]
        return idx, (V * w) @ V.T
    pts, wt = _tensor_nodes(x, w, d)
    ii = np.array(idx)
    V = np.ones((len(idx), pts.shape[0]))
    # product over coordinates of the scaled one-dimensional tables
    grids = np.meshgrid(*([np.arange(n)] * d), indexing="ij")
    node_idx = np.stack([g.ravel() for g in grids], axis=1)
    for j in range(d):
        V = V * tab[ii[:, j]][:, node_idx[:, j]]
    return idx, (V * wt) @ V.T


# ---------------------------------------------------------------------------
# expansions


class HermiteExpansion:
    """Finite expansion ``sum_gamma c_gamma H_gamma`` on ``R^d``.

    Parameters
    ----------
    d : int
        Dimension.
    coeffs : mapping or ndarray
        Either ``{gamma: c_gamma}`` or a dense array of shape
        ``(n_1, ..., n_d)`` indexed by ``gamma``.

    Notes
    -----
    Instances are treated as immutable values; every operation returns a
    new expansion.
    """

    __slots__ = ("d", "array")

    def __init__(self, d: int, coeffs: Mapping[Sequence[int], complex] | np.ndarray | None = None):
        if d < 1:
            raise ValueError("dimension must be at least 1")
        self.d = int(d)
        if coeffs is None:
            arr = np.zeros((1,) * self.d, dtype=complex)
        elif isinstance(coeffs, np.ndarray):
            arr = np.array(coeffs, dtype=complex)
            if arr.ndim != self.d:
                raise ValueError(f"coefficient array must have {self.d} axes")
            if arr.size == 0:
                arr = np.zeros((1,) * self.d, dtype=complex)
        else:
            items = [(tuple(int(v) for v in g), complex(c)) for g, c in coeffs.items()]
            for g, _ in items:
                if len(g) != self.d or any(v < 0 for v in g):
                    raise ValueError(f"invalid multi-index {g} for d={self.d}")
            shape = tuple(max([g[j] for g, _ in items], default=0) + 1 for j in range(self.d))
            arr = np.zeros(shape, dtype=complex)
            for g, c in items:
                arr[g] += c
        self.array = arr

    # -- constructors -----------------------------------------------------
    @classmethod
    def basis(cls, gamma: Sequence[int], value: complex = 1.0) -> "HermiteExpansion":
        gamma = tuple(int(g) for g in gamma)
        return cls(len(gamma), {gamma: value})

    @classmethod
    def zero(cls, d: int) -> "HermiteExpansion":
        return cls(d)

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "HermiteExpansion":
        """Read ``{"d": int, "coeffs": [[[gamma...], re, im], ...]}``."""
        d = int(obj["d"])
        coeffs: dict[MultiIndex, complex] = {}
        for entry in obj.get("coeffs", []):
            g, re = entry[0], entry[1]
            im = entry[2] if len(entry) > 2 else 0.0
            key = tuple(int(v) for v in g)
            coeffs[key] = coeffs.get(key, 0.0) + complex(float(re), float(im))
        return cls(d, coeffs)

    def to_json(self) -> dict[str, Any]:
        return {"d": self.d,
                "coeffs": [[list(g), c.real, c.imag] for g, c in sorted(self.coeffs.items())]}

    # -- views --------------------------------------------------------------
    @property
    def coeffs(self) -> dict[MultiIndex, complex]:
        """Nonzero coefficients keyed by multi-index."""
        nz = np.argwhere(self.array != 0)
        return {tuple(int(v) for v in g): complex(self.array[tuple(g)]) for g in nz}

    @property
    def max_degree(self) -> int:
        """Largest ``|gamma|`` with a nonzero coefficient (0 for the zero expansion)."""
        nz = np.argwhere(self.array != 0)
        return int(nz.sum(axis=1).max()) if nz.size else 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.array)

    def coefficient(self, gamma: Sequence[int]) -> complex:
        g = tuple(int(v) for v in gamma)
        if any(v >= n for v, n in zip(g, self.array.shape)):
            return 0j
        return complex(self.array[g])

    def order_masses(self) -> np.ndarray:
        """``sum_{|gamma| = n} |c_gamma|`` for ``n = 0..max_degree``."""
        grids = np.indices(self.array.shape).sum(axis=0)
        out = np.zeros(int(grids.max()) + 1)
        np.add.at(out, grids.ravel(), np.abs(self.array).ravel())
        return out[: self.max_degree + 1]

    def __repr__(self) -> str:
        return f"HermiteExpansion(d={self.d}, terms={len(self.coeffs)}, max_degree={self.max_degree})"

    # -- arithmetic -------------------------------------------------------
    def _padded(self, shape: tuple[int, ...]) -> np.ndarray:
        out = np.zeros(shape, dtype=complex)
        out[tuple(slice(0, n) for n in self.array.shape)] = self.array
        return out

    def __add__(self, other: "HermiteExpansion") -> "HermiteExpansion":
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        shape = tuple(max(a, b) for a, b in zip(self.array.shape, other.array.shape))
        return HermiteExpansion(self.d, self._padded(shape) + other._padded(shape))

    def __sub__(self, other: "HermiteExpansion") -> "HermiteExpansion":
        return self + other * (-1.0)

    def __mul__(self, s: complex) -> "HermiteExpansion":
        return HermiteExpansion(self.d, self.array * s)

    __rmul__ = __mul__

    def allclose(self, other: "HermiteExpansion", atol: float = 1e-12, rtol: float = 0.0) -> bool:
        diff = self - other
        scale = max(np.abs(self.array).max(), np.abs(other.array).max(), 1.0)
        return bool(np.abs(diff.array).max() <= atol + rtol * scale)

    def truncated(self, K: int) -> "HermiteExpansion":
        """Terms with ``|gamma| <= K``."""
        tot = np.indices(self.array.shape).sum(axis=0)
        return HermiteExpansion(self.d, np.where(tot <= K, self.array, 0))

    def block(self, n: int) -> "HermiteExpansion":
        """Terms with ``|gamma| == n``."""
        tot = np.indices(self.array.shape).sum(axis=0)
        return HermiteExpansion(self.d, np.where(tot == n, self.array, 0))

    # -- norms and evaluation ----------------------------------------------
    def norm(self) -> float:
        """``||f||_2``, equal to the Euclidean norm of the coefficients."""
        return float(np.sqrt(np.sum(np.abs(self.array) ** 2)))

    def __call__(self, x) -> np.ndarray | complex:
        pts = np.asarray(x, dtype=float)
        single = pts.ndim <= 1 and pts.size == self.d
        pts = pts.reshape(-1, self.d)
        val = self.evaluate_points(pts)
        return complex(val[0]) if single else val

    def evaluate_points(self, pts: np.ndarray, scaled: bool = False) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, self.d)
        tabs = [hermite_table(n - 1, pts[:, j], scaled) for j, n in enumerate(self.array.shape)]
        # contract one axis at a time; the point axis stays first
        res = np.tensordot(tabs[0].T, self.array, axes=(1, 0))
        for j in range(1, self.d):
            res = np.einsum("pk,pk...->p...", tabs[j].T, res)
        return res

    def evaluate_grid(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        """Values on the tensor grid spanned by ``axes``; shape ``(len(a_1), ..., len(a_d))``."""
        res = self.array
        for j, a in enumerate(axes):
            tab = hermite_table(self.array.shape[j] - 1, a)
            res = np.tensordot(res, tab, axes=([0], [0]))
        return res

    def quadrature_norm(self, n: int | None = None) -> float:
        """``||f||_2`` by tensor Gauss-Hermite quadrature of ``|f|^2``."""
        n = self.max_degree + 2 if n is None else n
        x, w = gauss_hermite_quadrature(n)
        vals = self.evaluate_grid_scaled([x] * self.d)
        W = w
        for _ in range(self.d - 1):
            W = np.multiply.outer(W, w)
        return float(np.sqrt(np.sum(W * np.abs(vals) ** 2)))

    def evaluate_grid_scaled(self, axes: Sequence[np.ndarray]) -> np.ndarray:
        res = self.array
        for j, a in enumerate(axes):
            tab = hermite_table(self.array.shape[j] - 1, a, scaled=True)
            res = np.tensordot(res, tab, axes=([0], [0]))
        return res


def random_expansion(d: int, max_degree: int, rng: np.random.Generator | int | None = None,
                     complex_coeffs: bool = True, density: float = 1.0) -> HermiteExpansion:
    """Random expansion with Gaussian coefficients on ``|gamma| <= max_degree``."""
    rng = np.random.default_rng(rng)
    coeffs = {}
    for g in enumerate_indices(d, max_degree):
        if density < 1.0 and rng.random() > density:
            continue
        re = rng.normal()
        im = rng.normal() if complex_coeffs else 0.0
        coeffs[g] = complex(re, im)
    return HermiteExpansion(d, coeffs)


# ---------------------------------------------------------------------------
# ladder operators


def _axis_slice(ndim: int, j: int, sl: slice) -> tuple:
    s = [slice(None)] * ndim
    s[j] = sl
    return tuple(s)


def _weights(n: int, j: int, ndim: int, values: np.ndarray) -> np.ndarray:
    shape = [1] * ndim
    shape[j] = n
    return values.reshape(shape)


def ladder_apply(op: str, j: int, f: HermiteExpansion) -> HermiteExpansion:
    """Apply ``x_j``, ``d/dx_j``, ``A_{+,j} = x_j - d/dx_j`` or ``A_{-,j} = x_j + d/dx_j``.

    On basis functions, with ``g = gamma_j``::

        x_j H_gamma  = sqrt(g/2) H_{gamma-e_j} + sqrt((g+1)/2) H_{gamma+e_j}
        d_j H_gamma  = sqrt(g/2) H_{gamma-e_j} - sqrt((g+1)/2) H_{gamma+e_j}
        A_+ H_gamma  = sqrt(2(g+1)) H_{gamma+e_j}
        A_- H_gamma  = sqrt(2g) H_{gamma-e_j}

    Indices below zero are dropped.  ``j`` is zero-based.
    """
    if op not in LADDER_OPS:
        raise ValueError(f"unknown ladder operation {op!r}")
    if not 0 <= j < f.d:
        raise ValueError(f"axis {j} out of range for d={f.d}")
    c = f.array
    nd = c.ndim
    n = c.shape[j]
    if op == "A_minus":
        if n == 1:
            return HermiteExpansion(f.d, np.zeros_like(c))
        k = np.arange(n - 1)
        w = _weights(n - 1, j, nd, np.sqrt(2.0 * (k + 1)))
        return HermiteExpansion(f.d, w * c[_axis_slice(nd, j, slice(1, None))])
    shape = list(c.shape)
    shape[j] = n + 1
    out = np.zeros(shape, dtype=complex)
    k_up = np.arange(1, n + 1)           # targets reached from k-1 by raising
    up = np.sqrt(k_up / 2.0)
    if op == "A_plus":
        out[_axis_slice(nd, j, slice(1, None))] = _weights(n, j, nd, np.sqrt(2.0 * k_up)) * c
        return HermiteExpansion(f.d, out)
    sign = 1.0 if op == "mult_x" else -1.0
    out[_axis_slice(nd, j, slice(1, None))] += sign * _weights(n, j, nd, up) * c
    if n > 1:
        k_dn = np.arange(n - 1)          # targets reached from k+1 by lowering
        dn = np.sqrt((k_dn + 1) / 2.0)
        out[_axis_slice(nd, j, slice(0, n - 1))] += _weights(n - 1, j, nd, dn) * c[_axis_slice(nd, j, slice(1, None))]
    return HermiteExpansion(f.d, out)


def mult_x(j: int, f: HermiteExpansion) -> HermiteExpansion:
    return ladder_apply("mult_x", j, f)


def diff(j: int, f: HermiteExpansion) -> HermiteExpansion:
    return ladder_apply("diff", j, f)


def A_plus(j: int, f: HermiteExpansion) -> HermiteExpansion:
    return ladder_apply("A_plus", j, f)


def A_minus(j: int, f: HermiteExpansion) -> HermiteExpansion:
    return ladder_apply("A_minus", j, f)


def apply_power(op: str, alpha: Sequence[int], f: HermiteExpansion) -> HermiteExpansion:
    """``op^alpha f`` with the coordinate powers applied in turn."""
    g = f
    for j, a in enumerate(alpha):
        for _ in range(int(a)):
            g = ladder_apply(op, j, g)
    return g


def apply_monomial_derivative(f: HermiteExpansion, alpha: Sequence[int], beta: Sequence[int]) -> HermiteExpansion:
    """``x^alpha d^beta f``: differentiate first, then multiply."""
    if len(alpha) != f.d or len(beta) != f.d:
        raise ValueError("multi-index length must equal the dimension")
    return apply_power("mult_x", alpha, apply_power("diff", beta, f))


# ---------------------------------------------------------------------------
# exact arithmetic in the unnormalised basis


class RationalExpansion:
    """Exact expansion in the basis ``phi_gamma = sqrt(2^|gamma| gamma!) H_gamma``.

    In this basis every ladder operation has rational coefficients::

        x_j phi  = phi_{+e_j} / 2 + g phi_{-e_j}
        d_j phi  = g phi_{-e_j} - phi_{+e_j} / 2
        A_+ phi  = phi_{+e_j}
        A_- phi  = 2 g phi_{-e_j}

    so identities can be checked with :class:`fractions.Fraction` and no
    rounding at all.
    """

    __slots__ = ("d", "coeffs")

    def __init__(self, d: int, coeffs: Mapping[Sequence[int], Fraction | int] | None = None):
        self.d = int(d)
        self.coeffs: dict[MultiIndex, Fraction] = {}
        for g, c in (coeffs or {}).items():
            c = Fraction(c)
            if c != 0:
                key = tuple(int(v) for v in g)
                self.coeffs[key] = self.coeffs.get(key, Fraction(0)) + c

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalExpansion):
            return NotImplemented
        return self.d == other.d and self.coeffs == other.coeffs

    def __sub__(self, other: "RationalExpansion") -> "RationalExpansion":
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, Fraction(0)) - c
        return RationalExpansion(self.d, {g: c for g, c in out.items() if c != 0})

    def apply(self, op: str, j: int) -> "RationalExpansion":
        if op not in LADDER_OPS:
            raise ValueError(f"unknown ladder operation {op!r}")
        out: dict[MultiIndex, Fraction] = {}
        half = Fraction(1, 2)

        def put(g: MultiIndex, v: Fraction) -> None:
            out[g] = out.get(g, Fraction(0)) + v

        for g, c in self.coeffs.items():
            gj = g[j]
            up = g[:j] + (gj + 1,) + g[j + 1:]
            dn = g[:j] + (gj - 1,) + g[j + 1:]
            if op == "mult_x":
                put(up, half * c)
                if gj:
                    put(dn, gj * c)
            elif op == "diff":
                put(up, -half * c)
                if gj:
                    put(dn, gj * c)
            elif op == "A_plus":
                put(up, c)
            elif gj:
                put(dn, 2 * gj * c)
        return RationalExpansion(self.d, {g: v for g, v in out.items() if v != 0})

    def normalized_square(self, gamma: Sequence[int]) -> Fraction:
        """``|c_gamma|^2`` in the orthonormal basis: ``r_gamma^2 2^|gamma| gamma!``."""
        g = tuple(int(v) for v in gamma)
        r = self.coeffs.get(g, Fraction(0))
        return r * r * 2 ** sum(g) * math.prod(math.factorial(v) for v in g)

    def to_expansion(self) -> HermiteExpansion:
        out = {}
        for g, r in self.coeffs.items():
            log_scale = 0.5 * (sum(g) * math.log(2.0) + sum(math.lgamma(v + 1) for v in g))
            out[g] = float(r) * math.exp(log_scale)
        return HermiteExpansion(self.d, out)


def random_rational_expansion(d: int, max_degree: int, rng: np.random.Generator | int | None = None,
                              denominator: int = 16) -> RationalExpansion:
    rng = np.random.default_rng(rng)
    coeffs = {g: Fraction(int(rng.integers(-64, 65)), denominator) for g in enumerate_indices(d, max_degree)}
    return RationalExpansion(d, coeffs)


def commutator_defect(f: RationalExpansion, j: int = 0) -> RationalExpansion:
    """``(d_j x_j - x_j d_j) f - f``, which is exactly zero."""
    lhs = f.apply("mult_x", j).apply("diff", j) - f.apply("diff", j).apply("mult_x", j)
    return lhs - f


def lowering_coefficient_squared(alpha: Sequence[int], gamma: Sequence[int]) -> Fraction:
    """Exact ``c^2`` in ``A_-^alpha H_{gamma+alpha} = c H_gamma``.

    Computed in the unnormalised basis, where
    ``A_-^alpha phi_{gamma+alpha} = 2^|alpha| (gamma+alpha)!/gamma! phi_gamma``.
    The result equals ``2^|alpha| (gamma+alpha)! / gamma!``.
    """
    alpha = tuple(int(a) for a in alpha)
    gamma = tuple(int(g) for g in gamma)
    top = tuple(a + g for a, g in zip(alpha, gamma))
    f = RationalExpansion(len(gamma), {top: 1})
    for j, a in enumerate(alpha):
        for _ in range(a):
            f = f.apply("A_minus", j)
    # phi_top = sqrt(2^|top| top!) H_top, so divide by that squared norm
    norm_top = Fraction(2 ** sum(top) * math.prod(math.factorial(v) for v in top))
    other = set(f.coeffs) - {gamma}
    if other:
        raise AssertionError(f"lowering produced unexpected terms {sorted(other)}")
    return f.normalized_square(gamma) / norm_top


def check_lowering_identity(d: int, max_total: int, form: str = "stated") -> ConditionReport:
    """Check ``A_-^alpha H_{gamma+alpha} = sqrt(K) H_gamma`` over ``|alpha + gamma| <= max_total``.

    ``form="stated"`` uses ``K = 2^|alpha| gamma^alpha``; ``form="exact"``
    uses ``K = 2^|alpha| (gamma+alpha)!/gamma!``.  All arithmetic is exact.
    The stated form is the one that is usually quoted; it only bounds the
    exact constant from below (``gamma^alpha <= (gamma+alpha)!/gamma!``).
    """
    if form not in ("stated", "exact"):
        raise ValueError("form must be 'stated' or 'exact'")
    checked, failures, first = 0, 0, None
    for top in enumerate_indices(d, max_total):
        for alpha in enumerate_indices(d, sum(top)):
            if any(a > t for a, t in zip(alpha, top)):
                continue
            gamma = tuple(t - a for t, a in zip(top, alpha))
            got = lowering_coefficient_squared(alpha, gamma)
            if form == "stated":
                want = Fraction(2 ** sum(alpha) * math.prod(g ** a for g, a in zip(gamma, alpha)))
            else:
                want = Fraction(2 ** sum(alpha) * math.prod(
                    math.factorial(g + a) // math.factorial(g) for g, a in zip(gamma, alpha)))
            checked += 1
            if got != want:
                failures += 1
                if first is None:
                    first = {"alpha": list(alpha), "gamma": list(gamma),
                             "coefficient_squared": str(got), "claimed_squared": str(want)}
    verdict = Verdict.VERIFIED if failures == 0 else Verdict.VIOLATED
    return ConditionReport(f"lowering_identity_{form}", verdict, {},
                           {"d": d, "max_total": max_total, "cases": checked}, first,
                           {"failures": failures})


# ---------------------------------------------------------------------------
# normal ordering of A_+^gamma


@dataclass
class NormalOrderedOperator:
    """``sum C_{alpha,beta} x^alpha d^beta`` with integer coefficients."""

    d: int
    terms: dict[tuple[MultiIndex, MultiIndex], int] = field(default_factory=dict)

    def apply(self, f: HermiteExpansion) -> HermiteExpansion:
        out = HermiteExpansion.zero(self.d)
        by_beta: dict[MultiIndex, list[tuple[MultiIndex, int]]] = {}
        for (a, b), c in self.terms.items():
            by_beta.setdefault(b, []).append((a, c))
        for b, lst in by_beta.items():
            g = apply_power("diff", b, f)
            for a, c in lst:
                out = out + apply_power("mult_x", a, g) * float(c)
        return out


@lru_cache(maxsize=64)
def _normal_order_1d(n: int) -> dict[tuple[int, int], int]:
    """``(x - d)^n = sum C_{a,b} x^a d^b`` using ``d x^a = x^a d + a x^{a-1}``."""
    if n == 0:
        return {(0, 0): 1}
    prev = _normal_order_1d(n - 1)
    out: dict[tuple[int, int], int] = {}
    for (a, b), c in prev.items():
        out[(a + 1, b)] = out.get((a + 1, b), 0) + c
        out[(a, b + 1)] = out.get((a, b + 1), 0) - c
        if a:
            out[(a - 1, b)] = out.get((a - 1, b), 0) - a * c
    return {k: v for k, v in out.items() if v != 0}


def normal_order_A_plus(gamma: Sequence[int], cap: int = NORMAL_ORDER_CAP) -> NormalOrderedOperator:
    """Normal-ordered form of ``A_+^gamma = prod_j (x_j - d_j)^{gamma_j}``.

    Coordinates commute, so the coefficients are products of the
    one-dimensional ones, which are exact integers.
    """
    gamma = tuple(int(g) for g in gamma)
    if sum(gamma) > cap:
        raise ValueError(f"|gamma| = {sum(gamma)} exceeds the cap {cap}")
    terms: dict[tuple[MultiIndex, MultiIndex], int] = {((), ()): 1}
    for g in gamma:
        one = _normal_order_1d(g)
        nxt = {}
        for (a, b), c in terms.items():
            for (a1, b1), c1 in one.items():
                nxt[(a + (a1,), b + (b1,))] = c * c1
        terms = nxt
    return NormalOrderedOperator(len(gamma), terms)


def verify_normal_ordering(gamma: Sequence[int], f: HermiteExpansion | None = None,
                           cap: int = NORMAL_ORDER_CAP, tol: float = 1e-10) -> ConditionReport:
    """Check ``|C_{alpha,beta}(gamma)| <= 3^|gamma| (gamma!/(alpha+beta)!)^{1/2}`` for every term.

    When ``f`` is given, also compares the normal-ordered operator with
    ``|gamma|`` raising steps applied to ``f`` (relative tolerance ``tol``).
    """
    gamma = tuple(int(g) for g in gamma)
    op = normal_order_A_plus(gamma, cap)
    log_g = sum(math.lgamma(g + 1) for g in gamma)
    worst_margin, first_bad = math.inf, None
    for (a, b), c in sorted(op.terms.items()):
        s = tuple(x + y for x, y in zip(a, b))
        if any(v > g for v, g in zip(s, gamma)):
            first_bad = first_bad or {"alpha": list(a), "beta": list(b), "reason": "alpha+beta exceeds gamma"}
            continue
        rhs = sum(gamma) * math.log(3.0) + 0.5 * (log_g - sum(math.lgamma(v + 1) for v in s))
        lhs = math.log(abs(c))
        worst_margin = min(worst_margin, rhs - lhs)
        if not log_close_le(lhs, rhs):
            first_bad = first_bad or {"alpha": list(a), "beta": list(b), "C": c, "log_lhs": lhs, "log_rhs": rhs}
    details: dict[str, Any] = {"terms": len(op.terms), "min_log_margin": worst_margin}
    ok = first_bad is None
    if f is not None:
        direct = apply_power("A_plus", gamma, f)
        via = op.apply(f)
        scale = max(np.abs(direct.array).max(), 1.0)
        err = float(np.abs((direct - via).array).max()) / scale
        details["application_rel_error"] = err
        if err > tol:
            ok = False
            first_bad = first_bad or {"reason": "operator application mismatch", "rel_error": err}
    verdict = Verdict.VERIFIED if ok else Verdict.VIOLATED
    return ConditionReport("normal_ordering_bound", verdict, {}, {"gamma": list(gamma)},
                           None if ok else first_bad, details)


# ---------------------------------------------------------------------------
# the L2 bound for x^alpha d^beta H_gamma


def monomial_bound_log(alpha: Sequence[int], beta: Sequence[int], gamma: Sequence[int]) -> float:
    """``log`` of ``2^{|alpha+beta|/2} ((alpha+beta+gamma)!/gamma!)^{1/2}``."""
    n = sum(alpha) + sum(beta)
    top = sum(math.lgamma(a + b + g + 1) for a, b, g in zip(alpha, beta, gamma))
    bot = sum(math.lgamma(g + 1) for g in gamma)
    return 0.5 * n * math.log(2.0) + 0.5 * (top - bot)


def verify_seminorm_bound(alpha: Sequence[int], beta: Sequence[int], gamma: Sequence[int],
                          cap: int = 40) -> ConditionReport:
    """Check ``||x^alpha d^beta H_gamma||_2 <= 2^{|alpha+beta|/2} ((alpha+beta+gamma)!/gamma!)^{1/2}``.

    The left side is computed exactly through the ladder operators and
    Parseval.
    """
    alpha, beta, gamma = (tuple(int(v) for v in x) for x in (alpha, beta, gamma))
    if sum(alpha) + sum(beta) + sum(gamma) > cap:
        raise ValueError("multi-indices exceed the cap")
    g = apply_monomial_derivative(HermiteExpansion.basis(gamma), alpha, beta)
    lhs = g.norm()
    log_rhs = monomial_bound_log(alpha, beta, gamma)
    ok = log_close_le(math.log(lhs), log_rhs) if lhs > 0 else True
    rng = {"alpha": list(alpha), "beta": list(beta), "gamma": list(gamma)}
    wit = {"lhs": lhs, "rhs": math.exp(log_rhs)}
    if ok:
        return ConditionReport("monomial_norm_bound", Verdict.VERIFIED, wit, rng)
    return ConditionReport("monomial_norm_bound", Verdict.VIOLATED, wit, rng, {"lhs": lhs, "rhs": math.exp(log_rhs)})


@lru_cache(maxsize=16)
def monomial_norm_table(max_total: int) -> np.ndarray:
    """``T[a, b, g] = ||x^a d^b H_g||_2`` in one dimension for ``a + b + g <= max_total``.

    Entries outside the simplex are ``nan``.  Norms in higher dimensions are
    products over coordinates, since the operators factorise.
    """
    K = max_total
    T = np.full((K + 1, K + 1, K + 1), np.nan)
    for g in range(K + 1):
        cur = HermiteExpansion.basis((g,))
        for b in range(K + 1 - g):
            if b:
                cur = diff(0, cur)
            h = cur
            for a in range(K + 1 - g - b):
                if a:
                    h = mult_x(0, h)
                T[a, b, g] = h.norm()
    return T


def seminorm_bound_box(d: int, max_total: int) -> ConditionReport:
    """The monomial norm bound over the whole box ``|alpha + beta + gamma| <= max_total``."""
    T = monomial_norm_table(max_total)
    L2 = math.log(2.0)
    checked, worst, first = 0, math.inf, None
    idx = enumerate_indices(3 * d, max_total)
    arr = np.array(idx, dtype=int)
    a, b, g = arr[:, :d], arr[:, d:2 * d], arr[:, 2 * d:]
    lhs = np.zeros(arr.shape[0])
    for j in range(d):
        lhs = lhs + np.log(T[a[:, j], b[:, j], g[:, j]])
    n = (a + b).sum(axis=1)
    rhs = 0.5 * n * L2 + 0.5 * (gammaln(a + b + g + 1).sum(axis=1) - gammaln(g + 1).sum(axis=1))
    ok = log_close_le(lhs, rhs)
    checked = int(arr.shape[0])
    worst = float(np.min(rhs - lhs))
    if not ok.all():
        i = int(np.argmin(ok))
        first = {"alpha": a[i].tolist(), "beta": b[i].tolist(), "gamma": g[i].tolist(),
                 "log_lhs": float(lhs[i]), "log_rhs": float(rhs[i])}
    verdict = Verdict.VERIFIED if first is None else Verdict.VIOLATED
    return ConditionReport("monomial_norm_bound_box", verdict, {"min_log_margin": worst},
                           {"d": d, "max_total": max_total, "cases": checked}, first)


# ---------------------------------------------------------------------------
# sup norm


def sup_norm(f: HermiteExpansion, rtol: float = SUP_RTOL, max_levels: int = 40) -> tuple[float, np.ndarray]:
    """``sup |f|`` by grid search on ``[-R, R]^d`` with local zooming.

    ``R = sqrt(2 max_degree) + 8``.  The window around the current maximiser
    shrinks until two successive levels agree to ``rtol``.
    """
    if f.is_zero:
        return 0.0, np.zeros(f.d)
    d = f.d
    R = math.sqrt(2.0 * f.max_degree) + 8.0
    m0 = {1: 4001, 2: 401, 3: 81}.get(d, 21)
    axes = [np.linspace(-R, R, m0)] * d
    vals = np.abs(f.evaluate_grid(axes))
    best_i = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[best_i])
    loc = np.array([axes[j][best_i[j]] for j in range(d)])
    h = 2 * R / (m0 - 1)
    m = {1: 41, 2: 21, 3: 11}.get(d, 7)
    prev = best
    for _ in range(max_levels):
        axes = [np.linspace(loc[j] - 2 * h, loc[j] + 2 * h, m) for j in range(d)]
        vals = np.abs(f.evaluate_grid(axes))
        i = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i] >= best:
            best = float(vals[i])
            loc = np.array([axes[j][i[j]] for j in range(d)])
        h = 4 * h / (m - 1)
        if abs(best - prev) <= rtol * best and h < 1e-6 * max(1.0, R):
            break
        prev = best
    return best, loc


# ---------------------------------------------------------------------------
# weighted seminorms


@dataclass
class SeminormResult:
    """Truncated weighted seminorm with a tail certificate.

    Attributes
    ----------
    log_value : float
        Log of the sup over the evaluated ``(alpha, beta)``; ``+inf`` when
        the per-order maxima are judged to grow without bound.
    argmax : tuple
        ``(alpha, beta)`` attaining the value.
    status : str
        ``"certified"`` when the dominating bound proves that no order
        beyond ``index_cap`` can exceed the value, ``"divergent"`` for a
        growing profile, ``"lower_bound"`` otherwise.
    """

    log_value: float
    argmax: tuple[MultiIndex, MultiIndex]
    status: str
    index_cap: int
    certified_through: int | None
    norm: str
    per_order: np.ndarray

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value < 700 else math.inf

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_dict(self) -> dict[str, Any]:
        return {"log_value": self.log_value, "value": self.value, "status": self.status,
                "argmax": {"alpha": list(self.argmax[0]), "beta": list(self.argmax[1])},
                "index_cap": self.index_cap, "certified_through": self.certified_through, "norm": self.norm}


def _denominator_logs(M, d: int, N: int, log_h: float) -> np.ndarray:
    """``min_{|alpha+beta| = n}`` of ``n log h + log`` of the denominator, for ``n = 0..N``."""
    n = np.arange(N + 1)
    if isinstance(M, WeightSequence):
        base = M.min_log_orders(N)
    else:
        Ma, Mb = M
        ma, mb = Ma.min_log_orders(N), Mb.min_log_orders(N)
        base = np.array([np.min(ma[: k + 1] + mb[k::-1]) for k in n])
    return base + n * log_h


def _denominator_pair(M, alpha: MultiIndex, beta: MultiIndex) -> float:
    if isinstance(M, WeightSequence):
        return M.log_m(tuple(a + b for a, b in zip(alpha, beta)))
    Ma, Mb = M
    return Ma.log_m(alpha) + Mb.log_m(beta)


def tail_bound_logs(f: HermiteExpansion, orders: np.ndarray, norm: str = "L2") -> np.ndarray:
    """Upper bounds for ``max_{|alpha+beta| = n} ||x^alpha d^beta f||`` at each order ``n``.

    Uses ``sum_gamma |c_gamma| 2^{n/2} ((n + |gamma|)!/|gamma|!)^{1/2}``.  For
    the sup norm the Cramer bound ``|H_gamma| <= pi^{-1/4}`` and Cauchy-Schwarz
    over the ``binom(|gamma| + n + d, d)`` possible terms are added.
    """
    masses = f.order_masses()
    k = np.arange(masses.size)
    live = masses > 0
    n = np.asarray(orders, dtype=float)
    if not live.any():
        return np.full(n.shape, -np.inf)
    lm = np.log(masses[live])[None, :]
    kk = k[live][None, :]
    nn = n[:, None]
    terms = lm + 0.5 * nn * math.log(2.0) + 0.5 * (gammaln(nn + kk + 1) - gammaln(kk + 1))
    out = np.logaddexp.reduce(terms, axis=1)
    if norm == "SUP":
        top = f.max_degree + n
        count = gammaln(top + f.d + 1) - gammaln(top + 1) - math.lgamma(f.d + 1)
        out = out + 0.5 * count - 0.25 * math.log(math.pi)
    return out


def _pairs_by_beta(d: int, cap: int):
    """Yield ``beta`` and the list of ``alpha`` with ``|alpha| <= cap - |beta|``."""
    for beta in enumerate_indices(d, cap):
        yield beta, enumerate_indices(d, cap - sum(beta))


def seminorm(f: HermiteExpansion, M, h: float, norm: str = "L2", index_cap: int | None = None,
             margin: float = 1.0, absolute: bool = False) -> SeminormResult:
    """``sup_{alpha,beta} ||x^alpha d^beta f|| / (h^{|alpha+beta|} M_{alpha+beta})``.

    Parameters
    ----------
    f : HermiteExpansion
    M : WeightSequence or pair of WeightSequence
        A single sequence gives the denominator ``M_{alpha+beta}``; a pair
        ``(Ma, Mb)`` gives ``Ma_alpha Mb_beta``.
    h : float
        Positive scale.
    norm : {"L2", "SUP"}
        ``L2`` numerators are exact (ladder plus Parseval); ``SUP``
        numerators use :func:`sup_norm`.
    index_cap : int, optional
        Largest ``|alpha + beta|`` evaluated exactly.
    absolute : bool
        Replace each ``L2`` numerator by
        ``sum_gamma |c_gamma| ||x^alpha d^beta H_gamma||_2``, the quantity
        controlling absolute convergence of the expansion.

    Notes
    -----
    Beyond ``index_cap`` the dominating bound of :func:`tail_bound_logs` is
    scanned order by order.  The tail is certified once that bound has
    decreased for ``TAIL_RUN`` consecutive orders while staying below the
    current value at every order scanned.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    if norm not in ("L2", "SUP"):
        raise ValueError("norm must be 'L2' or 'SUP'")
    d = f.d
    cap = index_cap if index_cap is not None else (DEFAULT_L2_CAP if norm == "L2" else DEFAULT_SUP_CAP).get(d, 6)
    log_h = math.log(h)
    per_order = np.full(cap + 1, -np.inf)
    best, arg = -math.inf, ((0,) * d, (0,) * d)
    if f.is_zero:
        return SeminormResult(-math.inf, arg, "certified", cap, cap, norm, per_order)
    if absolute:
        if norm != "L2":
            raise ValueError("absolute sums are defined for the L2 norm")
        T = monomial_norm_table(cap + f.max_degree)
        sup = f.coeffs
        G = np.array(list(sup), dtype=int).reshape(-1, d)
        mags = np.abs(np.array(list(sup.values())))
    for beta, alphas in _pairs_by_beta(d, cap):
        if absolute:
            for alpha in alphas:
                prod = mags.copy()
                for j in range(d):
                    prod = prod * T[alpha[j], beta[j], G[:, j]]
                num = float(prod.sum())
                n = sum(alpha) + sum(beta)
                v = math.log(num) - n * log_h - _denominator_pair(M, alpha, beta)
                if v > per_order[n]:
                    per_order[n] = v
                if v > best:
                    best, arg = v, (alpha, beta)
            continue
        g = apply_power("diff", beta, f)
        cache: dict[MultiIndex, HermiteExpansion] = {(0,) * d: g}
        for alpha in alphas:
            if alpha not in cache:
                j = next(i for i, v in enumerate(alpha) if v > 0)
                prev = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
                cache[alpha] = mult_x(j, cache[prev])
            term = cache[alpha]
            num = term.norm() if norm == "L2" else sup_norm(term)[0]
            if num <= 0:
                continue
            n = sum(alpha) + sum(beta)
            v = math.log(num) - n * log_h - _denominator_pair(M, alpha, beta)
            if v > per_order[n]:
                per_order[n] = v
            if v > best:
                best, arg = v, (alpha, beta)
    # growth of the exact per-order profile
    orders = np.arange(cap + 1)
    fin = np.isfinite(per_order)
    if fin.sum() >= 8:
        st, _ = settle_status(per_order[fin], orders[fin].astype(float), margin)
        if st == "growing":
            return SeminormResult(math.inf, arg, "divergent", cap, None, norm, per_order)
    # tail certificate from the dominating bound
    limit = cap + 4096
    for seq in ((M,) if isinstance(M, WeightSequence) else tuple(M)):
        if seq.max_order is not None:
            limit = min(limit, seq.max_order)
        if seq.structure == "general":
            limit = min(limit, cap + 64)
    ns = np.arange(cap + 1, limit + 1)
    T = tail_bound_logs(f, ns, norm) - _denominator_logs(M, d, limit, log_h)[cap + 1:]
    run, through = 0, None
    for i in range(ns.size):
        if T[i] > best + LOG_RTOL * max(1.0, abs(best)):
            break
        run = run + 1 if i > 0 and T[i] < T[i - 1] else 0
        if run >= TAIL_RUN:
            through = int(ns[i])
            break
    status = "certified" if through is not None else "lower_bound"
    return SeminormResult(best, arg, status, cap, through, norm, per_order)


# ---------------------------------------------------------------------------
# constants used by the norm comparison


def l2_weight_constant(d: int, method: str = "quad") -> float:
    """``(int_{R^d} (1 + |x|^2)^{-(d+1)} dx)^{1/2}``.

    ``method="quad"`` integrates the radial profile numerically;
    ``"closed"`` uses ``pi^{d/2} Gamma(d/2 + 1) / Gamma(d + 1)``.
    """
    if method == "closed":
        val = math.pi ** (d / 2) * math.gamma(d / 2 + 1) / math.gamma(d + 1)
        return math.sqrt(val)
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    radial, _ = integrate.quad(lambda r: r ** (d - 1) * (1 + r * r) ** (-(d + 1)), 0, np.inf)
    return math.sqrt(sphere * radial)


SOBOLEV_CONSTANT = 1.0
"""``sup|g| <= max_{gamma in {0,1}^d} ||d^gamma g||_2`` holds with constant one.

In one variable ``|g(x)|^2 <= ||g||_2 ||g'||_2``; iterating over the
coordinates gives the mixed-derivative form.
"""


# ---------------------------------------------------------------------------
# comparison of the L2 and sup seminorm systems


def compare_bounds(lhs: SeminormResult | float, log_const: float, rhs: SeminormResult | float,
                   cid: str, rng: Mapping[str, Any] | None = None) -> ConditionReport:
    """Decide ``lhs <= e^{log_const} rhs`` from truncated seminorms.

    A truncated sup is a lower bound of the true value, so the check is
    ``VERIFIED`` when a certified (or exact) left side stays below the
    computed right side, ``VIOLATED`` when the left side exceeds a
    certified right side, and ``INCONCLUSIVE`` otherwise.  Plain floats are
    taken as exact log values.
    """
    def unpack(v):
        if isinstance(v, SeminormResult):
            return v.log_value, v.status in ("certified",)
        return float(v), True

    l, l_exact = unpack(lhs)
    r, r_exact = unpack(rhs)
    r_total = r + log_const
    margin = r_total - l if math.isfinite(l) or math.isfinite(r_total) else 0.0
    if l == -math.inf:
        verdict = Verdict.VERIFIED
        margin = math.inf
    elif log_close_le(l, r_total):
        verdict = Verdict.VERIFIED if l_exact else Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.VIOLATED if r_exact else Verdict.INCONCLUSIVE
    wit = {"log_lhs": l, "log_rhs": r_total, "log_const": log_const, "log_margin": margin,
           "lhs_certified": l_exact, "rhs_certified": r_exact}
    ce = None if verdict != Verdict.VIOLATED else {"log_lhs": l, "log_rhs": r_total}
    return ConditionReport(cid, verdict, wit, dict(rng or {}), ce)


def _equivalence_recipe(M, kind: str, direction: str, lam: float, h: float, d: int) -> dict[str, Any]:
    """Parameters ``(kappa, h~, C)`` of one seminorm comparison.

    Returns the member and scale of each side and the log of the constant,
    for ``||f||_left <= C ||f||_right``.
    """
    from .weight_matrix import HypothesisError, check_matrix_condition, derivation_chain

    def hermite_witness(cond: str, at: float) -> dict[str, Any]:
        rep = check_matrix_condition(M, cond, lambdas=[at])
        sub = rep.sub_reports[0]
        if sub.verdict != Verdict.VERIFIED:
            raise HypothesisError(f"{cond} has no witness at lambda={at:g} ({sub.verdict.value})")
        return sub.witnesses

    C1 = l2_weight_constant(d)
    poly = 0.5 * (d + 1) * math.log(d + 1)
    n_sup = 2 * d * (d + 1)
    if kind == "beurling" and direction == "l2_by_sup":
        ch = derivation_chain(M, "beurling", lam, d + 1)
        ht = min(1.0, h) / ch.A
        return {"left": ("L2", lam, h), "right": ("SUP", ch.kappa, ht),
                "log_const": math.log(C1) + poly, "witnesses": {"kappa": ch.kappa, "A_lambda": ch.A}}
    if kind == "beurling" and direction == "sup_by_l2":
        ch = derivation_chain(M, "beurling", lam, n_sup)
        w = hermite_witness("hermite_beurling", ch.kappa)
        H, kt = w["H"], w["kappa"]
        C = 1.0 / H
        ht = min(1.0, h) / (2 * H * ch.A)
        lc = (math.log(SOBOLEV_CONSTANT) + w["log_B_max"] + 2 * n_sup * math.log(2 * C * H * ch.A)
              + n_sup * math.log(d) + (-n_sup * math.log(h) if h < 1 else 0.0))
        return {"left": ("SUP", lam, h), "right": ("L2", kt, ht), "log_const": lc,
                "witnesses": {"kappa": ch.kappa, "kappa_tilde": kt, "A_lambda": ch.A, "H": H, "C": C,
                              "log_B": w["log_B_max"]}}
    if kind == "roumieu" and direction == "l2_by_sup":
        ch = derivation_chain(M, "roumieu", lam, d + 1)
        ht = max(h * ch.A, 1.0)
        return {"left": ("L2", ch.kappa, ht), "right": ("SUP", lam, h),
                "log_const": math.log(C1) + poly + (d + 1) * math.log(ht),
                "witnesses": {"kappa": ch.kappa, "A_lambda": ch.A}}
    if kind == "roumieu" and direction == "sup_by_l2":
        w = hermite_witness("hermite_roumieu", lam)
        ch = derivation_chain(M, "roumieu", w["kappa"], n_sup)
        H, C = w["H"], w["C"]
        ht = 2 * ch.A * H * h
        q = 2 * ch.A * H * h * (1 + h ** -2)
        lc = (math.log(SOBOLEV_CONSTANT) + w["log_B"] + 2 * n_sup * math.log(C)
              + max(0.0, n_sup * math.log(q)))
        return {"left": ("SUP", ch.kappa, ht), "right": ("L2", lam, h), "log_const": lc,
                "witnesses": {"kappa": w["kappa"], "kappa_tilde": ch.kappa, "A_lambda": ch.A, "H": H, "C": C,
                              "log_B": w["log_B"]}}
    raise ValueError(f"unknown comparison {kind!r}/{direction!r}")


def seminorm_equivalence_check(f: HermiteExpansion, M, kind: str, directions: Sequence[str] | None = None,
                               lambdas: Sequence[float] = (1.0,), hs: Sequence[float] = (0.5, 1.0, 2.0),
                               index_cap: int | None = None) -> ConditionReport:
    """Compare the ``L2`` and ``SUP`` seminorm systems of a weight matrix.

    For each sampled ``(lambda, h)`` and direction the member ``kappa``, the
    scale ``h~`` and the constant are built from matrix witnesses:

    * ``"l2_by_sup"``: an ``L2`` seminorm is bounded by a ``SUP`` seminorm
      using ``d + 1`` chained derivation witnesses and
      ``C1 = (int (1 + |x|^2)^{-(d+1)} dx)^{1/2}``;
    * ``"sup_by_l2"``: a ``SUP`` seminorm is bounded by an ``L2`` seminorm
      using ``2d(d+1)`` chained derivation witnesses and the Hermite-type
      condition, with the Sobolev-type constant :data:`SOBOLEV_CONSTANT`.

    Raises
    ------
    HypothesisError
        When a required matrix witness cannot be found.
    """
    if kind not in ("roumieu", "beurling"):
        raise ValueError("kind must be 'roumieu' or 'beurling'")
    dirs = list(directions) if directions is not None else ["l2_by_sup", "sup_by_l2"]
    d = f.d
    subs = []
    for direction in dirs:
        for lam in lambdas:
            for h in hs:
                rec = _equivalence_recipe(M, kind, direction, float(lam), float(h), d)
                (nl, ll, hl), (nr, lr, hr) = rec["left"], rec["right"]
                capl = index_cap if nl == "L2" else None
                capr = index_cap if nr == "L2" else None
                left = seminorm(f, M.sequence(ll), hl, nl, capl)
                right = seminorm(f, M.sequence(lr), hr, nr, capr)
                rng = {"direction": direction, "lambda": float(lam), "h": float(h),
                       "left": {"norm": nl, "lambda": ll, "h": hl, "status": left.status},
                       "right": {"norm": nr, "lambda": lr, "h": hr, "status": right.status}}
                rep = compare_bounds(left, rec["log_const"], right, f"{direction}@{lam:g},{h:g}", rng)
                rep.witnesses.update(rec["witnesses"])
                subs.append(rep)
    verdict = combine_verdicts([s.verdict for s in subs], "all")
    margins = [s.witnesses["log_margin"] for s in subs]
    wit = {"min_log_margin": min(margins) if margins else math.inf}
    return ConditionReport(f"seminorm_equivalence_{kind}", verdict, wit,
                           {"lambdas": [float(v) for v in lambdas], "hs": [float(v) for v in hs],
                            "directions": dirs}, None, {}, subs)
