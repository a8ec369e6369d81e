"""Density kernels generated by sigmoids, and their lattice sums.

For a sigmoid ``sigma`` the density on the positive reals is

    chi(x) = (sigma(log x + 1) - sigma(log x - 1)) / 2,

and in logarithmic coordinates ``phi(t) = chi(exp(t))``. Every series in the
package samples ``chi(exp(-k) u) = phi(log u - k)`` over integers ``k``, so
the code works with ``log u`` throughout; ``u = x**n`` overflows long before
the sums stop being interesting.

Bi-infinite sums are truncated to a window of ``2K + 1`` integers recentred at
``round(log u)``, which makes ``K`` a uniform accuracy knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, KernelConstructionError, ScaleTooSmallError
from .sigmoids import FAIL, SigmoidSpec, check_conditions, get_sigmoid

DEFAULT_K = 50
MAX_K = 1_000_000
_SNAP = 1e-10


def _tanh_closed_form(x):
    x = np.asarray(x, dtype=float)
    e2 = math.e**2
    e4 = math.e**4
    x2 = x * x
    return 0.5 * x2 * (e4 - 1.0) / (x2 * (1.0 + e4 + e2 * x2) + e2)


@dataclass(frozen=True)
class DensityKernel:
    sigmoid: SigmoidSpec
    closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False, compare=False)

    @property
    def name(self) -> str:
        return self.sigmoid.name

    def eval_log(self, t):
        """``phi(t) = chi(exp(t))``.

        Evaluated as ``(sigma(1 - |t|) - sigma(-1 - |t|)) / 2``, which equals
        the defining difference by the odd symmetry of ``sigma - 1/2`` and
        avoids cancelling two values close to 1 for large positive ``t``.
        """
        a = np.abs(np.asarray(t, dtype=float))
        if not np.all(np.isfinite(a)):
            raise DomainError("kernel evaluated at a non-finite point")
        s = self.sigmoid.eval
        out = 0.5 * (s(1.0 - a) - s(-1.0 - a))
        return float(out) if out.ndim == 0 else out

    def eval_x(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(~(x > 0)):
            raise DomainError("density kernel is defined for x > 0 only")
        return self.eval_log(np.log(x))

    __call__ = eval_x

    @property
    def value_at_e(self) -> float:
        """``chi(e)``, the floor of the truncated denominators."""
        return self.eval_log(1.0)


def make_kernel(s: SigmoidSpec | str) -> DensityKernel:
    """Build the density kernel of ``s``.

    Raises :class:`KernelConstructionError` when the decay or the symmetry
    condition fails; a failed concavity condition is tolerated.
    """
    if isinstance(s, str):
        s = get_sigmoid(s)
    report = check_conditions(s, 10.0, 1000)
    if report.condition_2_decay == FAIL or report.condition_3_odd_symmetry == FAIL:
        raise KernelConstructionError(
            f"sigmoid {s.name!r} fails decay/symmetry: slope={report.decay_slope:.3g}, "
            f"asymmetry={report.symmetry_deviation:.3g}")
    closed = _tanh_closed_form if s.name == "tanh" else None
    return DensityKernel(s, closed)


def default_truncation(kernel: DensityKernel, tol: float = 1e-12) -> int:
    """Half-width K of the summation window needed for accuracy ``tol``.

    Exponential and compact tails use 50; a polynomial tail of exponent
    ``1 + nu`` inverts the envelope, ``K = ceil(tol**(-1/nu))``, capped at
    ``MAX_K``.
    """
    if kernel.sigmoid.tail in ("exponential", "compact"):
        return DEFAULT_K
    return int(min(math.ceil(tol ** (-1.0 / kernel.sigmoid.decay_nu)), MAX_K))


def tail_envelope(kernel: DensityKernel, distance: float, order: float = 0.0,
                  terms: int = 2000) -> float:
    """Upper estimate of the kernel mass at log-distance beyond ``distance``.

    Sums ``2 * phi(d + m) * (d + m)**order`` over ``m >= 0``; since ``phi`` is
    even and non-increasing in ``|t|`` this dominates the discarded terms on
    both sides. Polynomial tails get an integral remainder past ``terms``.
    """
    d = max(float(distance), 0.0)
    t = d + np.arange(terms, dtype=float)
    vals = kernel.eval_log(t) * (t**order if order else 1.0)
    total = float(np.sum(vals))
    if kernel.sigmoid.tail == "polynomial":
        nu = kernel.sigmoid.decay_nu
        if order >= nu:
            return math.inf
        end = t[-1] + 1.0
        total += end * float(kernel.eval_log(end)) * end**order / (nu - order)
    return 2.0 * total


def lattice_bounds(n: float, a: float, b: float) -> tuple[int, int]:
    """``(ceil(n log a), floor(n log b))``: indices whose nodes ``exp(k/n)`` lie in [a, b].

    Values within a relative 1e-10 of an integer are snapped to it so that,
    e.g., ``n * log(exp(2))`` is not floored to ``2n - 1``.
    """
    if not 0 < a < b:
        raise DomainError(f"need 0 < a < b, got a={a}, b={b}")

    def snap(v):
        r = round(v)
        return r if abs(v - r) <= _SNAP * max(1.0, abs(v)) else None

    lo, hi = n * math.log(a), n * math.log(b)
    s = snap(lo)
    kmin = s if s is not None else math.ceil(lo)
    s = snap(hi)
    kmax = s if s is not None else math.floor(hi)
    if kmin > kmax:
        raise ScaleTooSmallError(
            f"scale n={n} too small for [{a}, {b}]: ceil(n log a)={kmin} > floor(n log b)={kmax}")
    return int(kmin), int(kmax)


def check_in_interval(x, a, b):
    x = np.asarray(x, dtype=float)
    slack = 1e-12 * b
    if np.any(~((x >= a - slack) & (x <= b + slack))):
        raise DomainError(f"evaluation point outside [{a}, {b}]")
    return x


def _log_positive(u):
    u = np.asarray(u, dtype=float)
    if np.any(~(u > 0)) or not np.all(np.isfinite(u)):
        raise DomainError("argument must be positive and finite")
    return np.log(u)


def _window(log_u, K):
    """Lattice indices ``round(log u) + j`` for ``|j| <= K`` (shape ``(..., 2K+1)``)."""
    j = np.arange(-K, K + 1, dtype=float)
    return np.round(log_u)[..., None] + j


def _squeeze(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


def partition_sum(kernel: DensityKernel, u, K: int = DEFAULT_K):
    """``sum_k chi(exp(-k) u)`` over the recentred window ``|k - round(log u)| <= K``."""
    if K < 0:
        raise ValueError("K must be non-negative")
    L = _log_positive(u)
    k = _window(L, K)
    return _squeeze(np.sum(kernel.eval_log(L[..., None] - k), axis=-1))


def denominator_sum(kernel: DensityKernel, x, n: int, a: float, b: float):
    """``sum_{k=ceil(n log a)}^{floor(n log b)} chi(exp(-k) x**n)`` for ``x`` in [a, b]."""
    kmin, kmax = lattice_bounds(n, a, b)
    x = check_in_interval(x, a, b)
    t = n * np.log(x)
    k = np.arange(kmin, kmax + 1, dtype=float)
    return _squeeze(np.sum(kernel.eval_log(t[..., None] - k), axis=-1))


@dataclass(frozen=True)
class MomentTable:
    """Algebraic and absolute moments of one order over a grid of ``u``."""

    order: float
    u: np.ndarray = field(repr=False)
    algebraic: np.ndarray = field(repr=False)
    absolute: np.ndarray = field(repr=False)
    sup_absolute: float
    truncation_K: int
    tail_estimate: float


def default_u_grid(points: int = 1001) -> np.ndarray:
    """One period ``[1, e]`` of the lattice; moments are invariant under ``u -> e u``."""
    return np.exp(np.linspace(0.0, 1.0, points))


def _signed_power(d, order):
    if float(order).is_integer():
        return d ** int(order)
    mag = np.zeros_like(d)
    nz = d != 0
    mag[nz] = np.exp(order * np.log(np.abs(d[nz])))
    return np.sign(d) * mag


def _abs_power(d, order):
    if order == 0:
        return np.ones_like(d)
    mag = np.zeros_like(d)
    nz = d != 0
    mag[nz] = np.exp(order * np.log(np.abs(d[nz])))
    return mag


def moments(kernel: DensityKernel, order: float, u_grid=None,
            K: Optional[int] = None) -> MomentTable:
    """Moments ``m(u) = sum chi(e^-k u) (k - log u)**order`` and ``M(u)`` with ``|.|``.

    For non-integer orders the algebraic moment uses the odd extension
    ``sign(d) |d|**order``. ``sup_absolute`` is the maximum over ``u_grid``
    (default: 1001 points spanning one period).
    """
    if order < 0:
        raise DomainError("moment order must be non-negative")
    if K is None:
        K = default_truncation(kernel)
    if K < 1:
        raise ValueError("K must be at least 1")
    u = default_u_grid() if u_grid is None else np.atleast_1d(np.asarray(u_grid, float))
    if u.size == 0:
        raise ValueError("u_grid must be non-empty")
    L = _log_positive(u)
    k = _window(L, K)
    d = k - L[:, None]
    w = kernel.eval_log(d)
    alg = np.sum(w * _signed_power(d, order), axis=1)
    ab = np.sum(np.abs(w) * _abs_power(d, order), axis=1)
    tail = tail_envelope(kernel, K + 0.5, order)
    return MomentTable(float(order), u, alg, ab, float(ab.max()), int(K), tail)


def tail_mass(kernel: DensityKernel, u, threshold: float, K: Optional[int] = None):
    """Kernel mass ``sum chi(e^-k u)`` over ``|k - log u| > threshold``.

    Only the ``K`` lattice points per side beyond the threshold are summed;
    the remainder is bounded by ``tail_envelope(kernel, threshold + K)``.
    """
    if not threshold > 0:
        raise DomainError("threshold must be positive")
    if K is None:
        K = default_truncation(kernel)
    L = _log_positive(u)
    reach = math.ceil(threshold) + K + 1
    k = _window(L, reach)
    d = np.abs(k - L[..., None])
    keep = (d > threshold) & (d <= threshold + K)
    w = np.where(keep, kernel.eval_log(d), 0.0)
    return _squeeze(np.sum(w, axis=-1))
