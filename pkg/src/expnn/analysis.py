"""Moduli of continuity, Mellin derivatives, error bounds and rate fits.

Sup norms and moduli are grid suprema, hence lower bounds of the true
quantities. The bound functions take a ``safety`` factor that inflates every
measured norm before it enters a bound; domination checks use 1.01.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .density import DensityKernel, make_kernel, moments
from .errors import FitError, PreconditionError, StencilError, UnsupportedKernelError
from .operators import (FunctionHandle, OperatorConfig, log_grid, nn_eval,
                        quasi_eval)

# 1 / chi(e) for the tanh kernel, rounded as in the source estimate
CHI_E_INVERSE_TANH = 4.14925
# sinh(2) = (e^4 - 1) / (2 e^2): tail constant of the tanh kernel
TAIL_CONSTANT_TANH = 3.6268
TWICE_TAIL_CONSTANT_TANH = 7.2536

NORM_POINTS = 2001
ERROR_POINTS = 501
SATISFY_SLACK = 1e-10

MELLIN_STEPS = {1: 6e-6, 2: 1e-4, 3: 1e-3, 4: 5e-3}
_STENCILS = {
    1: (np.array([-1.0, 0.0, 1.0]), np.array([-0.5, 0.0, 0.5])),
    2: (np.array([-1.0, 0.0, 1.0]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]), np.array([-0.5, 1.0, 0.0, -1.0, 0.5])),
    4: (np.array([-2.0, -1.0, 0.0, 1.0, 2.0]), np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}


@dataclass(frozen=True)
class ModulusEstimate:
    delta: float
    value: float
    grid_size: int


@dataclass(frozen=True)
class MellinDerivative:
    order: int
    at: object
    value: object
    step: float


@dataclass(frozen=True)
class BoundReport:
    theorem: str
    n: float
    nu: float
    bound: float
    measured_sup_error: float
    satisfied: bool


@dataclass(frozen=True)
class RateFit:
    scales: tuple
    errors: tuple
    slope: float
    intercept: float
    r_squared: float


def _report(theorem, n, nu, bound, measured):
    return BoundReport(theorem, n, nu, float(bound), float(measured),
                       bool(measured <= bound + SATISFY_SLACK))


def log_modulus(f: FunctionHandle, delta: float, grid: int = NORM_POINTS,
                domain: Optional[tuple] = None) -> ModulusEstimate:
    """Logarithmic modulus ``sup |f(x) - f(y)|`` over ``|log x - log y| <= delta``.

    ``x`` runs over ``grid`` log-uniform points and ``y = x exp(s)`` with
    ``s`` on a grid of ``(0, delta]`` no coarser than the x-grid; pairs leaving
    the domain are dropped.
    """
    if grid < 100:
        raise ValueError("grid must be at least 100")
    if not delta > 0:
        raise ValueError("delta must be positive")
    a, b = domain if domain is not None else f.interval
    la, lb = math.log(a), math.log(b)
    t = np.linspace(la, lb, grid)
    F = np.asarray(f.eval(np.exp(t)), dtype=float)
    width = lb - la
    spacing = width / (grid - 1)
    reach = min(delta, width)
    m = min(grid, max(1, math.ceil(reach / spacing)))
    shifts = reach * np.arange(1, m + 1) / m
    best = 0.0
    rows = max(1, 2_000_000 // grid)
    for i in range(0, m, rows):
        s = shifts[i:i + rows, None]
        ts = t[None, :] + s
        ok = ts <= lb + 1e-12 * max(1.0, abs(lb))
        G = np.asarray(f.eval(np.exp(np.where(ok, ts, t[None, :]))), dtype=float)
        diff = np.where(ok, np.abs(G - F[None, :]), 0.0)
        best = max(best, float(diff.max()))
    return ModulusEstimate(float(delta), best, grid)


def _check_stencil(f, t, order, h, domain):
    a, b = domain if domain is not None else f.interval
    reach = np.max(np.abs(_STENCILS[order][0])) * h
    t = np.asarray(t, dtype=float)
    if np.any(t - reach < math.log(a) - 1e-12) or np.any(t + reach > math.log(b) + 1e-12):
        raise StencilError(
            f"Mellin derivative of order {order} needs log-margin {reach:g} inside [{a}, {b}]")


def _mellin_fd(f, t, order, h):
    offsets, coeffs = _STENCILS[order]
    t = np.asarray(t, dtype=float)
    acc = np.zeros_like(t)
    for o, c in zip(offsets, coeffs):
        if c:
            acc = acc + c * np.asarray(f.eval(np.exp(t + o * h)), dtype=float)
    return acc / h**order


def mellin_derivative(f: FunctionHandle, x, order: int = 1, step: Optional[float] = None,
                      domain: Optional[tuple] = None) -> MellinDerivative:
    """``theta^r f(x)`` by centred differences of ``g(t) = f(exp(t))`` at ``t = log x``.

    With ``theta f(x) = x f'(x)`` the r-th Mellin derivative is exactly
    ``g^{(r)}(log x)``. Steps default to 6e-6 (r=1), 1e-4 (r=2), 1e-3, 5e-3.
    """
    if order not in _STENCILS:
        raise ValueError("order must be 1, 2, 3 or 4")
    h = MELLIN_STEPS[order] if step is None else float(step)
    x = np.asarray(x, dtype=float)
    t = np.log(x)
    _check_stencil(f, t, order, h, domain)
    val = _mellin_fd(f, t, order, h)
    if val.ndim == 0:
        return MellinDerivative(order, float(x), float(val), h)
    return MellinDerivative(order, x, val, h)


def stencil_margin(order: int, step: Optional[float] = None) -> float:
    h = MELLIN_STEPS[order] if step is None else step
    return float(np.max(np.abs(_STENCILS[order][0])) * h)


def theta_handle(f: FunctionHandle, order: int,
                 analytic: Optional[Callable] = None) -> FunctionHandle:
    """``theta^r f`` as a function handle.

    Uses ``analytic`` when given; otherwise the finite-difference derivative
    on the domain shrunk by the stencil reach.
    """
    a, b = f.interval
    if analytic is not None:
        return FunctionHandle(f"theta{order}[{f.name}]", analytic, (a, b))
    margin = stencil_margin(order)
    h = MELLIN_STEPS[order]
    inner = (a * math.exp(margin), b * math.exp(-margin))

    def fd(x):
        return _mellin_fd(f, np.log(x), order, h)

    return FunctionHandle(f"theta{order}[{f.name}]", fd, inner)


def sup_norm(f: FunctionHandle, points: int = NORM_POINTS,
             domain: Optional[tuple] = None) -> float:
    a, b = domain if domain is not None else f.interval
    return float(np.max(np.abs(f.eval(log_grid(a, b, points)))))


@functools.lru_cache(maxsize=1024)
def _nn_errors(f: FunctionHandle, kernel: DensityKernel, n: int, points: int):
    x = log_grid(*f.interval, points)
    err = np.abs(nn_eval(OperatorConfig("E_n", kernel, n), f, x) - f.eval(x))
    return float(err.max()), float(err.mean())


@functools.lru_cache(maxsize=1024)
def _quasi_errors(f: FunctionHandle, kernel: DensityKernel, n: int, window: tuple,
                  points: int, K: Optional[int]):
    x = log_grid(*window, points)
    err = np.abs(quasi_eval(OperatorConfig("Q_n", kernel, n, K), f, x) - f.eval(x))
    return float(err.max()), float(err.mean())


def measured_error(f: FunctionHandle, n: int, kernel: Optional[DensityKernel] = None,
                   points: int = ERROR_POINTS) -> tuple[float, float]:
    """(sup, mean) of ``|E_n f - f|`` on ``points`` log-uniform nodes of ``f``'s interval."""
    return _nn_errors(f, kernel or _tanh(), int(n), points)


def measured_quasi_error(f: FunctionHandle, n: int, kernel: Optional[DensityKernel] = None,
                         window: tuple = (0.5, 2.0), points: int = ERROR_POINTS,
                         K: Optional[int] = None) -> tuple[float, float]:
    return _quasi_errors(f, kernel or _tanh(), int(n), tuple(window), points, K)


@functools.lru_cache(maxsize=1)
def _tanh() -> DensityKernel:
    return make_kernel("tanh")


def _require_tanh(kernel):
    kernel = kernel or _tanh()
    if kernel.sigmoid.name != "tanh":
        raise UnsupportedKernelError(
            f"bound constants are specific to the tanh kernel, got {kernel.sigmoid.name!r}")
    return kernel


def _check_nu(nu):
    if not 0 < nu < 1:
        raise ValueError("nu must lie in (0, 1)")


def theorem6_bound(omega: float, f_sup: float, n: float, nu: float) -> float:
    """``omega(f, n^-nu) + 7.2536 ||f|| n^(nu - 1)``."""
    return omega + TWICE_TAIL_CONSTANT_TANH * f_sup * n ** (nu - 1.0)


def theorem3_bound(omega: float, f_sup: float, n: float, nu: float) -> float:
    """``4.14925`` times :func:`theorem6_bound`."""
    return CHI_E_INVERSE_TANH * theorem6_bound(omega, f_sup, n, nu)


def theorem4_bound(theta1_sup: float, theta2_sup: float, omega_theta2: float,
                   n: float, nu: float, width: float) -> float:
    """Second-order Mellin-Taylor estimate, assembled term by term.

    ``width`` is ``b - a`` as it enters the estimate. The last tail term
    repeats the ``theta^2`` contribution already present in the sum; it is
    kept so the value matches the published estimate.
    """
    tail = TAIL_CONSTANT_TANH / n ** (1.0 - nu)
    total = 0.0
    for i, norm in ((1, theta1_sup), (2, theta2_sup)):
        total += norm / math.factorial(i) * (n ** (-i * nu) + width**i * tail)
    total += omega_theta2 / (2.0 * n ** (2.0 * nu))
    total += tail * theta2_sup * width**2
    return CHI_E_INVERSE_TANH * total


def theorem2_bound(holder_H: float, lam: float, f_sup: float, moment: float,
                   chi_e: float, n: float, delta: float = 1.0) -> float:
    """``(H n^-lam M + 2 ||f|| delta^-lam n^-lam M) / chi(e)`` with ``M`` the absolute moment."""
    near = holder_H * n ** (-lam) * moment
    far = 2.0 * f_sup * delta ** (-lam) * n ** (-lam) * moment
    return (near + far) / chi_e


def bound_theorem2(f: FunctionHandle, kernel: DensityKernel, n: int, *,
                   points: int = ERROR_POINTS, norm_points: int = NORM_POINTS,
                   safety: float = 1.0, measured: Optional[float] = None) -> BoundReport:
    """Log-Hoelder rate bound for ``E_n`` (any admissible kernel), split at ``delta = 1``."""
    if f.holder is None:
        raise PreconditionError(f"{f.name} carries no log-Hoelder tag")
    lam, H = f.holder
    table = moments(kernel, lam)
    moment = table.sup_absolute + table.tail_estimate
    f_sup = safety * sup_norm(f, norm_points)
    bound = theorem2_bound(H, lam, f_sup, moment, kernel.value_at_e, n)
    if measured is None:
        measured, _ = _nn_errors(f, kernel, int(n), points)
    return _report("T2", n, lam, bound, measured)


def bound_theorem3(f: FunctionHandle, n: int, nu: float, *,
                   kernel: Optional[DensityKernel] = None, points: int = ERROR_POINTS,
                   norm_points: int = NORM_POINTS, safety: float = 1.0,
                   measured: Optional[float] = None) -> BoundReport:
    kernel = _require_tanh(kernel)
    _check_nu(nu)
    if not f.has("continuous"):
        raise PreconditionError(f"{f.name} is not tagged continuous")
    omega = safety * log_modulus(f, n ** (-nu), norm_points).value
    f_sup = safety * sup_norm(f, norm_points)
    if measured is None:
        measured, _ = _nn_errors(f, kernel, int(n), points)
    return _report("T3", n, nu, theorem3_bound(omega, f_sup, n, nu), measured)


def bound_theorem4(f: FunctionHandle, n: int, nu: float, *,
                   kernel: Optional[DensityKernel] = None,
                   theta: Optional[Sequence[Callable]] = None,
                   points: int = ERROR_POINTS, norm_points: int = NORM_POINTS,
                   safety: float = 1.0, measured: Optional[float] = None) -> BoundReport:
    """Second-order Mellin-Taylor bound (tag T4) for C^2 functions.

    Mellin norms come from finite differences unless ``theta = (theta1,
    theta2)`` supplies closed forms.
    """
    kernel = _require_tanh(kernel)
    _check_nu(nu)
    if not f.has("C2"):
        raise PreconditionError(f"{f.name} is not tagged C2")
    t1, t2 = (None, None) if theta is None else theta
    h1 = theta_handle(f, 1, t1)
    h2 = theta_handle(f, 2, t2)
    theta1_sup = safety * sup_norm(h1, norm_points)
    theta2_sup = safety * sup_norm(h2, norm_points)
    omega2 = safety * log_modulus(h2, n ** (-nu), norm_points).value
    a, b = f.interval
    bound = theorem4_bound(theta1_sup, theta2_sup, omega2, n, nu, b - a)
    if measured is None:
        measured, _ = _nn_errors(f, kernel, int(n), points)
    return _report("T4", n, nu, bound, measured)


def bound_theorem6(f: FunctionHandle, n: int, nu: float, *,
                   kernel: Optional[DensityKernel] = None, window: tuple = (0.5, 2.0),
                   K: Optional[int] = None, points: int = ERROR_POINTS,
                   norm_points: int = NORM_POINTS, safety: float = 1.0,
                   measured: Optional[float] = None) -> BoundReport:
    """Quasi-interpolation bound on ``window``.

    ``omega`` is taken over the window widened by ``n^-nu`` and ``||f||`` over
    the window widened by the truncation reach ``(K + 1) / n``: together these
    cover every sample the truncated series touches.
    """
    kernel = _require_tanh(kernel)
    _check_nu(nu)
    if not f.has("continuous"):
        raise PreconditionError(f"{f.name} is not tagged continuous")
    cfg = OperatorConfig("Q_n", kernel, n, K)
    lo, hi = window
    delta = n ** (-nu)
    omega = safety * log_modulus(f, delta, norm_points,
                                 (lo * math.exp(-delta), hi * math.exp(delta))).value
    reach = (cfg.K + 1) / n
    f_sup = safety * sup_norm(f, norm_points, (lo * math.exp(-reach), hi * math.exp(reach)))
    if measured is None:
        measured, _ = _quasi_errors(f, kernel, int(n), tuple(window), points, K)
    return _report("T6", n, nu, theorem6_bound(omega, f_sup, n, nu), measured)


def fit_rate(errors_by_n: Mapping[float, float]) -> RateFit:
    """Least-squares line through ``(log n, log error)``.

    Non-positive errors are dropped; at least four points spanning a decade
    must remain.
    """
    pairs = sorted((float(n), float(e)) for n, e in errors_by_n.items()
                   if e > 0 and math.isfinite(e))
    if len(pairs) < 4:
        raise FitError(f"need at least 4 positive errors, got {len(pairs)}")
    ns = np.array([p[0] for p in pairs])
    es = np.array([p[1] for p in pairs])
    if ns[-1] / ns[0] < 10:
        raise FitError("scales must span at least one decade")
    X, Y = np.log(ns), np.log(es)
    A = np.column_stack([X, np.ones_like(X)])
    (slope, intercept), *_ = np.linalg.lstsq(A, Y, rcond=None)
    resid = Y - (slope * X + intercept)
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(tuple(float(v) for v in ns), tuple(float(v) for v in es),
                   float(slope), float(intercept), r2)
