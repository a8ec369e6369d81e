"""Exponential-type sampling operators built on a density kernel.

Four families share the lattice ``exp(k/n)``:

``E_n``
    the normalised neural-network operator on a compact interval [a, b],
    summing over ``k = ceil(n log a) .. floor(n log b)``;
``Q_n``
    the quasi-interpolation series over all integers, truncated to
    ``|k - n log x| <= K``;
``E_n_multivariate``
    ``E_n`` with the product kernel on an N-box;
``S_w``
    the generalized exponential sampling series with real ``w``, evaluated
    literally in the x-domain (kept separate from ``Q_n`` as a cross-check).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .density import (DensityKernel, check_in_interval, default_truncation,
                      lattice_bounds, tail_envelope)
from .errors import DomainError

FAMILIES = ("E_n", "Q_n", "E_n_multivariate", "S_w")
_CHUNK = 4_000_000


@dataclass(frozen=True, eq=False)
class FunctionHandle:
    """A target function on the positive reals (or an N-box of them).

    ``eval`` is vectorised: for ``dimension == 1`` it maps an array of points
    to an array of values, otherwise it takes an array whose last axis has
    length ``dimension``. ``domain`` is ``(a, b)`` or a tuple of such pairs.
    ``tags`` draws from ``bounded``, ``continuous``, ``C2``; a log-Hoelder
    pair ``(lam, H)`` goes in ``holder``.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    domain: tuple
    tags: frozenset = frozenset({"bounded", "continuous"})
    holder: Optional[tuple] = None
    dimension: int = 1

    def __post_init__(self):
        object.__setattr__(self, "tags", frozenset(self.tags))
        boxes = self.box
        if len(boxes) != self.dimension:
            raise ValueError("domain does not match dimension")
        for a, b in boxes:
            if not 0 < a < b:
                raise DomainError(f"{self.name}: need 0 < a < b, got ({a}, {b})")

    def __call__(self, x):
        out = np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)
        return float(out) if out.ndim == 0 else out

    @property
    def box(self) -> tuple:
        if self.dimension == 1 and np.ndim(self.domain[0]) == 0:
            return ((float(self.domain[0]), float(self.domain[1])),)
        return tuple((float(a), float(b)) for a, b in self.domain)

    @property
    def interval(self) -> tuple:
        if self.dimension != 1:
            raise ValueError(f"{self.name} is {self.dimension}-dimensional")
        return self.box[0]

    def has(self, tag: str) -> bool:
        if tag == "continuous" and "C2" in self.tags:
            return True
        return tag in self.tags

    def with_domain(self, a, b=None) -> "FunctionHandle":
        domain = (a, b) if b is not None else a
        return replace(self, domain=domain)

    def is_finite_on_domain(self, points: int = 1000) -> bool:
        grids = [log_grid(a, b, points) for a, b in self.box]
        if self.dimension == 1:
            vals = self.eval(grids[0])
        else:
            mesh = np.stack(np.meshgrid(*[g[:: max(1, points // 50)] for g in grids],
                                        indexing="ij"), axis=-1)
            vals = self.eval(mesh)
        return bool(np.all(np.isfinite(vals)))


@dataclass(frozen=True)
class OperatorConfig:
    family: str
    kernel: DensityKernel
    scale: float
    truncation_K: Optional[int] = None
    dimension: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown operator family {self.family!r}")
        if not self.scale > 0:
            raise DomainError("scale must be positive")
        if self.family != "S_w" and float(self.scale) != int(self.scale):
            raise DomainError(f"{self.family} needs an integer scale n")
        if self.dimension < 1:
            raise DomainError("dimension must be positive")

    @property
    def K(self) -> int:
        return self.truncation_K if self.truncation_K is not None \
            else default_truncation(self.kernel)


def log_grid(a: float, b: float, points: int) -> np.ndarray:
    """``points`` log-uniform nodes on [a, b], endpoints exact."""
    x = np.exp(np.linspace(math.log(a), math.log(b), points))
    x[0], x[-1] = a, b
    return x


def _readonly(arr):
    arr.setflags(write=False)
    return arr


@functools.lru_cache(maxsize=512)
def _samples(f: FunctionHandle, n: float, kmin: int, kmax: int) -> np.ndarray:
    k = np.arange(kmin, kmax + 1, dtype=float)
    vals = np.asarray(f.eval(np.exp(k / n)), dtype=float)
    return _readonly(np.broadcast_to(vals, k.shape).copy())


@functools.lru_cache(maxsize=64)
def _samples_nd(f: FunctionHandle, n: float, bounds: tuple) -> np.ndarray:
    axes = [np.exp(np.arange(lo, hi + 1, dtype=float) / n) for lo, hi in bounds]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = f.eval(mesh[..., 0]) if f.dimension == 1 else f.eval(mesh)
    shape = tuple(hi - lo + 1 for lo, hi in bounds)
    return _readonly(np.broadcast_to(np.asarray(vals, float), shape).copy())


def clear_sample_cache():
    _samples.cache_clear()
    _samples_nd.cache_clear()


def _as_points(x):
    x = np.asarray(x, dtype=float)
    return x, x.ndim == 0


def _require(cfg, family):
    if cfg.family != family:
        raise DomainError(f"config family is {cfg.family!r}, expected {family!r}")


def nn_eval(cfg: OperatorConfig, f: FunctionHandle, x):
    """Normalised operator ``E_n(f, x)`` on ``f``'s interval [a, b].

    ``x`` may be a scalar or an array of points in [a, b]; lattice samples are
    memoised per ``(f, n)``, so sweeping a grid costs one pass over ``f``.
    """
    _require(cfg, "E_n")
    n = int(cfg.scale)
    a, b = f.interval
    kmin, kmax = lattice_bounds(n, a, b)
    x, scalar = _as_points(x)
    x = check_in_interval(x, a, b)
    F = _samples(f, n, kmin, kmax)
    k = np.arange(kmin, kmax + 1, dtype=float)
    t = (n * np.log(x)).ravel()
    out = np.empty_like(t)
    step = max(1, _CHUNK // k.size)
    for i in range(0, t.size, step):
        W = cfg.kernel.eval_log(t[i:i + step, None] - k)
        out[i:i + step] = (W @ F) / W.sum(axis=1)
    return float(out[0]) if scalar else out.reshape(x.shape)


def _sup_on(F):
    return float(np.max(np.abs(F))) if F.size else 0.0


def quasi_eval(cfg: OperatorConfig, f: FunctionHandle, x, *,
               full_output: bool = False, f_sup: Optional[float] = None):
    """Quasi-interpolant ``Q_n(f, x) = sum_k f(e^{k/n}) chi(e^-k x^n)``.

    The series is cut to ``|k - n log x| <= K``. With ``full_output`` the
    truncation estimate ``||f|| * tail_envelope(K)`` is returned as well;
    ``||f||`` defaults to the largest retained sample.
    """
    _require(cfg, "Q_n")
    n = int(cfg.scale)
    K = cfg.K
    x, scalar = _as_points(x)
    if np.any(~(x > 0)):
        raise DomainError("Q_n is defined for x > 0")
    t = (n * np.log(x)).ravel()
    lo = int(math.floor(t.min())) - K - 1
    hi = int(math.ceil(t.max())) + K + 1
    F = _samples(f, n, lo, hi)
    if not np.all(np.isfinite(F)):
        raise DomainError(f"{f.name} is not finite on the sampled lattice")
    j = np.arange(-K - 1, K + 2)
    out = np.empty_like(t)
    step = max(1, _CHUNK // j.size)
    for i in range(0, t.size, step):
        tt = t[i:i + step]
        k = np.floor(tt)[:, None] + j
        d = tt[:, None] - k
        w = np.where(np.abs(d) <= K, cfg.kernel.eval_log(d), 0.0)
        out[i:i + step] = np.sum(w * F[(k - lo).astype(np.intp)], axis=1)
    value = float(out[0]) if scalar else out.reshape(x.shape)
    if not full_output:
        return value
    sup = _sup_on(F) if f_sup is None else float(f_sup)
    return value, sup * tail_envelope(cfg.kernel, K)


def classical_eval(cfg: OperatorConfig, f: FunctionHandle, x, *,
                   full_output: bool = False, f_sup: Optional[float] = None):
    """Generalized exponential sampling series ``S_w f(x)``, real ``w > 0``.

    Evaluated term by term as ``chi(exp(-k) * x**w) * f(exp(k/w))`` with
    ``k`` in ``round(w log x) + [-K, K]``; no memoisation and no
    normalisation.
    """
    _require(cfg, "S_w")
    w = float(cfg.scale)
    K = cfg.K
    x, scalar = _as_points(x)
    if np.any(~(x > 0)):
        raise DomainError("S_w is defined for x > 0")
    L = (w * np.log(x)).ravel()
    out = np.empty_like(L)
    sup = 0.0
    j = np.arange(-K, K + 1, dtype=float)
    for i, Li in enumerate(L):
        k = np.round(Li) + j
        with np.errstate(over="ignore", under="ignore"):
            arg = np.exp(Li - k)
        ok = np.isfinite(arg) & (arg > 0)
        chi = np.empty_like(arg)
        chi[ok] = cfg.kernel.eval_x(arg[ok])
        chi[~ok] = cfg.kernel.eval_log(Li - k[~ok])
        samples = np.asarray(f.eval(np.exp(k / w)), dtype=float)
        samples = np.broadcast_to(samples, k.shape)
        if not np.all(np.isfinite(samples)):
            raise DomainError(f"{f.name} is not finite on the sampled lattice")
        sup = max(sup, float(np.max(np.abs(samples))))
        out[i] = np.sum(chi * samples)
    value = float(out[0]) if scalar else out.reshape(x.shape)
    if not full_output:
        return value
    sup = sup if f_sup is None else float(f_sup)
    return value, sup * tail_envelope(cfg.kernel, K + 0.5)


def _multi_setup(cfg, f):
    _require(cfg, "E_n_multivariate")
    if f.dimension != cfg.dimension:
        raise DomainError(
            f"{f.name} has dimension {f.dimension}, config expects {cfg.dimension}")
    n = int(cfg.scale)
    box = f.box
    bounds = tuple(lattice_bounds(n, a, b) for a, b in box)
    return n, box, bounds, _samples_nd(f, n, bounds)


def _axis_weights(kernel, n, x, bound):
    k = np.arange(bound[0], bound[1] + 1, dtype=float)
    return kernel.eval_log(n * np.log(x)[:, None] - k)


def nn_eval_multi(cfg: OperatorConfig, f: FunctionHandle, x):
    """Multivariate ``E_n`` with kernel ``prod_i chi(x_i)`` at points ``x`` of shape ``(N,)`` or ``(m, N)``."""
    n, box, bounds, F = _multi_setup(cfg, f)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[-1] != cfg.dimension:
        raise DomainError("point dimension does not match config")
    Ws = []
    for i, ((a, b), bound) in enumerate(zip(box, bounds)):
        xi = check_in_interval(pts[:, i], a, b)
        Ws.append(_axis_weights(cfg.kernel, n, xi, bound))
    num = np.einsum("mk,k...->m...", Ws[0], F)
    for W in Ws[1:]:
        num = np.einsum("mk,mk...->m...", W, num)
    den = np.prod([W.sum(axis=1) for W in Ws], axis=0)
    out = num / den
    return float(out[0]) if single else out


def nn_eval_multi_grid(cfg: OperatorConfig, f: FunctionHandle, axes) -> np.ndarray:
    """Multivariate ``E_n`` on the tensor grid ``axes[0] x ... x axes[N-1]``.

    Exploits the product kernel: one contraction per axis instead of an
    N-fold sum per point.
    """
    n, box, bounds, F = _multi_setup(cfg, f)
    if len(axes) != cfg.dimension:
        raise DomainError("need one axis array per dimension")
    T = F
    dens = []
    for (a, b), bound, xi in zip(box, bounds, axes):
        xi = check_in_interval(np.asarray(xi, float), a, b)
        W = _axis_weights(cfg.kernel, n, xi, bound)
        T = np.tensordot(T, W, axes=([0], [1]))
        dens.append(W.sum(axis=1))
    den = functools.reduce(np.multiply.outer, dens)
    return T / den


def evaluate(cfg: OperatorConfig, f: FunctionHandle, x):
    """Dispatch to the evaluator for ``cfg.family``."""
    if cfg.family == "E_n":
        return nn_eval(cfg, f, x)
    if cfg.family == "Q_n":
        return quasi_eval(cfg, f, x)
    if cfg.family == "S_w":
        return classical_eval(cfg, f, x)
    return nn_eval_multi(cfg, f, x)
