"""Sigmoidal activations and numerical checks of the admissibility conditions.

A sigmoid is admissible for the exponential-type operators when it is

1. C^2 and concave on the positive half-line,
2. decays like ``|x|**(-1 - nu)`` as ``x -> -inf`` for some ``nu > 0``,
3. ``sigma(x) - 1/2`` is odd.

The catalogue holds the logistic, hyperbolic-tangent and the first two
B-spline sigmoids (cumulative integrals of the centred B-splines of order
one and two).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import expit

from .errors import DomainError, UnknownNameError

SMOOTHNESS_CLASSES = ("C2", "C1", "piecewise")
TAIL_TYPES = ("exponential", "compact", "polynomial")

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class SigmoidSpec:
    """A named sigmoidal activation.

    ``eval`` must accept numpy arrays. ``decay_nu`` is the exponent of the
    left-tail decay condition; ``tail`` tells the density module how to pick
    truncation windows.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    decay_nu: float = 1.0
    smoothness_class: str = "C2"
    tail: str = "exponential"

    def __post_init__(self):
        if self.smoothness_class not in SMOOTHNESS_CLASSES:
            raise ValueError(f"unknown smoothness class {self.smoothness_class!r}")
        if self.tail not in TAIL_TYPES:
            raise ValueError(f"unknown tail type {self.tail!r}")
        if not self.decay_nu > 0:
            raise ValueError("decay_nu must be positive")

    def __call__(self, x):
        return eval_sigmoid(self, x)


@dataclass(frozen=True)
class ConditionReport:
    condition_1_c2_concave: str
    condition_2_decay: str
    condition_3_odd_symmetry: str
    decay_slope: float
    symmetry_deviation: float
    concavity_violation: float
    overall: bool


def _logistic(x):
    return expit(x)


def _tanh(x):
    # (tanh(x) + 1) / 2 == 1 / (1 + exp(-2x)); the logistic form keeps the
    # left tail relatively accurate instead of cancelling against 1.
    return expit(2.0 * x)


def _bspline1(x):
    return np.clip(x + 0.5, 0.0, 1.0)


def _bspline2(x):
    x = np.asarray(x, dtype=float)
    left = 0.5 * (1.0 + x) ** 2
    right = 1.0 - 0.5 * (x - 1.0) ** 2
    out = np.where(x < 0.0, left, right)
    out = np.where(x <= -1.0, 0.0, out)
    return np.where(x >= 1.0, 1.0, out)


_CATALOGUE = {
    "logistic": SigmoidSpec("logistic", _logistic, 1.0, "C2", "exponential"),
    "tanh": SigmoidSpec("tanh", _tanh, 1.0, "C2", "exponential"),
    "bspline1": SigmoidSpec("bspline1", _bspline1, 1.0, "piecewise", "compact"),
    "bspline2": SigmoidSpec("bspline2", _bspline2, 1.0, "C1", "compact"),
}
CATALOGUE_NAMES = tuple(_CATALOGUE)

_registry = dict(_CATALOGUE)
_registry_lock = threading.Lock()


def eval_sigmoid(s: SigmoidSpec, x):
    """Evaluate ``s`` at ``x`` (scalar or array); non-finite input is rejected."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"sigmoid {s.name!r} evaluated at a non-finite point")
    out = np.asarray(s.eval(arr), dtype=float)
    if out.ndim == 0:
        return float(out)
    return out


def get_sigmoid(name: str) -> SigmoidSpec:
    try:
        return _registry[name]
    except KeyError:
        raise UnknownNameError(
            f"unknown sigmoid {name!r}; known: {', '.join(sorted(_registry))}"
        ) from None


def list_sigmoids() -> list[str]:
    return sorted(_registry)


def register_sigmoid(spec: SigmoidSpec, *, replace: bool = False) -> SigmoidSpec:
    """Add a user-defined sigmoid to the lookup table.

    The basic sigmoidal properties (limits, monotonicity, ``sigma(2) >
    sigma(0)``) are checked here; the three admissibility conditions are left
    to :func:`check_conditions` / kernel construction.
    """
    x = np.linspace(-40.0, 40.0, 4001)
    y = eval_sigmoid(spec, x)
    if np.any(np.diff(y) < -1e-14):
        raise ValueError(f"{spec.name!r} is not non-decreasing")
    if abs(y[0]) > 1e-3 or abs(y[-1] - 1.0) > 1e-3:
        raise ValueError(f"{spec.name!r} does not tend to 0 and 1 at -inf/+inf")
    if not eval_sigmoid(spec, 2.0) > eval_sigmoid(spec, 0.0):
        raise ValueError(f"{spec.name!r} violates sigma(2) > sigma(0)")
    with _registry_lock:
        if spec.name in _registry and not replace:
            raise ValueError(f"sigmoid {spec.name!r} already registered")
        _registry[spec.name] = spec
    return spec


def _concavity(s, grid_extent, samples, step=1e-4, tol=1e-8):
    """Largest positive scaled second difference on (0, grid_extent].

    A violation counts only when it exceeds ``tol`` plus the rounding floor of
    the three-point stencil, which is about ``4 eps |sigma| / step**2``.
    """
    x = np.linspace(grid_extent / samples, grid_extent, samples)
    lo, mid, hi = (eval_sigmoid(s, x - step), eval_sigmoid(s, x),
                   eval_sigmoid(s, x + step))
    d2 = (hi - 2.0 * mid + lo) / step**2
    scale = np.maximum(np.maximum(np.abs(lo), np.abs(hi)), np.abs(mid))
    floor = 8.0 * np.finfo(float).eps * scale / step**2
    excess = d2 - (tol + floor)
    return float(max(excess.max(), 0.0))


def _decay_slope(s, grid_extent, samples):
    x = np.linspace(grid_extent / 2.0, grid_extent, samples)
    y = eval_sigmoid(s, -x)
    ok = y > 0
    if np.count_nonzero(ok) < 2:
        # compactly supported left tail: faster than any power
        return -math.inf
    slope, _ = np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)
    return float(slope)


def check_conditions(s: SigmoidSpec, grid_extent: float = 10.0,
                     samples: int = 1000) -> ConditionReport:
    """Check the three admissibility conditions on finite grids.

    Condition 1 uses centred second differences (step 1e-4) and is reported
    ``not-applicable`` for piecewise sigmoids and ``fail`` for sigmoids that
    are only C^1. Condition 2 regresses ``log sigma(-x)`` on ``log x`` over
    ``[grid_extent/2, grid_extent]`` and passes when the slope is at most
    ``-(1 + nu) + 0.1``. Condition 3 is the max of
    ``|sigma(x) + sigma(-x) - 1|`` over ``[-grid_extent, grid_extent]``.
    """
    if samples < 16:
        raise ValueError("samples must be at least 16")
    if grid_extent < 4:
        raise ValueError("grid_extent must be at least 4")

    violation = _concavity(s, grid_extent, samples)
    if s.smoothness_class == "piecewise":
        c1 = NOT_APPLICABLE
    elif s.smoothness_class == "C1":
        c1 = FAIL
    else:
        c1 = PASS if violation == 0.0 else FAIL

    slope = _decay_slope(s, grid_extent, samples)
    c2 = PASS if slope <= -(1.0 + s.decay_nu) + 0.1 else FAIL

    x = np.linspace(-grid_extent, grid_extent, 2 * samples + 1)
    deviation = float(np.max(np.abs(eval_sigmoid(s, x) + eval_sigmoid(s, -x) - 1.0)))
    c3 = PASS if deviation < 1e-12 else FAIL

    overall = all(c != FAIL for c in (c1, c2, c3))
    return ConditionReport(c1, c2, c3, slope, deviation, violation, overall)
