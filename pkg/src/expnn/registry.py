"""Catalogue of test functions with their Mellin derivatives and Hoelder data.

Every function is written in logarithmic form ``f(x) = g(log x)``, so the
Mellin derivatives are ordinary derivatives of ``g``: ``theta f(x) = g'(log x)``
and ``theta^2 f(x) = g''(log x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnknownNameError
from .operators import FunctionHandle

E = math.e


@dataclass(frozen=True)
class RegistryEntry:
    handle: FunctionHandle
    analytic_theta1: Optional[Callable] = None
    analytic_theta2: Optional[Callable] = None
    known_holder: Optional[tuple] = None
    notes: str = ""

    @property
    def name(self) -> str:
        return self.handle.name


def _const5(x):
    return np.full(np.shape(x), 5.0)


def _zeros(x):
    return np.zeros(np.shape(x))


def _ones(x):
    return np.ones(np.shape(x))


def _runge(x):
    t = np.log(x)
    return 1.0 / (1.0 + t * t)


def _runge_theta1(x):
    t = np.log(x)
    return -2.0 * t / (1.0 + t * t) ** 2


def _runge_theta2(x):
    t = np.log(x)
    return (6.0 * t * t - 2.0) / (1.0 + t * t) ** 3


def _logprod2(x):
    x = np.asarray(x, dtype=float)
    return np.log(x[..., 0]) * np.log(x[..., 1])


_SMOOTH = frozenset({"bounded", "continuous", "C2"})
# max |d/dt (1 + t^2)^-1| = 3 sqrt(3) / 8, attained at t = 1/sqrt(3)
_RUNGE_LIP = 3.0 * math.sqrt(3.0) / 8.0

_ENTRIES = {
    e.name: e
    for e in (
        RegistryEntry(
            FunctionHandle("const5", _const5, (1.0, E**2), _SMOOTH, (1.0, 1.0)),
            _zeros, _zeros, (1.0, 1.0), "constant 5"),
        RegistryEntry(
            FunctionHandle("logx", np.log, (1.0, E**2), _SMOOTH, (1.0, 1.0)),
            _ones, _zeros, (1.0, 1.0), "log x; g(t) = t"),
        RegistryEntry(
            FunctionHandle("sq_log", lambda x: np.log(x) ** 2, (1.0, E), _SMOOTH,
                           (1.0, 2.0)),
            lambda x: 2.0 * np.log(x), lambda x: np.full(np.shape(x), 2.0),
            (1.0, 2.0), "(log x)^2 on [1, e]; Lipschitz constant 2 in log scale"),
        RegistryEntry(
            FunctionHandle("sinlog", lambda x: np.sin(np.log(x)) + 2.0, (1.0, E**2),
                           _SMOOTH, (1.0, 1.0)),
            lambda x: np.cos(np.log(x)), lambda x: -np.sin(np.log(x)),
            (1.0, 1.0), "sin(log x) + 2"),
        RegistryEntry(
            FunctionHandle("runge_log", _runge, (E**-2, E**2), _SMOOTH,
                           (1.0, _RUNGE_LIP)),
            _runge_theta1, _runge_theta2, (1.0, _RUNGE_LIP),
            "1 / (1 + log^2 x); bounded on all of R+"),
        RegistryEntry(
            FunctionHandle("sqrtlog_holder", lambda x: np.sqrt(np.abs(np.log(x))),
                           (1.0 / E, E), frozenset({"bounded", "continuous"}),
                           (0.5, 1.0)),
            None, None, (0.5, 1.0), "|log x|^(1/2); kink at x = 1"),
        RegistryEntry(
            FunctionHandle("step_log", lambda x: np.where(np.asarray(x) >= E, 1.0, 0.0),
                           (1.0, E**2), frozenset({"bounded"})),
            None, None, None, "indicator of x >= e; jump at x = e"),
        RegistryEntry(
            FunctionHandle("logprod2", _logprod2, ((1.0, E), (1.0, E)), _SMOOTH,
                           dimension=2),
            None, None, None, "log x1 * log x2 on [1, e]^2"),
    )
}


def get(name: str) -> RegistryEntry:
    try:
        return _ENTRIES[name]
    except KeyError:
        raise UnknownNameError(
            f"unknown function {name!r}; known: {', '.join(sorted(_ENTRIES))}"
        ) from None


def list() -> list[str]:  # noqa: A001 - mirrors the catalogue API
    return sorted(_ENTRIES)


def continuous_names() -> list[str]:
    return [n for n in sorted(_ENTRIES)
            if _ENTRIES[n].handle.dimension == 1 and _ENTRIES[n].handle.has("continuous")]


def c2_names() -> list[str]:
    return [n for n in sorted(_ENTRIES)
            if _ENTRIES[n].handle.dimension == 1 and _ENTRIES[n].handle.has("C2")]
