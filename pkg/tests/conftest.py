import math

import numpy as np
import pytest

from expnn import make_kernel
from expnn.operators import FunctionHandle, clear_sample_cache

CATALOGUE = ("logistic", "tanh", "bspline1", "bspline2")


@pytest.fixture(scope="session")
def tanh_kernel():
    return make_kernel("tanh")


@pytest.fixture(scope="session")
def logistic_kernel():
    return make_kernel("logistic")


@pytest.fixture(scope="session", params=CATALOGUE)
def any_kernel(request):
    return make_kernel(request.param)


@pytest.fixture(autouse=True)
def _fresh_samples():
    yield
    clear_sample_cache()


def constant(c, domain=(1.0, math.e**2), dimension=1):
    if dimension == 1:
        return FunctionHandle(f"const{c}", lambda x: np.full(np.shape(x), float(c)), domain,
                              frozenset({"bounded", "continuous", "C2"}))
    return FunctionHandle(f"const{c}_{dimension}d",
                          lambda x: np.full(np.shape(x)[:-1], float(c)), domain,
                          frozenset({"bounded", "continuous", "C2"}), dimension=dimension)


# (number, title, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}")
