import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import constant
from expnn import registry
from expnn.analysis import (CHI_E_INVERSE_TANH, TAIL_CONSTANT_TANH,
                            TWICE_TAIL_CONSTANT_TANH, bound_theorem2, bound_theorem3,
                            bound_theorem4, bound_theorem6, fit_rate, log_modulus,
                            measured_error, mellin_derivative, stencil_margin,
                            sup_norm, theorem3_bound, theorem4_bound, theorem6_bound)
from expnn.density import make_kernel
from expnn.errors import (FitError, PreconditionError, StencilError,
                          UnsupportedKernelError)
from expnn.operators import FunctionHandle

E = math.e


def _reg(name):
    return registry.get(name).handle


class TestConstants:
    def test_chi_e_inverse(self):
        assert 1 / (math.tanh(2) / 4) == pytest.approx(CHI_E_INVERSE_TANH, abs=5e-5)

    def test_tail_constants(self):
        assert math.sinh(2) == pytest.approx(TAIL_CONSTANT_TANH, abs=1e-4)
        assert TWICE_TAIL_CONSTANT_TANH == 2 * TAIL_CONSTANT_TANH


class TestLogModulus:
    def test_constant(self):
        assert log_modulus(constant(5.0), 0.3).value == 0.0

    def test_log_equals_delta(self):
        est = log_modulus(_reg("logx"), 0.1)
        assert est.value == pytest.approx(0.1, rel=0.02)
        assert est.delta == 0.1 and est.grid_size == 2001

    def test_sinlog_against_all_pairs(self):
        f = _reg("sinlog")
        t = np.linspace(0.0, 2.0, 1000)
        v = np.sin(t)
        close = np.abs(t[:, None] - t[None, :]) <= 0.5
        brute = float(np.max(np.where(close, np.abs(v[:, None] - v[None, :]), 0.0)))
        assert brute == pytest.approx(0.4781073071309998, abs=1e-15)
        got = log_modulus(f, 0.5).value
        assert 0 < got <= 0.5
        assert brute <= got <= math.sin(0.5) + 1e-14

    def test_monotone_ladder(self):
        for name in registry.continuous_names():
            f = _reg(name)
            vals = [log_modulus(f, d).value for d in (1e-3, 0.01, 0.05, 0.2, 1.0, 5.0)]
            assert all(v >= 0 for v in vals)
            assert all(v1 <= v2 for v1, v2 in zip(vals, vals[1:])), name

    def test_holder_function(self):
        # |log x|^(1/2): the worst pair straddles the kink, giving delta^(1/2)
        est = log_modulus(_reg("sqrtlog_holder"), 0.04)
        assert est.value == pytest.approx(0.2, rel=0.02)

    def test_jump(self):
        assert log_modulus(_reg("step_log"), 0.01).value == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            log_modulus(_reg("logx"), 0.1, grid=50)
        with pytest.raises(ValueError):
            log_modulus(_reg("logx"), 0.0)


class TestMellinDerivative:
    def test_log(self):
        f = _reg("logx")
        x = np.geomspace(1.5, 6.0, 20)
        assert np.max(np.abs(mellin_derivative(f, x, 1).value - 1)) < 1e-9
        assert np.max(np.abs(mellin_derivative(f, x, 2).value)) < 1e-6

    def test_identity_at_one(self):
        f = FunctionHandle("id", lambda x: x, (0.5, 2.0))
        d = mellin_derivative(f, 1.0, 1)
        assert d.value == pytest.approx(1.0, abs=1e-9)
        assert d.order == 1 and d.at == 1.0 and d.step == 6e-6

    def test_sinlog_at_e(self):
        assert mellin_derivative(_reg("sinlog"), E).value == pytest.approx(0.540302, abs=1e-6)
        assert mellin_derivative(_reg("sinlog"), E).value == pytest.approx(math.cos(1), abs=1e-9)

    def test_matches_x_times_derivative(self):
        f = FunctionHandle("cube", lambda x: x**3 - 2 * x, (0.5, 3.0))
        x = np.linspace(0.6, 2.9, 50)
        want = x * (3 * x**2 - 2)
        assert np.max(np.abs(mellin_derivative(f, x).value - want)) < 1e-6

    @pytest.mark.parametrize("name", ["logx", "sq_log", "sinlog", "runge_log"])
    def test_analytic_registry(self, name):
        entry = registry.get(name)
        a, b = entry.handle.interval
        m = stencil_margin(2)
        x = np.exp(np.linspace(math.log(a) + m, math.log(b) - m, 102)[1:-1])
        d1 = mellin_derivative(entry.handle, x, 1).value
        d2 = mellin_derivative(entry.handle, x, 2).value
        assert np.max(np.abs(d1 - entry.analytic_theta1(x))) < 1e-6
        assert np.max(np.abs(d2 - entry.analytic_theta2(x))) < 1e-6

    def test_higher_orders(self):
        f = _reg("sinlog")
        assert mellin_derivative(f, E, 3).value == pytest.approx(-math.cos(1), abs=1e-5)
        assert mellin_derivative(f, E, 4).value == pytest.approx(math.sin(1), abs=1e-4)

    def test_stencil_error(self):
        with pytest.raises(StencilError):
            mellin_derivative(_reg("sinlog"), 1.0)
        with pytest.raises(ValueError):
            mellin_derivative(_reg("sinlog"), E, 5)


class TestBoundFormulas:
    def test_theorem6_arithmetic(self):
        assert theorem6_bound(0.02, 1.0, 100, 0.5) == pytest.approx(0.02 + 0.72536, abs=1e-14)

    @given(st.floats(0, 10), st.floats(0, 10), st.integers(1, 10**6), st.floats(0.01, 0.99))
    def test_theorem3_is_scaled_theorem6(self, omega, fs, n, nu):
        assert theorem3_bound(omega, fs, n, nu) == 4.14925 * theorem6_bound(omega, fs, n, nu)

    def test_theorem4_reduces_for_log(self):
        n, nu, w = 400, 0.3, E**2 - 1
        want = 4.14925 * (n ** -nu + w * 3.6268 * n ** (nu - 1))
        assert theorem4_bound(1.0, 0.0, 0.0, n, nu, w) == pytest.approx(want, abs=1e-12)

    def test_theorem4_square_log(self):
        n, nu, w = 100, 0.5, E - 1
        tail = 3.6268 / 10
        want = 4.14925 * (2 * (0.1 + w * tail) + (0.01 + w * w * tail) + tail * 2 * w * w)
        assert theorem4_bound(2.0, 2.0, 0.0, n, nu, w) == pytest.approx(want, rel=1e-14)


class TestTheorem3:
    def test_constant(self):
        for n in (10, 1000):
            rep = bound_theorem3(_reg("const5"), n, 0.5)
            assert rep.measured_sup_error < 1e-12
            assert rep.bound == pytest.approx(4.14925 * 7.2536 * 5 * n ** -0.5, rel=1e-12)
            assert rep.satisfied and rep.theorem == "T3"

    def test_sinlog(self):
        rep = bound_theorem3(_reg("sinlog"), 100, 0.5)
        assert rep.satisfied
        assert rep.measured_sup_error < rep.bound

    def test_log_large_n(self):
        rep = bound_theorem3(_reg("logx"), 10000, 0.5)
        assert rep.bound == pytest.approx(4.14925 * (0.01 + 7.2536 * 2 * 0.01), rel=1e-9)
        assert rep.satisfied

    def test_safety_scales_inputs(self):
        f = _reg("sinlog")
        plain = bound_theorem3(f, 50, 0.5)
        safe = bound_theorem3(f, 50, 0.5, safety=1.01)
        assert safe.bound == pytest.approx(1.01 * plain.bound, rel=1e-12)

    def test_rejects_other_kernels_and_discontinuous(self):
        with pytest.raises(UnsupportedKernelError):
            bound_theorem3(_reg("sinlog"), 10, 0.5, kernel=make_kernel("logistic"))
        with pytest.raises(PreconditionError):
            bound_theorem3(_reg("step_log"), 10, 0.5)
        with pytest.raises(ValueError):
            bound_theorem3(_reg("sinlog"), 10, 1.0)


class TestTheorem4:
    def test_log_closed_form(self):
        f = _reg("logx")
        entry = registry.get("logx")
        for n in (10, 100, 1000):
            for nu in (0.3, 0.5, 0.8):
                rep = bound_theorem4(f, n, nu, theta=(entry.analytic_theta1,
                                                      entry.analytic_theta2))
                want = 4.14925 * (n ** -nu + (E**2 - 1) * 3.6268 * n ** (nu - 1))
                assert abs(rep.bound - want) < 1e-10
                assert rep.satisfied

    def test_log_finite_difference_close(self):
        rep = bound_theorem4(_reg("logx"), 100, 0.5)
        want = 4.14925 * (0.1 + (E**2 - 1) * 0.36268)
        assert rep.bound == pytest.approx(want, rel=1e-6)

    def test_sinlog(self):
        assert bound_theorem4(_reg("sinlog"), 200, 0.4).satisfied

    def test_square_log(self):
        entry = registry.get("sq_log")
        n, nu, w = 100, 0.5, E - 1
        rep = bound_theorem4(entry.handle, n, nu,
                             theta=(entry.analytic_theta1, entry.analytic_theta2))
        assert rep.bound == pytest.approx(theorem4_bound(2.0, 2.0, 0.0, n, nu, w), rel=1e-12)
        assert rep.satisfied

    def test_requires_c2(self):
        with pytest.raises(PreconditionError):
            bound_theorem4(_reg("sqrtlog_holder"), 10, 0.5)


class TestTheorem6:
    def test_unit_function(self):
        rep = bound_theorem6(constant(1.0), 100, 0.5)
        assert rep.measured_sup_error < 1e-12 and rep.satisfied

    def test_runge(self):
        rep = bound_theorem6(_reg("runge_log"), 100, 0.5)
        assert rep.satisfied and rep.theorem == "T6"

    def test_ratio_to_theorem3_inputs(self):
        rep = bound_theorem6(_reg("sinlog"), 100, 0.5)
        assert theorem3_bound(0.1, 3.0, 100, 0.5) == 4.14925 * theorem6_bound(0.1, 3.0, 100, 0.5)
        assert rep.bound > 0

    def test_unsupported(self):
        with pytest.raises(UnsupportedKernelError):
            bound_theorem6(_reg("sinlog"), 10, 0.5, kernel=make_kernel("bspline1"))


class TestTheorem2:
    def test_holder_sweep(self, tanh_kernel):
        f = _reg("sqrtlog_holder")
        for n in (10, 30, 100, 300, 1000):
            assert bound_theorem2(f, tanh_kernel, n).satisfied

    def test_constant_and_log(self, tanh_kernel, logistic_kernel):
        rep = bound_theorem2(_reg("const5"), tanh_kernel, 50)
        assert rep.measured_sup_error < 1e-12 and rep.satisfied
        for k in (tanh_kernel, logistic_kernel):
            assert bound_theorem2(_reg("logx"), k, 100).satisfied

    def test_formula(self, tanh_kernel):
        rep = bound_theorem2(_reg("logx"), tanh_kernel, 100)
        m = 0.8792863921694347  # sup first absolute moment, tanh
        want = (1 * 0.01 * m + 2 * 2 * 0.01 * m) / (math.tanh(2) / 4)
        assert rep.bound == pytest.approx(want, rel=1e-9)
        assert rep.nu == 1.0

    def test_missing_tag(self, tanh_kernel):
        with pytest.raises(PreconditionError):
            bound_theorem2(_reg("step_log"), tanh_kernel, 10)


class TestFitRate:
    def test_exact_power_law(self):
        fit = fit_rate({n: 3.0 / n for n in (10, 30, 100, 300, 1000)})
        assert abs(fit.slope + 1) < 1e-10
        assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-10)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(-3, 0), st.floats(1e-3, 1e3))
    def test_power_law_property(self, p, c):
        fit = fit_rate({n: c * n**p for n in (10, 20, 50, 100, 1000)})
        assert abs(fit.slope - p) < 1e-10

    def test_constant_errors(self):
        fit = fit_rate({n: 0.5 for n in (10, 30, 100, 300)})
        assert abs(fit.slope) < 1e-12 and fit.r_squared == 1.0

    def test_drops_non_positive(self):
        fit = fit_rate({10: 0.1, 20: 0.0, 30: 1 / 30, 100: 0.01, 1000: 0.001, 5: -1.0})
        assert fit.scales == (10.0, 30.0, 100.0, 1000.0)
        assert abs(fit.slope + 1) < 1e-10

    def test_needs_four_points_over_a_decade(self):
        with pytest.raises(FitError):
            fit_rate({10: 0.1, 100: 0.01, 1000: 0.0})
        with pytest.raises(FitError):
            fit_rate({10: 0.1, 12: 0.09, 14: 0.08, 16: 0.07})

    def test_log_slope_baseline(self):
        errs = {n: measured_error(_reg("logx"), n)[0] for n in (10, 30, 100, 300, 1000)}
        fit = fit_rate(errs)
        assert fit.slope <= -0.5
        assert fit.slope == pytest.approx(-1.0, abs=0.01)


def test_sup_norm():
    assert sup_norm(_reg("logx")) == pytest.approx(2.0, abs=1e-14)
    assert sup_norm(_reg("runge_log"), domain=(0.5, 2.0)) == 1.0
