import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from liyau.errors import ConfigurationError, DomainError
from liyau.paramfun import (ParamFunction, WeightFunction, beta_eval, integrate_weight,
                            validate_beta, validate_weight)


def test_beta_eval_examples():
    assert beta_eval(ParamFunction.constant(0.5, T=2.0), 1.0) == (0.5, 0.0)
    v, d = beta_eval(ParamFunction("exponential", (1.0,), 1.0, 1.0), 0.0)
    assert v == 1.0 and d == -2.0
    v, d = beta_eval(ParamFunction("rational", (2.0,), 1.0, 1.0), 1.0)
    assert v == pytest.approx(1 / 3, rel=1e-15)
    assert d == pytest.approx(-2 / 9, rel=1e-15)


def test_rational_derivative_matches_central_difference():
    f = ParamFunction("rational", (2.0,), 2.0, 1.0)
    h = 1e-6
    fd = (f.value(1 + h) - f.value(1 - h)) / (2 * h)
    assert abs(fd - beta_eval(f, 1.0)[1]) < 1e-8


def test_beta_eval_domain_and_family_errors():
    f = ParamFunction.constant(0.5, T=1.0)
    with pytest.raises(DomainError):
        beta_eval(f, 1.5)
    with pytest.raises(DomainError):
        beta_eval(f, -0.1)
    with pytest.raises(ConfigurationError):
        ParamFunction("cubic", (1.0,), 1.0, 1.0)


@settings(max_examples=200, deadline=None)
@given(fam=st.sampled_from(["constant", "linear", "exponential", "rational"]),
       p=st.floats(0.05, 0.95), k=st.floats(0.0, 5.0), u=st.floats(0.01, 0.99))
def test_derivatives_match_finite_differences(fam, p, k, u):
    T = 0.9 / (p * k) if fam == "linear" and k > 0 else 3.0
    f = ParamFunction(fam, (p,), T, k)
    t = u * T
    h = 1e-6 * max(T, 1e-3)
    fd = float((f.value(t + h) - f.value(t - h)) / (2 * h))
    d = float(f.deriv(t))
    assert abs(d - fd) <= 1e-6 * (1 + abs(d))


def test_piecewise_uses_right_slope_at_knots():
    f = ParamFunction.piecewise([0.0, 1.0, 2.0], [0.9, 0.5, 0.4], k=1.0)
    assert float(f.deriv(1.0)) == pytest.approx(-0.1)
    assert float(f.deriv_left(1.0)) == pytest.approx(-0.4)
    assert float(f.value(1.5)) == pytest.approx(0.45)
    with pytest.raises(ConfigurationError):
        ParamFunction("piecewise_linear", (0.0, 1.0, 0.5, 0.4), 2.0, 1.0)


def test_one_minus_is_cancellation_free():
    f = ParamFunction("exponential", (1.0,), 1.0, 1.0)
    assert float(f.one_minus(1e-12)) == pytest.approx(2e-12, rel=1e-9)


def test_validate_beta_examples():
    assert validate_beta(ParamFunction.constant(0.5, T=10.0)).feasible
    assert validate_beta(ParamFunction("exponential", (1.0,), 5.0, 1.0)).feasible
    cert = validate_beta(ParamFunction("linear", (0.5,), 3.0, 1.0))
    assert not cert.feasible and not cert.b1
    assert cert.first_violation == pytest.approx(2.0, abs=1e-9)


@pytest.mark.parametrize("beta0,ok", [(0.5, True), (0.01, True), (0.99, True),
                                       (1.0, False), (0.0, False), (1.2, False), (-0.1, False)])
def test_constant_feasible_iff_open_unit_interval(beta0, ok):
    assert validate_beta(ParamFunction.constant(beta0, T=2.0)).feasible is ok


@pytest.mark.parametrize("theta,T,ok", [(0.5, 1.9, True), (0.5, 2.0, False), (1.0, 0.99, True),
                                         (2.0, 0.6, False)])
def test_linear_feasible_iff_theta_k_T_below_one(theta, T, ok):
    assert validate_beta(ParamFunction("linear", (theta,), T, 1.0)).feasible is ok


def test_b2_rejects_flat_start_at_one():
    # beta(0) = 1 with beta'(0) = 0 violates the second condition
    f = ParamFunction.piecewise([0.0, 0.5, 1.0], [1.0, 1.0, 0.5], k=1.0)
    cert = validate_beta(f)
    assert not cert.feasible


def test_validate_weight_examples():
    assert validate_weight(WeightFunction("sinh_sq", (1.0,), 3.0)).feasible
    w = WeightFunction("quadratic", (), 3.0)
    assert validate_weight(w).feasible
    assert integrate_weight(w, 2.0, "ratio_sq") == pytest.approx(8.0, rel=1e-12)
    for theta in (2.0, 3.0):
        cert = validate_weight(WeightFunction("power_theta", (theta,), 2.0))
        assert not cert.feasible and not cert.a2


@pytest.mark.parametrize("theta", [0.1, 0.3, 2 / 3, 0.9, 0.99])
def test_power_theta_feasible_and_quadrature_matches_closed(theta):
    w = WeightFunction("power_theta", (theta,), 2.0)
    assert validate_weight(w).feasible
    t = 1.3
    p = 2 / theta - 1
    exact = p * p * t ** (p - 1) / (p - 1)
    assert integrate_weight(w, t, "ratio_sq") == pytest.approx(exact, rel=1e-8)


def test_power_theta_at_one_fails_integrability():
    # a = t, a'^2/a = 1/t is not integrable at 0
    cert = validate_weight(WeightFunction("power_theta", (1.0,), 2.0))
    assert cert.a1 and cert.a2 and not cert.a3


def test_tabulated_weight():
    xs = np.linspace(0.0, 2.0, 41)
    w = WeightFunction("tabulated", tuple(xs) + tuple(xs ** 3), 2.0)
    assert float(w.value(1.0)) == pytest.approx(1.0, rel=1e-3)
    assert integrate_weight(w, 2.0, "a") == pytest.approx(4.0, rel=1e-3)
