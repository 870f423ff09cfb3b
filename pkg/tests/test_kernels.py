import math

import numpy as np
import pytest

from liyau.bounds import get_estimate
from liyau.errors import DomainError
from liyau.kernels import (ModelManifold, kernel_logderivs, kernel_value, make_grid,
                           sharpness_ratio, verify_on_grid)

E2, E3, H3 = ModelManifold.euclidean(2), ModelManifold.euclidean(3), ModelManifold.hyperbolic3(1.0)


def test_model_invariants():
    assert H3.k == 2.0 and E3.k == 0.0
    assert ModelManifold.hyperbolic3(0.5).k == pytest.approx(0.5)
    with pytest.raises(DomainError):
        ModelManifold(2, "hyperbolic3", 1.0)
    with pytest.raises(DomainError):
        ModelManifold(1)


def test_kernel_examples():
    kp = kernel_logderivs(E2, 0.0, 1.0)
    assert kp.grad_f_sq == 0.0 and kp.f_t == -1.0
    kp = kernel_logderivs(E2, 2.0, 1.0)
    assert kp.grad_f_sq == pytest.approx(1.0) and kp.f_t == pytest.approx(0.0, abs=1e-15)
    kp = kernel_logderivs(H3, 0.0, 1.0)
    assert kp.grad_f_sq == 0.0 and kp.f_t == pytest.approx(-2.5)
    with pytest.raises(DomainError):
        kernel_logderivs(E2, 1.0, 0.0)


def test_small_r_gradient_is_accurate():
    for r in (1e-9, 1e-6, 0.999e-3, 1.001e-3, 0.05):
        # Laurent series of 1/x - coth x, truncation error ~ x^11
        series = -r / 3 + r ** 3 / 45 - 2 * r ** 5 / 945 + r ** 7 / 4725 - 2 * r ** 9 / 93555
        f_r = float(kernel_logderivs(H3, r, 1.0).f_r)
        assert f_r == pytest.approx(series - r / 2, rel=1e-12)


def _d1(g, x, h):
    return (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h)


def _d2(g, x, h):
    return (-g(x + 2 * h) + 16 * g(x + h) - 30 * g(x) + 16 * g(x - h) - g(x - 2 * h)) / (12 * h * h)


@pytest.mark.parametrize("m", [E3, H3, ModelManifold.hyperbolic3(0.7)])
def test_kernel_solves_heat_equation(m):
    # independent check: fourth-order differences of f = log u, using
    # Delta u / u = f_rr + f_r^2 + (n-1)(w'/w) f_r
    rng = np.random.default_rng(1)
    r = rng.uniform(0.05, 4.0, 10_000)
    t = rng.uniform(0.3, 3.0, 10_000)
    fr = lambda x: kernel_logderivs(m, x, t).f
    ft = lambda s: kernel_logderivs(m, r, s).f
    f_r = _d1(fr, r, 1e-3)
    lap_over_u = _d2(fr, r, 1e-3) + f_r ** 2 + (m.n - 1) * m.warp_log_deriv(r) * f_r
    u_t_over_u = _d1(ft, t, 1e-4)
    assert np.max(np.abs(u_t_over_u - lap_over_u)) <= 1e-6
    assert np.allclose(kernel_logderivs(m, r, t).f_t, u_t_over_u, rtol=1e-8, atol=1e-8)


@pytest.mark.parametrize("m", [E2, H3])
def test_grad_matches_finite_difference(m):
    rng = np.random.default_rng(2)
    r = rng.uniform(0.1, 6.0, 2000)
    t = rng.uniform(0.1, 3.0, 2000)
    h = 1e-6
    fd = (kernel_logderivs(m, r + h, t).f - kernel_logderivs(m, r - h, t).f) / (2 * h)
    g = kernel_logderivs(m, r, t).grad_f_sq
    assert np.allclose(fd ** 2, g, rtol=1e-6, atol=1e-8)


def test_verify_examples():
    r, t, spec = make_grid(0, 10, 200, 0.1, 10, 200)
    rep = verify_on_grid(E2, get_estimate("davies_beta", 2, 0.0, beta=0.9), r, t, spec)
    assert rep.max_violation <= 0 and rep.tightness == pytest.approx(0.9, rel=1e-12)
    assert rep.tightness_at["r"] == 0.0
    r, t, spec = make_grid(0, 20, 256, 0.05, 5, 256)
    assert verify_on_grid(H3, get_estimate("cor14", 3, 2.0, beta=0.5), r, t, spec).passed
    bfn = {"family": "exponential", "params": [1.0], "T": 5.0}
    # beta = exp(-2kt) degenerates to 1 at k = 0, so use the k = 1 estimate,
    # which is valid on flat space as well
    rep, (r, t, lhs, rhs) = verify_on_grid(E3, get_estimate("psi1", 3, 1.0, beta_fn=bfn),
                                           return_arrays=True)
    assert rep.max_violation <= 1e-9
    # sharp in the leading term: LHS / RHS at r = 0 is exp(-2t) -> 1 as t -> 0
    assert np.allclose(lhs[0] / rhs[0], np.exp(-2 * t), rtol=1e-9)
    ts = np.geomspace(1e-8, 1e-2, 5)
    ratio = [verify_on_grid(E3, get_estimate("psi1", 3, 1.0, beta_fn=bfn), r[:3], [x]).tightness
             for x in ts]
    assert ratio[0] == pytest.approx(1.0, abs=1e-7) and ratio == sorted(ratio, reverse=True)


def test_verify_rejects_incompatible_model():
    with pytest.raises(DomainError):
        verify_on_grid(H3, get_estimate("davies_beta", 3, 1.0, beta=0.5))
    with pytest.raises(DomainError):
        verify_on_grid(E2, get_estimate("davies_beta", 3, 0.0, beta=0.5))


def test_threads_do_not_change_report():
    e = get_estimate("psi2", 3, 2.0, beta_fn={"family": "rational", "params": [1.0], "T": 5.0})
    a = verify_on_grid(H3, e, threads=1).to_dict()
    b = verify_on_grid(H3, e, threads=4).to_dict()
    assert a == b


def test_sharpness_examples():
    # RHS = 3 is the k = 1 bound, applied on flat space
    assert sharpness_ratio(E2, get_estimate("davies_beta", 2, 1.0, beta=0.5), 1.0) == pytest.approx(1 / 3)
    assert sharpness_ratio(E2, get_estimate("davies_beta", 2, 0.0, beta=0.99), 1.0) == pytest.approx(0.99)
    assert sharpness_ratio(E2, get_estimate("li_xu", 2, 1e-8), 1.0) >= 0.999


def test_tightness_monotone_in_beta():
    vals = [verify_on_grid(E2, get_estimate("davies_beta", 2, 0.0, beta=b)).tightness
            for b in (0.2, 0.4, 0.6, 0.8)]
    assert all(x <= y for x, y in zip(vals, vals[1:]))


def test_mutation_is_caught():
    e = get_estimate("davies_beta", 2, 0.0, beta=0.9999).scaled(0.999)
    rep = verify_on_grid(E2, e)
    assert not rep.passed and rep.argmax["r"] == 0.0
