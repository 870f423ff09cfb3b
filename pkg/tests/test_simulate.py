import math

import numpy as np
import pytest

from liyau.bounds import get_estimate
from liyau.errors import DomainError, NumericalError
from liyau.kernels import ModelManifold, kernel_logderivs, kernel_value, verify_on_grid
from liyau.simulate import (InitialCondition, RadialGrid, apply_operator, calibrate_slack,
                            kernel_error, lhs_error, log_derivatives, mass, monitor,
                            radial_operator, run_radial_heat)

E3, H3 = ModelManifold.euclidean(3), ModelManifold.hyperbolic3(1.0)
GAUSS = InitialCondition("gaussian", t0=0.1)


def test_grid_invariants():
    with pytest.raises(DomainError):
        RadialGrid(nr=8)
    with pytest.raises(DomainError):
        RadialGrid(interior_fraction=0.0)
    with pytest.raises(DomainError):
        RadialGrid(nr=241, dt=0.1)  # dt > dr
    g = RadialGrid()
    assert g.dr == pytest.approx(0.05) and g.steps == 100 and g.snapshot_every == 10
    with pytest.raises(DomainError):
        RadialGrid(snapshot_interval=0.015)


def test_operator_kills_constants_and_matches_laplacian():
    for m in (E3, H3, ModelManifold.euclidean(2)):
        ops = radial_operator(m, 401, 0.02)
        r = ops[3]
        assert np.max(np.abs(apply_operator(ops, np.ones_like(r))[:-1])) < 1e-12
        u = kernel_value(m, r, 1.0)
        kp = kernel_logderivs(m, r, 1.0)
        exact = kp.f_t * u  # u_t = Delta u
        err = np.abs(apply_operator(ops, u) - exact)[:-1] / u.max()
        assert err.max() < 1e-3


def test_constant_solution_is_preserved():
    for m in (E3, H3):
        traj = run_radial_heat(m, RadialGrid(), InitialCondition("constant", value=2.0))
        assert np.max(np.abs(traj.u - 2.0)) < 1e-12
        rep = monitor(traj, get_estimate("davies_beta", m.n, max(m.k, 1.0), beta=0.5))
        # f = log 2 is constant: LHS vanishes
        assert rep.max_violation < 0 and abs(rep.tightness) < 1e-10


def test_kernel_matched_run_is_second_order():
    errs = []
    for nr, dt in ((241, 0.01), (481, 0.005)):
        traj = run_radial_heat(E3, RadialGrid(nr=nr, dt=dt), GAUSS)
        errs.append(kernel_error(traj))
    assert 3.5 <= errs[0] / errs[1] <= 4.5
    assert errs[0] < 2e-3


def test_positivity_and_abort():
    traj = run_radial_heat(H3, RadialGrid(), InitialCondition("bump"))
    assert traj.u.min() > 0
    with pytest.raises(NumericalError) as exc:
        run_radial_heat(E3, RadialGrid(R=4, nr=401, dt=0.01, t_end=0.2),
                        InitialCondition("bump", width=0.1, floor=1e-12))
    assert exc.value.diagnostics["step"] == 1
    with pytest.raises(DomainError):
        run_radial_heat(E3, RadialGrid(), InitialCondition("bump", floor=0.0, width=1.0))
    with pytest.raises(DomainError):
        InitialCondition("triangle").profile(E3, [0.0])


def test_hyperbolic_bump_loses_mass_through_boundary():
    g = RadialGrid(R=6, nr=241, dt=0.025, t_end=3.0, snapshot_interval=0.1)
    ic = InitialCondition("bump", floor=1e-3)
    traj = run_radial_heat(H3, g, ic)
    m = mass(traj, baseline=ic.floor)
    assert np.all(np.diff(m) <= 1e-12 * m[0])
    assert m[-1] < m[0] * (1 - 1e-6)


@pytest.mark.parametrize("m", [E3, H3, ModelManifold.euclidean(2)])
@pytest.mark.parametrize("scale", [(0.5, 2.0), (0.9, 1.1)])
def test_discrete_comparison_principle(m, scale):
    g = RadialGrid(t_end=0.5)
    r = g.r
    p = kernel_value(m, r, 0.1)
    lo, hi = scale[0] * p, scale[1] * p
    mid = p * (1 + (scale[1] - 1) * 0.9 * np.sin(3 * r) ** 2)
    mid[-1] = p[-1]
    runs = [run_radial_heat(m, g, GAUSS, u0=x) for x in (lo, mid, hi)]
    assert np.all(runs[0].u <= runs[1].u) and np.all(runs[1].u <= runs[2].u)


def test_ft_is_laplacian_over_u():
    traj = run_radial_heat(E3, RadialGrid(), GAUSS)
    gsq, ft = log_derivatives(traj, 5)
    age = traj.times[5] + 0.1
    kp = kernel_logderivs(E3, traj.r[:60], age)
    assert np.allclose(ft[:60], kp.f_t, atol=5e-3 * np.abs(kp.f_t).max())
    assert np.allclose(gsq[:60], kp.grad_f_sq, atol=5e-3 * kp.grad_f_sq.max())
    assert gsq[0] == 0.0


def test_monitor_kernel_matched_davies():
    e = get_estimate("davies_beta", 3, 1.0, beta=0.5)
    g = RadialGrid()
    traj = run_radial_heat(E3, g, GAUSS)
    eps = calibrate_slack(E3, g, e)
    rep = monitor(traj, e, t_shift=0.1, eps_disc=eps)
    assert rep.passed and rep.max_violation < 0
    # agreement with the exact-kernel verification on the same nodes and ages
    M = int(g.interior_fraction * (g.nr - 1))
    exact = verify_on_grid(E3, e, traj.r[:M + 1], traj.times + 0.1)
    assert abs(rep.max_violation - exact.max_violation) <= eps


def test_slack_shrinks_at_second_order():
    e = get_estimate("davies_beta", 3, 1.0, beta=0.5)
    eps = [calibrate_slack(E3, RadialGrid(nr=nr, dt=dt), e) for nr, dt in ((241, 0.01), (481, 0.005))]
    assert math.log2(eps[0] / eps[1]) >= 1.8


@pytest.mark.parametrize("m,k", [(E3, 1.0), (H3, 2.0)])
@pytest.mark.parametrize("kind", ["bump", "constant_plus_bump"])
def test_monitor_bump_runs(m, k, kind):
    e = get_estimate("cor14", 3, k, beta=0.5)
    g = RadialGrid()
    eps = calibrate_slack(m, g, e)
    ic = InitialCondition(kind, amplitude=1.0 if kind == "bump" else 5.0)
    rep = monitor(run_radial_heat(m, g, ic), e, eps_disc=eps)
    assert rep.passed and rep.max_violation < 0


def test_monitor_errors():
    traj = run_radial_heat(H3, RadialGrid(t_end=0.1), InitialCondition("bump"))
    with pytest.raises(DomainError):
        monitor(traj, get_estimate("davies_beta", 3, 1.0, beta=0.5))
    with pytest.raises(DomainError):
        monitor(traj, get_estimate("davies_beta", 3, 2.0, beta=0.5), t_shift=-1.0)


def test_lhs_error_requires_data_and_is_small_near_core():
    traj = run_radial_heat(E3, RadialGrid(nr=481, dt=0.005), GAUSS)
    assert lhs_error(traj, lambda t: 0.5) < 1.0
    with pytest.raises(DomainError):
        kernel_error(run_radial_heat(E3, RadialGrid(), InitialCondition("bump")))
