"""Radial Crank-Nicolson heat solver on model spaces, with an estimate monitor.

The radial Laplacian ``u_rr + (n-1) (w'/w) u_r`` is discretised in flux form
on cells around the nodes ``r_i = i dr``, so the r = 0 symmetry condition
needs no special casing and constants are preserved exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .bounds import MIN_T, Estimate
from .errors import DomainError, NumericalError
from .kernels import (VIOLATION_TOL, ModelManifold, _check_compatible, kernel_logderivs,
                      kernel_value, reduce_report)


@dataclass(frozen=True)
class RadialGrid:
    R: float = 12.0
    nr: int = 241
    dt: float = 0.01
    t_end: float = 1.0
    # the early-age kernel tail beyond r ~ R/4 is under-resolved on the default grid
    interior_fraction: float = 0.25
    snapshot_interval: float = 0.1

    def __post_init__(self):
        if self.nr < 16:
            raise DomainError("need at least 16 radial nodes")
        if not (self.R > 0 and self.dt > 0 and self.t_end > 0):
            raise DomainError("R, dt and t_end must be positive")
        if not 0 < self.interior_fraction <= 1:
            raise DomainError("interior_fraction must lie in (0, 1]")
        if self.dt > self.dr * (1 + 1e-12):
            raise DomainError(f"dt={self.dt} exceeds dr={self.dr}; second-order accuracy needs dt <= dr")
        q = self.snapshot_interval / self.dt
        if not (q >= 1 - 1e-9 and abs(q - round(q)) < 1e-9):
            raise DomainError("snapshot_interval must be a positive multiple of dt")

    @property
    def dr(self) -> float:
        return self.R / (self.nr - 1)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.R, self.nr)

    @property
    def snapshot_every(self) -> int:
        return int(round(self.snapshot_interval / self.dt))

    @property
    def steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def to_dict(self) -> dict:
        return {"R": self.R, "nr": self.nr, "dt": self.dt, "t_end": self.t_end,
                "interior_fraction": self.interior_fraction,
                "snapshot_interval": self.snapshot_interval}


@dataclass(frozen=True)
class InitialCondition:
    """``gaussian`` (kernel profile at age t0), ``bump``, ``constant_plus_bump`` or ``constant``."""

    kind: str = "gaussian"
    t0: float = 0.1
    amplitude: float = 1.0
    width: float = 2.0
    floor: float = 1e-3
    value: float = 1.0

    def profile(self, m: ModelManifold, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "gaussian":
            if not self.t0 > 0:
                raise DomainError("gaussian initial data needs t0 > 0")
            return self.amplitude * kernel_value(m, r, self.t0)
        if self.kind in ("bump", "constant_plus_bump"):
            base = self.floor if self.kind == "bump" else self.value
            x = r / self.width
            inside = x < 1.0
            bump = np.zeros_like(r)
            bump[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
            return base + self.amplitude * bump
        if self.kind == "constant":
            return np.full_like(r, self.value)
        raise DomainError(f"unknown initial condition {self.kind!r}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "t0": self.t0, "amplitude": self.amplitude,
                "width": self.width, "floor": self.floor, "value": self.value}


@dataclass
class Trajectory:
    model: ModelManifold
    grid: RadialGrid
    initial: InitialCondition
    times: np.ndarray
    u: np.ndarray = field(repr=False)

    @property
    def r(self):
        return self.grid.r


def _cell_measure(m: ModelManifold, r):
    """Primitive ``P(r) = int_0^r w(s)^(n-1) ds`` of the radial volume density."""
    r = np.asarray(r, dtype=float)
    if m.geometry == "euclidean":
        return r ** m.n / m.n
    c = m.c
    x = c * r
    small = x < 1e-2
    out = np.empty_like(r)
    xs = x[small]
    out[small] = (xs ** 3 / 3 + xs ** 5 / 15 + 2 * xs ** 7 / 315) / c ** 3
    xl = x[~small]
    out[~small] = (np.sinh(2 * xl) / 4 - xl / 2) / c ** 3
    return out


def _face_density(m: ModelManifold, r):
    r = np.asarray(r, dtype=float)
    if m.geometry == "euclidean":
        return r ** (m.n - 1)
    return (np.sinh(m.c * r) / m.c) ** 2


def radial_operator(m: ModelManifold, nr: int, dr: float):
    """Tridiagonal coefficients ``(lower, diag, upper)`` of the discrete Laplacian.

    Row ``i`` acts as ``(W+ (u[i+1]-u[i]) - W- (u[i]-u[i-1])) / (dr V_i)`` with
    face densities ``W-/+`` at ``r_i -/+ dr/2`` and cell volume ``V_i``.
    """
    r = np.arange(nr) * dr
    faces = (np.arange(nr + 1) - 0.5) * dr
    faces[0] = 0.0
    P = _cell_measure(m, faces)
    V = np.diff(P)
    W = _face_density(m, faces)
    lower = W[:-1] / (dr * V)
    upper = W[1:] / (dr * V)
    lower[0] = 0.0
    diag = -(lower + upper)
    return lower, diag, upper, r


def apply_operator(ops, u):
    lower, diag, upper, _ = ops
    out = diag * u
    out[1:] += lower[1:] * u[:-1]
    out[:-1] += upper[:-1] * u[1:]
    return out


def run_radial_heat(m: ModelManifold, g: RadialGrid, initial: InitialCondition,
                    u0=None) -> Trajectory:
    """Advance ``u_t = Delta u`` by Crank-Nicolson with a Dirichlet far boundary.

    ``u0`` overrides the profile of ``initial`` with explicit nodal values
    (``initial`` is then only recorded).
    """
    ops = radial_operator(m, g.nr, g.dr)
    lower, diag, upper, r = ops
    if u0 is None:
        u = initial.profile(m, r).astype(float)
    else:
        u = np.array(u0, dtype=float)
        if u.shape != r.shape:
            raise DomainError(f"u0 must have {g.nr} nodal values")
    if not np.all(u > 0) or not np.all(np.isfinite(u)):
        raise DomainError("initial data must be strictly positive and finite")
    N = g.nr - 1
    uR = u[N]
    h = 0.5 * g.dt
    # unknowns 0..N-1; node N is held at its initial value
    ab = np.zeros((3, N))
    ab[0, 1:] = -h * upper[:N - 1]
    ab[1, :] = 1.0 - h * diag[:N]
    ab[2, :-1] = -h * lower[1:N]
    # implicit half of the boundary flux; the explicit half comes from apply_operator
    bc = np.zeros(N)
    bc[N - 1] = h * upper[N - 1] * uR

    times, snaps = [0.0], [u.copy()]
    for step in range(1, g.steps + 1):
        rhs = u[:N] + h * apply_operator(ops, u)[:N] + bc
        u_new = np.empty_like(u)
        u_new[:N] = solve_banded((1, 1), ab, rhs, check_finite=False)
        u_new[N] = uR
        if not np.all(u_new > 0) or not np.all(np.isfinite(u_new)):
            bad = np.nonzero(~(u_new > 0))[0]
            raise NumericalError("positivity lost", {
                "step": step, "time": step * g.dt, "first_bad_node": int(bad[0]) if bad.size else None,
                "min_u": float(np.nanmin(u_new)), "dt": g.dt, "dr": g.dr})
        u = u_new
        if step % g.snapshot_every == 0 or step == g.steps:
            times.append(step * g.dt)
            snaps.append(u.copy())
    return Trajectory(m, g, initial, np.array(times), np.array(snaps))


def mass(traj: Trajectory, baseline: float = 0.0) -> np.ndarray:
    """Discrete integral of ``u - baseline`` over the ball of radius R, per snapshot.

    With ``baseline`` equal to the far-field value this is the excess mass,
    which leaks out through the Dirichlet boundary.
    """
    g = traj.grid
    faces = (np.arange(g.nr + 1) - 0.5) * g.dr
    faces[0] = 0.0
    faces[-1] = g.R
    V = np.diff(_cell_measure(traj.model, faces))
    return (traj.u - baseline) @ V


def log_derivatives(traj: Trajectory, snap: int):
    """``(|grad f|^2, f_t)`` at every node of one snapshot, computed spatially.

    ``f_t = u_t / u = Delta u / u``; the gradient is a central difference of
    ``log u`` and vanishes at r = 0.
    """
    g = traj.grid
    ops = radial_operator(traj.model, g.nr, g.dr)
    u = traj.u[snap]
    f = np.log(u)
    grad = np.zeros_like(f)
    grad[1:-1] = (f[2:] - f[:-2]) / (2 * g.dr)
    f_t = apply_operator(ops, u) / u
    return grad ** 2, f_t


def _monitored(traj):
    g = traj.grid
    return int(math.floor(g.interior_fraction * (g.nr - 1)))


def kernel_error(traj: Trajectory) -> float:
    """Relative L-infinity error of a kernel-matched run at its final snapshot."""
    if traj.initial.kind != "gaussian":
        raise DomainError("kernel_error needs a kernel-matched (gaussian) run")
    M = _monitored(traj)
    r = traj.r[:M + 1]
    exact = kernel_value(traj.model, r, traj.times[-1] + traj.initial.t0)
    return float(np.max(np.abs(traj.u[-1, :M + 1] - exact)) / np.max(exact))


def lhs_error(traj: Trajectory, beta_of_t) -> float:
    """Max |LHS_numerical - LHS_exact| over monitored nodes of a kernel-matched run."""
    M = _monitored(traj)
    r = traj.r[:M + 1]
    err = 0.0
    for j, t in enumerate(traj.times):
        if j == 0:
            continue
        age = t + traj.initial.t0
        b = beta_of_t(t)
        gsq, ft = log_derivatives(traj, j)
        kp = kernel_logderivs(traj.model, r, age)
        num = b * gsq[:M + 1] - ft[:M + 1]
        ex = b * kp.grad_f_sq - kp.f_t
        err = max(err, float(np.max(np.abs(num - ex))))
    return err


def calibrate_slack(m: ModelManifold, g: RadialGrid, e: Estimate, t0: float = 0.1,
                    factor: float = 10.0) -> float:
    """``factor`` x the LHS error of a kernel-matched run at the same resolution."""
    traj = run_radial_heat(m, g, InitialCondition("gaussian", t0=t0))
    return factor * lhs_error(traj, lambda t: e.grad_coeff(t + t0))


def monitor(traj: Trajectory, e: Estimate, t_shift: float = 0.0,
            eps_disc: float = 0.0):
    """Check the estimate at every monitored node and snapshot of ``traj``.

    Bounds are evaluated at the solution age ``snapshot time + t_shift``;
    snapshots younger than the minimum time are skipped.  Only nodes with
    ``r <= interior_fraction * R`` are checked.
    """
    _check_compatible(traj.model, e)
    if t_shift < 0:
        raise DomainError("t_shift must be nonnegative")
    ages = traj.times + t_shift
    use = np.nonzero(ages >= MIN_T)[0]
    if use.size == 0:
        raise DomainError("no snapshot has positive age")
    M = _monitored(traj)
    r = traj.r[:M + 1]
    lhs = np.empty((M + 1, use.size))
    rhs = np.empty_like(lhs)
    for col, j in enumerate(use):
        b, B = e.evaluate(float(ages[j]))
        gsq, ft = log_derivatives(traj, j)
        lhs[:, col] = b * gsq[:M + 1] - ft[:M + 1]
        rhs[:, col] = B
    spec = dict(traj.grid.to_dict(), t_shift=t_shift, snapshots=int(use.size),
                monitored_r_max=float(r[-1]))
    tol = eps_disc + VIOLATION_TOL
    return reduce_report(lhs, rhs, r, ages[use], traj.model.to_dict(), e.describe(), spec,
                         tol, extra={"eps_disc": eps_disc, "initial": traj.initial.to_dict(),
                                     "min_u": float(traj.u.min())})
