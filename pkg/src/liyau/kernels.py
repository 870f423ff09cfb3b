"""Closed-form heat kernels on model spaces and grid verification of estimates.

Supported models are Euclidean R^n and hyperbolic 3-space of curvature -c^2,
where the kernel is elementary:

    p(r, t) = (4 pi t)^(-3/2) * (c r / sinh(c r)) * exp(-c^2 t - r^2 / (4 t)).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._numerics import golden_section
from .bounds import Estimate
from .errors import DomainError

# 1/x - coth x loses ~4 digits to cancellation at x = 1e-6; the series is exact
# to double precision up to 1e-3
TAYLOR_R = 1e-3
VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class ModelManifold:
    n: int
    geometry: str = "euclidean"
    c: float = 1.0

    def __post_init__(self):
        if self.geometry not in ("euclidean", "hyperbolic3"):
            raise DomainError(f"unknown geometry {self.geometry!r}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")
        if self.geometry == "hyperbolic3":
            if self.n != 3:
                raise DomainError("hyperbolic3 requires n = 3")
            if not self.c > 0:
                raise DomainError("hyperbolic3 requires c > 0")

    @classmethod
    def euclidean(cls, n):
        return cls(n, "euclidean", 0.0)

    @classmethod
    def hyperbolic3(cls, c=1.0):
        return cls(3, "hyperbolic3", c)

    @property
    def k(self) -> float:
        """Ricci lower-bound constant: Ric >= -k."""
        return 0.0 if self.geometry == "euclidean" else (self.n - 1) * self.c ** 2

    def warp_log_deriv(self, r):
        """``w'(r) / w(r)`` for the warping function of the radial metric."""
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            if self.geometry == "euclidean":
                return 1.0 / r
            return self.c / np.tanh(self.c * r)

    def to_dict(self) -> dict:
        return {"n": self.n, "geometry": self.geometry, "c": self.c, "k": self.k}


@dataclass
class KernelPoint:
    r: np.ndarray
    t: np.ndarray
    f: np.ndarray
    f_r: np.ndarray
    grad_f_sq: np.ndarray
    f_t: np.ndarray


def _log_r_over_sinh(x):
    """log(x / sinh x) for x >= 0, stable at 0 and for large x."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-3
    out = np.empty_like(x)
    xs = x[small]
    out[small] = -xs * xs / 6.0 + xs ** 4 / 180.0
    xl = x[~small]
    out[~small] = np.log(2.0 * xl) - xl - np.log1p(-np.exp(-2.0 * xl))
    return out


def _inv_minus_coth(x):
    """1/x - coth(x), with a Taylor expansion through x^5 below ``TAYLOR_R``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x < TAYLOR_R
    xs = x[small]
    out[small] = -xs / 3.0 + xs ** 3 / 45.0 - 2.0 * xs ** 5 / 945.0
    xl = x[~small]
    out[~small] = 1.0 / xl - 1.0 / np.tanh(xl)
    return out


def kernel_logderivs(m: ModelManifold, r, t) -> KernelPoint:
    """``f = log p`` and its derivatives for the heat kernel of ``m``."""
    r, t = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise DomainError("kernel needs t > 0")
    if np.any(r < 0):
        raise DomainError("kernel needs r >= 0")
    n = m.n
    if m.geometry == "euclidean":
        f = -(n / 2.0) * np.log(4 * np.pi * t) - r * r / (4 * t)
        f_r = -r / (2 * t)
        f_t = -n / (2 * t) + r * r / (4 * t * t)
    else:
        c = m.c
        f = (-1.5 * np.log(4 * np.pi * t) + _log_r_over_sinh(c * r)
             - c * c * t - r * r / (4 * t))
        f_r = c * _inv_minus_coth(c * r) - r / (2 * t)
        f_t = -1.5 / t - c * c + r * r / (4 * t * t)
    return KernelPoint(r, t, f, f_r, f_r * f_r, f_t)


def kernel_value(m: ModelManifold, r, t):
    return np.exp(kernel_logderivs(m, r, t).f)


@dataclass
class VerificationReport:
    model: dict
    estimate: dict
    grid: dict
    max_violation: float
    argmax: dict
    tightness: float
    tightness_at: dict
    tolerance: float
    extra: dict | None = None

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance

    def to_dict(self) -> dict:
        out = {"model": self.model, "estimate": self.estimate, "grid": self.grid,
               "max_violation": self.max_violation, "argmax": self.argmax,
               "tightness": self.tightness, "tightness_at": self.tightness_at,
               "tolerance": self.tolerance, "passed": self.passed}
        if self.extra:
            out["extra"] = self.extra
        return out


def _check_compatible(m, e):
    if e.n != m.n:
        raise DomainError(f"estimate is for n={e.n}, model has n={m.n}")
    # Ric >= -m.k implies Ric >= -e.k whenever e.k >= m.k
    if e.k < m.k * (1 - 1e-12):
        raise DomainError(f"estimate assumes Ric >= -{e.k}, model only gives Ric >= -{m.k}")


def make_grid(r_min=0.0, r_max=10.0, nr=256, t_min=0.05, t_max=5.0, nt=256, t_spacing="log"):
    if not (0 < t_min <= t_max):
        raise DomainError("time grid must satisfy 0 < t_min <= t_max")
    r = np.linspace(r_min, r_max, nr)
    if t_spacing == "log":
        t = np.geomspace(t_min, t_max, nt)
    else:
        t = np.linspace(t_min, t_max, nt)
    spec = {"r_min": r_min, "r_max": r_max, "nr": nr, "t_min": t_min, "t_max": t_max,
            "nt": nt, "r_spacing": "uniform", "t_spacing": t_spacing}
    return r, t, spec


def _evaluate_slices(e, ts, threads):
    def one(t):
        return e.evaluate(float(t))
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = list(pool.map(one, ts))
    else:
        pairs = [one(t) for t in ts]
    return np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs])


def reduce_report(lhs, rhs, r, t, model, estimate, grid_spec, tol=VIOLATION_TOL, extra=None):
    """Max violation and tightness over an ``(nr, nt)`` slab of LHS/RHS values.

    Ties go to the smallest r index, then the smallest t index.
    """
    slack = lhs - rhs
    i = int(np.argmax(slack))
    ir, it = np.unravel_index(i, slack.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, -np.inf)
    j = int(np.argmax(ratio))
    jr, jt = np.unravel_index(j, ratio.shape)
    return VerificationReport(
        model=model, estimate=estimate, grid=grid_spec,
        max_violation=float(slack[ir, it]),
        argmax={"r": float(r[ir]), "t": float(t[it])},
        tightness=float(ratio[jr, jt]),
        tightness_at={"r": float(r[jr]), "t": float(t[jt])},
        tolerance=tol, extra=extra)


def verify_on_grid(m: ModelManifold, e: Estimate, r=None, t=None, grid_spec=None,
                   tol=VIOLATION_TOL, threads=1, return_arrays=False):
    """Check ``beta(t) |grad f|^2 - f_t <= B(t)`` for the heat kernel on a grid.

    ``r`` and ``t`` default to :func:`make_grid` (256 x 256, log-spaced t).
    """
    _check_compatible(m, e)
    if r is None or t is None:
        r, t, grid_spec = make_grid()
    r, t = np.asarray(r, dtype=float), np.asarray(t, dtype=float)
    if grid_spec is None:
        grid_spec = {"r": [float(r[0]), float(r[-1]), len(r)], "t": [float(t[0]), float(t[-1]), len(t)]}
    coeff, rhs_t = _evaluate_slices(e, t, threads)
    kp = kernel_logderivs(m, r[:, None], t[None, :])
    lhs = coeff[None, :] * kp.grad_f_sq - kp.f_t
    rhs = np.broadcast_to(rhs_t[None, :], lhs.shape)
    rep = reduce_report(lhs, rhs, r, t, m.to_dict(), e.describe(), grid_spec, tol)
    if return_arrays:
        return rep, (r, t, lhs, rhs)
    return rep


def sharpness_ratio(m: ModelManifold, e: Estimate, t: float, r_max: float = 20.0,
                    nr: int = 4001) -> float:
    """``sup_r LHS / RHS`` at time ``t`` (grid plus golden-section refinement)."""
    _check_compatible(m, e)
    beta, B = e.evaluate(t)
    if B <= 0:
        raise DomainError(f"right-hand side {B} is not positive at t={t}")

    def ratio(r):
        kp = kernel_logderivs(m, r, t)
        return (beta * kp.grad_f_sq - kp.f_t) / B

    rs = np.linspace(0.0, r_max, nr)
    vals = ratio(rs)
    i = int(np.argmax(vals))
    best = float(vals[i])
    lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, nr - 1)]
    _, v = golden_section(lambda x: float(ratio(np.array([x]))[0]), lo, hi, maximize=True)
    return max(best, v)
