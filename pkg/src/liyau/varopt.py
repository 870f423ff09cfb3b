"""Upper approximations of the variational bounds phi1 / phi2.

phi_i(beta0, t0) is the infimum of psi_i(t0) over admissible curves with
beta(t0) = beta0.  Here the infimum is taken over finite-dimensional
families only, so every reported value is an upper bound of phi_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._numerics import golden_section
from .bounds import psi1, psi2
from .errors import DomainError
from .paramfun import B1_MARGIN, ParamFunction, validate_beta

CLOSED_FAMILIES = ("constant", "linear", "exponential", "rational")
RESTARTS = 5
MAX_SWEEPS = 200
VALUE_TOL = 1e-10
PARAM_TOL = 1e-10


def corollary_bound(which: str, beta: float, t: float, n: int, k: float) -> float:
    """Closed-form piecewise bounds obtained from constant or linear test curves.

    ``cor12`` switches at ``(1-beta)/(2k beta)``, ``cor14`` at
    ``(1-beta)/(k beta)`` and ``cor15`` at ``3(1-beta)/(2k)``.
    """
    if not k > 0:
        raise DomainError(f"{which} assumes k > 0")
    if not 0.0 < beta < 1.0:
        raise DomainError(f"{which} requires 0 < beta < 1, got {beta}")
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    first = n / (2.0 * beta * t)
    if which == "cor12":
        if t < (1.0 - beta) / (2.0 * k * beta):
            return first
        return 3.0 * n / (8.0 * beta * t) + n * k / (4.0 * (1.0 - beta))
    if which == "cor14":
        if t < (1.0 - beta) / (k * beta):
            return first
        return n / (4.0 * beta * t) + n * k / (4.0 * (1.0 - beta))
    if which == "cor15":
        if t < 3.0 * (1.0 - beta) / (2.0 * k):
            return first
        return (3.0 * (1.0 - beta) * n / (16.0 * k * beta * t * t)
                + n * k / (4.0 * (1.0 - beta) * beta))
    raise DomainError(f"unknown corollary {which!r}")


@dataclass
class OptimizationResult:
    which: str
    beta0: float
    t0: float
    n: int
    k: float
    family: str
    best_params: list
    value: float
    feasible: dict
    corollary_reference: float | None
    family_values: dict = field(default_factory=dict)
    beta_fn: ParamFunction | None = field(default=None, repr=False)
    upper_bound_of_phi: bool = True

    def to_dict(self) -> dict:
        return {"which": self.which, "beta0": self.beta0, "t0": self.t0, "n": self.n,
                "k": self.k, "family": self.family, "best_params": list(self.best_params),
                "value": self.value, "feasible": self.feasible,
                "corollary_reference": self.corollary_reference,
                "family_values": dict(self.family_values),
                "upper_bound_of_phi": self.upper_bound_of_phi}


def endpoint_curve(family: str, beta0: float, t0: float, k: float) -> ParamFunction:
    """The member of a closed-form family passing through ``(t0, beta0)``."""
    if family == "constant":
        return ParamFunction("constant", (beta0,), t0, k)
    if not k > 0:
        raise DomainError(f"the {family} family needs k > 0 to reach beta0 < 1")
    if family == "linear":
        theta = (1.0 - beta0) / (k * t0)
    elif family == "exponential":
        theta = -math.log(beta0) / (2.0 * k * t0)
    elif family == "rational":
        theta = (1.0 / beta0 - 1.0) / (k * t0)
    else:
        raise DomainError(f"unknown family {family!r}")
    return ParamFunction(family, (theta,), t0, k)


def _parse_family(spec):
    if isinstance(spec, (tuple, list)):
        return spec[0], int(spec[1])
    if isinstance(spec, str) and spec.startswith("piecewise_linear"):
        _, _, m = spec.partition(":")
        return "piecewise_linear", int(m or 4)
    return spec, None


def _coarser(m):
    """Knot count of the nearest nested uniform sub-grid, or None."""
    intervals = m - 1
    for p in range(2, intervals + 1):
        if intervals % p == 0:
            return intervals // p + 1
    return None


class _PiecewiseSearch:
    """Coordinate descent over knot values with ``beta(t0) = beta0`` pinned."""

    def __init__(self, which, beta0, t0, n, k, seed):
        self.which, self.beta0, self.t0, self.n, self.k = which, beta0, t0, n, k
        self.psi = psi1 if which == "phi1" else psi2
        self.rng_seed = seed
        self._cache = {}

    def curve(self, m, free):
        xs = np.linspace(0.0, self.t0, m)
        return ParamFunction.piecewise(xs, list(free) + [self.beta0], self.k)

    def objective(self, m, free):
        return self.psi(self.curve(m, free), self.t0, self.n, self.k, check=False)

    def solve(self, m):
        if m in self._cache:
            return self._cache[m]
        xs = np.linspace(0.0, self.t0, m)
        lo = np.full(m - 1, B1_MARGIN * 2)
        hi = np.full(m - 1, 1.0 - B1_MARGIN * 2)
        hi[0] = 1.0
        inits = []
        if self.k > 0:
            inits.append(np.clip(1.0 - (1.0 - self.beta0) * xs[:-1] / self.t0, lo, hi))
        mc = _coarser(m)
        if mc is not None:
            coarse, _ = self.solve(mc)
            inits.append(np.interp(xs[:-1], np.linspace(0.0, self.t0, mc),
                                   list(coarse) + [self.beta0]))
        inits.append(np.full(m - 1, self.beta0))
        rng = np.random.default_rng(self.rng_seed + m)
        base = inits[0]
        while len(inits) < RESTARTS:
            jitter = rng.uniform(-0.1, 0.1, m - 1)
            inits.append(np.clip(base + jitter * (1.0 - base + 1e-3), lo, hi))

        best_y, best_v = None, math.inf
        for y0 in inits[:RESTARTS]:
            y, v = self._descend(m, np.array(y0, dtype=float), lo, hi)
            if v < best_v:
                best_y, best_v = y, v
        self._cache[m] = (best_y, best_v)
        return best_y, best_v

    def _descend(self, m, y, lo, hi):
        best = self.objective(m, y)
        for _ in range(MAX_SWEEPS):
            prev = best
            for i in range(len(y)):
                def f1(z, i=i):
                    yy = y.copy()
                    yy[i] = z
                    return self.objective(m, yy)
                z, v = golden_section(f1, lo[i], hi[i], tol=PARAM_TOL)
                if v < best:
                    y[i], best = z, v
            if prev - best <= VALUE_TOL:
                break
        return y, best


def phi_upper(which: str, beta0: float, t0: float, n: int, k: float,
              families=("linear",), seed: int = 0) -> OptimizationResult:
    """Smallest psi value at ``t0`` found over the given curve families.

    ``families`` entries are closed-form family names (each has exactly one
    member through ``(t0, beta0)``) or ``"piecewise_linear:m"`` for uniform
    knots on ``[0, t0]`` searched by coordinate descent.
    """
    if which not in ("phi1", "phi2"):
        raise DomainError(f"which must be phi1 or phi2, got {which!r}")
    if not 0.0 < beta0 < 1.0:
        raise DomainError(f"beta0 must lie in (0, 1), got {beta0}")
    if not t0 > 0:
        raise DomainError(f"t0 must be positive, got {t0}")
    psi = psi1 if which == "phi1" else psi2
    values, curves = {}, {}
    search = None
    for spec in families:
        fam, m = _parse_family(spec)
        label = fam if m is None else f"{fam}:{m}"
        if m is None:
            try:
                curve = endpoint_curve(fam, beta0, t0, k)
            except DomainError:
                continue
            if not validate_beta(curve).feasible:
                continue
            values[label] = psi(curve, t0, n, k, check=False)
            curves[label] = curve
        else:
            if m < 2:
                raise DomainError("piecewise_linear needs at least 2 knots")
            search = search or _PiecewiseSearch(which, beta0, t0, n, k, seed)
            y, v = search.solve(m)
            values[label] = v
            curves[label] = search.curve(m, y)
    if not values:
        raise DomainError(f"no feasible family among {list(families)} at beta0={beta0}, t0={t0}, k={k}")
    best = min(values, key=lambda key: (values[key], key))
    curve = curves[best]
    cert = validate_beta(curve)
    ref_name = "cor12" if which == "phi1" else "cor15"
    ref = corollary_bound(ref_name, beta0, t0, n, k) if k > 0 else None
    return OptimizationResult(which, beta0, t0, n, k, best, list(curve.params), values[best],
                              cert.to_dict(), ref, values, curve)
