"""Parameter curves beta(t) and Qian-type weights a(t).

Both are small frozen records: a family tag, a parameter tuple and a
horizon.  Evaluation is vectorised over numpy arrays and exact for the
closed-form families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from ._numerics import golden_section
from .errors import ConfigurationError, DomainError

BETA_FAMILIES = ("constant", "linear", "exponential", "rational", "piecewise_linear")
WEIGHT_FAMILIES = ("sinh_sq", "quadratic", "power_theta", "tabulated")

B1_GRID = 4096
B1_MARGIN = 1e-12
LIMIT_LEVELS = 40
CAUCHY_TOL = 1e-9


def _split_knots(params, what):
    if len(params) < 4 or len(params) % 2:
        raise ConfigurationError(
            f"{what} needs an even number (>= 4) of params: abscissae then values")
    m = len(params) // 2
    xs = np.asarray(params[:m], dtype=float)
    ys = np.asarray(params[m:], dtype=float)
    if np.any(np.diff(xs) <= 0):
        raise ConfigurationError(f"{what} knot abscissae must be strictly increasing")
    return xs, ys


@dataclass(frozen=True)
class ParamFunction:
    """A parameter curve beta on ``[0, T]``.

    ``params`` per family: constant ``[beta0]``; linear, exponential and
    rational ``[theta]`` (giving ``1 - theta*k*t``, ``exp(-2*theta*k*t)`` and
    ``1/(1 + theta*k*t)``); piecewise_linear ``[x0..xm, y0..ym]`` with
    ``x0 = 0`` and ``xm = T``.
    """

    family: str
    params: tuple = ()
    T: float = 1.0
    k: float = 0.0
    _knots: tuple = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.family not in BETA_FAMILIES:
            raise ConfigurationError(f"unknown beta family {self.family!r}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise DomainError(f"horizon T must be positive, got {self.T}")
        if self.k < 0:
            raise DomainError(f"curvature constant k must be >= 0, got {self.k}")
        expected = {"constant": 1, "linear": 1, "exponential": 1, "rational": 1}
        if self.family in expected and len(self.params) != 1:
            raise ConfigurationError(f"{self.family} takes exactly one parameter")
        if self.family == "piecewise_linear":
            xs, ys = _split_knots(self.params, "piecewise_linear")
            if abs(xs[0]) > 1e-15 or abs(xs[-1] - self.T) > 1e-12 * max(1.0, self.T):
                raise ConfigurationError("piecewise_linear knots must span [0, T]")
            slopes = np.diff(ys) / np.diff(xs)
            object.__setattr__(self, "_knots", (xs, ys, slopes))

    @classmethod
    def constant(cls, beta0, T=1.0, k=0.0):
        return cls("constant", (beta0,), T, k)

    @classmethod
    def piecewise(cls, xs, ys, k=0.0):
        xs = [float(x) for x in xs]
        return cls("piecewise_linear", tuple(xs) + tuple(float(y) for y in ys), xs[-1], k)

    @property
    def theta(self) -> float:
        return self.params[0]

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params), "T": self.T, "k": self.k}

    # -- evaluation -------------------------------------------------------
    def _segment(self, t):
        xs, ys, slopes = self._knots
        i = np.clip(np.searchsorted(xs, t, side="right") - 1, 0, len(slopes) - 1)
        return i, xs, ys, slopes

    def value(self, t):
        t = np.asarray(t, dtype=float)
        fam, p, k = self.family, self.params, self.k
        if fam == "constant":
            return np.full_like(t, p[0])
        if fam == "linear":
            return 1.0 - p[0] * k * t
        if fam == "exponential":
            return np.exp(-2.0 * p[0] * k * t)
        if fam == "rational":
            return 1.0 / (1.0 + p[0] * k * t)
        i, xs, ys, slopes = self._segment(t)
        return ys[i] + slopes[i] * (t - xs[i])

    def deriv(self, t):
        """First derivative; right-hand slope at interior knots."""
        t = np.asarray(t, dtype=float)
        fam, p, k = self.family, self.params, self.k
        if fam == "constant":
            return np.zeros_like(t)
        if fam == "linear":
            return np.full_like(t, -p[0] * k)
        if fam == "exponential":
            return -2.0 * p[0] * k * np.exp(-2.0 * p[0] * k * t)
        if fam == "rational":
            b = 1.0 / (1.0 + p[0] * k * t)
            return -p[0] * k * b * b
        i, _, _, slopes = self._segment(t)
        return slopes[i]

    def deriv_left(self, t):
        """Left-hand derivative (differs from :meth:`deriv` only at knots)."""
        if self.family != "piecewise_linear":
            return self.deriv(t)
        t = np.asarray(t, dtype=float)
        xs, _, slopes = self._knots
        i = np.clip(np.searchsorted(xs, t, side="left") - 1, 0, len(slopes) - 1)
        return slopes[i]

    def one_minus(self, t):
        """``1 - beta(t)`` without cancellation near ``beta = 1``."""
        t = np.asarray(t, dtype=float)
        fam, p, k = self.family, self.params, self.k
        if fam == "linear":
            return p[0] * k * t
        if fam == "exponential":
            return -np.expm1(-2.0 * p[0] * k * t)
        if fam == "rational":
            x = p[0] * k * t
            return x / (1.0 + x)
        if fam == "piecewise_linear":
            i, xs, ys, slopes = self._segment(t)
            return (1.0 - ys[i]) - slopes[i] * (t - xs[i])
        return 1.0 - self.value(t)

    def breakpoints(self) -> list[float]:
        if self.family == "piecewise_linear":
            return self._knots[0][1:-1].tolist()
        return []


def beta_eval(f: ParamFunction, t: float) -> tuple[float, float]:
    """Return ``(beta(t), beta'(t))`` for ``0 <= t <= T``."""
    if not isinstance(f, ParamFunction):
        raise ConfigurationError(f"expected a ParamFunction, got {type(f).__name__}")
    if not (0.0 <= t <= f.T):
        raise DomainError(f"t={t} outside [0, T={f.T}]")
    return float(f.value(t)), float(f.deriv(t))


@dataclass
class BetaCertificate:
    feasible: bool
    b1: bool
    b2: bool
    margin: float
    violations: list = field(default_factory=list)
    first_violation: float | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"feasible": self.feasible, "B1": self.b1, "B2": self.b2,
                "margin": self.margin, "violations": list(self.violations),
                "first_violation": self.first_violation, "notes": list(self.notes)}


def validate_beta(f: ParamFunction, n_grid: int = B1_GRID) -> BetaCertificate:
    """Check the admissibility conditions (B1) and (B2) for ``f`` on ``[0, T]``.

    (B1) ``0 < beta < 1`` on ``(0, T]`` is sampled on a dense grid (knots
    inserted), the sampled extremes are refined by golden section, and the
    result must clear a margin of ``B1_MARGIN``.  The right neighbourhood of
    ``t = 0`` is decided from the one-sided behaviour at 0.  (B2) is checked
    exactly at 0.
    """
    T = f.T
    b0, d0 = beta_eval(f, 0.0)
    notes = []
    b2 = b0 > 0.0 and ((1.0 - b0) ** 2 + d0 ** 2) > 0.0
    if not b2:
        notes.append(f"B2 fails: beta(0)={b0}, beta'(0)={d0}")

    s = np.linspace(0.0, T, n_grid + 1)[1:]
    bp = f.breakpoints()
    if bp:
        s = np.unique(np.concatenate([s, bp]))
    v = f.value(s)
    om = f.one_minus(s)
    bad = (v <= B1_MARGIN) | (om <= B1_MARGIN) | ~np.isfinite(v)
    lo_i, hi_i = int(np.argmin(v)), int(np.argmax(v))
    margin = float(min(v[lo_i], om[hi_i]))

    # refine sampled extremes between grid neighbours
    def bracket(i):
        a = s[i - 1] if i > 0 else s[0]
        b = s[i + 1] if i + 1 < len(s) else s[-1]
        return a, b

    for i, sense in ((lo_i, "min"), (hi_i, "max")):
        a, b = bracket(i)
        if sense == "min":
            _, m = golden_section(lambda x: float(f.value(x)), a, b)
        else:
            _, m = golden_section(lambda x: float(f.one_minus(x)), a, b)
        margin = min(margin, m)

    # behaviour on (0, s[0]): at beta(0) = 1 the curve must leave 1 downwards
    near_zero_ok = b0 < 1.0 - B1_MARGIN or (b0 <= 1.0 and d0 < 0.0)
    if b0 <= 0.0 or b0 > 1.0:
        near_zero_ok = False
    if not near_zero_ok:
        notes.append(f"B1 fails immediately right of 0 (beta(0)={b0}, beta'(0)={d0})")

    b1 = bool(near_zero_ok and not bad.any() and margin > B1_MARGIN)
    violations = s[bad].tolist()
    first = None
    if bad.any():
        j = int(np.argmax(bad))
        first = _refine_crossing(f, s[j - 1] if j > 0 else 0.0, s[j])
    elif not near_zero_ok:
        first = 0.0
    if violations:
        notes.append(f"B1 fails at {len(violations)} grid points")
    return BetaCertificate(feasible=bool(b1 and b2), b1=b1, b2=bool(b2),
                           margin=margin, violations=violations[:32],
                           first_violation=first, notes=notes)


def _refine_crossing(f, a, b, iters=200):
    def ok(x):
        return B1_MARGIN < float(f.value(x)) and float(f.one_minus(x)) > B1_MARGIN
    if not ok(a):
        return float(a)
    for _ in range(iters):
        mid = 0.5 * (a + b)
        if mid in (a, b):
            break
        if ok(mid):
            a = mid
        else:
            b = mid
    return float(b)


# ---------------------------------------------------------------------------
# Qian weights


@dataclass(frozen=True)
class WeightFunction:
    """Weight a(t) for the Qian-type estimate.

    ``params`` per family: sinh_sq ``[c]`` for ``sinh(c t)^2``; quadratic
    ``[]`` for ``t^2``; power_theta ``[theta]`` for ``t^(2/theta - 1)``;
    tabulated ``[x0..xm, a0..am]`` interpolated by a monotone cubic.
    """

    family: str
    params: tuple = ()
    T: float = 1.0
    _interp: object = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.family not in WEIGHT_FAMILIES:
            raise ConfigurationError(f"unknown weight family {self.family!r}")
        if not self.T > 0:
            raise DomainError(f"horizon T must be positive, got {self.T}")
        need = {"sinh_sq": 1, "quadratic": 0, "power_theta": 1}
        if self.family in need and len(self.params) != need[self.family]:
            raise ConfigurationError(f"{self.family} takes {need[self.family]} parameter(s)")
        if self.family == "sinh_sq" and self.params[0] <= 0:
            raise DomainError("sinh_sq rate must be positive")
        if self.family == "power_theta" and self.params[0] <= 0:
            raise DomainError("power_theta needs theta > 0")
        if self.family == "tabulated":
            xs, ys = _split_knots(self.params, "tabulated")
            object.__setattr__(self, "_interp", PchipInterpolator(xs, ys, extrapolate=False))

    def to_dict(self) -> dict:
        return {"family": self.family, "params": list(self.params), "T": self.T}

    @property
    def exponent(self) -> float:
        return 2.0 / self.params[0] - 1.0

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "sinh_sq":
            return np.sinh(self.params[0] * t) ** 2
        if self.family == "quadratic":
            return t * t
        if self.family == "power_theta":
            with np.errstate(divide="ignore"):
                return t ** self.exponent
        return self._interp(t)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "sinh_sq":
            c = self.params[0]
            return c * np.sinh(2.0 * c * t)
        if self.family == "quadratic":
            return 2.0 * t
        if self.family == "power_theta":
            p = self.exponent
            with np.errstate(divide="ignore"):
                return p * t ** (p - 1.0)
        return self._interp.derivative()(t)

    def ratio_sq(self, t):
        """``a'(t)^2 / a(t)``, in a cancellation-free form where available."""
        t = np.asarray(t, dtype=float)
        if self.family == "sinh_sq":
            c = self.params[0]
            return 4.0 * c * c * np.cosh(c * t) ** 2
        if self.family == "quadratic":
            return np.full_like(t, 4.0)
        if self.family == "power_theta":
            p = self.exponent
            with np.errstate(divide="ignore"):
                return p * p * t ** (p - 2.0)
        return self.deriv(t) ** 2 / self.value(t)

    def integral_closed(self, t) -> tuple[float, float] | None:
        """Closed-form ``(int_0^t a, int_0^t a'^2/a)`` or None if unavailable."""
        if self.family == "sinh_sq":
            c = self.params[0]
            x = c * t
            # sinh(2x)/(4c) - t/2, series for small x
            ia = (x ** 3 / 3 + x ** 5 / 15) / c if x < 1e-3 else (math.sinh(2 * x) / 4 - x / 2) / c
            return ia, 2 * c * x + c * math.sinh(2 * x)
        if self.family == "quadratic":
            return t ** 3 / 3.0, 4.0 * t
        if self.family == "power_theta":
            p = self.exponent
            if p <= 1.0:
                return None
            return t ** (p + 1) / (p + 1), p * p * t ** (p - 1) / (p - 1)
        return None


def integrate_weight(w: WeightFunction, t: float, what: str) -> float:
    """Adaptive quadrature of ``a`` (``what='a'``) or ``a'^2/a`` on ``(0, t]``.

    The interval is split at ``t/2`` so any endpoint singularity at 0 is
    isolated in a single extrapolated (QAGS) panel.
    """
    from .errors import NumericalError

    fn = w.value if what == "a" else w.ratio_sq

    def g(s):
        return float(fn(s))

    total, err_total = 0.0, 0.0
    for a, b in ((0.0, 0.5 * t), (0.5 * t, t)):
        val, err = quad(g, a, b, epsabs=0.0, epsrel=1e-13, limit=500)
        total += val
        err_total += err
    if not math.isfinite(total) or err_total > 1e-9 * max(abs(total), 1e-300):
        raise NumericalError("quadrature did not converge",
                             {"integrand": what, "t": t, "value": total, "error": err_total,
                              "family": w.family})
    return total


@dataclass
class WeightCertificate:
    feasible: bool
    a1: bool
    a2: bool
    a3: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"feasible": self.feasible, "A1": self.a1, "A2": self.a2, "A3": self.a3,
                "details": self.details}


def _tends_to_zero(seq: Sequence[float]) -> bool:
    """Decide ``seq -> 0`` for samples at geometrically shrinking times.

    Either the tail is already negligible against the head, or the
    consecutive ratios have settled below 1 (power-law decay).
    """
    seq = np.abs(np.asarray(seq, dtype=float))
    if not np.all(np.isfinite(seq)):
        return False
    if seq[-1] <= CAUCHY_TOL * max(seq.max(), 1.0):
        return True
    r = seq[-6:] / seq[-7:-1]
    return bool(np.all(r < 1.0 - 1e-6) and np.ptp(r) < 1e-3)


def _integral_converges(increments: Sequence[float], total: float) -> bool:
    """Cauchy test on dyadic panel contributions, with a ratio-test fallback
    for slowly (geometrically) decaying tails."""
    d = np.abs(np.asarray(increments, dtype=float))
    if not np.all(np.isfinite(d)):
        return False
    if d[-1] <= CAUCHY_TOL * max(abs(total), 1.0):
        return True
    r = d[-6:] / d[-7:-1]
    return bool(np.all(r < 1.0 - 1e-6) and np.ptp(r) < 1e-3)


def validate_weight(w: WeightFunction, n_grid: int = B1_GRID) -> WeightCertificate:
    """Numerically check (A1)-(A3) for ``w`` on ``(0, T]``."""
    T = w.T
    s = np.linspace(0.0, T, n_grid + 1)[1:]
    with np.errstate(all="ignore"):
        a, da = w.value(s), w.deriv(s)
    a1 = bool(np.all(np.isfinite(a)) and np.all(a > 0) and np.all(da > 0))

    ts = T * 2.0 ** -np.arange(LIMIT_LEVELS + 1)
    with np.errstate(all="ignore"):
        av, dv = w.value(ts), w.deriv(ts)
        quot = av / dv
    a2 = bool(_tends_to_zero(av) and np.all(dv > 0) and _tends_to_zero(quot))

    a3 = False
    increments = []
    total = 0.0
    if a1:
        try:
            with np.errstate(all="ignore"):
                for j in range(LIMIT_LEVELS):
                    val, _ = quad(lambda x: float(w.ratio_sq(x)), ts[j + 1], ts[j],
                                  epsabs=0.0, epsrel=1e-12, limit=200)
                    increments.append(val)
                    total += val
            a3 = _integral_converges(increments, total)
        except (ValueError, ZeroDivisionError, FloatingPointError):
            a3 = False
    details = {"a2_last_value": float(av[-1]), "a2_last_ratio": float(quot[-1]),
               "a3_partial_integral": total,
               "a3_last_increment": float(increments[-1]) if increments else None}
    return WeightCertificate(feasible=a1 and a2 and a3, a1=a1, a2=a2, a3=a3, details=details)
