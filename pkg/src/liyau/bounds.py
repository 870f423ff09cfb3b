"""Catalog of Li-Yau type gradient estimates.

Every estimate is held in beta-form

    beta(t) * |grad f|^2 - f_t <= B(t),        f = log u,

estimates stated as ``|grad f|^2 - alpha f_t <= C`` are divided through by
alpha on ingestion.  Besides the classical closed forms the catalog holds
the time-dependent bounds psi1 / psi2 built from a parameter curve, the
Qian bound for a weight a(t), and helpers to compare families of estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._numerics import golden_section, running_extremum, sign_change_roots
from .errors import ConfigurationError, DomainError, PreconditionError
from .paramfun import (ParamFunction, WeightFunction, integrate_weight,
                       validate_beta, validate_weight)

MIN_T = 1e-10
RUNNING_GRID = 2048
REFINE_TOL = 1e-10

ESTIMATE_IDS = ("li_yau", "davies_alpha", "davies_beta", "hamilton", "hamilton_theta",
                "li_xu", "li_xu_linear", "qian_general", "qian_theta", "psi1", "psi2",
                "cor12", "cor14", "cor15")


def _check_t(t):
    if not (t >= MIN_T and math.isfinite(t)):
        raise DomainError(f"t must be >= {MIN_T}, got {t}")


def _check_nk(n, k):
    if int(n) != n or n < 2:
        raise DomainError(f"dimension n must be an integer >= 2, got {n}")
    if not (k >= 0 and math.isfinite(k)):
        raise DomainError(f"Ricci lower-bound constant k must be >= 0, got {k}")


# ---------------------------------------------------------------------------
# elementary special functions


def _xcoth(x):
    """x * coth(x) with the removable point x = 0."""
    if x < 1e-4:
        return 1.0 + x * x / 3.0 - x ** 4 / 45.0
    return x / math.tanh(x)


def _li_xu_excess(x):
    """coth(x) - x / sinh(x)^2, the Li-Xu coefficient minus 1."""
    if x < 1e-3:
        return 2.0 * x / 3.0 - 4.0 * x ** 3 / 45.0
    e = math.exp(-2.0 * x)
    return 1.0 / math.tanh(x) - 4.0 * x * e / math.expm1(-2.0 * x) ** 2


def _k_over_one_minus_exp(k, theta, t):
    """k / (1 - exp(-2 theta k t)), equal to 1/(2 theta t) at k = 0."""
    x = 2.0 * theta * k * t
    if x == 0.0:
        return 1.0 / (2.0 * theta * t)
    return k / -math.expm1(-x)


# ---------------------------------------------------------------------------
# estimate records


@dataclass(frozen=True)
class Estimate:
    """A normalised estimate ``grad_coeff(t) |grad f|^2 - f_t <= bound(t)``."""

    name: str
    n: int
    k: float
    params: dict
    coeff_fn: Callable[[float], float] = field(repr=False)
    bound_fn: Callable[[float], float] = field(repr=False)
    form_note: str = "beta-form"
    alpha_fn: Callable[[float], tuple] | None = field(default=None, repr=False)
    t_max: float = math.inf

    def _check(self, t):
        _check_t(t)
        if t > self.t_max * (1 + 1e-12):
            raise DomainError(f"{self.name}: t={t} beyond horizon T={self.t_max}")

    def grad_coeff(self, t: float) -> float:
        self._check(t)
        return float(self.coeff_fn(t))

    def bound(self, t: float) -> float:
        self._check(t)
        return float(self.bound_fn(t))

    def evaluate(self, t: float) -> tuple[float, float]:
        self._check(t)
        return float(self.coeff_fn(t)), float(self.bound_fn(t))

    def alpha_form(self, t: float) -> tuple[float, float]:
        """``(alpha, C)`` for estimates stated in alpha-form."""
        if self.alpha_fn is None:
            raise ConfigurationError(f"{self.name} is stated in beta-form")
        self._check(t)
        return self.alpha_fn(t)

    def scaled(self, factor: float) -> "Estimate":
        """Copy with the right-hand side multiplied by ``factor`` (mutation testing)."""
        bf = self.bound_fn
        return Estimate(f"{self.name}*{factor:g}", self.n, self.k,
                        dict(self.params, rhs_scale=factor), self.coeff_fn,
                        lambda t: factor * bf(t), self.form_note, None, self.t_max)

    def describe(self) -> dict:
        out = {}
        for key, v in self.params.items():
            out[key] = v.to_dict() if hasattr(v, "to_dict") else v
        return {"name": self.name, "n": self.n, "k": self.k, "params": out,
                "form_note": self.form_note}


def _alpha_estimate(name, n, k, params, alpha_c, note, t_max=math.inf):
    def coeff(t):
        return 1.0 / alpha_c(t)[0]

    def bound(t):
        a, c = alpha_c(t)
        return c / a

    return Estimate(name, n, k, params, coeff, bound,
                    f"alpha-form |grad f|^2 - alpha f_t <= C ({note}); stored as beta=1/alpha, B=C/alpha",
                    alpha_c, t_max)


def _require(cond, msg):
    if not cond:
        raise DomainError(msg)


def _as_beta(obj, k):
    if isinstance(obj, ParamFunction):
        return obj
    if isinstance(obj, dict):
        return ParamFunction(obj["family"], tuple(obj.get("params", ())),
                             float(obj.get("T", 1.0)), float(obj.get("k", k)))
    raise ConfigurationError("beta_fn must be a ParamFunction or a {family, params, T} mapping")


def _as_weight(obj):
    if isinstance(obj, WeightFunction):
        return obj
    if isinstance(obj, dict):
        return WeightFunction(obj["family"], tuple(obj.get("params", ())), float(obj.get("T", 1.0)))
    raise ConfigurationError("weight must be a WeightFunction or a {family, params, T} mapping")


def get_estimate(name: str, n: int, k: float, **params) -> Estimate:
    """Build a catalog estimate by identifier.

    Parameters used per identifier: ``alpha`` (li_yau, davies_alpha),
    ``beta`` (davies_beta, cor12, cor14, cor15), ``theta`` (hamilton_theta,
    qian_theta), ``beta_fn`` (psi1, psi2), ``weight`` and ``method``
    (qian_general).
    """
    _check_nk(n, k)
    n = int(n)
    k = float(k)
    if name not in ESTIMATE_IDS:
        raise ConfigurationError(f"unknown estimate id {name!r}; known: {', '.join(ESTIMATE_IDS)}")

    if name in ("li_yau", "davies_alpha"):
        alpha = float(params.get("alpha", 2.0))
        _require(alpha > 1.0, f"{name} requires alpha > 1, got {alpha}")
        denom = 2.0 if name == "li_yau" else 4.0

        def ac(t):
            return alpha, n * alpha ** 2 / (2 * t) + n * alpha ** 2 * k / (denom * (alpha - 1))
        return _alpha_estimate(name, n, k, {"alpha": alpha}, ac, name)

    if name == "davies_beta":
        beta = float(params.get("beta", 0.5))
        _require(0.0 < beta < 1.0, f"davies_beta requires 0 < beta < 1, got {beta}")
        return Estimate(name, n, k, {"beta": beta}, lambda t: beta,
                        lambda t: n / (2 * beta * t) + n * k / (4 * (1 - beta)))

    if name == "hamilton":
        def ac(t):
            return math.exp(2 * k * t), math.exp(4 * k * t) * n / (2 * t)
        est = _alpha_estimate(name, n, k, {}, ac, "alpha = exp(2kt)")
        # avoid overflow of the alpha-form product for large kt
        return Estimate(name, n, k, {}, lambda t: math.exp(-2 * k * t),
                        lambda t: math.exp(2 * k * t) * n / (2 * t), est.form_note, ac)

    if name == "hamilton_theta":
        theta = float(params.get("theta", 1.0))
        _require(0.0 < theta <= 1.0, f"hamilton_theta requires 0 < theta <= 1, got {theta}")

        def bound(t):
            return (n / (2 * t) * math.exp(2 * theta * k * t)
                    + n * (1 - theta) / 4 * _k_over_one_minus_exp(k, theta, t))
        return Estimate(name, n, k, {"theta": theta}, lambda t: math.exp(-2 * theta * k * t), bound)

    if name == "li_xu":
        def ac(t):
            x = k * t
            return 1.0 + _li_xu_excess(x), n / (2 * t) * _xcoth(x) + n * k / 2
        return _alpha_estimate(name, n, k, {}, ac, "hyperbolic coefficient")

    if name == "li_xu_linear":
        def ac(t):
            return 1 + 2 * k * t / 3, n / (2 * t) + n * k / 2 * (1 + k * t / 3)
        return _alpha_estimate(name, n, k, {}, ac, "linearised")

    if name == "qian_theta":
        theta = float(params.get("theta", 2.0 / 3.0))
        _require(0.0 < theta < 1.0, f"qian_theta requires 0 < theta < 1, got {theta}")

        def ac(t):
            return (1 + theta * k * t,
                    (2 - theta) ** 2 * n / (16 * theta * (1 - theta) * t)
                    + n * k * k * theta * t / 4 + n * k / 2)
        return _alpha_estimate(name, n, k, {"theta": theta}, ac, "theta family")

    if name == "qian_general":
        w = _as_weight(params.get("weight", {"family": "quadratic", "params": [], "T": 10.0}))
        method = params.get("method", "closed")
        cert = validate_weight(w)
        if not cert.feasible:
            raise PreconditionError(f"weight {w.family}{w.params} fails (A1)-(A3): {cert.to_dict()}")

        def ac(t):
            return eval_qian_general(w, t, n, k, method=method, form="alpha", check=False)
        return _alpha_estimate(name, n, k, {"weight": w, "method": method}, ac,
                               "weighted", t_max=w.T)

    if name in ("psi1", "psi2"):
        beta_fn = _as_beta(params.get("beta_fn"), k)
        if beta_fn.k != k:
            beta_fn = ParamFunction(beta_fn.family, beta_fn.params, beta_fn.T, k)
        cert = validate_beta(beta_fn)
        if not cert.feasible:
            raise PreconditionError(f"beta curve {beta_fn.family}{beta_fn.params} fails (B1)/(B2): "
                                    + "; ".join(cert.notes))
        fn = psi1 if name == "psi1" else psi2
        return Estimate(name, n, k, {"beta_fn": beta_fn}, lambda t: float(beta_fn.value(t)),
                        lambda t: fn(beta_fn, t, n, k, check=False), t_max=beta_fn.T)

    # cor12 / cor14 / cor15
    from .varopt import corollary_bound

    beta = float(params.get("beta", 0.5))
    _require(k > 0.0, f"{name} assumes k > 0")
    _require(0.0 < beta < 1.0, f"{name} requires 0 < beta < 1, got {beta}")
    return Estimate(name, n, k, {"beta": beta}, lambda t: beta,
                    lambda t: corollary_bound(name, beta, t, n, k))


def eval_classical(id: str, params: dict, t: float, n: int, k: float,
                   form: str = "beta") -> tuple[float, float]:
    """Evaluate a catalog estimate at ``t``; returns ``(grad_coeff, bound)``.

    ``form='alpha'`` returns the original ``(alpha, C)`` pair for the
    estimates that are stated in alpha-form.
    """
    est = get_estimate(id, n, k, **(params or {}))
    if form == "alpha":
        return est.alpha_form(t)
    return est.evaluate(t)


def eval_qian_general(w: WeightFunction, t: float, n: int, k: float,
                      method: str = "quadrature", form: str = "beta",
                      check: bool = True) -> tuple[float, float]:
    """Qian's bound for weight ``w``.

    alpha = 1 + (2k/a) int a,  C = nk/2 + (n k^2 / 2a) int a + (n / 8a) int a'^2/a,
    integrals over ``(0, t]``; ``method`` is ``'quadrature'`` or ``'closed'``.
    """
    _check_t(t)
    _check_nk(n, k)
    if t > w.T * (1 + 1e-12):
        raise DomainError(f"t={t} beyond weight horizon T={w.T}")
    if check:
        cert = validate_weight(w)
        if not cert.feasible:
            raise PreconditionError(f"weight fails (A1)-(A3): {cert.to_dict()}")
    closed = w.integral_closed(t) if method == "closed" else None
    if method == "closed" and closed is None:
        method = "quadrature"
    if method == "quadrature":
        ia = integrate_weight(w, t, "a")
        isq = integrate_weight(w, t, "ratio_sq")
    elif method == "closed":
        ia, isq = closed
    else:
        raise ConfigurationError(f"unknown method {method!r}")
    a = float(w.value(t))
    alpha = 1.0 + 2.0 * k * ia / a
    c = n * k / 2.0 + n * k * k * ia / (2.0 * a) + n * isq / (8.0 * a)
    if form == "alpha":
        return alpha, c
    return 1.0 / alpha, c / alpha


# ---------------------------------------------------------------------------
# psi1, sigma, lambda, psi2


def _require_feasible(beta, t, check):
    _check_t(t)
    if t > beta.T * (1 + 1e-12):
        raise DomainError(f"t={t} beyond the curve's horizon T={beta.T}")
    if check:
        cert = validate_beta(beta)
        if not cert.feasible:
            raise PreconditionError("beta curve fails (B1)/(B2): " + "; ".join(cert.notes))


def _kinks(beta, t, k):
    """Breakpoints of s -> (2k beta + beta')_+ on [0, t], plus curve knots."""
    def h(s):
        return 2.0 * k * beta.value(s) + beta.deriv(s)
    grid = np.linspace(0.0, t, RUNNING_GRID + 1)
    pts = [b for b in beta.breakpoints() if b < t]
    if beta.family != "constant":
        pts += sign_change_roots(h, grid)
    return sorted(pts)


def _limit_at_zero(beta, k, scale):
    """Value at s = 0 of (2k beta + beta')_+ s / (scale (1 - beta))."""
    b0 = float(beta.value(0.0))
    if b0 < 1.0:
        return 0.0
    d0 = float(beta.deriv(0.0))
    return max(2.0 * k + d0, 0.0) / (-scale * d0)


def _ratio_term(beta, k, s, scale, deriv, with_inv_beta):
    b = beta.value(s)
    om = beta.one_minus(s)
    pos = np.maximum(2.0 * k * b + deriv(s), 0.0)
    denom = scale * om * (b if with_inv_beta else 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        term = pos * s / denom
    zero = s == 0.0
    if np.any(zero):
        term = np.where(zero, _limit_at_zero(beta, k, scale), term)
    return b, term


def psi1_integrand(beta: ParamFunction, s, k: float, left: bool = False):
    """``1/beta + (2k beta + beta')_+ s / (4 beta (1 - beta))`` at ``s``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    deriv = beta.deriv_left if left else beta.deriv
    b, term = _ratio_term(beta, k, s, 4.0, deriv, True)
    return 1.0 / b + term


def _sigma_integrand(beta, s, k, left=False):
    s = np.atleast_1d(np.asarray(s, dtype=float))
    deriv = beta.deriv_left if left else beta.deriv
    return _ratio_term(beta, k, s, 1.0, deriv, False)[1]


def _running_max(beta, g, t, k):
    kinks = _kinks(beta, t, k)
    val, arg = running_extremum(lambda s: g(s, False), t, kinks, mode="max",
                                n_grid=RUNNING_GRID, tol=REFINE_TOL)
    knots = [b for b in beta.breakpoints() if 0.0 < b <= t]
    if knots:
        left = g(np.array(knots), True)
        j = int(np.argmax(left))
        if left[j] > val:
            val, arg = float(left[j]), knots[j]
    return val, arg


def psi1(beta: ParamFunction, t: float, n: int, k: float, check: bool = True) -> float:
    """``(n / 2t) * max_{s in [0,t]} [1/beta + (2k beta + beta')_+ s / (4 beta (1 - beta))]``."""
    _require_feasible(beta, t, check)
    val, _ = _running_max(beta, lambda s, left: psi1_integrand(beta, s, k, left), t, k)
    return n / (2.0 * t) * val


@dataclass(frozen=True)
class SigmaLambda:
    sigma: float
    lam: float
    sigma_at: float = 0.0
    lam_at: float = 0.0

    def to_dict(self) -> dict:
        return {"sigma": self.sigma, "lambda": self.lam,
                "sigma_at": self.sigma_at, "lambda_at": self.lam_at}


def sigma_lambda(beta: ParamFunction, t: float, k: float, check: bool = True) -> SigmaLambda:
    """Running max of ``(2k beta + beta')_+ s / (1 - beta)`` and running inf of beta."""
    _require_feasible(beta, t, check)
    sig, s_at = _running_max(beta, lambda s, left: _sigma_integrand(beta, s, k, left), t, k)
    lam, l_at = running_extremum(lambda s: beta.value(s), t, beta.breakpoints(), mode="min",
                                 n_grid=RUNNING_GRID, tol=REFINE_TOL)
    return SigmaLambda(max(sig, 0.0), lam, s_at, l_at)


def psi2_from_sigma(sigma: float, lam: float, t: float, n: int) -> float:
    if sigma < 2.0:
        return n / (2.0 * lam * t)
    return n * sigma * sigma / (8.0 * (sigma - 1.0) * lam * t)


def psi2(beta: ParamFunction, t: float, n: int, k: float, check: bool = True) -> float:
    """Piecewise bound driven by sigma(t) and lambda(t); sigma = 2 uses the second branch."""
    sl = sigma_lambda(beta, t, k, check)
    return psi2_from_sigma(sl.sigma, sl.lam, t, n)


# ---------------------------------------------------------------------------
# Davies minimiser and the h(Q) lemma


def beta_m(t: float, k: float) -> float:
    """Minimiser over beta of ``n/(2 beta t) + n k / (4 (1 - beta))``."""
    _check_t(t)
    if not k > 0:
        raise DomainError("beta_m needs k > 0 (the minimiser degenerates to beta = 1)")
    return 1.0 / (1.0 + math.sqrt(k * t / 2.0))


def davies_grid_argmin(t: float, k: float, n: int, num: int = 100_000) -> float:
    """Brute-force argmin of the Davies right-hand side on a uniform beta grid."""
    b = np.linspace(0.0, 1.0, num + 2)[1:-1]
    rhs = n / (2 * b * t) + n * k / (4 * (1 - b))
    return float(b[np.argmin(rhs)])


def h_value(a, b, Q, c=1.0):
    """``(a Q + c) / (1 + b Q)^2``."""
    return (a * Q + c) / (1.0 + b * Q) ** 2


def max_h(a: float, b: float) -> float:
    """Maximum over ``Q >= 0`` of ``(a Q + 1) / (1 + b Q)^2``."""
    if not (a > 0 and b > 0):
        raise DomainError(f"max_h needs a > 0 and b > 0, got a={a}, b={b}")
    if a / b < 2.0:
        return 1.0
    return a * a / (4.0 * (a - b) * b)


# ---------------------------------------------------------------------------
# comparing estimates


@dataclass(frozen=True)
class EstimateFamily:
    """A one-parameter family of estimates, the parameter ranging over ``(lo, hi)``."""

    label: str
    builder: Callable[[float], Estimate]
    lo: float
    hi: float
    open_ends: bool = True

    @classmethod
    def of(cls, name, n, k, param="beta", lo=0.0, hi=1.0, open_ends=True, **fixed):
        return cls(name, lambda p: get_estimate(name, n, k, **{param: p}, **fixed), lo, hi, open_ends)

    @classmethod
    def single(cls, est: Estimate):
        return cls(est.name, lambda p: est, 0.0, 0.0, False)

    def samples(self, num):
        if self.lo == self.hi:
            return np.array([self.lo])
        eps = 1e-12 if self.open_ends else 0.0
        u = np.linspace(eps, 1.0 - eps, num)
        return self.lo + (self.hi - self.lo) * u

    def line(self, p, t):
        return self.builder(p).evaluate(t)


@dataclass
class PiecewiseLinear:
    """Upper envelope of lines ``slope * X + intercept`` with labels."""

    breaks: np.ndarray
    slopes: np.ndarray
    intercepts: np.ndarray
    labels: list

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        i = np.searchsorted(self.breaks, X, side="right")
        return self.slopes[i] * X + self.intercepts[i]

    def to_dict(self) -> dict:
        return {"breaks": self.breaks.tolist(), "slopes": self.slopes.tolist(),
                "intercepts": self.intercepts.tolist(), "labels": list(self.labels)}


def upper_envelope(slopes, intercepts, labels) -> PiecewiseLinear:
    """Upper envelope of a set of lines (convex hull trick)."""
    order = np.lexsort((intercepts, slopes))
    hull = []
    for i in order:
        m, c = slopes[i], intercepts[i]
        if hull and slopes[hull[-1]] == m:
            hull.pop()
        while len(hull) >= 2:
            j, l = hull[-2], hull[-1]
            # line l is useless if i overtakes j no later than l does
            x_jl = (intercepts[j] - intercepts[l]) / (slopes[l] - slopes[j])
            x_ji = (intercepts[j] - c) / (m - slopes[j])
            if x_ji <= x_jl:
                hull.pop()
            else:
                break
        hull.append(i)
    hs = np.array([slopes[i] for i in hull])
    hc = np.array([intercepts[i] for i in hull])
    br = (hc[:-1] - hc[1:]) / (hs[1:] - hs[:-1]) if len(hull) > 1 else np.array([])
    return PiecewiseLinear(br, hs, hc, [labels[i] for i in hull])


@dataclass
class EnvelopeResult:
    t: float
    X: np.ndarray
    values: np.ndarray
    labels: list
    params: np.ndarray
    hull: PiecewiseLinear

    def to_dict(self) -> dict:
        return {"t": self.t, "X": self.X.tolist(), "values": self.values.tolist(),
                "labels": list(self.labels), "params": self.params.tolist(),
                "hull": self.hull.to_dict(), "supremum": True}


def envelope(families: Sequence, t: float, X_grid, num: int = 2001) -> EnvelopeResult:
    """Sup over all members of ``beta(t) X - B(t)``: the strongest lower bound on f_t.

    ``families`` holds :class:`EstimateFamily` or plain :class:`Estimate`
    entries.  Members are sampled, their lines enveloped, and the winning
    parameter at every X is refined by golden section.  For open parameter
    ranges the reported value is a supremum approached from inside.
    """
    _check_t(t)
    fams = [f if isinstance(f, EstimateFamily) else EstimateFamily.single(f) for f in families]
    if not fams:
        raise DomainError("envelope of an empty family")
    X = np.asarray(X_grid, dtype=float)
    slopes, inter, labels, owner = [], [], [], []
    for fi, fam in enumerate(fams):
        for p in fam.samples(num):
            b, B = fam.line(p, t)
            slopes.append(b)
            inter.append(-B)
            labels.append((fam.label, float(p)))
            owner.append(fi)
    slopes, inter = np.asarray(slopes), np.asarray(inter)
    hull = upper_envelope(slopes, inter, labels)

    vals = np.empty_like(X)
    best_lab, best_par = [], np.empty_like(X)
    lines = slopes[None, :] * X[:, None] + inter[None, :]
    for j, x in enumerate(X):
        i = int(np.argmax(lines[j]))
        fam = fams[owner[i]]
        v, p = float(lines[j, i]), labels[i][1]
        if fam.lo != fam.hi:
            ps = fam.samples(num)
            q = int(np.searchsorted(ps, p))
            lo, hi = ps[max(q - 1, 0)], ps[min(q + 1, len(ps) - 1)]

            def line_at(z, x=x, fam=fam):
                b, B = fam.line(z, t)
                return b * x - B
            pz, vz = golden_section(line_at, lo, hi, tol=REFINE_TOL, maximize=True)
            if vz > v:
                v, p = vz, pz
        vals[j] = v
        best_par[j] = p
        best_lab.append(fam.label)
    return EnvelopeResult(t, X, vals, best_lab, best_par, hull)


@dataclass
class DominanceReport:
    a: str
    b: str
    verdict: str
    max_diff: float
    min_diff: float
    witness_a_smaller: tuple | None
    witness_b_smaller: tuple | None
    t_grid: np.ndarray = field(repr=False)
    param_grid: np.ndarray = field(repr=False)
    diffs: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "verdict": self.verdict,
                "max_diff": self.max_diff, "min_diff": self.min_diff,
                "witness_a_smaller": self.witness_a_smaller,
                "witness_b_smaller": self.witness_b_smaller}


def dominates(a: str, b: str, t_grid, param_grid, n: int, k: float,
              rel_tol: float = 1e-12, **fixed) -> DominanceReport:
    """Sign of ``B_a - B_b`` over a (t, shared beta) grid.

    Verdict is ``"a <= b everywhere"``, ``"b <= a everywhere"`` or
    ``"crossover"``; witnesses are the (t, beta, B_a - B_b) points of largest
    advantage for each side.
    """
    ts = np.asarray(t_grid, dtype=float)
    ps = np.asarray(param_grid, dtype=float)
    diffs = np.empty((len(ps), len(ts)))
    scale = np.empty_like(diffs)
    for i, p in enumerate(ps):
        try:
            ea = get_estimate(a, n, k, beta=p, **fixed)
            eb = get_estimate(b, n, k, beta=p, **fixed)
        except DomainError as exc:
            raise DomainError(f"{a} and {b} are not both valid at beta={p}: {exc}") from exc
        for j, t in enumerate(ts):
            Ba, Bb = ea.bound(t), eb.bound(t)
            diffs[i, j] = Ba - Bb
            scale[i, j] = max(abs(Ba), abs(Bb))
    tol = rel_tol * scale
    a_le = bool(np.all(diffs <= tol))
    b_le = bool(np.all(diffs >= -tol))
    verdict = "a <= b everywhere" if a_le else "b <= a everywhere" if b_le else "crossover"

    def witness(idx):
        i, j = np.unravel_index(idx, diffs.shape)
        return (float(ts[j]), float(ps[i]), float(diffs[i, j]))
    wa = witness(int(np.argmin(diffs))) if np.any(diffs < -tol) else None
    wb = witness(int(np.argmax(diffs))) if np.any(diffs > tol) else None
    return DominanceReport(a, b, verdict, float(diffs.max()), float(diffs.min()), wa, wb,
                           ts, ps, diffs)
