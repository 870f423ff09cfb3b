"""Small numerical kernels: golden-section search and certified running extrema."""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np
from scipy.optimize import bisect

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-10, maximize: bool = False,
                   max_iter: int = 200) -> tuple[float, float]:
    """Bounded golden-section search on ``[lo, hi]``.

    Returns ``(x, f(x))`` for the best point seen, endpoints included, so the
    result is never worse than either end of the bracket.
    """
    sign = -1.0 if maximize else 1.0

    def obj(x):
        return sign * f(x)

    a, b = float(lo), float(hi)
    best_x, best_v = a, obj(a)
    vb = obj(b)
    if vb < best_v:
        best_x, best_v = b, vb
    if b - a <= tol:
        return best_x, sign * best_v
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = obj(d)
    for x, v in ((c, fc), (d, fd)):
        if v < best_v:
            best_x, best_v = x, v
    return best_x, sign * best_v


def sign_change_roots(h: Callable[[np.ndarray], np.ndarray], grid: np.ndarray,
                      xtol: float = 1e-14) -> list[float]:
    """Locate the roots of ``h`` bracketed by consecutive grid nodes."""
    vals = np.asarray(h(grid), dtype=float)
    roots = []
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    for i in idx:
        a, b = float(grid[i]), float(grid[i + 1])
        roots.append(bisect(lambda x: float(h(np.array([x]))[0]), a, b,
                            xtol=xtol, maxiter=200))
    return roots


def running_extremum(g: Callable[[np.ndarray], np.ndarray], t: float,
                     breakpoints: Iterable[float] = (), mode: str = "max",
                     n_grid: int = 2048, tol: float = 1e-10,
                     max_candidates: int = 16) -> tuple[float, float]:
    """Certified max (or min) of ``g`` over ``[0, t]``.

    Dense uniform sampling with the supplied breakpoints inserted, followed
    by golden-section refinement inside the bracket of every local extremum
    candidate. Returns ``(value, abscissa)``.
    """
    sign = 1.0 if mode == "max" else -1.0
    s = np.linspace(0.0, t, n_grid + 1)
    extra = [b for b in breakpoints if 0.0 < b < t]
    if extra:
        s = np.unique(np.concatenate([s, extra]))
    v = sign * np.asarray(g(s), dtype=float)
    if not np.all(np.isfinite(v)):
        bad = s[~np.isfinite(v)]
        raise FloatingPointError(f"non-finite integrand at s={bad[:3].tolist()}")
    best_i = int(np.argmax(v))
    best_s, best_v = float(s[best_i]), float(v[best_i])

    interior = np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:]))[0] + 1
    if interior.size > max_candidates:
        interior = interior[np.argsort(-v[interior], kind="stable")[:max_candidates]]
    for i in sorted(interior.tolist()):
        x, fx = golden_section(lambda z: sign * float(g(np.array([z]))[0]),
                               s[i - 1], s[i + 1], tol=tol, maximize=True)
        if fx > best_v:
            best_s, best_v = x, fx
    return sign * best_v, best_s
