"""Independent feasibility oracle for coexistence.

Decides whether some ``a`` makes all of ``a, e - a, f - a, 1 - e - f + a``
positive by maximizing the smallest eigenvalue over the four, using nothing
but eigenvalues ``c0 -+ |c|`` of 2x2 hermitian matrices.

For a fixed spatial part of ``a`` the optimal ``a0`` is available in closed
form (two eigenvalue bounds increase with ``a0``, two decrease), which leaves a
concave function of three variables.  Its partial maxima are again concave,
so nested golden-section searches over a box that provably contains the
maximizer find the global maximum; no gradients are used.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit

from .exceptions import BudgetExhaustedWarning
from .minkowski import as_vec

DEFAULT_TOL = 1e-7
DEFAULT_BUDGET = 100_000
# the maximizer has |a| <= 1: the objective is at most (1 - 2|a|)/2 and at least -1/2 at a = 0
BOX_HALF_WIDTH = 1.5
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def margin(a, e, f):
    """Smallest eigenvalue over ``{a, e - a, f - a, 1 - e - f + a}``."""
    a, e, f = np.broadcast_arrays(as_vec(a), as_vec(e), as_vec(f))
    one = np.array([1.0, 0.0, 0.0, 0.0])
    ops = np.stack([a, e - a, f - a, one - e - f + a])
    lam_min = ops[..., 0] - np.linalg.norm(ops[..., 1:], axis=-1)
    return np.min(lam_min, axis=0)


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    best_margin: float
    argmax_a: np.ndarray
    iterations: int
    tol: float
    exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "best_margin": self.best_margin,
            "argmax_a": [float(x) for x in self.argmax_a],
            "iterations": self.iterations,
            "tol": self.tol,
            "exhausted": self.exhausted,
        }


@njit(cache=True)
def _value(x, y, z, P, e0, f0):
    """Reduced objective at spatial point (x, y, z) and the optimal ``a0``.

    ``P`` holds the spatial parts of e, f and e + f.  Two eigenvalue bounds
    grow with ``a0`` (of ``a`` and ``1 - e - f + a``), two shrink (of ``e - a``,
    ``f - a``); the best ``a0`` balances the tighter of each kind.
    """
    ra = math.sqrt(x * x + y * y + z * z)
    re = math.sqrt((x - P[0, 0]) ** 2 + (y - P[0, 1]) ** 2 + (z - P[0, 2]) ** 2)
    rf = math.sqrt((x - P[1, 0]) ** 2 + (y - P[1, 1]) ** 2 + (z - P[1, 2]) ** 2)
    rs = math.sqrt((x - P[2, 0]) ** 2 + (y - P[2, 1]) ** 2 + (z - P[2, 2]) ** 2)
    alpha = min(-ra, 1.0 - e0 - f0 - rs)
    beta = min(e0 - re, f0 - rf)
    return 0.5 * (alpha + beta), 0.5 * (beta - alpha)


@njit(cache=True)
def _over_z(x, y, P, e0, f0, lo, hi, iters):
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    v1, b1 = _value(x, y, x1, P, e0, f0)
    v2, b2 = _value(x, y, x2, P, e0, f0)
    for _ in range(iters):
        if v1 >= v2:
            hi = x2
            x2, v2, b2 = x1, v1, b1
            x1 = hi - _INVPHI * (hi - lo)
            v1, b1 = _value(x, y, x1, P, e0, f0)
        else:
            lo = x1
            x1, v1, b1 = x2, v2, b2
            x2 = lo + _INVPHI * (hi - lo)
            v2, b2 = _value(x, y, x2, P, e0, f0)
    if v1 >= v2:
        return v1, x1, b1
    return v2, x2, b2


@njit(cache=True)
def _over_y(x, P, e0, f0, c, w, iters):
    lo = c[1] - w
    hi = c[1] + w
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    v1, z1, b1 = _over_z(x, x1, P, e0, f0, c[2] - w, c[2] + w, iters)
    v2, z2, b2 = _over_z(x, x2, P, e0, f0, c[2] - w, c[2] + w, iters)
    for _ in range(iters):
        if v1 >= v2:
            hi = x2
            x2, v2, z2, b2 = x1, v1, z1, b1
            x1 = hi - _INVPHI * (hi - lo)
            v1, z1, b1 = _over_z(x, x1, P, e0, f0, c[2] - w, c[2] + w, iters)
        else:
            lo = x1
            x1, v1, z1, b1 = x2, v2, z2, b2
            x2 = lo + _INVPHI * (hi - lo)
            v2, z2, b2 = _over_z(x, x2, P, e0, f0, c[2] - w, c[2] + w, iters)
    if v1 >= v2:
        return v1, x1, z1, b1
    return v2, x2, z2, b2


@njit(cache=True)
def _search(P, e0, f0, c, w, iters):
    """Nested golden-section maximization; returns ``(a0, x, y, z)``."""
    lo = c[0] - w
    hi = c[0] + w
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    v1, y1, z1, b1 = _over_y(x1, P, e0, f0, c, w, iters)
    v2, y2, z2, b2 = _over_y(x2, P, e0, f0, c, w, iters)
    for _ in range(iters):
        if v1 >= v2:
            hi = x2
            x2, v2, y2, z2, b2 = x1, v1, y1, z1, b1
            x1 = hi - _INVPHI * (hi - lo)
            v1, y1, z1, b1 = _over_y(x1, P, e0, f0, c, w, iters)
        else:
            lo = x1
            x1, v1, y1, z1, b1 = x2, v2, y2, z2, b2
            x2 = lo + _INVPHI * (hi - lo)
            v2, y2, z2, b2 = _over_y(x2, P, e0, f0, c, w, iters)
    if v1 >= v2:
        return b1, x1, y1, z1
    return b2, x2, y2, z2


@njit(cache=True)
def _search_batch(E, F, c, w, iters):
    n = E.shape[0]
    out = np.empty((n, 4))
    P = np.empty((3, 3))
    for i in range(n):
        for k in range(3):
            P[0, k] = E[i, k + 1]
            P[1, k] = F[i, k + 1]
            P[2, k] = E[i, k + 1] + F[i, k + 1]
        a0, x, y, z = _search(P, E[i, 0], F[i, 0], c, w, iters)
        out[i, 0] = a0
        out[i, 1] = x
        out[i, 2] = y
        out[i, 3] = z
    return out


@njit(cache=True)
def _seed_points(E, F):
    """Elementary candidates a = 0, e, f, (e+f)/2, e+f-1, each with its best ``a0``."""
    n = E.shape[0]
    out = np.empty((5, n, 4))
    P = np.empty((3, 3))
    for i in range(n):
        for k in range(3):
            P[0, k] = E[i, k + 1]
            P[1, k] = F[i, k + 1]
            P[2, k] = E[i, k + 1] + F[i, k + 1]
        for j in range(5):
            for k in range(3):
                if j == 0:
                    s = 0.0
                elif j == 1:
                    s = P[0, k]
                elif j == 2:
                    s = P[1, k]
                elif j == 3:
                    s = 0.5 * P[2, k]
                else:
                    s = P[2, k]
                out[j, i, k + 1] = s
            _, out[j, i, 0] = _value(out[j, i, 1], out[j, i, 2], out[j, i, 3], P, E[i, 0], F[i, 0])
    return out


def _levels(tol, budget, width):
    """Golden iterations per coordinate; each level costs ``iters + 2`` evaluations."""
    need = max(0, math.ceil(math.log((tol / 16.0) / width) / math.log(_INVPHI)))
    affordable = 0
    while (affordable + 3) ** 3 <= budget:
        affordable += 1
    return min(need, affordable), need > affordable


def solve_batch(E, F, tol: float = DEFAULT_TOL, budget: int = DEFAULT_BUDGET, center=None):
    """Vectorized :func:`solve`.

    Returns a dict of arrays: ``feasible``, ``best_margin``, ``argmax_a``
    (shape ``(n, 4)``), plus scalars ``iterations`` (margin evaluations per
    pair) and ``exhausted``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    E = np.ascontiguousarray(np.atleast_2d(as_vec(E)))
    F = np.ascontiguousarray(np.atleast_2d(as_vec(F)))
    c = np.zeros(3) if center is None else np.asarray(center, dtype=float).reshape(3)
    iters, exhausted = _levels(tol, budget, 2 * BOX_HALF_WIDTH)
    if exhausted:
        warnings.warn(
            f"evaluation budget {budget} too small for tol={tol}; result is best-so-far",
            BudgetExhaustedWarning,
            stacklevel=2,
        )

    candidates = np.concatenate([_search_batch(E, F, c, BOX_HALF_WIDTH, iters)[None], _seed_points(E, F)])
    margins = margin(candidates, E[None], F[None])  # (6, n)
    # ties resolved towards the searched point, then seed order
    pick = np.argmax(margins, axis=0)
    idx = np.arange(E.shape[0])
    best = margins[pick, idx]
    return {
        "feasible": best >= -tol,
        "best_margin": best,
        "argmax_a": candidates[pick, idx],
        "iterations": (iters + 2) ** 3,
        "exhausted": exhausted,
    }


def solve(e, f, tol: float = DEFAULT_TOL, budget: int = DEFAULT_BUDGET, center=None) -> FeasibilityResult:
    """Maximize the positivity margin over all candidate ``a`` for one pair.

    *center* shifts the search box, which must still contain the maximizer;
    the answer is independent of it up to search resolution.
    """
    out = solve_batch(e, f, tol=tol, budget=budget, center=center)
    return FeasibilityResult(
        feasible=bool(out["feasible"][0]),
        best_margin=float(out["best_margin"][0]),
        argmax_a=out["argmax_a"][0],
        iterations=int(out["iterations"]),
        tol=tol,
        exhausted=bool(out["exhausted"]),
    )
