"""Explicit joint observables ``{a, e - a, f - a, 1 - e - f + a}`` for coexistent pairs.

Trivial pairs use the textbook choices of ``a``.  A generic pair is rotated
so that both Bloch vectors lie in the ``s1-s2`` plane; ``a`` is then picked on
the branch of the hyperbola ``B(e) & B(f)`` that lies inside both admissible
segments, parametrized along the asymptote directions ``h+`` and ``h-``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .coexistence import Route, decide
from .effects import Comparable, Effect, make_effect
from .exceptions import Commuting, DegenerateCross, NotCoexistent, NotSpacelike, PositivityViolation
from .invariants import invariant_arrays, safe_sqrt
from .minkowski import (
    DEFAULT_TOL,
    IDENTITY,
    as_vec,
    check_rotation,
    cross_o,
    eigenvalues,
    mdot,
    rotation_between,
)


@dataclass(frozen=True)
class FrameReduction:
    rotation: np.ndarray
    e3: np.ndarray
    f3: np.ndarray
    swapped: bool


def reduce_frame(e, f, tol: float = DEFAULT_TOL) -> FrameReduction:
    """Rotate a noncommuting pair into the ``s0, s1, s2`` subspace.

    The plane normal is taken from a Gram-Schmidt frame of the two Bloch
    vectors (not from the normalized cross product, which loses accuracy as
    the pair approaches commutation) and carried onto whichever of ``+z``,
    ``-z`` is closer.  In the latter case ``e`` and ``f`` are exchanged so that
    ``e1 f2 - e2 f1 > 0`` holds for the returned coordinates.
    """
    e = as_vec(e)
    f = as_vec(f)
    es, fs = e[1:], f[1:]
    if np.linalg.norm(np.cross(es, fs)) <= tol:
        raise DegenerateCross("pair commutes; use the commuting route")
    if np.linalg.norm(es) >= np.linalg.norm(fs):
        u1 = es / np.linalg.norm(es)
        p = fs - np.dot(fs, u1) * u1
        u2 = p / np.linalg.norm(p)
        normal = np.cross(u1, u2)
    else:
        u1 = fs / np.linalg.norm(fs)
        p = es - np.dot(es, u1) * u1
        u2 = p / np.linalg.norm(p)
        normal = np.cross(u2, u1)
    swapped = normal[2] < 0
    target = np.array([0.0, 0.0, -1.0 if swapped else 1.0])
    R = check_rotation(rotation_between(normal, target), atol=1e-10)
    e3 = np.concatenate([[e[0]], (R @ es)[:2]])
    f3 = np.concatenate([[f[0]], (R @ fs)[:2]])
    if swapped:
        e3, f3 = f3, e3
    return FrameReduction(R, e3, f3, bool(swapped))


def segment_endpoints(e, f, inv=None) -> dict:
    """Endpoints of the admissible lambda-intervals on the hyperbola branch.

    Along ``a = (e+f)/2 - lam*h+ - mu*h-`` with ``lam*mu = 1/(16|C|)``, the
    condition ``a >= 0`` cuts out ``[lamA-, lamA+]`` and ``e + f - a <= 1`` cuts
    out ``[lamB-, lamB+]``.  Only meaningful for spacelike noncommuting pairs.
    Broadcasts over leading axes.
    """
    inv = invariant_arrays(e, f) if inv is None else inv
    absC = np.abs(inv["C"])
    root_delta = safe_sqrt(-inv["Delta"])
    with np.errstate(divide="ignore", invalid="ignore"):
        out = {
            "lamA_minus": inv["GammaM"] / (4.0 * absC),
            "lamA_plus": inv["GammaP"] / (4.0 * absC),
            "lamB_minus": inv["GammaMp"] / (4.0 * (inv["D"] + root_delta)),
            "lamB_plus": inv["GammaPp"] / (4.0 * (inv["D"] + root_delta)),
            "hyper_const": 1.0 / (16.0 * absC),
        }
    out["lam_lo"] = np.maximum(out["lamA_minus"], out["lamB_minus"])
    out["lam_hi"] = np.minimum(out["lamA_plus"], out["lamB_plus"])
    return out


@dataclass(frozen=True)
class HyperbolaSegments:
    lamA_minus: float
    lamA_plus: float
    lamB_minus: float
    lamB_plus: float
    lam_lo: float
    lam_hi: float
    hyper_const: float
    frame: FrameReduction
    d: np.ndarray
    g: np.ndarray
    dxg: np.ndarray
    h_plus: np.ndarray
    h_minus: np.ndarray

    @property
    def nonempty(self) -> bool:
        return self.lamA_minus <= self.lamB_plus

    @property
    def gap(self) -> float:
        """``lamA- - lamB+``; positive exactly when the segments miss each other."""
        return self.lamA_minus - self.lamB_plus

    def point(self, lam: float) -> np.ndarray:
        """The candidate ``a`` at parameter *lam*, in rotated M3 coordinates."""
        mu = self.hyper_const / lam
        mid = 0.5 * (self.frame.e3 + self.frame.f3)
        return mid - lam * self.h_plus - mu * self.h_minus

    def to_dict(self) -> dict:
        return {
            "lamA_minus": self.lamA_minus,
            "lamA_plus": self.lamA_plus,
            "lamB_minus": self.lamB_minus,
            "lamB_plus": self.lamB_plus,
            "lam_lo": self.lam_lo,
            "lam_hi": self.lam_hi,
            "hyper_const": self.hyper_const,
            "gap": self.gap,
            "swapped": self.frame.swapped,
        }


def hyperbola_segments(e, f, tol: float = DEFAULT_TOL) -> HyperbolaSegments:
    e = as_vec(e)
    f = as_vec(f)
    d4 = e - f
    if mdot(d4, d4) >= 0:
        raise NotSpacelike("e - f is not spacelike; the pair is comparable")
    try:
        frame = reduce_frame(e, f, tol)
    except DegenerateCross as exc:
        raise Commuting(str(exc)) from exc
    e3, f3 = frame.e3, frame.f3
    d = e3 - f3
    g = cross_o(e3, f3)
    dxg = cross_o(d, g)
    s = np.sqrt(abs(d[0] ** 2 - d[1] ** 2 - d[2] ** 2))
    ends = {k: float(v) for k, v in segment_endpoints(e, f).items()}
    return HyperbolaSegments(
        **ends, frame=frame, d=d, g=g, dxg=dxg, h_plus=s * g + dxg, h_minus=-s * g + dxg
    )


def lambda_policy(policy):
    """Turn ``geometric | lo | hi | quantile=<q>`` (or a float q) into ``(lo, hi) -> lam``.

    ``quantile=q`` interpolates linearly between the endpoints.
    """
    if callable(policy):
        return policy
    if isinstance(policy, (int, float)):
        q = float(policy)
    elif policy == "geometric":
        return lambda lo, hi: float(np.sqrt(lo * hi))
    elif policy == "lo":
        return lambda lo, hi: lo
    elif policy == "hi":
        return lambda lo, hi: hi
    else:
        m = re.fullmatch(r"quantile=([0-9.eE+-]+)", str(policy))
        if not m:
            raise ValueError(f"unknown lambda policy {policy!r}")
        q = float(m.group(1))
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"quantile must lie in [0, 1], got {q}")
    return lambda lo, hi: lo + q * (hi - lo)


def jordan_product(e, f) -> np.ndarray:
    """``(ef + fe)/2``; equals ``ef`` when the pair commutes."""
    e = as_vec(e)
    f = as_vec(f)
    return np.concatenate(
        [[e[0] * f[0] + np.dot(e[1:], f[1:])], e[0] * f[1:] + f[0] * e[1:]]
    )


def joint_margin(a, e, f):
    """Smallest eigenvalue over the four operators of the candidate observable."""
    a, e, f = as_vec(a), as_vec(e), as_vec(f)
    ops = np.stack([a, e - a, f - a, IDENTITY - e - f + a])
    return np.min(eigenvalues(ops)[0], axis=0)


@dataclass(frozen=True)
class JointObservable:
    g1: Effect
    g2: Effect
    g3: Effect
    g4: Effect
    source: tuple
    a: Effect
    route: str = ""
    lam: float | None = None

    @property
    def effects(self) -> tuple:
        return (self.g1, self.g2, self.g3, self.g4)

    def to_json(self) -> dict:
        out = {
            "effects": [g.to_json()["coeffs"] for g in self.effects],
            "a": self.a.to_json()["coeffs"],
            "source": {"e": self.source[0].to_json()["coeffs"], "f": self.source[1].to_json()["coeffs"]},
            "route": self.route,
        }
        if self.lam is not None:
            out["lambda"] = self.lam
        return out


def joint_from_a(a, e, f, tol: float = DEFAULT_TOL, route: str = "", lam=None) -> JointObservable:
    a, e, f = as_vec(a), as_vec(e), as_vec(f)
    ops = [a, e - a, f - a, IDENTITY - e - f + a]
    g = [make_effect(op, tol=tol) for op in ops]
    return JointObservable(*g, source=(make_effect(e, tol), make_effect(f, tol)), a=g[0], route=route, lam=lam)


# the main route lands on cone boundaries, so its margin is zero up to rounding
FALLBACK_BELOW = -1e-12


def _trivial_candidate(clause: Comparable, e, f):
    return {
        Comparable.E_BELOW_F: e,
        Comparable.F_BELOW_E: f,
        Comparable.E_BELOW_FC: np.zeros(4),
        Comparable.E_ABOVE_FC: e + f - IDENTITY,
    }[clause]


def _candidates(e, f, policy, tol):
    """Every applicable construction, as ``(route, a, lam)`` triples."""
    for clause in (c for c in Comparable if c is not Comparable.NONE):
        yield f"trivial_comparable:{clause.value}", _trivial_candidate(clause, e, f), None
    yield "trivial_commuting", jordan_product(e, f), None
    try:
        seg = hyperbola_segments(e, f, tol)
    except (NotSpacelike, Commuting):
        return
    lam = _pick_lambda(seg, policy)
    yield "main_criterion", _lift(seg, seg.point(lam)), lam


def _pick_lambda(seg: HyperbolaSegments, policy) -> float:
    lo, hi = seg.lam_lo, seg.lam_hi
    if lo > hi:
        # numerically empty: the touching point is the best available
        lo = hi = float(np.sqrt(seg.lamA_minus * seg.lamB_plus))
    return float(lambda_policy(policy)(lo, hi))


def _lift(seg: HyperbolaSegments, a3: np.ndarray) -> np.ndarray:
    spatial = seg.frame.rotation.T @ np.array([a3[1], a3[2], 0.0])
    return np.concatenate([[a3[0]], spatial])


def construct_joint(e, f, policy="geometric", tol: float = DEFAULT_TOL) -> JointObservable:
    """Build a joint observable for a coexistent pair.

    The route is the one :func:`decide` takes.  Should its candidate fail the
    positivity check (a pair that is trivial only within tolerance, or a
    nearly commuting generic pair), every other applicable candidate is tried
    and the best one kept.
    """
    e = as_vec(e)
    f = as_vec(f)
    report = decide(e, f, tol)
    if not report.verdict:
        msg = "effects are not coexistent"
        if report.route is Route.MAIN_CRITERION:
            seg = hyperbola_segments(e, f, tol)
            msg += f" (segment gap lamA- - lamB+ = {seg.gap:.6g})"
        raise NotCoexistent(msg, report)

    if report.route is Route.TRIVIAL_COMPARABLE:
        first = (f"trivial_comparable:{report.clause}", _trivial_candidate(report.relation.comparable, e, f), None)
    elif report.route is Route.TRIVIAL_COMMUTING:
        first = ("trivial_commuting", jordan_product(e, f), None)
    else:
        seg = hyperbola_segments(e, f, tol)
        lam = _pick_lambda(seg, policy)
        first = ("main_criterion", _lift(seg, seg.point(lam)), lam)

    best, best_margin = first, float(joint_margin(first[1], e, f))
    if best_margin < FALLBACK_BELOW:
        for cand in _candidates(e, f, policy, tol):
            m = float(joint_margin(cand[1], e, f))
            if m > best_margin:
                best, best_margin = cand, m
    if best_margin < -10 * tol:
        raise PositivityViolation(best_margin)
    route, a, lam = best
    return joint_from_a(a, e, f, tol=10 * tol, route=route, lam=lam)


@dataclass(frozen=True)
class JointVerification:
    positivity: tuple
    sum_violation: float
    marginal_e: float
    marginal_f: float
    tol: float
    ok: bool = field(init=False)

    def __post_init__(self):
        worst = max(max(self.positivity), self.sum_violation, self.marginal_e, self.marginal_f)
        object.__setattr__(self, "ok", bool(worst <= self.tol))

    @property
    def min_eigenvalue(self) -> float:
        return -max(self.positivity)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "positivity": list(self.positivity),
            "sum_violation": self.sum_violation,
            "marginal_e": self.marginal_e,
            "marginal_f": self.marginal_f,
            "tol": self.tol,
        }


def verify_joint(J: JointObservable, tol: float = 1e-10) -> JointVerification:
    """Check positivity of each outcome, completeness, and both marginals.

    Each entry is the size of the violation (zero when satisfied).
    """
    g = [as_vec(x) for x in J.effects]
    e, f = as_vec(J.source[0]), as_vec(J.source[1])
    positivity = tuple(float(max(0.0, -eigenvalues(x)[0])) for x in g)
    return JointVerification(
        positivity=positivity,
        sum_violation=float(np.max(np.abs(g[0] + g[1] + g[2] + g[3] - IDENTITY))),
        marginal_e=float(np.max(np.abs(g[0] + g[1] - e))),
        marginal_f=float(np.max(np.abs(g[0] + g[2] - f))),
        tol=tol,
    )

