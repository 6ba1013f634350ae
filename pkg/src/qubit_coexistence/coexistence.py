"""Analytic coexistence criteria for pairs of qubit effects.

Each criterion is evaluated from its own closed form so that the four can be
cross-checked against each other.  The array versions (``*_arrays``) broadcast
over leading axes and back both the scalar API and the batch campaigns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .effects import Comparable, PairRelation, pair_relation
from .exceptions import InvalidBloch
from .invariants import InvariantSet, compute_invariants, invariant_arrays, safe_sqrt
from .minkowski import DEFAULT_TOL, IDENTITY, as_vec, precedes

# pairs closer than this to the boundary are excluded from cross-criterion checks
AGREEMENT_BAND = 1e-9


def thm3_arrays(e, f, inv=None):
    inv = invariant_arrays(e, f) if inv is None else inv
    lhs = inv["D"] - inv["ef"] * inv["ecfc"]
    rhs = safe_sqrt(inv["N"] * inv["Np"])
    return lhs, rhs


def criterion_thm3(e, f):
    """Main criterion: ``D - <e|f><e'|f'> <= sqrt(<e|e><f|f><e'|e'><f'|f'>)``.

    Returns ``(lhs, rhs, verdict)``; the boundary counts as coexistent.
    """
    lhs, rhs = thm3_arrays(e, f)
    return _out(lhs), _out(rhs), _out(lhs <= rhs)


def cor1_arrays(e, f, inv=None):
    inv = invariant_arrays(e, f) if inv is None else inv
    # -(1/4)<d|d> ||[e,f]||^2 with ||[e,f]|| = 2 |e x f|
    lhs = -inv["dd"] * inv["cross"] ** 2
    rhs = (inv["ef"] * safe_sqrt(inv["Np"]) + inv["ecfc"] * safe_sqrt(inv["N"])) ** 2
    return lhs, rhs


def criterion_cor1(e, f):
    """Commutator form of the main criterion. Returns ``(lhs, rhs, verdict)``."""
    lhs, rhs = cor1_arrays(e, f)
    return _out(lhs), _out(rhs), _out(lhs <= rhs)


def thm4_arrays(e, f, inv=None):
    """Margins ``rhs - lhs`` of the three disjuncts, stacked on a leading axis."""
    inv = invariant_arrays(e, f) if inv is None else inv
    lhs = -inv["Delta"]
    absC = np.abs(inv["C"])
    absCp = np.abs(inv["Cp"])
    r86 = inv["ee"] * inv["ff"] * absCp
    r87 = inv["ecec"] * inv["fcfc"] * absC
    r88 = (
        2.0 * inv["ef"] * inv["ecfc"] * inv["D"]
        - inv["ecfc"] ** 2 * absC
        - inv["ef"] ** 2 * absCp
    )
    return np.stack([r86 - lhs, r87 - lhs, r88 - lhs])


THM4_LABELS = (86, 87, 88)


def criterion_thm4(e, f):
    """Three-disjunct criterion. Returns ``(verdict, which)``.

    *which* is the frozenset of satisfied disjunct labels.
    """
    margins = thm4_arrays(e, f)
    holds = margins >= 0
    if holds.ndim == 1:
        which = frozenset(lbl for lbl, h in zip(THM4_LABELS, holds) if h)
        return bool(holds.any()), which
    return holds.any(axis=0), holds


def yu_arrays(e, f, inv=None, tol: float = DEFAULT_TOL):
    """Bias/unsharpness criterion.

    Returns ``(lhs, rhs, verdict, guarded)``.  Where either unsharpness is at
    most *tol* the formula divides by zero; there the verdict is whether the
    pair commutes and *guarded* is set.
    """
    e = np.asarray(e, dtype=float)
    f = np.asarray(f, dtype=float)
    inv = invariant_arrays(e, f) if inv is None else inv
    Fe = safe_sqrt(inv["ee"]) + safe_sqrt(inv["ecec"])
    Ff = safe_sqrt(inv["ff"]) + safe_sqrt(inv["fcfc"])
    x = 2.0 * e[..., 0] - 1.0
    y = 2.0 * f[..., 0] - 1.0
    guarded = (Fe <= tol) | (Ff <= tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        lhs = (1.0 - Fe**2 - Ff**2) * (1.0 - x**2 / Fe**2 - y**2 / Ff**2)
    dot = np.sum(e[..., 1:] * f[..., 1:], axis=-1)
    rhs = (x * y - 4.0 * dot) ** 2
    verdict = np.where(guarded, inv["cross"] <= tol, lhs <= rhs)
    lhs = np.where(guarded, np.nan, lhs)
    return lhs, rhs, verdict, guarded


def criterion_yu(e, f, tol: float = DEFAULT_TOL):
    """Returns ``(verdict, guarded)``."""
    _, _, verdict, guarded = yu_arrays(e, f, tol=tol)
    return _out(verdict), _out(guarded)


@dataclass(frozen=True)
class UnbiasedForms:
    verdict: bool
    forms: tuple
    margins: tuple


def unbiased_margins(e_vec, f_vec):
    """Margins (``rhs - lhs``) of the three equivalent unbiased-case forms."""
    a = np.asarray(e_vec, dtype=float)
    b = np.asarray(f_vec, dtype=float)
    aa = np.sum(a * a, axis=-1)
    bb = np.sum(b * b, axis=-1)
    ab = np.sum(a * b, axis=-1)
    m58 = 1.0 + ab**2 - aa - bb
    m59 = (1.0 - aa) * (1.0 - bb) - np.sum(np.cross(a, b) ** 2, axis=-1)
    m60 = 2.0 - np.linalg.norm(a + b, axis=-1) - np.linalg.norm(a - b, axis=-1)
    return m58, m59, m60


# rounding slack for the unbiased forms; exact ties (e.g. a sharp partner on a
# parallel axis) otherwise land on either side
UNBIASED_SLACK = 1e-14


def criterion_unbiased(e_vec, f_vec, tol: float = DEFAULT_TOL) -> UnbiasedForms:
    """Coexistence of ``(1 + a.s)/2`` and ``(1 + b.s)/2`` for Bloch vectors a, b.

    The verdict is taken from the ``|a+b| + |a-b| <= 2`` form.
    """
    a = np.asarray(e_vec, dtype=float)
    b = np.asarray(f_vec, dtype=float)
    for name, v in (("e_vec", a), ("f_vec", b)):
        if v.shape != (3,):
            raise ValueError(f"{name} must be a 3-vector")
        if np.linalg.norm(v) > 1.0 + tol:
            raise InvalidBloch(f"|{name}| = {np.linalg.norm(v):.6g} exceeds 1")
    margins = tuple(float(m) for m in unbiased_margins(a, b))
    forms = tuple(m >= -UNBIASED_SLACK for m in margins)
    return UnbiasedForms(verdict=forms[2], forms=forms, margins=margins)


class Route(str, Enum):
    TRIVIAL_COMPARABLE = "trivial_comparable"
    TRIVIAL_COMMUTING = "trivial_commuting"
    MAIN_CRITERION = "main_criterion"


@dataclass(frozen=True)
class CoexistenceReport:
    verdict: bool
    route: Route
    lhs55: float
    rhs55: float
    margin: float
    relation: PairRelation
    invariants: InvariantSet
    verdict_thm3: bool | None = None
    verdict_cor1: bool | None = None
    verdict_thm4: bool | None = None
    verdict_yu: bool | None = None
    thm4_which: tuple = ()
    yu_guarded: bool = False
    clause: str = ""
    notes: list = field(default_factory=list)

    def consistent(self, band: float = AGREEMENT_BAND) -> bool:
        """All four criterion verdicts agree (vacuous inside the margin band)."""
        if self.route is not Route.MAIN_CRITERION or abs(self.margin) <= band:
            return True
        vs = {self.verdict_thm3, self.verdict_cor1, self.verdict_thm4, self.verdict_yu}
        return len(vs) == 1

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "route": self.route.value,
            "clause": self.clause,
            "lhs55": self.lhs55,
            "rhs55": self.rhs55,
            "margin": self.margin,
            "verdict_thm3": self.verdict_thm3,
            "verdict_cor1": self.verdict_cor1,
            "verdict_thm4": self.verdict_thm4,
            "verdict_yu": self.verdict_yu,
            "thm4_which": list(self.thm4_which),
            "yu_guarded": self.yu_guarded,
            "relation": self.relation.to_dict(),
            "invariants": self.invariants.to_dict(),
            "notes": list(self.notes),
        }


def decide(e, f, tol: float = DEFAULT_TOL) -> CoexistenceReport:
    """Decide coexistence, routing through the trivial cases first.

    Comparable or commuting pairs are coexistent outright; every other pair
    is decided by the main criterion, with the three alternative criteria
    evaluated alongside for diagnostics.
    """
    e = as_vec(e)
    f = as_vec(f)
    relation = pair_relation(e, f, tol)
    inv = invariant_arrays(e, f)
    lhs, rhs = (float(v) for v in thm3_arrays(e, f, inv))
    common = dict(
        lhs55=lhs,
        rhs55=rhs,
        margin=rhs - lhs,
        relation=relation,
        invariants=InvariantSet(**{k: float(inv[k]) for k in InvariantSet.__dataclass_fields__}),
    )
    if relation.comparable is not Comparable.NONE:
        return CoexistenceReport(
            verdict=True,
            route=Route.TRIVIAL_COMPARABLE,
            clause=relation.comparable.value,
            **common,
        )
    if relation.commuting:
        return CoexistenceReport(
            verdict=True, route=Route.TRIVIAL_COMMUTING, clause="[e,f]=0", **common
        )

    c1_lhs, c1_rhs = cor1_arrays(e, f, inv)
    t4 = thm4_arrays(e, f, inv)
    _, _, yu_verdict, yu_guarded = yu_arrays(e, f, inv, tol=tol)
    report = CoexistenceReport(
        verdict=lhs <= rhs,
        route=Route.MAIN_CRITERION,
        clause="main",
        verdict_thm3=lhs <= rhs,
        verdict_cor1=bool(c1_lhs <= c1_rhs),
        verdict_thm4=bool(np.any(t4 >= 0)),
        verdict_yu=bool(yu_verdict),
        thm4_which=tuple(lbl for lbl, m in zip(THM4_LABELS, t4) if m >= 0),
        yu_guarded=bool(yu_guarded),
        **common,
    )
    if yu_guarded:
        report.notes.append("sharp effect: bias/unsharpness form replaced by commutation rule")
    return report


def decide_arrays(E, F, tol: float = DEFAULT_TOL) -> dict:
    """Batch version of :func:`decide` for ``(n, 4)`` inputs.

    Returns per-pair route codes (0 comparable, 1 commuting, 2 main), the
    master verdict and every criterion's verdict and margin, evaluated on
    all pairs regardless of route.
    """
    E = as_vec(E)
    F = as_vec(F)
    inv = invariant_arrays(E, F)
    Ec = IDENTITY - E
    Fc = IDENTITY - F
    comparable = (
        precedes(E, F, tol) | precedes(F, E, tol) | precedes(E, Fc, tol) | precedes(Fc, E, tol)
    )
    commuting = inv["cross"] <= tol
    route = np.where(comparable, 0, np.where(commuting, 1, 2))
    lhs, rhs = thm3_arrays(E, F, inv)
    c1_lhs, c1_rhs = cor1_arrays(E, F, inv)
    t4 = thm4_arrays(E, F, inv)
    yu_lhs, yu_rhs, yu_verdict, yu_guarded = yu_arrays(E, F, inv, tol=tol)
    thm3 = lhs <= rhs
    return {
        "route": route,
        "verdict": np.where(route == 2, thm3, True),
        "margin": rhs - lhs,
        "thm3": thm3,
        "cor1": c1_lhs <= c1_rhs,
        "cor1_margin": c1_rhs - c1_lhs,
        "thm4": np.any(t4 >= 0, axis=0),
        "thm4_margin": np.max(t4, axis=0),
        "yu": yu_verdict,
        "yu_margin": yu_rhs - yu_lhs,
        "yu_guarded": yu_guarded,
        "invariants": inv,
    }


def _out(x):
    x = np.asarray(x)
    if x.ndim == 0:
        return x.item()
    return x
