"""Qubit effects, their complements and pairwise relations."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import NotAnEffect
from .minkowski import (
    DEFAULT_TOL,
    IDENTITY,
    MVec4,
    as_vec,
    eigenvalues,
    mdot,
    precedes,
    spatial_norm,
    to_matrix,
)


@dataclass(frozen=True)
class Effect:
    """A validated operator ``0 <= e <= 1``."""

    vec: MVec4

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.vec, dtype=dtype)

    @property
    def coeffs(self) -> np.ndarray:
        return np.asarray(self.vec)

    @property
    def e0(self) -> float:
        return self.vec.c0

    @property
    def spatial(self) -> np.ndarray:
        return self.vec.spatial

    @property
    def complement(self) -> "Effect":
        return complement(self)

    def eigenvalues(self) -> tuple[float, float]:
        lo, hi = eigenvalues(self.coeffs)
        return float(lo), float(hi)

    def matrix(self) -> np.ndarray:
        return to_matrix(self.coeffs)

    def to_json(self) -> dict:
        return {"coeffs": [float(c) for c in self.vec]}

    @classmethod
    def from_json(cls, obj, tol: float = DEFAULT_TOL) -> "Effect":
        return effect_from_json(obj, tol=tol)


def make_effect(vec, tol: float = DEFAULT_TOL) -> Effect:
    """Validate *vec* as an effect; raises :class:`NotAnEffect` otherwise."""
    if isinstance(vec, Effect):
        return vec
    x = as_vec(vec)
    if x.shape != (4,):
        raise ValueError(f"expected a single 4-vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NotAnEffect(np.nan, np.nan, "effect coefficients must be finite")
    lo, hi = eigenvalues(x)
    if lo < -tol or hi > 1.0 + tol:
        raise NotAnEffect(lo, hi)
    return Effect(MVec4.from_array(x))


def complement(e) -> Effect:
    """``1 - e``."""
    return Effect(MVec4.from_array(IDENTITY - as_vec(e)))


class EffectKind(str, Enum):
    ZERO = "zero"
    ONE = "one"
    TRIVIAL = "trivial"
    SHARP_NONTRIVIAL = "sharp_nontrivial"
    UNSHARP = "unsharp"


def classify_effect(e, tol: float = DEFAULT_TOL) -> EffectKind:
    x = as_vec(e)
    r = float(spatial_norm(x))
    if r <= tol:
        if abs(x[0]) <= tol:
            return EffectKind.ZERO
        if abs(x[0] - 1.0) <= tol:
            return EffectKind.ONE
        return EffectKind.TRIVIAL
    if abs(x[0] - 0.5) <= tol and abs(r - 0.5) <= tol:
        return EffectKind.SHARP_NONTRIVIAL
    return EffectKind.UNSHARP


def commutator_cross_mag(e, f):
    """``|e x f|`` of the spatial parts, i.e. half the operator norm of ``[e, f]``."""
    e = np.asarray(e, dtype=float)
    f = np.asarray(f, dtype=float)
    return np.linalg.norm(np.cross(e[..., 1:], f[..., 1:]), axis=-1)


class Comparable(str, Enum):
    E_BELOW_F = "e<f"
    F_BELOW_E = "f<e"
    E_BELOW_FC = "e<f'"
    E_ABOVE_FC = "e>f'"
    NONE = "none"


@dataclass(frozen=True)
class PairRelation:
    spacelike: bool
    commuting: bool
    comparable: Comparable
    cross_mag: float
    swap_applied: bool

    def to_dict(self) -> dict:
        return {
            "spacelike": self.spacelike,
            "commuting": self.commuting,
            "comparable": self.comparable.value,
            "cross_mag": self.cross_mag,
            "swap_applied": self.swap_applied,
        }


def comparability(e, f, tol: float = DEFAULT_TOL) -> Comparable:
    """First clause of the four trivial orderings that holds, or ``NONE``."""
    e = as_vec(e)
    f = as_vec(f)
    fc = IDENTITY - f
    if precedes(e, f, tol):
        return Comparable.E_BELOW_F
    if precedes(f, e, tol):
        return Comparable.F_BELOW_E
    if precedes(e, fc, tol):
        return Comparable.E_BELOW_FC
    if precedes(fc, e, tol):
        return Comparable.E_ABOVE_FC
    return Comparable.NONE


def pair_relation(e, f, tol: float = DEFAULT_TOL) -> PairRelation:
    e = as_vec(e)
    f = as_vec(f)
    d = e - f
    cross = float(commutator_cross_mag(e, f))
    orientation = e[1] * f[2] - e[2] * f[1]
    return PairRelation(
        spacelike=bool(mdot(d, d) < 0),
        commuting=cross <= tol,
        comparable=comparability(e, f, tol),
        cross_mag=cross,
        swap_applied=bool(cross > tol and orientation < 0),
    )


# singlet (psi+ (x) psi- - psi- (x) psi+)/sqrt 2 in the sigma_3 eigenbasis
SINGLET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)


def singlet_joint_probability(e, f):
    """``(Phi | e (x) f Phi)`` for the two-qubit singlet state, by explicit contraction."""
    me = to_matrix(e)
    mf = to_matrix(f)
    # kron over the trailing 2x2 axes, batched
    ef = np.einsum("...ij,...kl->...ikjl", me, mf)
    ef = ef.reshape(ef.shape[:-4] + (4, 4))
    return np.real(np.einsum("i,...ij,j->...", SINGLET.conj(), ef, SINGLET))


def effect_from_json(obj, tol: float = DEFAULT_TOL) -> Effect:
    """Parse ``{"coeffs": [c0, c1, c2, c3]}`` (a dict or its JSON text)."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ValueError('effect JSON must be an object with a "coeffs" array')
    coeffs = obj["coeffs"]
    if not isinstance(coeffs, list) or len(coeffs) != 4:
        raise ValueError('"coeffs" must be an array of four numbers')
    if not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs):
        raise ValueError('"coeffs" must contain only numbers')
    return make_effect(np.array(coeffs, dtype=float), tol=tol)
