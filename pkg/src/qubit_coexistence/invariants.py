"""Scalar invariants of an effect pair and sharpness measures of a single effect.

Everything here is a contraction of the Minkowski product over
``{e, f, e', f', d}``; no frame or basis choice is involved.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .effects import commutator_cross_mag
from .minkowski import IDENTITY, mdot

# square-root arguments that are provably >= 0 may come out as -1e-16 dust
SQRT_DUST = 1e-14


def safe_sqrt(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.where((x < 0) & (x >= -SQRT_DUST), 0.0, x))


@dataclass(frozen=True)
class InvariantSet:
    C: float
    Cp: float
    D: float
    Delta: float
    GammaP: float
    GammaM: float
    GammaPp: float
    GammaMp: float
    N: float
    Np: float
    dd: float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


def pair_products(e, f) -> dict:
    """All Minkowski products between ``e, f`` and their complements.

    Keys use ``c`` for a prime, e.g. ``"ecfc"`` is ``<e'|f'>``.  Self-products
    are determinants of effects and are clipped at zero, so inputs admitted
    within a validation tolerance cannot produce NaN square roots downstream.
    """
    e = np.asarray(e, dtype=float)
    f = np.asarray(f, dtype=float)
    ec = IDENTITY - e
    fc = IDENTITY - f
    d = e - f
    return {
        "ee": np.maximum(mdot(e, e), 0.0),
        "ff": np.maximum(mdot(f, f), 0.0),
        "ef": mdot(e, f),
        "ecec": np.maximum(mdot(ec, ec), 0.0),
        "fcfc": np.maximum(mdot(fc, fc), 0.0),
        "ecfc": mdot(ec, fc),
        "eec": mdot(e, ec),
        "ffc": mdot(f, fc),
        "efc": mdot(e, fc),
        "ecf": mdot(ec, f),
        "dd": mdot(d, d),
        "cross": commutator_cross_mag(e, f),
    }


def invariant_arrays(e, f) -> dict:
    """Vectorized form of :func:`compute_invariants`; values are arrays."""
    p = pair_products(e, f)
    N = p["ee"] * p["ff"]
    Np = p["ecec"] * p["fcfc"]
    C = N - p["ef"] ** 2
    Cp = Np - p["ecfc"] ** 2
    D = p["eec"] * p["ffc"] - p["efc"] * p["ecf"]
    rN = safe_sqrt(N)
    rNp = safe_sqrt(Np)
    return {
        **p,
        "N": N,
        "Np": Np,
        "C": C,
        "Cp": Cp,
        "D": D,
        "Delta": C * Cp - D**2,
        "GammaP": p["ef"] + rN,
        "GammaM": p["ef"] - rN,
        "GammaPp": p["ecfc"] + rNp,
        "GammaMp": p["ecfc"] - rNp,
    }


def compute_invariants(e, f) -> InvariantSet:
    inv = invariant_arrays(e, f)
    return InvariantSet(**{k: float(inv[k]) for k in InvariantSet.__dataclass_fields__})


def gammas(e, f) -> tuple[float, float, float, float]:
    """``(G+(e,f), G-(e,f), G+(e',f'), G-(e',f'))``."""
    inv = invariant_arrays(e, f)
    return tuple(float(inv[k]) for k in ("GammaP", "GammaM", "GammaPp", "GammaMp"))


def _undust(x):
    return np.where(np.abs(x) <= SQRT_DUST, 0.0, x)


@dataclass(frozen=True)
class SharpnessProfile:
    F: float
    S: float
    bias: float


def sharpness_arrays(e) -> dict:
    """Unsharpness ``F``, sharpness ``S`` and bias, each from its own formula.

    ``<e|e>`` and ``<e'|e'>`` within the dust band of zero (either sign) are
    taken as zero: a projection stored in floating point has ``|<e|e>| ~ 1e-16``
    and its square root would otherwise leave ``F ~ 1e-8``.
    """
    e = np.asarray(e, dtype=float)
    ec = IDENTITY - e
    ee = _undust(mdot(e, e))
    ecec = _undust(mdot(ec, ec))
    F = safe_sqrt(ee) + safe_sqrt(ecec)
    S = 2.0 * (mdot(e, ec) - safe_sqrt(ee * ecec))
    return {"F": F, "S": S, "bias": 2.0 * e[..., 0] - 1.0}


def sharpness(e) -> SharpnessProfile:
    s = sharpness_arrays(e)
    return SharpnessProfile(float(s["F"]), float(s["S"]), float(s["bias"]))
