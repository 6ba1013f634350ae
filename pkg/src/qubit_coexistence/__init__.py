"""Coexistence (joint measurability) of pairs of qubit effects.

Effects are handled as Pauli coefficient 4-vectors ``(c0, c1, c2, c3)``
representing ``c0 + c.sigma``; the determinant form on these is the
Minkowski product, and every criterion here is a statement about it.
"""

from .coexistence import (
    CoexistenceReport,
    Route,
    criterion_cor1,
    criterion_thm3,
    criterion_thm4,
    criterion_unbiased,
    criterion_yu,
    decide,
    decide_arrays,
)
from .construction import (
    HyperbolaSegments,
    JointObservable,
    construct_joint,
    hyperbola_segments,
    reduce_frame,
    verify_joint,
)
from .effects import (
    Effect,
    EffectKind,
    PairRelation,
    classify_effect,
    commutator_cross_mag,
    complement,
    make_effect,
    pair_relation,
    singlet_joint_probability,
)
from .estimators import (
    CoexistenceClassifier,
    JointObservableBuilder,
    OracleClassifier,
    SharpnessTransformer,
)
from .exceptions import (
    BudgetExhaustedWarning,
    CoexistenceError,
    NotAnEffect,
    NotCoexistent,
    PositivityViolation,
)
from .invariants import InvariantSet, SharpnessProfile, compute_invariants, gammas, sharpness
from .minkowski import (
    MVec3,
    MVec4,
    classify,
    cross_o,
    lightlike_precedes,
    mdot,
    precedes,
    project_onto_span,
    rotate_spatial,
)
from .oracle import FeasibilityResult, solve

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
