"""Minkowski-space primitives on Pauli coefficient vectors.

A selfadjoint 2x2 operator ``x = c0*s0 + c1*s1 + c2*s2 + c3*s3`` is stored as the
real 4-vector ``(c0, c1, c2, c3)``.  All functions broadcast over leading axes,
so a batch of ``n`` vectors is simply an ``(n, 4)`` array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .exceptions import DegenerateSubspace, NonOrthogonalRotation

DEFAULT_TOL = 1e-9

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])
ZERO = np.zeros(4)

PAULI = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class MVec4:
    """Real coefficients of ``s0..s3``."""

    c0: float
    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        for name in ("c0", "c1", "c2", "c3"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, x) -> "MVec4":
        x = np.asarray(x, dtype=float)
        if x.shape != (4,):
            raise ValueError(f"expected shape (4,), got {x.shape}")
        return cls(*x)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.c0, self.c1, self.c2, self.c3], dtype=dtype)

    def __iter__(self):
        return iter((self.c0, self.c1, self.c2, self.c3))

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])

    def matrix(self) -> np.ndarray:
        return to_matrix(self)


@dataclass(frozen=True)
class MVec3:
    """Element of the subspace spanned by ``s0, s1, s2``."""

    c0: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("c0", "c1", "c2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.c0, self.c1, self.c2], dtype=dtype)

    def embed(self) -> MVec4:
        return MVec4(self.c0, self.c1, self.c2, 0.0)


class CausalTag(str, Enum):
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    SPACELIKE = "spacelike"
    ZERO = "zero"


class Orientation(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    NONE = "none"


@dataclass(frozen=True)
class CausalClass:
    tag: CausalTag
    orientation: Orientation


def as_vec(x) -> np.ndarray:
    """Coerce *x* to a float array whose last axis has length 4."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (4,):
        raise ValueError(f"expected trailing dimension 4, got shape {x.shape}")
    return x


def mdot(x, y):
    """Minkowski scalar product ``x0*y0 - x.y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] - np.sum(x[..., 1:] * y[..., 1:], axis=-1)


def spatial_norm(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(np.sum(x[..., 1:] ** 2, axis=-1))


def eigenvalues(x):
    """Return ``(lam_min, lam_max) = x0 -+ |x|`` of the represented operator."""
    x = np.asarray(x, dtype=float)
    r = spatial_norm(x)
    return x[..., 0] - r, x[..., 0] + r


def to_matrix(x) -> np.ndarray:
    """Assemble the hermitian 2x2 matrix(es) of *x*."""
    x = np.asarray(x, dtype=float)
    return np.einsum("...k,kij->...ij", x.astype(complex), PAULI)


def from_matrix(m) -> np.ndarray:
    """Pauli coefficients ``c_k = tr(m s_k) / 2`` of hermitian matrices."""
    m = np.asarray(m, dtype=complex)
    return 0.5 * np.real(np.einsum("...ij,kji->...k", m, PAULI))


def classify(x, tol: float = DEFAULT_TOL) -> CausalClass:
    """Causal character of a single vector.

    The quadratic form is compared against ``tol * max(1, |x|^2)``; ties go to
    lightlike.  A vector with every coefficient within *tol* of zero is tagged
    ``zero``.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    x = as_vec(x)
    if x.ndim != 1:
        raise ValueError("classify takes a single vector")
    if np.all(np.abs(x) <= tol):
        return CausalClass(CausalTag.ZERO, Orientation.NONE)
    q = float(mdot(x, x))
    band = tol * max(1.0, float(np.dot(x, x)))
    if q < -band:
        return CausalClass(CausalTag.SPACELIKE, Orientation.NONE)
    tag = CausalTag.LIGHTLIKE if q <= band else CausalTag.TIMELIKE
    orientation = Orientation.FORWARD if x[0] > 0 else Orientation.BACKWARD
    return CausalClass(tag, orientation)


def precedes(x, y, tol: float = DEFAULT_TOL):
    """The operator order: ``x <= y`` iff ``y - x`` has no eigenvalue below ``-tol``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    lam_min, _ = eigenvalues(as_vec(y) - as_vec(x))
    return lam_min >= -tol


def lightlike_precedes(x, y, tol: float = DEFAULT_TOL):
    """``x <_o y``: ``y - x`` is positive with a zero eigenvalue (within *tol*)."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    lam_min, lam_max = eigenvalues(as_vec(y) - as_vec(x))
    return (np.abs(lam_min) <= tol) & (lam_max >= -tol)


def cross_o(x, y):
    """Cross product on the 3-dimensional subspace with spatial components inverted."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x0, x1, x2 = x[..., 0], x[..., 1], x[..., 2]
    y0, y1, y2 = y[..., 0], y[..., 1], y[..., 2]
    return np.stack(
        [x1 * y2 - x2 * y1, x0 * y2 - x2 * y0, x1 * y0 - x0 * y1], axis=-1
    )


def mdot3(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] - x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2]


def embed3(x):
    """Embed (..., 3) vectors of M3 into M4 with ``c3 = 0``."""
    x = np.asarray(x, dtype=float)
    return np.concatenate([x, np.zeros(x.shape[:-1] + (1,))], axis=-1)


def check_rotation(R, atol: float = 1e-12) -> np.ndarray:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        raise NonOrthogonalRotation(f"rotation must be a finite 3x3 matrix, got shape {R.shape}")
    if not np.allclose(R.T @ R, np.eye(3), rtol=0.0, atol=atol):
        raise NonOrthogonalRotation("R^T R differs from the identity")
    if abs(np.linalg.det(R) - 1.0) > atol:
        raise NonOrthogonalRotation(f"det R = {np.linalg.det(R):.3e}, expected 1")
    return R


def rotate_spatial(x, R):
    """Apply the proper rotation *R* to the spatial part, leaving ``c0`` alone."""
    R = check_rotation(R)
    x = as_vec(x)
    out = x.copy()
    out[..., 1:] = x[..., 1:] @ R.T
    return out


def rotation_between(u, v) -> np.ndarray:
    """Smallest proper rotation taking unit vector *u* onto unit vector *v*."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    c = float(np.dot(u, v))
    if c < -1.0 + 1e-15:
        # antipodal: rotate by pi about any axis orthogonal to u
        axis = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-8:
            axis = np.cross(u, [0.0, 1.0, 0.0])
        axis /= np.linalg.norm(axis)
        return 2.0 * np.outer(axis, axis) - np.eye(3)
    w = np.cross(u, v)
    K = np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])
    return np.eye(3) + K + K @ K / (1.0 + c)


def project_onto_span(x, basis, tol: float = 1e-10):
    """Orthogonal projection, with respect to the Minkowski form, onto ``span(basis)``.

    The span must be three-dimensional and contain the identity; it is then
    timelike and the projection is monotone for the operator order.
    """
    return SpanProjector(basis, tol=tol)(x)


class SpanProjector:
    """Precomputed projector onto a 3-dimensional timelike subspace containing 1.

    Built by Gram-Schmidt under the indefinite form with the identity first;
    every later direction is orthogonal to 1 and hence purely spatial.
    """

    def __init__(self, basis, tol: float = 1e-10):
        B = np.atleast_2d(np.asarray([np.asarray(b, dtype=float) for b in basis]))
        if B.ndim != 2 or B.shape[1] != 4:
            raise DegenerateSubspace(f"basis must be a list of 4-vectors, got shape {B.shape}")
        scale = max(1.0, float(np.max(np.abs(B))))
        sv = np.linalg.svd(B, compute_uv=False)
        rank = int(np.sum(sv > tol * scale * max(B.shape)))
        if rank != 3:
            raise DegenerateSubspace(f"span has dimension {rank}, expected 3")
        coef, *_ = np.linalg.lstsq(B.T, IDENTITY, rcond=None)
        if np.linalg.norm(B.T @ coef - IDENTITY) > 1e3 * tol * scale:
            raise DegenerateSubspace("identity is not contained in the span")

        frame = [IDENTITY.copy()]
        for b in B:
            w = b.copy()
            for t in frame:
                w = w - mdot(w, t) / mdot(t, t) * t
            if np.linalg.norm(w) > tol * scale * 10:
                frame.append(w / np.linalg.norm(w))
            if len(frame) == 3:
                break
        norms = np.array([mdot(t, t) for t in frame])
        if len(frame) != 3 or not (norms[0] > 0 and np.all(norms[1:] < 0)):
            raise DegenerateSubspace(f"Gram signature {np.sign(norms)} is not (+,-,-)")
        self.frame = np.array(frame)
        self.gram = norms

    def __call__(self, x):
        x = as_vec(x)
        coeffs = mdot(x[..., None, :], self.frame) / self.gram
        return coeffs @ self.frame
