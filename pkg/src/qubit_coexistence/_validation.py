"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import NotAnEffect
from .minkowski import DEFAULT_TOL, eigenvalues


def check_effects(X, tol: float = DEFAULT_TOL, name: str = "X") -> np.ndarray:
    """Validate an ``(n, 4)`` array of Pauli coefficients, each row an effect."""
    X = check_array(X, dtype=np.float64, ensure_2d=True, input_name=name)
    if X.shape[1] != 4:
        raise ValueError(f"{name} must have 4 columns (Pauli coefficients), got {X.shape[1]}")
    lo, hi = eigenvalues(X)
    bad = (lo < -tol) | (hi > 1.0 + tol)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NotAnEffect(float(lo[i]), float(hi[i]), f"row {i} of {name} is not an effect: "
                          f"eigenvalues ({lo[i]:.6g}, {hi[i]:.6g}) outside [0, 1]")
    return X


def check_pairs(X, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Split an ``(n, 8)`` array into validated ``(E, F)`` halves."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 8:
        raise ValueError(f"pair arrays need 8 columns (e coeffs then f coeffs), got {X.shape[1]}")
    return check_effects(X[:, :4], tol, "e"), check_effects(X[:, 4:], tol, "f")
