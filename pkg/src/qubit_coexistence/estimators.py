"""scikit-learn style front end.

Rows of ``X`` are effect pairs laid out as ``[e0, e1, e2, e3, f0, f1, f2, f3]``
(or single effects with 4 columns for :class:`SharpnessTransformer`).  All
estimators are stateless apart from input bookkeeping; ``fit`` only validates.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import oracle
from ._validation import check_effects, check_pairs
from .coexistence import decide_arrays
from .construction import construct_joint
from .exceptions import NotCoexistent
from .invariants import sharpness_arrays
from .minkowski import DEFAULT_TOL

CRITERIA = ("decide", "thm3", "cor1", "thm4", "yu")


class _PairEstimator(BaseEstimator):
    def fit(self, X, y=None):
        check_pairs(X, self.tol)
        self.n_features_in_ = 8
        return self

    def _pairs(self, X):
        check_is_fitted(self, "n_features_in_")
        return check_pairs(X, self.tol)


class CoexistenceClassifier(ClassifierMixin, _PairEstimator):
    """Closed-form coexistence verdicts.

    Parameters
    ----------
    criterion : {"decide", "thm3", "cor1", "thm4", "yu"}
        ``decide`` routes comparable and commuting pairs to the trivial
        verdict before applying the main inequality; the others apply one
        criterion to every pair.
    tol : float
        Effect validation and trivial-route tolerance.
    """

    def __init__(self, criterion: str = "decide", tol: float = DEFAULT_TOL):
        self.criterion = criterion
        self.tol = tol

    def fit(self, X, y=None):
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        self.classes_ = np.array([False, True])
        return super().fit(X, y)

    def _evaluate(self, X):
        E, F = self._pairs(X)
        return decide_arrays(E, F, tol=self.tol)

    def predict(self, X):
        out = self._evaluate(X)
        key = "verdict" if self.criterion == "decide" else self.criterion
        return np.asarray(out[key], dtype=bool)

    def decision_function(self, X):
        """Signed criterion margin; nonnegative means coexistent.

        For ``yu`` on sharp pairs, where the formula is undefined, the
        commutation rule's margin ``tol - |e x f|`` is used.
        """
        out = self._evaluate(X)
        if self.criterion in ("decide", "thm3"):
            return out["margin"]
        if self.criterion == "yu":
            cross = out["invariants"]["cross"]
            return np.where(out["yu_guarded"], self.tol - cross, out["yu_margin"])
        return out[f"{self.criterion}_margin"]


class OracleClassifier(ClassifierMixin, _PairEstimator):
    """Verdicts from direct maximization of the joint-observable positivity margin."""

    def __init__(self, tol: float = oracle.DEFAULT_TOL, budget: int = oracle.DEFAULT_BUDGET):
        self.tol = tol
        self.budget = budget

    def fit(self, X, y=None):
        self.classes_ = np.array([False, True])
        return super().fit(X, y)

    def _solve(self, X):
        E, F = self._pairs(X)
        return oracle.solve_batch(E, F, tol=self.tol, budget=self.budget)

    def predict(self, X):
        return self._solve(X)["feasible"]

    def decision_function(self, X):
        return self._solve(X)["best_margin"]


class JointObservableBuilder(TransformerMixin, _PairEstimator):
    """Map each coexistent pair to its joint observable ``(g1, g2, g3, g4)``.

    Output rows hold 16 Pauli coefficients, four per outcome.  Pairs that are
    not coexistent raise :class:`NotCoexistent` unless
    ``on_incompatible="nan"``, in which case their row is all NaN.
    """

    def __init__(self, lambda_policy="geometric", tol: float = DEFAULT_TOL, on_incompatible: str = "raise"):
        self.lambda_policy = lambda_policy
        self.tol = tol
        self.on_incompatible = on_incompatible

    def fit(self, X, y=None):
        if self.on_incompatible not in ("raise", "nan"):
            raise ValueError("on_incompatible must be 'raise' or 'nan'")
        return super().fit(X, y)

    def transform(self, X):
        E, F = self._pairs(X)
        out = np.full((len(E), 16), np.nan)
        for i, (e, f) in enumerate(zip(E, F)):
            try:
                J = construct_joint(e, f, policy=self.lambda_policy, tol=self.tol)
            except NotCoexistent:
                if self.on_incompatible == "raise":
                    raise
                continue
            out[i] = np.concatenate([g.coeffs for g in J.effects])
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array([f"g{k}_{c}" for k in range(1, 5) for c in range(4)], dtype=object)


class SharpnessTransformer(TransformerMixin, BaseEstimator):
    """Effects ``(n, 4)`` to ``[F, S, bias]`` columns."""

    def __init__(self, tol: float = DEFAULT_TOL):
        self.tol = tol

    def fit(self, X, y=None):
        check_effects(X, self.tol)
        self.n_features_in_ = 4
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        s = sharpness_arrays(check_effects(X, self.tol))
        return np.column_stack([s["F"], s["S"], s["bias"]])

    def get_feature_names_out(self, input_features=None):
        return np.array(["F", "S", "bias"], dtype=object)
