import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..exceptions import InputError


def power_iteration_norm(A, n_iter=50):
    """Estimate of the largest singular value of ``A`` (deterministic start)."""
    v = np.ones(A.shape[1]) / np.sqrt(A.shape[1])
    s = 0.0
    for _ in range(n_iter):
        u = A.T @ (A @ v)
        s_new = np.linalg.norm(u)
        if s_new == 0:
            return 0.0
        v = u / s_new
        if abs(s_new - s) <= 1e-6 * s_new:
            s = s_new
            break
        s = s_new
    return float(np.sqrt(s))


class StandardizedBinaryClassifier(ClassifierMixin, BaseEstimator):
    """Binary classifier that z-scores its inputs with training statistics.

    Subclasses implement ``_fit(Z, y01)`` and ``_decision(Z)`` on
    standardised data, and ``_proba(decision)`` mapping decisions to the
    probability of the positive class (``classes_[1]``).
    """

    kind = ""

    def _validate_training(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        classes = np.unique(y)
        if len(classes) != 2:
            raise InputError(f"training labels must contain exactly two classes, got {classes.tolist()}")
        self.classes_ = classes
        self.n_features_in_ = X.shape[1]
        return X, (y == classes[1]).astype(np.float64)

    def _standardize_fit(self, X):
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        self.scale_ = scale
        return (X - self.mean_) / self.scale_

    def _standardize(self, X):
        check_is_fitted(self, "mean_")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 2 and X.shape[0] == 0:
            if X.shape[1] not in (0, self.n_features_in_):
                raise InputError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
            return np.empty((0, self.n_features_in_))
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise InputError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) / self.scale_

    def fit(self, X, y):
        X, y01 = self._validate_training(X, y)
        Z = self._standardize_fit(X)
        self._fit(Z, y01)
        return self

    def decision_function(self, X):
        Z = self._standardize(X)
        if len(Z) == 0:
            return np.empty(0)
        return self._decision(Z)

    def predict_proba(self, X):
        d = self.decision_function(X)
        p = self._proba(d) if len(d) else np.empty(0)
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        p = self.predict_proba(X)[:, 1]
        return self.classes_[(p >= 0.5).astype(int)]

    # serialisation hooks
    def _state(self):
        raise NotImplementedError

    def _load_state(self, state):
        raise NotImplementedError


def score(model, X):
    """Positive-class scores in [0, 1], one per row of ``X``."""
    X = np.asarray(X, dtype=np.float64)
    if X.size == 0 and (X.ndim < 2 or X.shape[0] == 0):
        return np.empty(0)
    return model.predict_proba(X)[:, 1]
