"""SMOTE oversampling of the minority class.

Synthetic rows are interpolated between a minority sample and one of its
k nearest minority neighbours (exact Euclidean search). Apply this to
training partitions only.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_X_y

from .exceptions import ConfigError, InputError


def _nearest_neighbours(X, k, chunk=1024):
    """Indices of the k nearest other rows of X, nearest first."""
    sq = np.einsum("ij,ij->i", X, X)
    out = np.empty((len(X), k), dtype=np.int64)
    for lo in range(0, len(X), chunk):
        block = X[lo:lo + chunk]
        d2 = sq[lo:lo + chunk, None] + sq[None, :] - 2.0 * block @ X.T
        rows = np.arange(len(block))
        d2[rows, lo + rows] = np.inf
        # stable argsort keeps equal-distance neighbours in index order
        out[lo:lo + chunk] = np.argsort(d2, axis=1, kind="stable")[:, :k]
    return out


class SMOTE(BaseEstimator):
    """Synthetic minority oversampling.

    Parameters
    ----------
    k_neighbors : int, default=5
        Number of nearest minority neighbours to interpolate towards.
    target : int or None
        Minority count after resampling; ``None`` means the majority count.
    random_state : int, default=0
        Seed for base-sample, neighbour and gap draws.

    Attributes
    ----------
    sample_indices_ : ndarray of shape (n_synthetic, 2)
        Row indices (into the input) of the base sample and the neighbour
        each synthetic row was interpolated between.
    minority_class_ : label of the oversampled class.
    """

    def __init__(self, k_neighbors=5, target=None, random_state=0):
        self.k_neighbors = k_neighbors
        self.target = target
        self.random_state = random_state

    def fit_resample(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        classes, counts = np.unique(y, return_counts=True)
        if len(classes) != 2:
            raise InputError(f"SMOTE needs exactly two classes, got {len(classes)}")
        if self.k_neighbors < 1:
            raise ConfigError("k_neighbors must be at least 1")
        minority = classes[np.argmin(counts)] if counts[0] != counts[1] else classes[0]
        n_min, n_maj = counts.min(), counts.max()
        target = n_maj if self.target is None else int(self.target)
        if target < n_min:
            raise ConfigError(f"target {target} is below the current minority count {n_min}")
        self.minority_class_ = minority
        n_new = target - n_min
        if n_new == 0:
            self.sample_indices_ = np.empty((0, 2), dtype=np.int64)
            return X.copy(), y.copy()
        if n_min <= self.k_neighbors:
            raise ConfigError(
                f"minority class has {n_min} samples; k_neighbors={self.k_neighbors} "
                f"needs more, use k_neighbors <= {n_min - 1}"
            )
        idx = np.flatnonzero(y == minority)
        Xm = X[idx]
        nn = _nearest_neighbours(Xm, self.k_neighbors)
        rng = np.random.default_rng(self.random_state)
        base = rng.integers(0, n_min, size=n_new)
        pick = nn[base, rng.integers(0, self.k_neighbors, size=n_new)]
        gap = rng.uniform(0.0, 1.0, size=(n_new, 1))
        a, b = Xm[base], Xm[pick]
        synth = a + gap * (b - a)
        # rounding must not push a point off its segment
        synth = np.clip(synth, np.minimum(a, b), np.maximum(a, b))
        self.sample_indices_ = np.column_stack([idx[base], idx[pick]])
        X_out = np.vstack([X, synth])
        y_out = np.concatenate([y, np.full(n_new, minority, dtype=y.dtype)])
        return X_out, y_out


def smote(X, y, k_neighbors=5, target=None, rng_seed=0):
    """Functional form of :class:`SMOTE`; returns ``(X_resampled, y_resampled)``."""
    return SMOTE(k_neighbors=k_neighbors, target=target, random_state=rng_seed).fit_resample(X, y)
