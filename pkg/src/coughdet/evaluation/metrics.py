"""ROC, AUC, confusion metrics and mean-ROC aggregation."""

import numpy as np

from ..exceptions import InputError


def _check_binary(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise InputError(f"{len(scores)} scores but {len(labels)} labels")
    labels = labels.astype(bool) if labels.dtype != bool else labels
    n_pos = int(labels.sum())
    if n_pos == 0 or n_pos == len(labels):
        raise InputError("ROC analysis needs both positive and negative labels")
    return scores, labels


def _roc_counts(scores, labels):
    """Cumulative (fp, tp) counts at each distinct threshold, highest first."""
    order = np.argsort(-scores, kind="mergesort")
    s, lab = scores[order], labels[order]
    last = np.r_[np.flatnonzero(np.diff(s)), len(s) - 1]
    tp = np.cumsum(lab)[last]
    fp = (last + 1) - tp
    return np.r_[0, fp], np.r_[0, tp], s[last]


def roc_curve(scores, labels):
    """Points ``(fpr, tpr)`` of the ROC curve and the thresholds producing them.

    A sample is predicted positive when its score is ``>= threshold``. The
    curve starts at (0, 0) (threshold ``+inf``) and ends at (1, 1).
    """
    scores, labels = _check_binary(scores, labels)
    fp, tp, thr = _roc_counts(scores, labels)
    n_pos = labels.sum()
    n_neg = len(labels) - n_pos
    return fp / n_neg, tp / n_pos, np.r_[np.inf, thr]


def auc(scores, labels):
    """Trapezoidal area under the ROC curve.

    Summed in integer counts and divided once, so ties contribute exactly
    one half as in the Mann-Whitney statistic.
    """
    scores, labels = _check_binary(scores, labels)
    fp, tp, _ = _roc_counts(scores, labels)
    fp = fp.astype(np.int64)
    tp = tp.astype(np.int64)
    twice_area = int(np.sum(np.diff(fp) * (tp[1:] + tp[:-1])))
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    return twice_area / (2 * n_pos * n_neg)


def confusion_metrics(scores, labels, threshold=0.5):
    """``(specificity, sensitivity, accuracy)`` with positives at ``score >= threshold``."""
    scores, labels = _check_binary(scores, labels)
    pred = scores >= threshold
    tp = int(np.sum(pred & labels))
    tn = int(np.sum(~pred & ~labels))
    fp = int(np.sum(pred & ~labels))
    fn = int(np.sum(~pred & labels))
    return tn / (tn + fp), tp / (tp + fn), (tp + tn) / len(labels)


def interpolate_roc(fpr, tpr, grid):
    """TPR of a ROC curve at each FPR in ``grid``.

    Where the curve is vertical the upper point is taken; between
    distinct FPR values the curve is linear.
    """
    fpr = np.asarray(fpr, dtype=np.float64)
    tpr = np.asarray(tpr, dtype=np.float64)
    grid = np.asarray(grid, dtype=np.float64)
    idx = np.searchsorted(fpr, grid, side="right") - 1
    idx = np.clip(idx, 0, len(fpr) - 1)
    out = tpr[idx].copy()
    inner = (fpr[idx] < grid) & (idx + 1 < len(fpr))
    i = idx[inner]
    frac = (grid[inner] - fpr[i]) / (fpr[i + 1] - fpr[i])
    out[inner] = tpr[i] + frac * (tpr[i + 1] - tpr[i])
    return out


FPR_GRID = np.linspace(0.0, 1.0, 101)


def mean_roc(curves, grid=FPR_GRID):
    """Vertical average of several ``(fpr, tpr)`` curves on a fixed FPR grid."""
    if not curves:
        raise InputError("need at least one ROC curve")
    stacked = np.array([interpolate_roc(f, t, grid) for f, t in curves])
    return np.asarray(grid, dtype=np.float64), stacked.mean(axis=0)


def trapezoid(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def auc_spread(aucs):
    """Sample standard deviation of per-fold AUCs (0 for a single fold)."""
    aucs = np.asarray(aucs, dtype=np.float64)
    return float(aucs.std(ddof=1)) if len(aucs) > 1 else 0.0
