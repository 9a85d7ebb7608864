"""Soft-margin RBF support vector machine.

The dual is solved with sequential minimal optimisation using
second-order working-set selection; scores are mapped to [0, 1] with a
Platt sigmoid fitted on the training decision values.
"""

import logging

import numpy as np
from scipy.special import expit

from ..exceptions import ConfigError
from .base import StandardizedBinaryClassifier

logger = logging.getLogger(__name__)

_TAU = 1e-12


def rbf_kernel(A, B, coef):
    sq = (np.einsum("ij,ij->i", A, A)[:, None] + np.einsum("ij,ij->i", B, B)[None, :]
          - 2.0 * A @ B.T)
    return np.exp(-coef * np.maximum(sq, 0.0))


def dual_objective(alpha, K, y):
    """Dual objective ``sum(alpha) - 1/2 alpha^T Q alpha`` (to be maximised)."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def smo(K, y, C, tol=1e-3, max_iter=None):
    """Solve the box- and equality-constrained SVM dual.

    Parameters
    ----------
    K : (n, n) kernel matrix
    y : labels in {-1, +1}
    C : box constraint

    Returns
    -------
    alpha, rho, n_iter
        The decision function is ``sum_i alpha_i y_i K(x_i, x) - rho``.
    """
    n = len(y)
    if max_iter is None:
        max_iter = max(1_000_000, 100 * n)
    alpha = np.zeros(n)
    G = -np.ones(n)
    Kd = np.diag(K).copy()
    pos = y > 0
    it = 0
    while it < max_iter:
        yG = -y * G
        at_upper = alpha >= C
        at_lower = alpha <= 0
        up = np.where(pos, ~at_upper, ~at_lower)
        low = np.where(pos, ~at_lower, ~at_upper)
        if not up.any() or not low.any():
            break
        cand = np.where(up, yG, -np.inf)
        i = int(np.argmax(cand))
        g_max = cand[i]
        g_min = np.min(np.where(low, yG, np.inf))
        if g_max - g_min < tol:
            break
        Ki = K[i]
        grad_diff = g_max - yG
        ok = low & (grad_diff > 0)
        quad = Kd[i] + Kd - 2.0 * Ki
        quad = np.where(quad > 0, quad, _TAU)
        gain = np.where(ok, -(grad_diff ** 2) / quad, np.inf)
        j = int(np.argmin(gain))
        it += 1

        Kj = K[j]
        ai_old, aj_old = alpha[i], alpha[j]
        if y[i] != y[j]:
            q = Kd[i] + Kd[j] + 2.0 * y[i] * y[j] * Ki[j]
            q = q if q > 0 else _TAU
            delta = (-G[i] - G[j]) / q
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            q = Kd[i] + Kd[j] - 2.0 * Ki[j]
            q = q if q > 0 else _TAU
            delta = (G[i] - G[j]) / q
            total = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        # G = Q alpha - e with Q_it = y_i y_t K_it
        G += y * (y[i] * (ai - ai_old) * Ki + y[j] * (aj - aj_old) * Kj)
    else:
        logger.warning("SMO stopped at max_iter=%d before reaching tol=%g", max_iter, tol)

    yG = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        at_upper = alpha >= C
        ub_mask = np.where(at_upper, ~pos, pos)
        ub = yG[ub_mask].min() if ub_mask.any() else np.inf
        lb = yG[~ub_mask].max() if (~ub_mask).any() else -np.inf
        rho = float((ub + lb) / 2) if np.isfinite(ub) and np.isfinite(lb) else float(
            ub if np.isfinite(ub) else lb)
    return alpha, rho, it


def platt_fit(dec, y01, max_iter=100, min_step=1e-10, sigma=1e-12, eps=1e-5):
    """Fit ``P(y=1 | f) = 1 / (1 + exp(A f + B))`` by regularised Newton steps."""
    dec = np.asarray(dec, dtype=np.float64)
    n_pos = float(y01.sum())
    n_neg = float(len(y01) - n_pos)
    t = np.where(y01 > 0, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    def nll(a, b):
        f = dec * a + b
        return float(np.sum(np.logaddexp(0.0, f) - (1.0 - t) * f))

    a, b = 0.0, float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    fval = nll(a, b)
    for _ in range(max_iter):
        p = expit(-(dec * a + b))
        d1 = t - p
        d2 = p * (1.0 - p)
        g1, g2 = float(dec @ d1), float(d1.sum())
        if abs(g1) < eps and abs(g2) < eps:
            break
        h11 = float(dec * dec @ d2) + sigma
        h22 = float(d2.sum()) + sigma
        h21 = float(dec @ d2)
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= min_step:
            new_a, new_b = a + step * da, b + step * db
            new_f = nll(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                a, b, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            break
    return a, b


class RBFSVM(StandardizedBinaryClassifier):
    """Kernel SVM with ``K(a, b) = exp(-kernel_coef * |a - b|^2)``.

    Parameters
    ----------
    reg_strength : float
        Box constraint ``C``.
    kernel_coef : float or None
        RBF coefficient; ``None`` uses ``1 / n_features``.
    tol : float
        Maximal KKT violation at convergence.
    """

    kind = "svm"

    def __init__(self, reg_strength=1.0, kernel_coef=None, tol=1e-3, max_iter=None, random_state=None):
        self.reg_strength = reg_strength
        self.kernel_coef = kernel_coef
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y):
        X, y01 = self._validate_training(X, y)
        # solve on a canonical row order so the result ignores input order
        order = np.lexsort(np.column_stack([X, y01]).T[::-1])
        Z = self._standardize_fit(X[order])
        self._fit(Z, y01[order])
        alpha = np.empty_like(self.alpha_)
        alpha[order] = self.alpha_
        self.alpha_ = alpha
        return self

    def _fit(self, Z, y01):
        if not self.reg_strength > 0:
            raise ConfigError("reg_strength must be positive")
        coef = self.kernel_coef if self.kernel_coef is not None else 1.0 / Z.shape[1]
        if not coef > 0:
            raise ConfigError("kernel_coef must be positive")
        self.kernel_coef_ = float(coef)
        ys = 2.0 * y01 - 1.0
        K = rbf_kernel(Z, Z, coef)
        alpha, rho, n_iter = smo(K, ys, float(self.reg_strength), self.tol, self.max_iter)
        self.alpha_ = alpha
        self.n_iter_ = n_iter
        self.dual_objective_ = dual_objective(alpha, K, ys)
        sv = alpha > 0
        self.support_vectors_ = Z[sv]
        self.dual_coef_ = alpha[sv] * ys[sv]
        self.intercept_ = -rho
        train_dec = K[:, sv] @ self.dual_coef_ + self.intercept_
        self.platt_a_, self.platt_b_ = platt_fit(train_dec, y01)

    def _decision(self, Z):
        if len(self.dual_coef_) == 0:
            return np.full(len(Z), self.intercept_)
        return rbf_kernel(Z, self.support_vectors_, self.kernel_coef_) @ self.dual_coef_ + self.intercept_

    def _proba(self, d):
        return expit(-(self.platt_a_ * d + self.platt_b_))

    def _state(self):
        return {
            "kernel_coef": self.kernel_coef_,
            "support_vectors": self.support_vectors_.tolist(),
            "dual_coef": self.dual_coef_.tolist(),
            "intercept": self.intercept_,
            "platt": [self.platt_a_, self.platt_b_],
        }

    def _load_state(self, state):
        self.kernel_coef_ = float(state["kernel_coef"])
        sv = np.asarray(state["support_vectors"], dtype=np.float64)
        self.support_vectors_ = sv.reshape(-1, self.n_features_in_)
        self.dual_coef_ = np.asarray(state["dual_coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
        self.platt_a_, self.platt_b_ = (float(v) for v in state["platt"])
