"""Elastic-net logistic regression fitted by proximal gradient descent.

Objective on standardised inputs::

    mean(log(1 + exp(z)) - y*z) + (1/strength) * (l1_w * |w|_1 + l2_w/2 * |w|_2^2)

with ``z = X w + b``, the intercept unpenalised and
``l1_w = l1_ratio / (l1_ratio + l2_ratio)``, ``l2_w = l2_ratio / (l1_ratio + l2_ratio)``.
Both penalty terms are handled by the proximal step, so the step size
depends only on the logistic loss.
"""

import logging

import numpy as np
from scipy.special import expit

from ..exceptions import ConfigError
from .base import StandardizedBinaryClassifier, power_iteration_norm

logger = logging.getLogger(__name__)


def logistic_loss_grad(w, b, Z, y):
    """Mean logistic loss and its gradient with respect to ``(w, b)``."""
    z = Z @ w + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z)
    r = expit(z) - y
    return loss, Z.T @ r / len(y), r.mean()


def penalty_weights(l1_ratio, l2_ratio, strength):
    """Per-unit l1 and l2 penalty coefficients."""
    total = l1_ratio + l2_ratio
    if total == 0:
        return 0.0, 0.0
    return (l1_ratio / total) / strength, (l2_ratio / total) / strength


def _prox(v, step, l1, l2):
    shrunk = np.sign(v) * np.maximum(np.abs(v) - step * l1, 0.0) if l1 > 0 else v
    return shrunk / (1.0 + step * l2) if l2 > 0 else shrunk


class ElasticNetLogistic(StandardizedBinaryClassifier):
    """Logistic regression with lasso and ridge penalties.

    Parameters
    ----------
    reg_strength : float
        Inverse overall penalty strength; small values regularise hard.
    l1_ratio, l2_ratio : float
        Non-negative lasso and ridge weights, normalised to sum to one.
    max_iter : int
        Iteration cap for the accelerated proximal gradient loop.
    tol : float
        Stop once the objective changes by less than this.
    random_state : unused
        Accepted for interface parity; the solver is deterministic.
    """

    kind = "lr"

    def __init__(self, reg_strength=1.0, l1_ratio=0.5, l2_ratio=0.5, max_iter=5000, tol=1e-8,
                 random_state=None):
        self.reg_strength = reg_strength
        self.l1_ratio = l1_ratio
        self.l2_ratio = l2_ratio
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _objective(self, z, w, y, l1, l2):
        return (np.mean(np.logaddexp(0.0, z) - y * z)
                + l1 * np.abs(w).sum() + 0.5 * l2 * (w @ w))

    def _fit(self, Z, y):
        if not self.reg_strength > 0:
            raise ConfigError("reg_strength must be positive")
        if self.l1_ratio < 0 or self.l2_ratio < 0:
            raise ConfigError("l1_ratio and l2_ratio must be non-negative")
        l1, l2 = penalty_weights(self.l1_ratio, self.l2_ratio, self.reg_strength)
        n, d = Z.shape
        A = np.hstack([Z, np.ones((n, 1))])
        lipschitz = 1.1 * power_iteration_norm(A) ** 2 / (4.0 * n)
        step = 1.0 / max(lipschitz, 1e-12)

        w, b = np.zeros(d), 0.0
        zw = np.zeros(n)
        obj = self._objective(zw, w, y, l1, l2)
        w_prev, b_prev, zw_prev = w, b, zw
        t = 1.0
        converged = False
        it = 0
        while it < self.max_iter:
            it += 1
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            beta = (t - 1.0) / t_next
            wy = w + beta * (w - w_prev)
            by = b + beta * (b - b_prev)
            zy = zw + beta * (zw - zw_prev)
            r = expit(zy) - y
            w_new = _prox(wy - step * (Z.T @ r) / n, step, l1, l2)
            b_new = by - step * r.mean()
            zw_new = Z @ w_new + b_new
            obj_new = self._objective(zw_new, w_new, y, l1, l2)
            if obj_new > obj:
                if beta == 0.0:
                    # plain proximal step failed to descend: step estimate too long
                    step *= 0.5
                # restart momentum from the last accepted point
                w_prev, b_prev, zw_prev = w, b, zw
                t = 1.0
                continue
            w_prev, b_prev, zw_prev = w, b, zw
            w, b, zw = w_new, b_new, zw_new
            t = t_next
            change = obj - obj_new
            obj = obj_new
            if change < self.tol:
                converged = True
                break
        if not converged:
            logger.debug("elastic-net logistic regression stopped at max_iter=%d", self.max_iter)
        self.coef_ = w
        self.intercept_ = float(b)
        self.n_iter_ = it
        self.objective_ = float(obj)
        return self

    def _decision(self, Z):
        return Z @ self.coef_ + self.intercept_

    def _proba(self, d):
        return expit(d)

    def _state(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_}

    def _load_state(self, state):
        self.coef_ = np.asarray(state["coef"], dtype=np.float64)
        self.intercept_ = float(state["intercept"])
