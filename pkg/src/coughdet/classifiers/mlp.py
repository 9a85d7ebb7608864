"""One-hidden-layer perceptron with ReLU units and a logistic output,
trained full-batch with L-BFGS on a hand-coded backpropagation gradient.
"""

import logging

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from ..exceptions import ConfigError
from .base import StandardizedBinaryClassifier

logger = logging.getLogger(__name__)

_KEYS = ("W1", "b1", "w2", "b2")


def init_params(n_in, n_hidden, rng):
    """Glorot-uniform weights, zero biases."""
    r1 = np.sqrt(6.0 / (n_in + n_hidden))
    r2 = np.sqrt(6.0 / (n_hidden + 1))
    return {
        "W1": rng.uniform(-r1, r1, size=(n_in, n_hidden)),
        "b1": np.zeros(n_hidden),
        "w2": rng.uniform(-r2, r2, size=n_hidden),
        "b2": 0.0,
    }


def forward(params, Z):
    pre = Z @ params["W1"] + params["b1"]
    hidden = np.maximum(pre, 0.0)
    return pre, hidden, hidden @ params["w2"] + params["b2"]


def mlp_loss_grad(params, Z, y, l2_penalty):
    """Penalised mean cross-entropy and its gradient (biases unpenalised)."""
    n = len(y)
    pre, hidden, out = forward(params, Z)
    W1, w2 = params["W1"], params["w2"]
    loss = (np.mean(np.logaddexp(0.0, out) - y * out)
            + 0.5 * l2_penalty * (np.sum(W1 * W1) + w2 @ w2))
    d_out = (expit(out) - y) / n
    d_hidden = np.outer(d_out, w2) * (pre > 0)
    grads = {
        "W1": Z.T @ d_hidden + l2_penalty * W1,
        "b1": d_hidden.sum(axis=0),
        "w2": hidden.T @ d_out + l2_penalty * w2,
        "b2": float(d_out.sum()),
    }
    return float(loss), grads


class OneLayerMLP(StandardizedBinaryClassifier):
    """Multilayer perceptron with a single hidden ReLU layer.

    Parameters
    ----------
    l2_penalty : float
        Weight of ``1/2 * |W|^2`` added to the mean cross-entropy.
    n_hidden : int
        Hidden units.
    max_iter : int
        L-BFGS iteration cap.
    tol : float
        Stop once the largest gradient component falls below this.
    random_state : int
        Seed for weight initialisation.
    """

    kind = "mlp"

    def __init__(self, l2_penalty=1e-4, n_hidden=50, max_iter=500, tol=1e-5, random_state=0):
        self.l2_penalty = l2_penalty
        self.n_hidden = n_hidden
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def _fit(self, Z, y):
        if self.l2_penalty < 0:
            raise ConfigError("l2_penalty must be non-negative")
        if self.n_hidden < 1:
            raise ConfigError("n_hidden must be at least 1")
        d, h = Z.shape[1], int(self.n_hidden)
        params = init_params(d, h, np.random.default_rng(self.random_state))
        sizes = [d * h, h, h, 1]
        cuts = np.cumsum(sizes)[:-1]

        def unpack(v):
            W1, b1, w2, b2 = np.split(v, cuts)
            return {"W1": W1.reshape(d, h), "b1": b1, "w2": w2, "b2": float(b2[0])}

        def fun(v):
            loss, grads = mlp_loss_grad(unpack(v), Z, y, self.l2_penalty)
            return loss, np.concatenate([np.ravel(grads[k]) for k in _KEYS])

        v0 = np.concatenate([np.ravel(params[k]) for k in _KEYS])
        res = minimize(fun, v0, jac=True, method="L-BFGS-B",
                       options={"maxiter": int(self.max_iter), "gtol": float(self.tol)})
        if not res.success:
            logger.debug("MLP optimiser stopped: %s", res.message)
        self.params_ = unpack(res.x)
        self.n_iter_ = int(res.nit)
        self.loss_ = float(res.fun)
        return self

    def _decision(self, Z):
        return forward(self.params_, Z)[2]

    def _proba(self, d):
        return expit(d)

    def _state(self):
        return {k: (np.asarray(v).tolist() if k != "b2" else float(v)) for k, v in self.params_.items()}

    def _load_state(self, state):
        self.params_ = {
            "W1": np.asarray(state["W1"], dtype=np.float64).reshape(self.n_features_in_, -1),
            "b1": np.asarray(state["b1"], dtype=np.float64),
            "w2": np.asarray(state["w2"], dtype=np.float64),
            "b2": float(state["b2"]),
        }
