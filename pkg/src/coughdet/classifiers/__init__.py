"""Shallow classifiers sharing the scikit-learn estimator interface."""

from ..exceptions import ConfigError
from .base import StandardizedBinaryClassifier, score
from .external import ExternalScores, read_scores
from .logistic import ElasticNetLogistic, logistic_loss_grad
from .mlp import OneLayerMLP, mlp_loss_grad
from .persistence import load_model, model_from_dict, model_to_dict, save_model
from .svm import RBFSVM, dual_objective, rbf_kernel, smo

CLASSIFIERS = {
    "lr": ElasticNetLogistic,
    "svm": RBFSVM,
    "mlp": OneLayerMLP,
}


def make_classifier(kind, **hyperparameters):
    try:
        cls = CLASSIFIERS[kind]
    except KeyError:
        raise ConfigError(f"unknown classifier {kind!r}; choose from {sorted(CLASSIFIERS)}") from None
    return cls(**hyperparameters)


def train_lr(X, y, reg_strength, l1_ratio, l2_ratio, seed=0):
    return ElasticNetLogistic(reg_strength=reg_strength, l1_ratio=l1_ratio, l2_ratio=l2_ratio,
                              random_state=seed).fit(X, y)


def train_svm(X, y, reg_strength, kernel_coef, seed=0):
    return RBFSVM(reg_strength=reg_strength, kernel_coef=kernel_coef, random_state=seed).fit(X, y)


def train_mlp(X, y, l2_penalty, n_hidden, seed=0):
    return OneLayerMLP(l2_penalty=l2_penalty, n_hidden=n_hidden, random_state=seed).fit(X, y)


__all__ = [
    "CLASSIFIERS", "ElasticNetLogistic", "ExternalScores", "OneLayerMLP", "RBFSVM",
    "StandardizedBinaryClassifier", "dual_objective", "load_model", "logistic_loss_grad",
    "make_classifier", "mlp_loss_grad", "model_from_dict", "model_to_dict", "rbf_kernel",
    "read_scores", "save_model", "score", "smo", "train_lr", "train_mlp", "train_svm",
]
