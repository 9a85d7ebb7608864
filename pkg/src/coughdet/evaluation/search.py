"""Hyperparameter grids, per-fold grid search and nested cross-validation."""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from ..balance import SMOTE
from ..classifiers import make_classifier, score
from ..exceptions import ConfigError, InputError
from .metrics import auc

logger = logging.getLogger(__name__)

MODALITIES = ("accel", "audio")


def _decades(lo, hi):
    return tuple(float(10.0 ** k) for k in range(lo, hi + 1))


def _steps(lo, hi, step):
    n = int(round((hi - lo) / step))
    return tuple(round(lo + i * step, 10) for i in range(n + 1))


FULL_FEATURE_GRID = {
    "accel": {"frame_len": (16, 32, 64), "n_segments": (5, 10)},
    "audio": {
        "n_mfcc": (13, 26, 39, 52, 65),
        "frame_len": (256, 512, 1024, 2048, 4096),
        "n_segments": (50, 70, 100, 120, 150),
    },
}

FULL_CLASSIFIER_GRID = {
    "lr": {"reg_strength": _decades(-7, 7), "l1_ratio": _steps(0.0, 1.0, 0.05),
           "l2_ratio": _steps(0.0, 1.0, 0.05)},
    "svm": {"reg_strength": _decades(-7, 7), "kernel_coef": _decades(-7, 7)},
    "mlp": {"l2_penalty": _steps(0.0, 1.0, 0.05), "n_hidden": tuple(range(10, 101, 10))},
}

# Desk-scale truncation: the full cross-product is far too large for one machine.
DESK_FEATURE_GRID = {
    "accel": {"frame_len": (16, 32), "n_segments": (5, 10)},
    "audio": {"n_mfcc": (13, 26), "frame_len": (512, 1024), "n_segments": (50,)},
}

DESK_CLASSIFIER_GRID = {
    "lr": {"reg_strength": (1e2, 1e4), "l1_ratio": (0.5,), "l2_ratio": (0.5,)},
    "mlp": {"l2_penalty": (0.1,), "n_hidden": (10,)},
}


def expand(spec):
    """Cross-product of a ``{name: values}`` mapping, in key then value order."""
    names = list(spec)
    for name in names:
        if len(spec[name]) == 0:
            raise ConfigError(f"grid for {name!r} is empty")
    return [dict(zip(names, combo)) for combo in itertools.product(*(spec[n] for n in names))]


@dataclass(frozen=True)
class HyperConfig:
    """One point of the joint feature x classifier grid."""

    modality: str
    features: tuple
    classifier: str
    params: tuple

    @classmethod
    def make(cls, modality, features, classifier, params):
        return cls(modality, tuple(features.items()), classifier, tuple(params.items()))

    @property
    def feature_params(self):
        return dict(self.features)

    @property
    def classifier_params(self):
        return dict(self.params)

    @property
    def label(self):
        f = ",".join(f"{k}={v}" for k, v in self.features)
        c = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in self.params)
        return f"{self.modality}/{self.classifier}[{f}|{c}]"

    def to_dict(self):
        return {"modality": self.modality, "features": self.feature_params,
                "classifier": self.classifier, "params": self.classifier_params}

    @classmethod
    def from_dict(cls, d):
        return cls.make(d["modality"], d["features"], d["classifier"], d["params"])


def joint_grid(modality, feature_grid, classifier_grid):
    """All configs for one modality, feature-major then classifier kind in mapping order."""
    if modality not in MODALITIES:
        raise ConfigError(f"unknown modality {modality!r}")
    if not classifier_grid:
        raise ConfigError("classifier grid is empty")
    configs = []
    for feats in expand(feature_grid):
        for kind, spec in classifier_grid.items():
            for params in expand(spec):
                configs.append(HyperConfig.make(modality, feats, kind, params))
    return configs


def _group_by_features(configs):
    groups = {}
    for i, cfg in enumerate(configs):
        groups.setdefault(cfg.features, []).append(i)
    return groups


def derive_seed(*parts):
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


@dataclass
class ConfigOutcome:
    """Dev and test results of one config on one fold."""

    config: HyperConfig
    dev_auc: float
    test_scores: np.ndarray
    error: str = ""


@dataclass
class FoldRun:
    fold_index: int
    outcomes: list = field(default_factory=list)
    trace: list = field(default_factory=list)


def _fit_and_score(cfg, X_fit, y_fit, X_dev, y_dev, X_test, seed):
    try:
        model = make_classifier(cfg.classifier, random_state=seed, **cfg.classifier_params)
        model.fit(X_fit, y_fit)
        dev_scores = score(model, X_dev)
        dev = auc(dev_scores, y_dev)
        test_scores = score(model, X_test)
        if not (np.all(np.isfinite(dev_scores)) and np.all(np.isfinite(test_scores))):
            raise FloatingPointError("non-finite scores")
        return ConfigOutcome(cfg, float(dev), test_scores)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        logger.warning("config %s failed: %s", cfg.label, exc)
        return ConfigOutcome(cfg, -np.inf, np.full(len(X_test), np.nan), error=str(exc))


def run_fold_features(fold, fold_index, table, X, configs, smote_k=5, seed=0, feature_index=0):
    """Evaluate ``configs`` (sharing one feature setting) on one fold.

    SMOTE is applied once to the training patients' rows; every classifier
    is fit on the balanced set, scored on the dev patient for selection,
    and on the test patient for reporting.
    """
    train = table.mask(fold.train_patients)
    dev = table.mask([fold.dev_patient])
    test = table.mask([fold.test_patient])
    run = FoldRun(fold_index)
    ids = table.event_ids
    run.trace.append(("smote", tuple(ids[train])))
    X_fit, y_fit = SMOTE(k_neighbors=smote_k, random_state=derive_seed(seed, fold_index, feature_index)
                         ).fit_resample(X[train], table.labels[train])
    run.trace.append(("fit", tuple(ids[train])))
    run.trace.append(("dev", tuple(ids[dev])))
    run.trace.append(("test", tuple(ids[test])))
    for cfg in configs:
        run.outcomes.append(_fit_and_score(cfg, X_fit, y_fit, X[dev], table.labels[dev], X[test],
                                           derive_seed(seed, fold_index)))
    return run


def select(outcomes):
    """Index of the highest dev AUC; the earliest wins ties."""
    if not outcomes:
        raise ConfigError("no configs evaluated")
    best = 0
    for i, o in enumerate(outcomes):
        if o.dev_auc > outcomes[best].dev_auc:
            best = i
    return best


def check_patients(table, patients):
    for p in patients:
        labels = table.labels[table.patient_ids == p]
        if len(np.unique(labels)) != 2:
            raise InputError(f"patient {p!r} needs both cough and non-cough events for ROC analysis")


def evaluate_grid(table, store, folds, configs, smote_k=5, seed=0, threads=1):
    """Run every config on every fold. Returns one :class:`FoldRun` per fold.

    Feature settings are the outer loop so only one set of feature matrices
    is held in memory; folds run in parallel within each setting and are
    reduced in fold order.
    """
    check_patients(table, sorted(set(table.patient_ids)))
    runs = [FoldRun(i) for i in range(len(folds))]
    outcomes = [[None] * len(configs) for _ in folds]
    groups = _group_by_features(configs)
    for f_index, (features, idx) in enumerate(groups.items()):
        modality = configs[idx[0]].modality
        X = store.matrix(modality, dict(features))
        sub = [configs[i] for i in idx]
        parts = Parallel(n_jobs=threads, prefer="threads")(
            delayed(run_fold_features)(fold, k, table, X, sub, smote_k, seed, f_index)
            for k, fold in enumerate(folds)
        )
        for k, part in enumerate(parts):
            for i, o in zip(idx, part.outcomes):
                outcomes[k][i] = o
            runs[k].trace.extend(part.trace)
        store.release(modality, dict(features))
        logger.info("features %s done", configs[idx[0]].label.split("|")[0])
    for k in range(len(folds)):
        runs[k].outcomes = outcomes[k]
    return runs


def grid_search(fold, table, store, configs, smote_k=5, seed=0):
    """Config with the highest AUC on the fold's dev patient."""
    if not configs:
        raise ConfigError("grid is empty")
    run = evaluate_grid(table, store, [fold], configs, smote_k=smote_k, seed=seed)[0]
    return configs[select(run.outcomes)]
