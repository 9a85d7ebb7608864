"""Fold results, aggregated reports and their JSON/CSV forms."""

import csv
import io
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InputError
from .metrics import FPR_GRID, auc, auc_spread, confusion_metrics, mean_roc, roc_curve
from .search import HyperConfig, select

THRESHOLD_NOTE = ("Spec/Sens/Acc use a fixed score threshold; the operating point is a "
                  "modelling choice and is not tuned per fold.")

CSV_COLUMNS = ["ID", "Modality", "Classifier", "Feature hyperparameters", "Classifier hyperparameters",
               "Spec", "Sens", "Acc", "AUC", "sigma_AUC"]


@dataclass
class FoldResult:
    fold_id: int
    test_patient: str
    dev_patient: str
    config: HyperConfig
    event_ids: np.ndarray
    scores: np.ndarray
    labels: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float
    spec: float
    sens: float
    acc: float
    dev_auc: float = float("nan")

    @classmethod
    def from_scores(cls, fold_id, test_patient, dev_patient, config, event_ids, scores, labels,
                    threshold=0.5, dev_auc=float("nan")):
        scores = np.asarray(scores, dtype=np.float64)
        labels = np.asarray(labels)
        fpr, tpr, _ = roc_curve(scores, labels)
        spec, sens, acc = confusion_metrics(scores, labels, threshold)
        return cls(fold_id, test_patient, dev_patient, config, np.asarray(event_ids), scores, labels,
                   fpr, tpr, auc(scores, labels), spec, sens, acc, float(dev_auc))

    def to_dict(self):
        return {
            "fold_id": self.fold_id, "test_patient": self.test_patient, "dev_patient": self.dev_patient,
            "config": self.config.to_dict() if self.config is not None else None,
            "dev_auc": None if not np.isfinite(self.dev_auc) else self.dev_auc,
            "auc": self.auc, "spec": self.spec, "sens": self.sens, "acc": self.acc,
            "roc": {"fpr": self.fpr.tolist(), "tpr": self.tpr.tolist()},
            "event_ids": self.event_ids.tolist(), "scores": self.scores.tolist(),
            "labels": self.labels.astype(int).tolist(),
        }


@dataclass
class EvalReport:
    """Cross-validated summary of one system."""

    folds: list
    mean_auc: float
    std_auc: float
    spec: float
    sens: float
    acc: float
    roc_fpr: np.ndarray
    roc_tpr: np.ndarray
    best_config: HyperConfig = None
    best_config_auc: float = float("nan")
    systems: list = field(default_factory=list)
    config_table: list = field(default_factory=list)

    def to_dict(self):
        return {
            "mean_auc": self.mean_auc, "std_auc": self.std_auc,
            "spec": self.spec, "sens": self.sens, "acc": self.acc,
            "mean_roc": {"fpr": self.roc_fpr.tolist(), "tpr": self.roc_tpr.tolist()},
            "best_config": self.best_config.to_dict() if self.best_config else None,
            "best_config_auc": None if not np.isfinite(self.best_config_auc) else self.best_config_auc,
            "folds": [f.to_dict() for f in self.folds],
            "systems": self.systems,
            "configs": self.config_table,
        }


def aggregate(fold_results, grid=FPR_GRID):
    """Average fold metrics; the mean ROC is the vertical average on ``grid``."""
    if not fold_results:
        raise InputError("no fold results to aggregate")
    aucs = [f.auc for f in fold_results]
    fpr, tpr = mean_roc([(f.fpr, f.tpr) for f in fold_results], grid)
    return EvalReport(
        folds=list(fold_results),
        mean_auc=float(np.mean(aucs)),
        std_auc=auc_spread(aucs),
        spec=float(np.mean([f.spec for f in fold_results])),
        sens=float(np.mean([f.sens for f in fold_results])),
        acc=float(np.mean([f.acc for f in fold_results])),
        roc_fpr=fpr,
        roc_tpr=tpr,
    )


def _mode(values):
    """Most frequent value; earliest first appearance wins ties."""
    counts = Counter(values)
    top = max(counts.values())
    return next(v for v in values if counts[v] == top)


def _fmt_params(params):
    """Space-separated ``k=v`` pairs in key order, so JSON round trips format identically."""
    return " ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in sorted(params))


def _fold_result(table, fold, k, outcome, threshold):
    test = table.mask([fold.test_patient])
    return FoldResult.from_scores(k, fold.test_patient, fold.dev_patient, outcome.config,
                                  table.event_ids[test], outcome.test_scores, table.labels[test],
                                  threshold, outcome.dev_auc)


def build_report(table, folds, runs, configs, threshold=0.5):
    """Nested-CV report for one modality.

    The headline result selects the joint config per fold on dev AUC.
    Each (classifier, feature setting) pair also gets a summary row whose
    classifier hyperparameters are selected per fold within that pair.
    """
    chosen = []
    for k, (fold, run) in enumerate(zip(folds, runs)):
        best = select(run.outcomes)
        chosen.append(_fold_result(table, fold, k, run.outcomes[best], threshold))
    report = aggregate(chosen)

    # per-config mean test AUC over folds (reported, never used for selection)
    config_table = []
    for i, cfg in enumerate(configs):
        vals = [run.outcomes[i] for run in runs]
        tests = []
        for fold, o in zip(folds, vals):
            if np.all(np.isfinite(o.test_scores)):
                tests.append(auc(o.test_scores, table.labels[table.mask([fold.test_patient])]))
            else:
                tests.append(float("nan"))
        config_table.append({"config": cfg.to_dict(), "label": cfg.label,
                             "mean_dev_auc": float(np.mean([o.dev_auc for o in vals])),
                             "mean_test_auc": float(np.mean(tests))})
    means = np.array([row["mean_test_auc"] for row in config_table])
    means = np.where(np.isfinite(means), means, -np.inf)
    b = int(np.argmax(means))
    report.best_config, report.best_config_auc = configs[b], float(means[b])
    report.config_table = config_table

    groups = {}
    for i, cfg in enumerate(configs):
        groups.setdefault((cfg.classifier, cfg.features), []).append(i)
    counters = Counter()
    systems = []
    modality = configs[0].modality
    for (kind, features), idx in groups.items():
        counters[kind] += 1
        results, picks = [], []
        for k, (fold, run) in enumerate(zip(folds, runs)):
            sub = [run.outcomes[i] for i in idx]
            j = select(sub)
            picks.append(sub[j].config.params)
            results.append(_fold_result(table, fold, k, sub[j], threshold))
        agg = aggregate(results)
        systems.append({
            "id": f"{modality.upper()}-{kind.upper()}-{counters[kind]}",
            "modality": modality, "classifier": kind,
            "feature_params": dict(features),
            "classifier_params": dict(_mode(picks)),
            "spec": agg.spec, "sens": agg.sens, "acc": agg.acc,
            "auc": agg.mean_auc, "std_auc": agg.std_auc,
            "fold_aucs": [r.auc for r in results],
            "mean_roc": {"fpr": agg.roc_fpr.tolist(), "tpr": agg.roc_tpr.tolist()},
        })
    # the nested (jointly selected) result as its own row
    systems.append({
        "id": f"{modality.upper()}-SELECTED", "modality": modality, "classifier": _mode(
            [f.config.classifier for f in chosen]),
        "feature_params": dict(_mode([f.config.features for f in chosen])),
        "classifier_params": dict(_mode([f.config.params for f in chosen])),
        "spec": report.spec, "sens": report.sens, "acc": report.acc,
        "auc": report.mean_auc, "std_auc": report.std_auc,
        "fold_aucs": [f.auc for f in chosen],
        "mean_roc": {"fpr": report.roc_fpr.tolist(), "tpr": report.roc_tpr.tolist()},
    })
    report.systems = systems
    return report


def evaluate_external(table, scores, folds, threshold=0.5):
    """Per-fold metrics for scores produced outside this package.

    ``scores`` is anything with ``scores_for(event_ids)``; each fold is
    evaluated on its test patient only.
    """
    results = []
    for k, fold in enumerate(folds):
        test = table.mask([fold.test_patient])
        ids = table.event_ids[test]
        results.append(FoldResult.from_scores(k, fold.test_patient, fold.dev_patient, None, ids,
                                              scores.scores_for(ids), table.labels[test], threshold))
    return aggregate(results)


def report_csv(report_dict):
    """Summary table (one row per system) from a report dictionary."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    buf.write(f"# threshold={report_dict['header']['threshold']:g}; {THRESHOLD_NOTE}\n")
    w.writerow(CSV_COLUMNS)
    for modality in sorted(report_dict["modalities"]):
        for row in report_dict["modalities"][modality]["systems"]:
            w.writerow([
                row["id"], row["modality"], row["classifier"],
                _fmt_params(row["feature_params"].items()),
                _fmt_params(row["classifier_params"].items()),
                f"{row['spec']:.4f}", f"{row['sens']:.4f}", f"{row['acc']:.4f}",
                f"{row['auc']:.4f}", f"{row['std_auc']:.4f}",
            ])
    return buf.getvalue()


def roc_csv(report_dict):
    """Mean ROC points for every system, long format."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ID", "fpr", "tpr"])
    for modality in sorted(report_dict["modalities"]):
        for row in report_dict["modalities"][modality]["systems"]:
            for x, y in zip(row["mean_roc"]["fpr"], row["mean_roc"]["tpr"]):
                w.writerow([row["id"], f"{x:.4f}", f"{y:.6f}"])
    return buf.getvalue()
