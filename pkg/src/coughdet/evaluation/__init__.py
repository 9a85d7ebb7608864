"""Patient-wise nested cross-validation, metrics and reporting."""

from .dataset import EventTable, FeatureStore, params_key, usable_events
from .folds import FoldPlan, make_folds, next_patient
from .metrics import (
    FPR_GRID,
    auc,
    auc_spread,
    confusion_metrics,
    interpolate_roc,
    mean_roc,
    roc_curve,
    trapezoid,
)
from .report import (
    EvalReport,
    FoldResult,
    aggregate,
    build_report,
    evaluate_external,
    report_csv,
    roc_csv,
)
from .search import (
    DESK_CLASSIFIER_GRID,
    DESK_FEATURE_GRID,
    FULL_CLASSIFIER_GRID,
    FULL_FEATURE_GRID,
    HyperConfig,
    evaluate_grid,
    expand,
    grid_search,
    joint_grid,
    select,
)


def nested_cv(table, store, modality, feature_grid, classifier_grid, smote_k=5, seed=0, threads=1,
              threshold=0.5, dev_rule=next_patient):
    """Leave-one-patient-out CV with per-fold selection on a development patient.

    Returns ``(report, runs)``; ``runs`` carries the raw per-config
    outcomes and the event-id trace of every stage.
    """
    folds = make_folds(table.patient_ids, dev_rule)
    configs = joint_grid(modality, feature_grid, classifier_grid)
    runs = evaluate_grid(table, store, folds, configs, smote_k=smote_k, seed=seed, threads=threads)
    return build_report(table, folds, runs, configs, threshold), runs


__all__ = [
    "DESK_CLASSIFIER_GRID", "DESK_FEATURE_GRID", "EvalReport", "EventTable", "FPR_GRID",
    "FULL_CLASSIFIER_GRID", "FULL_FEATURE_GRID", "FeatureStore", "FoldPlan", "FoldResult",
    "HyperConfig", "aggregate", "auc", "auc_spread", "build_report", "confusion_metrics",
    "evaluate_external", "evaluate_grid", "expand", "grid_search", "interpolate_roc", "joint_grid",
    "make_folds", "mean_roc", "nested_cv", "next_patient", "params_key", "report_csv", "roc_csv",
    "roc_curve", "select", "trapezoid", "usable_events",
]
