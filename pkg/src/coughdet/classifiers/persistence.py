"""Versioned JSON serialisation of trained classifiers."""

import json
from pathlib import Path

import numpy as np

from .._io import atomic_write_json
from ..exceptions import LoadError

FORMAT_VERSION = 1


def model_to_dict(model):
    return {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "hyperparameters": model.get_params(),
        "classes": np.asarray(model.classes_).tolist(),
        "n_features": int(model.n_features_in_),
        "standardization": {"mean": model.mean_.tolist(), "scale": model.scale_.tolist()},
        "weights": model._state(),
    }


def model_from_dict(obj):
    from . import CLASSIFIERS

    if obj.get("format_version") != FORMAT_VERSION:
        raise LoadError("<model>", f"unsupported model format version {obj.get('format_version')!r}")
    kind = obj.get("kind")
    if kind not in CLASSIFIERS:
        raise LoadError("<model>", f"unknown classifier kind {kind!r}")
    model = CLASSIFIERS[kind](**obj["hyperparameters"])
    model.classes_ = np.asarray(obj["classes"])
    model.n_features_in_ = int(obj["n_features"])
    model.mean_ = np.asarray(obj["standardization"]["mean"], dtype=np.float64)
    model.scale_ = np.asarray(obj["standardization"]["scale"], dtype=np.float64)
    model._load_state(obj["weights"])
    return model


def save_model(model, path, extra=None):
    obj = model_to_dict(model)
    if extra:
        obj["metadata"] = extra
    atomic_write_json(path, obj)


def load_model(path):
    path = Path(path)
    if not path.exists():
        raise LoadError(path, "model file does not exist")
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise LoadError(path, f"invalid JSON ({exc})") from exc
    try:
        return model_from_dict(obj)
    except LoadError as exc:
        raise LoadError(path, str(exc).split(": ", 1)[-1]) from exc
