"""Event tables and a feature store that computes each configuration once."""

import logging
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..features.extractors import make_extractor
from ..features.matrix import read_matrix, write_matrix
from ..signals import label_to_int, load_events, read_manifest

logger = logging.getLogger(__name__)


@dataclass
class EventTable:
    """Parallel arrays describing a set of events, plus the events themselves."""

    event_ids: np.ndarray
    patient_ids: np.ndarray
    labels: np.ndarray
    events: list

    @classmethod
    def from_events(cls, events):
        return cls(
            event_ids=np.array([e.event_id for e in events]),
            patient_ids=np.array([e.patient_id for e in events]),
            labels=np.array([label_to_int(e.label) for e in events], dtype=np.int64),
            events=list(events),
        )

    @classmethod
    def from_manifest(cls, manifest, **load_kwargs):
        """Load every event of a manifest, given as a path or as parsed records."""
        if isinstance(manifest, (str, os.PathLike)):
            manifest = read_manifest(manifest)
        return cls.from_events(load_events(manifest, **load_kwargs))

    def __len__(self):
        return len(self.event_ids)

    def mask(self, patients):
        return np.isin(self.patient_ids, list(patients))

    def subset(self, keep):
        keep = np.asarray(keep)
        idx = np.flatnonzero(keep) if keep.dtype == bool else keep
        return EventTable(self.event_ids[idx], self.patient_ids[idx], self.labels[idx],
                          [self.events[i] for i in idx])


def params_key(params):
    return ",".join(f"{k}={params[k]}" for k in sorted(params))


def min_samples_for(modality, params):
    return int(params["frame_len"])


def usable_events(table, feature_grids):
    """Mask of events long enough for every frame length in the grids."""
    keep = np.ones(len(table), dtype=bool)
    for modality, grid in feature_grids.items():
        need = max(min_samples_for(modality, p) for p in grid)
        lengths = np.array([len(getattr(e, modality).samples) for e in table.events])
        keep &= lengths >= need
    return keep


class FeatureStore:
    """Flattened feature matrices for every event in a table.

    Matrices are memoised per (modality, feature parameters) and, with a
    ``cache_dir``, persisted as ``<cache_dir>/<modality>/<params>/<event_id>.bin``.
    """

    def __init__(self, table, cache_dir=None):
        self.table = table
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._memo = {}

    def path_for(self, event_id, modality, params):
        return self.cache_dir / modality / params_key(params) / f"{event_id}.bin"

    def _one(self, event, modality, params, extractor):
        if self.cache_dir is not None:
            path = self.path_for(event.event_id, modality, params)
            if path.exists():
                return read_matrix(path)
            mat = extractor.transform_matrices([event])[0]
            write_matrix(path, mat)
            return mat
        return extractor.transform_matrices([event])[0]

    def matrix(self, modality, params):
        key = (modality, params_key(params))
        if key not in self._memo:
            extractor = make_extractor(modality, **params).fit()
            rows = [self._one(ev, modality, params, extractor).reshape(-1) for ev in self.table.events]
            self._memo[key] = np.vstack(rows) if rows else np.empty((0, extractor.n_features_out_))
            logger.debug("features %s %s: %s", modality, key[1], self._memo[key].shape)
        return self._memo[key]

    def release(self, modality, params):
        self._memo.pop((modality, params_key(params)), None)
