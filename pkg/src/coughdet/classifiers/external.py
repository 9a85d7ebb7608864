"""Pre-computed scores from models trained outside this package.

A scores file is CSV with a header row containing ``event_id`` and
``score`` columns; scores should lie in [0, 1].
"""

import csv
from pathlib import Path

import numpy as np

from ..exceptions import InputError, LoadError


def read_scores(path):
    path = Path(path)
    if not path.exists():
        raise LoadError(path, "scores file does not exist")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"event_id", "score"} <= set(reader.fieldnames):
            raise LoadError(path, "scores CSV needs 'event_id' and 'score' columns")
        try:
            return {row["event_id"]: float(row["score"]) for row in reader}
        except ValueError as exc:
            raise LoadError(path, f"non-numeric score ({exc})") from exc


class ExternalScores:
    """Lookup table standing in for a trained model."""

    kind = "external"

    def __init__(self, scores, name="external"):
        self.scores = dict(scores)
        self.name = name

    @classmethod
    def from_csv(cls, path, name=None):
        return cls(read_scores(path), name=name or Path(path).stem)

    def scores_for(self, event_ids):
        missing = [e for e in event_ids if e not in self.scores]
        if missing:
            raise InputError(f"no external score for {len(missing)} event(s), e.g. {missing[:3]}")
        return np.array([self.scores[e] for e in event_ids], dtype=np.float64)
