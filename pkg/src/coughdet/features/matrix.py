"""Per-event feature matrices and their binary on-disk format.

Format: two little-endian uint32 (rows, cols) followed by rows*cols
little-endian float64 values in row-major order.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .._io import atomic_write_bytes
from ..exceptions import InputError, LoadError

_HEADER = struct.Struct("<II")


@dataclass(frozen=True)
class FeatureMatrix:
    data: np.ndarray
    modality: str

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise InputError(f"feature matrix must be 2-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("feature matrix contains non-finite values")
        if self.modality not in ("accel", "audio"):
            raise InputError(f"unknown modality {self.modality!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def shape(self):
        return self.data.shape

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    def flatten(self):
        """Row-major vector used by the vector classifiers and SMOTE."""
        return self.data.reshape(-1)


def to_bytes(data):
    data = np.ascontiguousarray(data, dtype="<f8")
    rows, cols = data.shape
    return _HEADER.pack(rows, cols) + data.tobytes(order="C")


def from_bytes(raw, source="<bytes>"):
    if len(raw) < _HEADER.size:
        raise LoadError(source, "truncated feature matrix header")
    rows, cols = _HEADER.unpack_from(raw)
    expected = _HEADER.size + 8 * rows * cols
    if len(raw) != expected:
        raise LoadError(source, f"expected {expected} bytes for a {rows}x{cols} matrix, got {len(raw)}")
    return np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(rows, cols).astype(np.float64)


def write_matrix(path, data):
    if isinstance(data, FeatureMatrix):
        data = data.data
    atomic_write_bytes(path, to_bytes(np.asarray(data)))


def read_matrix(path):
    path = Path(path)
    if not path.exists():
        raise LoadError(path, "feature matrix file does not exist")
    return from_bytes(path.read_bytes(), source=path)
