"""Feature vectors from tap tensors, plus per-feature min-max scaling."""

from dataclasses import dataclass, replace

import numpy as np

from . import lpio


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureMatrix:
    """n x d feature rows with class labels, tagged by tap origin."""

    data: np.ndarray      # (n, d) float32
    labels: np.ndarray    # (n,) class ids
    tap: int = 0
    layer_name: str = ""

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ShapeError(f"data must be 2-D, got {self.data.shape}")
        if len(self.labels) != self.data.shape[0]:
            raise ShapeError(
                f"{len(self.labels)} labels for {self.data.shape[0]} rows"
            )

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def d(self):
        return self.data.shape[1]

    def save(self, path):
        lpio.save_feature_matrix(path, self)

    @classmethod
    def load(cls, path):
        data, labels, tap, layer_name = lpio.load_feature_matrix(path)
        return cls(data=data, labels=labels, tap=tap, layer_name=layer_name)


def flatten(tap):
    """Tap tensor -> 1-D vector in storage order (channel-major, row-major)."""
    return np.ascontiguousarray(tap, dtype=np.float32).reshape(-1)


def unflatten(vec, dims):
    return np.asarray(vec, dtype=np.float32).reshape(dims)


@dataclass(frozen=True)
class MinMaxScaler:
    mins: np.ndarray
    maxs: np.ndarray


def minmax_fit(train):
    """Per-feature min/max over the training rows."""
    if train.n < 1:
        raise ShapeError("cannot fit scaler on an empty matrix")
    return MinMaxScaler(
        mins=train.data.min(axis=0).astype(np.float64),
        maxs=train.data.max(axis=0).astype(np.float64),
    )


def minmax_transform(scaler, m):
    """x' = (x - min) / (max - min); constant features map to 0; no clipping."""
    if m.d != len(scaler.mins):
        raise ShapeError(f"scaler has {len(scaler.mins)} features, matrix has {m.d}")
    span = scaler.maxs - scaler.mins
    safe = np.where(span > 0, span, 1.0)
    scaled = (m.data.astype(np.float64) - scaler.mins) / safe
    scaled[:, span == 0] = 0.0
    return replace(m, data=scaled.astype(np.float32))
