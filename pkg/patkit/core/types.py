"""Immutable numeric containers shared by every module.

Images are m x m grids with spacing h = 1; sensor data are n_det x n_t
pressure traces. Both own a read-only copy of their array so they can be
shared across threads.
"""

from dataclasses import dataclass, field

import numpy as np

from patkit.exceptions import DimensionError, NumericError

MAX_TENSOR_NDIM = 4


def _frozen(data: np.ndarray, dtype=np.float64) -> np.ndarray:
    array = np.array(data, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Image:
    """Initial pressure distribution on a square grid."""

    data: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.data)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise DimensionError(f"Image must be a square 2D grid, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise NumericError("image")
        object.__setattr__(self, 'data', _frozen(array, np.result_type(array.dtype, np.float32)))

    @property
    def m(self) -> int:
        return self.data.shape[0]

    def flatten(self) -> np.ndarray:
        return self.data.reshape(-1)

    @classmethod
    def from_vector(cls, vector: np.ndarray, m: int) -> 'Image':
        vector = np.asarray(vector)
        if vector.size != m * m:
            raise DimensionError(f"Cannot reshape {vector.size} values into a {m}x{m} image")
        return cls(vector.reshape(m, m))

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


@dataclass(frozen=True)
class SensorData:
    """Pressure time series recorded at the detector nodes.

    ``detectors`` holds the (row, col) grid position of every detector in
    physical-image coordinates; ``fingerprint`` identifies the forward
    geometry that produced the data, when known.
    """

    data: np.ndarray
    dt: float
    detectors: np.ndarray
    fingerprint: str | None = field(default=None, compare=False)

    def __post_init__(self):
        array = np.asarray(self.data)
        if array.ndim != 2:
            raise DimensionError(f"Sensor data must be n_det x n_t, got shape {array.shape}")
        detectors = np.asarray(self.detectors, dtype=np.int64)
        if detectors.shape != (array.shape[0], 2):
            raise DimensionError(
                f"Detector map must have shape ({array.shape[0]}, 2), got {detectors.shape}"
            )
        if not np.all(np.isfinite(array)):
            raise NumericError("sensor data")
        object.__setattr__(self, 'data', _frozen(array, np.result_type(array.dtype, np.float32)))
        object.__setattr__(self, 'detectors', _frozen(detectors, np.int64))

    @property
    def n_det(self) -> int:
        return self.data.shape[0]

    @property
    def n_t(self) -> int:
        return self.data.shape[1]

    def flatten(self) -> np.ndarray:
        return self.data.reshape(-1)

    def with_data(self, data: np.ndarray) -> 'SensorData':
        return SensorData(np.asarray(data).reshape(self.data.shape), self.dt, self.detectors, self.fingerprint)

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)


def as_tensor(data, dtype=None) -> np.ndarray:
    """Return ``data`` as a finite ndarray with at most four axes."""
    array = np.asarray(data, dtype=dtype)
    if array.ndim > MAX_TENSOR_NDIM:
        raise DimensionError(f"Tensors have at most {MAX_TENSOR_NDIM} axes, got {array.ndim}")
    if not np.all(np.isfinite(array)):
        raise NumericError("tensor")
    return array
