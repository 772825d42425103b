"""Named parameter tensors with Adam state."""

import logging
from typing import Iterator

import numpy as np

from patkit.config.train import TrainConfig
from patkit.exceptions import DimensionError, NumericError

logger = logging.getLogger(__name__)

Gradients = dict[str, np.ndarray]


class ParamSet:
    """Ordered named tensors shared by every sub-network of a model.

    ``version`` increases with every in-place update so activation traces
    recorded before an update can be detected as stale.
    """

    def __init__(self, dtype: np.dtype | str = np.float64):
        self.dtype = np.dtype(dtype)
        self._tensors: dict[str, np.ndarray] = {}
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}
        self.step = 0
        self.version = 0

    def add(self, name: str, tensor: np.ndarray) -> np.ndarray:
        if name in self._tensors:
            raise ValueError(f"Parameter '{name}' already exists")
        array = np.array(tensor, dtype=self.dtype)
        self._tensors[name] = array
        self._m[name] = np.zeros_like(array)
        self._v[name] = np.zeros_like(array)
        return array

    def __getitem__(self, name: str) -> np.ndarray:
        return self._tensors[name]

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def items(self):
        return self._tensors.items()

    def names(self) -> list[str]:
        return list(self._tensors)

    def count(self) -> int:
        return sum(t.size for t in self._tensors.values())

    def zeros(self) -> Gradients:
        return {name: np.zeros_like(t) for name, t in self._tensors.items()}

    def set(self, name: str, value: np.ndarray) -> None:
        """Overwrite a parameter in place, keeping its shape."""
        value = np.asarray(value, dtype=self.dtype)
        if value.shape != self._tensors[name].shape:
            raise DimensionError(
                f"Parameter '{name}' has shape {self._tensors[name].shape}, got {value.shape}"
            )
        self._tensors[name][...] = value
        self.version += 1

    def state(self) -> dict[str, np.ndarray]:
        return {name: t.copy() for name, t in self._tensors.items()}

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        missing = set(self._tensors) - set(state)
        unexpected = set(state) - set(self._tensors)
        if missing or unexpected:
            raise DimensionError(
                f"Parameter names differ: missing {sorted(missing)}, unexpected {sorted(unexpected)}"
            )
        for name, value in state.items():
            self.set(name, value)

    def copy(self) -> 'ParamSet':
        clone = ParamSet(self.dtype)
        for name, tensor in self._tensors.items():
            clone.add(name, tensor)
            clone._m[name][...] = self._m[name]
            clone._v[name][...] = self._v[name]
        clone.step = self.step
        clone.version = self.version
        return clone


def adam_step(params: ParamSet, grads: Gradients, cfg: TrainConfig,
              names: list[str] | None = None) -> None:
    """One bias-corrected Adam update of ``names`` (all parameters by default)."""
    names = params.names() if names is None else names
    step = params.step + 1
    for name in names:
        if not np.all(np.isfinite(grads[name])):
            raise NumericError(f"gradient of '{name}'", step=step)
    params.step = step
    correction1 = 1.0 - cfg.beta1 ** step
    correction2 = 1.0 - cfg.beta2 ** step
    for name in names:
        grad = grads[name]
        m = params._m[name]
        v = params._v[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * grad
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * grad * grad
        params[name][...] -= cfg.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + cfg.eps)
    params.version += 1
