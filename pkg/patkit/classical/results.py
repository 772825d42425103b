from dataclasses import dataclass, field

import numpy as np

from patkit.core.types import Image


@dataclass(frozen=True)
class SolverResult:
    """Final iterate of an iterative solver with its per-iteration history.

    ``history[0]`` is the value at the initial iterate; ``iterations`` counts
    the updates actually performed.
    """

    image: Image
    history: list[float] = field(default_factory=list)
    iterations: int = 0
    converged_early: bool = False

    @property
    def data(self) -> np.ndarray:
        return self.image.data

    def __array__(self, dtype=None, copy=None):
        return self.image.__array__(dtype)


class EarlyStopper:
    """Stops when the relative decrease stays below ``tol`` for ``patience`` iterations in a row."""

    def __init__(self, tol: float | None, patience: int = 5):
        self.tol = tol
        self.patience = patience
        self._streak = 0

    def update(self, previous: float, current: float) -> bool:
        if self.tol is None:
            return False
        scale = max(abs(previous), np.finfo(float).tiny)
        if (previous - current) / scale < self.tol:
            self._streak += 1
        else:
            self._streak = 0
        return self._streak >= self.patience
