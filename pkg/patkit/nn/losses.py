import numpy as np

from patkit.exceptions import DimensionError
from patkit.nn.params import Gradients, ParamSet


def mse_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean squared difference and its gradient with respect to ``pred``."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DimensionError(f"Prediction shape {pred.shape} does not match target {target.shape}")
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size


def l1_penalty(params: ParamSet, weight: float, names: list[str] | None = None) -> tuple[float, Gradients]:
    """``weight * ||theta||_1`` over ``names`` and its subgradient."""
    names = params.names() if names is None else names
    if weight == 0:
        return 0.0, {name: np.zeros_like(params[name]) for name in names}
    value = weight * sum(float(np.abs(params[name]).sum()) for name in names)
    return value, {name: weight * np.sign(params[name]) for name in names}
