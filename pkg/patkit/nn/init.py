import numpy as np

from patkit.core.rng import RngStream
from patkit.nn.layers import LayerSpec


def glorot_uniform(spec: LayerSpec, rng: RngStream) -> np.ndarray:
    """Uniform in [-s, s] with s = sqrt(6 / (fan_in + fan_out))."""
    fan_in, fan_out = spec.fans
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    size = int(np.prod(spec.weight_shape))
    return rng.uniform(size, -limit, limit).reshape(spec.weight_shape)


def initial_weight(spec: LayerSpec, rng: RngStream) -> np.ndarray:
    if spec.zero_init:
        return np.zeros(spec.weight_shape)
    return glorot_uniform(spec, rng)
