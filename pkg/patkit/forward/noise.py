import numpy as np

from patkit.core.rng import RngStream, normal_draws
from patkit.core.types import SensorData


def add_noise(g: SensorData, level: float, rng: RngStream) -> SensorData:
    """Additive white Gaussian noise with standard deviation ``level * max|g|``."""
    if level == 0:
        return g
    sigma = level * float(np.max(np.abs(g.data)))
    noise = normal_draws(rng, g.data.size, sigma).reshape(g.data.shape)
    return g.with_data(g.data + noise)
