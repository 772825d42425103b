"""Time-reversal reconstruction and its iterative refinement."""

import logging

import numpy as np

from patkit.config.forward import ForwardConfig
from patkit.core.types import Image, SensorData
from patkit.exceptions import ConfigError, DivergenceError
from patkit.classical.backprojection import sensor_traces
from patkit.classical.results import SolverResult
from patkit.forward.matrix import ForwardMatrix
from patkit.forward.wave import WaveSolver

logger = logging.getLogger(__name__)

DIVERGENCE_RATIO = 10.0


def time_reversal(g: SensorData | np.ndarray, cfg: ForwardConfig) -> Image:
    """Replay the data backwards in time as a Dirichlet condition at the detectors."""
    return Image(WaveSolver(cfg).reverse(sensor_traces(g, cfg)))


def iterative_time_reversal(g: SensorData | np.ndarray, cfg: ForwardConfig, n_iter: int,
                            A: ForwardMatrix | None = None) -> SolverResult:
    """Correct the time-reversal image with time-reversed data residuals.

    The forward step uses ``A`` when given, otherwise the wave simulator.
    ``history`` holds the data residual norm of every iterate.
    """
    if n_iter < 1:
        raise ConfigError(f"n_iter must be at least 1, got {n_iter}")
    solver = WaveSolver(cfg)
    data = sensor_traces(g, cfg)

    def forward(f: np.ndarray) -> np.ndarray:
        if A is not None:
            return (A.entries @ f.reshape(-1)).reshape(data.shape)
        return solver.simulate(f)

    f = solver.reverse(data)
    residual = forward(f) - data
    history = [float(np.linalg.norm(residual))]
    for n in range(1, n_iter + 1):
        f = f - solver.reverse(residual)
        residual = forward(f) - data
        norm = float(np.linalg.norm(residual))
        history.append(norm)
        logger.debug("Iterative time reversal %d: residual %.4e", n, norm)
        if history[0] > 0 and norm > DIVERGENCE_RATIO * history[0]:
            raise DivergenceError("iterative time reversal", n, norm / history[0])
    return SolverResult(Image(f), history, n_iter)
