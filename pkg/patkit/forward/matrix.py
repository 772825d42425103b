"""Explicit matrix of the forward model.

Rows are detector-major: row ``det * n_t + k`` holds sample k of detector
``det``; columns follow the row-major pixel order of the image.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from patkit.config.forward import ForwardConfig
from patkit.core.io import read_tensor, write_tensor
from patkit.core.rng import RngStream
from patkit.core.types import Image, SensorData
from patkit.exceptions import DimensionError, FormatError, GeometryError, SizeError
from patkit.forward.geometry import detector_positions, geometry_fingerprint
from patkit.forward.wave import WaveSolver

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = '.cfg'


@dataclass(frozen=True)
class ForwardMatrix:
    entries: np.ndarray
    config: ForwardConfig
    fingerprint: str = field(default='')

    def __post_init__(self):
        expected = (self.config.n_samples, self.config.n_pixels)
        if self.entries.shape != expected:
            raise DimensionError(
                f"Forward matrix has shape {self.entries.shape}, configuration implies {expected}"
            )
        if not self.fingerprint:
            object.__setattr__(self, 'fingerprint', geometry_fingerprint(self.config))
        self.entries.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def data_shape(self) -> tuple[int, int]:
        return self.config.detector_count, self.config.n_t

    def forward_batch(self, images: np.ndarray) -> np.ndarray:
        """Apply A to a stack of flattened images (B, M) -> (B, T)."""
        return images @ self.entries.T

    def adjoint_batch(self, data: np.ndarray) -> np.ndarray:
        """Apply A^T to a stack of flattened data (B, T) -> (B, M)."""
        return data @ self.entries

    def normal(self, images: np.ndarray) -> np.ndarray:
        return self.adjoint_batch(self.forward_batch(images))


def _assemble_chunk(solver: WaveSolver, columns: np.ndarray, start: int, stop: int) -> None:
    m = solver.cfg.m
    count = stop - start
    impulses = np.zeros((count, m * m))
    impulses[np.arange(count), np.arange(start, stop)] = 1.0
    traces = solver.simulate(impulses.reshape(count, m, m))
    columns[:, start:stop] = traces.reshape(count, -1).T


def assemble_matrix(cfg: ForwardConfig) -> ForwardMatrix:
    """Simulate every unit impulse and store the detector traces as columns."""
    cfg.check()
    if cfg.matrix_bytes() > cfg.memory_cap_bytes:
        raise SizeError(
            f"Forward matrix needs {cfg.matrix_bytes()} bytes, above the cap of {cfg.memory_cap_bytes}"
        )
    solver = WaveSolver(cfg)
    entries = np.empty((cfg.n_samples, cfg.n_pixels))
    bounds = [(start, min(start + cfg.chunk_size, cfg.n_pixels))
              for start in range(0, cfg.n_pixels, cfg.chunk_size)]
    logger.info("Assembling %dx%d forward matrix in %d chunks on %d workers",
                *entries.shape, len(bounds), cfg.workers)
    if cfg.workers == 1:
        for start, stop in bounds:
            _assemble_chunk(solver, entries, start, stop)
            logger.debug("Assembled columns %d..%d", start, stop - 1)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_assemble_chunk, solver, entries, start, stop) for start, stop in bounds]
            for future in futures:
                future.result()
    return ForwardMatrix(entries, cfg)


def _flat_image(A: ForwardMatrix, f) -> np.ndarray:
    array = np.asarray(f.data if isinstance(f, Image) else f, dtype=np.float64)
    if array.size != A.shape[1]:
        raise DimensionError(f"Image with {array.size} pixels does not match matrix with {A.shape[1]} columns")
    return array.reshape(-1)


def data_vector(A: ForwardMatrix, g: SensorData | np.ndarray) -> np.ndarray:
    """Flattened data, checked against the matrix geometry."""
    if isinstance(g, SensorData):
        if g.fingerprint is not None and g.fingerprint != A.fingerprint:
            raise GeometryError(A.fingerprint, g.fingerprint)
        g = g.data
    vector = np.asarray(g, dtype=np.float64).reshape(-1)
    if vector.size != A.shape[0]:
        raise DimensionError(f"Data with {vector.size} samples does not match matrix with {A.shape[0]} rows")
    return vector


def to_sensor_data(A: ForwardMatrix, vector: np.ndarray) -> SensorData:
    return SensorData(np.reshape(vector, A.data_shape), A.config.dt, detector_positions(A.config), A.fingerprint)


def apply_forward(A: ForwardMatrix, f: Image | np.ndarray) -> SensorData:
    return to_sensor_data(A, A.entries @ _flat_image(A, f))


def apply_adjoint(A: ForwardMatrix, g: SensorData | np.ndarray) -> Image:
    return Image((data_vector(A, g) @ A.entries).reshape(A.m, A.m))


def estimate_operator_norm(A: ForwardMatrix, n_iter: int = 50, rng: RngStream | None = None) -> float:
    """Largest singular value of A by power iteration on A^T A."""
    rng = rng or RngStream(0)
    x = rng.uniform(A.shape[1], -1.0, 1.0)
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(n_iter):
        y = A.entries.T @ (A.entries @ x)
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        sigma = np.sqrt(norm)
        x = y / norm
    return float(sigma)


def save_matrix(A: ForwardMatrix, path: str | os.PathLike) -> None:
    path = Path(path)
    write_tensor(path, np.asarray(A.entries))
    path.with_name(path.name + SIDECAR_SUFFIX).write_text(
        f"# fingerprint = {A.fingerprint}\n" + A.config.to_sidecar(), encoding='utf-8'
    )
    logger.info("Saved forward matrix %s to %s", A.shape, path)


def load_matrix(path: str | os.PathLike) -> ForwardMatrix:
    path = Path(path)
    sidecar = path.with_name(path.name + SIDECAR_SUFFIX)
    if not sidecar.exists():
        raise FormatError(f"Missing configuration sidecar {sidecar}")
    text = sidecar.read_text(encoding='utf-8')
    cfg = ForwardConfig.from_sidecar(text)
    entries = read_tensor(path).astype(np.float64)
    matrix = ForwardMatrix(entries, cfg)
    for line in text.splitlines():
        if line.startswith('# fingerprint ='):
            recorded = line.split('=', 1)[1].strip()
            if recorded != matrix.fingerprint:
                raise GeometryError(recorded, matrix.fingerprint)
    return matrix
