"""Detector placement for the supported apertures.

Detector coordinates are (row, col) in the physical image grid; row 0 is
the top edge, rows grow with depth.
"""

import numpy as np

from patkit.config.forward import Aperture, ForwardConfig
from patkit.exceptions import ConfigError


def detector_positions(cfg: ForwardConfig) -> np.ndarray:
    m = cfg.m
    if cfg.aperture == Aperture.Full.value:
        top = [(0, j) for j in range(m - 1)]
        right = [(i, m - 1) for i in range(m - 1)]
        bottom = [(m - 1, j) for j in range(m - 1, 0, -1)]
        left = [(i, 0) for i in range(m - 1, 0, -1)]
        return np.array(top + right + bottom + left, dtype=np.int64)
    pitch = detector_pitch(cfg)
    cols = pitch // 2 + pitch * np.arange(cfg.detector_count)
    return np.stack([np.zeros_like(cols), cols], axis=1).astype(np.int64)


def detector_pitch(cfg: ForwardConfig) -> int:
    """Spacing of the top-line detectors in pixels."""
    if cfg.aperture != Aperture.Top.value:
        raise ConfigError("A uniform detector pitch is only defined for the top line aperture")
    if cfg.m % cfg.detector_count != 0:
        raise ConfigError(
            f"{cfg.detector_count} detectors do not divide the {cfg.m}-pixel top edge evenly"
        )
    return cfg.m // cfg.detector_count


def detector_normals(cfg: ForwardConfig) -> np.ndarray:
    """Unit inward normals (d_row, d_col) at each detector."""
    positions = detector_positions(cfg)
    if cfg.aperture == Aperture.Top.value:
        return np.tile(np.array([1.0, 0.0]), (len(positions), 1))
    m = cfg.m
    normals = np.zeros((len(positions), 2))
    normals[positions[:, 0] == 0, 0] += 1.0
    normals[positions[:, 0] == m - 1, 0] -= 1.0
    normals[positions[:, 1] == 0, 1] += 1.0
    normals[positions[:, 1] == m - 1, 1] -= 1.0
    return normals / np.linalg.norm(normals, axis=1, keepdims=True)


def aperture_angle(cfg: ForwardConfig) -> float:
    """Angle subtended by the detection surface, seen from inside the image."""
    return 2 * np.pi if cfg.aperture == Aperture.Top.value else 4 * np.pi


def surface_element(cfg: ForwardConfig) -> float:
    if cfg.aperture == Aperture.Top.value:
        return float(detector_pitch(cfg))
    return 1.0


def pixel_coordinates(m: int) -> np.ndarray:
    """(M, 2) array of (row, col) coordinates in row-major pixel order."""
    rows, cols = np.meshgrid(np.arange(m), np.arange(m), indexing='ij')
    return np.stack([rows.ravel(), cols.ravel()], axis=1).astype(np.float64)


def geometry_fingerprint(cfg: ForwardConfig) -> str:
    """Stable hash of everything that determines the forward matrix entries."""
    from patkit.core.hashing import default_hasher
    return default_hasher.hash_obj(cfg.geometry_dict())
