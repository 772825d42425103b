"""Shared small geometries and matrices for the test suite."""

import numpy as np
import pytest

from patkit.config.forward import ForwardConfig
from patkit.config.train import NetworkConfig
from patkit.forward.matrix import assemble_matrix


@pytest.fixture(scope="session")
def tiny_cfg() -> ForwardConfig:
    """8 x 8 image, top line of 8 detectors."""
    return ForwardConfig(m=8, n_t=24, pad=4)


@pytest.fixture(scope="session")
def small_cfg() -> ForwardConfig:
    """16 x 16 image, top line of 16 detectors."""
    return ForwardConfig(m=16, n_t=48, pad=8)


@pytest.fixture(scope="session")
def ring_cfg() -> ForwardConfig:
    """16 x 16 image surrounded by detectors."""
    return ForwardConfig(m=16, n_t=48, pad=8, aperture="full")


@pytest.fixture(scope="session")
def tiny_matrix(tiny_cfg):
    return assemble_matrix(tiny_cfg)


@pytest.fixture(scope="session")
def small_matrix(small_cfg):
    return assemble_matrix(small_cfg)


@pytest.fixture(scope="session")
def ring_matrix(ring_cfg):
    return assemble_matrix(ring_cfg)


@pytest.fixture
def small_net_cfg() -> NetworkConfig:
    return NetworkConfig(n_iter=2, channels=4, unet_channels=(4, 8, 16), seed=3)


def gaussian_blob(m: int, center: tuple[float, float], sigma: float = 1.0) -> np.ndarray:
    rows, cols = np.mgrid[0:m, 0:m]
    return np.exp(-((rows - center[0]) ** 2 + (cols - center[1]) ** 2) / (2 * sigma ** 2))


@pytest.fixture
def blob():
    return gaussian_blob
