"""Fourier-domain reconstruction for a line of detectors along the top edge."""

import logging

import numpy as np
from scipy import fft

from patkit.config.forward import Aperture, ForwardConfig
from patkit.core.types import Image, SensorData
from patkit.exceptions import ConfigError
from patkit.classical.backprojection import sensor_traces
from patkit.forward.geometry import detector_pitch, detector_positions

logger = logging.getLogger(__name__)


def propagating_mask(k1: np.ndarray, omega: np.ndarray, c: float) -> np.ndarray:
    """Boolean mask of the propagating cone |omega| / c > |k1|."""
    return np.abs(omega) / c > np.abs(k1)


def fill_columns(traces: np.ndarray, cfg: ForwardConfig) -> np.ndarray:
    """Interpolate detector traces onto every column of the top row."""
    pitch = detector_pitch(cfg)
    if pitch == 1:
        return traces
    cols = detector_positions(cfg)[:, 1].astype(np.float64)
    grid = np.arange(cfg.m, dtype=np.float64)
    return np.stack([np.interp(grid, cols, traces[:, k]) for k in range(cfg.n_t)], axis=1)


def fft_planar_recon(g: SensorData | np.ndarray, cfg: ForwardConfig) -> Image:
    if cfg.aperture != Aperture.Top.value:
        raise ConfigError("Fourier reconstruction requires the planar top-line aperture")
    traces = fill_columns(sensor_traces(g, cfg), cfg)
    m, n_t, c = cfg.m, cfg.n_t, cfg.c

    # even extension in time turns the Fourier transform into a cosine transform
    extended = np.concatenate([traces, traces[:, -2:0:-1]], axis=1)
    n_ext = extended.shape[1]
    spectrum = fft.fft2(extended)
    k1 = 2 * np.pi * fft.fftfreq(m)
    omega = 2 * np.pi * fft.fftfreq(n_ext, d=cfg.dt)

    K1, W = np.meshgrid(k1, omega, indexing='ij')
    mask = propagating_mask(K1, W, c)
    with np.errstate(divide='ignore', invalid='ignore'):
        factor = np.where(mask, np.sqrt(np.maximum((W / c) ** 2 - K1 ** 2, 0.0)) / np.abs(W), 0.0)
    spectrum = spectrum * factor

    # remap omega -> c |k| onto a uniform depth-frequency grid (image even-extended in depth)
    n_z = 2 * m
    kz = 2 * np.pi * fft.fftfreq(n_z)
    positive = slice(0, n_ext // 2 + 1)
    omega_pos = np.abs(omega[positive])
    target = c * np.sqrt(k1[:, None] ** 2 + kz[None, :] ** 2)
    remapped = np.empty((m, n_z), dtype=complex)
    for row in range(m):
        line = spectrum[row, positive]
        remapped[row] = (np.interp(target[row], omega_pos, line.real, right=0.0)
                         + 1j * np.interp(target[row], omega_pos, line.imag, right=0.0))

    image = fft.ifft2(remapped).real.T[:m, :]
    logger.debug("Fourier reconstruction on %d x %d spectrum", m, n_ext)
    return Image(image)
