"""Backprojection-type reconstructions: delay-and-sum, adjoint, and 2D universal backprojection."""

import logging
from typing import Callable

import numpy as np

from patkit.config.forward import ForwardConfig
from patkit.core.types import Image, SensorData
from patkit.exceptions import DimensionError, GeometryError, NumericError
from patkit.forward.geometry import (
    aperture_angle,
    detector_normals,
    detector_positions,
    geometry_fingerprint,
    pixel_coordinates,
    surface_element,
)
from patkit.forward.matrix import ForwardMatrix, apply_adjoint

logger = logging.getLogger(__name__)

Weight = Callable[[np.ndarray], np.ndarray]


def sensor_traces(g: SensorData | np.ndarray, cfg: ForwardConfig) -> np.ndarray:
    """Detector traces as an (n_det, n_t) float array matching ``cfg``."""
    if isinstance(g, SensorData):
        if g.fingerprint is not None and g.fingerprint != geometry_fingerprint(cfg):
            raise GeometryError(geometry_fingerprint(cfg), g.fingerprint)
        g = g.data
    traces = np.asarray(g, dtype=np.float64)
    expected = (cfg.detector_count, cfg.n_t)
    if traces.size != expected[0] * expected[1]:
        raise DimensionError(f"Sensor data of shape {traces.shape} does not match geometry {expected}")
    return traces.reshape(expected)


def _distances(cfg: ForwardConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Detector positions, pixel coordinates and (n_det, M) distances."""
    sensors = detector_positions(cfg).astype(np.float64)
    pixels = pixel_coordinates(cfg.m)
    diff = pixels[None, :, :] - sensors[:, None, :]
    return sensors, diff, np.linalg.norm(diff, axis=-1)


def _interpolate_rows(traces: np.ndarray, index: np.ndarray) -> np.ndarray:
    """Linear interpolation of each trace at fractional sample positions; zero beyond the record."""
    n_t = traces.shape[1]
    lower = np.floor(index).astype(np.int64)
    frac = index - lower
    inside = lower <= n_t - 1
    lo = np.clip(lower, 0, n_t - 1)
    hi = np.clip(lower + 1, 0, n_t - 1)
    upper_ok = (lower + 1) <= n_t - 1
    values = (1 - frac) * np.take_along_axis(traces, lo, axis=1)
    values += np.where(upper_ok, frac * np.take_along_axis(traces, hi, axis=1), 0.0)
    return np.where(inside, values, 0.0)


def backproject(g: SensorData | np.ndarray, cfg: ForwardConfig) -> Image:
    """Delay-and-sum: every detector trace evaluated at the pixel's travel time."""
    traces = sensor_traces(g, cfg)
    _, _, dist = _distances(cfg)
    delays = dist / cfg.c / cfg.dt
    image = _interpolate_rows(traces, delays).sum(axis=0)
    return Image(image.reshape(cfg.m, cfg.m))


def adjoint_recon(A: ForwardMatrix, g: SensorData | np.ndarray) -> Image:
    return apply_adjoint(A, g)


def _ubp_kernel(tau: np.ndarray, times: np.ndarray, dt: float) -> np.ndarray:
    """Quadrature weights of the integral of q(t) / sqrt(t^2 - tau^2) over t > tau.

    Samples more than half a step past the singularity use the midpoint rule;
    the first of them absorbs the exact integral over the skipped interval.
    Rows are pixels, columns are time samples.
    """
    tau = tau[:, None]
    t = times[None, :]
    with np.errstate(divide='ignore', invalid='ignore'):
        weights = np.where(t >= tau + 0.5 * dt, dt / np.sqrt(t * t - tau * tau), 0.0)
        first = np.argmax(t >= tau + 0.5 * dt, axis=1)
        has_first = (times[-1] >= tau[:, 0] + 0.5 * dt) & (tau[:, 0] > 0)
        rows = np.nonzero(has_first)[0]
        t_first = times[first[rows]]
        weights[rows, first[rows]] = np.arccosh((t_first + 0.5 * dt) / tau[rows, 0])
    weights[tau[:, 0] <= 0] = 0.0
    return weights


def ubp2d(g: SensorData | np.ndarray, cfg: ForwardConfig, weight: Weight | None = None) -> Image:
    """Two-dimensional universal backprojection.

    ``weight`` maps detector-pixel distances to the weighting factor; it
    defaults to the distance itself.
    """
    traces = sensor_traces(g, cfg)
    weight = weight or (lambda r: r)
    sensors, diff, dist = _distances(cfg)
    normals = detector_normals(cfg)
    times = cfg.dt * np.arange(cfg.n_t)

    scaled = np.zeros_like(traces)
    scaled[:, 1:] = traces[:, 1:] / times[1:]
    derivative = np.gradient(scaled, cfg.dt, axis=1)

    prefactor = -4.0 / (aperture_angle(cfg) * cfg.c ** 2) * surface_element(cfg)
    image = np.zeros(cfg.n_pixels)
    for s in range(len(sensors)):
        r = dist[s]
        with np.errstate(divide='ignore', invalid='ignore'):
            cos_alpha = np.where(r > 0, diff[s] @ normals[s] / r, 0.0)
        integral = _ubp_kernel(r / cfg.c, times, cfg.dt) @ derivative[s]
        image += weight(r) * cos_alpha * integral
    image *= prefactor
    if not np.all(np.isfinite(image)):
        raise NumericError("universal backprojection")
    return Image(image.reshape(cfg.m, cfg.m))
