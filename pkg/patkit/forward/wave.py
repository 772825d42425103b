"""Leapfrog finite-difference solver for the constant-speed wave equation.

The physical m x m grid is embedded in a padded grid of side m + 2 * pad.
The pad is a split-field perfectly matched layer: pressure is carried as a
row part and a column part, each damped only along its own axis, with the
particle velocity on the staggered edges between nodes. Where the damping
is zero the scheme reduces to the five-point leapfrog update. The field is
held at zero beyond the padded edge. All arrays carry leading batch axes
so many initial pressures can be propagated together.
"""

import logging
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from patkit.config.forward import ForwardConfig
from patkit.core.types import Image, SensorData
from patkit.exceptions import DimensionError, NumericError
from patkit.forward.geometry import detector_positions, geometry_fingerprint

logger = logging.getLogger(__name__)

ROW, COL = -2, -1


def laplacian(p: np.ndarray) -> np.ndarray:
    """Five-point Laplacian over the last two axes, zero outside the grid."""
    out = -4.0 * p
    out[..., 1:, :] += p[..., :-1, :]
    out[..., :-1, :] += p[..., 1:, :]
    out[..., :, 1:] += p[..., :, :-1]
    out[..., :, :-1] += p[..., :, 1:]
    return out


def edge_difference(p: np.ndarray, axis: int) -> np.ndarray:
    """Differences across the side + 1 edges along ``axis``, zero outside the grid."""
    return np.diff(p, axis=axis, prepend=0.0, append=0.0)


def sponge_profile(cfg: ForwardConfig, staggered: bool = False) -> np.ndarray:
    """Damping rate along one axis of the padded grid.

    Sampled at the nodes, or at the edges between them when ``staggered``.
    Zero on the physical region and rising quadratically to
    ``sponge_strength * c`` at the outer edge.
    """
    side = cfg.grid_side
    x = np.arange(side + 1) - 0.5 if staggered else np.arange(side, dtype=np.float64)
    if cfg.pad == 0 or cfg.sponge_strength == 0:
        return np.zeros_like(x)
    depth = np.maximum(cfg.pad - x, x - (cfg.pad + cfg.m - 1)).clip(0, cfg.pad)
    return cfg.sponge_strength * cfg.c * (depth / cfg.pad) ** 2


def discrete_energy(p_prev: np.ndarray, p_curr: np.ndarray, r2: float) -> np.ndarray:
    """Quantity conserved by undamped leapfrog between two consecutive fields, per batch item."""
    axes = (-2, -1)
    kinetic = 0.5 * np.sum((p_curr - p_prev) ** 2, axis=axes)
    potential = -0.5 * r2 * np.sum(p_curr * laplacian(p_prev), axis=axes)
    return kinetic + potential


@dataclass
class _Damping:
    """Update factors (1 - s) / (1 + s) and 1 / (1 + s) with s = rate * dt / 2."""

    keep: np.ndarray
    gain: np.ndarray

    @classmethod
    def along(cls, rate: np.ndarray, dt: float, axis: int) -> '_Damping':
        s = 0.5 * dt * rate
        shape = (-1, 1) if axis == ROW else (-1,)
        return cls(((1.0 - s) / (1.0 + s)).reshape(shape), (1.0 / (1.0 + s)).reshape(shape))


@dataclass
class _Field:
    """Split pressure on the nodes and scaled velocity c * u on the edges, per axis."""

    p_row: np.ndarray
    p_col: np.ndarray
    v_row: np.ndarray
    v_col: np.ndarray

    @property
    def pressure(self) -> np.ndarray:
        return self.p_row + self.p_col

    def assign(self, rows: np.ndarray, cols: np.ndarray, values: np.ndarray) -> None:
        self.p_row[..., rows, cols] = values
        self.p_col[..., rows, cols] = 0.0


class WaveSolver:
    """Propagates initial pressures and records them at the detector nodes."""

    def __init__(self, cfg: ForwardConfig):
        cfg.check()
        self.cfg = cfg
        self.courant = cfg.c * cfg.dt
        self.r2 = self.courant ** 2
        nodes, edges = sponge_profile(cfg), sponge_profile(cfg, staggered=True)
        self._node = {axis: _Damping.along(nodes, cfg.dt, axis) for axis in (ROW, COL)}
        self._edge = {axis: _Damping.along(edges, cfg.dt, axis) for axis in (ROW, COL)}
        self.detectors = detector_positions(cfg)
        self._rows = self.detectors[:, 0] + cfg.pad
        self._cols = self.detectors[:, 1] + cfg.pad
        self._inner = slice(cfg.pad, cfg.pad + cfg.m)

    def embed(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=np.float64)
        m = self.cfg.m
        if f.shape[-2:] != (m, m):
            raise DimensionError(f"Expected images of shape ({m}, {m}), got {f.shape}")
        padded = np.zeros(f.shape[:-2] + (self.cfg.grid_side,) * 2)
        padded[..., self._inner, self._inner] = f
        return padded

    def crop(self, p: np.ndarray) -> np.ndarray:
        return p[..., self._inner, self._inner]

    def sample(self, p: np.ndarray) -> np.ndarray:
        return p[..., self._rows, self._cols]

    def _update_pressure(self, field: _Field) -> None:
        row, col = self._node[ROW], self._node[COL]
        field.p_row = row.keep * field.p_row - row.gain * self.courant * np.diff(field.v_row, axis=ROW)
        field.p_col = col.keep * field.p_col - col.gain * self.courant * np.diff(field.v_col, axis=COL)

    def _start(self, p0: np.ndarray) -> _Field:
        """Field after the first step from rest: velocity at half a step, pressure at one step.

        Away from the layer the pressure is p0 + L p0 * r2 / 2.
        """
        field = _Field(
            p_row=p0.copy(),
            p_col=np.zeros_like(p0),
            v_row=-0.5 * self.courant * edge_difference(p0, ROW),
            v_col=-0.5 * self.courant * edge_difference(p0, COL),
        )
        self._update_pressure(field)
        return field

    def _advance(self, field: _Field, p_curr: np.ndarray) -> np.ndarray:
        row, col = self._edge[ROW], self._edge[COL]
        field.v_row = row.keep * field.v_row - row.gain * self.courant * edge_difference(p_curr, ROW)
        field.v_col = col.keep * field.v_col - col.gain * self.courant * edge_difference(p_curr, COL)
        self._update_pressure(field)
        return field.pressure

    def iterate(self, f: np.ndarray, n_steps: int | None = None) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        """Yield ``(k, p_prev, p_k)`` on the padded grid for k = 0 .. n_steps - 1.

        ``p_prev`` at k = 0 is the symmetric ghost field implied by zero
        initial velocity.
        """
        n_steps = self.cfg.n_t if n_steps is None else n_steps
        p_curr = self.embed(f)
        field = self._start(p_curr)
        p_next = field.pressure
        p_prev = p_next
        for k in range(n_steps):
            if k > 0:
                if k > 1:
                    p_next = self._advance(field, p_curr)
                if not np.all(np.isfinite(p_next)):
                    raise NumericError("wave field", step=k)
                p_prev, p_curr = p_curr, p_next
            yield k, p_prev, p_curr

    def simulate(self, f: np.ndarray) -> np.ndarray:
        """Detector traces of shape (..., n_det, n_t) for initial pressures (..., m, m)."""
        f = np.asarray(f, dtype=np.float64)
        traces = np.empty(f.shape[:-2] + (len(self.detectors), self.cfg.n_t))
        for k, _, p in self.iterate(f):
            traces[..., k] = self.sample(p)
        return traces

    def reverse(self, g: np.ndarray) -> np.ndarray:
        """Time-reversed field at the physical grid after n_t steps.

        Starts from rest and overwrites the detector nodes with the data
        played backwards at every step.
        """
        g = np.asarray(g, dtype=np.float64)
        n_det, n_t = len(self.detectors), self.cfg.n_t
        if g.shape[-2:] != (n_det, n_t):
            raise DimensionError(f"Expected sensor data of shape ({n_det}, {n_t}), got {g.shape}")
        side = self.cfg.grid_side
        p_curr = np.zeros(g.shape[:-2] + (side, side))
        p_curr[..., self._rows, self._cols] = g[..., n_t - 1]
        field = None
        for j in range(1, n_t):
            if field is None:
                field = self._start(p_curr)
            else:
                self._advance(field, p_curr)
            field.assign(self._rows, self._cols, g[..., n_t - 1 - j])
            p_curr = field.pressure
            if not np.all(np.isfinite(p_curr)):
                raise NumericError("time-reversed field", step=j)
        return self.crop(p_curr)


def simulate_wave(f: Image | np.ndarray, cfg: ForwardConfig) -> SensorData:
    image = f if isinstance(f, Image) else Image(np.asarray(f))
    if image.m != cfg.m:
        raise DimensionError(f"Image side {image.m} does not match configured m = {cfg.m}")
    solver = WaveSolver(cfg)
    traces = solver.simulate(image.data)
    logger.debug("Simulated %d steps for %d detectors", cfg.n_t, len(solver.detectors))
    return SensorData(traces, cfg.dt, solver.detectors, geometry_fingerprint(cfg))
