"""Synthetic vessel-like phantoms.

Vessel trees are branching random walks rasterised as discs; every branch
carries one amplitude. The piecewise family keeps the sharp discs, the
smooth family blurs the same skeleton with a Gaussian and renormalises the
peak to one.
"""

import logging
import os
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import ndimage

from patkit.config.bench import PhantomFamily, PhantomKind
from patkit.core.io import read_pgm
from patkit.core.rng import RngStream
from patkit.core.types import Image
from patkit.exceptions import DatasetError

logger = logging.getLogger(__name__)

PhantomSource = Callable[[RngStream], Image]


def _walk(start: np.ndarray, heading: float, n_steps: int, persistence: float,
          rng: RngStream, m: int) -> np.ndarray:
    points = np.empty((n_steps + 1, 2))
    points[0] = start
    turns = rng.uniform(n_steps, -np.pi, np.pi)
    for k in range(n_steps):
        heading = heading + (1.0 - persistence) * turns[k]
        step = np.array([np.sin(heading), np.cos(heading)])
        points[k + 1] = np.clip(points[k] + step, 0, m - 1)
    return points


def _rasterise(points: np.ndarray, radius: float, m: int) -> np.ndarray:
    rows, cols = np.mgrid[0:m, 0:m]
    dist2 = (rows[None] - points[:, 0, None, None]) ** 2 + (cols[None] - points[:, 1, None, None]) ** 2
    return (dist2 <= radius * radius).any(axis=0)


def phantom_skeleton(family: PhantomFamily, rng: RngStream, m: int) -> np.ndarray:
    """Piecewise-constant vessel tree with at most one amplitude level per branch."""
    image = np.zeros((m, m))
    n_branches = rng.integer(family.branches[0], family.branches[1] + 1)
    paths: list[np.ndarray] = []
    for b in range(n_branches):
        if paths:
            parent = paths[rng.integer(0, len(paths))]
            start = parent[rng.integer(0, len(parent))]
        else:
            start = rng.uniform(2, 0.2 * m, 0.8 * m)
        heading = rng.scalar(-np.pi, np.pi)
        n_steps = rng.integer(family.steps[0], family.steps[1] + 1)
        path = _walk(start, heading, n_steps, family.persistence, rng, m)
        paths.append(path)
        radius = rng.scalar(*family.width)
        amplitude = rng.scalar(*family.amplitude)
        mask = _rasterise(path, radius, m)
        image[mask] = np.maximum(image[mask], amplitude)
    return image


def smooth(skeleton: np.ndarray, sigma: float) -> np.ndarray:
    """Gaussian blur renormalised to a peak of one; all-zero input stays zero."""
    blurred = ndimage.gaussian_filter(skeleton, sigma, mode='constant')
    peak = blurred.max()
    return blurred / peak if peak > 0 else blurred


def gen_phantom(family: PhantomFamily, rng: RngStream, m: int = 64) -> Image:
    skeleton = phantom_skeleton(family, rng, m)
    if family.kind == PhantomKind.Smooth.value:
        return Image(smooth(skeleton, family.sigma))
    return Image(skeleton)


def image_directory_source(directory: str | os.PathLike, m: int) -> PhantomSource:
    """Draw phantoms from the PGM images of a directory, resampled to m x m."""
    files = sorted(Path(directory).glob('*.pgm'))
    if not files:
        raise DatasetError(f"No PGM images found in {directory}")
    logger.info("Using %d images from %s as phantoms", len(files), directory)

    def draw(rng: RngStream) -> Image:
        image = read_pgm(files[rng.integer(0, len(files))])
        if image.shape != (m, m):
            image = ndimage.zoom(image, (m / image.shape[0], m / image.shape[1]), order=1)
        return Image(np.clip(image, 0.0, 1.0))

    return draw


def phantom_source(family: PhantomFamily, m: int, directory: str | None = None) -> PhantomSource:
    if directory:
        return image_directory_source(directory, m)
    return lambda rng: gen_phantom(family, rng, m)
