"""Image quality measures: peak signal-to-noise ratio and structural similarity."""

import numpy as np
from scipy import ndimage

from patkit.exceptions import DimensionError, MetricError

SSIM_SIGMA = 1.5
SSIM_TRUNCATE = 3.5  # 11 x 11 window at sigma 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pair(f, f_true) -> tuple[np.ndarray, np.ndarray]:
    f = np.asarray(f, dtype=np.float64)
    f_true = np.asarray(f_true, dtype=np.float64)
    if f.shape != f_true.shape:
        raise DimensionError(f"Cannot compare images of shape {f.shape} and {f_true.shape}")
    return f, f_true


def psnr(f, f_true) -> float:
    """20 log10(max(f_true) / RMSE); ``inf`` for identical images."""
    f, f_true = _pair(f, f_true)
    rmse = float(np.sqrt(np.mean((f - f_true) ** 2)))
    if rmse == 0:
        return float('inf')
    return float(20.0 * np.log10(f_true.max() / rmse))


def _blur(x: np.ndarray) -> np.ndarray:
    return ndimage.gaussian_filter(x, SSIM_SIGMA, truncate=SSIM_TRUNCATE, mode='reflect')


def ssim(f, f_true, symmetric: bool = False) -> float:
    """Mean structural similarity with a Gaussian window.

    The dynamic range is taken from ``f_true``, or from both images when
    ``symmetric`` is set.
    """
    f, f_true = _pair(f, f_true)
    if np.array_equal(f, f_true):
        return 1.0
    ref = np.concatenate([f.ravel(), f_true.ravel()]) if symmetric else f_true
    dynamic_range = float(ref.max() - ref.min())
    if dynamic_range == 0:
        raise MetricError("SSIM is undefined for a constant reference that differs from the image")
    c1 = (SSIM_K1 * dynamic_range) ** 2
    c2 = (SSIM_K2 * dynamic_range) ** 2
    mu_x, mu_y = _blur(f), _blur(f_true)
    var_x = _blur(f * f) - mu_x * mu_x
    var_y = _blur(f_true * f_true) - mu_y * mu_y
    cov = _blur(f * f_true) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))


def batch_scores(predictions: np.ndarray, truths: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample (psnr, ssim) arrays."""
    p = np.array([psnr(a, b) for a, b in zip(predictions, truths)])
    s = np.array([ssim(a, b) for a, b in zip(predictions, truths)])
    return p, s
