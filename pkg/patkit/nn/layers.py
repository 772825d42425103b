"""Layer kinds of the network engine and their forward / backward rules.

Images are laid out as (batch, channels, height, width), dense activations
as (batch, features). Every layer function returns its output together with
the cache its backward rule needs.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from patkit.exceptions import LayerShapeError

LEAKY_SLOPE = 0.01


class LayerKind(str, Enum):
    Dense = "dense"
    Conv3x3 = "conv3x3"
    TransposedConv = "transposed-conv-stride2"
    MaxPool = "maxpool2"
    Concat = "concat-skip"
    Add = "add-residual"
    ReLU = "relu"
    ELU = "elu"
    LeakyReLU = "leaky-relu"
    Reshape = "reshape"


PARAMETRIC = {LayerKind.Dense, LayerKind.Conv3x3, LayerKind.TransposedConv}
ACTIVATIONS = {LayerKind.ReLU, LayerKind.ELU, LayerKind.LeakyReLU}


@dataclass(frozen=True)
class LayerSpec:
    kind: LayerKind
    in_channels: int = 0
    out_channels: int = 0
    has_bias: bool = True
    zero_init: bool = False
    shape: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'kind', LayerKind(self.kind))
        if self.kind in PARAMETRIC and (self.in_channels < 1 or self.out_channels < 1):
            raise ValueError(f"{self.kind.value} layers need positive channel counts")

    @property
    def weight_shape(self) -> tuple[int, ...]:
        if self.kind == LayerKind.Dense:
            return self.out_channels, self.in_channels
        if self.kind == LayerKind.Conv3x3:
            return self.out_channels, self.in_channels, 3, 3
        if self.kind == LayerKind.TransposedConv:
            return self.in_channels, self.out_channels, 2, 2
        return ()

    @property
    def fans(self) -> tuple[int, int]:
        taps = {LayerKind.Dense: 1, LayerKind.Conv3x3: 9, LayerKind.TransposedConv: 4}[self.kind]
        return self.in_channels * taps, self.out_channels * taps

    def param_count(self) -> int:
        if self.kind not in PARAMETRIC:
            return 0
        return int(np.prod(self.weight_shape)) + (self.out_channels if self.has_bias else 0)

    def to_dict(self) -> dict:
        return {
            'kind': self.kind.value,
            'in_channels': self.in_channels,
            'out_channels': self.out_channels,
            'has_bias': self.has_bias,
            'zero_init': self.zero_init,
            'shape': list(self.shape),
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'LayerSpec':
        return cls(**{**data, 'shape': tuple(data.get('shape', ()))})


# ---------------------------------------------------------------------------
# Shape checks
# ---------------------------------------------------------------------------

def _expect_image(name: str, x: np.ndarray, channels: int | None = None) -> None:
    if x.ndim != 4 or (channels is not None and x.shape[1] != channels):
        expected = f"(N, {channels if channels is not None else 'C'}, H, W)"
        raise LayerShapeError(name, expected, x.shape)


# ---------------------------------------------------------------------------
# Parametric layers
# ---------------------------------------------------------------------------

def dense_forward(name: str, spec: LayerSpec, x: np.ndarray, weight: np.ndarray,
                  bias: np.ndarray | None) -> tuple[np.ndarray, Any]:
    if x.ndim != 2 or x.shape[1] != spec.in_channels:
        raise LayerShapeError(name, f"(N, {spec.in_channels})", x.shape)
    y = x @ weight.T
    if bias is not None:
        y = y + bias
    return y, x


def dense_backward(dy: np.ndarray, x: np.ndarray, weight: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return dy @ weight, dy.T @ x, dy.sum(axis=0)


def _windows(x: np.ndarray) -> np.ndarray:
    padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
    return sliding_window_view(padded, (3, 3), axis=(2, 3))


def conv_forward(name: str, spec: LayerSpec, x: np.ndarray, weight: np.ndarray,
                 bias: np.ndarray | None) -> tuple[np.ndarray, Any]:
    _expect_image(name, x, spec.in_channels)
    y = np.einsum('nchwij,ocij->nohw', _windows(x), weight, optimize=True)
    if bias is not None:
        y = y + bias[None, :, None, None]
    return y, x


def conv_backward(dy: np.ndarray, x: np.ndarray, weight: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    dweight = np.einsum('nchwij,nohw->ocij', _windows(x), dy, optimize=True)
    dx = np.einsum('nohwij,ocij->nchw', _windows(dy), weight[:, :, ::-1, ::-1], optimize=True)
    return dx, dweight, dy.sum(axis=(0, 2, 3))


def tconv_forward(name: str, spec: LayerSpec, x: np.ndarray, weight: np.ndarray,
                  bias: np.ndarray | None) -> tuple[np.ndarray, Any]:
    _expect_image(name, x, spec.in_channels)
    n, _, h, w = x.shape
    y = np.einsum('nchw,coij->nohiwj', x, weight, optimize=True).reshape(n, spec.out_channels, 2 * h, 2 * w)
    if bias is not None:
        y = y + bias[None, :, None, None]
    return y, x


def tconv_backward(dy: np.ndarray, x: np.ndarray, weight: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n, c_out, h2, w2 = dy.shape
    blocks = dy.reshape(n, c_out, h2 // 2, 2, w2 // 2, 2)
    dweight = np.einsum('nchw,nohiwj->coij', x, blocks, optimize=True)
    dx = np.einsum('nohiwj,coij->nchw', blocks, weight, optimize=True)
    return dx, dweight, dy.sum(axis=(0, 2, 3))


# ---------------------------------------------------------------------------
# Parameter-free layers
# ---------------------------------------------------------------------------

def maxpool_forward(name: str, x: np.ndarray) -> tuple[np.ndarray, Any]:
    _expect_image(name, x)
    n, c, h, w = x.shape
    if h % 2 or w % 2:
        raise LayerShapeError(name, "(N, C, H, W) with even H and W", x.shape)
    blocks = x.reshape(n, c, h // 2, 2, w // 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, h // 2, w // 2, 4)
    winner = blocks.argmax(axis=-1)
    y = np.take_along_axis(blocks, winner[..., None], axis=-1)[..., 0]
    return y, (x.shape, winner)


def maxpool_backward(dy: np.ndarray, cache: Any) -> np.ndarray:
    shape, winner = cache
    n, c, h, w = shape
    blocks = np.zeros((n, c, h // 2, w // 2, 4), dtype=dy.dtype)
    np.put_along_axis(blocks, winner[..., None], dy[..., None], axis=-1)
    return blocks.reshape(n, c, h // 2, w // 2, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(shape)


def activation_forward(kind: LayerKind, x: np.ndarray) -> tuple[np.ndarray, Any]:
    if kind == LayerKind.ReLU:
        return np.maximum(x, 0.0), x
    if kind == LayerKind.ELU:
        return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0))), x
    return np.where(x > 0, x, LEAKY_SLOPE * x), x


def activation_backward(kind: LayerKind, dy: np.ndarray, x: np.ndarray) -> np.ndarray:
    if kind == LayerKind.ReLU:
        return dy * (x > 0)
    if kind == LayerKind.ELU:
        return dy * np.where(x > 0, 1.0, np.exp(np.minimum(x, 0.0)))
    return dy * np.where(x > 0, 1.0, LEAKY_SLOPE)


def concat_forward(name: str, inputs: list[np.ndarray]) -> tuple[np.ndarray, Any]:
    for x in inputs:
        _expect_image(name, x)
    spatial = {x.shape[2:] for x in inputs}
    if len(spatial) != 1 or len({x.shape[0] for x in inputs}) != 1:
        raise LayerShapeError(name, "inputs with equal batch and spatial size", tuple(x.shape for x in inputs))
    return np.concatenate(inputs, axis=1), [x.shape[1] for x in inputs]


def concat_backward(dy: np.ndarray, channels: list[int]) -> list[np.ndarray]:
    return np.split(dy, np.cumsum(channels)[:-1], axis=1)


def add_forward(name: str, inputs: list[np.ndarray]) -> tuple[np.ndarray, Any]:
    if len({x.shape for x in inputs}) != 1:
        raise LayerShapeError(name, "inputs of identical shape", tuple(x.shape for x in inputs))
    return sum(inputs[1:], inputs[0]), len(inputs)


def reshape_forward(name: str, spec: LayerSpec, x: np.ndarray) -> tuple[np.ndarray, Any]:
    size = int(np.prod(spec.shape))
    if int(np.prod(x.shape[1:])) != size:
        raise LayerShapeError(name, f"(N, ...) with {size} values per sample", x.shape)
    return x.reshape((x.shape[0],) + tuple(spec.shape)), x.shape
