"""Common interface of the trainable reconstruction operators."""

import abc
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from patkit.config.forward import ForwardConfig
from patkit.config.train import Architecture, NetworkConfig
from patkit.core.rng import RngStream
from patkit.core.types import Image, SensorData
from patkit.exceptions import DimensionError, GeometryError
from patkit.forward.matrix import ForwardMatrix
from patkit.nn.network import Network
from patkit.nn.params import Gradients, ParamSet

logger = logging.getLogger(__name__)


class Domain:
    Image = "image"
    Data = "data"


@dataclass
class ForwardState:
    """Everything a batched forward evaluation keeps for its backward pass."""

    output: np.ndarray
    cache: Any


class ReconNet(abc.ABC):
    """A learned reconstruction operator and its parameters.

    Inputs are batches in the net's ``input_domain``: sensor data
    (B, n_det, n_t) or initial images (B, m, m). Outputs are batches in the
    ``output_domain``.
    """

    arch: Architecture
    input_domain: str = Domain.Data
    output_domain: str = Domain.Image

    def __init__(self, cfg: NetworkConfig, geometry: ForwardConfig, matrix: ForwardMatrix | None = None):
        self.cfg = cfg
        self.geometry = geometry
        self.matrix = matrix
        self.fingerprint = matrix.fingerprint if matrix is not None else None
        self.params = ParamSet(cfg.precision)
        self.rng = RngStream(cfg.seed)
        self.networks: dict[str, Network] = {}

    @property
    def m(self) -> int:
        return self.geometry.m

    @property
    def data_shape(self) -> tuple[int, int]:
        return self.geometry.detector_count, self.geometry.n_t

    @property
    def input_shape(self) -> tuple[int, ...]:
        return self.data_shape if self.input_domain == Domain.Data else (self.m, self.m)

    @property
    def output_shape(self) -> tuple[int, ...]:
        return self.data_shape if self.output_domain == Domain.Data else (self.m, self.m)

    @property
    def n_iter(self) -> int:
        return 1

    def network(self, name: str, inputs: tuple[str, ...] = ('input',)) -> Network:
        net = Network(name, self.params, self.rng, inputs)
        self.networks[name] = net
        return net

    def param_count(self) -> int:
        return sum(net.param_count() for net in self.networks.values())

    def describe(self) -> dict:
        return {
            'architecture': self.arch.value,
            'network': self.cfg.model_dump(mode='json'),
            'geometry': self.geometry.model_dump(mode='json'),
            'fingerprint': self.fingerprint,
            'output_domain': self.output_domain,
        }

    # -- matrix helpers -------------------------------------------------

    def forward_op(self, f: np.ndarray) -> np.ndarray:
        """(B, M) -> (B, T)."""
        return self.matrix.forward_batch(f)

    def adjoint_op(self, g: np.ndarray) -> np.ndarray:
        """(B, T) -> (B, M)."""
        return self.matrix.adjoint_batch(g)

    # -- evaluation -----------------------------------------------------

    def check_batch(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=self.params.dtype)
        if x.ndim != 3 or x.shape[1:] != self.input_shape:
            raise DimensionError(f"{self.arch.value} expects inputs of shape (B, {self.input_shape}), got {x.shape}")
        return x

    @abc.abstractmethod
    def forward(self, x: np.ndarray) -> ForwardState:
        """Batched evaluation keeping the state needed by :meth:`backward`."""

    @abc.abstractmethod
    def backward(self, state: ForwardState, grad_out: np.ndarray) -> Gradients:
        """Parameter gradients given dLoss/dOutput of shape (B, *output_shape)."""

    def predict(self, x: np.ndarray, chunk: int = 16) -> np.ndarray:
        x = self.check_batch(x)
        outputs = [self.forward(x[i:i + chunk]).output for i in range(0, len(x), chunk)]
        return np.concatenate(outputs, axis=0) if outputs else np.zeros((0,) + self.output_shape)

    def check_geometry(self, fingerprint: str | None) -> None:
        if self.fingerprint is not None and fingerprint is not None and fingerprint != self.fingerprint:
            raise GeometryError(self.fingerprint, fingerprint)


def reconstruct(net: ReconNet, x: SensorData | Image | np.ndarray) -> Image:
    """Single deterministic evaluation of a trained network on one sample."""
    if isinstance(x, SensorData):
        net.check_geometry(x.fingerprint)
        array = x.data
    elif isinstance(x, Image):
        array = x.data
    else:
        array = np.asarray(x)
    if array.shape != net.input_shape:
        raise DimensionError(f"{net.arch.value} expects an input of shape {net.input_shape}, got {array.shape}")
    output = net.forward(array[None]).output[0]
    if net.output_domain == Domain.Data:
        output = net.adjoint_op(output.reshape(1, -1)).reshape(net.m, net.m)
    return Image(output)
