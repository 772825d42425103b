"""Builders for the five learned reconstruction architectures.

Every residual architecture zero-initialises the last layer of each
residual branch, so an untrained network is the identity on its residual
path: the U-Net returns f0, learned gradient descent returns A^T g, and so on.
"""

import logging

import numpy as np

from patkit.config.forward import ForwardConfig
from patkit.config.train import Architecture, NetworkConfig, resolve_architecture
from patkit.exceptions import ConfigError, GeometryError, SizeError
from patkit.forward.geometry import geometry_fingerprint
from patkit.forward.matrix import ForwardMatrix
from patkit.learned.recon_net import Domain, ForwardState, ReconNet
from patkit.nn.layers import LayerKind, LayerSpec
from patkit.nn.network import Network, backward_pass, forward_pass
from patkit.nn.params import Gradients

logger = logging.getLogger(__name__)


def conv(c_in: int, c_out: int, **kwargs) -> LayerSpec:
    return LayerSpec(LayerKind.Conv3x3, c_in, c_out, **kwargs)


def relu() -> LayerSpec:
    return LayerSpec(LayerKind.ReLU)


def conv_relu(net: Network, name: str, c_in: int, c_out: int, activation: str | None = None) -> str:
    net.add(name, conv(c_in, c_out))
    return net.add(activation or f"{name}_relu", relu())


def residual_block(net: Network, in_channels: int, channels: int, depth: int = 3) -> Network:
    """``depth`` ReLU convolutions followed by a linear, bias-free, zero-initialised 1-channel conv."""
    previous = in_channels
    for i in range(1, depth + 1):
        conv_relu(net, f"conv{i}", previous, channels)
        previous = channels
    net.add("out", conv(channels, 1, has_bias=False, zero_init=True))
    return net


def _merge(*grads: Gradients) -> Gradients:
    merged: Gradients = {}
    for part in grads:
        for name, value in part.items():
            merged[name] = merged[name] + value if name in merged else value
    return merged


def _require_matrix(arch: Architecture, matrix: ForwardMatrix | None) -> ForwardMatrix:
    if matrix is None:
        raise ConfigError(f"The {arch.value} architecture needs a forward matrix")
    return matrix


# ---------------------------------------------------------------------------
# Fully learned
# ---------------------------------------------------------------------------

class FullyLearnedNet(ReconNet):
    """Dense layers from data to image followed by a small CNN."""

    arch = Architecture.FullyLearned

    def __init__(self, cfg: NetworkConfig, geometry: ForwardConfig, matrix: ForwardMatrix | None = None):
        super().__init__(cfg, geometry, matrix)
        T, M, m = geometry.n_samples, geometry.n_pixels, geometry.m
        w1, w2 = cfg.dense_widths or (2 * M, M)
        dense_bytes = (T * w1 + w1 * w2 + w2 * M) * self.params.dtype.itemsize
        if dense_bytes > cfg.memory_cap_bytes:
            raise SizeError(
                f"Dense layers need {dense_bytes} bytes, above the cap of {cfg.memory_cap_bytes}"
            )
        net = self.network("fl")
        net.add("dense1", LayerSpec(LayerKind.Dense, T, w1))
        net.add("elu1", LayerSpec(LayerKind.ELU))
        net.add("dense2", LayerSpec(LayerKind.Dense, w1, w2))
        net.add("elu2", LayerSpec(LayerKind.ELU))
        net.add("dense3", LayerSpec(LayerKind.Dense, w2, M))
        net.add("elu3", LayerSpec(LayerKind.ELU))
        net.add("image", LayerSpec(LayerKind.Reshape, shape=(1, m, m)))
        conv_relu(net, "conv1", 1, cfg.channels)
        conv_relu(net, "conv2", cfg.channels, cfg.channels)
        conv_relu(net, "conv3", cfg.channels, cfg.channels)
        net.add("out", conv(cfg.channels, 1))
        net.add("out_relu", relu())
        self.net = net

    def forward(self, x: np.ndarray) -> ForwardState:
        x = self.check_batch(x)
        out, trace = forward_pass(self.net, x.reshape(len(x), -1))
        return ForwardState(out[:, 0], trace)

    def backward(self, state: ForwardState, grad_out: np.ndarray) -> Gradients:
        return backward_pass(self.net, state.cache, grad_out[:, None]).params


# ---------------------------------------------------------------------------
# Post-processing U-Net
# ---------------------------------------------------------------------------

class PostProcUNet(ReconNet):
    """Three-scale residual U-Net acting on an initial reconstruction."""

    arch = Architecture.PostProcUNet
    input_domain = Domain.Image

    def __init__(self, cfg: NetworkConfig, geometry: ForwardConfig, matrix: ForwardMatrix | None = None):
        super().__init__(cfg, geometry, matrix)
        if geometry.m % 4 != 0:
            raise ConfigError(f"The U-Net halves the image twice; m = {geometry.m} is not divisible by 4")
        c1, c2, c3 = cfg.unet_channels
        net = self.network("unet")
        conv_relu(net, "enc1a", 1, c1)
        conv_relu(net, "enc1b", c1, c1, activation="skip1")
        net.add("pool1", LayerSpec(LayerKind.MaxPool))
        conv_relu(net, "enc2a", c1, c2)
        conv_relu(net, "enc2b", c2, c2, activation="skip2")
        net.add("pool2", LayerSpec(LayerKind.MaxPool))
        conv_relu(net, "mid_a", c2, c3)
        conv_relu(net, "mid_b", c3, c3)
        net.add("up2", LayerSpec(LayerKind.TransposedConv, c3, c2))
        net.add("cat2", LayerSpec(LayerKind.Concat), ("up2", "skip2"))
        conv_relu(net, "dec2a", 2 * c2, c2)
        conv_relu(net, "dec2b", c2, c2)
        net.add("up1", LayerSpec(LayerKind.TransposedConv, c2, c1))
        net.add("cat1", LayerSpec(LayerKind.Concat), ("up1", "skip1"))
        conv_relu(net, "dec1a", 2 * c1, c1)
        conv_relu(net, "dec1b", c1, c1)
        net.add("out", conv(c1, 1, zero_init=True))
        net.add("residual", LayerSpec(LayerKind.Add), ("out", "input"))
        self.net = net

    def forward(self, x: np.ndarray) -> ForwardState:
        x = self.check_batch(x)
        out, trace = forward_pass(self.net, x[:, None])
        return ForwardState(out[:, 0], trace)

    def backward(self, state: ForwardState, grad_out: np.ndarray) -> Gradients:
        return backward_pass(self.net, state.cache, grad_out[:, None]).params


# ---------------------------------------------------------------------------
# Learned pre-processing
# ---------------------------------------------------------------------------

class PreProcCNN(ReconNet):
    """Residual CNN on the sensor data followed by the adjoint.

    With ``output_domain == "data"`` the net outputs the processed data
    itself and the adjoint is applied only by :func:`reconstruct`.
    """

    arch = Architecture.PreProcCNN

    def __init__(self, cfg: NetworkConfig, geometry: ForwardConfig, matrix: ForwardMatrix | None = None,
                 output_domain: str = Domain.Image):
        super().__init__(cfg, geometry, _require_matrix(self.arch, matrix))
        self.output_domain = output_domain
        net = self.network("pre")
        conv_relu(net, "conv1", 1, cfg.channels)
        conv_relu(net, "conv2", cfg.channels, cfg.channels)
        conv_relu(net, "conv3", cfg.channels, cfg.channels)
        net.add("out", conv(cfg.channels, 1, zero_init=True))
        net.add("residual", LayerSpec(LayerKind.Add), ("out", "input"))
        self.net = net

    def forward(self, x: np.ndarray) -> ForwardState:
        x = self.check_batch(x)
        processed, trace = forward_pass(self.net, x[:, None])
        processed = processed[:, 0]
        if self.output_domain == Domain.Data:
            return ForwardState(processed, trace)
        f = self.adjoint_op(processed.reshape(len(x), -1)).reshape(len(x), self.m, self.m)
        return ForwardState(f, trace)

    def backward(self, state: ForwardState, grad_out: np.ndarray) -> Gradients:
        if self.output_domain == Domain.Image:
            grad_out = self.forward_op(grad_out.reshape(len(grad_out), -1)).reshape((-1,) + self.data_shape)
        return backward_pass(self.net, state.cache, grad_out[:, None]).params


# ---------------------------------------------------------------------------
# Learned gradient descent
# ---------------------------------------------------------------------------

class LearnedGD(ReconNet):
    """Unrolled gradient scheme: f <- f + block_n(f, A^T(Af - g)), starting from A^T g."""

    arch = Architecture.LearnedGD

    def __init__(self, cfg: NetworkConfig, geometry: ForwardConfig, matrix: ForwardMatrix | None = None):
        super().__init__(cfg, geometry, _require_matrix(self.arch, matrix))
        self.blocks = [residual_block(self.network(f"block{n}"), 2, cfg.channels) for n in range(cfg.n_iter)]

    @property
    def n_iter(self) -> int:
        return len(self.blocks)

    def initial(self, g: np.ndarray) -> np.ndarray:
        """A^T g as (B, m, m)."""
        return self.adjoint_op(g.reshape(len(g), -1)).reshape(len(g), self.m, self.m)

    def block_input(self, f: np.ndarray, g: np.ndarray) -> np.ndarray:
        B = len(f)
        residual = self.forward_op(f.reshape(B, -1)) - g.reshape(B, -1)
        grad = self.adjoint_op(residual).reshape(B, self.m, self.m)
        return np.stack([f, grad], axis=1)

    def step(self, n: int, f: np.ndarray, g: np.ndarray):
        """Apply block ``n``; returns the new iterate and the block trace."""
        update, trace = forward_pass(self.blocks[n], self.block_input(f, g))
        return f + update[:, 0], trace

    def forward(self, x: np.ndarray) -> ForwardState:
        g = self.check_batch(x)
        f = self.initial(g)
        traces = []
        for n in range(self.n_iter):
            f, trace = self.step(n, f, g)
            traces.append(trace)
        return ForwardState(f, traces)

    def block_backward(self, n: int, trace, grad_f: np.ndarray) -> tuple[Gradients, np.ndarray]:
        """Parameter gradients of block ``n`` and dLoss/df at its input."""
        B = len(grad_f)
        result = backward_pass(self.blocks[n], trace, grad_f[:, None], input_grad=True)
        dx = result.inputs['input']
        normal = self.adjoint_op(self.forward_op(dx[:, 1].reshape(B, -1))).reshape(B, self.m, self.m)
        return result.params, grad_f + dx[:, 0] + normal

    def backward(self, state: ForwardState, grad_out: np.ndarray) -> Gradients:
        grads: list[Gradients] = []
        grad_f = grad_out
        for n in reversed(range(self.n_iter)):
            block_grads, grad_f = self.block_backward(n, state.cache[n], grad_f)
            grads.append(block_grads)
        return _merge(*grads)


# ---------------------------------------------------------------------------
# Learned primal-dual
# ---------------------------------------------------------------------------

class LearnedPD(ReconNet):
    """Alternating residual updates of a data-domain dual variable and the image."""

    arch = Architecture.LearnedPD

    def __init__(self, cfg: NetworkConfig, geometry: ForwardConfig, matrix: ForwardMatrix | None = None):
        super().__init__(cfg, geometry, _require_matrix(self.arch, matrix))
        self.duals = []
        self.primals = []
        for n in range(cfg.n_iter):
            self.duals.append(residual_block(self.network(f"dual{n}"), 3, cfg.channels))
            self.primals.append(residual_block(self.network(f"primal{n}"), 2, cfg.channels))

    @property
    def n_iter(self) -> int:
        return len(self.primals)

    def forward(self, x: np.ndarray) -> ForwardState:
        g = self.check_batch(x)
        B = len(g)
        h = np.zeros_like(g)
        f = self.adjoint_op(g.reshape(B, -1)).reshape(B, self.m, self.m)
        traces = []
        for n in range(self.n_iter):
            Af = self.forward_op(f.reshape(B, -1)).reshape(g.shape)
            dh, dual_trace = forward_pass(self.duals[n], np.stack([h, Af, g], axis=1))
            h = h + dh[:, 0]
            ATh = self.adjoint_op(h.reshape(B, -1)).reshape(f.shape)
            df, primal_trace = forward_pass(self.primals[n], np.stack([f, ATh], axis=1))
            f = f + df[:, 0]
            traces.append((dual_trace, primal_trace))
        return ForwardState(f, traces)

    def backward(self, state: ForwardState, grad_out: np.ndarray) -> Gradients:
        B = len(grad_out)
        grads: list[Gradients] = []
        grad_f = grad_out
        grad_h = np.zeros((B,) + self.data_shape, dtype=grad_out.dtype)
        for n in reversed(range(self.n_iter)):
            dual_trace, primal_trace = state.cache[n]
            primal = backward_pass(self.primals[n], primal_trace, grad_f[:, None], input_grad=True)
            dp = primal.inputs['input']
            grad_f = grad_f + dp[:, 0]
            grad_h = grad_h + self.forward_op(dp[:, 1].reshape(B, -1)).reshape(grad_h.shape)
            dual = backward_pass(self.duals[n], dual_trace, grad_h[:, None], input_grad=True)
            dd = dual.inputs['input']
            grad_h = grad_h + dd[:, 0]
            grad_f = grad_f + self.adjoint_op(dd[:, 1].reshape(B, -1)).reshape(grad_f.shape)
            grads += [primal.params, dual.params]
        return _merge(*grads)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def build_fully_learned(cfg: NetworkConfig, geometry: ForwardConfig) -> FullyLearnedNet:
    return FullyLearnedNet(cfg, geometry)


def build_postproc_unet(cfg: NetworkConfig, geometry: ForwardConfig) -> PostProcUNet:
    return PostProcUNet(cfg, geometry)


def build_preproc_cnn(cfg: NetworkConfig, matrix: ForwardMatrix, output_domain: str = Domain.Image) -> PreProcCNN:
    return PreProcCNN(cfg, matrix.config, matrix, output_domain)


def build_learned_gd(cfg: NetworkConfig, matrix: ForwardMatrix) -> LearnedGD:
    return LearnedGD(cfg, matrix.config, matrix)


def build_learned_pd(cfg: NetworkConfig, matrix: ForwardMatrix) -> LearnedPD:
    return LearnedPD(cfg, matrix.config, matrix)


_CLASSES: dict[Architecture, type[ReconNet]] = {
    Architecture.FullyLearned: FullyLearnedNet,
    Architecture.PostProcUNet: PostProcUNet,
    Architecture.PreProcCNN: PreProcCNN,
    Architecture.LearnedGD: LearnedGD,
    Architecture.LearnedPD: LearnedPD,
}


def build_recon_net(arch: Architecture | str, cfg: NetworkConfig, geometry: ForwardConfig,
                    matrix: ForwardMatrix | None = None, **kwargs) -> ReconNet:
    arch = resolve_architecture(arch)
    if matrix is not None and matrix.fingerprint != geometry_fingerprint(geometry):
        raise GeometryError(geometry_fingerprint(geometry), matrix.fingerprint)
    net = _CLASSES[arch](cfg, geometry, matrix, **kwargs)
    logger.info("Built %s with %d parameters", arch.value, net.param_count())
    return net
