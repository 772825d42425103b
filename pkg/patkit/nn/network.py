"""Layer graphs with explicit forward and backward passes."""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from patkit.core.rng import RngStream
from patkit.exceptions import LayerShapeError, StaleTraceError
from patkit.nn import layers as L
from patkit.nn.init import initial_weight
from patkit.nn.layers import LayerKind, LayerSpec
from patkit.nn.params import Gradients, ParamSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Node:
    name: str
    spec: LayerSpec
    inputs: tuple[str, ...]


@dataclass
class Trace:
    """Activation caches of one forward pass, bound to a parameter version."""

    network: str
    version: int
    caches: dict[str, Any] = field(default_factory=dict)
    input_shapes: dict[str, tuple[int, ...]] = field(default_factory=dict)


@dataclass
class Backward:
    params: Gradients
    inputs: dict[str, np.ndarray] = field(default_factory=dict)


class Network:
    """A directed acyclic graph of layers whose parameters live in a shared ParamSet.

    Nodes are evaluated in insertion order; a node reads the outputs of
    earlier nodes or of the named network inputs. Parameters are registered
    as ``<network>.<node>.weight`` / ``.bias``.
    """

    def __init__(self, name: str, params: ParamSet, rng: RngStream, inputs: tuple[str, ...] = ('input',)):
        self.name = name
        self.params = params
        self.rng = rng
        self.inputs = tuple(inputs)
        self.nodes: list[Node] = []

    @property
    def output(self) -> str:
        return self.nodes[-1].name if self.nodes else self.inputs[0]

    def weight_name(self, node: str) -> str:
        return f"{self.name}.{node}.weight"

    def bias_name(self, node: str) -> str:
        return f"{self.name}.{node}.bias"

    def add(self, name: str, spec: LayerSpec, inputs: str | tuple[str, ...] | None = None) -> str:
        known = set(self.inputs) | {node.name for node in self.nodes}
        if name in known:
            raise ValueError(f"Node '{name}' already exists in network '{self.name}'")
        if inputs is None:
            inputs = (self.output,)
        elif isinstance(inputs, str):
            inputs = (inputs,)
        for source in inputs:
            if source not in known:
                raise ValueError(f"Node '{name}' reads unknown input '{source}'")
        if spec.kind in L.PARAMETRIC:
            self.params.add(self.weight_name(name), initial_weight(spec, self.rng))
            if spec.has_bias:
                self.params.add(self.bias_name(name), np.zeros(spec.out_channels))
        self.nodes.append(Node(name, spec, tuple(inputs)))
        return name

    def param_names(self) -> list[str]:
        return [name for name in self.params if name.startswith(f"{self.name}.")]

    def param_count(self) -> int:
        return sum(node.spec.param_count() for node in self.nodes)

    def describe(self) -> dict:
        return {
            'name': self.name,
            'inputs': list(self.inputs),
            'nodes': [{'name': n.name, 'inputs': list(n.inputs), 'spec': n.spec.to_dict()} for n in self.nodes],
        }

    def _weights(self, node: Node) -> tuple[np.ndarray, np.ndarray | None]:
        weight = self.params[self.weight_name(node.name)]
        bias = self.params[self.bias_name(node.name)] if node.spec.has_bias else None
        return weight, bias


_PARAM_FORWARD = {
    LayerKind.Dense: L.dense_forward,
    LayerKind.Conv3x3: L.conv_forward,
    LayerKind.TransposedConv: L.tconv_forward,
}
_PARAM_BACKWARD = {
    LayerKind.Dense: L.dense_backward,
    LayerKind.Conv3x3: L.conv_backward,
    LayerKind.TransposedConv: L.tconv_backward,
}


def _forward_node(net: Network, node: Node, inputs: list[np.ndarray]) -> tuple[np.ndarray, Any]:
    kind = node.spec.kind
    label = f"{net.name}.{node.name}"
    if kind in L.PARAMETRIC:
        weight, bias = net._weights(node)
        return _PARAM_FORWARD[kind](label, node.spec, inputs[0], weight, bias)
    if kind in L.ACTIVATIONS:
        return L.activation_forward(kind, inputs[0])
    if kind == LayerKind.MaxPool:
        return L.maxpool_forward(label, inputs[0])
    if kind == LayerKind.Concat:
        return L.concat_forward(label, inputs)
    if kind == LayerKind.Add:
        return L.add_forward(label, inputs)
    return L.reshape_forward(label, node.spec, inputs[0])


def _backward_node(net: Network, node: Node, dy: np.ndarray, cache: Any, grads: Gradients) -> list[np.ndarray]:
    kind = node.spec.kind
    if kind in L.PARAMETRIC:
        weight, _ = net._weights(node)
        dx, dweight, dbias = _PARAM_BACKWARD[kind](dy, cache, weight)
        grads[net.weight_name(node.name)] += dweight
        if node.spec.has_bias:
            grads[net.bias_name(node.name)] += dbias
        return [dx]
    if kind in L.ACTIVATIONS:
        return [L.activation_backward(kind, dy, cache)]
    if kind == LayerKind.MaxPool:
        return [L.maxpool_backward(dy, cache)]
    if kind == LayerKind.Concat:
        return L.concat_backward(dy, cache)
    if kind == LayerKind.Add:
        return [dy] * cache
    return [dy.reshape(cache)]


def _as_inputs(net: Network, x: np.ndarray | dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    values = x if isinstance(x, dict) else {net.inputs[0]: x}
    missing = set(net.inputs) - set(values)
    if missing:
        raise LayerShapeError(net.name, f"inputs {sorted(net.inputs)}", tuple(sorted(values)))
    return {name: np.asarray(values[name], dtype=net.params.dtype) for name in net.inputs}


def forward_pass(net: Network, x: np.ndarray | dict[str, np.ndarray]) -> tuple[np.ndarray, Trace]:
    values = _as_inputs(net, x)
    trace = Trace(net.name, net.params.version, input_shapes={k: v.shape for k, v in values.items()})
    for node in net.nodes:
        out, cache = _forward_node(net, node, [values[source] for source in node.inputs])
        values[node.name] = out
        trace.caches[node.name] = cache
    return values[net.output], trace


def backward_pass(net: Network, trace: Trace, grad_out: np.ndarray, input_grad: bool = False) -> Backward:
    """Gradients of every parameter of ``net`` given dLoss/dOutput.

    With ``input_grad`` the gradients with respect to the network inputs are
    returned as well.
    """
    if trace.network != net.name or trace.version != net.params.version:
        raise StaleTraceError(trace.version, net.params.version)
    grads = {name: np.zeros_like(net.params[name]) for name in net.param_names()}
    pending: dict[str, np.ndarray] = {net.output: np.asarray(grad_out, dtype=net.params.dtype)}
    for node in reversed(net.nodes):
        dy = pending.pop(node.name, None)
        if dy is None:
            continue
        for source, dx in zip(node.inputs, _backward_node(net, node, dy, trace.caches[node.name], grads)):
            pending[source] = pending[source] + dx if source in pending else dx
    if not input_grad:
        return Backward(grads)
    inputs = {
        name: pending.get(name, np.zeros(trace.input_shapes[name], dtype=net.params.dtype))
        for name in net.inputs
    }
    return Backward(grads, inputs)
