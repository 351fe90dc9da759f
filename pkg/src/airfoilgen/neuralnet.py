"""Minimal dense-network engine: forward pass, reverse-mode gradients, Adam.

Everything is float64. The batch dimension leads; loss reductions elsewhere
in the package are batch means, so loss weights are batch-size independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ShapeMismatch, StaleCache

_ACT_IDS = {
    "identity": kernels.ACT_IDENTITY,
    "leaky_relu": kernels.ACT_LEAKY_RELU,
    "tanh": kernels.ACT_TANH,
    "sigmoid": kernels.ACT_SIGMOID,
}


@dataclass
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str = "identity"

    def __post_init__(self):
        if self.activation not in _ACT_IDS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.weights.shape[0] != self.bias.shape[0]:
            raise ShapeMismatch(
                f"weights {self.weights.shape} vs bias {self.bias.shape}"
            )


@dataclass
class Mlp:
    layers: list[DenseLayer]

    def __post_init__(self):
        for a, b in zip(self.layers, self.layers[1:]):
            if a.weights.shape[0] != b.weights.shape[1]:
                raise ShapeMismatch(
                    f"layer widths {a.weights.shape[0]} -> {b.weights.shape[1]}"
                )

    @property
    def in_dim(self) -> int:
        return self.layers[0].weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.layers[-1].weights.shape[0]

    def parameters(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.append(layer.weights)
            out.append(layer.bias)
        return out


def glorot_init(
    widths: list[int], activations: list[str], rng: np.random.Generator
) -> Mlp:
    """Uniform +-sqrt(6/(fan_in+fan_out)) initialization, zero biases."""
    if len(activations) != len(widths) - 1:
        raise ShapeMismatch("need one activation per layer")
    layers = []
    for fan_in, fan_out, act in zip(widths, widths[1:], activations):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        layers.append(DenseLayer(w, np.zeros(fan_out), act))
    return Mlp(layers)


@dataclass
class ForwardCache:
    net: Mlp
    x: np.ndarray
    inputs: list[np.ndarray]  # input to each layer
    pre_acts: list[np.ndarray]  # affine outputs before activation


def forward(net: Mlp, x: np.ndarray) -> tuple[np.ndarray, ForwardCache]:
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != net.in_dim:
        raise ShapeMismatch(f"input width {x.shape[1]}, net expects {net.in_dim}")
    inputs, pre_acts = [], []
    h = x
    for layer in net.layers:
        inputs.append(h)
        z = kernels.dense_forward(h, layer.weights, layer.bias)
        pre_acts.append(z)
        h = kernels.act_forward(z, _ACT_IDS[layer.activation])
    return h, ForwardCache(net=net, x=x, inputs=inputs, pre_acts=pre_acts)


def backward_partial(
    net: Mlp, cache: ForwardCache, upstream: np.ndarray, start_layer: int
) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
    """Backpropagate from the activation output of `start_layer` to the input.

    Returns (dW, db) for layers 0..start_layer plus the input-batch gradient.
    """
    if cache.net is not net:
        raise StaleCache("cache was produced by a different network")
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != cache.pre_acts[start_layer].shape:
        raise ShapeMismatch(
            f"upstream {upstream.shape} vs layer output "
            f"{cache.pre_acts[start_layer].shape}"
        )
    grads: list[tuple[np.ndarray, np.ndarray]] = [None] * (start_layer + 1)
    g = upstream
    for i in range(start_layer, -1, -1):
        layer = net.layers[i]
        gz = kernels.act_backward(cache.pre_acts[i], g, _ACT_IDS[layer.activation])
        gw, gb, g = kernels.dense_backward(cache.inputs[i], layer.weights, gz)
        grads[i] = (gw, gb)
    return grads, g


def backward(
    net: Mlp, cache: ForwardCache, upstream: np.ndarray
) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
    """Returns per-layer (dW, db) plus the gradient w.r.t. the input batch."""
    return backward_partial(net, cache, upstream, len(net.layers) - 1)


@dataclass
class AdamState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: list[np.ndarray], lr: float) -> "AdamState":
        return cls(
            lr=lr,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )


def adam_step(
    state: AdamState, params: list[np.ndarray], grads: list[np.ndarray]
) -> None:
    """In-place bias-corrected Adam update on every parameter array."""
    if len(params) != len(state.m) or len(params) != len(grads):
        raise ShapeMismatch("parameter/gradient/state length mismatch")
    state.step += 1
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ShapeMismatch(f"param {p.shape} vs grad {g.shape}")
        kernels.adam_update(
            p, g, m, v, state.step, state.lr, state.beta1, state.beta2, state.eps
        )


def flat_grads(layer_grads: list[tuple[np.ndarray, np.ndarray]]) -> list[np.ndarray]:
    out = []
    for gw, gb in layer_grads:
        out.append(gw)
        out.append(gb)
    return out
