"""Minimal neural kernel: MLPs with explicit reverse-mode gradients.

Everything trainable in the package is built from the pieces here: dense
layers with a handful of activations, hand-written backprop, Adam with
bias correction, central-difference gradient checking, and a plain-text
checkpoint format that round-trips float64 exactly.  All math is double
precision; forward passes are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

ACTIVATIONS = ("relu", "elu", "sigmoid", "tanh", "identity")


def _apply_activation(name: str, beta: float, z: np.ndarray) -> np.ndarray:
    if name == "identity":
        return z
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "elu":
        return np.where(z > 0, z, beta * np.expm1(z))
    if name == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    if name == "tanh":
        return np.tanh(z)
    raise ValueError(f"unknown activation {name!r}")


def _activation_grad(name: str, beta: float, z: np.ndarray) -> np.ndarray:
    if name == "identity":
        return np.ones_like(z)
    if name == "relu":
        return (z > 0).astype(np.float64)
    if name == "elu":
        return np.where(z > 0, 1.0, beta * np.exp(z))
    if name == "sigmoid":
        s = 1.0 / (1.0 + np.exp(-z))
        return s * (1.0 - s)
    if name == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    raise ValueError(f"unknown activation {name!r}")


@dataclass
class Layer:
    """One dense layer: y = act(W x + b), weights shaped (out, in)."""

    w: np.ndarray
    b: np.ndarray
    activation: str = "identity"
    beta: float = 1.0  # elu scale; ignored by other activations


@dataclass
class MlpParams:
    """An ordered stack of dense layers."""

    layers: list[Layer]

    @property
    def in_dim(self) -> int:
        return self.layers[0].w.shape[1]

    @property
    def out_dim(self) -> int:
        return self.layers[-1].w.shape[0]

    def arrays(self) -> list[np.ndarray]:
        """Flat parameter list (w, b per layer) in traversal order."""
        out = []
        for layer in self.layers:
            out.append(layer.w)
            out.append(layer.b)
        return out

    def copy(self) -> "MlpParams":
        return MlpParams([
            Layer(l.w.copy(), l.b.copy(), l.activation, l.beta) for l in self.layers
        ])

    def count(self) -> int:
        return sum(a.size for a in self.arrays())

    def structure(self) -> str:
        """Compact layer description, e.g. '4>32:elu:1>1:identity:1'."""
        parts = [str(self.in_dim)]
        for l in self.layers:
            parts.append(f"{l.w.shape[0]}:{l.activation}:{l.beta:g}")
        return ">".join(parts)


def init_mlp(sizes: list[int], activations: list[str], rng: np.random.Generator,
             beta: float = 1.0, bias_scale: float = 0.0) -> MlpParams:
    """Seeded uniform(+-sqrt(6/(fan_in+fan_out))) weights, zero biases.

    ``bias_scale`` draws biases from uniform(+-scale) instead; gradient
    checks use it to keep ReLU pre-activations off their kinks, where
    central differences disagree with any one-sided subgradient.
    """
    if len(activations) != len(sizes) - 1:
        raise ValueError("need one activation per layer")
    layers = []
    for fan_in, fan_out, act in zip(sizes[:-1], sizes[1:], activations):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        w = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        b = rng.uniform(-bias_scale, bias_scale, size=fan_out) if bias_scale else np.zeros(fan_out)
        layers.append(Layer(w=w, b=b, activation=act, beta=beta))
    return MlpParams(layers)


def mlp_forward(params: MlpParams, x: np.ndarray) -> tuple[np.ndarray, list]:
    """Forward pass; x is (features,) or (batch, features).

    Returns (output, cache); the cache holds each layer's input and
    pre-activation for the backward pass.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    h = x[None, :] if single else x
    if h.shape[1] != params.in_dim:
        raise DimensionMismatch(f"input width {h.shape[1]} != {params.in_dim}")
    cache = []
    for layer in params.layers:
        z = h @ layer.w.T + layer.b
        cache.append((h, z))
        h = _apply_activation(layer.activation, layer.beta, z)
    return (h[0] if single else h), cache


def backward(params: MlpParams, cache: list, upstream: np.ndarray) -> tuple[list, np.ndarray]:
    """Reverse-mode gradients of the forward composition.

    Args:
        params: the MLP the cache came from.
        cache: second return of mlp_forward on the same input.
        upstream: gradient of the loss w.r.t. the MLP output, same shape.

    Returns:
        (grads, input_grad): grads is a flat list aligned with
        params.arrays(); input_grad matches the forward input shape.
    """
    g = np.asarray(upstream, dtype=np.float64)
    single = g.ndim == 1
    if single:
        g = g[None, :]
    grads: list[np.ndarray] = []
    for layer, (h_in, z) in zip(reversed(params.layers), reversed(cache)):
        gz = g * _activation_grad(layer.activation, layer.beta, z)
        gw = gz.T @ h_in
        gb = gz.sum(axis=0)
        g = gz @ layer.w
        grads.append(gb)
        grads.append(gw)
    grads.reverse()
    return grads, (g[0] if single else g)


@dataclass
class AdamState:
    """Adam moments; shapes mirror the parameter list they update."""

    first: list[np.ndarray]
    second: list[np.ndarray]
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_arrays(cls, arrays: list[np.ndarray], beta1: float = 0.9,
                   beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        return cls(first=[np.zeros_like(a) for a in arrays],
                   second=[np.zeros_like(a) for a in arrays],
                   beta1=beta1, beta2=beta2, eps=eps)


def adam_step(arrays: list[np.ndarray], grads: list[np.ndarray], state: AdamState,
              lr: float) -> None:
    """One bias-corrected Adam update, in place on ``arrays``."""
    if len(arrays) != len(grads):
        raise DimensionMismatch("parameter/gradient list lengths differ")
    state.step_count += 1
    t = state.step_count
    c1 = 1.0 - state.beta1**t
    c2 = 1.0 - state.beta2**t
    for a, g, m, v in zip(arrays, grads, state.first, state.second):
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        a -= lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


def gradient_check(loss_and_grad, arrays: list[np.ndarray], h: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``loss_and_grad()`` evaluates the scalar loss and its gradient at the
    current parameter values (it closes over ``arrays``, which are
    perturbed in place one coordinate at a time).  The relative error per
    coordinate is |a - n| / max(|a|, |n|, 1e-4): coordinates with tiny
    gradients are effectively checked absolutely, which keeps the test
    meaningful below the finite-difference noise floor.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    _, analytic = loss_and_grad()
    worst = 0.0
    for a_idx, arr in enumerate(arrays):
        flat = arr.reshape(-1)
        gflat = np.asarray(analytic[a_idx]).reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            lp, _ = loss_and_grad()
            flat[i] = orig - h
            lm, _ = loss_and_grad()
            flat[i] = orig
            numeric = (lp - lm) / (2.0 * h)
            denom = max(abs(gflat[i]), abs(numeric), 1e-4)
            worst = max(worst, abs(gflat[i] - numeric) / denom)
    return worst


# ---------------------------------------------------------------------------
# checkpoint format: text, versioned, exact float64 round trip
# ---------------------------------------------------------------------------

CHECKPOINT_MAGIC = "nnckpt 1"


def save_checkpoint(path, tensors: dict[str, np.ndarray], meta: dict | None = None) -> None:
    """Write named tensors and metadata as plain text.

    Values are printed with %.17g, which round-trips IEEE float64
    exactly.  Metadata values are JSON-encoded strings.
    """
    lines = [CHECKPOINT_MAGIC]
    for key, value in sorted((meta or {}).items()):
        lines.append(f"meta {key} {json.dumps(value)}")
    for name in sorted(tensors):
        t = np.asarray(tensors[name], dtype=np.float64)
        dims = " ".join(str(d) for d in t.shape)
        lines.append(f"tensor {name} {t.ndim} {dims}")
        flat = t.reshape(-1)
        lines.append(" ".join(f"{x:.17g}" for x in flat))
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    """Inverse of save_checkpoint; returns (tensors, meta)."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: not a {CHECKPOINT_MAGIC!r} checkpoint")
    tensors: dict[str, np.ndarray] = {}
    meta: dict = {}
    i = 1
    while i < len(lines):
        line = lines[i]
        if line.startswith("meta "):
            _, key, raw = line.split(" ", 2)
            meta[key] = json.loads(raw)
            i += 1
        elif line.startswith("tensor "):
            parts = line.split()
            name, ndim = parts[1], int(parts[2])
            shape = tuple(int(x) for x in parts[3 : 3 + ndim])
            values = np.array([float(x) for x in lines[i + 1].split()], dtype=np.float64)
            tensors[name] = values.reshape(shape)
            i += 2
        elif not line.strip():
            i += 1
        else:
            raise ValueError(f"{path}: unexpected line {i + 1}: {line[:40]!r}")
    return tensors, meta


def mlp_to_tensors(prefix: str, params: MlpParams) -> tuple[dict[str, np.ndarray], str]:
    """Flatten an MLP into named tensors plus its structure string."""
    tensors = {}
    for i, layer in enumerate(params.layers):
        tensors[f"{prefix}.{i}.w"] = layer.w
        tensors[f"{prefix}.{i}.b"] = layer.b
    return tensors, params.structure()


def mlp_from_tensors(prefix: str, tensors: dict[str, np.ndarray], structure: str) -> MlpParams:
    """Rebuild an MLP from named tensors and its structure string."""
    specs = structure.split(">")[1:]
    layers = []
    for i, spec in enumerate(specs):
        _, act, beta = spec.split(":")
        layers.append(Layer(
            w=np.asarray(tensors[f"{prefix}.{i}.w"], dtype=np.float64),
            b=np.asarray(tensors[f"{prefix}.{i}.b"], dtype=np.float64),
            activation=act,
            beta=float(beta),
        ))
    return MlpParams(layers)
