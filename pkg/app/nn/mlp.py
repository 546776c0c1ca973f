"""Dense feed-forward classifier with exact reverse-mode gradients.

All weights live in one flat float64 vector so that every unlearning
algorithm sees the same gradient representation. Layer l occupies

  W_l  fan_in × fan_out, row-major
  b_l  fan_out

in order from the input layer to the logit layer. Hidden layers use the
architecture's activation; the last layer is affine (logits).

Every function here is pure: inputs are never mutated and the same
(arch, params, batch) always yields bit-identical results.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

from app.core.errors import DimensionMismatchError, EmptySetError, LabelRangeError
from app.models.schema import Activation, MlpArchitecture

ParamVector = NDArray[np.float64]
GradientVector = NDArray[np.float64]
Matrix = NDArray[np.float64]
Labels = NDArray[np.int64]


# ---------------------------------------------------------------------------
# Layout helpers
# ---------------------------------------------------------------------------


def param_count(arch: MlpArchitecture) -> int:
    """Total number of weights and biases."""
    return arch.n_params


def _layer_slices(arch: MlpArchitecture) -> Iterator[tuple[slice, slice, int, int]]:
    offset = 0
    widths = arch.layer_widths
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        w = slice(offset, offset + fan_in * fan_out)
        offset = w.stop
        b = slice(offset, offset + fan_out)
        offset = b.stop
        yield w, b, fan_in, fan_out


def unflatten(arch: MlpArchitecture, params: ParamVector) -> list[tuple[Matrix, Matrix]]:
    """Return (W, b) views per layer into *params* (no copy)."""
    _check_params(arch, params)
    return [
        (params[w].reshape(fan_in, fan_out), params[b])
        for w, b, fan_in, fan_out in _layer_slices(arch)
    ]


def _check_params(arch: MlpArchitecture, params: ParamVector) -> None:
    if params.ndim != 1 or params.shape[0] != arch.n_params:
        raise DimensionMismatchError("params length", arch.n_params, params.shape)


def _check_inputs(arch: MlpArchitecture, inputs: Matrix) -> Matrix:
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[1] != arch.n_inputs:
        raise DimensionMismatchError("input width", arch.n_inputs, x.shape)
    return x


def _check_labels(arch: MlpArchitecture, labels: Labels, n_rows: int) -> Labels:
    y = np.asarray(labels, dtype=np.int64).reshape(-1)
    if y.shape[0] != n_rows:
        raise DimensionMismatchError("label count", n_rows, y.shape[0])
    bad = (y < 0) | (y >= arch.n_classes)
    if bad.any():
        raise LabelRangeError(int(y[np.argmax(bad)]), arch.n_classes)
    return y


# ---------------------------------------------------------------------------
# Initialisation
# ---------------------------------------------------------------------------


def init_range(fan_in: int, fan_out: int) -> float:
    """Half-width s of the uniform init interval [-s, s] for one layer."""
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_params(arch: MlpArchitecture, seed: int) -> ParamVector:
    """Scaled uniform weights, zero biases; a pure function of (arch, seed)."""
    rng = np.random.default_rng(seed)
    params = np.zeros(arch.n_params, dtype=np.float64)
    for w, _b, fan_in, fan_out in _layer_slices(arch):
        s = init_range(fan_in, fan_out)
        params[w] = rng.uniform(-s, s, size=fan_in * fan_out)
    return params


# ---------------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------------


def _activate(z: Matrix, activation: Activation) -> Matrix:
    if activation == Activation.TANH:
        return np.tanh(z)
    return np.maximum(z, 0.0)


def _activate_grad(z: Matrix, a: Matrix, activation: Activation) -> Matrix:
    if activation == Activation.TANH:
        return 1.0 - a * a
    return (z > 0.0).astype(np.float64)


def _forward_cache(
    arch: MlpArchitecture, params: ParamVector, x: Matrix
) -> tuple[Matrix, list[tuple[Matrix, Matrix, Matrix]]]:
    """Run the network keeping (input, pre-activation, activation) per hidden layer."""
    layers = unflatten(arch, params)
    cache: list[tuple[Matrix, Matrix, Matrix]] = []
    a = x
    for W, b in layers[:-1]:
        z = a @ W + b
        h = _activate(z, arch.activation)
        cache.append((a, z, h))
        a = h
    W, b = layers[-1]
    return a @ W + b, cache


def forward(arch: MlpArchitecture, params: ParamVector, inputs: Matrix) -> Matrix:
    """Logits, one row per sample."""
    _check_params(arch, params)
    x = _check_inputs(arch, inputs)
    logits, _ = _forward_cache(arch, params, x)
    return logits


def _log_softmax(logits: Matrix) -> Matrix:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _softmax(logits: Matrix) -> Matrix:
    e = np.exp(logits - logits.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def predict_proba(arch: MlpArchitecture, params: ParamVector, inputs: Matrix) -> Matrix:
    """Row-wise softmax of the logits."""
    return _softmax(forward(arch, params, inputs))


def per_sample_loss(
    arch: MlpArchitecture, params: ParamVector, inputs: Matrix, labels: Labels
) -> NDArray[np.float64]:
    """Softmax cross-entropy of every sample, in input order."""
    logits = forward(arch, params, inputs)
    y = _check_labels(arch, labels, logits.shape[0])
    return -_log_softmax(logits)[np.arange(y.shape[0]), y]


# ---------------------------------------------------------------------------
# Loss and gradient
# ---------------------------------------------------------------------------


def loss_and_grad(
    arch: MlpArchitecture,
    params: ParamVector,
    batch: tuple[Matrix, Labels],
) -> tuple[float, GradientVector]:
    """Mean softmax cross-entropy over *batch* and its exact gradient."""
    _check_params(arch, params)
    features, labels = batch
    x = _check_inputs(arch, features)
    n = x.shape[0]
    if n == 0:
        raise EmptySetError("batch")
    y = _check_labels(arch, labels, n)

    logits, cache = _forward_cache(arch, params, x)
    log_p = _log_softmax(logits)
    rows = np.arange(n)
    loss = float(-log_p[rows, y].sum() / n)

    delta = np.exp(log_p)
    delta[rows, y] -= 1.0
    delta /= n

    layers = unflatten(arch, params)
    slices = list(_layer_slices(arch))
    grad = np.zeros_like(params)
    for layer in range(len(layers) - 1, -1, -1):
        W, _b = layers[layer]
        w_slice, b_slice, _, _ = slices[layer]
        a_prev = cache[layer - 1][2] if layer > 0 else x
        grad[w_slice] = (a_prev.T @ delta).reshape(-1)
        grad[b_slice] = delta.sum(axis=0)
        if layer > 0:
            _a, z, h = cache[layer - 1]
            delta = (delta @ W.T) * _activate_grad(z, h, arch.activation)
    return loss, grad


def apply_update(params: ParamVector, grad: GradientVector, eta: float) -> ParamVector:
    """One plain SGD step: params - eta * grad (new vector)."""
    if params.shape != grad.shape:
        raise DimensionMismatchError("gradient length", params.shape, grad.shape)
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    return params - eta * grad
