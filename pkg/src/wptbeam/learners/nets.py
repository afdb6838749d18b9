"""Small feedforward networks with hand-rolled gradients.

Three affine layers with tanh between them; the actor head ends in a softmax,
the critic head is a single linear unit. Gradients are exact backpropagation
and are unit-checked against central finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MlpParams:
    weights: list[np.ndarray]  # each (out, in)
    biases: list[np.ndarray]  # each (out,)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def copy(self) -> "MlpParams":
        return MlpParams([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def all_finite(self) -> bool:
        return all(np.isfinite(w).all() for w in self.weights) and all(
            np.isfinite(b).all() for b in self.biases
        )


def init_mlp(dims, rng: np.random.Generator) -> MlpParams:
    """Gaussian weights scaled by 1/sqrt(fan-in), zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.standard_normal((fan_out, fan_in)) / np.sqrt(fan_in))
        biases.append(np.zeros(fan_out))
    return MlpParams(weights, biases)


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z, axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def _forward_batch(params: MlpParams, X: np.ndarray):
    """Returns (hidden activations per layer, raw outputs)."""
    hidden = []
    h = X
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w.T + b
        if i < last:
            h = np.tanh(z)
            hidden.append(h)
        else:
            return hidden, z


def mlp_forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Raw network output for a single observation vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (params.dims[0],):
        raise ValueError(f"expected input of shape ({params.dims[0]},), got {x.shape}")
    _, out = _forward_batch(params, x[None, :])
    return out[0]


def actor_probs(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Action distribution: softmax over the raw outputs."""
    return softmax(mlp_forward(params, x))


def critic_value(params: MlpParams, x: np.ndarray) -> float:
    return float(mlp_forward(params, x)[0])


def critic_values_batch(params: MlpParams, X: np.ndarray) -> np.ndarray:
    _, out = _forward_batch(params, np.asarray(X, dtype=float))
    return out[:, 0]


def _backprop(params: MlpParams, X: np.ndarray, hidden, d_out: np.ndarray):
    """Gradients of a scalar function given its derivative at the raw outputs."""
    grads_w = [None] * len(params.weights)
    grads_b = [None] * len(params.biases)
    d = d_out
    for i in range(len(params.weights) - 1, -1, -1):
        below = X if i == 0 else hidden[i - 1]
        grads_w[i] = d.T @ below
        grads_b[i] = d.sum(axis=0)
        if i > 0:
            d = (d @ params.weights[i]) * (1.0 - hidden[i - 1] ** 2)
    return list(zip(grads_w, grads_b))


def critic_loss_and_grads(params: MlpParams, X: np.ndarray, targets: np.ndarray):
    """Half mean squared error of v(s) against fixed targets, with its gradients."""
    X = np.asarray(X, dtype=float)
    targets = np.asarray(targets, dtype=float)
    hidden, out = _forward_batch(params, X)
    err = out[:, 0] - targets
    loss = 0.5 * float(np.mean(err**2))
    d_out = (err / len(err))[:, None]
    return loss, _backprop(params, X, hidden, d_out)


def actor_score_and_grads(params: MlpParams, X: np.ndarray, actions, advantages):
    """Mean advantage-weighted log-likelihood of the taken actions, with its gradients.

    Ascending these gradients increases the probability of positive-advantage
    actions.
    """
    X = np.asarray(X, dtype=float)
    actions = np.asarray(actions, dtype=int)
    advantages = np.asarray(advantages, dtype=float)
    hidden, out = _forward_batch(params, X)
    probs = softmax(out)
    n = len(actions)
    logp = np.log(probs[np.arange(n), actions])
    score = float(np.mean(logp * advantages))
    onehot = np.zeros_like(probs)
    onehot[np.arange(n), actions] = 1.0
    d_out = (onehot - probs) * (advantages / n)[:, None]
    return score, _backprop(params, X, hidden, d_out)


def apply_gradients(params: MlpParams, grads, rate: float, sign: float) -> None:
    """In-place parameter update: +1 ascends, -1 descends."""
    for (w, b), (dw, db) in zip(zip(params.weights, params.biases), grads):
        w += sign * rate * dw
        b += sign * rate * db


def save_params(path, named: dict[str, MlpParams]) -> None:
    """Checkpoint several networks into one npz blob; round-trips bit-exactly."""
    arrays = {"format_version": np.array([1])}
    for name, params in named.items():
        for i, (w, b) in enumerate(zip(params.weights, params.biases)):
            arrays[f"{name}__W{i}"] = w
            arrays[f"{name}__b{i}"] = b
    np.savez(path, **arrays)


def load_params(path) -> dict[str, MlpParams]:
    with np.load(path) as blob:
        version = blob["format_version"][0]
        if version != 1:
            raise ValueError(f"unrecognized checkpoint version {version}")
        named: dict[str, MlpParams] = {}
        groups: dict[str, dict[int, tuple[np.ndarray, np.ndarray]]] = {}
        for key in blob.files:
            if key == "format_version":
                continue
            name, tail = key.rsplit("__", 1)
            idx = int(tail[1:])
            layers = groups.setdefault(name, {})
            w, b = layers.get(idx, (None, None))
            if tail.startswith("W"):
                layers[idx] = (blob[key], b)
            else:
                layers[idx] = (w, blob[key])
        for name, layers in groups.items():
            ordered = [layers[i] for i in range(len(layers))]
            named[name] = MlpParams([w for w, _ in ordered], [b for _, b in ordered])
    return named
