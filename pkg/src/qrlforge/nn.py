"""Minimal dense networks with reverse-mode gradients, plus Adam.

The same optimizer drives classical network weights and quantum parameter
vectors; ``GroupedAdam`` lets named slices of one flat vector carry distinct
learning rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DenseNet:
    """Feed-forward net with tanh hidden activations and an affine output."""

    def __init__(self, sizes: list[int], rng: np.random.Generator) -> None:
        if len(sizes) < 2:
            raise ValueError("need at least an input and an output size")
        self.sizes = list(sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            self.biases.append(np.zeros(fan_out))

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def forward(self, x: np.ndarray) -> np.ndarray:
        y, _ = self.forward_cached(x)
        return y

    def forward_cached(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Forward pass keeping per-layer activations for backward().

        ``x`` may be a single vector or a (batch, features) matrix.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.sizes[0]:
            raise ValueError(f"input size {x.shape[-1]} != {self.sizes[0]}")
        activations = [x]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w.T + b
            h = z if i == last else np.tanh(z)
            activations.append(h)
        return h, activations

    def backward(
        self, activations: list[np.ndarray], output_gradient: np.ndarray
    ) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
        """Exact reverse-mode gradients of the forward map.

        Returns per-layer (dW, db) plus the gradient w.r.t. the input.
        Batched if the cached activations are batched; gradients sum over the
        batch axis.
        """
        g = np.asarray(output_gradient, dtype=np.float64)
        if g.shape != activations[-1].shape:
            raise ValueError(f"output gradient shape {g.shape} != {activations[-1].shape}")
        batched = g.ndim == 2
        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(self.weights)  # type: ignore[list-item]
        for i in range(len(self.weights) - 1, -1, -1):
            x_in = activations[i]
            if i != len(self.weights) - 1:
                g = g * (1.0 - activations[i + 1] ** 2)
            if batched:
                dw = g.T @ x_in
                db = g.sum(axis=0)
            else:
                dw = np.outer(g, x_in)
                db = g
            grads[i] = (dw, db)
            g = g @ self.weights[i]
        return grads, g

    def get_flat(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b)
        return np.concatenate(parts)

    def set_flat(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {flat.size}")
        pos = 0
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[i] = flat[pos : pos + w.size].reshape(w.shape).copy()
            pos += w.size
            self.biases[i] = flat[pos : pos + b.size].copy()
            pos += b.size

    def flatten_grads(self, grads: list[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
        parts = []
        for dw, db in grads:
            parts.append(dw.ravel())
            parts.append(db)
        return np.concatenate(parts)


@dataclass
class AdamState:
    """Bias-corrected Adam accumulators for one flat parameter vector."""

    lr: float | np.ndarray
    m: np.ndarray
    v: np.ndarray
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def create(cls, n_params: int, lr: float | np.ndarray) -> "AdamState":
        return cls(lr=lr, m=np.zeros(n_params), v=np.zeros(n_params))


def adam_step(state: AdamState, params: np.ndarray, grads: np.ndarray) -> tuple[np.ndarray, AdamState]:
    """One Adam update; returns the new parameters and the advanced state."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ValueError(f"shape mismatch: params {params.shape}, grads {grads.shape}, state {state.m.shape}")
    state.step_count += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads**2
    m_hat = state.m / (1.0 - state.beta1**state.step_count)
    v_hat = state.v / (1.0 - state.beta2**state.step_count)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_params, state


class GroupedAdam:
    """Adam over a flat vector with per-group learning rates.

    ``groups`` are (name, slice) pairs partitioning the vector; ``rates``
    maps group names to learning rates, with ``default_lr`` for the rest.
    """

    def __init__(
        self,
        n_params: int,
        groups: list[tuple[str, slice]],
        rates: dict[str, float] | None = None,
        default_lr: float = 1e-3,
    ) -> None:
        lr = np.full(n_params, default_lr)
        for name, sl in groups:
            if rates and name in rates:
                lr[sl] = rates[name]
        self.state = AdamState.create(n_params, lr)

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        new_params, self.state = adam_step(self.state, params, grads)
        return new_params
