"""Small dense ReLU network trained online on one output at a time."""
from __future__ import annotations

import json
import math
from typing import Sequence

import numpy as np


class MlpModel:
    """Feed-forward net: ReLU on hidden layers, identity on the output layer.

    ``weights[l]`` has shape ``(fan_out, fan_in)``.
    """

    def __init__(self, layer_dims: Sequence[int], seed: int | None = None, zero: bool = False):
        dims = [int(d) for d in layer_dims]
        if len(dims) < 2 or min(dims) < 1:
            raise ValueError(f"invalid layer_dims {layer_dims}")
        self.layer_dims = dims
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            if zero:
                w = np.zeros((fan_out, fan_in))
            else:
                limit = math.sqrt(6.0 / (fan_in + fan_out))
                w = rng.uniform(-limit, limit, size=(fan_out, fan_in))
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out))

    @property
    def n_outputs(self) -> int:
        return self.layer_dims[-1]

    def _check(self, state) -> np.ndarray:
        x = np.asarray(state, dtype=float)
        if x.shape != (self.layer_dims[0],):
            raise ValueError(f"state must have shape ({self.layer_dims[0]},), got {x.shape}")
        return x

    def forward(self, state) -> np.ndarray:
        x = self._check(state)
        return self._forward(x)[-1]

    def _forward(self, x: np.ndarray) -> list[np.ndarray]:
        acts = [x]
        last = len(self.weights) - 1
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = w @ acts[-1] + b
            acts.append(z if l == last else np.maximum(z, 0.0))
        return acts

    def gradients(self, state, action_index: int, target: float):
        """Loss ``(target - out[action])**2`` and its parameter gradients."""
        x = self._check(state)
        acts = self._forward(x)
        err = acts[-1][action_index] - target
        delta = np.zeros(self.n_outputs)
        delta[action_index] = 2.0 * err
        gw, gb = [None] * len(self.weights), [None] * len(self.weights)
        for l in range(len(self.weights) - 1, -1, -1):
            gw[l] = np.outer(delta, acts[l])
            gb[l] = delta
            if l:
                delta = (self.weights[l].T @ delta) * (acts[l] > 0)
        return float(err * err), gw, gb

    def train_step(self, state, action_index: int, target_reward: float, alpha: float) -> float:
        """One SGD step on the selected output; returns the pre-update loss."""
        if not math.isfinite(target_reward):
            raise ValueError(f"target must be finite, got {target_reward}")
        if not 0 <= action_index < self.n_outputs:
            raise IndexError(f"action {action_index} out of range")
        loss, gw, gb = self.gradients(state, action_index, target_reward)
        for w, b, dw, db in zip(self.weights, self.biases, gw, gb):
            w -= alpha * dw
            b -= alpha * db
        if not all(np.isfinite(w).all() and np.isfinite(b).all() for w, b in zip(self.weights, self.biases)):
            raise FloatingPointError("non-finite parameters after update")
        return loss

    # checkpoint -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "layer_dims": self.layer_dims,
            "weights": [w.ravel().tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MlpModel":
        model = cls(data["layer_dims"], zero=True)
        for l, (w, b) in enumerate(zip(data["weights"], data["biases"])):
            model.weights[l] = np.array(w, dtype=float).reshape(model.weights[l].shape)
            model.biases[l] = np.array(b, dtype=float)
        return model

    def save(self, path) -> None:
        # repr-based JSON floats round-trip exactly
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "MlpModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def forward(model: MlpModel, state) -> np.ndarray:
    return model.forward(state)


def train_step(model: MlpModel, state, action_index: int, target_reward: float, alpha: float) -> float:
    return model.train_step(state, action_index, target_reward, alpha)
