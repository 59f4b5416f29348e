"""Minimal dense network machinery for the Q-learning oracle.

One hidden ReLU layer, Huber loss on selected outputs, Adam updates. The nets
are tiny (hundreds of weights), so everything is plain numpy with explicit
backprop; no deep-learning dependency.
"""

from __future__ import annotations

import numpy as np


class Mlp:
    """input -> hidden (ReLU) -> output, float64 weights."""

    def __init__(self, n_in: int, n_hidden: int, n_out: int,
                 rng: np.random.Generator | None = None):
        self.sizes = (n_in, n_hidden, n_out)
        if rng is None:
            self.w1 = np.zeros((n_in, n_hidden))
            self.w2 = np.zeros((n_hidden, n_out))
        else:
            self.w1 = rng.normal(0.0, np.sqrt(2.0 / max(n_in, 1)), (n_in, n_hidden))
            self.w2 = rng.normal(0.0, np.sqrt(2.0 / n_hidden), (n_hidden, n_out))
        self.b1 = np.zeros(n_hidden)
        self.b2 = np.zeros(n_out)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Q-values for a batch (2-D) or a single encoding (1-D)."""
        pre = x @ self.w1 + self.b1
        return np.maximum(pre, 0.0) @ self.w2 + self.b2

    def forward_cached(self, x: np.ndarray):
        pre = x @ self.w1 + self.b1
        hid = np.maximum(pre, 0.0)
        return hid @ self.w2 + self.b2, pre, hid

    def backward(self, x, pre, hid, grad_out):
        """Gradients of a scalar loss given d(loss)/d(output)."""
        gw2 = hid.T @ grad_out
        gb2 = grad_out.sum(axis=0)
        ghid = grad_out @ self.w2.T
        ghid = ghid * (pre > 0.0)
        gw1 = x.T @ ghid
        gb1 = ghid.sum(axis=0)
        return gw1, gb1, gw2, gb2

    def params(self):
        return [self.w1, self.b1, self.w2, self.b2]

    def copy_from(self, other: "Mlp") -> None:
        self.w1 = other.w1.copy()
        self.b1 = other.b1.copy()
        self.w2 = other.w2.copy()
        self.b2 = other.b2.copy()

    def clone(self) -> "Mlp":
        out = Mlp(*self.sizes)
        out.copy_from(self)
        return out

    def flat_weights(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params()])

    def load_flat(self, flat: np.ndarray) -> None:
        i = 0
        for p in self.params():
            p[...] = np.asarray(flat[i:i + p.size]).reshape(p.shape)
            i += p.size


class Adam:
    """Adaptive-moment gradient steps with bias correction."""

    def __init__(self, params, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)


def huber(diff: np.ndarray, kappa: float = 1.0):
    """Elementwise Huber loss values and derivative w.r.t. ``diff``."""
    a = np.abs(diff)
    quad = a <= kappa
    loss = np.where(quad, 0.5 * diff * diff, kappa * (a - 0.5 * kappa))
    grad = np.where(quad, diff, kappa * np.sign(diff))
    return loss, grad
