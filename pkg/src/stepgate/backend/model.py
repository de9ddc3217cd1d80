"""One-hidden-layer tanh perceptron with hand-derived gradients.

forward:  logits = tanh(X W1 + b1) W2 + b2, or X W2 + b2 when the hidden
width is zero (plain linear classifier).

loss: mean softmax cross-entropy plus (l2/2)*(|W1|^2 + |W2|^2); biases
carry no penalty. The softmax subtracts the row max first so the loss
stays finite for logits up to ~1e3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ShapeMismatch
from .data import DatasetSplit
from .rng import Rng

ZERO_OUTPUT = "zero_output"
UNIFORM = "uniform"


@dataclass(eq=False)
class Params:
    """W1 (d, h), b1 (h,), W2 (h, C), b2 (C,); h == 0 means W2 is (d, C)."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def __post_init__(self):
        self.W1 = np.asarray(self.W1, dtype=np.float64)
        self.b1 = np.asarray(self.b1, dtype=np.float64)
        self.W2 = np.asarray(self.W2, dtype=np.float64)
        self.b2 = np.asarray(self.b2, dtype=np.float64)
        d, h = self.W1.shape
        if self.b1.shape != (h,):
            raise ShapeMismatch(f"b1 shape {self.b1.shape} does not match hidden width {h}")
        expected_in = h if h > 0 else d
        if self.W2.shape[0] != expected_in:
            raise ShapeMismatch(
                f"W2 input dim {self.W2.shape[0]} does not match {'hidden width' if h else 'feature dim'} {expected_in}"
            )
        if self.b2.shape != (self.W2.shape[1],):
            raise ShapeMismatch(f"b2 shape {self.b2.shape} does not match {self.W2.shape[1]} classes")

    @property
    def d(self) -> int:
        return self.W1.shape[0]

    @property
    def h(self) -> int:
        return self.W1.shape[1]

    @property
    def n_classes(self) -> int:
        return self.W2.shape[1]

    def copy(self) -> "Params":
        return Params(self.W1.copy(), self.b1.copy(), self.W2.copy(), self.b2.copy())

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.W1, self.b1, self.W2, self.b2

    def all_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.arrays())


def init_params(d: int, h: int, n_classes: int, scheme: str = ZERO_OUTPUT,
                seed: int = 0, scale: float = 0.1) -> Params:
    """Seeded parameter init.

    zero_output: W1, b1 uniform in +-scale (default 0.1), W2 = b2 = 0, so
    the untrained net emits all-zero logits (uniform softmax).
    uniform: every layer uniform in +-scale.
    """
    if d <= 0 or n_classes <= 0 or h < 0:
        raise ValueError("d and n_classes must be positive, h >= 0")
    rng = Rng(seed)
    W1 = rng.uniform_signed((d, h), scale)
    b1 = rng.uniform_signed((h,), scale)
    w2_rows = h if h > 0 else d
    if scheme == ZERO_OUTPUT:
        W2 = np.zeros((w2_rows, n_classes))
        b2 = np.zeros(n_classes)
    elif scheme == UNIFORM:
        W2 = rng.uniform_signed((w2_rows, n_classes), scale)
        b2 = rng.uniform_signed((n_classes,), scale)
    else:
        raise ValueError(f"unknown init scheme {scheme!r}")
    return Params(W1, b1, W2, b2)


def _hidden_and_logits(p: Params, X: np.ndarray) -> tuple[np.ndarray | None, np.ndarray]:
    if X.ndim != 2 or X.shape[1] != p.d:
        raise ShapeMismatch(f"input shape {X.shape} does not match feature dim {p.d}")
    if p.h == 0:
        return None, X @ p.W2 + p.b2
    hidden = np.tanh(X @ p.W1 + p.b1)
    return hidden, hidden @ p.W2 + p.b2


def forward(p: Params, X: np.ndarray) -> np.ndarray:
    """Logits for a batch of rows."""
    return _hidden_and_logits(p, np.asarray(X, dtype=np.float64))[1]


def predict(p: Params, X: np.ndarray) -> np.ndarray:
    return np.argmax(forward(p, X), axis=1)


def _softmax_ce(logits: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and per-row softmax probabilities, max-shifted."""
    z = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(z).sum(axis=1))
    losses = lse - z[np.arange(z.shape[0]), y]
    probs = np.exp(z - lse[:, None])
    return float(losses.mean()), probs


def loss(p: Params, X: np.ndarray, y: np.ndarray, l2: float = 0.0) -> float:
    """Mean cross-entropy plus the L2 weight penalty (no gradient)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    if y.shape != (X.shape[0],):
        raise ShapeMismatch(f"labels shape {y.shape} does not match batch of {X.shape[0]}")
    _, logits = _hidden_and_logits(p, X)
    ce, _ = _softmax_ce(logits, y)
    return ce + 0.5 * l2 * (float(np.sum(p.W1 * p.W1)) + float(np.sum(p.W2 * p.W2)))


def loss_and_grad(p: Params, X: np.ndarray, y: np.ndarray, l2: float = 0.0) -> tuple[float, Params]:
    """Loss and analytic gradients in a Params-shaped container."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    if y.shape != (X.shape[0],):
        raise ShapeMismatch(f"labels shape {y.shape} does not match batch of {X.shape[0]}")
    n = X.shape[0]
    hidden, logits = _hidden_and_logits(p, X)
    ce, probs = _softmax_ce(logits, y)
    total = ce + 0.5 * l2 * (float(np.sum(p.W1 * p.W1)) + float(np.sum(p.W2 * p.W2)))

    dlogits = probs.copy()
    dlogits[np.arange(n), y] -= 1.0
    dlogits /= n
    if hidden is None:
        dW2 = X.T @ dlogits + l2 * p.W2
        db2 = dlogits.sum(axis=0)
        dW1 = np.zeros_like(p.W1)
        db1 = np.zeros_like(p.b1)
    else:
        dW2 = hidden.T @ dlogits + l2 * p.W2
        db2 = dlogits.sum(axis=0)
        dhidden = dlogits @ p.W2.T
        dpre = dhidden * (1.0 - hidden * hidden)  # tanh'
        dW1 = X.T @ dpre + l2 * p.W1
        db1 = dpre.sum(axis=0)
    return total, Params(dW1, db1, dW2, db2)


def finite_diff_grad(p: Params, X: np.ndarray, y: np.ndarray, l2: float = 0.0,
                     h_step: float = 1e-5,
                     loss_fn: Callable[[Params], float] | None = None) -> Params:
    """Central-difference gradient oracle, one coordinate at a time.

    loss_fn replaces the objective when probing the oracle itself (e.g.
    with |theta|^2 / 2 the result must equal theta up to O(h^2)).
    """
    if h_step <= 0:
        raise ValueError("h_step must be positive")
    if loss_fn is None:
        loss_fn = lambda q: loss(q, X, y, l2)
    work = p.copy()
    grads = Params(*(np.zeros_like(a) for a in p.arrays()))
    for arr, out in zip(work.arrays(), grads.arrays()):
        flat = arr.reshape(-1)
        gflat = out.reshape(-1)
        for i in range(flat.shape[0]):
            orig = flat[i]
            flat[i] = orig + h_step
            up = loss_fn(work)
            flat[i] = orig - h_step
            down = loss_fn(work)
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * h_step)
    return grads


def max_rel_error(a: Params, b: Params) -> float:
    """max_i |a_i - b_i| / max(1, |a_i|, |b_i|) over every coordinate."""
    worst = 0.0
    for x, z in zip(a.arrays(), b.arrays()):
        if x.size == 0:
            continue
        denom = np.maximum(1.0, np.maximum(np.abs(x), np.abs(z)))
        worst = max(worst, float((np.abs(x - z) / denom).max()))
    return worst


def weight_l2_norm(p: Params) -> float:
    """Euclidean norm of the penalized weights (biases excluded)."""
    return float(np.sqrt(np.sum(p.W1 * p.W1) + np.sum(p.W2 * p.W2)))


def batch_of(split: DatasetSplit, idx: np.ndarray) -> DatasetSplit:
    return DatasetSplit(split.features[idx], split.labels[idx], split.n_classes)
