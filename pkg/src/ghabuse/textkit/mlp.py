"""One-hidden-layer perceptron for binary spam scoring.

ReLU hidden layer, sigmoid output, mean binary cross-entropy, full-batch
gradient descent. Everything runs in float64 so gradient checks are tight.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

HIDDEN_DIM = 64


class ClassifierInputError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SpamClassifier:
    weights_1: np.ndarray  # hidden_dim x input_dim
    bias_1: np.ndarray
    weights_2: np.ndarray  # hidden_dim
    bias_2: float
    threshold: float = 0.5

    def __post_init__(self) -> None:
        h, d = self.weights_1.shape
        if self.bias_1.shape != (h,) or self.weights_2.shape != (h,):
            raise ClassifierInputError("classifier parameter shapes are inconsistent")
        if not 0.0 < self.threshold < 1.0:
            raise ClassifierInputError("threshold must lie in (0, 1)")
        for arr in (self.weights_1, self.bias_1, self.weights_2):
            arr.setflags(write=False)

    @property
    def input_dim(self) -> int:
        return self.weights_1.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.weights_1.shape[0]

    @classmethod
    def zeros(cls, input_dim: int, hidden_dim: int = HIDDEN_DIM, threshold: float = 0.5) -> SpamClassifier:
        return cls(np.zeros((hidden_dim, input_dim)), np.zeros(hidden_dim), np.zeros(hidden_dim), 0.0, threshold)

    def to_dict(self) -> dict:
        return {
            "input_dim": self.input_dim,
            "hidden_dim": self.hidden_dim,
            "weights_1": self.weights_1.tolist(),
            "bias_1": self.bias_1.tolist(),
            "weights_2": self.weights_2.tolist(),
            "bias_2": float(self.bias_2),
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> SpamClassifier:
        w1 = np.asarray(data["weights_1"], dtype=np.float64).reshape(data["hidden_dim"], data["input_dim"])
        return cls(
            w1,
            np.asarray(data["bias_1"], dtype=np.float64),
            np.asarray(data["weights_2"], dtype=np.float64),
            float(data["bias_2"]),
            float(data.get("threshold", 0.5)),
        )


def _sigmoid(z):
    e = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _as_matrix(vectors, dim: int) -> np.ndarray:
    rows = []
    for v in vectors:
        if isinstance(v, Mapping):
            row = np.zeros(dim)
            for i, w in v.items():
                if not 0 <= i < dim:
                    raise ClassifierInputError(f"sparse index {i} outside input_dim {dim}")
                row[i] = w
        else:
            row = np.asarray(v, dtype=np.float64)
            if row.shape != (dim,):
                raise ClassifierInputError(f"expected a vector of length {dim}, got shape {row.shape}")
        rows.append(row)
    return np.vstack(rows) if rows else np.zeros((0, dim))


def forward(c: SpamClassifier, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (hidden pre-activations, hidden activations, output logits) for a batch."""
    z1 = x @ c.weights_1.T + c.bias_1
    h = np.maximum(z1, 0.0)
    return z1, h, h @ c.weights_2 + c.bias_2


def loss_and_gradients(c: SpamClassifier, x: np.ndarray, y: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Mean binary cross-entropy and its gradient w.r.t. every parameter."""
    n = x.shape[0]
    z1, h, z2 = forward(c, x)
    # softplus(z) - y*z is BCE written on logits
    loss = float(np.mean(np.logaddexp(0.0, z2) - y * z2))
    dz2 = (_sigmoid(z2) - y) / n
    dz1 = np.outer(dz2, c.weights_2) * (z1 > 0)
    grads = {
        "weights_1": dz1.T @ x,
        "bias_1": dz1.sum(axis=0),
        "weights_2": h.T @ dz2,
        "bias_2": np.asarray(dz2.sum()),
    }
    return loss, grads


def classifier_train(
    model_shape: tuple[int, int],
    data: Sequence[tuple[object, int]],
    epochs: int = 300,
    learning_rate: float = 0.5,
    seed: int = 0,
    threshold: float = 0.5,
) -> SpamClassifier:
    input_dim, hidden_dim = model_shape
    labels = [int(label) for _, label in data]
    if set(labels) != {0, 1}:
        raise ClassifierInputError("training data must contain both classes")
    x = _as_matrix([v for v, _ in data], input_dim)
    y = np.asarray(labels, dtype=np.float64)

    rng = np.random.default_rng(seed)
    w1 = rng.standard_normal((hidden_dim, input_dim)) * np.sqrt(2.0 / max(input_dim, 1))
    b1 = np.zeros(hidden_dim)
    w2 = rng.standard_normal(hidden_dim) * np.sqrt(1.0 / hidden_dim)
    b2 = 0.0
    for _ in range(epochs):
        c = SpamClassifier(w1, b1, w2, b2, threshold)
        _, g = loss_and_gradients(c, x, y)
        w1 = w1 - learning_rate * g["weights_1"]
        b1 = b1 - learning_rate * g["bias_1"]
        w2 = w2 - learning_rate * g["weights_2"]
        b2 = b2 - learning_rate * float(g["bias_2"])
    return SpamClassifier(w1, b1, w2, b2, threshold)


def classifier_predict(c: SpamClassifier, v) -> float:
    """Spam probability for a single dense or sparse input vector."""
    x = _as_matrix([v], c.input_dim)
    _, _, z2 = forward(c, x)
    return float(_sigmoid(z2)[0])


def predict_many(c: SpamClassifier, vectors) -> np.ndarray:
    x = _as_matrix(vectors, c.input_dim)
    return _sigmoid(forward(c, x)[2])
