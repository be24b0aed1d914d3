"""Multinomial softmax probe over pooled feature stacks.

A deliberately small, fully verifiable classifier: standardized inputs,
zero-initialized weights, full-batch gradient descent on the summed
cross-entropy (optionally ridge-regularized).  The convex objective makes
zero initialization sufficient and training deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, NumericError
from .tensorstore import LabelSpace, read_tensor, write_tensor

_STD_FLOOR = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 500
    l2: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")


@dataclass
class LinearSoftmaxModel:
    weights: np.ndarray  # (num_classes, feature_dim)
    bias: np.ndarray     # (num_classes,)
    feat_mean: np.ndarray
    feat_std: np.ndarray  # floored at 1e-8
    label_space: LabelSpace

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.weights.shape[1]

    def standardize(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.feature_dim:
            raise ValueError(
                f"dimension mismatch: model {self.feature_dim}, input {x.shape[1]}"
            )
        return (x - self.feat_mean) / self.feat_std


def softmax_forward(model: LinearSoftmaxModel, x: np.ndarray) -> np.ndarray:
    """Class probabilities softmax(W x_std + b), max-subtracted for stability."""
    xs = model.standardize(x)
    logits = xs @ model.weights.T + model.bias
    logits -= logits.max(axis=1, keepdims=True)
    e = np.exp(logits)
    probs = e / e.sum(axis=1, keepdims=True)
    return probs[0] if np.asarray(x).ndim == 1 else probs


def _forward(model, x):
    probs = softmax_forward(model, np.atleast_2d(np.asarray(x, dtype=np.float64)))
    return np.atleast_2d(probs)


def _check_labels(labels, num_classes):
    labels = np.asarray(labels, dtype=np.int64)
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= num_classes:
        raise ValueError(f"labels out of range [0, {num_classes})")
    return labels


def ce_loss(
    model: LinearSoftmaxModel, x: np.ndarray, labels: np.ndarray, l2: float = 0.0
) -> float:
    """Summed cross-entropy over the batch plus l2/2 * ||W||^2 when l2 > 0.

    The sum (not the mean) is used, so the loss of a duplicated batch is
    exactly twice the original.
    """
    probs = _forward(model, x)
    labels = _check_labels(labels, model.num_classes)
    ll = np.log(probs[np.arange(len(labels)), labels])
    loss = float(-ll.sum())
    if l2 > 0:
        loss += 0.5 * l2 * float(np.sum(model.weights**2))
    return loss


def ce_gradient(
    model: LinearSoftmaxModel, x: np.ndarray, labels: np.ndarray, l2: float = 0.0
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradient of the summed loss: dW = (p - onehot)^T x_std + l2 W."""
    probs = _forward(model, x)
    labels = _check_labels(labels, model.num_classes)
    delta = probs.copy()
    delta[np.arange(len(labels)), labels] -= 1.0
    xs = model.standardize(x)
    dw = delta.T @ xs
    db = delta.sum(axis=0)
    if l2 > 0:
        dw = dw + l2 * model.weights
    return dw, db


def train_linear(
    features: np.ndarray,
    labels: np.ndarray,
    label_space: LabelSpace,
    config: TrainConfig = TrainConfig(),
) -> LinearSoftmaxModel:
    """Full-batch gradient descent from zero weights; deterministic.

    Raises NumericError (naming the epoch) if the loss goes non-finite.
    """
    x = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or len(x) != len(labels):
        raise ValueError(f"bad training shapes {x.shape} vs {labels.shape}")
    if len(np.unique(labels)) < 2:
        raise DataError("single-class input: need >= 2 classes to train")
    num_classes = label_space.num_classes
    _check_labels(labels, num_classes)

    mean = x.mean(axis=0)
    std = np.maximum(x.std(axis=0), _STD_FLOOR)
    model = LinearSoftmaxModel(
        weights=np.zeros((num_classes, x.shape[1])),
        bias=np.zeros(num_classes),
        feat_mean=mean,
        feat_std=std,
        label_space=label_space,
    )
    xs = model.standardize(x)
    onehot_rows = np.arange(len(labels))
    for epoch in range(config.epochs):
        logits = xs @ model.weights.T + model.bias
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        probs = e / e.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore"):
            loss = float(-np.log(probs[onehot_rows, labels]).sum())
        if config.l2 > 0:
            loss += 0.5 * config.l2 * float(np.sum(model.weights**2))
        if not np.isfinite(loss):
            raise NumericError(f"training diverged at epoch {epoch}: loss non-finite")
        delta = probs
        delta[onehot_rows, labels] -= 1.0
        dw = delta.T @ xs
        if config.l2 > 0:
            dw += config.l2 * model.weights
        model.weights -= config.learning_rate * dw
        model.bias -= config.learning_rate * delta.sum(axis=0)
        if not (np.all(np.isfinite(model.weights)) and np.all(np.isfinite(model.bias))):
            raise NumericError(f"training diverged at epoch {epoch}: parameters non-finite")
    return model


def predict_linear(model: LinearSoftmaxModel, x: np.ndarray) -> np.ndarray:
    """Argmax class ids (ties resolve to the lowest id)."""
    probs = _forward(model, x)
    ids = np.argmax(probs, axis=1)
    return ids if np.asarray(x).ndim > 1 else int(ids[0])


def save_linear(model: LinearSoftmaxModel, directory, config: TrainConfig | None = None) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_tensor(model.weights.astype(np.float32), directory / "weights.tnsr")
    write_tensor(model.bias.astype(np.float32), directory / "bias.tnsr")
    write_tensor(model.feat_mean.astype(np.float32), directory / "feat_mean.tnsr")
    write_tensor(model.feat_std.astype(np.float32), directory / "feat_std.tnsr")
    doc = {"type": "linear", "label_space": model.label_space.to_json()}
    if config is not None:
        doc["config"] = {
            "learning_rate": config.learning_rate,
            "epochs": config.epochs,
            "l2": config.l2,
        }
    with open(directory / "model.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_linear(directory) -> LinearSoftmaxModel:
    directory = Path(directory)
    with open(directory / "model.json", "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("type") != "linear":
        raise DataError(f"{directory} does not hold a linear model")
    return LinearSoftmaxModel(
        weights=read_tensor(directory / "weights.tnsr").astype(np.float64),
        bias=read_tensor(directory / "bias.tnsr").astype(np.float64),
        feat_mean=read_tensor(directory / "feat_mean.tnsr").astype(np.float64),
        feat_std=read_tensor(directory / "feat_std.tnsr").astype(np.float64),
        label_space=LabelSpace.from_json(doc["label_space"]),
    )
