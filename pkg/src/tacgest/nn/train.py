"""Network training: Adam, softmax cross-entropy, and an early-stopping loop.

Sequence batches are length-bucketed: samples are ordered by live length and
cut into fixed-size batches whose order (not content) is reshuffled each
epoch, so little computation is spent on padding.  Fixed-size inputs are
plainly reshuffled.  Everything is driven by one seeded generator, so a rerun
with the same config reproduces the run bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 60
    patience: int = 10
    val_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.val_fraction < 1):
            raise DomainError(f"val_fraction must be in (0, 1), got {self.val_fraction}")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise DomainError("batch_size, max_epochs, and patience must be positive")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_accuracy: float


@dataclass
class TrainResult:
    history: list = field(default_factory=list)
    best_val_accuracy: float = 0.0
    best_epoch: int = -1
    epochs_run: int = 0


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> tuple:
    """Mean cross-entropy over the batch and its gradient w.r.t. the logits."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    n = len(labels)
    rows = np.arange(n)
    log_probs = shifted - np.log(exp.sum(axis=1, keepdims=True))
    loss = float(-log_probs[rows, labels].mean())
    dlogits = probs
    dlogits[rows, labels] -= 1.0
    return loss, dlogits / n


class Adam:
    """Adaptive moment optimizer over a named parameter dict, updated in place."""

    def __init__(self, params: dict, config: TrainConfig):
        self.config = config
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        c = self.config
        self.t += 1
        correction1 = 1.0 - c.beta1 ** self.t
        correction2 = 1.0 - c.beta2 ** self.t
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= c.beta1
            m += (1.0 - c.beta1) * g
            v *= c.beta2
            v += (1.0 - c.beta2) * g * g
            params[name] -= c.learning_rate * (m / correction1) / (
                np.sqrt(v / correction2) + c.eps)


def _forward(net, seqs, lengths, idx):
    """Run the net on the given rows, trimming sequence batches to their max length."""
    if lengths is None:
        return net.forward(seqs[idx])
    t = int(lengths[idx].max())
    return net.forward(seqs[idx][:, :t], lengths[idx])


def predict(net, seqs: np.ndarray, lengths: Optional[np.ndarray] = None,
            batch_size: int = 256) -> np.ndarray:
    """Class predictions in evaluation batches (sorted by length internally)."""
    n = len(seqs)
    out = np.empty(n, dtype=np.int64)
    if lengths is None:
        order = np.arange(n)
    else:
        order = np.argsort(lengths, kind="stable")
    for start in range(0, n, batch_size):
        idx = order[start:start + batch_size]
        logits = _forward(net, seqs, lengths, idx)
        out[idx] = np.argmax(logits, axis=1)
    return out


def _batches(n: int, lengths: Optional[np.ndarray], batch_size: int,
             rng: np.random.Generator) -> list:
    if lengths is None:
        order = rng.permutation(n)
        return [order[s:s + batch_size] for s in range(0, n, batch_size)]
    order = np.argsort(lengths, kind="stable")
    batches = [order[s:s + batch_size] for s in range(0, n, batch_size)]
    return [batches[i] for i in rng.permutation(len(batches))]


def train_net(net, seqs: np.ndarray, labels: np.ndarray,
              lengths: Optional[np.ndarray] = None,
              config: TrainConfig = TrainConfig()) -> TrainResult:
    """Fit the net with Adam and early stopping on held-out accuracy.

    A seeded fraction of the data is set aside for validation; training stops
    when validation accuracy has not improved for `patience` epochs or at
    `max_epochs`, and the best-epoch parameters are restored.
    """
    labels = np.asarray(labels, dtype=np.int64)
    n = len(seqs)
    if n != len(labels):
        raise DomainError("inputs and labels length mismatch")
    rng = np.random.default_rng(config.seed)
    order = rng.permutation(n)
    n_val = max(1, int(round(n * config.val_fraction)))
    if n_val >= n:
        raise DomainError("not enough samples to hold out a validation split")
    val_idx = order[:n_val]
    train_idx = order[n_val:]

    optimizer = Adam(net.params, config)
    result = TrainResult()
    best_params = None
    stale = 0
    train_lengths = lengths[train_idx] if lengths is not None else None
    for epoch in range(config.max_epochs):
        epoch_loss = 0.0
        seen = 0
        for batch in _batches(len(train_idx), train_lengths, config.batch_size, rng):
            idx = train_idx[batch]
            logits = _forward(net, seqs, lengths, idx)
            loss, dlogits = softmax_cross_entropy(logits, labels[idx])
            grads = net.backward(dlogits)
            optimizer.step(net.params, grads)
            epoch_loss += loss * len(idx)
            seen += len(idx)
        val_pred = predict(net, seqs[val_idx],
                           lengths[val_idx] if lengths is not None else None)
        val_acc = float((val_pred == labels[val_idx]).mean())
        result.history.append(EpochStats(epoch, epoch_loss / seen, val_acc))
        result.epochs_run = epoch + 1
        if val_acc > result.best_val_accuracy or best_params is None:
            result.best_val_accuracy = val_acc
            result.best_epoch = epoch
            best_params = {k: v.copy() for k, v in net.params.items()}
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    for name, value in best_params.items():
        net.params[name][...] = value
    return result
