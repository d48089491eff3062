"""Central-difference verification of the analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .train import softmax_cross_entropy


@dataclass(frozen=True)
class GradCheckResult:
    max_rel_error: float
    worst_param: str
    n_checked: int
    per_param: dict


def _loss(net, inputs, labels) -> float:
    logits = net.forward(*inputs)
    loss, _ = softmax_cross_entropy(logits, labels)
    return loss


def gradient_check(net, inputs: tuple, labels: np.ndarray,
                   n_samples: int = 200, h: float = 1e-5,
                   seed: int = 0) -> GradCheckResult:
    """Compare analytic gradients against central differences.

    Samples at least `n_samples` scalar parameters across every tensor
    (each tensor contributes at least one), perturbs each by +-h, and
    reports the relative error |ga - gn| / max(1e-4, |ga| + |gn|).  The
    denominator floor sits two orders above the central-difference noise
    (machine eps * |loss| / 2h), so near-zero gradients are compared
    absolutely instead of against roundoff.
    """
    labels = np.asarray(labels, dtype=np.int64)
    logits = net.forward(*inputs)
    _, dlogits = softmax_cross_entropy(logits, labels)
    analytic = net.backward(dlogits)

    rng = np.random.default_rng(seed)
    names = sorted(net.params)
    sizes = np.array([net.params[name].size for name in names])
    total = int(sizes.sum())
    draws = max(n_samples, len(names))
    chosen = rng.choice(total, size=min(draws, total), replace=False)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    picks = {name: [] for name in names}
    for flat in chosen:
        tensor = int(np.searchsorted(offsets, flat, side="right") - 1)
        picks[names[tensor]].append(int(flat - offsets[tensor]))
    for tensor, name in enumerate(names):  # every tensor gets coverage
        if not picks[name]:
            picks[name].append(int(rng.integers(sizes[tensor])))

    per_param = {}
    worst = ("", 0.0)
    n_checked = 0
    for name in names:
        flat_view = net.params[name].ravel()
        grad_view = analytic[name].ravel()
        worst_here = 0.0
        for idx in picks[name]:
            original = flat_view[idx]
            flat_view[idx] = original + h
            loss_plus = _loss(net, inputs, labels)
            flat_view[idx] = original - h
            loss_minus = _loss(net, inputs, labels)
            flat_view[idx] = original
            numeric = (loss_plus - loss_minus) / (2.0 * h)
            ga = grad_view[idx]
            rel = abs(ga - numeric) / max(1e-4, abs(ga) + abs(numeric))
            worst_here = max(worst_here, rel)
            n_checked += 1
        per_param[name] = worst_here
        if worst_here >= worst[1]:
            worst = (name, worst_here)
    return GradCheckResult(max_rel_error=worst[1], worst_param=worst[0],
                           n_checked=n_checked, per_param=per_param)
