"""Anomaly scoring for rules.

A multinomial logistic model is fit from rule feature vectors to rule
labels; a rule's anomaly score is one minus the model's probability of
the rule's own label, so rules whose conditions predict "the wrong way"
relative to the bulk of the rule set score high.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LogisticConfig:
    l2: float = 1e-4
    max_iters: int = 500
    tol: float = 1e-6


@dataclass
class LogisticModel:
    weights: np.ndarray  # (C, D)
    bias: np.ndarray  # (C,)
    config: LogisticConfig
    degenerate_class: int | None = None  # set when all training labels agree

    @property
    def n_classes(self) -> int:
        return len(self.bias)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if self.degenerate_class is not None:
            probs = np.zeros((len(X), self.n_classes))
            probs[:, self.degenerate_class] = 1.0
            return probs
        return softmax(X @ self.weights.T + self.bias)


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_gradient(weights: np.ndarray, bias: np.ndarray, X: np.ndarray,
                      labels: np.ndarray, l2: float) -> tuple[float, np.ndarray, np.ndarray]:
    """L2-regularized mean cross-entropy and its gradients.

    The penalty applies to the weight matrix only, not the bias.
    """
    m = len(X)
    probs = softmax(X @ weights.T + bias)
    picked = probs[np.arange(m), labels]
    loss = -np.mean(np.log(np.maximum(picked, 1e-300))) + 0.5 * l2 * np.sum(weights * weights)
    delta = probs
    delta[np.arange(m), labels] -= 1.0
    grad_w = delta.T @ X / m + l2 * weights
    grad_b = delta.sum(axis=0) / m
    return float(loss), grad_w, grad_b


def fit_logistic(X: np.ndarray, labels: np.ndarray, n_classes: int,
                 config: LogisticConfig = LogisticConfig()) -> LogisticModel:
    """Fit by full-batch gradient descent with backtracking line search.

    Parameters start at zero (so a zero-iteration fit is the uniform
    model) and descent stops once the gradient norm drops below
    ``config.tol`` or ``config.max_iters`` steps have run.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(X) == 0:
        raise ValueError("cannot fit on zero rules")
    distinct = np.unique(labels)
    if len(distinct) == 1:
        warnings.warn("all rule labels identical; anomaly model is degenerate")
        return LogisticModel(weights=np.zeros((n_classes, X.shape[1])),
                             bias=np.zeros(n_classes), config=config,
                             degenerate_class=int(distinct[0]))

    W = np.zeros((n_classes, X.shape[1]))
    b = np.zeros(n_classes)
    loss, grad_w, grad_b = loss_and_gradient(W, b, X, labels, config.l2)
    step = 1.0
    for _ in range(config.max_iters):
        grad_norm2 = float(np.sum(grad_w * grad_w) + np.sum(grad_b * grad_b))
        if np.sqrt(grad_norm2) <= config.tol:
            break
        # Armijo backtracking, reusing the last accepted step as the start
        step = min(step * 2.0, 1e4)
        while True:
            W_new = W - step * grad_w
            b_new = b - step * grad_b
            new_loss, new_gw, new_gb = loss_and_gradient(W_new, b_new, X, labels, config.l2)
            if new_loss <= loss - 1e-4 * step * grad_norm2 or step < 1e-12:
                break
            step *= 0.5
        W, b, loss, grad_w, grad_b = W_new, b_new, new_loss, new_gw, new_gb
    return LogisticModel(weights=W, bias=b, config=config)


def anomaly_scores(model: LogisticModel, X: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Per-rule score 1 - P(rule's own label | rule's features), in [0, 1]."""
    probs = model.predict_proba(np.asarray(X, dtype=np.float64))
    scores = 1.0 - probs[np.arange(len(X)), np.asarray(labels, dtype=np.int64)]
    return np.clip(scores, 0.0, 1.0)
