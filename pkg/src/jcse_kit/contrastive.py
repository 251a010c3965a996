"""Contrastive objectives over batch embeddings, with analytic gradients.

Losses are computed in log space (logsumexp) because the temperature sits
near 0.05 and raw exponentials of similarity/temperature overflow float64.
The batch reduction is the arithmetic mean of per-example losses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, ZeroVector


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of the weighted hard-negative objective and its optimizer."""

    tau: float = 0.05
    alpha: float = 1.0
    batch_size: int = 64
    learning_rate: float = 0.05
    epochs: int = 5
    seed: int = 0
    dropout_rate: float = 0.1

    def __post_init__(self):
        if self.tau <= 0:
            raise ValidationError(f"tau must be positive, got {self.tau}")
        if self.alpha < 0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate < 0:
            # rate 0 is legal: it turns a stage into a pure loss evaluation
            raise ValidationError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ValidationError(f"dropout_rate {self.dropout_rate} outside [0, 1)")


def _as_rows(name: str, arr) -> np.ndarray:
    rows = np.asarray(arr, dtype=np.float64)
    if rows.ndim != 2:
        raise ValidationError(f"{name} must be a 2-d matrix, got shape {rows.shape}")
    if not np.all(np.isfinite(rows)):
        raise ValidationError(f"{name} contains non-finite entries")
    if np.any(np.linalg.norm(rows, axis=1) == 0.0):
        raise ZeroVector(f"{name} contains a zero row")
    return rows


@dataclass
class BatchEmbeddings:
    """Row-aligned anchor/positive (and optional negative) embedding matrices."""

    anchors: np.ndarray
    positives: np.ndarray
    negatives: np.ndarray | None = None

    def __post_init__(self):
        self.anchors = _as_rows("anchors", self.anchors)
        self.positives = _as_rows("positives", self.positives)
        if self.positives.shape != self.anchors.shape:
            raise ValidationError("anchors and positives must have the same shape")
        if self.negatives is not None:
            self.negatives = _as_rows("negatives", self.negatives)
            if self.negatives.shape != self.anchors.shape:
                raise ValidationError("negatives must match the anchor shape")

    @property
    def size(self) -> int:
        return self.anchors.shape[0]


def cosine_sim(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity undefined for a zero vector")
    return float(u @ v / (nu * nv))


def _unit_rows(rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(rows, axis=1)
    return rows / norms[:, None], norms


def _weighted_logsumexp(logits: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Row-wise log(sum_j w_j * exp(l_j)) with exact exclusion of zero weights."""
    masked = np.where(weights > 0.0, logits, -np.inf)
    m = masked.max(axis=1, keepdims=True)
    return m[:, 0] + np.log(np.sum(weights * np.exp(masked - m), axis=1))


def loss_inbatch(batch: BatchEmbeddings, tau: float) -> float:
    """Mean in-batch contrastive loss: other positives in the batch are the negatives."""
    if batch.negatives is not None:
        raise ValidationError("in-batch loss takes a batch without negatives")
    if tau <= 0:
        raise ValidationError(f"tau must be positive, got {tau}")
    a_hat, _ = _unit_rows(batch.anchors)
    p_hat, _ = _unit_rows(batch.positives)
    logits = (a_hat @ p_hat.T) / tau
    lse = _weighted_logsumexp(logits, np.ones_like(logits))
    per_example = lse - np.diagonal(logits)
    return float(per_example.mean())


def _negative_weights(n: int, alpha: float) -> np.ndarray:
    # alpha^1 on the example's own hard negative, alpha^0 = 1 on the others
    # (also when alpha = 0).
    w = np.ones((n, n))
    np.fill_diagonal(w, alpha)
    return w


def loss_weighted(batch: BatchEmbeddings, tau: float, alpha: float) -> float:
    """Mean hard-negative contrastive loss with weight alpha on own negatives."""
    if batch.negatives is None:
        raise ValidationError("weighted loss requires negatives")
    if tau <= 0:
        raise ValidationError(f"tau must be positive, got {tau}")
    if alpha < 0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    a_hat, _ = _unit_rows(batch.anchors)
    p_hat, _ = _unit_rows(batch.positives)
    g_hat, _ = _unit_rows(batch.negatives)
    n = batch.size
    pos_logits = (a_hat @ p_hat.T) / tau
    neg_logits = (a_hat @ g_hat.T) / tau
    logits = np.concatenate([pos_logits, neg_logits], axis=1)
    weights = np.concatenate([np.ones((n, n)), _negative_weights(n, alpha)], axis=1)
    lse = _weighted_logsumexp(logits, weights)
    per_example = lse - np.diagonal(pos_logits)
    return float(per_example.mean())


def loss_weighted_grad(
    batch: BatchEmbeddings, tau: float, alpha: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of the mean weighted loss w.r.t. each embedding row.

    Returns (d_anchors, d_positives, d_negatives), each shaped like the
    corresponding input matrix.
    """
    if batch.negatives is None:
        raise ValidationError("weighted loss requires negatives")
    if tau <= 0:
        raise ValidationError(f"tau must be positive, got {tau}")
    if alpha < 0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")

    a_hat, a_norm = _unit_rows(batch.anchors)
    p_hat, p_norm = _unit_rows(batch.positives)
    g_hat, g_norm = _unit_rows(batch.negatives)
    n = batch.size

    sim_pos = a_hat @ p_hat.T
    sim_neg = a_hat @ g_hat.T
    w_neg = _negative_weights(n, alpha)

    logits = np.concatenate([sim_pos, sim_neg], axis=1) / tau
    weights = np.concatenate([np.ones((n, n)), w_neg], axis=1)
    lse = _weighted_logsumexp(logits, weights)
    probs = weights * np.exp(np.where(weights > 0.0, logits, -np.inf) - lse[:, None])
    p_pos = probs[:, :n]
    p_neg = probs[:, n:]

    # d(per-example loss)/d(sim) scaled by the 1/N batch reduction.
    c_pos = (p_pos - np.eye(n)) / (tau * n)
    c_neg = p_neg / (tau * n)

    d_anchors = (
        c_pos @ p_hat
        + c_neg @ g_hat
        - (np.sum(c_pos * sim_pos, axis=1) + np.sum(c_neg * sim_neg, axis=1))[:, None]
        * a_hat
    ) / a_norm[:, None]
    d_positives = (
        c_pos.T @ a_hat - np.sum(c_pos * sim_pos, axis=0)[:, None] * p_hat
    ) / p_norm[:, None]
    d_negatives = (
        c_neg.T @ a_hat - np.sum(c_neg * sim_neg, axis=0)[:, None] * g_hat
    ) / g_norm[:, None]
    return d_anchors, d_positives, d_negatives
