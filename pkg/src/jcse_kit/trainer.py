"""Two-stage contrastive training over encoder parameters.

Stage one runs on synthesized in-domain triplets whose positives are a second
dropout pass over the anchor; stage two runs on labeled NLI triplets with the
hard-negative weight switched on. The optimizer is plain mini-batch gradient
descent so every update is a pure function of (params, data, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .contrastive import BatchEmbeddings, TrainConfig, loss_weighted, loss_weighted_grad
from .corpus import SentencePair, Triplet
from .encoder import (
    DropoutSpec,
    EncoderParams,
    embed,
    embed_grad,
    params_checksum,
    tokenize,
)
from .errors import EmptyTriplets, NonFiniteLoss, ValidationError
from .util import derive_seed

_ROLES = ("anchor", "positive", "negative")


@dataclass(frozen=True)
class TrainReport:
    """What one training stage did: per-epoch mean loss and the final state hash."""

    epoch_losses: tuple
    batches_seen: int
    checksum: str

    def __post_init__(self):
        if any(not math.isfinite(x) for x in self.epoch_losses):
            raise ValidationError("epoch losses must be finite")

    def to_dict(self) -> dict:
        return {
            "epoch_losses": list(self.epoch_losses),
            "batches_seen": self.batches_seen,
            "checksum": self.checksum,
        }


def build_nli_triplets(nli_records) -> tuple[list[Triplet], int]:
    """Pair each premise's entailment hypotheses with its contradiction hypotheses.

    Emits the full cross product per premise; premises lacking an entailment
    or a contradiction are dropped and counted. Returns (triplets, dropped).
    """
    entailments: dict[str, list[str]] = {}
    contradictions: dict[str, list[str]] = {}
    order: list[str] = []
    for record in nli_records:
        if not isinstance(record, SentencePair) or record.label is None:
            raise ValidationError("NLI records must be labeled sentence pairs")
        if record.s1 not in entailments:
            entailments[record.s1] = []
            contradictions[record.s1] = []
            order.append(record.s1)
        if record.label == "entailment":
            entailments[record.s1].append(record.s2)
        elif record.label == "contradiction" and record.s2 != record.s1:
            contradictions[record.s1].append(record.s2)
    triplets: list[Triplet] = []
    dropped = 0
    for premise in order:
        if not entailments[premise] or not contradictions[premise]:
            dropped += 1
            continue
        for pos in entailments[premise]:
            for neg in contradictions[premise]:
                triplets.append(Triplet(anchor=premise, positive=pos, negative=neg))
    return triplets, dropped


def _dropout_for(cfg: TrainConfig, epoch: int, batch: int, row: int, role: str):
    if cfg.dropout_rate == 0.0:
        return None
    return DropoutSpec(
        rate=cfg.dropout_rate,
        seed=derive_seed(cfg.seed, "dropout", epoch, batch, row, role),
    )


def _train_batch(
    params: EncoderParams,
    batch: list[Triplet],
    cfg: TrainConfig,
    epoch: int,
    batch_index: int,
    token_cache: dict[str, list[str]],
) -> float:
    def toks(text: str) -> list[str]:
        if text not in token_cache:
            token_cache[text] = tokenize(params.vocab, text)
        return token_cache[text]

    rows = []
    for row, trip in enumerate(batch):
        texts = (trip.anchor, trip.positive if trip.positive is not None else trip.anchor, trip.negative)
        per_role = []
        for role, text in zip(_ROLES, texts):
            per_role.append((toks(text), _dropout_for(cfg, epoch, batch_index, row, role)))
        rows.append(per_role)

    mats = []
    for role_index in range(3):
        mats.append(
            np.stack([embed(params, tokens, spec) for tokens, spec in (r[role_index] for r in rows)])
        )
    batch_emb = BatchEmbeddings(anchors=mats[0], positives=mats[1], negatives=mats[2])
    loss = loss_weighted(batch_emb, cfg.tau, cfg.alpha)
    if not math.isfinite(loss):
        raise NonFiniteLoss(epoch, batch_index, loss)

    upstreams = loss_weighted_grad(batch_emb, cfg.tau, cfg.alpha)
    row_grads: dict[int, np.ndarray] = {}
    proj_grad = np.zeros_like(params.projection)
    bias_grad = np.zeros_like(params.bias)
    for row, per_role in enumerate(rows):
        for role_index, (tokens, spec) in enumerate(per_role):
            grads = embed_grad(params, tokens, spec, upstreams[role_index][row])
            for idx, g in grads.embedding_rows.items():
                if idx in row_grads:
                    row_grads[idx] += g
                else:
                    row_grads[idx] = g.copy()
            proj_grad += grads.projection
            bias_grad += grads.bias

    lr = cfg.learning_rate
    for idx, g in row_grads.items():
        params.embeddings[idx] -= lr * g
    params.projection -= lr * proj_grad
    params.bias -= lr * bias_grad
    return loss


def train_stage(
    params: EncoderParams, triplets: list[Triplet], cfg: TrainConfig
) -> tuple[EncoderParams, TrainReport]:
    """Run seeded mini-batch gradient descent; returns (new params, report).

    Each epoch shuffles the triplets with a seed derived from (cfg.seed,
    epoch), keeps the final partial batch, and reports the example-weighted
    mean loss measured before each update. The input params are not mutated.
    """
    if not triplets:
        raise EmptyTriplets("train_stage requires at least one triplet")
    params = params.copy()
    token_cache: dict[str, list[str]] = {}
    epoch_losses: list[float] = []
    batches_seen = 0
    n = len(triplets)
    for epoch in range(cfg.epochs):
        order = np.random.default_rng(derive_seed(cfg.seed, "shuffle", epoch)).permutation(n)
        batch_terms: list[tuple[float, int]] = []
        for batch_index, start in enumerate(range(0, n, cfg.batch_size)):
            batch = [triplets[i] for i in order[start : start + cfg.batch_size]]
            loss = _train_batch(params, batch, cfg, epoch, batch_index, token_cache)
            batch_terms.append((loss, len(batch)))
            batches_seen += 1
        epoch_losses.append(
            math.fsum(loss * size for loss, size in batch_terms) / n
        )
    report = TrainReport(
        epoch_losses=tuple(epoch_losses),
        batches_seen=batches_seen,
        checksum=params_checksum(params),
    )
    return params, report


def stage1_config(**overrides) -> TrainConfig:
    """Stage-one defaults: tau 0.05, hard-negative weight alpha 0."""
    return replace(TrainConfig(tau=0.05, alpha=0.0), **overrides)


def stage2_config(**overrides) -> TrainConfig:
    """Stage-two defaults: tau 0.05, hard-negative weight alpha 1."""
    return replace(TrainConfig(tau=0.05, alpha=1.0), **overrides)


def two_stage_train(
    params: EncoderParams,
    stage1_triplets: list[Triplet],
    stage2_triplets: list[Triplet],
    cfg1: TrainConfig | None = None,
    cfg2: TrainConfig | None = None,
) -> tuple[EncoderParams, TrainReport, TrainReport]:
    """Stage one on synthesized triplets, then stage two on NLI triplets."""
    cfg1 = stage1_config() if cfg1 is None else cfg1
    cfg2 = stage2_config() if cfg2 is None else cfg2
    mid, report1 = train_stage(params, stage1_triplets, cfg1)
    final, report2 = train_stage(mid, stage2_triplets, cfg2)
    return final, report1, report2
