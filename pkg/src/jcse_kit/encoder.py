"""Desk-scale trainable sentence encoder with seeded dropout.

The encoder is deliberately small: mean-pooled token embeddings through one
affine map and a tanh. It supplies the embedding function used by training,
evaluation, and analysis, and its gradients are simple enough to verify
against finite differences.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import EmptyCorpus, EmptyInput, ValidationError
from .corpus import TaggedSentence

UNK_TOKEN = "<unk>"
UNK_INDEX = 0
CHECKPOINT_FORMAT = "jcse-kit/1"
DEFAULT_DROPOUT_RATE = 0.1


@dataclass(frozen=True)
class DropoutSpec:
    """Inverted dropout: keep with probability 1-rate, scale kept entries by 1/(1-rate).

    The Bernoulli draw for (token position, coordinate) is a deterministic
    function of the seed, so a forward pass can be reproduced exactly.
    """

    rate: float
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.rate < 1.0):
            raise ValidationError(f"dropout rate {self.rate} outside [0, 1)")


@dataclass
class EncoderParams:
    """Trainable state: embedding table plus one affine projection."""

    vocab: dict[str, int]
    embeddings: np.ndarray  # (|vocab|, d)
    projection: np.ndarray  # (d, d)
    bias: np.ndarray  # (d,)

    def __post_init__(self):
        self.embeddings = np.asarray(self.embeddings, dtype=np.float64)
        self.projection = np.asarray(self.projection, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        d = self.dim
        if d < 2:
            raise ValidationError(f"embedding dim {d} < 2")
        if self.embeddings.shape != (len(self.vocab), d):
            raise ValidationError(
                f"embedding table {self.embeddings.shape} does not match "
                f"vocab size {len(self.vocab)} and dim {d}"
            )
        if self.projection.shape != (d, d) or self.bias.shape != (d,):
            raise ValidationError("projection/bias shapes inconsistent with dim")
        for arr in (self.embeddings, self.projection, self.bias):
            if not np.all(np.isfinite(arr)):
                raise ValidationError("parameters must be finite")
        if self.vocab.get(UNK_TOKEN) != UNK_INDEX:
            raise ValidationError(f"vocab must map {UNK_TOKEN!r} to index {UNK_INDEX}")
        if sorted(self.vocab.values()) != list(range(len(self.vocab))):
            raise ValidationError("vocab indices must be 0..|vocab|-1 without gaps")

    @property
    def dim(self) -> int:
        return int(self.bias.shape[0])

    def copy(self) -> "EncoderParams":
        return EncoderParams(
            vocab=dict(self.vocab),
            embeddings=self.embeddings.copy(),
            projection=self.projection.copy(),
            bias=self.bias.copy(),
        )


@dataclass
class ParamGrads:
    """Gradient record for the parameter groups touched by one backward pass."""

    embedding_rows: dict[int, np.ndarray]
    projection: np.ndarray
    bias: np.ndarray


def build_vocab(corpus: Sequence[TaggedSentence], min_freq: int = 1) -> dict[str, int]:
    """Map token surfaces to indices: UNK at 0, then by descending frequency.

    Ties are broken by lexicographic surface order, so the mapping is
    deterministic for a fixed corpus.
    """
    if not corpus:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    counts = Counter(t.surface for s in corpus for t in s.tokens)
    kept = sorted(
        (surf for surf, c in counts.items() if c >= min_freq and surf != UNK_TOKEN),
        key=lambda surf: (-counts[surf], surf),
    )
    vocab = {UNK_TOKEN: UNK_INDEX}
    for i, surf in enumerate(kept, start=1):
        vocab[surf] = i
    return vocab


def init_params(vocab: Mapping[str, int], d: int, seed: int) -> EncoderParams:
    """Seeded init: embeddings uniform in [-0.1, 0.1], identity projection, zero bias."""
    if d < 2:
        raise ValidationError(f"embedding dim {d} < 2")
    rng = np.random.default_rng(seed)
    return EncoderParams(
        vocab=dict(vocab),
        embeddings=rng.uniform(-0.1, 0.1, size=(len(vocab), d)),
        projection=np.eye(d),
        bias=np.zeros(d),
    )


def _dropout_scale(dropout: DropoutSpec | None, n_tokens: int, d: int) -> np.ndarray | None:
    """Per-(position, coordinate) inverted-dropout scale factors, or None.

    Entry (t, c) is draw number t*d + c of the seeded generator, so it
    depends only on (seed, position, coordinate).
    """
    if dropout is None or dropout.rate == 0.0:
        return None
    rng = np.random.default_rng(dropout.seed)
    keep = rng.random((n_tokens, d)) >= dropout.rate
    return keep / (1.0 - dropout.rate)


def _token_rows(params: EncoderParams, tokens: Sequence[str]) -> list[int]:
    if len(tokens) == 0:
        raise EmptyInput("cannot embed an empty token list")
    vocab = params.vocab
    return [vocab.get(tok, UNK_INDEX) for tok in tokens]


def embed(
    params: EncoderParams,
    tokens: Sequence[str],
    dropout: DropoutSpec | None = None,
) -> np.ndarray:
    """v = tanh(W s + b) with s the mean of (optionally dropped-out) token embeddings.

    Out-of-vocabulary tokens map to the UNK row. Without dropout the output
    is invariant to token order (mean pooling).
    """
    rows = _token_rows(params, tokens)
    table = params.embeddings[rows]  # (T, d)
    scale = _dropout_scale(dropout, len(rows), params.dim)
    if scale is not None:
        table = table * scale
    s = table.mean(axis=0)
    return np.tanh(params.projection @ s + params.bias)


def embed_grad(
    params: EncoderParams,
    tokens: Sequence[str],
    dropout: DropoutSpec | None,
    upstream: np.ndarray,
) -> ParamGrads:
    """Gradient of (upstream . embed(params, tokens, dropout)) w.r.t. the parameters.

    Applies the same dropout mask as the matching forward call. Repeated
    tokens (and OOV tokens sharing the UNK row) accumulate into one row
    gradient.
    """
    rows = _token_rows(params, tokens)
    upstream = np.asarray(upstream, dtype=np.float64)
    d = params.dim
    table = params.embeddings[rows]
    scale = _dropout_scale(dropout, len(rows), d)
    if scale is not None:
        table = table * scale
    s = table.mean(axis=0)
    v = np.tanh(params.projection @ s + params.bias)

    dz = upstream * (1.0 - v * v)  # d(upstream.v)/dz for z = Ws + b
    d_bias = dz
    d_projection = np.outer(dz, s)
    ds = params.projection.T @ dz

    n = len(rows)
    per_token = ds / n  # gradient w.r.t. each (scaled) table row
    embedding_rows: dict[int, np.ndarray] = {}
    for t, row in enumerate(rows):
        contrib = per_token if scale is None else per_token * scale[t]
        if row in embedding_rows:
            embedding_rows[row] = embedding_rows[row] + contrib
        else:
            embedding_rows[row] = contrib.copy()
    return ParamGrads(embedding_rows=embedding_rows, projection=d_projection, bias=d_bias)


def tokenize(vocab: Mapping[str, int], text: str) -> list[str]:
    """Greedy longest-match segmentation of text against vocabulary surfaces.

    Whitespace separates segments but never becomes a token. Where no
    vocabulary surface matches, a single character is consumed (it maps to
    UNK at embedding time unless present in the vocabulary).
    """
    max_len = max((len(s) for s in vocab), default=1)
    tokens: list[str] = []
    for segment in text.split():
        i = 0
        while i < len(segment):
            for ln in range(min(max_len, len(segment) - i), 0, -1):
                cand = segment[i : i + ln]
                if cand in vocab:
                    tokens.append(cand)
                    i += ln
                    break
            else:
                tokens.append(segment[i])
                i += 1
    return tokens


def encode_text(
    params: EncoderParams, text: str, dropout: DropoutSpec | None = None
) -> np.ndarray:
    """Embed raw text via greedy vocabulary tokenization."""
    return embed(params, tokenize(params.vocab, text), dropout)


def params_checksum(params: EncoderParams) -> str:
    """Stable content hash of all parameters (used in training reports)."""
    h = hashlib.sha256()
    vocab_items = sorted(params.vocab.items(), key=lambda kv: kv[1])
    h.update(json.dumps(vocab_items, ensure_ascii=False).encode("utf-8"))
    for arr in (params.embeddings, params.projection, params.bias):
        h.update(np.ascontiguousarray(arr, dtype=np.float64).tobytes())
    return h.hexdigest()


def save_checkpoint(path: str | Path, params: EncoderParams) -> None:
    """Write a versioned JSON checkpoint (format ``jcse-kit/1``)."""
    doc = {
        "format": CHECKPOINT_FORMAT,
        "dim": params.dim,
        "vocab": dict(sorted(params.vocab.items(), key=lambda kv: kv[1])),
        "embeddings": params.embeddings.tolist(),
        "projection": params.projection.tolist(),
        "bias": params.bias.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)
        fh.write("\n")


def load_checkpoint(path: str | Path) -> EncoderParams:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ValidationError(
            f"unsupported checkpoint format {doc.get('format')!r}; "
            f"expected {CHECKPOINT_FORMAT!r}"
        )
    return EncoderParams(
        vocab={k: int(v) for k, v in doc["vocab"].items()},
        embeddings=np.asarray(doc["embeddings"], dtype=np.float64),
        projection=np.asarray(doc["projection"], dtype=np.float64),
        bias=np.asarray(doc["bias"], dtype=np.float64),
    )
