"""Scikit-learn style wrapper around the full synthesis-and-training pipeline.

Fitting takes a tagged corpus, synthesizes hard negatives from its own noun
chunks, and runs the two-stage contrastive recipe (stage two only when NLI
pairs are supplied). Transforming maps raw texts to embedding rows.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .datagen import build_lexicon, build_stage1_triplets
from .encoder import build_vocab, encode_text, init_params
from .errors import EmptyCorpus, ValidationError
from .trainer import build_nli_triplets, stage1_config, stage2_config, train_stage
from .util import derive_seed


def check_texts(texts) -> list[str]:
    """Validate an iterable of non-empty strings and return it as a list."""
    texts = list(texts)
    if not texts:
        raise ValidationError("expected at least one text")
    for i, t in enumerate(texts):
        if not isinstance(t, str) or not t:
            raise ValidationError(f"texts[{i}] must be a non-empty string, got {t!r}")
    return texts


class ContrastiveSentenceEncoder(BaseEstimator, TransformerMixin):
    """Trainable sentence encoder: fit on a tagged corpus, transform texts to vectors.

    Parameters mirror the pipeline defaults: ``k`` synthesized negatives per
    sentence in stage one (dropout positives, alpha=0), then NLI triplets in
    stage two (alpha=1) when ``fit`` receives ``nli_pairs``.
    """

    def __init__(
        self,
        dim: int = 16,
        k: int = 4,
        tau: float = 0.05,
        alpha_stage1: float = 0.0,
        alpha_stage2: float = 1.0,
        batch_size: int = 64,
        learning_rate: float = 0.05,
        epochs: int = 5,
        dropout_rate: float = 0.1,
        min_freq: int = 1,
        seed: int = 42,
    ):
        self.dim = dim
        self.k = k
        self.tau = tau
        self.alpha_stage1 = alpha_stage1
        self.alpha_stage2 = alpha_stage2
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.dropout_rate = dropout_rate
        self.min_freq = min_freq
        self.seed = seed

    def _common_cfg(self) -> dict:
        return {
            "tau": self.tau,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "dropout_rate": self.dropout_rate,
        }

    def fit(self, X, y=None, nli_pairs=None):
        """Fit on a list of TaggedSentence; optionally continue on NLI pairs."""
        corpus = list(X)
        if not corpus:
            raise EmptyCorpus("fit requires a non-empty tagged corpus")
        vocab = build_vocab(corpus, min_freq=self.min_freq)
        params = init_params(vocab, self.dim, derive_seed(self.seed, "init"))
        generator = build_lexicon(corpus, seed=derive_seed(self.seed, "lexicon"))
        triplets, self.stage1_skipped_ = build_stage1_triplets(
            corpus, generator, self.k, derive_seed(self.seed, "synthesize")
        )
        cfg1 = stage1_config(
            alpha=self.alpha_stage1, seed=derive_seed(self.seed, "stage1"), **self._common_cfg()
        )
        params, report1 = train_stage(params, triplets, cfg1)
        self.reports_ = [report1]
        if nli_pairs is not None:
            nli_triplets, self.nli_dropped_ = build_nli_triplets(nli_pairs)
            cfg2 = stage2_config(
                alpha=self.alpha_stage2, seed=derive_seed(self.seed, "stage2"), **self._common_cfg()
            )
            params, report2 = train_stage(params, nli_triplets, cfg2)
            self.reports_.append(report2)
        self.params_ = params
        return self

    def transform(self, X) -> np.ndarray:
        """Embed texts (no dropout); rows align with the input order.

        Accepts raw strings or tagged sentences, so fit_transform on the
        fitting corpus works directly.
        """
        if not hasattr(self, "params_"):
            raise NotFittedError("this encoder must be fitted before calling transform")
        texts = check_texts(item.text if hasattr(item, "text") else item for item in X)
        return np.stack([encode_text(self.params_, t) for t in texts])
