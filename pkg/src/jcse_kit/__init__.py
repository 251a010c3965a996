"""Desk-scale workbench for contrastive Japanese sentence embeddings.

Pipeline pieces: corpus normalization and interchange formats, a small
trainable encoder, noun-chunk contradiction synthesis, two-stage contrastive
training, STS/retrieval evaluation, relevant-word analysis, and
back-translation filtering. The CLI (`jcse-kit`) wires them together.
"""

from .contrastive import (
    BatchEmbeddings,
    TrainConfig,
    cosine_sim,
    loss_inbatch,
    loss_weighted,
    loss_weighted_grad,
)
from .corpus import (
    SentencePair,
    TaggedPair,
    TaggedSentence,
    TaggedToken,
    Triplet,
    filter_short,
    load_nli_pairs,
    load_sts_pairs,
    load_tagged_corpus,
    load_tagged_pairs,
    load_triplets,
    normalize_text,
    save_tagged_corpus,
    save_triplets,
)
from .datagen import (
    FileGenerator,
    GeneratorInterface,
    LexiconGenerator,
    MaskedTemplate,
    build_lexicon,
    build_stage1_triplets,
    fill_template,
    make_denoising_examples,
    mask_noun_chunks,
    synthesize_contradictions,
)
from .encoder import (
    DropoutSpec,
    EncoderParams,
    build_vocab,
    embed,
    encode_text,
    init_params,
    load_checkpoint,
    save_checkpoint,
    tokenize,
)
from .errors import JcseKitError
from .estimator import ContrastiveSentenceEncoder
from .metrics import (
    RetrievalRun,
    evaluate_sts,
    retrieval_metrics,
    run_two_tower_eval,
    spearman,
)
from .benchmark import (
    CachedTranslator,
    FixtureBackend,
    TranslationRecord,
    TranslatorClient,
    assemble_stats,
    back_translate,
    bleu1,
    score_and_filter,
)
from .relevance import RelevanceResult, analyze_pairs, pos_histogram, relevant_word
from .trainer import TrainReport, build_nli_triplets, train_stage, two_stage_train

__version__ = "0.1.0"

__all__ = [
    "BatchEmbeddings",
    "CachedTranslator",
    "ContrastiveSentenceEncoder",
    "DropoutSpec",
    "EncoderParams",
    "FileGenerator",
    "FixtureBackend",
    "GeneratorInterface",
    "JcseKitError",
    "LexiconGenerator",
    "MaskedTemplate",
    "RelevanceResult",
    "RetrievalRun",
    "SentencePair",
    "TaggedPair",
    "TaggedSentence",
    "TaggedToken",
    "TrainConfig",
    "TrainReport",
    "TranslationRecord",
    "TranslatorClient",
    "Triplet",
    "analyze_pairs",
    "assemble_stats",
    "back_translate",
    "bleu1",
    "build_lexicon",
    "build_nli_triplets",
    "build_stage1_triplets",
    "build_vocab",
    "cosine_sim",
    "embed",
    "encode_text",
    "evaluate_sts",
    "fill_template",
    "filter_short",
    "init_params",
    "load_checkpoint",
    "load_nli_pairs",
    "load_sts_pairs",
    "load_tagged_corpus",
    "load_tagged_pairs",
    "load_triplets",
    "loss_inbatch",
    "loss_weighted",
    "loss_weighted_grad",
    "make_denoising_examples",
    "mask_noun_chunks",
    "normalize_text",
    "pos_histogram",
    "relevant_word",
    "retrieval_metrics",
    "run_two_tower_eval",
    "save_checkpoint",
    "save_tagged_corpus",
    "save_triplets",
    "score_and_filter",
    "spearman",
    "synthesize_contradictions",
    "tokenize",
    "train_stage",
    "two_stage_train",
    "__version__",
]
