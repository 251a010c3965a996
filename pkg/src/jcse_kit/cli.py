"""Command-line entry point.

Every subcommand reads and writes the file formats defined by the library
modules and prints a JSON report to stdout. Reports carry a timestamp unless
--no-timestamp is given; with identical inputs, flags, and --seed, all file
outputs (and timestamp-suppressed reports) are byte-identical across runs.

The global --seed fans out to per-pipeline seeds through a stable hash of
(seed, subcommand role), so one knob reproduces an entire pipeline.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import benchmark, corpus, datagen, metrics, relevance, trainer
from .contrastive import TrainConfig
from .encoder import (
    build_vocab,
    embed,
    encode_text,
    init_params,
    load_checkpoint,
    save_checkpoint,
)
from .errors import JcseKitError, ValidationError
from .util import derive_seed

_PROG = "jcse-kit"


def _base_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="global random seed (default 42)")
    common.add_argument(
        "--no-timestamp", action="store_true", help="omit the timestamp field from reports"
    )
    common.add_argument(
        "--table", action="store_true", help="also print flat reports as an aligned table"
    )
    common.add_argument(
        "--threads", type=int, default=1, help="parallelism bound; never changes results"
    )
    common.add_argument("--report", metavar="FILE", help="also write the JSON report to FILE")
    return common


def _build_parser() -> argparse.ArgumentParser:
    common = _base_parser()
    parser = argparse.ArgumentParser(
        prog=_PROG,
        description="Contrastive sentence-embedding workbench: synthesize, train, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "normalize",
        parents=[common],
        help="normalize raw text lines, or length-filter a tagged corpus",
    )
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument(
        "--tagged",
        action="store_true",
        help="treat input as a tagged corpus and drop short sentences",
    )
    p.add_argument(
        "--min-tokens", type=int, default=5, help="minimum token count kept with --tagged"
    )

    p = sub.add_parser(
        "synthesize", parents=[common], help="mask noun chunks and synthesize negative triplets"
    )
    p.add_argument("--in", dest="input", required=True, help="tagged corpus (JSONL)")
    p.add_argument("--out", dest="output", required=True, help="triplets file (JSONL)")
    p.add_argument("--k", type=int, default=4, help="negatives per sentence (default 4)")
    p.add_argument("--generator", choices=["lexicon", "file"], default="lexicon")
    p.add_argument("--fills", help="JSON fills file (required with --generator file)")

    p = sub.add_parser(
        "export-denoising", parents=[common], help="export span-corruption (input, target) pairs"
    )
    p.add_argument("--in", dest="input", required=True, help="tagged corpus (JSONL)")
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--mask-rate", type=float, default=0.15)
    p.add_argument("--mean-span", type=int, default=3)

    for name, two_stage in (("train", False), ("train-two-stage", True)):
        p = sub.add_parser(
            name,
            parents=[common],
            help="run two-stage contrastive training" if two_stage else "run one training stage",
        )
        p.add_argument("--corpus", help="tagged corpus for vocabulary + fresh init")
        p.add_argument("--checkpoint-in", help="continue from an existing checkpoint")
        p.add_argument("--out", dest="output", required=True, help="checkpoint file to write")
        p.add_argument("--dim", type=int, default=16)
        p.add_argument("--tau", type=float, default=0.05)
        p.add_argument("--batch-size", type=int, default=64)
        p.add_argument("--learning-rate", type=float, default=0.05)
        p.add_argument("--epochs", type=int, default=5)
        p.add_argument("--dropout-rate", type=float, default=0.1)
        if two_stage:
            p.add_argument("--stage1", required=True, help="synthesized triplets (JSONL)")
            p.add_argument("--nli", required=True, help="labeled NLI pairs (JSONL)")
            p.add_argument("--alpha-stage1", type=float, default=0.0)
            p.add_argument("--alpha-stage2", type=float, default=1.0)
        else:
            p.add_argument("--triplets", required=True, help="triplets file (JSONL)")
            p.add_argument("--alpha", type=float, default=1.0)

    p = sub.add_parser("eval-sts", parents=[common], help="Spearman correlation against gold scores")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--pairs", required=True, nargs="+", help="scored pair files (JSONL)")
    p.add_argument("--setting", choices=["all", "per-subset"], default="all")

    p = sub.add_parser("eval-retrieval", parents=[common], help="MRR / MAP / P@N retrieval metrics")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--docs", required=True)
    p.add_argument("--qrels", required=True)
    p.add_argument("--cutoffs", default="1,5", help="comma-separated P@N cutoffs (default 1,5)")

    p = sub.add_parser(
        "analyze-relevance",
        parents=[common],
        help="find each pair's most similarity-relevant word and its POS distribution",
    )
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--pairs", required=True, help="tagged pair file (JSONL)")
    p.add_argument("--min-score", type=float, default=4.0)
    p.add_argument("--out-results", help="write per-pair results (JSONL)")
    p.add_argument("--out-csv", help="write the POS histogram as CSV")

    p = sub.add_parser(
        "bleu-filter", parents=[common], help="score back-translations and drop low-BLEU1 records"
    )
    p.add_argument("--in", dest="input", required=True, help="translation records (JSONL)")
    p.add_argument("--out", dest="output", required=True, help="kept records (JSONL)")
    p.add_argument("--dropped-out", help="also write dropped records (JSONL)")
    p.add_argument("--threshold", type=float, default=0.0)

    p = sub.add_parser("stats", parents=[common], help="count pairs and duplicates per dataset file")
    p.add_argument("files", nargs="*", help="scored pair files (JSONL)")

    return parser


def _emit(report: dict, args) -> None:
    if not args.no_timestamp:
        report = {"timestamp": datetime.now(timezone.utc).isoformat(), **report}
    text = json.dumps(report, ensure_ascii=False, indent=2)
    print(text)
    if args.table:
        flat = {k: v for k, v in report.items() if isinstance(v, (int, float, str))}
        if flat:
            print(metrics.format_table(flat))
    if args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")


def _cmd_normalize(args) -> dict:
    if args.tagged:
        sentences = corpus.load_tagged_corpus(args.input)
        kept = corpus.filter_short(sentences, min_tokens=args.min_tokens)
        corpus.save_tagged_corpus(args.output, kept)
        return {"sentences_in": len(sentences), "sentences_out": len(kept)}
    lines_in = 0
    kept_lines = []
    with open(args.input, encoding="utf-8") as fh:
        for line in fh:
            lines_in += 1
            cleaned = corpus.normalize_text(line)
            if cleaned:
                kept_lines.append(cleaned)
    with open(args.output, "w", encoding="utf-8") as fh:
        for line in kept_lines:
            fh.write(line + "\n")
    return {"lines_in": lines_in, "lines_out": len(kept_lines)}


def _cmd_synthesize(args) -> dict:
    sentences = corpus.load_tagged_corpus(args.input)
    if args.generator == "file":
        if not args.fills:
            raise ValidationError("--generator file requires --fills")
        generator = datagen.FileGenerator.from_file(args.fills)
    else:
        generator = datagen.build_lexicon(sentences, seed=derive_seed(args.seed, "lexicon"))
    triplets, skipped = datagen.build_stage1_triplets(
        sentences, generator, args.k, derive_seed(args.seed, "synthesize")
    )
    corpus.save_triplets(args.output, triplets)
    return {"k": args.k, "triplets": len(triplets), "skipped": skipped}


def _cmd_export_denoising(args) -> dict:
    sentences = corpus.load_tagged_corpus(args.input)
    examples, unmasked = datagen.make_denoising_examples(
        sentences,
        mask_rate=args.mask_rate,
        mean_span=args.mean_span,
        seed=derive_seed(args.seed, "denoising"),
    )
    datagen.save_denoising_examples(args.output, examples)
    return {"examples": len(examples), "unmasked": unmasked}


def _initial_params(args):
    if (args.corpus is None) == (args.checkpoint_in is None):
        raise ValidationError("provide exactly one of --corpus or --checkpoint-in")
    if args.checkpoint_in:
        return load_checkpoint(args.checkpoint_in)
    sentences = corpus.load_tagged_corpus(args.corpus)
    vocab = build_vocab(sentences)
    return init_params(vocab, args.dim, derive_seed(args.seed, "init"))


def _cfg_dict(cfg: TrainConfig) -> dict:
    return {
        "tau": cfg.tau,
        "alpha": cfg.alpha,
        "batch_size": cfg.batch_size,
        "learning_rate": cfg.learning_rate,
        "epochs": cfg.epochs,
        "dropout_rate": cfg.dropout_rate,
    }


def _cmd_train(args) -> dict:
    params = _initial_params(args)
    triplets = corpus.load_triplets(args.triplets)
    cfg = TrainConfig(
        tau=args.tau,
        alpha=args.alpha,
        batch_size=args.batch_size,
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        dropout_rate=args.dropout_rate,
        seed=derive_seed(args.seed, "train"),
    )
    params, report = trainer.train_stage(params, triplets, cfg)
    save_checkpoint(args.output, params)
    return {"config": _cfg_dict(cfg), "triplets": len(triplets), "report": report.to_dict()}


def _cmd_train_two_stage(args) -> dict:
    params = _initial_params(args)
    stage1 = corpus.load_triplets(args.stage1)
    nli_pairs = corpus.load_nli_pairs(args.nli)
    stage2, dropped = trainer.build_nli_triplets(nli_pairs)
    shared = {
        "tau": args.tau,
        "batch_size": args.batch_size,
        "learning_rate": args.learning_rate,
        "epochs": args.epochs,
        "dropout_rate": args.dropout_rate,
    }
    cfg1 = TrainConfig(alpha=args.alpha_stage1, seed=derive_seed(args.seed, "stage1"), **shared)
    cfg2 = TrainConfig(alpha=args.alpha_stage2, seed=derive_seed(args.seed, "stage2"), **shared)
    params, report1, report2 = trainer.two_stage_train(params, stage1, stage2, cfg1, cfg2)
    save_checkpoint(args.output, params)
    return {
        "stage1": {"config": _cfg_dict(cfg1), "triplets": len(stage1), "report": report1.to_dict()},
        "stage2": {
            "config": _cfg_dict(cfg2),
            "triplets": len(stage2),
            "dropped_premises": dropped,
            "report": report2.to_dict(),
        },
    }


def _encoder_fn(checkpoint_path):
    params = load_checkpoint(checkpoint_path)
    return params, (lambda text: encode_text(params, text))


def _cmd_eval_sts(args) -> dict:
    _, encode = _encoder_fn(args.checkpoint)
    subsets = {Path(f).stem: corpus.load_sts_pairs(f) for f in args.pairs}
    return metrics.evaluate_sts(encode, subsets, setting=args.setting)


def _cmd_eval_retrieval(args) -> dict:
    _, encode = _encoder_fn(args.checkpoint)
    queries = corpus.load_queries(args.queries)
    docs = corpus.load_documents(args.docs)
    qrels = corpus.load_qrels(args.qrels)
    try:
        cutoffs = [int(c) for c in args.cutoffs.split(",") if c.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad --cutoffs value {args.cutoffs!r}") from exc
    return metrics.run_two_tower_eval(encode, encode, queries, docs, qrels, cutoffs)


def _cmd_analyze_relevance(args) -> dict:
    params, _ = _encoder_fn(args.checkpoint)
    pairs = corpus.load_tagged_pairs(args.pairs)

    results, skipped = relevance.analyze_pairs(
        pairs, lambda tokens: embed(params, tokens), min_score=args.min_score
    )
    report: dict = {"pairs": len(pairs), "analyzed": len(results), "skipped": dict(skipped)}
    if results:
        histogram = relevance.pos_histogram(results)
        report["pos_histogram"] = histogram
        if args.out_csv:
            relevance.save_histogram_csv(args.out_csv, histogram)
    if args.out_results:
        relevance.save_results_jsonl(args.out_results, results)
    return report


def _cmd_bleu_filter(args) -> dict:
    records = benchmark.load_translation_records(args.input)
    kept, dropped, report = benchmark.score_and_filter(records, threshold=args.threshold)
    benchmark.save_translation_records(args.output, kept)
    if args.dropped_out:
        benchmark.save_translation_records(args.dropped_out, dropped)
    return {"threshold": args.threshold, **report}


def _cmd_stats(args) -> dict:
    return benchmark.assemble_stats(args.files)


_HANDLERS = {
    "normalize": _cmd_normalize,
    "synthesize": _cmd_synthesize,
    "export-denoising": _cmd_export_denoising,
    "train": _cmd_train,
    "train-two-stage": _cmd_train_two_stage,
    "eval-sts": _cmd_eval_sts,
    "eval-retrieval": _cmd_eval_retrieval,
    "analyze-relevance": _cmd_analyze_relevance,
    "bleu-filter": _cmd_bleu_filter,
    "stats": _cmd_stats,
}


def run(argv) -> int:
    """Parse argv and execute; returns 0 (ok), 1 (validation), or 2 (usage)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed < 0:
        print(f"{_PROG}: error: --seed must be >= 0", file=sys.stderr)
        return 1
    if args.threads < 1:
        print(f"{_PROG}: error: --threads must be >= 1", file=sys.stderr)
        return 1
    try:
        report = _HANDLERS[args.command](args)
    except (JcseKitError, OSError) as exc:
        print(f"{_PROG}: error: {exc}", file=sys.stderr)
        return 1
    _emit(report, args)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
