"""Back-translation quality filtering and benchmark assembly.

A source sentence goes out through a translator, comes back through the
reverse direction, and is kept only when the round trip preserves enough
unigram overlap (BLEU1 above a threshold). Translator backends are pluggable
and sit behind an append-only on-disk cache so repeat runs never re-translate.
"""

from __future__ import annotations

import math
import os
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import load_sts_pairs
from .errors import ValidationError
from .util import dump_json, read_jsonl

CACHE_DIR_ENV = "JCSEKIT_CACHE_DIR"


@dataclass(frozen=True)
class TranslationRecord:
    """One sentence's round trip: source, forward translation, back-translation."""

    id: str
    src: str
    fwd: str
    back: str
    bleu1: float | None = None

    def __post_init__(self):
        if not self.src:
            raise ValidationError(f"record {self.id!r}: src must be non-empty")
        if self.bleu1 is not None and not (0.0 <= self.bleu1 <= 1.0):
            raise ValidationError(f"record {self.id!r}: bleu1 {self.bleu1} outside [0, 1]")


def bleu1(candidate: str, reference: str) -> float:
    """Brevity-penalized clipped unigram precision.

    Both sides are lowercased and split on whitespace. An empty candidate
    scores 0; a candidate longer than the reference takes no brevity penalty.
    """
    cand = candidate.lower().split()
    ref = reference.lower().split()
    if not cand:
        return 0.0
    cand_counts = Counter(cand)
    ref_counts = Counter(ref)
    clipped = sum(min(count, ref_counts[tok]) for tok, count in cand_counts.items())
    precision = clipped / len(cand)
    if len(cand) > len(ref):
        bp = 1.0
    else:
        bp = math.exp(1.0 - len(ref) / len(cand))
    return bp * precision


def score_and_filter(records, threshold: float = 0.0):
    """Score each record's back-translation against its source; keep the strict winners.

    Returns (kept, dropped, report): records with bleu1 filled in, partitioned
    by bleu1 > threshold, plus a report with before/after sizes and a ten-bin
    score histogram ([lo, hi, count] rows; the last bin includes 1.0).
    """
    scored = [replace(r, bleu1=bleu1(r.back, r.src)) for r in records]
    kept = [r for r in scored if r.bleu1 > threshold]
    dropped = [r for r in scored if r.bleu1 <= threshold]
    bins = []
    for i in range(10):
        lo = i / 10
        hi = (i + 1) / 10
        if i < 9:
            count = sum(1 for r in scored if lo <= r.bleu1 < hi)
        else:
            count = sum(1 for r in scored if lo <= r.bleu1 <= hi)
        bins.append([lo, hi, count])
    report = {"before": len(scored), "after": len(kept), "histogram": bins}
    return kept, dropped, report


def load_translation_records(path) -> list[TranslationRecord]:
    """Read JSONL records {"id", "src", "fwd", "back"} (optional "bleu1")."""
    records = []
    for lineno, rec in read_jsonl(path):
        missing = {"id", "src", "fwd", "back"} - rec.keys()
        if missing:
            raise ValidationError(f"line {lineno}: missing fields {sorted(missing)}")
        records.append(
            TranslationRecord(
                id=str(rec["id"]),
                src=rec["src"],
                fwd=rec["fwd"],
                back=rec["back"],
                bleu1=rec.get("bleu1"),
            )
        )
    return records


def save_translation_records(path, records) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            doc = {"id": r.id, "src": r.src, "fwd": r.fwd, "back": r.back}
            if r.bleu1 is not None:
                doc["bleu1"] = r.bleu1
            fh.write(dump_json(doc) + "\n")
            count += 1
    return count


def assemble_stats(dataset_files) -> dict:
    """Count pairs per file and in total; flag duplicated (s1, s2) pairs per file."""
    files = []
    total = 0
    for path in dataset_files:
        pairs = load_sts_pairs(path)
        seen = Counter((p.s1, p.s2) for p in pairs)
        duplicates = sum(count - 1 for count in seen.values() if count > 1)
        files.append({"path": str(path), "pairs": len(pairs), "duplicates": duplicates})
        total += len(pairs)
    return {"files": files, "total": total}


class TranslatorClient(ABC):
    """Translates batches of text in a named direction (e.g. "en-ja")."""

    @abstractmethod
    def translate(self, texts, direction: str) -> list[str]:
        """Return one translation per input text, in order."""


class FixtureBackend(TranslatorClient):
    """Table-driven translator for tests and offline runs."""

    def __init__(self, table: dict[tuple[str, str], str]):
        self.table = dict(table)
        self.calls = 0

    def translate(self, texts, direction: str) -> list[str]:
        self.calls += 1
        out = []
        for text in texts:
            key = (direction, text)
            if key not in self.table:
                raise ValidationError(f"fixture has no translation for {key!r}")
            out.append(self.table[key])
        return out


def default_cache_path() -> Path:
    """Cache file location; the JCSEKIT_CACHE_DIR variable overrides the directory."""
    override = os.environ.get(CACHE_DIR_ENV)
    base = Path(override) if override else Path.home() / ".cache" / "jcse-kit"
    return base / "translations.jsonl"


class CachedTranslator(TranslatorClient):
    """Wraps a backend with an append-only JSONL cache keyed by (direction, text).

    Cache hits never reach the backend, so a warm cache makes the pipeline a
    pure function of its inputs.
    """

    def __init__(self, backend: TranslatorClient, cache_path: str | Path | None = None):
        self.backend = backend
        self.cache_path = Path(cache_path) if cache_path is not None else default_cache_path()
        self._cache: dict[tuple[str, str], str] = {}
        if self.cache_path.exists():
            for _, rec in read_jsonl(self.cache_path):
                for key in ("direction", "text", "translation"):
                    if key not in rec:
                        raise ValidationError(f"cache entry missing {key!r}: {rec}")
                self._cache[(rec["direction"], rec["text"])] = rec["translation"]

    def translate(self, texts, direction: str) -> list[str]:
        texts = list(texts)
        misses = [t for t in texts if (direction, t) not in self._cache]
        # preserve first-seen order but translate each distinct miss once
        distinct = list(dict.fromkeys(misses))
        if distinct:
            translated = self.backend.translate(distinct, direction)
            if len(translated) != len(distinct):
                raise ValidationError(
                    f"backend returned {len(translated)} translations for {len(distinct)} texts"
                )
            self.cache_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.cache_path, "a", encoding="utf-8") as fh:
                for text, translation in zip(distinct, translated):
                    self._cache[(direction, text)] = translation
                    fh.write(
                        dump_json(
                            {"direction": direction, "text": text, "translation": translation}
                        )
                        + "\n"
                    )
        return [self._cache[(direction, t)] for t in texts]


def back_translate(
    client: TranslatorClient,
    items,
    fwd_direction: str = "en-ja",
    back_direction: str = "ja-en",
) -> list[TranslationRecord]:
    """Round-trip (id, text) items through the translator; bleu1 left unscored."""
    items = list(items)
    srcs = [text for _, text in items]
    fwds = client.translate(srcs, fwd_direction)
    backs = client.translate(fwds, back_direction)
    return [
        TranslationRecord(id=item_id, src=src, fwd=fwd, back=back)
        for (item_id, src), fwd, back in zip(items, fwds, backs)
    ]
