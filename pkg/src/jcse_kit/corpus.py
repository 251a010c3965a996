"""Domain types, interchange file formats, and corpus normalization.

The tagged-corpus interchange format is one JSON object per line::

    {"id": str, "text": str,
     "tokens": [{"surface": str, "pos": str}, ...],
     "noun_chunks": [[start, end], ...]}      # half-open token-index spans

Pair, triplet, and retrieval files are likewise JSON lines; see the loaders
below for the exact field sets.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError, ValidationError
from .util import read_jsonl, write_jsonl

UPOS_TAGS = frozenset(
    "NOUN PROPN VERB ADJ ADV PRON NUM AUX ADP PART PUNCT SYM DET CCONJ SCONJ INTJ X".split()
)

# Tags allowed to head a noun chunk (chunks are head-final; interior tokens
# may be modifiers of any tag).
NOMINAL_TAGS = frozenset({"NOUN", "PROPN", "NUM", "PRON"})

NLI_LABELS = ("entailment", "neutral", "contradiction")

_MARKUP_RE = re.compile(r"<[^>]*>")
_WS_RE = re.compile(r" +")


@dataclass(frozen=True)
class TaggedToken:
    surface: str
    pos: str

    def __post_init__(self):
        if not self.surface:
            raise ValidationError("token surface must be non-empty")
        if self.pos not in UPOS_TAGS:
            raise ValidationError(f"unknown POS tag {self.pos!r}")


@dataclass(frozen=True)
class TaggedSentence:
    """A tokenized sentence with POS tags and noun-chunk spans.

    ``noun_chunks`` holds half-open ``[start, end)`` token-index spans,
    sorted by start and pairwise non-overlapping. The stored ``text`` is not
    required to equal the concatenated token surfaces (analyzers may
    normalize); use :meth:`surface` for the token-level string.
    """

    id: str
    text: str
    tokens: tuple[TaggedToken, ...]
    noun_chunks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(
            self, "noun_chunks", tuple((int(a), int(b)) for a, b in self.noun_chunks)
        )
        n = len(self.tokens)
        prev_end = 0
        for start, end in self.noun_chunks:
            if not (0 <= start < end <= n):
                raise ValidationError(
                    f"chunk span [{start}, {end}) out of bounds for {n} tokens"
                )
            if start < prev_end:
                raise ValidationError(
                    f"chunk span [{start}, {end}) overlaps or is out of order"
                )
            if self.tokens[end - 1].pos not in NOMINAL_TAGS:
                raise ValidationError(
                    f"chunk span [{start}, {end}) does not end on a nominal token"
                )
            prev_end = end

    def surface(self) -> str:
        """Concatenated token surfaces (no separators)."""
        return "".join(t.surface for t in self.tokens)

    def chunk_surface(self, index: int) -> str:
        start, end = self.noun_chunks[index]
        return "".join(t.surface for t in self.tokens[start:end])


@dataclass(frozen=True)
class SentencePair:
    """A sentence pair carrying either a gold similarity score or an NLI label."""

    s1: str
    s2: str
    score: float | None = None
    label: str | None = None

    def __post_init__(self):
        if self.score is not None and self.label is not None:
            raise ValidationError("a pair may carry a score or a label, not both")
        if self.score is not None and not (0.0 <= self.score <= 5.0):
            raise ValidationError(f"score {self.score} outside [0, 5]")
        if self.label is not None and self.label not in NLI_LABELS:
            raise ValidationError(f"unknown label {self.label!r}")


@dataclass(frozen=True)
class Triplet:
    """(anchor, optional positive, negative) training example.

    ``positive is None`` means the positive is constructed by re-encoding the
    anchor under a different dropout mask.
    """

    anchor: str
    positive: str | None
    negative: str

    def __post_init__(self):
        if not self.anchor:
            raise ValidationError("anchor must be non-empty")
        if not self.negative:
            raise ValidationError("negative must be non-empty")
        if self.negative == self.anchor:
            raise ValidationError("negative must differ from anchor")


def normalize_text(raw: str) -> str:
    """Normalize raw text: NFKC, strip markup and control characters, collapse whitespace.

    Markup removal is defined as deleting substrings matching ``<...>`` (from
    a ``<`` to the next ``>``). A final NFKC pass keeps the function
    idempotent when a removal joins a combining sequence.
    """
    text = unicodedata.normalize("NFKC", raw)
    text = _MARKUP_RE.sub("", text)
    chars = []
    for ch in text:
        # the ASCII whitespace controls separate words; other Cc/Cf are noise
        if ch in "\t\n\r\v\f" or (ch.isspace() and unicodedata.category(ch) not in ("Cc", "Cf")):
            chars.append(" ")
        elif unicodedata.category(ch) not in ("Cc", "Cf"):
            chars.append(ch)
    text = _WS_RE.sub(" ", "".join(chars)).strip()
    return unicodedata.normalize("NFKC", text)


def filter_short(
    corpus: Sequence[TaggedSentence], min_tokens: int = 5
) -> list[TaggedSentence]:
    """Keep exactly the sentences with at least ``min_tokens`` tokens, in order."""
    return [s for s in corpus if len(s.tokens) >= min_tokens]


# ---------------------------------------------------------------------------
# Tagged-corpus interchange
# ---------------------------------------------------------------------------


def _sentence_from_record(rec: dict, lineno: int) -> TaggedSentence:
    try:
        tokens = tuple(
            TaggedToken(surface=t["surface"], pos=t["pos"]) for t in rec["tokens"]
        )
        return TaggedSentence(
            id=rec["id"],
            text=rec["text"],
            tokens=tokens,
            noun_chunks=tuple((s, e) for s, e in rec["noun_chunks"]),
        )
    except ValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed tagged-corpus record: {exc}", line=lineno) from exc


def load_tagged_corpus(path: str | Path) -> list[TaggedSentence]:
    sentences = []
    for lineno, rec in read_jsonl(path):
        try:
            sentences.append(_sentence_from_record(rec, lineno))
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
    return sentences


def sentence_to_record(s: TaggedSentence) -> dict:
    return {
        "id": s.id,
        "text": s.text,
        "tokens": [{"surface": t.surface, "pos": t.pos} for t in s.tokens],
        "noun_chunks": [[a, b] for a, b in s.noun_chunks],
    }


def save_tagged_corpus(path: str | Path, corpus: Iterable[TaggedSentence]) -> int:
    return write_jsonl(path, (sentence_to_record(s) for s in corpus))


# ---------------------------------------------------------------------------
# Pair files (STS and NLI)
# ---------------------------------------------------------------------------


def load_sts_pairs(path: str | Path) -> list[SentencePair]:
    """Load ``{"s1", "s2", "score"?}`` records."""
    pairs = []
    for lineno, rec in read_jsonl(path):
        try:
            pair = SentencePair(
                s1=rec["s1"], s2=rec["s2"], score=rec.get("score")
            )
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed pair record: {exc}", line=lineno) from exc
        pairs.append(pair)
    return pairs


def load_nli_pairs(path: str | Path) -> list[SentencePair]:
    """Load ``{"premise", "hypothesis", "label"}`` records."""
    pairs = []
    for lineno, rec in read_jsonl(path):
        try:
            pair = SentencePair(
                s1=rec["premise"], s2=rec["hypothesis"], label=rec["label"]
            )
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed NLI record: {exc}", line=lineno) from exc
        pairs.append(pair)
    return pairs


def save_sts_pairs(path: str | Path, pairs: Iterable[SentencePair]) -> int:
    def record(p: SentencePair) -> dict:
        rec = {"s1": p.s1, "s2": p.s2}
        if p.score is not None:
            rec["score"] = p.score
        return rec

    return write_jsonl(path, (record(p) for p in pairs))


# ---------------------------------------------------------------------------
# Triplet files
# ---------------------------------------------------------------------------


def load_triplets(path: str | Path) -> list[Triplet]:
    """Load ``{"anchor", "positive": str|null, "negative"}`` records."""
    triplets = []
    for lineno, rec in read_jsonl(path):
        try:
            triplet = Triplet(
                anchor=rec["anchor"],
                positive=rec.get("positive"),
                negative=rec["negative"],
            )
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed triplet record: {exc}", line=lineno) from exc
        triplets.append(triplet)
    return triplets


def save_triplets(path: str | Path, triplets: Iterable[Triplet]) -> int:
    return write_jsonl(
        path,
        (
            {"anchor": t.anchor, "positive": t.positive, "negative": t.negative}
            for t in triplets
        ),
    )


# ---------------------------------------------------------------------------
# Retrieval files: queries, documents, qrels
# ---------------------------------------------------------------------------


def _load_id_text(path: str | Path, id_key: str) -> list[tuple[str, str]]:
    items = []
    seen = set()
    for lineno, rec in read_jsonl(path):
        try:
            ident, text = rec[id_key], rec["text"]
        except KeyError as exc:
            raise ParseError(f"missing field {exc}", line=lineno) from exc
        if ident in seen:
            raise ValidationError(f"line {lineno}: duplicate {id_key} {ident!r}")
        seen.add(ident)
        items.append((ident, text))
    return items


def load_queries(path: str | Path) -> list[tuple[str, str]]:
    return _load_id_text(path, "qid")


def load_documents(path: str | Path) -> list[tuple[str, str]]:
    return _load_id_text(path, "did")


def load_qrels(path: str | Path) -> dict[tuple[str, str], int]:
    qrels = {}
    for lineno, rec in read_jsonl(path):
        try:
            qid, did, rel = rec["qid"], rec["did"], rec["rel"]
        except KeyError as exc:
            raise ParseError(f"missing field {exc}", line=lineno) from exc
        if rel not in (0, 1):
            raise ValidationError(f"line {lineno}: rel must be 0 or 1, got {rel!r}")
        qrels[(qid, did)] = rel
    return qrels


# ---------------------------------------------------------------------------
# Tagged pairs (input of the relevant-word analysis)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaggedPair:
    """A scored sentence pair with token-level annotation on both sides."""

    id: str
    a: TaggedSentence
    b: TaggedSentence
    score: float | None = None


def load_tagged_pairs(path: str | Path) -> list[TaggedPair]:
    """Load ``{"id", "score"?, "a": {...}, "b": {...}}`` records.

    The ``a``/``b`` objects follow the tagged-corpus record schema; their
    ``id`` fields default to ``<pair id>-a`` / ``<pair id>-b``.
    """
    pairs = []
    for lineno, rec in read_jsonl(path):
        try:
            pair_id = rec["id"]
            sides = []
            for name in ("a", "b"):
                side = dict(rec[name])
                side.setdefault("id", f"{pair_id}-{name}")
                sides.append(_sentence_from_record(side, lineno))
            pairs.append(
                TaggedPair(id=pair_id, a=sides[0], b=sides[1], score=rec.get("score"))
            )
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from exc
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed tagged pair: {exc}", line=lineno) from exc
    return pairs


def save_tagged_pairs(path: str | Path, pairs: Iterable[TaggedPair]) -> int:
    def record(p: TaggedPair) -> dict:
        rec = {"id": p.id}
        if p.score is not None:
            rec["score"] = p.score
        rec["a"] = sentence_to_record(p.a)
        rec["b"] = sentence_to_record(p.b)
        return rec

    return write_jsonl(path, (record(p) for p in pairs))
