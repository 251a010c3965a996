"""Contradiction synthesis via noun-chunk masking, plus denoising-span export.

A sentence's noun chunks are swapped for sentinel tokens and refilled by a
pluggable generator; refills that reproduce the original sentence are rejected
so every output can serve as a hard negative. The same sentinel machinery
exports span-corruption (input, target) pairs for finetuning an external
fill-in-the-blank generator.
"""

from __future__ import annotations

import json
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import TaggedSentence, Triplet
from .errors import ExhaustedRedraws, MissingFill, NoChunks, ValidationError
from .util import derive_seed, dump_json

MAX_SENTINELS = 100
SENTINELS = [f"<extra_id_{i}>" for i in range(MAX_SENTINELS)]

_MAX_REDRAWS = 50


@dataclass(frozen=True)
class MaskedTemplate:
    """A sentence with noun chunks replaced by integer sentinel ids.

    ``pieces`` holds literal text (str) and sentinel ids (int) in sentence
    order; ``sentinel_map`` remembers each chunk's original surface.
    ``origin_id`` carries the source sentence id so file-backed generators can
    look up externally produced fills.
    """

    pieces: tuple
    sentinel_map: dict[int, str] = field(default_factory=dict)
    origin_id: str = ""

    def __post_init__(self):
        seen = []
        for piece in self.pieces:
            if isinstance(piece, int):
                seen.append(piece)
            elif isinstance(piece, str):
                if not piece:
                    raise ValidationError("literal pieces must be non-empty")
            else:
                raise ValidationError(f"piece must be text or a sentinel id, got {piece!r}")
        if seen != list(range(len(seen))):
            raise ValidationError(f"sentinel ids must be 0..K-1 in order, got {seen}")
        if len(seen) > MAX_SENTINELS:
            raise ValidationError(f"at most {MAX_SENTINELS} sentinels per template, got {len(seen)}")
        if sorted(self.sentinel_map) != seen:
            raise ValidationError("sentinel_map keys must match the sentinel ids in pieces")

    @property
    def sentinel_ids(self) -> list[int]:
        return [p for p in self.pieces if isinstance(p, int)]


class GeneratorInterface(ABC):
    """Produces replacement text for every sentinel of a template."""

    @abstractmethod
    def fill(self, template: MaskedTemplate, seed: int) -> dict[int, str]:
        """Return a replacement surface for each sentinel id of ``template``."""


class LexiconGenerator(GeneratorInterface):
    """Samples replacement chunks from an in-domain lexicon, frequency-weighted.

    One sentinel per call (chosen by the seeded rng) is sampled with the
    original surface excluded, so a draw normally changes the sentence; the
    other slots may re-draw their original text.
    """

    def __init__(self, lexicon: Counter, seed: int = 0):
        if not lexicon:
            raise ValidationError("lexicon must be non-empty")
        for surface, count in lexicon.items():
            if not surface:
                raise ValidationError("lexicon surfaces must be non-empty")
            if count < 1:
                raise ValidationError(f"lexicon count for {surface!r} must be >= 1")
        self.lexicon = Counter(lexicon)
        self.seed = seed
        self._surfaces = list(self.lexicon)
        self._weights = np.array([self.lexicon[s] for s in self._surfaces], dtype=np.float64)

    def _draw(self, rng: np.random.Generator, exclude: str | None) -> str:
        if exclude is None:
            pool, weights = self._surfaces, self._weights
        else:
            keep = [i for i, s in enumerate(self._surfaces) if s != exclude]
            if not keep:
                # Nothing but the original to offer; the caller's rejection
                # loop turns this into ExhaustedRedraws.
                keep = list(range(len(self._surfaces)))
            pool = [self._surfaces[i] for i in keep]
            weights = self._weights[keep]
        probs = weights / weights.sum()
        return pool[int(rng.choice(len(pool), p=probs))]

    def fill(self, template: MaskedTemplate, seed: int) -> dict[int, str]:
        ids = template.sentinel_ids
        rng = np.random.default_rng(derive_seed(self.seed, seed))
        changed = ids[int(rng.integers(len(ids)))]
        fills = {}
        for k in ids:
            exclude = template.sentinel_map[k] if k == changed else None
            fills[k] = self._draw(rng, exclude)
        return fills


class FileGenerator(GeneratorInterface):
    """Replays externally generated fills keyed by source sentence id.

    The mapping gives each sentence a flat list of fill surfaces; every call
    consumes the next K entries (K = sentinel count) and wraps around, so a
    file holding k·K entries drives k distinct candidates.
    """

    def __init__(self, fills_by_origin: dict[str, list[str]]):
        for origin, fills in fills_by_origin.items():
            if not isinstance(fills, list) or not all(isinstance(f, str) for f in fills):
                raise ValidationError(f"fills for {origin!r} must be a list of strings")
            if not fills:
                raise ValidationError(f"fills for {origin!r} must be non-empty")
        self._fills = {origin: list(fills) for origin, fills in fills_by_origin.items()}
        self._cursor: dict[str, int] = {}

    @classmethod
    def from_file(cls, path) -> "FileGenerator":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValidationError("fills file must hold a JSON object")
        return cls(data)

    def fill(self, template: MaskedTemplate, seed: int) -> dict[int, str]:
        if template.origin_id not in self._fills:
            raise ValidationError(f"no fills recorded for sentence {template.origin_id!r}")
        pool = self._fills[template.origin_id]
        ids = template.sentinel_ids
        cursor = self._cursor.get(template.origin_id, 0)
        fills = {}
        for k in ids:
            fills[k] = pool[cursor % len(pool)]
            cursor += 1
        self._cursor[template.origin_id] = cursor
        return fills


def mask_noun_chunks(s: TaggedSentence) -> MaskedTemplate:
    """Replace each noun chunk of ``s`` with the next sentinel id, left to right."""
    if not s.noun_chunks:
        raise NoChunks(f"sentence {s.id!r} has no noun chunks")
    pieces: list = []
    sentinel_map: dict[int, str] = {}
    literal: list[str] = []
    spans = {start: (start, end) for start, end in s.noun_chunks}
    i = 0
    while i < len(s.tokens):
        if i in spans:
            start, end = spans[i]
            if literal:
                pieces.append("".join(literal))
                literal = []
            k = len(sentinel_map)
            sentinel_map[k] = "".join(t.surface for t in s.tokens[start:end])
            pieces.append(k)
            i = end
        else:
            literal.append(s.tokens[i].surface)
            i += 1
    if literal:
        pieces.append("".join(literal))
    return MaskedTemplate(pieces=tuple(pieces), sentinel_map=sentinel_map, origin_id=s.id)


def fill_template(t: MaskedTemplate, fills) -> str:
    """Concatenate the template with each sentinel replaced by its fill."""
    parts = []
    for piece in t.pieces:
        if isinstance(piece, int):
            if piece not in fills:
                raise MissingFill(piece)
            parts.append(fills[piece])
        else:
            parts.append(piece)
    return "".join(parts)


def build_lexicon(corpus, seed: int = 0) -> LexiconGenerator:
    """Collect every noun-chunk surface in the corpus into a LexiconGenerator."""
    counts: Counter = Counter()
    for s in corpus:
        for i in range(len(s.noun_chunks)):
            counts[s.chunk_surface(i)] += 1
    if not counts:
        raise NoChunks("corpus contains no noun chunks")
    return LexiconGenerator(counts, seed=seed)


def synthesize_contradictions(
    s: TaggedSentence, g: GeneratorInterface, k: int, seed: int
) -> list[str]:
    """Produce k distinct refilled sentences, none equal to the original."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    template = mask_noun_chunks(s)
    original = fill_template(template, template.sentinel_map)
    accepted: list[str] = []
    for slot in range(k):
        for attempt in range(_MAX_REDRAWS + 1):
            fills = g.fill(template, derive_seed(seed, slot, attempt))
            candidate = fill_template(template, fills)
            if candidate != original and candidate not in accepted:
                accepted.append(candidate)
                break
        else:
            raise ExhaustedRedraws(
                f"no differing fill for sentence {s.id!r} after {_MAX_REDRAWS} redraws"
            )
    return accepted


def build_stage1_triplets(corpus, g: GeneratorInterface, k: int, seed: int):
    """Synthesize k negatives per eligible sentence; returns (triplets, skipped).

    Sentences without noun chunks are skipped and counted. Positives are left
    null: the trainer realizes them as a second dropout pass over the anchor.
    """
    triplets: list[Triplet] = []
    skipped = 0
    for s in corpus:
        if not s.noun_chunks:
            skipped += 1
            continue
        for negative in synthesize_contradictions(s, g, k, derive_seed(seed, s.id)):
            triplets.append(Triplet(anchor=s.text, positive=None, negative=negative))
    return triplets, skipped


@dataclass(frozen=True)
class DenoisingExample:
    input: str
    target: str


def _pick_spans(rng: np.random.Generator, n_tokens: int, budget: int, mean_span: int) -> np.ndarray:
    """Mark ``budget`` token positions via geometric-length non-overlapping spans."""
    masked = np.zeros(n_tokens, dtype=bool)
    remaining = budget
    while remaining > 0:
        length = min(int(rng.geometric(1.0 / mean_span)), remaining)
        while length >= 1:
            starts = [
                i for i in range(n_tokens - length + 1) if not masked[i : i + length].any()
            ]
            if starts:
                break
            length -= 1
        start = starts[int(rng.integers(len(starts)))]
        masked[start : start + length] = True
        remaining -= length
    return masked


def make_denoising_examples(corpus, mask_rate: float = 0.15, mean_span: int = 3, seed: int = 0):
    """Span-corrupt each sentence; returns (examples, unmasked_count).

    Each sentence gets round(mask_rate * tokens) positions masked in spans
    whose lengths are geometric with the given mean. Maximal masked runs
    become one sentinel apiece; the target lists the removed runs behind the
    same sentinels. Sentences whose budget rounds to zero pass through
    unmasked (empty target) and are counted.
    """
    if not corpus:
        raise ValidationError("corpus must be non-empty")
    if not (0.0 <= mask_rate <= 1.0):
        raise ValidationError(f"mask_rate {mask_rate} outside [0, 1]")
    if mean_span < 1:
        raise ValidationError(f"mean_span must be >= 1, got {mean_span}")
    examples: list[DenoisingExample] = []
    unmasked = 0
    for s in corpus:
        surfaces = [t.surface for t in s.tokens]
        budget = round(mask_rate * len(surfaces))
        if budget == 0:
            examples.append(DenoisingExample(input="".join(surfaces), target=""))
            unmasked += 1
            continue
        rng = np.random.default_rng(derive_seed(seed, s.id))
        masked = _pick_spans(rng, len(surfaces), budget, mean_span)
        input_parts: list[str] = []
        target_parts: list[str] = []
        sid = 0
        i = 0
        while i < len(surfaces):
            if masked[i]:
                j = i
                while j < len(surfaces) and masked[j]:
                    j += 1
                if sid >= MAX_SENTINELS:
                    raise ValidationError(f"sentence {s.id!r} needs more than {MAX_SENTINELS} sentinels")
                input_parts.append(SENTINELS[sid])
                target_parts.append(SENTINELS[sid])
                target_parts.append("".join(surfaces[i:j]))
                sid += 1
                i = j
            else:
                input_parts.append(surfaces[i])
                i += 1
        examples.append(DenoisingExample(input="".join(input_parts), target="".join(target_parts)))
    return examples, unmasked


def save_denoising_examples(path, examples) -> int:
    """Write examples as JSONL ({"input", "target"} per line); returns the count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(dump_json({"input": ex.input, "target": ex.target}) + "\n")
            count += 1
    return count
