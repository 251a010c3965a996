"""Relevant-content-word analysis: which word drives a pair's similarity.

For a sentence pair (a, b), a word's relevance is how much the cosine
similarity drops when every occurrence of that word is removed from one side.
The word with the largest drop is the pair's relevant word; aggregating its
POS tag over many pairs shows which word classes carry the similarity signal.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass

from .contrastive import cosine_sim
from .corpus import TaggedPair, TaggedSentence
from .errors import EmptyInput, NoCandidate, ValidationError, ZeroVector
from .util import dump_json


@dataclass(frozen=True)
class RelevanceResult:
    """The word whose removal maximally reduces a pair's cosine similarity."""

    pair_id: str
    word: str
    pos: str
    drop: float


def _first_occurrence_tag(sentence: TaggedSentence, word: str) -> str | None:
    for token in sentence.tokens:
        if token.surface == word:
            return token.pos
    return None


def relevant_word(pair: TaggedPair, embed_fn) -> RelevanceResult:
    """Find the candidate word with the largest similarity drop for this pair.

    Candidates are the union of both sentences' token surfaces, in order of
    first occurrence (sentence a first). Removing a word deletes all its
    occurrences from one side at a time; removals that would empty a sentence
    are skipped. Ties on the drop keep the earliest candidate; the reported
    POS tag comes from the side whose removal achieved the lower similarity
    (sentence a on a tie between sides).
    """
    a, b = pair.a, pair.b
    if len(a.tokens) < 2 or len(b.tokens) < 2:
        raise ValidationError(f"pair {pair.id!r}: both sentences need >= 2 tokens")

    a_surfaces = [t.surface for t in a.tokens]
    b_surfaces = [t.surface for t in b.tokens]
    candidates: list[str] = []
    seen = set()
    for surface in a_surfaces + b_surfaces:
        if surface not in seen:
            seen.add(surface)
            candidates.append(surface)

    vec_a = embed_fn(a_surfaces)
    vec_b = embed_fn(b_surfaces)
    base = cosine_sim(vec_a, vec_b)

    best: tuple[float, str, str] | None = None  # (drop, word, pos)
    for word in candidates:
        a_rest = [s for s in a_surfaces if s != word]
        b_rest = [s for s in b_surfaces if s != word]
        sides: list[tuple[float, TaggedSentence]] = []
        if a_rest:
            sides.append((cosine_sim(embed_fn(a_rest), vec_b), a))
        if b_rest:
            sides.append((cosine_sim(vec_a, embed_fn(b_rest)), b))
        if not sides:
            continue
        min_sim, min_side = min(sides, key=lambda pair_: pair_[0])
        pos = _first_occurrence_tag(min_side, word)
        if pos is None:
            # The minimizing side never contained the word (its removal was a
            # no-op there); tag the occurrence that does exist.
            pos = _first_occurrence_tag(a, word) or _first_occurrence_tag(b, word)
        drop = base - min_sim
        if best is None or drop > best[0]:
            best = (drop, word, pos)
    if best is None:
        raise NoCandidate(f"pair {pair.id!r}: every removal would empty a sentence")
    drop, word, pos = best
    return RelevanceResult(pair_id=pair.id, word=word, pos=pos, drop=drop)


def pos_histogram(results) -> dict[str, float]:
    """Fraction of results per POS tag; fractions sum to 1."""
    results = list(results)
    if not results:
        raise EmptyInput("pos_histogram needs at least one result")
    counts = Counter(r.pos for r in results)
    total = len(results)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return {pos: count / total for pos, count in ordered}


def analyze_pairs(pairs, embed_fn, min_score: float = 4.0):
    """Run relevant_word over pairs whose gold score clears min_score.

    Pairs that are unscored, below the threshold, too short, degenerate under
    cosine, or without any removable candidate are skipped; the returned
    counter says why. Returns (results, skip_counts).
    """
    results: list[RelevanceResult] = []
    skipped = Counter()
    for pair in pairs:
        if pair.score is None:
            skipped["unscored"] += 1
            continue
        if pair.score < min_score:
            skipped["below_min_score"] += 1
            continue
        if len(pair.a.tokens) < 2 or len(pair.b.tokens) < 2:
            skipped["too_short"] += 1
            continue
        try:
            results.append(relevant_word(pair, embed_fn))
        except ZeroVector:
            skipped["zero_vector"] += 1
        except NoCandidate:
            skipped["no_candidate"] += 1
    return results, skipped


def save_results_jsonl(path, results) -> int:
    """One JSON object per result: {"pair_id", "word", "pos", "drop"}."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(
                dump_json({"pair_id": r.pair_id, "word": r.word, "pos": r.pos, "drop": r.drop})
                + "\n"
            )
            count += 1
    return count


def save_histogram_csv(path, histogram: dict[str, float]) -> None:
    """Write `pos,fraction` rows for external plotting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pos", "fraction"])
        for pos, fraction in histogram.items():
            writer.writerow([pos, fraction])
