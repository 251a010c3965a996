"""Evaluation metrics: rank correlation for STS, MAP / MRR / P@N for retrieval.

All aggregation uses math.fsum, whose result does not depend on summand
order, so independently coded references can match these values exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .contrastive import cosine_sim
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    LengthMismatch,
    NoRelevant,
    ValidationError,
)


def _average_ranks(values) -> list[float]:
    """1-based ranks; tied values share the mean of their rank positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _pearson(x, y) -> float:
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    cov = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = math.fsum((a - mx) ** 2 for a in x)
    vy = math.fsum((b - my) ** 2 for b in y)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateInput("correlation undefined for a constant list")
    return cov / math.sqrt(vx * vy)


def spearman(x, y) -> float:
    """Pearson correlation of average ranks, in [-1, 1]."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(x) != len(y):
        raise LengthMismatch(f"length {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise DegenerateInput(f"need at least 2 points, got {len(x)}")
    return _pearson(_average_ranks(x), _average_ranks(y))


def evaluate_sts(encode_fn, subsets, setting: str = "all") -> dict:
    """Correlate encoder cosine similarities against gold scores.

    ``subsets`` maps subset name to its scored pairs (a bare list counts as
    one subset named "all"). The "all" setting pools every pair into one
    correlation; "per-subset" reports each subset separately.
    """
    if setting not in ("all", "per-subset"):
        raise ValidationError(f"setting must be 'all' or 'per-subset', got {setting!r}")
    if not isinstance(subsets, dict):
        subsets = {"all": list(subsets)}
    scored: dict[str, tuple[list[float], list[float]]] = {}
    for name, pairs in subsets.items():
        gold: list[float] = []
        pred: list[float] = []
        for pair in pairs:
            if pair.score is None:
                raise ValidationError(f"pair in subset {name!r} lacks a gold score")
            gold.append(pair.score)
            pred.append(cosine_sim(encode_fn(pair.s1), encode_fn(pair.s2)))
        scored[name] = (gold, pred)
    if setting == "all":
        gold = [g for golds, _ in scored.values() for g in golds]
        pred = [p for _, preds in scored.values() for p in preds]
        return {"setting": "all", "n": len(gold), "spearman": spearman(gold, pred)}
    return {
        "setting": "per-subset",
        "subsets": {
            name: {"n": len(gold), "spearman": spearman(gold, pred)}
            for name, (gold, pred) in scored.items()
        },
    }


@dataclass
class RetrievalRun:
    """Per-query document rankings plus binary relevance judgments.

    rankings: qid -> list of (did, score), descending score, score ties
    broken by ascending did. qrels: (qid, did) -> 0 or 1. Every ranked query
    must have at least one relevant document in qrels.
    """

    rankings: dict[str, list[tuple[str, float]]]
    qrels: dict[tuple[str, str], int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.rankings:
            raise ValidationError("run must rank at least one query")
        for (qid, did), rel in self.qrels.items():
            if rel not in (0, 1):
                raise ValidationError(f"qrels[{qid!r}, {did!r}] must be 0 or 1, got {rel!r}")
        for qid, ranked in self.rankings.items():
            for did, score in ranked:
                if not math.isfinite(score):
                    raise ValidationError(f"query {qid!r}: non-finite score for {did!r}")
            for (did1, s1), (did2, s2) in zip(ranked, ranked[1:]):
                if s1 < s2 or (s1 == s2 and did1 >= did2):
                    raise ValidationError(
                        f"query {qid!r}: ranking must descend by score with ties "
                        f"by ascending doc id ({did1!r} before {did2!r})"
                    )
            if self.relevant_count(qid) == 0:
                raise NoRelevant(f"query {qid!r} has no relevant document in qrels")

    def relevant_count(self, qid: str) -> int:
        return sum(1 for (q, _), rel in self.qrels.items() if q == qid and rel == 1)

    def is_relevant(self, qid: str, did: str) -> bool:
        return self.qrels.get((qid, did), 0) == 1


def retrieval_metrics(run: RetrievalRun, cutoffs=(1, 5)) -> dict[str, float]:
    """MRR, MAP, and P@N over the run's queries.

    MRR averages 1/rank of the first relevant document (0 when none is
    retrieved). AP sums precision at each relevant retrieved rank and divides
    by the query's total relevant count in qrels. P@N divides hits in the top
    N by N.
    """
    cutoffs = list(cutoffs)
    if any(n < 1 for n in cutoffs):
        raise ValidationError(f"cutoffs must be >= 1, got {cutoffs}")
    rr: list[float] = []
    ap: list[float] = []
    p_at: dict[int, list[float]] = {n: [] for n in cutoffs}
    for qid, ranked in run.rankings.items():
        total_relevant = run.relevant_count(qid)
        if total_relevant == 0:
            raise NoRelevant(f"query {qid!r} has no relevant document in qrels")
        hits = 0
        precisions: list[float] = []
        first_rank = None
        for rank, (did, _) in enumerate(ranked, start=1):
            if run.is_relevant(qid, did):
                hits += 1
                precisions.append(hits / rank)
                if first_rank is None:
                    first_rank = rank
        rr.append(0.0 if first_rank is None else 1.0 / first_rank)
        ap.append(math.fsum(precisions) / total_relevant)
        for n in cutoffs:
            top_hits = sum(1 for did, _ in ranked[:n] if run.is_relevant(qid, did))
            p_at[n].append(top_hits / n)
    q = len(run.rankings)
    report = {"MRR": math.fsum(rr) / q, "MAP": math.fsum(ap) / q}
    for n in cutoffs:
        report[f"P@{n}"] = math.fsum(p_at[n]) / q
    return report


def rank_documents(query_vec, doc_vectors: dict[str, object]) -> list[tuple[str, float]]:
    """Cosine-rank documents against one query vector (ties: ascending doc id)."""
    scored = [(did, cosine_sim(query_vec, vec)) for did, vec in doc_vectors.items()]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def run_two_tower_eval(
    query_model, doc_model, queries, docs, qrels, cutoffs=(1, 5)
) -> dict[str, float]:
    """Embed queries and documents with separate encoders, rank, and score.

    queries/docs are (id, text) lists; qrels maps (qid, did) -> {0, 1}. Every
    judged id must exist, and the two encoders must agree on the embedding
    dimension.
    """
    query_ids = [qid for qid, _ in queries]
    known_qids = set(query_ids)
    doc_ids = {did for did, _ in docs}
    for qid, did in qrels:
        if qid not in known_qids:
            raise ValidationError(f"qrels references unknown query {qid!r}")
        if did not in doc_ids:
            raise ValidationError(f"qrels references unknown document {did!r}")
    query_vecs = {qid: query_model(text) for qid, text in queries}
    doc_vecs = {did: doc_model(text) for did, text in docs}
    if query_vecs and doc_vecs:
        q_dim = len(next(iter(query_vecs.values())))
        d_dim = len(next(iter(doc_vecs.values())))
        if q_dim != d_dim:
            raise DimensionMismatch(f"query dim {q_dim} != doc dim {d_dim}")
    rankings = {qid: rank_documents(query_vecs[qid], doc_vecs) for qid in query_ids}
    run = RetrievalRun(rankings=rankings, qrels=dict(qrels))
    return retrieval_metrics(run, cutoffs)


def format_table(report: dict, title: str = "") -> str:
    """Aligned two-column text rendering of a flat metric report."""
    keys = list(report)
    width = max(len(k) for k in keys)
    lines = [title] if title else []
    for k in keys:
        v = report[k]
        shown = f"{v:.4f}" if isinstance(v, float) else str(v)
        lines.append(f"{k:<{width}}  {shown}")
    return "\n".join(lines)
