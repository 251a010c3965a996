"""Shared builders for synthetic tagged corpora.

Token surfaces are fixed-width 4-character strings ("t001", "n042") so the
greedy tokenizer re-segments any concatenation unambiguously and templates
can swap nouns without shifting boundaries.
"""

from __future__ import annotations

import pytest

from jcse_kit.corpus import TaggedPair, TaggedSentence, TaggedToken

NOUNS_PER_GROUP = 6


def sent(sid: str, tokens, chunks=()) -> TaggedSentence:
    """tokens: list of (surface, pos); chunks: list of (start, end)."""
    toks = tuple(TaggedToken(surface=s, pos=p) for s, p in tokens)
    text = "".join(s for s, _ in tokens)
    return TaggedSentence(id=sid, text=text, tokens=toks, noun_chunks=tuple(chunks))


def noun(index: int) -> str:
    return f"n{index:03d}"


def group_nouns(group: int) -> list[str]:
    base = group * NOUNS_PER_GROUP
    return [noun(base + i) for i in range(NOUNS_PER_GROUP)]


# Template variants: the non-noun scaffolding shared by every group. `None`
# marks a noun slot.
TEMPLATES = [
    [("t000", "ADP"), None, ("t001", "VERB"), None, ("t002", "AUX")],
    [("t003", "ADV"), None, ("t004", "VERB"), None, ("t005", "AUX")],
    [("t006", "ADP"), None, ("t007", "ADJ"), None, ("t008", "VERB")],
    [("t009", "SCONJ"), None, ("t010", "VERB"), None, ("t011", "PART")],
]


def group_sentence(sid: str, template_index: int, nouns: list[str]) -> TaggedSentence:
    """Instantiate a template's two noun slots; each noun is a one-token chunk."""
    template = TEMPLATES[template_index % len(TEMPLATES)]
    tokens = []
    chunks = []
    slot = 0
    for piece in template:
        if piece is None:
            chunks.append((len(tokens), len(tokens) + 1))
            tokens.append((nouns[slot], "NOUN"))
            slot += 1
        else:
            tokens.append(piece)
    return sent(sid, tokens, chunks)


def build_group_corpus(n_groups: int = 50, sentences_per_group: int = 4) -> list[TaggedSentence]:
    """Group g's sentences share its nouns; all groups share the templates."""
    corpus = []
    for g in range(n_groups):
        nouns = group_nouns(g)
        for v in range(sentences_per_group):
            pair = [nouns[(2 * v) % NOUNS_PER_GROUP], nouns[(2 * v + 1) % NOUNS_PER_GROUP]]
            corpus.append(group_sentence(f"g{g:02d}-s{v}", v, pair))
    return corpus


def build_group_nli_records(n_groups: int = 50):
    """Labeled pairs: entailment within a group, contradiction across groups."""
    from jcse_kit.corpus import SentencePair

    records = []
    for g in range(n_groups):
        nouns = group_nouns(g)
        other = group_nouns((g + 1) % n_groups)
        premise = group_sentence(f"p{g}", 0, [nouns[0], nouns[1]]).text
        entail_1 = group_sentence(f"e{g}a", 1, [nouns[2], nouns[3]]).text
        entail_2 = group_sentence(f"e{g}b", 2, [nouns[4], nouns[5]]).text
        contra_1 = group_sentence(f"c{g}a", 1, [other[2], other[3]]).text
        contra_2 = group_sentence(f"c{g}b", 3, [other[4], other[5]]).text
        records.append(SentencePair(s1=premise, s2=entail_1, label="entailment"))
        records.append(SentencePair(s1=premise, s2=entail_2, label="entailment"))
        records.append(SentencePair(s1=premise, s2=contra_1, label="contradiction"))
        records.append(SentencePair(s1=premise, s2=contra_2, label="contradiction"))
    return records


def build_heldout_triplets(n_groups: int = 50):
    """Same-group positives, next-group negatives, nouns disjoint per role."""
    from jcse_kit.corpus import Triplet

    triplets = []
    for g in range(n_groups):
        nouns = group_nouns(g)
        other = group_nouns((g + 2) % n_groups)
        anchor = group_sentence(f"ha{g}", 0, [nouns[0], nouns[3]]).text
        positive = group_sentence(f"hp{g}", 2, [nouns[1], nouns[4]]).text
        negative = group_sentence(f"hn{g}", 2, [other[1], other[4]]).text
        triplets.append(Triplet(anchor=anchor, positive=positive, negative=negative))
    return triplets


def build_retrieval_fixture(n_queries: int = 20, n_groups: int = 50):
    """Queries and docs from the same groups but with disjoint noun pairs."""
    queries = []
    docs = []
    qrels = {}
    for g in range(n_groups):
        nouns = group_nouns(g)
        doc = group_sentence(f"d{g}", 3, [nouns[1], nouns[2]])
        docs.append((f"doc-{g:02d}", doc.text))
    for q in range(n_queries):
        nouns = group_nouns(q)
        query = group_sentence(f"q{q}", 1, [nouns[4], nouns[5]])
        queries.append((f"query-{q:02d}", query.text))
        for g in range(n_groups):
            qrels[(f"query-{q:02d}", f"doc-{g:02d}")] = 1 if g == q else 0
    return queries, docs, qrels


def build_pair_fixture(n_pairs: int) -> list[TaggedPair]:
    """Scored tagged pairs over the group corpus (same group = high score)."""
    pairs = []
    for i in range(n_pairs):
        g = i % 40
        nouns = group_nouns(g)
        a = group_sentence(f"pair{i}-a", i % len(TEMPLATES), [nouns[0], nouns[1]])
        if i % 2 == 0:
            b = group_sentence(f"pair{i}-b", (i + 1) % len(TEMPLATES), [nouns[2], nouns[3]])
            score = 4.5
        else:
            other = group_nouns((g + 5) % 40)
            b = group_sentence(f"pair{i}-b", (i + 1) % len(TEMPLATES), [other[2], other[3]])
            score = 1.0
        pairs.append(TaggedPair(id=f"pair{i}", score=score, a=a, b=b))
    return pairs


@pytest.fixture(scope="session")
def group_corpus():
    return build_group_corpus()


@pytest.fixture(scope="session")
def small_corpus():
    return build_group_corpus(n_groups=6, sentences_per_group=3)
