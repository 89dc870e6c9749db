"""Subgraph-vs-query scoring under the four similarity settings.

Settings are progressive: "baseline" compares label pairs with Levenshtein
similarity, "les" swaps in cosine over label embeddings, "esq" pools the
query labels into one vector first, and "se" pools both sides and compares
once.  All settings filter pairwise similarities strictly above the
threshold and sum the survivors (a single comparison for "se"), so scores
can exceed 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingStore, cosine, mean_pool
from .kg import KnowledgeGraph
from .subgraphs import AnchorPosition, PathSubgraph, TripleSubgraph, endpoint_labels
from .terms import Term

SETTINGS = ("baseline", "les", "esq", "se")

# Audit placeholders for pooled sides, which have no single originating label.
POOLED_QUERY = "<query>"
POOLED_SUBGRAPH = "<subgraph>"


@dataclass(frozen=True)
class SimilaritySetting:
    kind: str
    ignore_case: bool = False
    threshold: float = 0.5

    def __post_init__(self):
        if self.kind not in SETTINGS:
            raise ValueError(f"unknown similarity setting {self.kind!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")

    @property
    def uses_embeddings(self) -> bool:
        return self.kind != "baseline"


@dataclass(frozen=True)
class ScoreDetail:
    """A score plus its audit trail of contributing label pairs."""

    score: float
    contributing: tuple[tuple[str, str, float], ...]


@dataclass(frozen=True)
class ScoredSubgraph:
    subgraph: TripleSubgraph | PathSubgraph
    score: float
    contributing: tuple[tuple[str, str, float], ...]


def levenshtein_sim(a: str, b: str, ignore_case: bool = False) -> float:
    """Normalized Levenshtein similarity 1 - dist/max(len).

    Inputs are trimmed, and lowercased when ignore_case is set.  Two empty
    strings count as identical.
    """
    a = a.strip()
    b = b.strip()
    if ignore_case:
        a = a.lower()
        b = b.lower()
    if not a and not b:
        return 1.0
    n, m = len(a), len(b)
    # Full (n+1) x (m+1) edit-distance table.
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            dist[i][j] = min(
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
                dist[i - 1][j - 1] + cost,
            )
    return 1.0 - dist[n][m] / max(n, m)


def score_baseline(
    query_labels: list[str], subgraph_labels: list[str], setting: SimilaritySetting
) -> ScoreDetail:
    """Sum of above-threshold Levenshtein similarities over the N x M label pairs."""
    contributing = []
    for q in query_labels:
        for s in subgraph_labels:
            sim = levenshtein_sim(q, s, setting.ignore_case)
            if sim > setting.threshold:
                contributing.append((q, s, sim))
    return ScoreDetail(sum(c[2] for c in contributing), tuple(contributing))


def score_les(
    query_labels: list[str],
    subgraph_labels: list[str],
    store: EmbeddingStore,
    setting: SimilaritySetting,
) -> ScoreDetail:
    """Baseline structure with cosine over looked-up vectors.

    Pairs where either label has no cached vector contribute nothing.
    Ignore-case variants are realized by loading the store case-folded.
    """
    contributing = []
    for q in query_labels:
        qv = store.lookup(q)
        if qv is None:
            continue
        for s in subgraph_labels:
            sv = store.lookup(s)
            if sv is None:
                continue
            sim = cosine(qv, sv)
            if sim > setting.threshold:
                contributing.append((q, s, sim))
    return ScoreDetail(sum(c[2] for c in contributing), tuple(contributing))


def query_embedding(query_labels: list[str], store: EmbeddingStore) -> np.ndarray | None:
    """Mean of all resolvable query-label vectors; None when none resolve."""
    vectors = [v for v in (store.lookup(q) for q in query_labels) if v is not None]
    if not vectors:
        return None
    return mean_pool(vectors)


def score_esq(
    query_emb: np.ndarray,
    subgraph_labels: list[str],
    store: EmbeddingStore,
    setting: SimilaritySetting,
) -> ScoreDetail:
    """Pooled query vector against each subgraph label (1 x M comparisons)."""
    contributing = []
    for s in subgraph_labels:
        sv = store.lookup(s)
        if sv is None:
            continue
        sim = cosine(query_emb, sv)
        if sim > setting.threshold:
            contributing.append((POOLED_QUERY, s, sim))
    return ScoreDetail(sum(c[2] for c in contributing), tuple(contributing))


def _pool_labels(labels: list[str], store: EmbeddingStore) -> np.ndarray | None:
    vectors = [v for v in (store.lookup(x) for x in labels) if v is not None]
    if not vectors:
        return None
    return mean_pool(vectors)


def triple_embedding(
    tsg: TripleSubgraph, gt: KnowledgeGraph, store: EmbeddingStore
) -> np.ndarray | None:
    """One vector for a triple subgraph, built from the anchor's complement.

    Each endpoint pools its entity labels together with its selected type's
    labels; the predicate pools its own labels.  The two components that do
    not hold the anchor are then averaged: subject-anchored triples combine
    predicate and object sides, predicate-anchored combine the two endpoints,
    object-anchored combine subject side and predicate.  Components with no
    resolvable vector drop out of the mean; if all drop, returns None.
    """
    t = tsg.triple

    def endpoint(term: Term, type_term: Term | None) -> np.ndarray | None:
        labels = list(endpoint_labels(term, gt))
        if type_term is not None:
            labels.extend(gt.labels_of(type_term))
        return _pool_labels(labels, store)

    subject_side = endpoint(t.subject, tsg.subject_type)
    predicate_side = _pool_labels(gt.labels_of(t.predicate), store)
    object_side = endpoint(t.object, tsg.object_type)

    if tsg.anchor_position is AnchorPosition.SUBJECT:
        parts = [predicate_side, object_side]
    elif tsg.anchor_position is AnchorPosition.PREDICATE:
        parts = [subject_side, object_side]
    else:
        parts = [subject_side, predicate_side]
    present = [p for p in parts if p is not None]
    if not present:
        return None
    return mean_pool(present)


def path_embedding(
    psg: PathSubgraph, gt: KnowledgeGraph, store: EmbeddingStore
) -> np.ndarray | None:
    """Mean of the pooled node labels and the pooled property labels.

    A side with no resolvable vector is skipped; both missing gives None.
    """
    node_labels: list[str] = []
    for node in psg.nodes:
        node_labels.extend(endpoint_labels(node, gt))
    prop_labels: list[str] = []
    for prop, _direction in psg.properties:
        prop_labels.extend(gt.labels_of(prop))
    sides = [
        side
        for side in (_pool_labels(node_labels, store), _pool_labels(prop_labels, store))
        if side is not None
    ]
    if not sides:
        return None
    return mean_pool(sides)


def score_se(
    query_emb: np.ndarray, sg_emb: np.ndarray, setting: SimilaritySetting
) -> ScoreDetail:
    """Single pooled-to-pooled cosine; below-threshold rejects the whole subgraph."""
    sim = cosine(query_emb, sg_emb)
    if sim > setting.threshold:
        return ScoreDetail(sim, ((POOLED_QUERY, POOLED_SUBGRAPH, sim),))
    return ScoreDetail(0.0, ())
