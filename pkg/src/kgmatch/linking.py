"""Instance linking between source answers and target-graph instances.

Each source instance runs a cascade: explicit linking predicates first, then
exact label strings, then (when enabled) embedding similarity over the full
cross-cosine matrix of source labels against all target instance labels.
Earlier stages are exclusive: a predicate hit suppresses the later stages.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from .embeddings import EmbeddingStore, cosine
from .kg import KnowledgeGraph
from .terms import OWL_NS, RDFS_NS, SKOS_NS, Term

logger = logging.getLogger(__name__)

DEFAULT_LINKING_PREDICATES = (
    Term.iri(RDFS_NS + "seeAlso"),
    Term.iri(OWL_NS + "sameAs"),
    Term.iri(SKOS_NS + "closeMatch"),
    Term.iri(SKOS_NS + "exactMatch"),
)


class LinkMethod(Enum):
    PREDICATE = "predicate"
    EXACT_STRING = "exact_string"
    EMBEDDING = "embedding"


@dataclass(frozen=True)
class InstanceLink:
    source_instance: Term
    target_instance: Term
    method: LinkMethod
    score: float


class NoCommonInstance(Exception):
    """No answer row could be linked; the query must be skipped."""


def link_by_predicate(
    src: Term,
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
    linking_predicates: tuple[Term, ...] = DEFAULT_LINKING_PREDICATES,
) -> list[InstanceLink]:
    """Links stated explicitly via sameAs-style predicates, in either direction.

    The far end must be an IRI that occurs in the target graph.
    """
    targets: set[Term] = set()
    for g in (gs, gt):
        for lp in linking_predicates:
            for t in g.match_pattern(src, lp, None):
                if t.object.is_iri and gt.has_entity(t.object):
                    targets.add(t.object)
            for t in g.match_pattern(None, lp, src):
                if t.subject.is_iri and gt.has_entity(t.subject):
                    targets.add(t.subject)
    return [
        InstanceLink(src, tgt, LinkMethod.PREDICATE, 1.0)
        for tgt in sorted(targets, key=Term.sort_key)
    ]


def _fold(label: str, ignore_case: bool) -> str:
    label = label.strip()
    return label.lower() if ignore_case else label


def link_by_string(
    src: Term, gs: KnowledgeGraph, gt: KnowledgeGraph, ignore_case: bool = False
) -> list[InstanceLink]:
    """Target instances sharing at least one trimmed, byte-equal label."""
    src_labels = {_fold(x, ignore_case) for x in gs.labels_of(src)}
    hits = [
        inst
        for inst in gt.instances()
        if src_labels & {_fold(x, ignore_case) for x in gt.labels_of(inst)}
    ]
    return [InstanceLink(src, tgt, LinkMethod.EXACT_STRING, 1.0) for tgt in hits]


def link_by_embedding(
    src: Term,
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
    store: EmbeddingStore,
    link_threshold: float,
) -> InstanceLink | None:
    """Best cell of the source-label x target-label cosine matrix.

    Returns a link only when the maximum strictly exceeds the threshold.
    Equal-maximum ties keep the lexicographically smallest target IRI.
    Labels without cached vectors drop out; an empty side yields None.
    """
    src_vectors = [v for v in (store.lookup(x) for x in gs.labels_of(src)) if v is not None]
    if not src_vectors:
        return None
    best_target: Term | None = None
    best_sim = float("-inf")
    for inst in gt.instances():
        for label in gt.labels_of(inst):
            tv = store.lookup(label)
            if tv is None:
                continue
            for sv in src_vectors:
                sim = cosine(sv, tv)
                if sim > best_sim:
                    best_sim, best_target = sim, inst
    if best_target is None or best_sim <= link_threshold:
        return None
    return InstanceLink(src, best_target, LinkMethod.EMBEDDING, best_sim)


def _link_literal(value: Term, gt: KnowledgeGraph, ignore_case: bool) -> list[InstanceLink]:
    """Literal answers link by trimmed value equality only, never by embedding."""
    want = _fold(value.value, ignore_case)
    hits: set[Term] = set()
    for t in gt.match_pattern(None, None, None):
        if t.object.is_literal and _fold(t.object.value, ignore_case) == want:
            hits.add(t.object)
    return [
        InstanceLink(value, tgt, LinkMethod.EXACT_STRING, 1.0)
        for tgt in sorted(hits, key=Term.sort_key)
    ]


def link_instance(
    src: Term,
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
    store: EmbeddingStore | None = None,
    ie_enabled: bool = False,
    link_threshold: float = 0.8,
    ignore_case: bool = False,
    linking_predicates: tuple[Term, ...] = DEFAULT_LINKING_PREDICATES,
) -> list[InstanceLink]:
    """The full cascade for one source term."""
    if src.is_literal:
        return _link_literal(src, gt, ignore_case)
    links = link_by_predicate(src, gs, gt, linking_predicates)
    if links:
        return links
    links = link_by_string(src, gs, gt, ignore_case)
    if links:
        return links
    if ie_enabled and store is not None:
        link = link_by_embedding(src, gs, gt, store, link_threshold)
        if link is not None:
            return [link]
    return []


def link_all(
    answers,
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
    store: EmbeddingStore | None = None,
    ie_enabled: bool = False,
    link_threshold: float = 0.8,
    ignore_case: bool = False,
    linking_predicates: tuple[Term, ...] = DEFAULT_LINKING_PREDICATES,
) -> dict[tuple[Term, ...], tuple[tuple[InstanceLink, ...], ...]]:
    """Per answer row, the links for each tuple position.

    Rows missing a link on any position are dropped.  Raises
    NoCommonInstance when nothing survives.
    """
    cache: dict[Term, tuple[InstanceLink, ...]] = {}

    def links_for(term: Term) -> tuple[InstanceLink, ...]:
        if term not in cache:
            cache[term] = tuple(
                link_instance(
                    term,
                    gs,
                    gt,
                    store,
                    ie_enabled,
                    link_threshold,
                    ignore_case,
                    linking_predicates,
                )
            )
        return cache[term]

    linked: dict[tuple[Term, ...], tuple[tuple[InstanceLink, ...], ...]] = {}
    for row in sorted(answers, key=lambda r: tuple(t.sort_key() for t in r)):
        per_position = tuple(links_for(term) for term in row)
        if all(per_position):
            linked[row] = per_position
    if not linked:
        raise NoCommonInstance("no answer row could be linked to the target graph")
    logger.info("linked %d of %d answer rows", len(linked), len(answers))
    return linked
