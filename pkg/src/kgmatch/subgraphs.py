"""Target-side subgraph extraction around linked instances.

Unary queries take every triple incident to the linked instance, annotated
with where the instance sits and with the most query-relevant class of each
endpoint.  Binary queries take every simple path between the two linked
endpoints up to a length bound, recording traversal direction per edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .embeddings import EmbeddingStore, cosine
from .kg import KnowledgeGraph
from .terms import RDF_TYPE, Term, Triple


class AnchorPosition(Enum):
    SUBJECT = "subject"
    PREDICATE = "predicate"
    OBJECT = "object"


class Direction(Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass(frozen=True)
class TripleSubgraph:
    triple: Triple
    anchor_position: AnchorPosition
    subject_type: Term | None = None
    object_type: Term | None = None


@dataclass(frozen=True)
class PathSubgraph:
    nodes: tuple[Term, ...]
    properties: tuple[tuple[Term, Direction], ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.properties) + 1:
            raise ValueError("path needs exactly one more node than properties")
        if not self.properties:
            raise ValueError("path needs at least one edge")

    @property
    def length(self) -> int:
        return len(self.properties)


def select_type(
    e: Term,
    gt: KnowledgeGraph,
    query_embedding: np.ndarray | None = None,
    store: EmbeddingStore | None = None,
) -> Term | None:
    """The asserted class of e most similar to the query, or None if untyped.

    Similarity is the best label-vector cosine against the query embedding;
    without embeddings (baseline) the lexicographically smallest class wins.
    Ties keep the lexicographically smallest IRI.
    """
    classes = gt.types_of(e)
    if not classes:
        return None
    if query_embedding is None or store is None:
        return classes[0]
    best: Term | None = None
    best_sim = float("-inf")
    for cls in classes:
        vectors = [v for v in (store.lookup(x) for x in gt.labels_of(cls)) if v is not None]
        if not vectors:
            continue
        sim = max(cosine(query_embedding, v) for v in vectors)
        if sim > best_sim:
            best, best_sim = cls, sim
    return best if best is not None else classes[0]


def extract_unary(
    anchor: Term,
    gt: KnowledgeGraph,
    query_embedding: np.ndarray | None = None,
    store: EmbeddingStore | None = None,
) -> list[TripleSubgraph]:
    """Every triple of gt containing the anchor, with position and type notes.

    The anchor's own rdf:type assertions come through as subject-anchored
    triples (anchor, rdf:type, C); generalization turns those into plain
    class expressions.
    """

    def annotate(term: Term) -> Term | None:
        if not term.is_iri:
            return None
        return select_type(term, gt, query_embedding, store)

    found: list[TripleSubgraph] = []
    seen: set[tuple[Triple, AnchorPosition]] = set()
    position_patterns = (
        (AnchorPosition.SUBJECT, (anchor, None, None)),
        (AnchorPosition.PREDICATE, (None, anchor, None)),
        (AnchorPosition.OBJECT, (None, None, anchor)),
    )
    for position, pattern in position_patterns:
        for t in gt.match_pattern(*pattern):
            if (t, position) in seen:
                continue
            seen.add((t, position))
            found.append(
                TripleSubgraph(
                    triple=t,
                    anchor_position=position,
                    subject_type=annotate(t.subject),
                    object_type=annotate(t.object),
                )
            )
    found.sort(key=lambda sg: (sg.triple.sort_key(), sg.anchor_position.value))
    return found


def extract_binary(
    anchor_pair: tuple[Term, Term], gt: KnowledgeGraph, max_path_length: int = 3
) -> list[PathSubgraph]:
    """All simple paths between the two anchors, up to max_path_length edges.

    Edges traverse in either direction with the direction recorded.  A
    literal goal matches any literal with the same trimmed value.  Results
    are ordered by length, then property sequence, then node sequence.
    """
    start, goal = anchor_pair

    def is_goal(node: Term) -> bool:
        if node == goal:
            return True
        return (
            goal.is_literal
            and node.is_literal
            and node.value.strip() == goal.value.strip()
        )

    def steps(node: Term) -> list[tuple[Term, Term, Direction]]:
        out = [
            (t.object, t.predicate, Direction.FORWARD)
            for t in gt.match_pattern(node, None, None)
        ]
        out.extend(
            (t.subject, t.predicate, Direction.INVERSE)
            for t in gt.match_pattern(None, None, node)
        )
        return out

    results: list[PathSubgraph] = []

    def dfs(node: Term, nodes: list[Term], props: list[tuple[Term, Direction]]) -> None:
        if props and is_goal(node):
            results.append(PathSubgraph(tuple(nodes), tuple(props)))
            return
        if len(props) == max_path_length:
            return
        for nxt, prop, direction in steps(node):
            if nxt in nodes:
                continue
            nodes.append(nxt)
            props.append((prop, direction))
            dfs(nxt, nodes, props)
            nodes.pop()
            props.pop()

    if start.is_literal:
        return []
    dfs(start, [start], [])
    results.sort(
        key=lambda p: (
            p.length,
            tuple((prop.value, d.value) for prop, d in p.properties),
            tuple(n.sort_key() for n in p.nodes),
        )
    )
    return results


def endpoint_labels(term: Term, gt: KnowledgeGraph) -> list[str]:
    """Labels of a subgraph node; a literal stands for its own value."""
    if term.is_literal:
        return [term.value]
    return gt.labels_of(term)


def triple_subgraph_labels(tsg: TripleSubgraph, gt: KnowledgeGraph) -> list[str]:
    """Deduplicated labels of everything in the triple except the anchor.

    Endpoint labels include the labels of the endpoint's annotated type, so
    both the instance and its class carry lexical signal.
    """
    labels: list[str] = []
    t = tsg.triple
    if tsg.anchor_position is not AnchorPosition.SUBJECT:
        labels.extend(endpoint_labels(t.subject, gt))
        if tsg.subject_type is not None:
            labels.extend(gt.labels_of(tsg.subject_type))
    if tsg.anchor_position is not AnchorPosition.PREDICATE:
        labels.extend(gt.labels_of(t.predicate))
    if tsg.anchor_position is not AnchorPosition.OBJECT:
        labels.extend(endpoint_labels(t.object, gt))
        if tsg.object_type is not None:
            labels.extend(gt.labels_of(tsg.object_type))
    return list(dict.fromkeys(labels))


def path_subgraph_labels(psg: PathSubgraph, gt: KnowledgeGraph) -> list[str]:
    """Deduplicated labels of all path nodes and properties, in path order."""
    labels: list[str] = []
    for node in psg.nodes:
        labels.extend(endpoint_labels(node, gt))
    for prop, _direction in psg.properties:
        labels.extend(gt.labels_of(prop))
    return list(dict.fromkeys(labels))
