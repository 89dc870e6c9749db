"""Immutable, fully indexed triple store with label lookup."""
from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .rdf_parse import parse_ntriples, parse_turtle
from .terms import RDF_TYPE, RDFS_NS, SKOS_NS, SKOS_XL_NS, Term, Triple

DEFAULT_LABEL_PREDICATES: tuple[str, ...] = (
    SKOS_NS + "prefLabel",
    SKOS_NS + "altLabel",
    SKOS_XL_NS + "literalForm",
    RDFS_NS + "label",
    RDFS_NS + "comment",
)

_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])")


def split_local_name(name: str) -> str:
    """Fallback label: split CamelCase/underscores/hyphens and lowercase.

    ``AcceptedPaper`` -> ``accepted paper``; ``has_decision`` -> ``has decision``.
    """
    parts = re.split(r"[_\-]+", name)
    words: list[str] = []
    for part in parts:
        if part:
            words.extend(_CAMEL_BOUNDARY.sub(" ", part).split())
    return " ".join(w.lower() for w in words) or name.lower()


class KnowledgeGraph:
    """A deduplicated triple set indexed in SPO, POS and OSP permutations.

    Immutable once built: all readers may share an instance freely.
    """

    def __init__(self, triples: Iterable[Triple], label_predicates: Sequence[str] = DEFAULT_LABEL_PREDICATES):
        self._triples = frozenset(triples)
        self.label_predicates: tuple[Term, ...] = tuple(Term.iri(p) for p in label_predicates)
        self._spo: dict[Term, dict[Term, set[Term]]] = {}
        self._pos: dict[Term, dict[Term, set[Term]]] = {}
        self._osp: dict[Term, dict[Term, set[Term]]] = {}
        for t in self._triples:
            self._spo.setdefault(t.subject, {}).setdefault(t.predicate, set()).add(t.object)
            self._pos.setdefault(t.predicate, {}).setdefault(t.object, set()).add(t.subject)
            self._osp.setdefault(t.object, {}).setdefault(t.subject, set()).add(t.predicate)

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def match_pattern(
        self,
        s: Term | None = None,
        p: Term | None = None,
        o: Term | None = None,
    ) -> list[Triple]:
        """Triples matching all bound positions, in lexicographic order.

        The index is chosen by the bound-position pattern; unbound positions
        match anything.
        """
        return sorted(self._match_unordered(s, p, o), key=Triple.sort_key)

    def _match_unordered(self, s, p, o) -> Iterator[Triple]:
        if s is not None:
            by_pred = self._spo.get(s, {})
            preds = [p] if p is not None else list(by_pred)
            for pred in preds:
                for obj in by_pred.get(pred, ()):
                    if o is None or obj == o:
                        yield Triple(s, pred, obj)
        elif p is not None:
            by_obj = self._pos.get(p, {})
            objs = [o] if o is not None else list(by_obj)
            for obj in objs:
                for subj in by_obj.get(obj, ()):
                    yield Triple(subj, p, obj)
        elif o is not None:
            by_subj = self._osp.get(o, {})
            for subj, preds in by_subj.items():
                for pred in preds:
                    yield Triple(subj, pred, o)
        else:
            yield from self._triples

    def count_pattern(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> int:
        return sum(1 for _ in self._match_unordered(s, p, o))

    def labels_of(self, e: Term) -> list[str]:
        """Literal labels of an entity, label-predicate priority first.

        If no label triple exists, falls back to the split-and-lowercased
        local name, so the result is never empty.
        """
        if e.is_literal:
            raise ValueError("labels_of expects an IRI or blank node")
        labels: list[str] = []
        for lp in self.label_predicates:
            values = sorted(
                t.object.value for t in self._match_unordered(e, lp, None) if t.object.is_literal
            )
            labels.extend(values)
        if labels:
            return labels
        return [split_local_name(e.local_name())]

    def types_of(self, e: Term) -> list[Term]:
        """Asserted classes of an entity (IRI objects of its type triples), sorted."""
        classes = {
            t.object for t in self._match_unordered(e, RDF_TYPE, None) if t.object.is_iri
        }
        return sorted(classes, key=Term.sort_key)

    def instances(self) -> list[Term]:
        """All subjects of type assertions, sorted; candidate set for linking."""
        subjects = {t.subject for t in self._match_unordered(None, RDF_TYPE, None)}
        return sorted(subjects, key=Term.sort_key)

    def has_entity(self, e: Term) -> bool:
        """True if the term occurs as a subject or object of any triple."""
        return e in self._spo or e in self._osp


def load_graph(
    paths: Sequence[str | Path],
    label_predicates: Sequence[str] = DEFAULT_LABEL_PREDICATES,
) -> KnowledgeGraph:
    """Parse RDF files (.nt or .ttl by extension) into one deduplicated graph.

    Blank nodes are skolemized with a per-file prefix so repeated loads
    produce identical graphs.
    """
    triples: list[Triple] = []
    for i, path in enumerate(paths):
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        blank_prefix = f"b{i}_"
        if path.suffix == ".nt":
            triples.extend(parse_ntriples(text, str(path), blank_prefix))
        elif path.suffix == ".ttl":
            triples.extend(parse_turtle(text, str(path), blank_prefix))
        else:
            raise ValueError(f"unsupported RDF extension {path.suffix!r} (use .nt or .ttl)")
    return KnowledgeGraph(triples, label_predicates)
