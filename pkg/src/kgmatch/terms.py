"""RDF terms and triples: the substrate every other module works on."""
from __future__ import annotations

import enum
from dataclasses import dataclass


class TermKind(enum.Enum):
    IRI = "iri"
    LITERAL = "literal"
    BLANK = "blank"


_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


@dataclass(frozen=True, slots=True)
class Term:
    """An RDF node: IRI, literal, or (skolemized) blank node.

    ``value`` holds the absolute IRI text, the literal lexical form, or the
    blank-node id.  ``datatype`` and ``lang`` apply to literals only and are
    mutually exclusive.
    """

    kind: TermKind
    value: str
    datatype: str | None = None
    lang: str | None = None

    def __post_init__(self) -> None:
        if self.kind is TermKind.IRI:
            if not self.value or any(c.isspace() for c in self.value):
                raise ValueError(f"invalid IRI: {self.value!r}")
        if self.kind is not TermKind.LITERAL and (self.datatype or self.lang):
            raise ValueError("datatype/lang are only valid on literals")
        if self.datatype is not None and self.lang is not None:
            raise ValueError("literal cannot carry both datatype and language tag")

    @classmethod
    def iri(cls, value: str) -> "Term":
        return cls(TermKind.IRI, value)

    @classmethod
    def literal(cls, value: str, datatype: str | None = None, lang: str | None = None) -> "Term":
        return cls(TermKind.LITERAL, value, datatype, lang)

    @classmethod
    def blank(cls, value: str) -> "Term":
        return cls(TermKind.BLANK, value)

    @property
    def is_iri(self) -> bool:
        return self.kind is TermKind.IRI

    @property
    def is_literal(self) -> bool:
        return self.kind is TermKind.LITERAL

    @property
    def is_blank(self) -> bool:
        return self.kind is TermKind.BLANK

    def sort_key(self) -> tuple:
        return (self.kind.value, self.value, self.datatype or "", self.lang or "")

    def n3(self) -> str:
        """Serialize in N-Triples syntax (used for output and diagnostics)."""
        if self.kind is TermKind.IRI:
            return f"<{self.value}>"
        if self.kind is TermKind.BLANK:
            return f"_:{self.value}"
        body = "".join(_ESCAPES.get(c, c) for c in self.value)
        if self.lang:
            return f'"{body}"@{self.lang}'
        if self.datatype:
            return f'"{body}"^^<{self.datatype}>'
        return f'"{body}"'

    def __str__(self) -> str:
        return self.n3()

    def local_name(self) -> str:
        """Last path segment of an IRI (after '#' or '/'), or the raw value."""
        if self.kind is TermKind.IRI:
            for sep in ("#", "/"):
                if sep in self.value:
                    tail = self.value.rsplit(sep, 1)[1]
                    if tail:
                        return tail
        return self.value


@dataclass(frozen=True, slots=True)
class Triple:
    """A subject-predicate-object statement."""

    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if self.predicate.kind is not TermKind.IRI:
            raise ValueError("triple predicate must be an IRI")
        if self.subject.kind is TermKind.LITERAL:
            raise ValueError("triple subject cannot be a literal")

    def sort_key(self) -> tuple:
        return (self.subject.sort_key(), self.predicate.sort_key(), self.object.sort_key())

    def __str__(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
OWL_NS = "http://www.w3.org/2002/07/owl#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
SKOS_NS = "http://www.w3.org/2004/02/skos/core#"
SKOS_XL_NS = "http://www.w3.org/2008/05/skos-xl#"

RDF_TYPE = Term.iri(RDF_NS + "type")
