"""Correspondence construction and alignment serialization.

Scored subgraphs generalize into class or property expressions, aggregate
across answer instances into confidence-weighted correspondences, and
serialize as canonical JSON (normative) or EDOAL-flavored XML (export).
"""
from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from .sparql import AlignmentQuery
from .subgraphs import AnchorPosition, Direction, PathSubgraph, TripleSubgraph
from .terms import RDF_TYPE, Term

EXPRESSION_KINDS = (
    "class",
    "property",
    "some_values_from",
    "has_value",
    "inverse",
    "chain",
    "intersection",
)

# Kinds that denote properties rather than classes.
PROPERTY_KINDS = frozenset({"property", "inverse", "chain"})


@dataclass(frozen=True)
class Expression:
    """A class or property expression as a tagged tree.

    Leaves (class, property) carry one IRI; has_value carries a term that
    may be a literal; the other kinds carry child expressions.
    """

    kind: str
    iri: Term | None = None
    value: Term | None = None
    children: tuple["Expression", ...] = ()

    def __post_init__(self):
        if self.kind not in EXPRESSION_KINDS:
            raise ValueError(f"unknown expression kind {self.kind!r}")
        if self.kind in ("class", "property"):
            if self.iri is None or not self.iri.is_iri:
                raise ValueError(f"{self.kind} expression needs an IRI")
        elif self.kind == "has_value":
            if self.value is None:
                raise ValueError("has_value expression needs a term")
        elif self.kind == "some_values_from":
            if len(self.children) != 2:
                raise ValueError("some_values_from needs property and filler")
        elif self.kind == "inverse":
            if len(self.children) != 1:
                raise ValueError("inverse needs one property expression")
        elif self.kind == "chain":
            if len(self.children) < 2:
                raise ValueError("chain needs at least two property expressions")
        elif self.kind == "intersection":
            if len(self.children) < 2:
                raise ValueError("intersection needs at least two operands")

    @property
    def is_property_expr(self) -> bool:
        return self.kind in PROPERTY_KINDS

    def text(self) -> str:
        """Deterministic human-readable form, used for ordering."""
        if self.kind == "class":
            return f"Class({self.iri.value})"
        if self.kind == "property":
            return f"Property({self.iri.value})"
        if self.kind == "has_value":
            return f"HasValue({self.value.n3()})"
        if self.kind == "some_values_from":
            prop, filler = self.children
            return f"SomeValuesFrom({prop.text()}, {filler.text()})"
        if self.kind == "inverse":
            return f"Inverse({self.children[0].text()})"
        if self.kind == "chain":
            return "Chain(" + ", ".join(c.text() for c in self.children) + ")"
        return "And(" + ", ".join(c.text() for c in self.children) + ")"


def class_expr(iri: Term) -> Expression:
    return Expression("class", iri=iri)


def property_expr(iri: Term) -> Expression:
    return Expression("property", iri=iri)


def has_value(term: Term) -> Expression:
    return Expression("has_value", value=term)


def some_values_from(prop: Expression, filler: Expression) -> Expression:
    return Expression("some_values_from", children=(prop, filler))


def inverse(prop: Expression) -> Expression:
    return Expression("inverse", children=(prop,))


def chain(parts: tuple[Expression, ...]) -> Expression:
    return Expression("chain", children=tuple(parts))


def intersection_of(operands: list[Expression]) -> Expression:
    """Conjunction that collapses a single operand to itself."""
    operands = sorted(set(operands), key=Expression.text)
    if len(operands) == 1:
        return operands[0]
    return Expression("intersection", children=tuple(operands))


@dataclass(frozen=True)
class Correspondence:
    source_expr: Expression
    target_expr: Expression
    confidence: float
    support_count: int
    relation: str = "equivalence"


@dataclass(frozen=True)
class Alignment:
    ontology_pair: tuple[str, str]
    correspondences: tuple[Correspondence, ...]
    provenance: dict = field(compare=False, default_factory=dict)


def generalize_unary(tsg: TripleSubgraph) -> Expression:
    """The class (or property) expression a triple subgraph stands for.

    The anchor's own type assertion becomes the asserted class; other
    subject-anchored triples become existential restrictions over the
    predicate, object-anchored ones over its inverse.  The filler is the far
    endpoint's class when annotated, otherwise the concrete value.
    """
    t = tsg.triple
    if tsg.anchor_position is AnchorPosition.SUBJECT:
        if t.predicate == RDF_TYPE and t.object.is_iri:
            return class_expr(t.object)
        if tsg.object_type is not None:
            filler = class_expr(tsg.object_type)
        else:
            filler = has_value(t.object)
        return some_values_from(property_expr(t.predicate), filler)
    if tsg.anchor_position is AnchorPosition.OBJECT:
        if tsg.subject_type is not None:
            filler = class_expr(tsg.subject_type)
        else:
            filler = has_value(t.subject)
        return some_values_from(inverse(property_expr(t.predicate)), filler)
    return property_expr(t.predicate)


def generalize_binary(psg: PathSubgraph) -> Expression:
    """Property or property-chain expression for a path subgraph."""
    parts = [
        property_expr(prop) if d is Direction.FORWARD else inverse(property_expr(prop))
        for prop, d in psg.properties
    ]
    if len(parts) == 1:
        return parts[0]
    return chain(tuple(parts))


def source_expression(query: AlignmentQuery) -> Expression | None:
    """The source-side expression mirrored from the query's own patterns.

    Unary: the conjunction of the select variable's class atoms; queries
    without any class atom have no expressible source side and yield None.
    Binary: the property (chain) along the unique pattern path from the
    first select variable to the second; branching shapes yield None.
    """
    if query.arity == 1:
        var = query.select_vars[0]
        atoms = [
            class_expr(p.o)
            for p in query.patterns
            if p.s == var and p.p == RDF_TYPE and isinstance(p.o, Term) and p.o.is_iri
        ]
        if not atoms:
            return None
        return intersection_of(atoms)

    start, goal = query.select_vars
    edges = list(query.patterns)

    def walk(at, used: frozenset[int]) -> list[Expression] | None:
        if at == goal:
            return [] if len(used) == len(edges) else None
        for i, pat in enumerate(edges):
            if i in used or pat.p == RDF_TYPE:
                continue
            if not isinstance(pat.p, Term):
                continue
            if pat.s == at:
                rest = walk(pat.o, used | {i})
                if rest is not None:
                    return [property_expr(pat.p)] + rest
            if pat.o == at:
                rest = walk(pat.s, used | {i})
                if rest is not None:
                    return [inverse(property_expr(pat.p))] + rest
        return None

    # Type atoms cannot be mirrored into a property expression; the chain is
    # built from the remaining edges.
    path = walk(start, frozenset(i for i, p in enumerate(edges) if p.p == RDF_TYPE))
    if path is None or len(path) == 0:
        return None
    if len(path) == 1:
        return path[0]
    return chain(tuple(path))


def aggregate(
    query: AlignmentQuery,
    source_expr: Expression,
    scored: list[tuple[tuple[Term, ...], "object"]],
    min_score: float,
) -> list[Correspondence]:
    """Group scored subgraphs by generalized expression into correspondences.

    Confidence is the score sum divided by the number of distinct supporting
    answer rows; groups at or below min_score are dropped.  Unary queries
    keep only class expressions on the target side.
    """
    groups: dict[Expression, tuple[set[tuple[Term, ...]], float]] = {}
    for row, scored_sg in scored:
        sg = scored_sg.subgraph
        expr = (
            generalize_unary(sg)
            if isinstance(sg, TripleSubgraph)
            else generalize_binary(sg)
        )
        if query.arity == 1 and expr.is_property_expr:
            continue
        if query.arity == 2 and not expr.is_property_expr:
            continue
        rows, total = groups.setdefault(expr, (set(), 0.0))
        rows.add(row)
        groups[expr] = (rows, total + scored_sg.score)
    out = []
    for expr, (rows, total) in groups.items():
        support = len(rows)
        confidence = round(total / support, 12)
        if confidence > min_score:
            out.append(Correspondence(source_expr, expr, confidence, support))
    out.sort(key=lambda c: (-c.confidence, c.target_expr.text()))
    return out


def _term_to_json(term: Term) -> dict:
    if term.is_literal:
        node: dict = {"type": "literal", "value": term.value}
        if term.datatype is not None:
            node["datatype"] = term.datatype
        if term.lang is not None:
            node["lang"] = term.lang
        return node
    return {"type": "iri", "value": term.value}


def _term_from_json(node: dict) -> Term:
    if node["type"] == "literal":
        return Term.literal(node["value"], node.get("datatype"), node.get("lang"))
    return Term.iri(node["value"])


def expression_to_json(e: Expression) -> dict:
    if e.kind in ("class", "property"):
        return {"kind": e.kind, "iri": e.iri.value}
    if e.kind == "has_value":
        return {"kind": e.kind, "value": _term_to_json(e.value)}
    if e.kind == "some_values_from":
        return {
            "kind": e.kind,
            "property": expression_to_json(e.children[0]),
            "filler": expression_to_json(e.children[1]),
        }
    if e.kind == "inverse":
        return {"kind": e.kind, "property": expression_to_json(e.children[0])}
    if e.kind == "chain":
        return {"kind": e.kind, "properties": [expression_to_json(c) for c in e.children]}
    return {"kind": e.kind, "operands": [expression_to_json(c) for c in e.children]}


def expression_from_json(node: dict) -> Expression:
    kind = node["kind"]
    if kind in ("class", "property"):
        return Expression(kind, iri=Term.iri(node["iri"]))
    if kind == "has_value":
        return Expression(kind, value=_term_from_json(node["value"]))
    if kind == "some_values_from":
        return some_values_from(
            expression_from_json(node["property"]), expression_from_json(node["filler"])
        )
    if kind == "inverse":
        return inverse(expression_from_json(node["property"]))
    if kind == "chain":
        return chain(tuple(expression_from_json(c) for c in node["properties"]))
    if kind == "intersection":
        return Expression(kind, children=tuple(expression_from_json(c) for c in node["operands"]))
    raise ValueError(f"unknown expression kind {kind!r}")


def alignment_to_json(a: Alignment) -> dict:
    return {
        "ontology_pair": list(a.ontology_pair),
        "provenance": a.provenance,
        "correspondences": [
            {
                "source": expression_to_json(c.source_expr),
                "target": expression_to_json(c.target_expr),
                "relation": c.relation,
                "confidence": c.confidence,
                "support": c.support_count,
            }
            for c in a.correspondences
        ],
    }


def alignment_from_json(doc: dict) -> Alignment:
    return Alignment(
        ontology_pair=tuple(doc["ontology_pair"]),
        correspondences=tuple(
            Correspondence(
                source_expr=expression_from_json(c["source"]),
                target_expr=expression_from_json(c["target"]),
                confidence=c["confidence"],
                support_count=c["support"],
                relation=c.get("relation", "equivalence"),
            )
            for c in doc["correspondences"]
        ),
        provenance=doc.get("provenance", {}),
    )


def read_alignment(path: str | Path) -> Alignment:
    with open(path, encoding="utf-8") as fh:
        return alignment_from_json(json.load(fh))


EDOAL_NS = "http://ns.inria.org/edoal/1.0/#"
ALIGN_NS = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment#"


def _expression_to_edoal(e: Expression) -> ET.Element:
    """Best-effort EDOAL rendering; chains map to compose, inverses to inverse."""
    if e.kind == "class":
        el = ET.Element(f"{{{EDOAL_NS}}}Class")
        el.set(f"{{{EDOAL_NS}}}about", e.iri.value)
        return el
    if e.kind == "property":
        el = ET.Element(f"{{{EDOAL_NS}}}Relation")
        el.set(f"{{{EDOAL_NS}}}about", e.iri.value)
        return el
    if e.kind == "has_value":
        el = ET.Element(f"{{{EDOAL_NS}}}AttributeValueRestriction")
        val = ET.SubElement(el, f"{{{EDOAL_NS}}}value")
        val.text = e.value.value
        return el
    if e.kind == "some_values_from":
        el = ET.Element(f"{{{EDOAL_NS}}}AttributeDomainRestriction")
        on = ET.SubElement(el, f"{{{EDOAL_NS}}}onAttribute")
        on.append(_expression_to_edoal(e.children[0]))
        cls = ET.SubElement(el, f"{{{EDOAL_NS}}}class")
        cls.append(_expression_to_edoal(e.children[1]))
        return el
    if e.kind == "inverse":
        el = ET.Element(f"{{{EDOAL_NS}}}Relation")
        inv = ET.SubElement(el, f"{{{EDOAL_NS}}}inverse")
        inv.append(_expression_to_edoal(e.children[0]))
        return el
    if e.kind == "chain":
        el = ET.Element(f"{{{EDOAL_NS}}}Relation")
        comp = ET.SubElement(el, f"{{{EDOAL_NS}}}compose")
        for c in e.children:
            comp.append(_expression_to_edoal(c))
        return el
    el = ET.Element(f"{{{EDOAL_NS}}}Class")
    andel = ET.SubElement(el, f"{{{EDOAL_NS}}}and")
    for c in e.children:
        andel.append(_expression_to_edoal(c))
    return el


def alignment_to_edoal(a: Alignment) -> bytes:
    ET.register_namespace("edoal", EDOAL_NS)
    ET.register_namespace("align", ALIGN_NS)
    root = ET.Element(f"{{{ALIGN_NS}}}Alignment")
    level = ET.SubElement(root, f"{{{ALIGN_NS}}}level")
    level.text = "2EDOAL"
    for c in a.correspondences:
        cell = ET.SubElement(ET.SubElement(root, f"{{{ALIGN_NS}}}map"), f"{{{ALIGN_NS}}}Cell")
        ET.SubElement(cell, f"{{{ALIGN_NS}}}entity1").append(_expression_to_edoal(c.source_expr))
        ET.SubElement(cell, f"{{{ALIGN_NS}}}entity2").append(_expression_to_edoal(c.target_expr))
        rel = ET.SubElement(cell, f"{{{ALIGN_NS}}}relation")
        rel.text = "="
        measure = ET.SubElement(cell, f"{{{ALIGN_NS}}}measure")
        measure.text = repr(c.confidence)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def _pair_slug(a: Alignment) -> str:
    src, tgt = (Path(p).stem or "src" for p in a.ontology_pair)
    setting = a.provenance.get("setting", "baseline")
    threshold = a.provenance.get("threshold", 0)
    return f"{src}-{tgt}-{setting}-{threshold}"


def write_alignment(
    a: Alignment, out_dir: str | Path, formats: set[str] = frozenset({"json"})
) -> list[Path]:
    """Write the alignment under out_dir; JSON is canonical, EDOAL optional.

    The JSON bytes are a pure function of the alignment (sorted keys, no
    timestamps), so identical runs produce identical files.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    slug = _pair_slug(a)
    if "json" in formats:
        path = out_dir / f"{slug}.json"
        text = json.dumps(alignment_to_json(a), sort_keys=True, indent=2)
        path.write_text(text + "\n", encoding="utf-8")
        written.append(path)
    if "edoal" in formats:
        path = out_dir / f"{slug}.edoal.xml"
        path.write_bytes(alignment_to_edoal(a))
        written.append(path)
    return written
