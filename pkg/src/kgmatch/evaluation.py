"""Alignment evaluation by query rewriting over instance data.

Reference pairs of source/target queries are compared by rewriting the
source query through the alignment, picking the rewriting whose answers
best match the reference target answers (by query f-measure), and averaging
instance-set comparison scores into coverage; precision compares each
correspondence's two sides directly.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .alignment import Alignment, Expression
from .kg import KnowledgeGraph
from .sparql import (
    AlignmentQuery,
    TriplePattern,
    Var,
    evaluate,
    format_query,
    parse_query,
)
from .terms import RDF_TYPE

logger = logging.getLogger(__name__)

COMPARE_KINDS = (
    "classical",
    "recall_oriented",
    "precision_oriented",
    "overlap",
    "query_fmeasure",
)


@dataclass(frozen=True)
class QueryPair:
    pair_id: str
    query_source: AlignmentQuery
    query_target: AlignmentQuery

    def __post_init__(self):
        if self.query_source.arity != self.query_target.arity:
            raise ValueError(f"query pair {self.pair_id}: arities differ")


@dataclass
class PerQueryResult:
    query_id: str
    best_rewriting: str | None
    fvalues: dict


@dataclass
class EvaluationReport:
    per_query: list[PerQueryResult]
    coverage: dict
    precision: dict
    metadata: dict = field(default_factory=dict)


def qp_qr(i_eval: frozenset, i_ref: frozenset) -> tuple[float, float]:
    """Pairwise precision/recall of instance sets; empty denominators give 0."""
    inter = len(i_eval & i_ref)
    qp = inter / len(i_eval) if i_eval else 0.0
    qr = inter / len(i_ref) if i_ref else 0.0
    return qp, qr


def query_fmeasure(i_eval: frozenset, i_ref: frozenset) -> float:
    """Harmonic mean of the pairwise precision and recall."""
    qp, qr = qp_qr(i_eval, i_ref)
    if qp + qr == 0.0:
        return 0.0
    return 2.0 * qp * qr / (qp + qr)


def compare(kind: str, i_eval: frozenset, i_ref: frozenset) -> float:
    """Instance-set comparison under the named function, into [0, 1]."""
    if kind == "classical":
        return 1.0 if i_eval == i_ref and i_ref else 0.0
    if kind == "recall_oriented":
        return qp_qr(i_eval, i_ref)[1]
    if kind == "precision_oriented":
        return qp_qr(i_eval, i_ref)[0]
    if kind == "overlap":
        if not i_eval or not i_ref:
            return 0.0
        return len(i_eval & i_ref) / min(len(i_eval), len(i_ref))
    if kind == "query_fmeasure":
        return query_fmeasure(i_eval, i_ref)
    raise ValueError(f"unknown comparison kind {kind!r}")


def normalize_answers(answers) -> frozenset:
    """Answer rows as comparable string tuples.

    IRIs and blanks compare by identifier, literals by trimmed lexical form.
    """

    def key(term):
        return term.value.strip() if term.is_literal else term.value

    return frozenset(tuple(key(t) for t in row) for row in answers)


class _FreshVars:
    def __init__(self):
        self.n = 0

    def next(self) -> Var:
        v = Var(f"x{self.n}")
        self.n += 1
        return v


def _realize_property_path(
    expr: Expression, start, end, fresh: _FreshVars
) -> list[TriplePattern]:
    """Patterns connecting start to end along a property expression."""
    if expr.kind == "property":
        return [TriplePattern(start, expr.iri, end)]
    if expr.kind == "inverse":
        inner = expr.children[0]
        if inner.kind != "property":
            raise ValueError("only direct properties can be inverted in realization")
        return [TriplePattern(end, inner.iri, start)]
    if expr.kind == "chain":
        patterns = []
        at = start
        for i, part in enumerate(expr.children):
            nxt = end if i == len(expr.children) - 1 else fresh.next()
            patterns.extend(_realize_property_path(part, at, nxt, fresh))
            at = nxt
        return patterns
    raise ValueError(f"{expr.kind} is not a property expression")


def _realize_class(expr: Expression, subject, fresh: _FreshVars) -> list[TriplePattern]:
    """Patterns asserting that subject belongs to a class expression."""
    if expr.kind == "class":
        return [TriplePattern(subject, RDF_TYPE, expr.iri)]
    if expr.kind == "intersection":
        patterns = []
        for child in expr.children:
            patterns.extend(_realize_class(child, subject, fresh))
        return patterns
    if expr.kind == "some_values_from":
        prop, filler = expr.children
        if filler.kind == "has_value":
            return _realize_property_path(prop, subject, filler.value, fresh)
        x = fresh.next()
        return _realize_property_path(prop, subject, x, fresh) + _realize_class(
            filler, x, fresh
        )
    raise ValueError(f"{expr.kind} is not realizable as a class pattern")


def realize_expression(expr: Expression) -> AlignmentQuery:
    """The SELECT query whose answers are the expression's instances."""
    fresh = _FreshVars()
    if expr.is_property_expr:
        s, o = Var("s"), Var("o")
        patterns = _realize_property_path(expr, s, o, fresh)
        return AlignmentQuery((s, o), tuple(patterns), distinct=True)
    s = Var("s")
    patterns = _realize_class(expr, s, fresh)
    return AlignmentQuery((s,), tuple(patterns), distinct=True)


def _class_atoms(expr: Expression) -> frozenset[Expression] | None:
    if expr.kind == "class":
        return frozenset((expr,))
    if expr.kind == "intersection" and all(c.kind == "class" for c in expr.children):
        return frozenset(expr.children)
    return None


def _query_class_atoms(query: AlignmentQuery) -> frozenset[Expression]:
    from .alignment import class_expr

    var = query.select_vars[0]
    return frozenset(
        class_expr(p.o)
        for p in query.patterns
        if p.s == var and p.p == RDF_TYPE and not isinstance(p.o, Var) and p.o.is_iri
    )


def _applicable(corr_source: Expression, query: AlignmentQuery) -> bool:
    """Whether a correspondence's source side covers the query."""
    from .alignment import source_expression

    if query.arity == 1:
        if corr_source.is_property_expr:
            return False
        atoms = _class_atoms(corr_source)
        if atoms is None:
            # Non-atomic source sides apply only on exact expression match.
            return corr_source == source_expression(query)
        return atoms <= _query_class_atoms(query)
    if not corr_source.is_property_expr:
        return False
    return corr_source == source_expression(query)


def rewrite(
    query_source: AlignmentQuery, alignment: Alignment, gs: KnowledgeGraph
) -> list[AlignmentQuery]:
    """Target-vocabulary queries realizing every applicable correspondence.

    Order follows the alignment's correspondence order; duplicates (by
    canonical text) keep the first occurrence.
    """
    out: list[AlignmentQuery] = []
    seen: set[str] = set()
    for corr in alignment.correspondences:
        if not _applicable(corr.source_expr, query_source):
            continue
        if corr.target_expr.is_property_expr != (query_source.arity == 2):
            continue
        try:
            q = realize_expression(corr.target_expr)
        except ValueError:
            logger.warning("unrealizable target expression %s", corr.target_expr.text())
            continue
        text = format_query(q)
        if text not in seen:
            seen.add(text)
            out.append(q)
    return out


def best_rewriting(
    query_source: AlignmentQuery,
    query_target: AlignmentQuery,
    alignment: Alignment,
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
) -> tuple[AlignmentQuery | None, float]:
    """The rewriting maximizing query f-measure against the reference answers.

    Ties keep the earliest rewriting; no rewritings give (None, 0).
    """
    reference = normalize_answers(evaluate(query_target, gt))
    best: AlignmentQuery | None = None
    best_f = 0.0
    for q in rewrite(query_source, alignment, gs):
        f = query_fmeasure(normalize_answers(evaluate(q, gt)), reference)
        if best is None or f > best_f:
            best, best_f = q, f
    if best is None:
        return None, 0.0
    return best, best_f


def coverage(
    alignment: Alignment,
    query_pairs: list[QueryPair],
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
    kind: str,
) -> float:
    """Mean comparison score of best-rewriting answers vs reference answers."""
    if not query_pairs:
        raise ValueError("coverage needs at least one query pair")
    total = 0.0
    for pair in query_pairs:
        best, _ = best_rewriting(pair.query_source, pair.query_target, alignment, gs, gt)
        got = normalize_answers(evaluate(best, gt)) if best is not None else frozenset()
        ref = normalize_answers(evaluate(pair.query_target, gt))
        total += compare(kind, got, ref)
    return total / len(query_pairs)


def precision(
    alignment: Alignment, gs: KnowledgeGraph, gt: KnowledgeGraph, kind: str
) -> float:
    """Mean comparison score between the two sides of each correspondence."""
    if not alignment.correspondences:
        logger.warning("precision of an empty alignment is 0")
        return 0.0
    total = 0.0
    for corr in alignment.correspondences:
        try:
            i_src = normalize_answers(evaluate(realize_expression(corr.source_expr), gs))
        except ValueError:
            i_src = frozenset()
        try:
            i_tgt = normalize_answers(evaluate(realize_expression(corr.target_expr), gt))
        except ValueError:
            i_tgt = frozenset()
        total += compare(kind, i_src, i_tgt)
    return total / len(alignment.correspondences)


def load_query_pairs(directory: str | Path) -> list[QueryPair]:
    """Read q.source.rq / q.target.rq file pairs from a directory, sorted by id."""
    directory = Path(directory)
    pairs = []
    for source_path in sorted(directory.glob("*.source.rq")):
        pair_id = source_path.name[: -len(".source.rq")]
        target_path = directory / f"{pair_id}.target.rq"
        if not target_path.exists():
            raise FileNotFoundError(f"missing target query for pair {pair_id}")
        pairs.append(
            QueryPair(
                pair_id,
                parse_query(source_path.read_text(encoding="utf-8")),
                parse_query(target_path.read_text(encoding="utf-8")),
            )
        )
    if not pairs:
        raise FileNotFoundError(f"no *.source.rq files in {directory}")
    return pairs


def evaluate_alignment(
    alignment: Alignment,
    query_pairs: list[QueryPair],
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
) -> EvaluationReport:
    """Coverage and precision across all comparison kinds, plus per-query detail.

    The best rewriting is always selected by query f-measure; the other kinds
    re-score that selection.
    """
    per_query = []
    sums = {kind: 0.0 for kind in COMPARE_KINDS}
    for pair in query_pairs:
        best, _ = best_rewriting(pair.query_source, pair.query_target, alignment, gs, gt)
        got = normalize_answers(evaluate(best, gt)) if best is not None else frozenset()
        ref = normalize_answers(evaluate(pair.query_target, gt))
        fvalues = {kind: compare(kind, got, ref) for kind in COMPARE_KINDS}
        for kind in COMPARE_KINDS:
            sums[kind] += fvalues[kind]
        per_query.append(
            PerQueryResult(
                pair.pair_id, format_query(best) if best is not None else None, fvalues
            )
        )
    n = len(query_pairs)
    if alignment.correspondences:
        precision_values = {kind: precision(alignment, gs, gt, kind) for kind in COMPARE_KINDS}
    else:
        logger.warning("precision of an empty alignment is 0")
        precision_values = {kind: 0.0 for kind in COMPARE_KINDS}
    report = EvaluationReport(
        per_query=per_query,
        coverage={kind: sums[kind] / n for kind in COMPARE_KINDS} if n else {},
        precision=precision_values,
        metadata={
            "overlap_definition": "intersection over the smaller set",
            "best_rewriting_selector": "query_fmeasure",
        },
    )
    return report


def report_to_json(report: EvaluationReport) -> dict:
    return {
        "metadata": report.metadata,
        "coverage": report.coverage,
        "precision": report.precision,
        "per_query": [
            {
                "query_id": r.query_id,
                "best_rewriting": r.best_rewriting,
                "fvalues": r.fvalues,
            }
            for r in report.per_query
        ],
    }


_COLUMNS = ("classical", "recall_oriented", "precision_oriented", "overlap", "query_fmeasure")
_HEADERS = ("cls", "rec.", "prec.", "ovlp", "f-m.")


def format_report_table(report: EvaluationReport) -> str:
    """Plain-text table with one row for coverage and one for precision."""
    width = 10
    lines = [
        "metric".ljust(width) + "".join(h.rjust(width) for h in _HEADERS),
    ]
    for name, values in (("coverage", report.coverage), ("precision", report.precision)):
        cells = "".join(f"{values.get(kind, 0.0):{width}.4f}" for kind in _COLUMNS)
        lines.append(name.ljust(width) + cells)
    return "\n".join(lines) + "\n"


def write_report(report: EvaluationReport, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "evaluation.json"
    json_path.write_text(
        json.dumps(report_to_json(report), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    table_path = out_dir / "evaluation.txt"
    table_path.write_text(format_report_table(report), encoding="utf-8")
    return json_path, table_path
