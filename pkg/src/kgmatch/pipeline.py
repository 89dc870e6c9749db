"""End-to-end matching runs: query in, correspondences and manifest out.

Per query: evaluate on the source graph, link the answer instances into the
target graph, extract and score the surrounding subgraphs, and aggregate
into correspondences.  Per pair: merge across queries and serialize.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .alignment import (
    Alignment,
    Correspondence,
    aggregate,
    source_expression,
    write_alignment,
)
from .embeddings import EmbeddingStore, load_store
from .kg import DEFAULT_LABEL_PREDICATES, KnowledgeGraph, load_graph
from .linking import DEFAULT_LINKING_PREDICATES, NoCommonInstance, link_all
from .similarity import (
    ScoredSubgraph,
    SimilaritySetting,
    query_embedding,
    score_baseline,
    score_esq,
    score_les,
    score_se,
    triple_embedding,
    path_embedding,
)
from .sparql import AlignmentQuery, evaluate, parse_query, query_entities
from .subgraphs import (
    TripleSubgraph,
    extract_binary,
    extract_unary,
    path_subgraph_labels,
    triple_subgraph_labels,
)
from .terms import Term

logger = logging.getLogger(__name__)

PIPELINE_STEPS = (
    "parse",
    "evaluate",
    "link",
    "extract",
    "score",
    "aggregate",
    "serialize",
)


@dataclass
class MatchRunConfig:
    source: str | Path
    target: str | Path
    queries: str | Path
    output_dir: str | Path
    setting: SimilaritySetting = dc_field(default_factory=lambda: SimilaritySetting("baseline"))
    embeddings: str | Path | None = None
    ie_enabled: bool = False
    link_threshold: float = 0.8
    max_path_length: int = 3
    min_score: float | None = None
    label_predicates: tuple[str, ...] = DEFAULT_LABEL_PREDICATES
    linking_predicates: tuple[Term, ...] = DEFAULT_LINKING_PREDICATES
    formats: tuple[str, ...] = ("json",)
    model_tag: str = ""

    def __post_init__(self):
        if not 0.0 <= self.link_threshold <= 1.0:
            raise ValueError("link threshold outside [0, 1]")
        if self.max_path_length < 1:
            raise ValueError("max path length must be at least 1")
        if self.setting.uses_embeddings and self.embeddings is None:
            raise ValueError(f"setting {self.setting.kind!r} needs an embedding cache")

    @property
    def effective_min_score(self) -> float:
        return self.setting.threshold if self.min_score is None else self.min_score


@dataclass
class QueryRunDetail:
    query_id: str
    correspondences: list[Correspondence]
    answer_count: int = 0
    linked_row_count: int = 0
    subgraph_count: int = 0
    link_method_counts: dict = dc_field(default_factory=dict)
    timings: dict = dc_field(default_factory=dict)
    skipped: str | None = None


def gather_query_labels(q: AlignmentQuery, gs: KnowledgeGraph) -> list[str]:
    """Labels of the query's entities, deduplicated in first-occurrence order."""
    labels: list[str] = []
    for entity in query_entities(q):
        labels.extend(gs.labels_of(entity))
    return list(dict.fromkeys(labels))


def _score_subgraphs(
    subgraphs: list,
    query_labels: list[str],
    query_emb,
    gt: KnowledgeGraph,
    store: EmbeddingStore | None,
    setting: SimilaritySetting,
) -> list[ScoredSubgraph]:
    """Score under the configured setting, keeping positive scores only."""
    scored = []
    for sg in subgraphs:
        unary = isinstance(sg, TripleSubgraph)
        if setting.kind == "se":
            sg_emb = (
                triple_embedding(sg, gt, store) if unary else path_embedding(sg, gt, store)
            )
            if sg_emb is None:
                continue
            detail = score_se(query_emb, sg_emb, setting)
        else:
            labels = (
                triple_subgraph_labels(sg, gt) if unary else path_subgraph_labels(sg, gt)
            )
            if setting.kind == "baseline":
                detail = score_baseline(query_labels, labels, setting)
            elif setting.kind == "les":
                detail = score_les(query_labels, labels, store, setting)
            else:
                detail = score_esq(query_emb, labels, store, setting)
        if detail.score > 0.0:
            scored.append(ScoredSubgraph(sg, detail.score, detail.contributing))
    return scored


def run_query_detailed(
    query_id: str,
    q: AlignmentQuery,
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
    store: EmbeddingStore | None,
    cfg: MatchRunConfig,
) -> QueryRunDetail:
    detail = QueryRunDetail(query_id, [])
    timings = detail.timings
    setting = cfg.setting

    source_expr = source_expression(q)
    if source_expr is None:
        logger.warning("query %s: no expressible source side; skipped", query_id)
        detail.skipped = "no source expression"
        return detail

    t0 = time.perf_counter()
    answers = evaluate(q, gs)
    timings["evaluate"] = time.perf_counter() - t0
    detail.answer_count = len(answers)
    if not answers:
        logger.warning("query %s: no answers on the source graph; skipped", query_id)
        detail.skipped = "no source answers"
        return detail

    query_labels = gather_query_labels(q, gs)
    query_emb = None
    if setting.uses_embeddings:
        query_emb = query_embedding(query_labels, store)
        if query_emb is None and setting.kind in ("esq", "se"):
            logger.warning("query %s: no query label has a vector; skipped", query_id)
            detail.skipped = "unresolvable query labels"
            return detail

    t0 = time.perf_counter()
    try:
        linked = link_all(
            answers,
            gs,
            gt,
            store=store,
            ie_enabled=cfg.ie_enabled,
            link_threshold=cfg.link_threshold,
            ignore_case=setting.ignore_case,
            linking_predicates=cfg.linking_predicates,
        )
    except NoCommonInstance:
        timings["link"] = time.perf_counter() - t0
        logger.warning("query %s: no common instances; skipped", query_id)
        detail.skipped = "no common instances"
        return detail
    timings["link"] = time.perf_counter() - t0
    detail.linked_row_count = len(linked)
    for per_position in linked.values():
        for links in per_position:
            for link in links:
                name = link.method.value
                detail.link_method_counts[name] = detail.link_method_counts.get(name, 0) + 1

    t0 = time.perf_counter()
    per_row_subgraphs = []
    type_emb = query_emb if setting.uses_embeddings else None
    for row, per_position in linked.items():
        if q.arity == 1:
            for link in per_position[0]:
                sgs = extract_unary(link.target_instance, gt, type_emb, store)
                per_row_subgraphs.append((row, sgs))
        else:
            for link0 in per_position[0]:
                for link1 in per_position[1]:
                    sgs = extract_binary(
                        (link0.target_instance, link1.target_instance),
                        gt,
                        cfg.max_path_length,
                    )
                    per_row_subgraphs.append((row, sgs))
    timings["extract"] = time.perf_counter() - t0
    detail.subgraph_count = sum(len(sgs) for _, sgs in per_row_subgraphs)

    t0 = time.perf_counter()
    scored: list[tuple[tuple[Term, ...], ScoredSubgraph]] = []
    for row, sgs in per_row_subgraphs:
        for ssg in _score_subgraphs(sgs, query_labels, query_emb, gt, store, setting):
            scored.append((row, ssg))
    timings["score"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    detail.correspondences = aggregate(q, source_expr, scored, cfg.effective_min_score)
    timings["aggregate"] = time.perf_counter() - t0
    return detail


def run_query(
    q: AlignmentQuery,
    gs: KnowledgeGraph,
    gt: KnowledgeGraph,
    store: EmbeddingStore | None,
    cfg: MatchRunConfig,
) -> list[Correspondence]:
    """Correspondences for one query; skips (with a warning) rather than fails."""
    return run_query_detailed("query", q, gs, gt, store, cfg).correspondences


def load_queries(directory: str | Path) -> list[tuple[str, AlignmentQuery]]:
    """CQA files from a directory, sorted by file name.

    Directories holding evaluation pairs contribute their *.source.rq files;
    otherwise every *.rq file is a query.
    """
    directory = Path(directory)
    sources = sorted(directory.glob("*.source.rq"))
    if sources:
        return [
            (p.name[: -len(".source.rq")], parse_query(p.read_text(encoding="utf-8")))
            for p in sources
        ]
    plain = sorted(p for p in directory.glob("*.rq") if not p.name.endswith(".target.rq"))
    if not plain:
        raise FileNotFoundError(f"no *.rq files in {directory}")
    return [(p.stem, parse_query(p.read_text(encoding="utf-8"))) for p in plain]


def run_pair(cfg: MatchRunConfig) -> tuple[Alignment, dict]:
    """Run every query of the set and serialize the merged alignment.

    Returns the alignment and a manifest of timings and counts.  The
    alignment file is canonical; wall-clock data stays in the manifest.
    """
    started = time.time()
    timings = {step: 0.0 for step in PIPELINE_STEPS}

    t0 = time.perf_counter()
    gs = load_graph([cfg.source], cfg.label_predicates)
    gt = load_graph([cfg.target], cfg.label_predicates)
    store = None
    if cfg.embeddings is not None:
        store = load_store(cfg.embeddings, case_fold=cfg.setting.ignore_case)
    queries = load_queries(cfg.queries)
    timings["parse"] = time.perf_counter() - t0

    link_counts: dict[str, int] = {}
    query_stats = {}
    merged: dict[tuple, Correspondence] = {}
    for query_id, q in queries:
        detail = run_query_detailed(query_id, q, gs, gt, store, cfg)
        for step, value in detail.timings.items():
            timings[step] += value
        for method, count in detail.link_method_counts.items():
            link_counts[method] = link_counts.get(method, 0) + count
        query_stats[query_id] = {
            "answers": detail.answer_count,
            "linked_rows": detail.linked_row_count,
            "subgraphs": detail.subgraph_count,
            "correspondences": len(detail.correspondences),
            "skipped": detail.skipped,
        }
        for corr in detail.correspondences:
            key = (corr.source_expr, corr.target_expr)
            existing = merged.get(key)
            if existing is None or corr.confidence > existing.confidence:
                merged[key] = corr

    correspondences = tuple(
        sorted(
            merged.values(),
            key=lambda c: (-c.confidence, c.source_expr.text(), c.target_expr.text()),
        )
    )
    alignment = Alignment(
        ontology_pair=(str(cfg.source), str(cfg.target)),
        correspondences=correspondences,
        provenance={
            "setting": cfg.setting.kind,
            "ignore_case": cfg.setting.ignore_case,
            "threshold": cfg.setting.threshold,
            "ie_enabled": cfg.ie_enabled,
            "link_threshold": cfg.link_threshold,
            "max_path_length": cfg.max_path_length,
            "min_score": cfg.effective_min_score,
            "model": cfg.model_tag,
            "aggregation": "sum of subgraph scores over distinct supporting rows",
        },
    )

    t0 = time.perf_counter()
    written = write_alignment(alignment, cfg.output_dir, set(cfg.formats))
    timings["serialize"] = time.perf_counter() - t0

    manifest = {
        "started_at": started,
        "wall_seconds": time.time() - started,
        "timings": timings,
        "link_method_counts": link_counts,
        "queries": query_stats,
        "correspondence_count": len(correspondences),
        "alignment_files": [str(p) for p in written],
        "config": {
            "source": str(cfg.source),
            "target": str(cfg.target),
            "queries": str(cfg.queries),
            "embeddings": None if cfg.embeddings is None else str(cfg.embeddings),
            "setting": cfg.setting.kind,
            "ignore_case": cfg.setting.ignore_case,
            "threshold": cfg.setting.threshold,
            "ie_enabled": cfg.ie_enabled,
            "link_threshold": cfg.link_threshold,
            "max_path_length": cfg.max_path_length,
            "min_score": cfg.effective_min_score,
        },
    }
    return alignment, manifest
