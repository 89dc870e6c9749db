"""Query-driven complex matching between knowledge graphs.

The package turns competency questions (small SPARQL queries) posed against
a source knowledge graph into complex correspondences with a target graph:
answers are linked across graphs, the surroundings of the linked instances
are extracted and scored lexically or via label embeddings, and surviving
subgraphs generalize into class and property expressions.  A query-rewriting
evaluator scores alignments against reference query pairs.
"""
from .alignment import (
    Alignment,
    Correspondence,
    Expression,
    aggregate,
    generalize_binary,
    generalize_unary,
    read_alignment,
    source_expression,
    write_alignment,
)
from .embeddings import (
    DimensionMismatch,
    EmbeddingStore,
    EmptyInput,
    FormatError,
    ZeroVector,
    cosine,
    load_store,
    mean_pool,
    write_store,
)
from .evaluation import (
    EvaluationReport,
    QueryPair,
    best_rewriting,
    compare,
    coverage,
    evaluate_alignment,
    load_query_pairs,
    precision,
    qp_qr,
    query_fmeasure,
    rewrite,
)
from .kg import KnowledgeGraph, load_graph, split_local_name
from .linking import (
    InstanceLink,
    LinkMethod,
    NoCommonInstance,
    link_all,
    link_by_embedding,
    link_by_predicate,
    link_by_string,
)
from .pipeline import MatchRunConfig, run_pair, run_query
from .rdf_parse import ParseError, parse_ntriples, parse_turtle
from .similarity import (
    ScoredSubgraph,
    SimilaritySetting,
    levenshtein_sim,
    path_embedding,
    query_embedding,
    score_baseline,
    score_esq,
    score_les,
    score_se,
    triple_embedding,
)
from .sparql import (
    AlignmentQuery,
    QuerySyntaxError,
    TriplePattern,
    UnsupportedFeature,
    Var,
    evaluate,
    format_query,
    parse_query,
    query_entities,
)
from .subgraphs import (
    AnchorPosition,
    Direction,
    PathSubgraph,
    TripleSubgraph,
    extract_binary,
    extract_unary,
    select_type,
)
from .terms import Term, Triple

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "AlignmentQuery",
    "AnchorPosition",
    "Correspondence",
    "DimensionMismatch",
    "Direction",
    "EmbeddingStore",
    "EmptyInput",
    "EvaluationReport",
    "Expression",
    "FormatError",
    "InstanceLink",
    "KnowledgeGraph",
    "LinkMethod",
    "MatchRunConfig",
    "NoCommonInstance",
    "ParseError",
    "PathSubgraph",
    "QueryPair",
    "QuerySyntaxError",
    "ScoredSubgraph",
    "SimilaritySetting",
    "Term",
    "Triple",
    "TriplePattern",
    "TripleSubgraph",
    "UnsupportedFeature",
    "Var",
    "ZeroVector",
    "aggregate",
    "best_rewriting",
    "compare",
    "cosine",
    "coverage",
    "evaluate",
    "evaluate_alignment",
    "extract_binary",
    "extract_unary",
    "format_query",
    "generalize_binary",
    "generalize_unary",
    "levenshtein_sim",
    "link_all",
    "link_by_embedding",
    "link_by_predicate",
    "link_by_string",
    "load_graph",
    "load_query_pairs",
    "load_store",
    "mean_pool",
    "parse_ntriples",
    "parse_query",
    "parse_turtle",
    "path_embedding",
    "precision",
    "qp_qr",
    "query_embedding",
    "query_entities",
    "query_fmeasure",
    "read_alignment",
    "rewrite",
    "run_pair",
    "run_query",
    "score_baseline",
    "score_esq",
    "score_les",
    "score_se",
    "select_type",
    "source_expression",
    "split_local_name",
    "triple_embedding",
    "write_alignment",
    "write_store",
]
