"""Query parser and evaluator tests.

The evaluator is checked against an index-free nested-loop join oracle that
scans the whole triple list for every pattern, on seeded random graphs and
queries.
"""
import numpy as np
import pytest

from kgmatch.kg import KnowledgeGraph
from kgmatch.sparql import (
    QuerySyntaxError,
    TriplePattern,
    UnsupportedFeature,
    Var,
    evaluate,
    format_query,
    parse_query,
    query_entities,
)
from kgmatch.terms import RDF_NS, Term, Triple

EX = "http://example.org/"


def nested_loop_answers(query, graph):
    """Independent oracle: no indexes, no pattern reordering."""

    def matches(pattern, binding):
        for t in graph.triples:
            trial = dict(binding)
            ok = True
            for node, value in ((pattern.s, t.subject), (pattern.p, t.predicate), (pattern.o, t.object)):
                if isinstance(node, Var):
                    if node in trial and trial[node] != value:
                        ok = False
                        break
                    trial[node] = value
                elif node != value:
                    ok = False
                    break
            if ok:
                yield trial

    bindings = [{}]
    for pattern in query.patterns:
        bindings = [b2 for b in bindings for b2 in matches(pattern, b)]
    return frozenset(tuple(b[v] for v in query.select_vars) for b in bindings)


def toy_graph():
    text_triples = [
        ("p1", "type", "Paper"),
        ("p2", "type", "Paper"),
        ("p1", "hasDecision", "acc1"),
        ("acc1", "type", "Acceptance"),
        ("p2", "hasDecision", "rej1"),
        ("rej1", "type", "Rejection"),
        ("r1", "reviews", "p1"),
    ]
    rdf_type = Term.iri(RDF_NS + "type")
    triples = []
    for s, p, o in text_triples:
        pred = rdf_type if p == "type" else Term.iri(EX + p)
        triples.append(Triple(Term.iri(EX + s), pred, Term.iri(EX + o)))
    return KnowledgeGraph(triples)


def test_parse_unary_query():
    q = parse_query(f"SELECT ?x WHERE {{ ?x a <{EX}Paper> }}")
    assert q.arity == 1
    assert q.select_vars == (Var("x"),)
    assert q.patterns[0].p == Term.iri(RDF_NS + "type")


def test_parse_binary_query_with_prefix():
    q = parse_query(
        "PREFIX ex: <http://example.org/>\nSELECT ?a ?b WHERE { ?a ex:hasDecision ?b . }"
    )
    assert q.arity == 2
    assert q.patterns[0].p == Term.iri(EX + "hasDecision")


def test_distinct_is_always_applied():
    q1 = parse_query(f"SELECT ?x WHERE {{ ?x a <{EX}Paper> }}")
    q2 = parse_query(f"SELECT DISTINCT ?x WHERE {{ ?x a <{EX}Paper> }}")
    g = toy_graph()
    assert evaluate(q1, g) == evaluate(q2, g)


def test_evaluate_unary_and_binary_on_toy_graph():
    g = toy_graph()
    q = parse_query(
        f"SELECT ?p WHERE {{ ?p <{EX}hasDecision> ?d . ?d a <{EX}Acceptance> }}"
    )
    assert evaluate(q, g) == frozenset({(Term.iri(EX + "p1"),)})
    qb = parse_query(f"SELECT ?p ?d WHERE {{ ?p <{EX}hasDecision> ?d }}")
    assert evaluate(qb, g) == frozenset(
        {
            (Term.iri(EX + "p1"), Term.iri(EX + "acc1")),
            (Term.iri(EX + "p2"), Term.iri(EX + "rej1")),
        }
    )


def random_graph_and_query(rng, n_entities=8, n_predicates=3, max_triples=80):
    """Random graph plus a connected 1-4 pattern query over it.

    Patterns form a chain anchored at ?s so every query parses; subjects and
    objects are drawn from chain variables or constants.
    """
    entities = [Term.iri(f"{EX}e{i}") for i in range(n_entities)]
    predicates = [Term.iri(f"{EX}q{i}") for i in range(n_predicates)]
    triples = [
        Triple(
            entities[rng.integers(n_entities)],
            predicates[rng.integers(n_predicates)],
            entities[rng.integers(n_entities)],
        )
        for _ in range(int(rng.integers(10, max_triples)))
    ]
    n_patterns = int(rng.integers(1, 5))
    chain = [Var("s")] + [Var(f"v{i}") for i in range(n_patterns)]
    patterns = []
    for i in range(n_patterns):
        pred = predicates[rng.integers(n_predicates)]
        # Last hop sometimes ends in a constant to vary the shapes.
        obj = chain[i + 1]
        if i == n_patterns - 1 and rng.random() < 0.3:
            obj = entities[rng.integers(n_entities)]
        if rng.random() < 0.5:
            patterns.append(TriplePattern(chain[i], pred, obj))
        else:
            patterns.append(TriplePattern(obj, pred, chain[i]) if isinstance(obj, Var) else TriplePattern(chain[i], pred, obj))
    select = "?s" if not any(chain[1] in (p.s, p.o) for p in patterns) else "?s ?v0"
    if n_patterns == 0 or not any(Var("v0") in (p.s, p.o) for p in patterns):
        select = "?s"
    text = f"SELECT {select} WHERE {{ " + " ".join(str(p) for p in patterns) + " }"
    return KnowledgeGraph(triples), parse_query(text)


def test_evaluate_matches_nested_loop_oracle_on_random_inputs():
    rng = np.random.default_rng(42)
    nonempty = 0
    for _ in range(60):
        g, q = random_graph_and_query(rng)
        expected = nested_loop_answers(q, g)
        assert evaluate(q, g) == expected
        nonempty += bool(expected)
    # The comparison is vacuous if every random query has no answers.
    assert nonempty >= 20


def test_pattern_reordering_does_not_change_answers():
    g = toy_graph()
    a = parse_query(
        f"SELECT ?p WHERE {{ ?p <{EX}hasDecision> ?d . ?d a <{EX}Acceptance> }}"
    )
    b = parse_query(
        f"SELECT ?p WHERE {{ ?d a <{EX}Acceptance> . ?p <{EX}hasDecision> ?d }}"
    )
    assert evaluate(a, g) == evaluate(b, g)


def test_adding_patterns_never_grows_answers():
    g = toy_graph()
    base = parse_query(f"SELECT ?p WHERE {{ ?p <{EX}hasDecision> ?d }}")
    narrowed = parse_query(
        f"SELECT ?p WHERE {{ ?p <{EX}hasDecision> ?d . ?d a <{EX}Acceptance> }}"
    )
    assert evaluate(narrowed, g) <= evaluate(base, g)


def test_format_query_round_trips():
    text = (
        "PREFIX ex: <http://example.org/>\n"
        'SELECT DISTINCT ?s WHERE { ?s ex:hasDecision ?d . ?d a ex:Acceptance . ?s ex:note "fine"@en }'
    )
    q = parse_query(text)
    assert parse_query(format_query(q)) == q


def test_query_entities_order_and_type_exclusion():
    q = parse_query(
        f"SELECT ?x WHERE {{ ?x a <{EX}Paper> . ?x <{EX}hasDecision> <{EX}acc> }}"
    )
    assert query_entities(q) == [
        Term.iri(EX + "Paper"),
        Term.iri(EX + "hasDecision"),
        Term.iri(EX + "acc"),
    ]


@pytest.mark.parametrize(
    "text",
    [
        f"SELECT ?x ?y ?z WHERE {{ ?x <{EX}p> ?y . ?y <{EX}p> ?z }}",
        f"SELECT * WHERE {{ ?x <{EX}p> ?y }}",
        f"SELECT ?x WHERE {{ ?x <{EX}p> ?y FILTER(?y > 3) }}",
        f"SELECT ?x WHERE {{ ?x <{EX}p> ?y OPTIONAL {{ ?x <{EX}q> ?z }} }}",
        f"SELECT ?x WHERE {{ ?x <{EX}p> ?y }} LIMIT 5",
        f"ASK {{ ?x <{EX}p> ?y }}",
        f"SELECT ?x WHERE {{ ?x <{EX}p> ?y }} ORDER BY ?x",
    ],
)
def test_unsupported_features_are_refused_by_name(text):
    with pytest.raises(UnsupportedFeature):
        parse_query(text)


@pytest.mark.parametrize(
    "text",
    [
        "SELECT WHERE { ?x <http://example.org/p> ?y }",
        f"SELECT ?x WHERE {{ }}",
        f"SELECT ?z WHERE {{ ?x <{EX}p> ?y }}",
        f"SELECT ?x WHERE {{ ?x <{EX}p> ?y . ?a <{EX}p> ?b }}",
        f"SELECT ?x WHERE {{ ?x <{EX}p> ?y",
    ],
)
def test_syntax_errors(text):
    with pytest.raises(QuerySyntaxError):
        parse_query(text)


def test_disconnected_variables_are_named():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query(f"SELECT ?x WHERE {{ ?x <{EX}p> ?y . ?a <{EX}p> ?b }}")
    assert "?a" in str(err.value) or "a" in str(err.value)


def test_literal_patterns_match_exactly():
    g = KnowledgeGraph(
        [
            Triple(Term.iri(EX + "s"), Term.iri(EX + "p"), Term.literal("5")),
            Triple(
                Term.iri(EX + "t"),
                Term.iri(EX + "p"),
                Term.literal("5", datatype="http://www.w3.org/2001/XMLSchema#integer"),
            ),
        ]
    )
    q = parse_query(f"SELECT ?x WHERE {{ ?x <{EX}p> 5 }}")
    assert evaluate(q, g) == frozenset({(Term.iri(EX + "t"),)})
