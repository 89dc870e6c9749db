"""Shared fixtures: toy ontology pairs, embedding caches, and query sets.

The terminal summary prints one PASS/FAIL line per acceptance test so the
acceptance surface is auditable at a glance.
"""
import textwrap

import pytest

from kgmatch.embeddings import load_store
from kgmatch.kg import load_graph

SRC = "http://example.org/src#"
TGT = "http://example.org/tgt#"

SOURCE_TTL = """
@prefix : <http://example.org/src#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

:AcceptedPaper a owl:Class ; rdfs:label "accepted paper" .
:paper1 a :AcceptedPaper ; rdfs:label "Paper One" ; owl:sameAs <http://example.org/tgt#doc1> .
:paper2 a :AcceptedPaper ; rdfs:label "Paper Two" ; owl:sameAs <http://example.org/tgt#doc2> .
"""

TARGET_TTL = """
@prefix : <http://example.org/tgt#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

:Paper a owl:Class ; rdfs:label "paper" .
:Acceptance a owl:Class ; rdfs:label "acceptance" .
:doc1 a :Paper ; rdfs:label "Document One" ; :hasDecision :acc1 .
:doc2 a :Paper ; rdfs:label "Document Two" ; :hasDecision :acc2 .
:acc1 a :Acceptance ; rdfs:label "acceptance of one" .
:acc2 a :Acceptance ; rdfs:label "acceptance of two" .
:hasDecision rdfs:label "has decision" .
"""

# Integer vectors with equal squared norms keep every cosine an exact
# small-integer ratio, so scaling the cache preserves results bit for bit.
CACHE_TSV = "\n".join(
    [
        "accepted paper\t3 4 0",
        "acceptance\t3 4 0",
        "acceptance of one\t3 4 0",
        "acceptance of two\t3 4 0",
        "has decision\t0 0 5",
        "paper\t4 3 0",
        "Document One\t5 0 0",
        "Document Two\t0 5 0",
    ]
) + "\n"

QUERY_SOURCE = """
PREFIX src: <http://example.org/src#>
SELECT DISTINCT ?p WHERE { ?p a src:AcceptedPaper . }
"""

QUERY_TARGET = """
PREFIX tgt: <http://example.org/tgt#>
SELECT DISTINCT ?p WHERE { ?p tgt:hasDecision ?d . ?d a tgt:Acceptance . }
"""


def materialize_pair(tmp_path, source_ttl, target_ttl, cache_tsv, query_files):
    """Write a fixture pair to disk and load it."""
    source = tmp_path / "source.ttl"
    target = tmp_path / "target.ttl"
    cache = tmp_path / "cache.tsv"
    queries = tmp_path / "queries"
    queries.mkdir()
    source.write_text(textwrap.dedent(source_ttl), encoding="utf-8")
    target.write_text(textwrap.dedent(target_ttl), encoding="utf-8")
    cache.write_text(cache_tsv, encoding="utf-8")
    for name, text in query_files.items():
        (queries / name).write_text(textwrap.dedent(text), encoding="utf-8")
    return {
        "source": source,
        "target": target,
        "cache": cache,
        "queries": queries,
        "out": tmp_path / "out",
        "gs": load_graph([source]),
        "gt": load_graph([target]),
        "store": load_store(cache),
    }


@pytest.fixture
def paper_pair(tmp_path):
    """The accepted-paper fixture: files on disk plus loaded graphs."""
    return materialize_pair(
        tmp_path,
        SOURCE_TTL,
        TARGET_TTL,
        CACHE_TSV,
        {"q01.source.rq": QUERY_SOURCE, "q01.target.rq": QUERY_TARGET},
    )


REVIEW_SOURCE_TTL = """
@prefix : <http://example.org/src#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

:Review a owl:Class ; rdfs:label "review" .
:rev1 a :Review ; owl:sameAs <http://example.org/tgt#note1> .
:rev2 a :Review ; owl:sameAs <http://example.org/tgt#note2> .
"""

REVIEW_TARGET_TTL = """
@prefix : <http://example.org/tgt#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

:Reviewer a owl:Class ; rdfs:label "reviewer" .
:note1 a :Reviewer ; rdfs:label "comment one" .
:note2 a :Reviewer ; rdfs:label "comment two" .
"""

# "review"/"reviewer" are 0.75 similar by edit distance but orthogonal as
# vectors, so the string baseline and the embedding settings disagree.
REVIEW_CACHE_TSV = "\n".join(
    [
        "review\t3 4 0",
        "reviewer\t4 -3 0",
        "comment one\t0 0 5",
        "comment two\t0 0 5",
    ]
) + "\n"

REVIEW_QUERY_SOURCE = """
PREFIX src: <http://example.org/src#>
SELECT DISTINCT ?r WHERE { ?r a src:Review . }
"""

REVIEW_QUERY_TARGET = """
PREFIX tgt: <http://example.org/tgt#>
SELECT DISTINCT ?n WHERE { ?n a tgt:Reviewer . }
"""


@pytest.fixture
def review_pair(tmp_path):
    """Near-string false friend: Review vs Reviewer."""
    return materialize_pair(
        tmp_path,
        REVIEW_SOURCE_TTL,
        REVIEW_TARGET_TTL,
        REVIEW_CACHE_TSV,
        {"q01.source.rq": REVIEW_QUERY_SOURCE, "q01.target.rq": REVIEW_QUERY_TARGET},
    )


IE_SOURCE_TTL = """
@prefix : <http://example.org/src#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

:Submission a owl:Class ; rdfs:label "submission" .
:sub1 a :Submission ; rdfs:label "alpha draft" .
"""

IE_TARGET_TTL = """
@prefix : <http://example.org/tgt#> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

:Article a owl:Class ; rdfs:label "article" .
:Acceptance a owl:Class ; rdfs:label "approval" .
:art1 a :Article ; rdfs:label "alpha manuscript" ; :hasDecision :acc1 .
:acc1 a :Acceptance ; rdfs:label "approval" .
:hasDecision rdfs:label "has decision" .
"""

# No linking predicates and no shared labels: only the embedding stage can
# link sub1 to art1, at cosine exactly 24/25.  Dimensions 1-2 carry the
# class/decision vocabulary and 3-4 the instance names, so the best
# instance-label cell (0.96) beats every class-label cell.
IE_CACHE_TSV = "\n".join(
    [
        "submission\t3 4 0 0",
        "alpha draft\t0 0 4 3",
        "alpha manuscript\t0 0 3 4",
        "article\t0 0 0 5",
        "approval\t3 4 0 0",
        "has decision\t0 0 0 5",
    ]
) + "\n"

IE_QUERY_SOURCE = """
PREFIX src: <http://example.org/src#>
SELECT DISTINCT ?s WHERE { ?s a src:Submission . }
"""

IE_QUERY_TARGET = """
PREFIX tgt: <http://example.org/tgt#>
SELECT DISTINCT ?a WHERE { ?a tgt:hasDecision ?d . ?d a tgt:Acceptance . }
"""


@pytest.fixture
def ie_pair(tmp_path):
    """Pair whose instances are only reachable through embedding linking."""
    return materialize_pair(
        tmp_path,
        IE_SOURCE_TTL,
        IE_TARGET_TTL,
        IE_CACHE_TSV,
        {"q01.source.rq": IE_QUERY_SOURCE, "q01.target.rq": IE_QUERY_TARGET},
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call":
                continue
            if "test_acceptance.py" not in str(getattr(report, "nodeid", "")):
                continue
            name = report.nodeid.split("::")[-1]
            label = name.removeprefix("test_").replace("_", " ")
            verdict = "PASS" if outcome == "passed" else "FAIL"
            lines.append(f"[acceptance] {label}: {verdict}")
    if lines:
        terminalreporter.write_line("")
        for line in sorted(lines):
            terminalreporter.write_line(line)
