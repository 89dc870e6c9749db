"""Instance-linking cascade tests.

The embedding stage is checked against a brute-force scan that builds the
full source-label x target-label cosine matrix with numpy and takes its
argmax independently.
"""
import numpy as np
import pytest

from kgmatch.embeddings import EmbeddingStore, cosine
from kgmatch.kg import KnowledgeGraph
from kgmatch.linking import (
    DEFAULT_LINKING_PREDICATES,
    InstanceLink,
    LinkMethod,
    NoCommonInstance,
    link_all,
    link_by_embedding,
    link_by_predicate,
    link_by_string,
    link_instance,
)
from kgmatch.terms import OWL_NS, RDF_TYPE, RDFS_NS, Term, Triple

SRC = "http://source.example/"
TGT = "http://target.example/"
LABEL = Term.iri(RDFS_NS + "label")
SAME_AS = Term.iri(OWL_NS + "sameAs")
SEE_ALSO = Term.iri(RDFS_NS + "seeAlso")


def s_iri(name):
    return Term.iri(SRC + name)


def t_iri(name):
    return Term.iri(TGT + name)


def labelled_target(*instances):
    """Target graph with one typed, labelled instance per (name, label) pair."""
    triples = []
    cls = t_iri("Thing")
    for name, label in instances:
        triples.append(Triple(t_iri(name), RDF_TYPE, cls))
        triples.append(Triple(t_iri(name), LABEL, Term.literal(label)))
    return KnowledgeGraph(triples)


# link_by_predicate ------------------------------------------------------


def test_predicate_link_direct_and_inverse():
    gt = labelled_target(("a", "alpha"))
    gs_direct = KnowledgeGraph([Triple(s_iri("x"), SAME_AS, t_iri("a"))])
    got = link_by_predicate(s_iri("x"), gs_direct, gt)
    assert got == [InstanceLink(s_iri("x"), t_iri("a"), LinkMethod.PREDICATE, 1.0)]

    gs_inverse = KnowledgeGraph([Triple(t_iri("a"), SEE_ALSO, s_iri("x"))])
    got = link_by_predicate(s_iri("x"), gs_inverse, gt)
    assert got == [InstanceLink(s_iri("x"), t_iri("a"), LinkMethod.PREDICATE, 1.0)]


def test_predicate_link_requires_target_occurrence():
    gt = labelled_target(("a", "alpha"))
    gs = KnowledgeGraph([Triple(s_iri("x"), SAME_AS, t_iri("ghost"))])
    assert link_by_predicate(s_iri("x"), gs, gt) == []


def test_predicate_link_statement_may_live_in_target_graph():
    gt = KnowledgeGraph(
        [
            Triple(t_iri("a"), RDF_TYPE, t_iri("Thing")),
            Triple(t_iri("a"), SAME_AS, s_iri("x")),
        ]
    )
    gs = KnowledgeGraph([])
    got = link_by_predicate(s_iri("x"), gs, gt)
    assert [l.target_instance for l in got] == [t_iri("a")]


def test_predicate_link_sorted_deduplicated():
    gt = labelled_target(("b", "beta"), ("a", "alpha"))
    gs = KnowledgeGraph(
        [
            Triple(s_iri("x"), SAME_AS, t_iri("b")),
            Triple(s_iri("x"), SEE_ALSO, t_iri("a")),
            Triple(s_iri("x"), SEE_ALSO, t_iri("b")),
        ]
    )
    got = link_by_predicate(s_iri("x"), gs, gt)
    assert [l.target_instance for l in got] == [t_iri("a"), t_iri("b")]


# link_by_string ---------------------------------------------------------


def test_string_link_exact_trimmed():
    gt = labelled_target(("a", "Accepted Paper"), ("b", "Rejected Paper"))
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("  Accepted Paper "))])
    got = link_by_string(s_iri("x"), gs, gt)
    assert [l.target_instance for l in got] == [t_iri("a")]
    assert got[0].method is LinkMethod.EXACT_STRING
    assert got[0].score == 1.0


def test_string_link_case_sensitivity_flag():
    gt = labelled_target(("a", "accepted paper"))
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("Accepted Paper"))])
    assert link_by_string(s_iri("x"), gs, gt) == []
    got = link_by_string(s_iri("x"), gs, gt, ignore_case=True)
    assert [l.target_instance for l in got] == [t_iri("a")]


def test_string_link_only_considers_typed_instances():
    # u has a matching label but no rdf:type, so it is not an instance
    gt = KnowledgeGraph([Triple(t_iri("u"), LABEL, Term.literal("match me"))])
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("match me"))])
    assert link_by_string(s_iri("x"), gs, gt) == []


# link_by_embedding ------------------------------------------------------


def embedding_argmax_oracle(src, gs, gt, store, threshold):
    """Full matrix with numpy, argmax over (similarity, -lexicographic)."""
    src_vecs = [store.lookup(x) for x in gs.labels_of(src)]
    src_vecs = [v for v in src_vecs if v is not None]
    best = None
    for inst in gt.instances():
        vecs = [store.lookup(x) for x in gt.labels_of(inst)]
        vecs = [v for v in vecs if v is not None]
        if not vecs or not src_vecs:
            continue
        mat = np.array([[cosine(a, b) for b in vecs] for a in src_vecs])
        top = float(mat.max())
        if best is None or top > best[0] or (top == best[0] and inst.value < best[1].value):
            best = (top, inst)
    if best is None or best[0] <= threshold:
        return None
    return best


def random_linking_setup(rng):
    labels = [f"word {i}" for i in range(12)]
    store = EmbeddingStore(
        entries={lb: rng.standard_normal(4) for lb in labels}, dim=4
    )
    gs_triples = []
    src = s_iri("inst")
    for i in rng.choice(12, size=2, replace=False):
        gs_triples.append(Triple(src, LABEL, Term.literal(labels[i])))
    gt_triples = []
    for n in range(5):
        inst = t_iri(f"i{n}")
        gt_triples.append(Triple(inst, RDF_TYPE, t_iri("Thing")))
        for i in rng.choice(12, size=rng.integers(1, 3), replace=False):
            gt_triples.append(Triple(inst, LABEL, Term.literal(labels[i])))
    return src, KnowledgeGraph(gs_triples), KnowledgeGraph(gt_triples), store


def test_embedding_link_matches_matrix_oracle():
    rng = np.random.default_rng(61)
    linked = 0
    for _ in range(40):
        src, gs, gt, store = random_linking_setup(rng)
        threshold = float(rng.choice([0.0, 0.5, 0.8, 0.9]))
        got = link_by_embedding(src, gs, gt, store, threshold)
        want = embedding_argmax_oracle(src, gs, gt, store, threshold)
        if want is None:
            assert got is None
        else:
            assert got is not None
            assert got.target_instance == want[1]
            assert got.score == pytest.approx(want[0])
            assert got.method is LinkMethod.EMBEDDING
            linked += 1
    assert linked >= 10


def test_embedding_link_threshold_is_strict():
    store = EmbeddingStore(
        entries={"alpha": np.array([4.0, 3.0, 0.0]), "beta": np.array([3.0, 4.0, 0.0])},
        dim=3,
    )
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("alpha"))])
    gt = labelled_target(("a", "beta"))
    # cos([4,3,0],[3,4,0]) = 24/25 exactly
    got = link_by_embedding(s_iri("x"), gs, gt, store, 0.9)
    assert got is not None and got.score == 0.96
    assert link_by_embedding(s_iri("x"), gs, gt, store, 0.96) is None


def test_embedding_link_tie_breaks_to_smaller_iri():
    store = EmbeddingStore(entries={"same": np.array([1.0, 0.0])}, dim=2)
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("same"))])
    gt = labelled_target(("zz", "same"), ("aa", "same"))
    got = link_by_embedding(s_iri("x"), gs, gt, store, 0.5)
    assert got.target_instance == t_iri("aa")


def test_embedding_link_unresolvable_labels_give_none():
    store = EmbeddingStore(entries={"other": np.array([1.0, 0.0])}, dim=2)
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("unseen"))])
    gt = labelled_target(("a", "other"))
    assert link_by_embedding(s_iri("x"), gs, gt, store, 0.0) is None


# cascade ----------------------------------------------------------------


def test_cascade_predicate_suppresses_string_stage():
    """Both routes would fire; only the predicate link may come out."""
    gt = labelled_target(("by_string", "shared label"), ("by_pred", "unrelated"))
    gs = KnowledgeGraph(
        [
            Triple(s_iri("x"), LABEL, Term.literal("shared label")),
            Triple(s_iri("x"), SAME_AS, t_iri("by_pred")),
        ]
    )
    # both stages would individually produce a link
    assert link_by_string(s_iri("x"), gs, gt) != []
    assert link_by_predicate(s_iri("x"), gs, gt) != []
    got = link_instance(s_iri("x"), gs, gt)
    assert [l.target_instance for l in got] == [t_iri("by_pred")]
    assert {l.method for l in got} == {LinkMethod.PREDICATE}


def test_cascade_string_suppresses_embedding_stage():
    store = EmbeddingStore(
        entries={"shared label": np.array([1.0, 0.0]), "near label": np.array([1.0, 0.1])},
        dim=2,
    )
    gt = labelled_target(("by_string", "shared label"), ("by_emb", "near label"))
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("shared label"))])
    got = link_instance(s_iri("x"), gs, gt, store=store, ie_enabled=True, link_threshold=0.0)
    assert [l.target_instance for l in got] == [t_iri("by_string")]


def test_cascade_embedding_requires_flag():
    store = EmbeddingStore(
        entries={"alpha": np.array([1.0, 0.0]), "alpha prime": np.array([1.0, 0.05])},
        dim=2,
    )
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("alpha"))])
    gt = labelled_target(("a", "alpha prime"))
    assert link_instance(s_iri("x"), gs, gt, store=store, ie_enabled=False) == []
    got = link_instance(s_iri("x"), gs, gt, store=store, ie_enabled=True, link_threshold=0.5)
    assert [l.target_instance for l in got] == [t_iri("a")]


def test_literal_answers_link_by_value_only():
    lit = Term.literal("Document One")
    gt = KnowledgeGraph([Triple(t_iri("d"), LABEL, Term.literal(" Document One "))])
    got = link_instance(lit, KnowledgeGraph([]), gt)
    assert len(got) == 1
    assert got[0].target_instance == Term.literal(" Document One ")
    assert got[0].method is LinkMethod.EXACT_STRING


def test_literal_answers_never_use_embeddings():
    lit = Term.literal("Document One")
    store = EmbeddingStore(entries={"Document One": np.array([1.0, 0.0])}, dim=2)
    gt = labelled_target(("d", "Document Uno"))
    got = link_instance(lit, KnowledgeGraph([]), gt, store=store, ie_enabled=True, link_threshold=0.0)
    assert got == []


# link_all ---------------------------------------------------------------


def test_link_all_drops_rows_missing_any_position():
    gt = labelled_target(("a", "alpha"))
    gs = KnowledgeGraph(
        [
            Triple(s_iri("x"), LABEL, Term.literal("alpha")),
            Triple(s_iri("y"), LABEL, Term.literal("nothing like it")),
        ]
    )
    answers = {(s_iri("x"), s_iri("y")), (s_iri("x"), s_iri("x"))}
    linked = link_all(answers, gs, gt)
    assert set(linked) == {(s_iri("x"), s_iri("x"))}
    per_position = linked[(s_iri("x"), s_iri("x"))]
    assert len(per_position) == 2
    assert all(l.target_instance == t_iri("a") for links in per_position for l in links)


def test_link_all_raises_when_nothing_links():
    gt = labelled_target(("a", "alpha"))
    gs = KnowledgeGraph([Triple(s_iri("x"), LABEL, Term.literal("omega"))])
    with pytest.raises(NoCommonInstance):
        link_all({(s_iri("x"),)}, gs, gt)


def test_link_all_embedding_threshold_monotone():
    """Raising the threshold can only shrink the set of linked rows."""
    rng = np.random.default_rng(67)
    src, gs, gt, store = random_linking_setup(rng)
    answers = {(src,)}
    survivors = []
    for threshold in (0.0, 0.5, 0.8, 0.9, 0.99):
        try:
            linked = link_all(answers, gs, gt, store=store, ie_enabled=True, link_threshold=threshold)
            survivors.append(len(linked))
        except NoCommonInstance:
            survivors.append(0)
    assert survivors == sorted(survivors, reverse=True)


def test_default_linking_predicates_cover_sameas_and_seealso():
    values = {p.value for p in DEFAULT_LINKING_PREDICATES}
    assert OWL_NS + "sameAs" in values
    assert RDFS_NS + "seeAlso" in values
