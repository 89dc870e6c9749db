import pytest

from kgmatch.terms import RDF_NS, RDF_TYPE, Term, Triple

EX = "http://example.org/"


def test_iri_constructor_and_flags():
    t = Term.iri(EX + "a")
    assert t.is_iri and not t.is_literal and not t.is_blank
    assert t.value == EX + "a"


def test_literal_with_datatype_and_lang_are_exclusive():
    with pytest.raises(ValueError):
        Term.literal("x", datatype=EX + "dt", lang="en")


def test_iri_rejects_whitespace_and_empty():
    with pytest.raises(ValueError):
        Term.iri("http://example.org/a b")
    with pytest.raises(ValueError):
        Term.iri("")


def test_datatype_only_on_literals():
    with pytest.raises(ValueError):
        Term(Term.iri(EX).kind, EX + "a", datatype=EX + "dt")


def test_n3_forms():
    assert Term.iri(EX + "a").n3() == f"<{EX}a>"
    assert Term.blank("b1").n3() == "_:b1"
    assert Term.literal("hi").n3() == '"hi"'
    assert Term.literal("hi", lang="en").n3() == '"hi"@en'
    assert Term.literal("5", datatype=EX + "int").n3() == f'"5"^^<{EX}int>'


def test_n3_escapes_quotes_newlines_backslashes():
    lit = Term.literal('say "hi"\n\\done')
    text = lit.n3()
    assert text == '"say \\"hi\\"\\n\\\\done"'


def test_local_name_after_hash_and_slash():
    assert Term.iri(EX + "ns#AcceptedPaper").local_name() == "AcceptedPaper"
    assert Term.iri(EX + "path/Decision").local_name() == "Decision"


def test_sort_key_orders_blanks_iris_literals_deterministically():
    terms = [Term.literal("z"), Term.iri(EX + "a"), Term.blank("n")]
    ordered = sorted(terms, key=Term.sort_key)
    assert ordered == sorted(terms, key=Term.sort_key)
    assert len({t.kind for t in ordered}) == 3


def test_triple_rejects_literal_subject_and_non_iri_predicate():
    lit = Term.literal("x")
    iri = Term.iri(EX + "p")
    with pytest.raises(ValueError):
        Triple(lit, iri, iri)
    with pytest.raises(ValueError):
        Triple(iri, lit, iri)
    with pytest.raises(ValueError):
        Triple(iri, Term.blank("b"), iri)


def test_triple_allows_blank_subject_and_literal_object():
    t = Triple(Term.blank("b"), Term.iri(EX + "p"), Term.literal("x"))
    assert t.subject.is_blank and t.object.is_literal


def test_rdf_type_constant():
    assert RDF_TYPE == Term.iri(RDF_NS + "type")


def test_terms_are_hashable_and_equal_by_value():
    assert Term.iri(EX + "a") == Term.iri(EX + "a")
    assert len({Term.iri(EX + "a"), Term.iri(EX + "a")}) == 1
    assert Term.literal("a") != Term.literal("a", lang="en")
