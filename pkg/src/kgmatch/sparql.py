"""Restricted SPARQL SELECT parser and basic-graph-pattern evaluator.

Only unary and binary SELECT queries over a conjunctive triple block are
accepted.  FILTER, OPTIONAL, UNION, solution modifiers and non-SELECT query
forms raise UnsupportedFeature.  Answers always have set semantics.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .kg import KnowledgeGraph
from .rdf_parse import Tok, Token, Tokenizer
from .terms import RDF_NS, RDF_TYPE, Term, Triple


class QuerySyntaxError(Exception):
    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnsupportedFeature(Exception):
    def __init__(self, feature: str):
        self.feature = feature
        super().__init__(f"unsupported query feature: {feature}")


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternNode = Union[Term, Var]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    s: PatternNode
    p: PatternNode
    o: PatternNode

    def variables(self) -> list[Var]:
        return [x for x in (self.s, self.p, self.o) if isinstance(x, Var)]

    def __str__(self) -> str:
        return f"{_node_text(self.s)} {_node_text(self.p)} {_node_text(self.o)} ."


def _node_text(n: PatternNode) -> str:
    return str(n) if isinstance(n, Var) else n.n3()


@dataclass(frozen=True)
class AlignmentQuery:
    """A validated unary or binary SELECT query."""

    select_vars: tuple[Var, ...]
    patterns: tuple[TriplePattern, ...]
    distinct: bool
    source_text: str = field(compare=False, default="")

    @property
    def arity(self) -> int:
        return len(self.select_vars)


# answers are sets of 1- or 2-tuples of terms
AnswerSet = frozenset


_UNSUPPORTED_KEYWORDS = {
    "FILTER", "OPTIONAL", "UNION", "LIMIT", "OFFSET", "ORDER", "GROUP",
    "HAVING", "CONSTRUCT", "ASK", "DESCRIBE", "BIND", "VALUES", "MINUS",
    "GRAPH", "SERVICE", "REDUCED", "FROM", "EXISTS",
}


class _SparqlTokenizer(Tokenizer):
    def next(self) -> Token:
        self._skip_ws_and_comments()
        line = self.line
        if self.pos >= len(self.text):
            return Token(Tok.EOF, "", line)
        c = self._peek()
        if c in "?$":
            self._advance()
            name: list[str] = []
            while self.pos < len(self.text) and (self._peek().isalnum() or self._peek() == "_"):
                name.append(self._advance())
            if not name:
                raise self.error("empty variable name", line)
            return Token(Tok.VAR, "".join(name), line)
        if c == "{":
            self._advance()
            return Token(Tok.LBRACE, "{", line)
        if c == "}":
            self._advance()
            return Token(Tok.RBRACE, "}", line)
        if c == "*":
            self._advance()
            return Token(Tok.STAR, "*", line)
        return super().next()

    def _name_or_keyword(self, line: int) -> Token:
        out: list[str] = []
        while self.pos < len(self.text):
            ch = self._peek()
            if ch.isalnum() or ch in "_-":
                out.append(self._advance())
            else:
                break
        word = "".join(out)
        if self._peek() == ":":
            self._advance()
            return Token(Tok.PNAME, self._pn_local(), line, prefix=word)
        if word == "a":
            return Token(Tok.A, "a", line)
        if word in ("true", "false"):
            return Token(Tok.BOOLEAN, word, line)
        return Token(Tok.KEYWORD, word.upper(), line)


class _QueryParser:
    def __init__(self, text: str):
        self.text = text
        self.tk = _SparqlTokenizer(text, "<query>")
        self.prefixes: dict[str, str] = {}
        self.tok = self._next()

    def _next(self) -> Token:
        tok = self.tk.next()
        if tok.type is Tok.KEYWORD and tok.value in _UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeature(tok.value)
        return tok

    def _advance(self) -> Token:
        tok = self.tok
        self.tok = self._next()
        return tok

    def _fail(self, reason: str) -> QuerySyntaxError:
        return QuerySyntaxError(self.tok.line, reason)

    def parse(self) -> AlignmentQuery:
        self._prologue()
        if not (self.tok.type is Tok.KEYWORD and self.tok.value == "SELECT"):
            raise self._fail(f"expected SELECT, found {self.tok.value!r}")
        self._advance()
        distinct = False
        if self.tok.type is Tok.KEYWORD and self.tok.value == "DISTINCT":
            distinct = True
            self._advance()
        if self.tok.type is Tok.STAR:
            raise UnsupportedFeature("SELECT *")
        select_vars: list[Var] = []
        while self.tok.type is Tok.VAR:
            select_vars.append(Var(self._advance().value))
        if not select_vars:
            raise self._fail("SELECT needs at least one variable")
        if len(select_vars) > 2:
            raise UnsupportedFeature(f"{len(select_vars)} selected variables (max 2)")
        if self.tok.type is Tok.KEYWORD and self.tok.value == "WHERE":
            self._advance()
        if self.tok.type is not Tok.LBRACE:
            raise self._fail(f"expected '{{', found {self.tok.value!r}")
        self._advance()
        patterns = self._triples_block()
        if self.tok.type is not Tok.RBRACE:
            raise self._fail(f"expected '}}', found {self.tok.value!r}")
        self._advance()
        if self.tok.type is not Tok.EOF:
            raise self._fail(f"trailing content {self.tok.value!r} after query")
        query = AlignmentQuery(tuple(select_vars), tuple(patterns), distinct, self.text)
        _validate(query)
        return query

    def _prologue(self) -> None:
        while self.tok.type is Tok.PREFIX or (
            self.tok.type is Tok.KEYWORD and self.tok.value == "PREFIX"
        ):
            self._advance()
            if self.tok.type is not Tok.PNAME or self.tok.value != "":
                raise self._fail("malformed PREFIX declaration")
            name = self._advance()
            if self.tok.type is not Tok.IRIREF:
                raise self._fail("PREFIX declaration needs an IRI")
            self.prefixes[name.prefix] = self._advance().value

    def _triples_block(self) -> list[TriplePattern]:
        patterns: list[TriplePattern] = []
        while self.tok.type is not Tok.RBRACE:
            subject = self._node(allow_literal=False)
            while True:
                predicate = self._verb()
                while True:
                    obj = self._node(allow_literal=True)
                    patterns.append(TriplePattern(subject, predicate, obj))
                    if self.tok.type is Tok.COMMA:
                        self._advance()
                        continue
                    break
                if self.tok.type is Tok.SEMI:
                    while self.tok.type is Tok.SEMI:
                        self._advance()
                    if self.tok.type in (Tok.DOT, Tok.RBRACE):
                        break
                    continue
                break
            if self.tok.type is Tok.DOT:
                self._advance()
        return patterns

    def _verb(self) -> PatternNode:
        if self.tok.type is Tok.A:
            self._advance()
            return RDF_TYPE
        if self.tok.type is Tok.VAR:
            return Var(self._advance().value)
        return self._iri()

    def _node(self, allow_literal: bool) -> PatternNode:
        if self.tok.type is Tok.VAR:
            return Var(self._advance().value)
        if self.tok.type in (Tok.STRING, Tok.NUMBER, Tok.BOOLEAN):
            if not allow_literal:
                raise self._fail("literal not allowed in subject position")
            return self._literal()
        if self.tok.type is Tok.BLANK:
            raise UnsupportedFeature("blank nodes in query patterns")
        return self._iri()

    def _iri(self) -> Term:
        if self.tok.type is Tok.IRIREF:
            return Term.iri(self._advance().value)
        if self.tok.type is Tok.PNAME:
            tok = self._advance()
            if tok.prefix not in self.prefixes:
                raise QuerySyntaxError(tok.line, f"undeclared prefix {tok.prefix!r}:")
            return Term.iri(self.prefixes[tok.prefix] + tok.value)
        raise self._fail(f"expected IRI or variable, found {self.tok.value!r}")

    def _literal(self) -> Term:
        tok = self._advance()
        if tok.type is Tok.NUMBER:
            from .rdf_parse import XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER

            if "e" in tok.value.lower():
                return Term.literal(tok.value, datatype=XSD_DOUBLE)
            if "." in tok.value:
                return Term.literal(tok.value, datatype=XSD_DECIMAL)
            return Term.literal(tok.value, datatype=XSD_INTEGER)
        if tok.type is Tok.BOOLEAN:
            from .rdf_parse import XSD_BOOLEAN

            return Term.literal(tok.value, datatype=XSD_BOOLEAN)
        if self.tok.type is Tok.LANGTAG:
            return Term.literal(tok.value, lang=self._advance().value)
        if self.tok.type is Tok.HATHAT:
            self._advance()
            return Term.literal(tok.value, datatype=self._iri().value)
        return Term.literal(tok.value)


def _validate(q: AlignmentQuery) -> None:
    if not q.patterns:
        raise QuerySyntaxError(1, "query has no triple patterns")
    pattern_vars: set[Var] = set()
    for pat in q.patterns:
        pattern_vars.update(pat.variables())
    for v in q.select_vars:
        if v not in pattern_vars:
            raise QuerySyntaxError(1, f"selected variable ?{v.name} not used in any pattern")
    # connectivity: every variable must be reachable from a selected variable
    # through patterns that share variables
    reachable: set[Var] = set(q.select_vars)
    changed = True
    while changed:
        changed = False
        for pat in q.patterns:
            pvars = set(pat.variables())
            if pvars & reachable and not pvars <= reachable:
                reachable |= pvars
                changed = True
    stranded = pattern_vars - reachable
    if stranded:
        names = ", ".join(sorted(f"?{v.name}" for v in stranded))
        raise QuerySyntaxError(1, f"variables not connected to the selected ones: {names}")


def parse_query(text: str) -> AlignmentQuery:
    """Parse and validate a query; raises QuerySyntaxError or UnsupportedFeature."""
    return _QueryParser(text).parse()


def format_query(q: AlignmentQuery) -> str:
    """Canonical text form with absolute IRIs; re-parses to an equal query."""
    head = " ".join(str(v) for v in q.select_vars)
    body = "\n".join(f"  {pat}" for pat in q.patterns)
    distinct = "DISTINCT " if q.distinct else ""
    return f"SELECT {distinct}{head} WHERE {{\n{body}\n}}\n"


def evaluate(q: AlignmentQuery, g: KnowledgeGraph) -> AnswerSet:
    """All bindings of the selected variables under conjunctive join semantics.

    DISTINCT is always applied: answers are sets.  Patterns are joined with
    index lookups, cheapest estimated pattern first.
    """

    def estimate(pat: TriplePattern) -> int:
        s = pat.s if isinstance(pat.s, Term) else None
        p = pat.p if isinstance(pat.p, Term) else None
        o = pat.o if isinstance(pat.o, Term) else None
        return g.count_pattern(s, p, o)

    ordered = sorted(q.patterns, key=estimate)
    rows: set[tuple[Term, ...]] = set()

    def walk(i: int, binding: dict[Var, Term]) -> None:
        if i == len(ordered):
            rows.add(tuple(binding[v] for v in q.select_vars))
            return
        pat = ordered[i]
        bound = [
            x if isinstance(x, Term) else binding.get(x)
            for x in (pat.s, pat.p, pat.o)
        ]
        for triple in g._match_unordered(*bound):
            extended = _try_bind(pat, triple, binding)
            if extended is not None:
                walk(i + 1, extended)

    walk(0, {})
    return frozenset(rows)


def _try_bind(
    pat: TriplePattern, triple: Triple, binding: dict[Var, Term]
) -> dict[Var, Term] | None:
    new = dict(binding)
    for node, value in ((pat.s, triple.subject), (pat.p, triple.predicate), (pat.o, triple.object)):
        if isinstance(node, Var):
            if node in new and new[node] != value:
                return None
            new[node] = value
        elif node != value:
            return None
    return new


def query_entities(q: AlignmentQuery) -> list[Term]:
    """IRIs mentioned in the patterns, minus rdf:type, in first-occurrence order."""
    seen: list[Term] = []
    rdf_type = Term.iri(RDF_NS + "type")
    for pat in q.patterns:
        for node in (pat.s, pat.p, pat.o):
            if isinstance(node, Term) and node.is_iri and node != rdf_type and node not in seen:
                seen.append(node)
    return seen
