"""Parsers for N-Triples and a Turtle subset.

Supported Turtle features: ``@prefix``/``PREFIX`` declarations, the ``a``
keyword, predicate lists (``;``), object lists (``,``), named and anonymous
blank nodes, string literals (short and long form, language tags, datatypes)
and numeric/boolean shorthand.  Collections, blank-node property lists and
``@base`` are rejected with a ParseError, as is RDF/XML (convert externally).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator

from .terms import RDF_NS, XSD_NS, Term, Triple


class ParseError(Exception):
    """Syntax error in an RDF file, carrying file name and line number."""

    def __init__(self, filename: str, line: int, reason: str):
        self.filename = filename
        self.line = line
        self.reason = reason
        super().__init__(f"{filename}:{line}: {reason}")


class Tok(enum.Enum):
    IRIREF = "iriref"
    PNAME = "pname"
    BLANK = "blank"
    ANON = "anon"
    STRING = "string"
    LANGTAG = "langtag"
    HATHAT = "^^"
    NUMBER = "number"
    BOOLEAN = "boolean"
    A = "a"
    PREFIX = "prefix"
    BASE = "base"
    DOT = "."
    SEMI = ";"
    COMMA = ","
    EOF = "eof"
    # used by the SPARQL tokenizer only
    VAR = "var"
    LBRACE = "{"
    RBRACE = "}"
    STAR = "*"
    KEYWORD = "keyword"


@dataclass(slots=True)
class Token:
    type: Tok
    value: str
    line: int
    # PNAME keeps the prefix part separately; unused otherwise
    prefix: str = ""


_STRING_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}

_PN_LOCAL_EXTRA = "_-.%"


class Tokenizer:
    """Shared tokenizer for the N-Triples and Turtle grammars."""

    def __init__(self, text: str, filename: str):
        self.text = text
        self.filename = filename
        self.pos = 0
        self.line = 1

    def error(self, reason: str, line: int | None = None) -> ParseError:
        return ParseError(self.filename, self.line if line is None else line, reason)

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def _advance(self) -> str:
        c = self.text[self.pos]
        self.pos += 1
        if c == "\n":
            self.line += 1
        return c

    def _skip_ws_and_comments(self) -> None:
        while self.pos < len(self.text):
            c = self._peek()
            if c in " \t\r\n":
                self._advance()
            elif c == "#":
                while self.pos < len(self.text) and self._peek() != "\n":
                    self._advance()
            else:
                return

    def next(self) -> Token:
        self._skip_ws_and_comments()
        line = self.line
        if self.pos >= len(self.text):
            return Token(Tok.EOF, "", line)
        c = self._peek()
        if c == "<":
            return self._iriref(line)
        if c == "_" and self._peek(1) == ":":
            return self._blank_label(line)
        if c in "\"'":
            return self._string(line)
        if c == "@":
            return self._at_keyword(line)
        if c == "^" and self._peek(1) == "^":
            self._advance()
            self._advance()
            return Token(Tok.HATHAT, "^^", line)
        if c == ".":
            # a dot followed by a digit starts a decimal number
            if self._peek(1).isdigit():
                return self._number(line)
            self._advance()
            return Token(Tok.DOT, ".", line)
        if c == ";":
            self._advance()
            return Token(Tok.SEMI, ";", line)
        if c == ",":
            self._advance()
            return Token(Tok.COMMA, ",", line)
        if c == "[":
            self._advance()
            self._skip_ws_and_comments()
            if self._peek() == "]":
                self._advance()
                return Token(Tok.ANON, "[]", line)
            raise self.error("blank node property lists are not supported", line)
        if c == "(":
            raise self.error("collections are not supported", line)
        if c.isdigit() or (c in "+-" and (self._peek(1).isdigit() or self._peek(1) == ".")):
            return self._number(line)
        if c == ":":
            self._advance()
            return Token(Tok.PNAME, self._pn_local(), line, prefix="")
        if c.isalpha():
            return self._name_or_keyword(line)
        raise self.error(f"unexpected character {c!r}", line)

    def _iriref(self, line: int) -> Token:
        self._advance()  # <
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated IRI", line)
            c = self._advance()
            if c == ">":
                break
            if c == "\\":
                out.append(self._unicode_escape(line, iri=True))
                continue
            if c in ' \t\n\r"{}|^`<':
                raise self.error(f"invalid character {c!r} in IRI", line)
            out.append(c)
        value = "".join(out)
        if not value:
            raise self.error("empty IRI", line)
        return Token(Tok.IRIREF, value, line)

    def _unicode_escape(self, line: int, iri: bool = False) -> str:
        if self.pos >= len(self.text):
            raise self.error("dangling escape", line)
        e = self._advance()
        if e == "u" or e == "U":
            n = 4 if e == "u" else 8
            hexdigits = self.text[self.pos : self.pos + n]
            if len(hexdigits) != n or not all(h in "0123456789abcdefABCDEF" for h in hexdigits):
                raise self.error(f"bad \\{e} escape", line)
            for _ in range(n):
                self._advance()
            return chr(int(hexdigits, 16))
        if not iri and e in _STRING_ESCAPES:
            return _STRING_ESCAPES[e]
        raise self.error(f"unknown escape \\{e}", line)

    def _blank_label(self, line: int) -> Token:
        self._advance()  # _
        self._advance()  # :
        out: list[str] = []
        while self.pos < len(self.text):
            c = self._peek()
            if c.isalnum() or c in "_-.":
                out.append(self._advance())
            else:
                break
        while out and out[-1] == ".":
            out.pop()
            self.pos -= 1
        if not out:
            raise self.error("empty blank node label", line)
        return Token(Tok.BLANK, "".join(out), line)

    def _string(self, line: int) -> Token:
        quote = self._advance()
        long_form = False
        if self._peek() == quote and self._peek(1) == quote:
            self._advance()
            self._advance()
            long_form = True
        out: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string literal", line)
            c = self._advance()
            if c == "\\":
                out.append(self._unicode_escape(line))
                continue
            if c == quote:
                if not long_form:
                    break
                # Count the quote run; the final three close the literal and
                # any preceding quotes are content ("""a"""" ends in "a\"").
                run = 1
                while self._peek() == quote:
                    self._advance()
                    run += 1
                if run >= 3:
                    out.append(quote * (run - 3))
                    break
                out.append(quote * run)
                continue
            if c == "\n" and not long_form:
                raise self.error("newline in single-line string literal", line)
            out.append(c)
        return Token(Tok.STRING, "".join(out), line)

    def _at_keyword(self, line: int) -> Token:
        self._advance()  # @
        word: list[str] = []
        while self.pos < len(self.text) and (self._peek().isalnum() or self._peek() == "-"):
            word.append(self._advance())
        kw = "".join(word)
        if kw == "prefix":
            return Token(Tok.PREFIX, "@prefix", line)
        if kw == "base":
            return Token(Tok.BASE, "@base", line)
        # language tag directly after a string literal
        if word and word[0].isalpha():
            return Token(Tok.LANGTAG, kw, line)
        raise self.error(f"unknown directive @{kw}", line)

    def _number(self, line: int) -> Token:
        out: list[str] = []
        if self._peek() in "+-":
            out.append(self._advance())
        seen_dot = False
        seen_exp = False
        while self.pos < len(self.text):
            c = self._peek()
            if c.isdigit():
                out.append(self._advance())
            elif c == "." and not seen_dot and not seen_exp and self._peek(1).isdigit():
                seen_dot = True
                out.append(self._advance())
            elif c in "eE" and not seen_exp and (self._peek(1).isdigit() or self._peek(1) in "+-"):
                seen_exp = True
                out.append(self._advance())
                if self._peek() in "+-":
                    out.append(self._advance())
            else:
                break
        text = "".join(out)
        if not any(ch.isdigit() for ch in text):
            raise self.error(f"malformed number {text!r}", line)
        return Token(Tok.NUMBER, text, line)

    def _name_or_keyword(self, line: int) -> Token:
        # prefixed name, bare keyword (a, true, false), or SPARQL-style PREFIX/BASE
        out: list[str] = []
        while self.pos < len(self.text):
            c = self._peek()
            if c.isalnum() or c in "_-":
                out.append(self._advance())
            else:
                break
        word = "".join(out)
        if self._peek() == ":":
            self._advance()
            local = self._pn_local()
            return Token(Tok.PNAME, local, line, prefix=word)
        if word == "a":
            return Token(Tok.A, "a", line)
        if word in ("true", "false"):
            return Token(Tok.BOOLEAN, word, line)
        if word.upper() == "PREFIX":
            return Token(Tok.PREFIX, word, line)
        if word.upper() == "BASE":
            return Token(Tok.BASE, word, line)
        raise self.error(f"unexpected name {word!r} (missing ':'?)", line)

    def _pn_local(self) -> str:
        out: list[str] = []
        while self.pos < len(self.text):
            c = self._peek()
            if c.isalnum() or c in _PN_LOCAL_EXTRA:
                out.append(self._advance())
            else:
                break
        # trailing dots terminate the statement instead of the name
        while out and out[-1] == ".":
            out.pop()
            self.pos -= 1
        return "".join(out)


XSD_INTEGER = XSD_NS + "integer"
XSD_DECIMAL = XSD_NS + "decimal"
XSD_DOUBLE = XSD_NS + "double"
XSD_BOOLEAN = XSD_NS + "boolean"


class _Parser:
    def __init__(self, text: str, filename: str, blank_prefix: str):
        self.tk = Tokenizer(text, filename)
        self.filename = filename
        self.blank_prefix = blank_prefix
        self.anon_counter = 0
        self.prefixes: dict[str, str] = {}
        self.tok = self.tk.next()

    def _advance(self) -> Token:
        tok = self.tok
        self.tok = self.tk.next()
        return tok

    def _expect(self, ttype: Tok) -> Token:
        if self.tok.type is not ttype:
            raise self.tk.error(
                f"expected {ttype.value!r}, found {self.tok.value!r}", self.tok.line
            )
        return self._advance()

    def _skolem(self, label: str) -> Term:
        return Term.blank(self.blank_prefix + label)

    def _fresh_anon(self) -> Term:
        self.anon_counter += 1
        return Term.blank(f"{self.blank_prefix}anon{self.anon_counter}")

    def _resolve_pname(self, tok: Token) -> Term:
        if tok.prefix not in self.prefixes:
            raise self.tk.error(f"undeclared prefix {tok.prefix!r}:", tok.line)
        return Term.iri(self.prefixes[tok.prefix] + tok.value)

    def _literal(self) -> Term:
        tok = self._advance()
        if tok.type is Tok.NUMBER:
            if "e" in tok.value.lower():
                return Term.literal(tok.value, datatype=XSD_DOUBLE)
            if "." in tok.value:
                return Term.literal(tok.value, datatype=XSD_DECIMAL)
            return Term.literal(tok.value, datatype=XSD_INTEGER)
        if tok.type is Tok.BOOLEAN:
            return Term.literal(tok.value, datatype=XSD_BOOLEAN)
        # plain string, optionally tagged or typed
        if self.tok.type is Tok.LANGTAG:
            lang = self._advance()
            return Term.literal(tok.value, lang=lang.value)
        if self.tok.type is Tok.HATHAT:
            self._advance()
            dtype = self._term_iri()
            return Term.literal(tok.value, datatype=dtype.value)
        return Term.literal(tok.value)

    def _term_iri(self) -> Term:
        if self.tok.type is Tok.IRIREF:
            return Term.iri(self._advance().value)
        if self.tok.type is Tok.PNAME:
            return self._resolve_pname(self._advance())
        raise self.tk.error(f"expected IRI, found {self.tok.value!r}", self.tok.line)


class TurtleParser(_Parser):
    def parse(self) -> Iterator[Triple]:
        while self.tok.type is not Tok.EOF:
            if self.tok.type is Tok.PREFIX:
                self._directive()
            elif self.tok.type is Tok.BASE:
                raise self.tk.error("@base is not supported", self.tok.line)
            else:
                yield from self._triples()
                self._expect(Tok.DOT)

    def _directive(self) -> None:
        at_form = self._advance().value.startswith("@")
        if self.tok.type is not Tok.PNAME or self.tok.value != "":
            # prefix declarations look like "p: <iri>"; the PNAME local must be empty
            if self.tok.type is Tok.PNAME:
                raise self.tk.error("malformed prefix declaration", self.tok.line)
            raise self.tk.error(
                f"expected prefix name, found {self.tok.value!r}", self.tok.line
            )
        name = self._advance()
        iri = self._expect(Tok.IRIREF)
        self.prefixes[name.prefix] = iri.value
        if at_form:
            self._expect(Tok.DOT)

    def _triples(self) -> Iterator[Triple]:
        subject = self._subject()
        yield from self._predicate_object_list(subject)

    def _subject(self) -> Term:
        if self.tok.type is Tok.BLANK:
            return self._skolem(self._advance().value)
        if self.tok.type is Tok.ANON:
            self._advance()
            return self._fresh_anon()
        return self._term_iri()

    def _predicate_object_list(self, subject: Term) -> Iterator[Triple]:
        while True:
            predicate = self._verb()
            while True:
                obj = self._object()
                yield Triple(subject, predicate, obj)
                if self.tok.type is Tok.COMMA:
                    self._advance()
                    continue
                break
            if self.tok.type is Tok.SEMI:
                while self.tok.type is Tok.SEMI:  # tolerate repeated ';'
                    self._advance()
                if self.tok.type is Tok.DOT:
                    break
                continue
            break

    def _verb(self) -> Term:
        if self.tok.type is Tok.A:
            self._advance()
            return Term.iri(RDF_NS + "type")
        return self._term_iri()

    def _object(self) -> Term:
        if self.tok.type is Tok.BLANK:
            return self._skolem(self._advance().value)
        if self.tok.type is Tok.ANON:
            self._advance()
            return self._fresh_anon()
        if self.tok.type in (Tok.STRING, Tok.NUMBER, Tok.BOOLEAN):
            return self._literal()
        return self._term_iri()


class NTriplesParser(_Parser):
    """Strict triple-per-statement reader; no prefixes, no shorthand."""

    def parse(self) -> Iterator[Triple]:
        while self.tok.type is not Tok.EOF:
            line = self.tok.line
            subject = self._nt_subject()
            predicate = self._nt_predicate()
            obj = self._nt_object()
            if self.tok.type is not Tok.DOT:
                raise self.tk.error(
                    f"expected '.', found {self.tok.value!r}", self.tok.line
                )
            self._advance()
            try:
                yield Triple(subject, predicate, obj)
            except ValueError as exc:
                raise self.tk.error(str(exc), line) from exc

    def _nt_subject(self) -> Term:
        if self.tok.type is Tok.IRIREF:
            return Term.iri(self._advance().value)
        if self.tok.type is Tok.BLANK:
            return self._skolem(self._advance().value)
        raise self.tk.error(
            f"expected IRI or blank node subject, found {self.tok.value!r}", self.tok.line
        )

    def _nt_predicate(self) -> Term:
        if self.tok.type is Tok.IRIREF:
            return Term.iri(self._advance().value)
        raise self.tk.error(
            f"expected IRI predicate, found {self.tok.value!r}", self.tok.line
        )

    def _nt_object(self) -> Term:
        if self.tok.type is Tok.IRIREF:
            return Term.iri(self._advance().value)
        if self.tok.type is Tok.BLANK:
            return self._skolem(self._advance().value)
        if self.tok.type is Tok.STRING:
            return self._literal()
        raise self.tk.error(
            f"expected IRI, blank node, or literal object, found {self.tok.value!r}",
            self.tok.line,
        )


def parse_turtle(text: str, filename: str = "<turtle>", blank_prefix: str = "b0_") -> Iterator[Triple]:
    return TurtleParser(text, filename, blank_prefix).parse()


def parse_ntriples(text: str, filename: str = "<ntriples>", blank_prefix: str = "b0_") -> Iterator[Triple]:
    return NTriplesParser(text, filename, blank_prefix).parse()
