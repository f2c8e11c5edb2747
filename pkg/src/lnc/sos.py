"""Data model, parser and printer for textual SOS language definitions.

A language file declares grammar categories followed by inference rules::

    Label L ::= (a) | (b) | (c)
    Process P ::= (null) | (a P) | (par P P)

    (a P) --(a)--> P.
    (par P1 P2) --(a)--> (par P1' P2) <== P1 --(a)--> P1'.

Inside a term, a bare token is a metavariable when it is a declared root
followed only by digits and primes; every operator application is
parenthesized. Between ``--(`` and ``)-->`` the arrow's own parentheses
delimit the label, so ``--(a)-->`` is the constant ``(a)`` and ``--(L)-->``
is the metavariable ``L``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


class ParseError(Exception):
    """Raised on malformed input, with a 1-based line/column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Var:
    """A metavariable such as ``P``, ``P1`` or ``P2'``."""

    root: str
    suffix: str = ""

    @property
    def name(self) -> str:
        return self.root + self.suffix

    def __str__(self) -> str:
        return self.name


MetaVar = Var


@dataclass(frozen=True)
class App:
    """An operator applied to argument terms; a constant when ``args`` is empty."""

    op: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return format_term(self)


Term = Union[Var, App]


@dataclass(frozen=True)
class PosTrans:
    source: Term
    label: Term
    target: Term

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class NegTrans:
    source: Term
    label: Term

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Pred:
    """A generic predicate ``(name arg1 ... argn)``."""

    name: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return format_formula(self)


Formula = Union[PosTrans, NegTrans, Pred]


@dataclass(frozen=True)
class Rule:
    premises: tuple[Formula, ...]
    conclusion: Formula

    def __str__(self) -> str:
        return format_rule(self)


@dataclass(frozen=True)
class GrammarDecl:
    category: str
    root: str
    productions: tuple[Term, ...]


@dataclass(frozen=True)
class LanguageDef:
    grammars: tuple[GrammarDecl, ...]
    rules: tuple[Rule, ...] = ()
    roots: frozenset[str] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "roots", frozenset(g.root for g in self.grammars))

    def split_metavar(self, token: str) -> Var | None:
        """Return the metavariable ``token`` denotes, or None."""
        return split_metavar(token, self.roots)

    def category_of(self, var: Var) -> str | None:
        for g in self.grammars:
            if g.root == var.root:
                return g.category
        return None


_SUFFIX = re.compile(r"[0-9']*")


def split_metavar(token: str, roots) -> Var | None:
    # longest declared root wins, so "Te1" prefers root "Te" over "T"
    best = None
    for root in roots:
        if token.startswith(root) and _SUFFIX.fullmatch(token, len(root)):
            if best is None or len(root) > len(best):
                best = root
    if best is None:
        return None
    return Var(best, token[len(best):])


def term_vars(t: Term) -> list[Var]:
    """Metavariable occurrences of ``t`` in pre-order, duplicates kept."""
    return list(_iter_vars(t))


def _iter_vars(t: Term) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    else:
        for a in t.args:
            yield from _iter_vars(a)


def formula_terms(f: Formula) -> tuple[Term, ...]:
    match f:
        case PosTrans(s, l, t):
            return (s, l, t)
        case NegTrans(s, l):
            return (s, l)
        case Pred(_, args):
            return args
    raise TypeError(f"not a formula: {f!r}")


def formula_vars(f: Formula) -> list[Var]:
    return [v for t in formula_terms(f) for v in _iter_vars(t)]


# -- printing -----------------------------------------------------------------

def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return f"({t.op})"
    return "(" + " ".join([t.op, *map(format_term, t.args)]) + ")"


def _format_label(t: Term, roots=None) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args and roots is not None and split_metavar(t.op, roots):
        return f"({t.op})"
    return " ".join([t.op, *map(format_term, t.args)])


def format_formula(f: Formula, roots=None) -> str:
    match f:
        case PosTrans(s, l, t):
            return f"{format_term(s)} --({_format_label(l, roots)})--> {format_term(t)}"
        case NegTrans(s, l):
            return f"{format_term(s)} -/-({_format_label(l, roots)})-->"
        case Pred(name, args):
            return format_term(App(name, args))
    raise TypeError(f"not a formula: {f!r}")


def format_rule(r: Rule, roots=None) -> str:
    text = format_formula(r.conclusion, roots)
    if r.premises:
        text += " <== " + " /\\ ".join(format_formula(p, roots) for p in r.premises)
    return text + "."


def print_language(lang: LanguageDef) -> str:
    lines = []
    for g in lang.grammars:
        prods = " | ".join(format_term(p) for p in g.productions)
        lines.append(f"{g.category} {g.root} ::= {prods}")
    if lang.rules:
        lines.append("")
        lines.extend(format_rule(r, lang.roots) for r in lang.rules)
    return "\n".join(lines) + "\n"


# -- lexing -------------------------------------------------------------------

_TOKEN_SPEC = [
    ("WS", r"\s+"),
    ("COMMENT", r"//[^\n]*"),
    ("DEFINE", r"::="),
    ("IF", r"<=="),
    ("AND", r"/\\"),
    ("NEGOPEN", r"-+/-+\("),
    ("POSOPEN", r"-{2,}\("),
    ("LCLOSE", r"\)-{2,}>"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("BAR", r"\|(?![|])"),
    ("DOT", r"\."),
    ("IDENT", r"[A-Za-z][A-Za-z0-9_']*"),
    ("SYMBOL", r"[;!#$&*+,:<=>?@^~/\\|-]+"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("WS", "COMMENT"):
            if kind == "SYMBOL":
                kind = "IDENT"
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


_DESCRIBE = {
    "DEFINE": "'::='", "IF": "'<=='", "AND": "'/\\'", "NEGOPEN": "'-/-('",
    "POSOPEN": "'--('", "LCLOSE": "')-->'", "LPAREN": "'('", "RPAREN": "')'",
    "BAR": "'|'", "DOT": "'.'", "IDENT": "identifier", "EOF": "end of input",
}


# -- parsing ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.roots: set[str] = set()

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def expect(self, kind: str) -> Token:
        tok = self.tok
        if tok.kind != kind:
            found = repr(tok.text) if tok.text else "end of input"
            raise self.error(f"expected {_DESCRIBE[kind]}, found {found}")
        self.i += 1
        return tok

    def at_decl(self) -> bool:
        return (self.tok.kind == "IDENT" and self.peek().kind == "IDENT"
                and self.peek(2).kind == "DEFINE")

    def collect_roots(self) -> None:
        # roots may be used before their declaration (e.g. a Label production
        # mentioning P), so gather them all up front
        toks = self.tokens
        for k in range(len(toks) - 2):
            if toks[k].kind == toks[k + 1].kind == "IDENT" and toks[k + 2].kind == "DEFINE":
                root = toks[k + 1]
                if root.text in self.roots:
                    raise ParseError(f"duplicate metavariable root {root.text!r}",
                                     root.line, root.column)
                self.roots.add(root.text)

    def language(self) -> LanguageDef:
        self.collect_roots()
        if not self.at_decl():
            raise self.error("expected a grammar declaration 'Category Root ::= ...'")
        grammars = []
        while self.at_decl():
            grammars.append(self.decl())
        rules = []
        while self.tok.kind != "EOF":
            rules.append(self.rule())
        return LanguageDef(tuple(grammars), tuple(rules))

    def decl(self) -> GrammarDecl:
        category = self.expect("IDENT").text
        root = self.expect("IDENT").text
        self.expect("DEFINE")
        prods = [self.term()]
        while self.tok.kind == "BAR":
            self.i += 1
            prods.append(self.term())
        return GrammarDecl(category, root, tuple(prods))

    def rule(self) -> Rule:
        start = self.tok
        conclusion = self.formula()
        if isinstance(conclusion, NegTrans):
            raise self.error("a negative transition cannot be a conclusion", start)
        premises = []
        if self.tok.kind == "IF":
            self.i += 1
            premises.append(self.formula())
            while self.tok.kind == "AND":
                self.i += 1
                premises.append(self.formula())
        self.expect("DOT")
        return Rule(tuple(premises), conclusion)

    def formula(self) -> Formula:
        start = self.tok
        source = self.term()
        if self.tok.kind == "POSOPEN":
            self.i += 1
            label = self.label()
            return PosTrans(source, label, self.term())
        if self.tok.kind == "NEGOPEN":
            self.i += 1
            return NegTrans(source, self.label())
        if isinstance(source, App):
            return Pred(source.op, source.args)
        raise self.error("expected a transition arrow '--(' or '-/-(' after metavariable", start)

    def label(self) -> Term:
        tok = self.tok
        if tok.kind == "LPAREN":
            t = self.term()
        elif tok.kind == "IDENT":
            self.i += 1
            var = split_metavar(tok.text, self.roots)
            if var is not None and self.tok.kind == "LCLOSE":
                t = var
            else:
                args = []
                while self.tok.kind != "LCLOSE":
                    args.append(self.term())
                t = App(tok.text, tuple(args))
        else:
            raise self.error("expected a label")
        self.expect("LCLOSE")
        return t

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "IDENT":
            self.i += 1
            var = split_metavar(tok.text, self.roots)
            if var is None:
                raise self.error(
                    f"{tok.text!r} is not a declared metavariable "
                    "(operator applications must be parenthesized)", tok)
            return var
        if tok.kind == "LPAREN":
            self.i += 1
            op = self.expect("IDENT").text
            args = []
            while self.tok.kind != "RPAREN":
                if self.tok.kind not in ("IDENT", "LPAREN"):
                    raise self.error(f"unbalanced parentheses: expected ')' to close {op!r}")
                args.append(self.term())
            self.i += 1
            return App(op, tuple(args))
        found = repr(tok.text) if tok.text else "end of input"
        raise self.error(f"expected a term, found {found}")


def parse_language(text: str) -> LanguageDef:
    """Parse a language definition, raising :class:`ParseError` on bad input."""
    return _Parser(text).language()
