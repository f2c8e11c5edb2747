"""Abstract syntax and parser for Lang-n-Change programs.

Programs are written in the surface syntax and come back with every macro
(``must match``, ``sublistOf``, ``match ... with``, ``distinctVars``, the
``premises.LTsources`` family) already expanded into core nodes, so the
evaluator only ever sees the constructors defined here.

Checks in a program are separated by ``;;``. Pattern variables binding the
head name of a term are written ``(?h pats...)``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Union

from .sos import App, ParseError, Term, Var


# -- core expressions ---------------------------------------------------------

@dataclass(frozen=True)
class PatVar:
    name: str


@dataclass(frozen=True)
class StrLit:
    value: str


@dataclass(frozen=True)
class TermLit:
    """A term literal; its Var leaves are resolved at evaluation time,
    first against bound pattern variables, then as metavariables."""

    term: Term


@dataclass(frozen=True)
class PredLit:
    """Builds the formula ``(name v1 ... vn)`` from a list-valued expression."""

    name: str
    args: Expr


@dataclass(frozen=True)
class ListLit:
    items: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Head:
    expr: Expr


@dataclass(frozen=True)
class Tail:
    expr: Expr


@dataclass(frozen=True)
class Append:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Diff:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class MapLit:
    keys: Expr
    values: Expr


@dataclass(frozen=True)
class MapGet:
    map: Expr
    key: Expr


@dataclass(frozen=True)
class Rules:
    pass


@dataclass(frozen=True)
class Premises:
    pass


@dataclass(frozen=True)
class Conclusion:
    pass


@dataclass(frozen=True)
class SelfKw:
    pass


@dataclass(frozen=True)
class Select:
    source: Expr
    pattern: Pattern
    body: Expr


@dataclass(frozen=True)
class Uniquefy:
    input: Expr
    hint: str
    new_var: str
    map_var: str
    body: Expr


@dataclass(frozen=True)
class GetVars:
    expr: Expr


@dataclass(frozen=True)
class If:
    cond: BoolExpr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class ErrorExpr:
    message: str


Expr = Union[PatVar, StrLit, TermLit, PredLit, ListLit, Head, Tail, Append, Diff,
             MapLit, MapGet, Rules, Premises, Conclusion, SelfKw, Select, Uniquefy,
             GetVars, If, Skip, ErrorExpr]


# -- boolean expressions ------------------------------------------------------

@dataclass(frozen=True)
class Eq:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class IsVar:
    expr: Expr


@dataclass(frozen=True)
class And:
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Or:
    left: BoolExpr
    right: BoolExpr


@dataclass(frozen=True)
class Not:
    expr: BoolExpr


BoolExpr = Union[Eq, IsVar, And, Or, Not]


# -- patterns -----------------------------------------------------------------

@dataclass(frozen=True)
class PVar:
    """Binds anything; ``_`` is a wildcard that binds nothing."""

    name: str


@dataclass(frozen=True)
class PList:
    items: tuple[Pattern, ...] = ()


@dataclass(frozen=True)
class POp:
    """Matches a term (or predicate formula) with the given head name.

    A single PVar argument captures the whole argument list; a single PList
    argument is matched against the argument list; otherwise arguments are
    matched positionally.
    """

    name: str
    args: tuple[Pattern, ...] = ()


@dataclass(frozen=True)
class PAnyHead:
    head_var: str
    args: tuple[Pattern, ...] = ()


@dataclass(frozen=True)
class PPosTrans:
    source: Pattern
    label: Pattern
    target: Pattern


@dataclass(frozen=True)
class PNegTrans:
    source: Pattern
    label: Pattern


Pattern = Union[PVar, PList, POp, PAnyHead, PPosTrans, PNegTrans]

WILDCARD = PVar("_")
ANY_POS_TRANS = PPosTrans(WILDCARD, WILDCARD, WILDCARD)


@dataclass(frozen=True)
class Program:
    statements: tuple[Expr, ...]
    source: str = ""


# -- surface syntax (macros) --------------------------------------------------

@dataclass(frozen=True)
class MustMatch:
    expr: Expr
    patterns: tuple[Pattern, ...]
    otherwise: Expr


@dataclass(frozen=True)
class SublistOf:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class MatchWith:
    expr: Expr
    pattern: Pattern
    then: Expr
    otherwise: Expr


@dataclass(frozen=True)
class Accessor:
    """One of premises.LTsources, conclusion.Ttarget and friends."""

    name: str


@dataclass(frozen=True)
class DistinctVars:
    expr: Expr
    otherwise: Expr


MACRO_NODES = (MustMatch, SublistOf, MatchWith, Accessor, DistinctVars)

# Not lexable as an identifier in .sos files, so never clashes with a user predicate.
DISTINCT_PRED = "%distinct"

# Variables bound by expansions carry a '%' so they can never capture or be
# constrained by a user's pattern variable of the same name.
_LP, _LL, _LP2 = PVar("%P"), PVar("%L"), PVar("%P'")


def _accessor(name: str) -> Expr:
    labeled = name.split(".")[1].startswith("LT")
    if labeled:
        pos = PPosTrans(_LP, _LL, _LP2)
        neg = PNegTrans(_LP, _LL)
    else:
        pos = POp("-->", (_LP, _LP2))
        neg = POp("-/->", (_LP,))
    kind = name.split(".")[1].lstrip("LT")
    if kind == "sources":
        return Append(Select(Premises(), pos, PatVar("%P")), Select(Premises(), neg, PatVar("%P")))
    if kind == "targets":
        return Select(Premises(), pos, PatVar("%P'"))
    var = "%P" if kind == "source" else "%P'"
    return Head(Select(ListLit((Conclusion(),)), pos, PatVar(var)))


def expand_macros(node):
    """Rewrite every macro node in ``node`` into core constructors.

    Core nodes are rebuilt with expanded children, so expanding a tree that
    is already macro-free returns an equal tree.
    """
    match node:
        case MustMatch(e, pats, other):
            e = expand_macros(e)
            rest = e
            for p in pats:
                rest = Diff(rest, Select(e, p, SelfKw()))
            return If(Not(Eq(rest, ListLit())), expand_macros(other), Skip())
        case SublistOf(l, r):
            return Eq(Diff(expand_macros(l), expand_macros(r)), ListLit())
        case MatchWith(e, p, then, other):
            single = ListLit((expand_macros(e),))
            # the then-branch runs inside a selector so it sees p's bindings
            return If(Eq(Select(single, p, SelfKw()), ListLit()),
                      expand_macros(other),
                      Head(Select(single, p, expand_macros(then))))
        case Accessor(name):
            return _accessor(name)
        case DistinctVars(e, other):
            return Uniquefy(
                ListLit((PredLit(DISTINCT_PRED, expand_macros(e)),)), "", "%new", "%m",
                If(Not(Eq(PatVar("%m"), MapLit(ListLit(), ListLit()))), expand_macros(other), Skip()))
        case Program(stmts, src):
            return Program(tuple(expand_macros(s) for s in stmts), src)
        case PatVar() | StrLit() | TermLit() | Rules() | Premises() | Conclusion() | SelfKw() \
                | Skip() | ErrorExpr() | str() | None:
            return node
        case tuple():
            return tuple(expand_macros(x) for x in node)
    if is_pattern(node):
        return node
    # generic core node: rebuild with expanded fields
    cls = type(node)
    return cls(*(expand_macros(getattr(node, f)) for f in cls.__dataclass_fields__))


def is_pattern(node) -> bool:
    return isinstance(node, (PVar, PList, POp, PAnyHead, PPosTrans, PNegTrans))


def iter_nodes(node):
    """Yield every AST node reachable from ``node`` (patterns included)."""
    if isinstance(node, tuple):
        for x in node:
            yield from iter_nodes(x)
        return
    if not hasattr(node, "__dataclass_fields__"):
        return
    yield node
    if isinstance(node, (TermLit,)):
        return
    for f in node.__dataclass_fields__:
        yield from iter_nodes(getattr(node, f))


# -- lexer ----------------------------------------------------------------------

_ACCESSORS = ("premises.LTsources", "premises.LTtargets", "conclusion.LTsource",
              "conclusion.LTtarget", "premises.Tsources", "premises.Ttargets",
              "conclusion.Tsource", "conclusion.Ttarget")

KEYWORDS = frozenset("""
    rules premises conclusion self skip error if then else match with otherwise
    must distinctVars uniquefy getVars head tail isVar not and or sublistOf
""".split())

_TOKEN_RE = re.compile(r"""
    (?P<WS>\s+)
  | (?P<COMMENT>//[^\n]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<ACCESSOR>(?:premises\.(?:LT|T)(?:sources|targets)|conclusion\.(?:LT|T)(?:source|target))(?![A-Za-z0-9_']))
  | (?P<SEP>;;)
  | (?P<MAPSTO>=>)
  | (?P<ARROW>-{2,}>)
  | (?P<NEG>-+/-+)
  | (?P<DASHES>-{2,})
  | (?P<THEN>->)
  | (?P<PUNCT>[-@=\[\]():,|?])
  | (?P<IDENT>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("WS", "COMMENT"):
            if kind == "PUNCT":
                kind = m.group()
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- parser ---------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.select_depth = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def at(self, kind: str, text: str | None = None) -> bool:
        return self.tok.kind == kind and (text is None or self.tok.text == text)

    def at_kw(self, word: str) -> bool:
        return self.at("IDENT", word)

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            self.i += 1
            return self.tokens[self.i - 1]
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            want = text or kind
            found = repr(self.tok.text) if self.tok.text else "end of input"
            raise self.error(f"expected {want!r}, found {found}")
        return tok

    def expect_kw(self, word: str) -> Token:
        return self.expect("IDENT", word)

    def ident(self) -> str:
        tok = self.expect("IDENT")
        if tok.text in KEYWORDS:
            raise self.error(f"keyword {tok.text!r} cannot be used as a name", tok)
        return tok.text

    # program

    def program(self) -> list:
        checks = [self.expr()]
        while self.accept("SEP"):
            if self.at("EOF"):
                break
            checks.append(self.expr())
        if not self.at("EOF"):
            raise self.error(f"unexpected {self.tok.text!r}; checks are separated by ';;'")
        return checks

    # expressions

    def expr(self):
        if self.at_kw("if"):
            self.i += 1
            cond = self.boolean()
            self.expect_kw("then")
            then = self.expr()
            orelse = self.expr() if self.accept("IDENT", "else") else Skip()
            return If(cond, then, orelse)
        if self.at_kw("match"):
            self.i += 1
            e = self.binary()
            self.expect_kw("with")
            p = self.pattern()
            then = self.expr() if self.accept("THEN") else Skip()
            other = self.expr() if self.accept("IDENT", "otherwise") else Skip()
            return MatchWith(e, p, then, other)
        if self.at_kw("distinctVars"):
            self.i += 1
            self.expect("(")
            e = self.expr()
            self.expect(")")
            self.expect_kw("otherwise")
            return DistinctVars(e, self.expr())
        if self.at_kw("uniquefy"):
            self.i += 1
            self.expect("(")
            e = self.expr()
            self.expect(",")
            hint = self.string()
            self.expect(",")
            new = self.ident()
            self.expect(",")
            m = self.ident()
            self.expect(")")
            self.expect(":")
            return Uniquefy(e, hint, new, m, self.expr())
        e = self.binary()
        if self.at_kw("must"):
            self.i += 1
            self.expect_kw("match")
            pats = [self.pattern()]
            while self.accept("|"):
                pats.append(self.pattern())
            self.expect_kw("otherwise")
            return MustMatch(e, tuple(pats), self.expr())
        return e

    def binary(self):
        e = self.unary()
        while True:
            if self.accept("@"):
                e = Append(e, self.unary())
            elif self.accept("-"):
                e = Diff(e, self.unary())
            else:
                return e

    def unary(self):
        if self.accept("IDENT", "head"):
            return Head(self.unary())
        if self.accept("IDENT", "tail"):
            return Tail(self.unary())
        return self.postfix()

    def postfix(self):
        if self.at("IDENT", "rules") and self.peek().kind == "[" and self.peek(2).kind == "ARROW" \
                and self.peek(3).kind == "]":
            # rules[-->] is the rules whose conclusion is a labeled transition
            self.i += 4
            return self.selector_tail(Rules(), ANY_POS_TRANS)
        e = self.primary()
        while True:
            if self.accept("["):
                p = self.pattern()
                self.expect("]")
                if self.at(":"):
                    return self.selector_tail(e, p)
                e = Select(e, p, SelfKw())
                continue
            if self.at("(") and isinstance(e, (PatVar, MapLit, MapGet)):
                self.i += 1
                key = self.expr()
                self.expect(")")
                e = MapGet(e, key)
                continue
            return e

    def selector_tail(self, source, pattern):
        if self.accept(":"):
            self.select_depth += 1
            body = self.expr()
            self.select_depth -= 1
            return Select(source, pattern, body)
        return Select(source, pattern, SelfKw())

    def primary(self):
        tok = self.tok
        if tok.kind == "STRING":
            return StrLit(self.string())
        if tok.kind == "ACCESSOR":
            self.need_select(tok)
            self.i += 1
            return Accessor(tok.text)
        if tok.kind == "[":
            self.i += 1
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.accept(","):
                    items.append(self.expr())
            self.expect("]")
            return ListLit(tuple(items))
        if tok.kind == "(":
            nxt = self.peek()
            if nxt.kind == "IDENT" and nxt.text not in KEYWORDS:
                return TermLit(self.term())
            self.i += 1
            e = self.expr()
            if self.accept("MAPSTO"):
                values = self.expr()
                self.expect(")")
                return MapLit(e, values)
            self.expect(")")
            return e
        if tok.kind == "IDENT":
            word = tok.text
            if word in ("if", "match", "distinctVars", "uniquefy"):
                return self.expr()
            self.i += 1
            if word == "rules":
                return Rules()
            if word in ("premises", "conclusion", "self"):
                self.need_select(tok)
                return {"premises": Premises, "conclusion": Conclusion, "self": SelfKw}[word]()
            if word == "skip":
                return Skip()
            if word == "error":
                return ErrorExpr(self.string())
            if word == "getVars":
                self.expect("(")
                e = self.expr()
                self.expect(")")
                return GetVars(e)
            if word in KEYWORDS:
                raise self.error(f"unexpected keyword {word!r}", tok)
            return PatVar(word)
        found = repr(tok.text) if tok.text else "end of input"
        raise self.error(f"expected an expression, found {found}")

    def need_select(self, tok: Token) -> None:
        if self.select_depth == 0:
            raise self.error(f"{tok.text!r} is only meaningful inside a selector body", tok)

    def string(self) -> str:
        tok = self.expect("STRING")
        return json.loads(tok.text)

    def term(self) -> Term:
        if self.accept("("):
            op = self.expect("IDENT").text
            args = []
            while not self.accept(")"):
                args.append(self.term())
            return App(op, tuple(args))
        return Var(self.ident())

    # booleans

    def boolean(self):
        b = self.bool_and()
        while self.accept("IDENT", "or"):
            b = Or(b, self.bool_and())
        return b

    def bool_and(self):
        b = self.bool_atom()
        while self.accept("IDENT", "and"):
            b = And(b, self.bool_atom())
        return b

    def bool_atom(self):
        if self.accept("IDENT", "not"):
            self.expect("(")
            b = self.boolean()
            self.expect(")")
            return Not(b)
        if self.accept("IDENT", "isVar"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return IsVar(e)
        if self.at("("):
            saved = self.i, self.select_depth
            try:
                self.i += 1
                b = self.boolean()
                self.expect(")")
                if not (self.at("=") or self.at_kw("sublistOf")):
                    return b
            except ParseError:
                pass
            self.i, self.select_depth = saved
        left = self.binary()
        if self.accept("="):
            return Eq(left, self.binary())
        if self.accept("IDENT", "sublistOf"):
            return SublistOf(left, self.binary())
        raise self.error("expected '=' or 'sublistOf' in condition")

    # patterns

    def pattern(self):
        p = self.pattern_atom()
        if self.accept("DASHES"):
            self.expect("(")
            label = self.label_pattern()
            self.expect(")")
            self.expect("ARROW")
            return PPosTrans(p, label, self.pattern_atom())
        if self.accept("NEG"):
            self.expect("(")
            label = self.label_pattern()
            self.expect(")")
            self.expect("ARROW")
            return PNegTrans(p, label)
        return p

    def pattern_args(self) -> tuple:
        args = []
        while not self.at(")"):
            args.append(self.pattern())
            self.accept(",")
        return tuple(args)

    def label_pattern(self):
        if self.accept("?"):
            return PAnyHead(self.ident(), self.pattern_args())
        if self.at("IDENT") and self.peek().kind != ")":
            return POp(self.expect("IDENT").text, self.pattern_args())
        return self.pattern()

    def pattern_atom(self):
        tok = self.tok
        if self.accept("ARROW"):
            return ANY_POS_TRANS
        if tok.kind == "IDENT":
            return PVar(self.ident())
        if self.accept("["):
            items = []
            while not self.accept("]"):
                items.append(self.pattern())
                self.accept(",")
            return PList(tuple(items))
        if self.accept("("):
            if self.accept("?"):
                p = PAnyHead(self.ident(), self.pattern_args())
            elif self.at("IDENT"):
                p = POp(self.expect("IDENT").text, self.pattern_args())
            else:
                p = self.pattern()
            self.expect(")")
            return p
        found = repr(tok.text) if tok.text else "end of input"
        raise self.error(f"expected a pattern, found {found}")


def parse_surface(text: str) -> list:
    """Parse ``text`` without expanding macros (one node per check)."""
    return _Parser(text).program()


def parse_program(text: str) -> Program:
    """Parse a program and expand all macros."""
    return Program(tuple(expand_macros(c) for c in parse_surface(text)), text)


def parse_expr(text: str, in_selector: bool = False):
    """Parse and expand a single expression; handy in tests and the REPL."""
    p = _Parser(text)
    p.select_depth = int(in_selector)
    e = p.expr()
    if not p.at("EOF"):
        raise p.error(f"unexpected {p.tok.text!r}")
    return expand_macros(e)
