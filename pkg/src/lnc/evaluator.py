"""Evaluator for core (macro-free) Lang-n-Change expressions.

Runtime values are plain Python objects:

========================  =====================================
DSL value                 Python representation
========================  =====================================
term                      :class:`~lnc.sos.Var` / :class:`~lnc.sos.App`
string                    ``str``
list                      ``tuple``
map                       :class:`Map`
rule                      :class:`~lnc.sos.Rule`
formula                   ``PosTrans`` / ``NegTrans`` / ``Pred``
unit                      :data:`UNIT`
========================  =====================================

Equality is Python ``==``, which is structural for all of the above.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Any, Mapping

from . import dsl
from .dsl import (Append, Conclusion, Diff, ErrorExpr, GetVars, Head, If, ListLit, MapGet,
                  MapLit, PatVar, PredLit, Premises, Program, Rules, Select, SelfKw, Skip,
                  StrLit, Tail, TermLit, Uniquefy)
from .sos import (App, LanguageDef, NegTrans, PosTrans, Pred, Rule, Term, Var, format_formula,
                  format_rule, format_term, formula_terms)


class EvalError(Exception):
    """Base for errors raised while running a program.

    ``rule`` is the rule being inspected when the error fired, if any.
    """

    kind = "fault"

    def __init__(self, message: str, rule: Rule | None = None):
        super().__init__(message)
        self.message = message
        self.rule = rule


class UserError(EvalError):
    """Raised by ``error "..."``; the message is exactly the given string."""

    kind = "user"


class RuntimeFault(EvalError):
    """Head of an empty list, unbound variable, missing key, type mismatch."""


class _Unit:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNIT"


UNIT = _Unit()


@dataclass(frozen=True)
class Map:
    """An ordered map with pairwise-distinct keys."""

    items: tuple[tuple[Any, Any], ...] = ()

    def get(self, key):
        for k, v in self.items:
            if k == key:
                return v
        raise KeyError(key)

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class Env:
    bindings: Mapping[str, Any] = field(default_factory=lambda: MappingProxyType({}))
    rule: Rule | None = None
    self_value: Any = None

    def bind(self, new: Mapping[str, Any]) -> Env:
        merged = dict(self.bindings)
        merged.update(new)
        return replace(self, bindings=MappingProxyType(merged))


# -- pattern matching -----------------------------------------------------------

def match_pattern(p, v, bindings: Mapping[str, Any] | None = None) -> dict | None:
    """Match ``v`` against ``p``, returning the extended bindings or None.

    A rule matched against a non-variable pattern is matched through its
    conclusion.
    """
    out = dict(bindings or {})
    if isinstance(v, Rule) and not isinstance(p, dsl.PVar):
        v = v.conclusion
    return out if _match(p, v, out) else None


def _bind(name: str, v, out: dict) -> bool:
    if name == "_":
        return True
    if name in out:
        return out[name] == v
    out[name] = v
    return True


def _match_args(pats: tuple, args: tuple, out: dict) -> bool:
    if len(pats) == 1 and isinstance(pats[0], dsl.PVar):
        return _bind(pats[0].name, args, out)
    if len(pats) == 1 and isinstance(pats[0], dsl.PList):
        return _match(pats[0], args, out)
    if len(pats) != len(args):
        return False
    return all(_match(p, a, out) for p, a in zip(pats, args))


def _match(p, v, out: dict) -> bool:
    match p:
        case dsl.PVar(name):
            return _bind(name, v, out)
        case dsl.PList(items):
            return (isinstance(v, tuple) and len(v) == len(items)
                    and all(_match(q, x, out) for q, x in zip(items, v)))
        case dsl.POp(name, args):
            if isinstance(v, App) and v.op == name or isinstance(v, Pred) and v.name == name:
                return _match_args(args, v.args, out)
            return False
        case dsl.PAnyHead(head, args):
            if isinstance(v, App):
                return _bind(head, v.op, out) and _match_args(args, v.args, out)
            if isinstance(v, Pred):
                return _bind(head, v.name, out) and _match_args(args, v.args, out)
            return False
        case dsl.PPosTrans(s, l, t):
            return (isinstance(v, PosTrans) and _match(s, v.source, out)
                    and _match(l, v.label, out) and _match(t, v.target, out))
        case dsl.PNegTrans(s, l):
            return isinstance(v, NegTrans) and _match(s, v.source, out) and _match(l, v.label, out)
    raise TypeError(f"not a pattern: {p!r}")


# -- data operations --------------------------------------------------------------

def list_diff(a: tuple, b: tuple) -> tuple:
    """Elements of ``a`` in order, dropping every one equal to some element of ``b``."""
    return tuple(x for x in a if x not in b)


def get_vars(v) -> tuple[Var, ...]:
    """Metavariables used in ``v``, pre-order, duplicates kept."""
    out: list[Var] = []
    _collect_vars(v, out)
    return tuple(out)


def _collect_vars(v, out: list) -> None:
    match v:
        case Var():
            out.append(v)
        case App(_, args):
            for a in args:
                _collect_vars(a, out)
        case PosTrans() | NegTrans() | Pred():
            for t in formula_terms(v):
                _collect_vars(t, out)
        case Rule(premises, conclusion):
            for f in premises:
                _collect_vars(f, out)
            _collect_vars(conclusion, out)
        case tuple():
            for x in v:
                _collect_vars(x, out)
        case _:
            raise RuntimeFault(f"getVars expects terms, formulae, rules or lists, got {type_name(v)}")


def uniquefy(formulae: tuple, hint: str = "", lang: LanguageDef | None = None):
    """Give every repeated metavariable occurrence a fresh distinct name.

    Returns ``(new_formulae, changes)`` where ``changes`` maps each repeated
    metavariable to the list of names its occurrences received. The k-th
    occurrence of ``T1`` becomes ``T1k`` (``T11``, ``T12``, ...), skipping
    names already in use. When ``hint`` names a grammar category of ``lang``,
    only metavariables of that category are split.
    """
    for f in formulae:
        if not isinstance(f, (PosTrans, NegTrans, Pred)):
            raise RuntimeFault(f"uniquefy expects a list of formulae, got {type_name(f)}")
    counts: dict[Var, int] = {}
    for v in get_vars(formulae):
        counts[v] = counts.get(v, 0) + 1

    categories = {g.category for g in lang.grammars} if lang else set()
    if hint in categories:
        def eligible(v: Var) -> bool:
            return lang.category_of(v) == hint
    else:
        def eligible(v: Var) -> bool:
            return True

    used = {v.name for v in counts}
    seen: dict[Var, int] = {}
    renamed: dict[Var, list[Var]] = {}

    def fresh(v: Var) -> Var:
        k = seen[v]
        while True:
            cand = Var(v.root, v.suffix + str(k))
            if cand.name not in used:
                used.add(cand.name)
                seen[v] = k
                return cand
            k += 1

    def rename_term(t: Term) -> Term:
        if isinstance(t, Var):
            if counts[t] < 2 or not eligible(t):
                return t
            seen[t] = seen.get(t, 0) + 1
            new = fresh(t)
            renamed.setdefault(t, []).append(new)
            return new
        return App(t.op, tuple(rename_term(a) for a in t.args))

    new = []
    for f in formulae:
        match f:
            case PosTrans(s, l, t):
                s = rename_term(s)
                l = rename_term(l)
                new.append(PosTrans(s, l, rename_term(t)))
            case NegTrans(s, l):
                s = rename_term(s)
                new.append(NegTrans(s, rename_term(l)))
            case Pred(name, args):
                new.append(Pred(name, tuple(rename_term(a) for a in args)))
    changes = Map(tuple((k, tuple(vs)) for k, vs in renamed.items()))
    return tuple(new), changes


def type_name(v) -> str:
    match v:
        case Var() | App():
            return "term"
        case str():
            return "string"
        case tuple():
            return "list"
        case Map():
            return "map"
        case Rule():
            return "rule"
        case PosTrans() | NegTrans() | Pred():
            return "formula"
        case _Unit():
            return "unit"
    return type(v).__name__


# -- evaluation -------------------------------------------------------------------

class Evaluator:
    def __init__(self, lang: LanguageDef):
        self.lang = lang
        self._dispatch = {
            PatVar: self._patvar, StrLit: lambda e, env: e.value,
            TermLit: lambda e, env: self._instantiate(e.term, env),
            PredLit: self._predlit, ListLit: self._listlit, Head: self._head, Tail: self._tail,
            Append: self._append, Diff: self._diff, MapLit: self._maplit, MapGet: self._mapget,
            Rules: lambda e, env: self.lang.rules, Premises: self._premises,
            Conclusion: self._conclusion, SelfKw: self._self, Select: self._select,
            Uniquefy: self._uniquefy, GetVars: self._getvars, If: self._if,
            Skip: lambda e, env: UNIT, ErrorExpr: self._error,
        }

    def run(self, program: Program, env: Env | None = None):
        """Run each statement in order and return the last value."""
        env = env or Env()
        result = UNIT
        for stmt in program.statements:
            result = self.eval(stmt, env)
        return result

    def eval(self, e, env: Env):
        try:
            handler = self._dispatch[type(e)]
        except KeyError:
            raise TypeError(f"not a core expression: {e!r}") from None
        return handler(e, env)

    def _fault(self, message: str, env: Env) -> RuntimeFault:
        return RuntimeFault(message, env.rule)

    def _list(self, e, env: Env, what: str) -> tuple:
        v = self.eval(e, env)
        if type(v) is not tuple:
            raise self._fault(f"{what} expects a list, got {type_name(v)}", env)
        return v

    def _patvar(self, e: PatVar, env: Env):
        try:
            return env.bindings[e.name]
        except KeyError:
            raise self._fault(f"unbound variable {e.name}", env) from None

    def _predlit(self, e: PredLit, env: Env):
        return Pred(e.name, self._list(e.args, env, "predicate construction"))

    def _listlit(self, e: ListLit, env: Env):
        return tuple([self.eval(x, env) for x in e.items])

    def _head(self, e: Head, env: Env):
        lst = self._list(e.expr, env, "head")
        if not lst:
            raise self._fault("head of empty list", env)
        return lst[0]

    def _tail(self, e: Tail, env: Env):
        lst = self._list(e.expr, env, "tail")
        if not lst:
            raise self._fault("tail of empty list", env)
        return lst[1:]

    def _append(self, e: Append, env: Env):
        return self._list(e.left, env, "@") + self._list(e.right, env, "@")

    def _diff(self, e: Diff, env: Env):
        return list_diff(self._list(e.left, env, "-"), self._list(e.right, env, "-"))

    def _maplit(self, e: MapLit, env: Env):
        keys = self._list(e.keys, env, "map keys")
        values = self._list(e.values, env, "map values")
        if len(keys) != len(values):
            raise self._fault("map literal has unequal numbers of keys and values", env)
        if len(set(map(_hashable, keys))) != len(keys):
            raise self._fault("map literal has duplicate keys", env)
        return Map(tuple(zip(keys, values)))

    def _mapget(self, e: MapGet, env: Env):
        m = self.eval(e.map, env)
        key = self.eval(e.key, env)
        if not isinstance(m, Map):
            raise self._fault(f"lookup on a {type_name(m)}, not a map", env)
        try:
            return m.get(key)
        except KeyError:
            raise self._fault(f"key {render(key)} not in map", env) from None

    def _premises(self, e, env: Env):
        if env.rule is None:
            raise self._fault("premises used outside a rule selector", env)
        return env.rule.premises

    def _conclusion(self, e, env: Env):
        if env.rule is None:
            raise self._fault("conclusion used outside a rule selector", env)
        return env.rule.conclusion

    def _self(self, e, env: Env):
        if env.self_value is None:
            raise self._fault("self used outside a selector", env)
        return env.self_value

    def _select(self, e: Select, env: Env):
        return self.select(self._list(e.source, env, "selector"), e.pattern, e.body, env)

    def _uniquefy(self, e: Uniquefy, env: Env):
        formulae = self._list(e.input, env, "uniquefy")
        try:
            new, changes = uniquefy(formulae, e.hint, self.lang)
        except RuntimeFault as err:
            raise self._fault(err.message, env) from None
        return self.eval(e.body, env.bind({e.new_var: new, e.map_var: changes}))

    def _getvars(self, e: GetVars, env: Env):
        try:
            return get_vars(self.eval(e.expr, env))
        except RuntimeFault as err:
            raise self._fault(err.message, env) from None

    def _if(self, e: If, env: Env):
        return self.eval(e.then if self.test(e.cond, env) else e.orelse, env)

    def _error(self, e: ErrorExpr, env: Env):
        raise UserError(e.message, env.rule)

    def select(self, source: tuple, pattern, body, env: Env) -> tuple:
        """Evaluate ``body`` once per element of ``source`` matching ``pattern``."""
        out = []
        for item in source:
            bound = match_pattern(pattern, item, env.bindings)
            if bound is None:
                continue
            inner = Env(MappingProxyType(bound),
                        item if isinstance(item, Rule) else env.rule,
                        item)
            out.append(self.eval(body, inner))
        return tuple(out)

    def test(self, b, env: Env) -> bool:
        match b:
            case dsl.Eq(l, r):
                return self.eval(l, env) == self.eval(r, env)
            case dsl.IsVar(x):
                return isinstance(self.eval(x, env), Var)
            case dsl.And(l, r):
                return self.test(l, env) and self.test(r, env)
            case dsl.Or(l, r):
                return self.test(l, env) or self.test(r, env)
            case dsl.Not(x):
                return not self.test(x, env)
        raise TypeError(f"not a boolean expression: {b!r}")

    def _instantiate(self, t: Term, env: Env):
        if isinstance(t, App):
            return App(t.op, tuple(self._instantiate(a, env) for a in t.args))
        name = t.name
        if name in env.bindings:
            v = env.bindings[name]
            if not isinstance(v, (Var, App)):
                raise self._fault(f"{name} is a {type_name(v)}, not a term", env)
            return v
        var = self.lang.split_metavar(name)
        if var is None:
            raise self._fault(f"{name} is neither bound nor a metavariable", env)
        return var


def _hashable(v):
    try:
        hash(v)
        return v
    except TypeError:
        return repr(v)


def evaluate(e, lang: LanguageDef, env: Env | None = None):
    """Evaluate a single core expression against ``lang``."""
    return Evaluator(lang).eval(e, env or Env())


def run_program(program: Program, lang: LanguageDef):
    return Evaluator(lang).run(program)


# -- rendering --------------------------------------------------------------------

def render(v, roots=None) -> str:
    """Render a value in surface syntax."""
    match v:
        case Var() | App():
            return format_term(v)
        case PosTrans() | NegTrans() | Pred():
            return format_formula(v, roots)
        case Rule():
            return format_rule(v, roots)
        case str():
            return json.dumps(v)
        case tuple():
            return "[" + ", ".join(render(x, roots) for x in v) + "]"
        case Map(items):
            keys = ", ".join(render(k, roots) for k, _ in items)
            vals = ", ".join(render(x, roots) for _, x in items)
            return f"([{keys}] => [{vals}])"
        case _Unit():
            return "unit"
    return repr(v)
