"""GSOS rule-format validation.

Two independent routes produce a :class:`ValidationReport`:

* :func:`validate_gsos` runs the bundled Lang-n-Change program ``gsos.lnc``;
* :func:`reference_check` re-implements the same five checks natively and
  serves as a differential-testing oracle for the first.

Both walk the checks part by part (every rule through Part 1, then every
rule through Part 2, ...) and stop at the first violation. Rules whose
conclusion is not a positive labeled transition are outside ``rules[-->]``
and are therefore not inspected. Finiteness of the label set and of the
rule set holds for any finite language file, so neither is checked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .dsl import Program, parse_program
from .evaluator import EvalError, UserError, run_program
from .sos import App, LanguageDef, NegTrans, PosTrans, Rule, Term, Var, format_rule, term_vars

MSG_PREMISE_SHAPE = ("Premises must be either positive labeled transitions or negative "
                     "labeled transitions, and their label must be a constant")
MSG_CONCLUSION_ARGS = ("The operator that is the subject of the conclusion must have all "
                       "metavariables as arguments")
MSG_CONCLUSION_SHAPE = ("Conclusion formulae must be positive labeled transitions with a "
                        "constant label and must apply to an operator")
MSG_PREMISE_SOURCES = ("Sources of premises must be arguments of the operator in the source "
                       "of the conclusion")
MSG_PREMISE_TARGETS = "Targets of premises must be metavariables"
MSG_DISTINCT = ("The arguments of the operator in the source of the conclusion and the "
                "targets of the premises must all be distinct metavariables")
MSG_TARGET_VARS = ("The metavariables in the target of the conclusion must come from the "
                   "source of the conclusion or from the targets of premises")

PART_OF_MESSAGE = {
    MSG_PREMISE_SHAPE: 1,
    MSG_CONCLUSION_ARGS: 2,
    MSG_CONCLUSION_SHAPE: 2,
    MSG_PREMISE_SOURCES: 3,
    MSG_PREMISE_TARGETS: 3,
    MSG_DISTINCT: 4,
    MSG_TARGET_VARS: 5,
}

PROGRAM_RESOURCE = "gsos.lnc"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation run.

    ``part`` is 1..5 for a format violation and 0 when the DSL evaluator
    faulted (a validator bug, never a verdict about the language).
    ``rule_index`` is 1-based over all rules of the language.
    """

    passed: bool
    part: int | None = None
    message: str | None = None
    rule_index: int | None = None
    rule_text: str | None = None

    @property
    def outcome(self) -> str:
        return "pass" if self.passed else "fail"

    def as_dict(self, file: str | None = None) -> dict:
        return {"file": file, "outcome": self.outcome, "part": self.part,
                "rule_index": self.rule_index, "message": self.message}

    def to_json(self, file: str | None = None) -> str:
        return json.dumps(self.as_dict(file))


PASS = ValidationReport(True)


@dataclass(frozen=True)
class GsosRuleShape:
    """A rule decomposed as ``(op x1..xh) --l--> t`` with its premises."""

    op: str
    xs: tuple[Var, ...]
    label: Term
    pos_premises: tuple[tuple[Var, Term, Var], ...]
    neg_premises: tuple[tuple[Var, Term], ...]
    target: Term

    @property
    def ys(self) -> tuple[Var, ...]:
        return tuple(y for _, _, y in self.pos_premises)


def program_source() -> str:
    return resources.files(__package__).joinpath(PROGRAM_RESOURCE).read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def bundled_program() -> Program:
    """The parsed, macro-expanded GSOS validator."""
    return parse_program(program_source())


def _fail(lang: LanguageDef, part: int, message: str, rule: Rule | None) -> ValidationReport:
    index = text = None
    if rule is not None:
        index = next((i for i, r in enumerate(lang.rules, 1) if r is rule), None)
        text = format_rule(rule, lang.roots)
    return ValidationReport(False, part, message, index, text)


def validate_gsos(lang: LanguageDef) -> ValidationReport:
    """Validate ``lang`` by running the bundled DSL program over it."""
    try:
        run_program(bundled_program(), lang)
    except UserError as err:
        return _fail(lang, PART_OF_MESSAGE.get(err.message, 0), err.message, err.rule)
    except EvalError as err:
        return _fail(lang, 0, err.message, err.rule)
    return PASS


# -- native reference checker ------------------------------------------------------

def _is_constant(t: Term) -> bool:
    return isinstance(t, App) and not t.args


def _part1(rule: Rule) -> str | None:
    for p in rule.premises:
        if not isinstance(p, (PosTrans, NegTrans)) or not _is_constant(p.label):
            return MSG_PREMISE_SHAPE
    return None


def _part2(rule: Rule) -> str | None:
    c = rule.conclusion
    if not (isinstance(c.source, App) and _is_constant(c.label)):
        return MSG_CONCLUSION_SHAPE
    if not all(isinstance(a, Var) for a in c.source.args):
        return MSG_CONCLUSION_ARGS
    return None


def _part3(rule: Rule) -> str | None:
    xs = term_vars(rule.conclusion.source)
    pos = [p for p in rule.premises if isinstance(p, PosTrans)]
    neg = [p for p in rule.premises if isinstance(p, NegTrans)]
    if any(p.source not in xs for p in pos + neg):
        return MSG_PREMISE_SOURCES
    if not all(isinstance(p.target, Var) for p in pos):
        return MSG_PREMISE_TARGETS
    return None


def _xs_and_ys(rule: Rule) -> list[Var]:
    ys = [p.target for p in rule.premises if isinstance(p, PosTrans)]
    return term_vars(rule.conclusion.source) + ys


def _part4(rule: Rule) -> str | None:
    names = _xs_and_ys(rule)
    return MSG_DISTINCT if len(set(names)) != len(names) else None


def _part5(rule: Rule) -> str | None:
    allowed = set(_xs_and_ys(rule))
    if any(v not in allowed for v in term_vars(rule.conclusion.target)):
        return MSG_TARGET_VARS
    return None


_PARTS = (_part1, _part2, _part3, _part4, _part5)


def rule_shape(rule: Rule) -> GsosRuleShape | None:
    """Decompose ``rule`` if it is a GSOS rule, else return None."""
    if not isinstance(rule.conclusion, PosTrans) or any(check(rule) for check in _PARTS):
        return None
    c = rule.conclusion
    return GsosRuleShape(
        c.source.op, tuple(c.source.args), c.label,
        tuple((p.source, p.label, p.target) for p in rule.premises if isinstance(p, PosTrans)),
        tuple((p.source, p.label) for p in rule.premises if isinstance(p, NegTrans)),
        c.target)


def reference_check(lang: LanguageDef) -> ValidationReport:
    """Check ``lang`` against the GSOS restrictions without the DSL."""
    selected = [r for r in lang.rules if isinstance(r.conclusion, PosTrans)]
    for part, check in enumerate(_PARTS, 1):
        for rule in selected:
            message = check(rule)
            if message is not None:
                return _fail(lang, part, message, rule)
    return PASS
