import pytest

from lnc import dsl
from lnc.dsl import (ANY_POS_TRANS, Append, Conclusion, Diff, Eq, ErrorExpr, GetVars, Head, If,
                     IsVar, ListLit, MapGet, MapLit, Not, PAnyHead, PatVar, PList, PNegTrans, POp,
                     PPosTrans, PredLit, Premises, PVar, Rules, Select, SelfKw, Skip, StrLit,
                     TermLit, Uniquefy, expand_macros, iter_nodes, parse_expr, parse_program,
                     parse_surface)
from lnc.gsos import MSG_PREMISE_SHAPE, bundled_program, program_source
from lnc.sos import App, ParseError, Var


def test_rule_selector_shorthand():
    assert parse_expr("rules[-->]: premises") == Select(Rules(), ANY_POS_TRANS, Premises())


def test_filter_shorthand_selects_self():
    assert parse_expr("rules[P --(L)--> P']") == \
        Select(Rules(), PPosTrans(PVar("P"), PVar("L"), PVar("P'")), SelfKw())


def test_if_without_else_defaults_to_skip():
    assert parse_expr("if isVar(P) then skip") == If(IsVar(PatVar("P")), Skip(), Skip())


def test_dangling_else_binds_innermost():
    e = parse_expr('if isVar(x) then if isVar(y) then skip else error "e"')
    assert e == If(IsVar(PatVar("x")), If(IsVar(PatVar("y")), Skip(), ErrorExpr("e")), Skip())


def test_part1_expansion_is_a_diff_chain():
    pos = PPosTrans(PVar("P"), PAnyHead("op", (PList(),)), PVar("P'"))
    neg = PNegTrans(PVar("P"), PAnyHead("op", (PList(),)))
    expected = Select(Rules(), ANY_POS_TRANS, If(
        Not(Eq(Diff(Diff(Premises(), Select(Premises(), pos, SelfKw())),
                    Select(Premises(), neg, SelfKw())),
               ListLit())),
        ErrorExpr(MSG_PREMISE_SHAPE),
        Skip()))
    assert bundled_program().statements[0] == expected


def test_sublist_of_expansion():
    e = parse_expr("if not(x sublistOf y) then skip")
    assert e.cond == Not(Eq(Diff(PatVar("x"), PatVar("y")), ListLit()))


def test_match_with_expansion_defaults():
    e = parse_expr("match x with (a [])")
    single = ListLit((PatVar("x"),))
    pattern = POp("a", (PList(),))
    assert e == If(Eq(Select(single, pattern, SelfKw()), ListLit()), Skip(),
                   Head(Select(single, pattern, Skip())))


def test_accessor_expansions():
    src = parse_expr("rules[-->]: premises.LTsources").body
    assert isinstance(src, Append)
    assert src.left.source == Premises() and isinstance(src.left.pattern, PPosTrans)
    assert src.right.source == Premises() and isinstance(src.right.pattern, PNegTrans)
    tgt = parse_expr("rules[-->]: conclusion.LTtarget").body
    assert isinstance(tgt, Head)
    assert tgt.expr.source == ListLit((Conclusion(),))
    unlabeled = parse_expr("rules[-->]: premises.Ttargets").body
    assert unlabeled.pattern == POp("-->", (PVar("%P"), PVar("%P'")))


def test_distinct_vars_expansion():
    e = parse_expr('distinctVars([x, y]) otherwise error "m"')
    assert isinstance(e, Uniquefy)
    assert e.input == ListLit((PredLit(dsl.DISTINCT_PRED, ListLit((PatVar("x"), PatVar("y")))),))
    assert e.body == If(Not(Eq(PatVar(e.map_var), MapLit(ListLit(), ListLit()))),
                        ErrorExpr("m"), Skip())


def test_uniquefy_surface_form():
    e = parse_expr('uniquefy(l, "T", new, m): m')
    assert e == Uniquefy(PatVar("l"), "T", "new", "m", PatVar("m"))


def test_map_literal_and_lookup():
    e = parse_expr("([x] => [y])(x)")
    assert e == MapGet(MapLit(ListLit((PatVar("x"),)), ListLit((PatVar("y"),))), PatVar("x"))


def test_term_literals_and_lists():
    e = parse_expr('[(par P1 (a P)), "s", getVars(x), head tail y]')
    assert e == ListLit((TermLit(App("par", (Var("P1"), App("a", (Var("P"),))))), StrLit("s"),
                         GetVars(PatVar("x")), Head(dsl.Tail(PatVar("y")))))


def test_binary_operators_left_associative():
    assert parse_expr("a - b @ c") == Append(Diff(PatVar("a"), PatVar("b")), PatVar("c"))


def test_boolean_precedence_and_parentheses():
    b = parse_expr("if isVar(a) or isVar(b) and (x = y) then skip").cond
    assert b == dsl.Or(IsVar(PatVar("a")), dsl.And(IsVar(PatVar("b")), Eq(PatVar("x"), PatVar("y"))))


def test_parenthesized_expression_in_condition():
    b = parse_expr("if ([x] @ y) = z then skip").cond
    assert b == Eq(Append(ListLit((PatVar("x"),)), PatVar("y")), PatVar("z"))


def test_paren_ident_is_a_term_literal():
    assert parse_expr("(x y)") == TermLit(App("x", (Var("y"),)))


def test_pattern_forms():
    e = parse_expr("x[(?h [a, (op1 Ps)])]")
    assert e.pattern == PAnyHead("h", (PList((PVar("a"), POp("op1", (PVar("Ps"),)))),))
    e = parse_expr("x[P -/-(L)-->]")
    assert e.pattern == PNegTrans(PVar("P"), PVar("L"))


def test_program_has_five_statements():
    assert len(parse_surface(program_source())) == 5
    assert len(bundled_program().statements) == 5


def test_no_macro_nodes_after_expansion():
    nodes = list(iter_nodes(bundled_program().statements))
    assert nodes
    assert not [n for n in nodes if isinstance(n, dsl.MACRO_NODES)]


def test_expansion_is_idempotent():
    program = bundled_program()
    assert expand_macros(program) == program
    for stmt in program.statements:
        assert expand_macros(stmt) == stmt


def test_trailing_separator_allowed():
    assert len(parse_program("skip ;; skip ;;").statements) == 2


@pytest.mark.parametrize("text, fragment", [
    ("premises", "only meaningful inside a selector"),
    ("conclusion.LTsource", "only meaningful inside a selector"),
    ("self", "only meaningful inside a selector"),
    ("x must match otherwise skip", "keyword 'otherwise'"),
    ("skip skip", "separated by ';;'"),
    ('error boom', "expected 'STRING'"),
    ("if x then skip", "expected '=' or 'sublistOf'"),
    ("[a, b", "expected ']'"),
    ('uniquefy(l, "h", x): x', "expected ','"),
    ("x[(?then a)]", "keyword"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_program(text)
    assert fragment in str(info.value)


def test_parse_error_reports_location():
    with pytest.raises(ParseError) as info:
        parse_program("skip ;;\n  premises")
    assert (info.value.line, info.value.column) == (2, 3)


def test_chained_filters():
    e = parse_expr("x[(a [])][_]: self")
    assert e == Select(Select(PatVar("x"), POp("a", (PList(),)), SelfKw()), PVar("_"), SelfKw())
