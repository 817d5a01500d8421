import pytest

from hypermc.errors import EmptyContextError, FormulaSyntaxError
from hypermc.formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Ctx,
    Eventually,
    Exists,
    ExistsP,
    ExistsProp,
    Forall,
    ForallP,
    Iff,
    Implies,
    Knows,
    Next,
    Not,
    Or,
    Prop,
    RelPltl,
    RelProp,
    Since,
    Until,
    render,
)
from hypermc.parser import parse_formula, tokenize

p, q, r = Prop("p"), Prop("q"), Prop("r")


class TestPrecedence:
    """Binding strength and associativity of the infix operators."""

    def test_01_and_binds_tighter_than_or(self):
        assert parse_formula("p & q | r", "pltl") == Or(And(p, q), r)

    def test_02_implication_is_right_associative(self):
        assert parse_formula("p -> q -> r", "pltl") == Implies(p, Implies(q, r))

    def test_03_iff_is_loosest_binary(self):
        assert parse_formula("p | q <-> r", "pltl") == Iff(Or(p, q), r)

    def test_04_until_is_right_associative(self):
        assert parse_formula("p U q U r", "pltl") == Until(p, Until(q, r))

    def test_05_prefix_operators_bind_tightest(self):
        assert parse_formula("!p U q", "pltl") == Until(Not(p), q)
        assert parse_formula("X p & q", "pltl") == And(Next(p), q)
        assert parse_formula("F G p", "pltl") == Eventually(Always(p))

    def test_06_word_connectives(self):
        assert parse_formula("not p and q or r", "pltl") == Or(And(Not(p), q), r)

    def test_07_constants(self):
        assert parse_formula("true S false", "pltl") == Since(TRUE, FALSE)


class TestHyperSyntax:
    """Trace quantifiers, relativized atoms, contexts and subscripts."""

    def test_01_quantifier_prefix(self):
        f = parse_formula("forall x. exists y. G{p} (p@x <-> p@y)")
        assert f == Forall("x", Exists("y", Always(Iff(RelProp("p", "x"), RelProp("p", "y")), (p,))))

    def test_02_quantifier_body_extends_right(self):
        f = parse_formula("existsP x. q@x & forallP y. q@y")
        assert f == ExistsP("x", And(RelProp("q", "x"), ForallP("y", RelProp("q", "y"))))

    def test_03_subscript_is_sorted_and_deduplicated(self):
        f = parse_formula("exists x. F{q, p, q} p@x")
        assert f.body.gamma == (p, q)

    def test_04_subscript_holds_pltl(self):
        f = parse_formula("exists x. X{p U q} p@x")
        assert f.body.gamma == (Until(p, q),)

    def test_05_context_variables_are_sorted(self):
        f = parse_formula("exists x. exists y. <y, x> X p@x")
        assert f.body.body == Ctx(("x", "y"), Next(RelProp("p", "x")))

    def test_06_bracketed_pltl_atom(self):
        f = parse_formula("exists x. [p U Y q]@x")
        assert f.body == RelPltl(Until(p, parse_formula("Y q", "pltl")), "x")


class TestOtherKinds:
    def test_01_qptl_propositional_quantifier(self):
        f = parse_formula("exists p. G (p <-> X !p)", "qptl")
        assert f == ExistsProp("p", Always(Iff(p, Next(Not(p)))))

    def test_02_kltl_knowledge(self):
        assert parse_formula("K[a] X o", "kltl") == Knows("a", Next(Prop("o")))

    def test_03_unknown_kind(self):
        with pytest.raises(ValueError):
            parse_formula("p", "ctl")


@pytest.mark.parametrize(
    "text, kind",
    [
        ("exists x. p", "ghyper"),  # bare proposition
        ("exists{p} x. p@x", "ghyper"),
        ("F{p} q", "pltl"),
        ("exists x. p@x", "pltl"),
        ("K[a] p@x", "ghyper"),
        ("<x> p", "pltl"),
        ("(p & q", "pltl"),
        ("p q", "pltl"),
        ("$sharp", "pltl"),
        ("p % q", "pltl"),
    ],
)
def test_rejected_inputs(text, kind):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text, kind)


def test_empty_context():
    with pytest.raises(EmptyContextError):
        parse_formula("exists x. <> p@x")


def test_error_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("p &\n  %", "pltl")
    assert (info.value.line, info.value.column) == (2, 3)


def test_internal_names_on_request():
    assert parse_formula("$sharp", "pltl", allow_internal=True) == Prop("$sharp")
    assert parse_formula("exists $a. $a", "qptl") == ExistsProp("$a", Prop("$a"))


def test_comments_are_skipped():
    assert [t.value for t in tokenize("p # trailing\n& q")] == ["p", "&", "q", ""]


@pytest.mark.parametrize(
    "text",
    [
        "forall x. forall y. (li@x <-> li@y) -> G{lo} (lo@x <-> lo@y)",
        "existsP x. (q@x & forallP y. (q@y -> (!p@x U p@y)))",
        "exists x1. existsP x2. (G (p@x1 <-> p@x2) & [Y true]@x2)",
        "forall x. exists y. <x> F{p, q U r} (<x,y> X p@y)",
    ],
)
def test_printed_form_parses_back(text):
    f = parse_formula(text)
    assert parse_formula(render(f)) == f


def test_printed_pltl_parses_back(random_pltl):
    for _ in range(200):
        f = random_pltl(("p", "q", "r"), depth=4)
        assert parse_formula(render(f), "pltl") == f
