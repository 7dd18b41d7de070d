import pytest
from hypothesis import given, strategies as st

from clg.formulas import (
    And, App, Atom, BlindAll, Bot, CAnd, COr, ChoiceAll, ChoiceEx, Const,
    Neg, Or, ParseError, Sequent, Top, Var, alpha_equal, bound_vars,
    elementarize, formula_pretty, formula_text, free_vars, is_elementary,
    negate, parse_formula, parse_sequent, parse_term, replace_at,
    sequent_elementarization, sequent_text, subformula_at, substitute,
    surface_choice_occurrences, term_text,
)


# --- terms ---

def test_term_precedence():
    t = parse_term("x+y*z'")
    assert t == App("+", (Var("x"), App("*", (Var("y"), App("'", (Var("z"),))))))


def test_successor_binds_tightest():
    assert parse_term("x+y'") == App("+", (Var("x"), App("'", (Var("y"),))))
    assert parse_term("(x+y)'") == App("'", (App("+", (Var("x"), Var("y"))),))


def test_term_roundtrip_parens():
    for s in ["(x+y)*z", "x+(y+z)", "x*(y+z)'", "f(x, g(0), y')"]:
        t = parse_term(s)
        assert parse_term(term_text(t)) == t


def test_numerals():
    assert parse_term("12") == Const(12)
    assert term_text(Const(0)) == "0"


# --- formula parsing ---

def test_connective_precedence():
    # & > | > && > ||
    f = parse_formula("p || q && r | s & t")
    assert isinstance(f, COr)
    assert isinstance(f.right, CAnd)
    assert isinstance(f.right.right, Or)
    assert isinstance(f.right.right.right, And)


def test_implication_desugars():
    f = parse_formula("p -> q")
    assert f == Or(Neg(Atom("p")), Atom("q"))


def test_implication_negates_games_properly():
    f = parse_formula("(p && q) -> r")
    assert f == Or(COr(Neg(Atom("p")), Neg(Atom("q"))), Atom("r"))


def test_negation_pushes_through_quantifiers():
    f = parse_formula("~ A x. p(x)")
    assert formula_text(f) == "E x. ~p(x)"


def test_negation_pushed_to_atoms():
    f = parse_formula("~(p & E x. q(x))")
    assert formula_text(f) == "~p | A x. ~q(x)"


def test_double_negation():
    assert parse_formula("~~p") == Atom("p")


def test_neq_sugar():
    f = parse_formula("x != y")
    assert f == Neg(Atom("=", (Var("x"), Var("y"))))
    assert formula_text(f) == "x != y"


def test_quantifier_scope_maximal():
    f = parse_formula("AA x. p(x) || q")
    assert isinstance(f, ChoiceAll)
    assert isinstance(f.body, COr)


def test_quantifier_in_operand_needs_parens():
    f = parse_formula("(AA x. p(x)) || q")
    assert isinstance(f, COr)
    assert isinstance(f.left, ChoiceAll)
    assert parse_formula(formula_text(f)) == f


def test_parse_rejects_garbage():
    for bad in ["p &", "AA . p", "x + ", "p q", "(p", "x = ", "->p"]:
        with pytest.raises(ParseError):
            parse_formula(bad)


def test_bound_free_clash_renamed():
    f = parse_formula("p(x) & AA x. q(x)")
    assert isinstance(f.right, ChoiceAll)
    assert f.right.var != "x"
    assert f.left == Atom("p", (Var("x"),))
    assert free_vars(f) == {"x"}


def test_sequent_parse():
    s = parse_sequent("p, q | r |- p && q")
    assert len(s.antecedent) == 2
    assert s.antecedent[1] == Or(Atom("q"), Atom("r"))
    assert parse_sequent(sequent_text(s)) == s


def test_empty_antecedent():
    s = parse_sequent("|- p")
    assert s.antecedent == ()
    assert sequent_text(s) == "|- p"


def test_sequent_commas_respect_parens():
    s = parse_sequent("f(x, y) = 0, p |- q")
    assert len(s.antecedent) == 2


# --- semantics-adjacent structure ---

def test_negate_involution():
    f = parse_formula("AA x. (p(x) && q) || E y. r(x, y)")
    assert negate(negate(f)) == f


def test_free_and_bound():
    f = parse_formula("A x. p(x, y) & EE z. q(z)")
    assert free_vars(f) == {"y"}
    assert bound_vars(f) == {"x", "z"}


def test_substitute_capture_avoiding():
    f = parse_formula("E y. x = y")
    g = substitute(f, {"x": Var("y")})
    # the binder must have been renamed away from y
    assert g.var != "y"
    assert free_vars(g) == {"y"}


def test_substitute_constant():
    f = parse_formula("AA y. p(x, y)")
    g = substitute(f, {"x": Const(3)})
    assert formula_text(g) == "AA y. p(3, y)"


def test_alpha_equal():
    f = parse_formula("AA x. EE y. p(x, y)")
    g = parse_formula("AA u. EE v. p(u, v)")
    h = parse_formula("AA u. EE v. p(v, u)")
    assert alpha_equal(f, g)
    assert not alpha_equal(f, h)


def test_alpha_free_vars_strict():
    assert not alpha_equal(parse_formula("p(x)"), parse_formula("p(y)"))


def test_elementarize():
    f = parse_formula("p & (q && r) | EE x. s(x)")
    e = elementarize(f)
    assert e == Or(And(Atom("p"), Top()), Bot())
    assert is_elementary(e)
    assert not is_elementary(f)


def test_elementarize_skips_nested_choices():
    f = parse_formula("(p && (q || r)) | s")
    e = elementarize(f)
    assert e == Or(Top(), Atom("s"))


def test_blind_quantifiers_are_transparent():
    f = parse_formula("A x. (p(x) && q)")
    occs = list(surface_choice_occurrences(f))
    assert len(occs) == 1
    assert occs[0][0] == (0,)
    e = elementarize(f)
    assert e == BlindAll("x", Top())


def test_sequent_elementarization():
    s = parse_sequent("p, q |- r && s")
    e = sequent_elementarization(s)
    assert e == Or(Or(Neg(Atom("p")), Neg(Atom("q"))), Top())


def test_paths():
    f = parse_formula("p & (q | r)")
    assert subformula_at(f, (1, 0)) == Atom("q")
    g = replace_at(f, (1, 0), Atom("z"))
    assert formula_text(g) == "p & (z | r)"
    assert subformula_at(f, ()) == f


# --- property tests ---

_names = st.sampled_from(["x", "y", "z", "u", "v"])
_preds = st.sampled_from(["p", "q", "r"])


@st.composite
def terms(draw, depth=2):
    if depth == 0:
        return draw(st.one_of(
            st.builds(Var, _names),
            st.builds(Const, st.integers(0, 9))))
    kind = draw(st.integers(0, 4))
    if kind == 0:
        return Var(draw(_names))
    if kind == 1:
        return Const(draw(st.integers(0, 20)))
    if kind == 2:
        return App("'", (draw(terms(depth - 1)),))
    op = "+" if kind == 3 else "*"
    return App(op, (draw(terms(depth - 1)), draw(terms(depth - 1))))


@st.composite
def formulas(draw, depth=3):
    if depth == 0:
        if draw(st.booleans()):
            a = Atom(draw(_preds), tuple(draw(st.lists(terms(1), max_size=2))))
        else:
            a = Atom("=", (draw(terms(1)), draw(terms(1))))
        return Neg(a) if draw(st.booleans()) else a
    kind = draw(st.integers(0, 8))
    if kind <= 3:
        cls = (And, Or, CAnd, COr)[kind]
        return cls(draw(formulas(depth - 1)), draw(formulas(depth - 1)))
    if kind <= 7:
        from clg.formulas import BlindEx, ChoiceAll as CA, ChoiceEx as CE
        cls = (BlindAll, BlindEx, CA, CE)[kind - 4]
        return cls(draw(_names), draw(formulas(depth - 1)))
    return draw(formulas(0))


@given(terms())
def test_term_print_parse_roundtrip(t):
    assert parse_term(term_text(t)) == t


@given(formulas())
def test_formula_print_parse_roundtrip(f):
    # parsing may rename binders that clash with free variables,
    # so compare up to alpha
    assert alpha_equal(parse_formula(formula_text(f)), f)


@given(formulas())
def test_negate_is_involution(f):
    assert negate(negate(f)) == f


@given(formulas())
def test_elementarize_idempotent(f):
    e = elementarize(f)
    assert is_elementary(e)
    assert elementarize(e) == e


@given(formulas())
def test_pretty_printer_total(f):
    assert isinstance(formula_pretty(f), str)
