import itertools

import pytest
from hypothesis import given, settings

from setlogic.formula import (
    BOT, FO, PROP, SET, TOP, And, Assignment, Atom, Eq, Exists, Forall, FormulaError, Implies, In,
    Not, Or, Signature, apply_assignment, constant_fold, free_vars, ground_substitutions,
    ground_value, parse_formula, render_formula, rename_vars, size,
)
from setlogic.structures import Structure, enumerate_structures, evaluate, valid_in
from strategies import fo_formulas, prop_formulas, set_formulas

P = lambda *a: Atom("P", a)
p, q = Atom("p"), Atom("q")


def test_parse_implication():
    assert parse_formula("p -> p", PROP) == Implies(p, p)


def test_parse_two_existentials():
    f = parse_formula("exists x. P(x) & exists x. ~P(x)", FO)
    assert f == And(Exists("x", P("x")), Exists("x", Not(P("x"))))


def test_parse_rejects_unknown_symbol_in_set_language():
    with pytest.raises(FormulaError):
        parse_formula("forall x. (x in a -> phi)", SET)


def test_parse_precedence_and_associativity():
    assert parse_formula("p | q & ~p -> q", PROP) == Implies(Or(p, And(q, Not(p))), q)
    assert parse_formula("p -> q -> p", PROP) == Implies(p, Implies(q, p))


def test_parse_unicode_connectives():
    assert parse_formula("¬p ∨ (p → ⊥)", PROP) == Or(Not(p), Implies(p, BOT))


@pytest.mark.parametrize("text", ["p |", "(p", "p q", "forall . p", ""])
def test_parse_errors(text):
    with pytest.raises(FormulaError):
        parse_formula(text, PROP if "forall" not in text else FO)


def test_parse_inconsistent_arity():
    with pytest.raises(FormulaError):
        parse_formula("P(x) & P(x, y)", FO)


@pytest.mark.parametrize("f, text", [
    (TOP, "true"),
    (And(p, q), "p & q"),
    (Forall("x", Implies(In("x", "a"), BOT)), "forall x. (x in a -> false)"),
])
def test_render(f, text):
    assert render_formula(f) == text


@given(prop_formulas())
def test_roundtrip_propositional(f):
    assert parse_formula(render_formula(f), PROP) == f


@given(set_formulas(free=("x", "y", "z")))
def test_roundtrip_set(f):
    assert parse_formula(render_formula(f), SET) == f


@given(fo_formulas())
def test_roundtrip_first_order(f):
    assert parse_formula(render_formula(f), FO) == f


def test_free_vars():
    assert free_vars(Forall("x", P("x"))) == frozenset()
    assert free_vars(Atom("P", ("x", "y"))) == {"x", "y"}
    assert free_vars(Exists("x", In("x", "a"))) == {"a"}


def test_size_counts_nodes():
    assert size(parse_formula("~(p & q) -> p", PROP)) == 6


def test_assignment_membership_instance():
    a = Assignment({"R": In("x0", "x1")})
    assert apply_assignment(a, Atom("R", ("y", "z"))) == In("y", "z")


def test_assignment_constant():
    a = Assignment({"p": TOP})
    assert apply_assignment(a, Or(p, Not(p))) == Or(TOP, Not(TOP))


def test_assignment_avoids_capture():
    a = Assignment({"P": Exists("w", In("x0", "w"))})
    assert apply_assignment(a, Forall("y", P("y"))) == Forall("y", Exists("w", In("y", "w")))
    captured = apply_assignment(a, Forall("w", P("w")))
    (bound,) = {captured.body.var}
    assert captured.body.body == In("w", bound) and bound != "w"


def test_capture_avoidance_by_evaluation():
    # P(v) := exists w. v in w, applied under a binder named w, must keep its meaning
    a = Assignment({"P": Exists("w", In("x0", "w"))})
    f = Forall("w", P("w"))
    expected = Forall("w", Exists("u", In("w", "u")))
    sig = Signature((("in", 2),))
    for n in (1, 2):
        for m in enumerate_structures(sig, n):
            assert evaluate(m, apply_assignment(a, f)) == evaluate(m, expected)


def test_assignment_rejects_extra_variables():
    with pytest.raises(FormulaError):
        Assignment({"P": In("x0", "y")}, {"P": 1})


def test_rename_is_capture_avoiding():
    f = Exists("y", In("x", "y"))
    g = rename_vars(f, {"x": "y"})
    assert free_vars(g) == {"y"} and g.var != "y"


def test_ground_substitutions_order():
    sig = Signature((("p", 0),))
    assert [dict(t) for t in ground_substitutions(sig)] == [{"p": False}, {"p": True}]
    sig2 = Signature((("P", 1), ("Q", 0)))
    subs = [dict(t) for t in ground_substitutions(sig2)]
    assert len(subs) == 4 == len({tuple(sorted(s.items())) for s in subs})
    assert subs[1] == {"P": False, "Q": True}  # first symbol most significant
    assert [dict(t) for t in ground_substitutions(Signature(()))] == [{}]


def test_constant_fold():
    assert constant_fold(And(TOP, Not(BOT))) == TOP
    assert constant_fold(And(Exists("x", TOP), Exists("x", Not(TOP)))) == BOT
    assert constant_fold(Forall("x", Implies(BOT, BOT))) == TOP
    with pytest.raises(FormulaError):
        constant_fold(p)


@settings(max_examples=200)
@given(fo_formulas())
def test_ground_value_matches_one_element_structures(f):
    # a ground substitution is a one-element structure: P holds everywhere or nowhere
    sig = Signature.of(f)
    for tau in ground_substitutions(sig):
        m = Structure((0,), {s: frozenset([(0,) * n]) if tau[s] else frozenset() for s, n in sig})
        assert ground_value(tau, f) == valid_in(m, f)


@settings(max_examples=100)
@given(fo_formulas())
def test_ground_value_is_fold_of_substitution(f):
    sig = Signature.of(f)
    for tau in itertools.islice(ground_substitutions(sig), 4):
        image = apply_assignment(tau.assignment(), f)
        assert constant_fold(image) == (TOP if ground_value(tau, f) else BOT)


def test_equality_in_set_language():
    assert parse_formula("x = y", SET) == Eq("x", "y")
