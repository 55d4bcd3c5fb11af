import random

import pytest

from monotrick.syntax import (
    And, Atom, ArityConflictError, Box, Diamond, Eq, Exists, Falsum, Forall,
    Iff, Implies, Not, Or, ParseError, Verum, classify, free_variables,
    letters, modal_depth, parse, render,
)


class TestParse:
    def test_diamond_conjunction(self):
        assert parse("<>(Q1(x) & Q2(y))") == Diamond(
            And(Atom("Q1", ("x",)), Atom("Q2", ("y",))))

    def test_constants(self):
        assert parse("true") == Verum()
        assert parse("false") == Falsum()

    def test_quantified_implication(self):
        assert parse("forall x (P(x,y) -> P(x,y))") == Forall(
            "x", Implies(Atom("P", ("x", "y")), Atom("P", ("x", "y"))))

    def test_equality_atom(self):
        assert parse("x = y -> [](x = y)") == Implies(
            Eq("x", "y"), Box(Eq("x", "y")))

    def test_propositional_letter(self):
        assert parse("p") == Atom("p")
        assert parse("(Q1(x) & Q2(y) -> p) | q") == Or(
            Implies(And(Atom("Q1", ("x",)), Atom("Q2", ("y",))), Atom("p")),
            Atom("q"))

    def test_precedence_chain(self):
        # ~, [], <>, quantifiers > & > | > -> > <->
        f = parse("~p & q | r -> s <-> t")
        assert f == Iff(Implies(Or(And(Not(Atom("p")), Atom("q")), Atom("r")),
                                Atom("s")), Atom("t"))

    def test_implies_right_associative(self):
        assert parse("p -> q -> r") == Implies(Atom("p"),
                                               Implies(Atom("q"), Atom("r")))

    def test_comments_and_whitespace(self):
        assert parse("p &  # trailing comment\n q") == And(Atom("p"), Atom("q"))

    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as info:
            parse("p & & q")
        assert info.value.line == 1
        assert info.value.col == 5

    def test_arity_conflict(self):
        with pytest.raises(ArityConflictError):
            parse("P(x) & P(x,y)")

    def test_bare_variable_rejected(self):
        with pytest.raises(ParseError):
            parse("x & p")

    def test_unexpected_character(self):
        with pytest.raises(ParseError):
            parse("p $ q")


class TestRender:
    def test_spec_shapes(self):
        assert render(Diamond(And(Atom("Q1", ("x",)), Atom("Q2", ("y",))))) \
            == "<>(Q1(x) & Q2(y))"
        assert render(Falsum()) == "false"
        assert render(Implies(Eq("x", "y"), Box(Eq("x", "y")))) \
            == "x = y -> [](x = y)"

    def test_minimal_parentheses(self):
        assert render(parse("(p & q) | r")) == "p & q | r"
        assert render(parse("p & (q | r)")) == "p & (q | r)"
        assert render(parse("(p -> q) -> r")) == "(p -> q) -> r"


def random_formula(rng, depth, vars_in_scope):
    choices = ["atom", "eq", "true", "false"]
    if depth > 0:
        choices += ["not", "and", "or", "implies", "iff", "box", "diamond",
                    "forall", "exists"]
    kind = rng.choice(choices)
    if kind == "atom":
        letter, arity = rng.choice([("p", 0), ("q", 0), ("Q1", 1), ("Q2", 1),
                                    ("P", 2)])
        args = tuple(rng.choice(vars_in_scope) for _ in range(arity))
        return Atom(letter, args)
    if kind == "eq":
        return Eq(rng.choice(vars_in_scope), rng.choice(vars_in_scope))
    if kind == "true":
        return Verum()
    if kind == "false":
        return Falsum()
    if kind in ("not", "box", "diamond"):
        ctor = {"not": Not, "box": Box, "diamond": Diamond}[kind]
        return ctor(random_formula(rng, depth - 1, vars_in_scope))
    if kind in ("forall", "exists"):
        var = rng.choice(["x", "y", "z", "u"])
        ctor = Forall if kind == "forall" else Exists
        return ctor(var, random_formula(rng, depth - 1,
                                        sorted(set(vars_in_scope) | {var})))
    ctor = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind]
    return ctor(random_formula(rng, depth - 1, vars_in_scope),
                random_formula(rng, depth - 1, vars_in_scope))


def test_parse_render_round_trip():
    rng = random.Random(2024)
    for _ in range(500):
        f = random_formula(rng, depth=5, vars_in_scope=["x", "y"])
        assert parse(render(f)) == f, render(f)


def test_free_variables():
    assert free_variables(parse("forall x P(x,y)")) == {"y"}
    assert free_variables(parse("<>(Q1(x) & Q2(y))")) == {"x", "y"}
    assert free_variables(parse("true")) == frozenset()
    assert free_variables(parse("x = y")) == {"x", "y"}


def test_letters_and_depth():
    f = parse("[]<>(P(x,y) & Q1(x)) | p")
    assert letters(f) == {"P": 2, "Q1": 1, "p": 0}
    assert modal_depth(f) == 2


class TestClassify:
    def test_kripke_trick_shape(self):
        report = classify(parse("<>(Q1(x) & Q2(y))"))
        assert report.is_monadic and not report.is_monodic
        assert report.max_letter_arity == 1
        assert report.variable_count == 2

    def test_binary_under_box(self):
        report = classify(parse("[]P(x,y)"))
        assert not report.is_monadic and not report.is_monodic
        assert report.max_letter_arity == 2

    def test_positive_variant(self):
        report = classify(parse("(Q1(x) & Q2(y) -> p) | q"))
        assert report.is_monadic and report.is_positive
        assert report.modal_depth == 0

    def test_alpha_invariance(self):
        # closed formulas, so the renaming is a bijection on names
        rng = random.Random(7)
        for _ in range(200):
            f = Forall("x", Forall("y", random_formula(
                rng, depth=4, vars_in_scope=["x", "y"])))
            renamed = _rename_bound(f, {})
            assert classify(renamed) == classify(f)

    def test_monodic_propagates_to_modal_subformulas(self):
        rng = random.Random(11)
        from monotrick.syntax import subformulas
        checked = 0
        for _ in range(300):
            f = random_formula(rng, depth=4, vars_in_scope=["x", "y"])
            if not classify(f).is_monodic:
                continue
            for g in subformulas(f):
                if isinstance(g, (Box, Diamond)):
                    assert classify(g.body).is_monodic
                    checked += 1
        assert checked > 0


def _rename_bound(f, mapping):
    if isinstance(f, Atom):
        return Atom(f.letter, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, (Verum, Falsum)):
        return f
    if isinstance(f, (Not, Box, Diamond)):
        return type(f)(_rename_bound(f.body, mapping))
    if isinstance(f, (Forall, Exists)):
        fresh = f.var + "9"  # alpha-convert every binder uniformly
        return type(f)(fresh, _rename_bound(f.body, {**mapping, f.var: fresh}))
    return type(f)(_rename_bound(f.left, mapping), _rename_bound(f.right, mapping))
