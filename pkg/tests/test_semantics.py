import json
import random

import pytest

from monotrick.semantics import (
    Equality, EvaluationError, Frame, Model, evaluate, frame_from_dict,
    identity_partition, model_from_dict, model_to_dict, valid_in_model,
    validate_model,
)
from monotrick.syntax import parse
from tests.test_syntax import random_formula


def simple_model(mode="modal", access=None, valuation=None, classes=None,
                 principle="eq3", domains=None,
                 worlds=("w", "v")):
    frame = Frame(tuple(worlds),
                  frozenset(access if access is not None
                            else [("w", "v"), ("w", "w"), ("v", "v")]))
    domains = domains or {w: ("a", "b") for w in worlds}
    classes = classes or {w: identity_partition(domains[w]) for w in worlds}
    return Model(
        frame=frame,
        domains=domains,
        valuation=valuation or {w: {} for w in worlds},
        equality=Equality(principle, classes),
        mode=mode,
    )


class TestValidate:
    def test_identity_everywhere_is_clean(self):
        assert validate_model(simple_model()) == []

    def test_eq1_upward_violation(self):
        m = simple_model(
            principle="eq1",
            classes={"w": (frozenset({"a", "b"}),),
                     "v": identity_partition(("a", "b"))})
        names = [v.name for v in validate_model(m)]
        assert "Eq1 upward heredity" in names

    def test_eq2_downward_violation(self):
        m = simple_model(
            principle="eq2",
            classes={"w": identity_partition(("a", "b")),
                     "v": (frozenset({"a", "b"}),)})
        names = [v.name for v in validate_model(m)]
        assert "Eq2 downward heredity" in names
        assert "Eq1 upward heredity" not in names

    def test_eq3_identity_violation(self):
        m = simple_model(classes={"w": (frozenset({"a", "b"}),),
                                  "v": (frozenset({"a", "b"}),)})
        names = [v.name for v in validate_model(m)]
        assert "Eq3 identity" in names

    def test_intuitionistic_needs_preorder(self):
        m = simple_model(mode="int", access=[("w", "v")])
        names = [v.name for v in validate_model(m)]
        assert "intuitionistic frame must be a preorder" in names

    def test_intuitionistic_valuation_heredity(self):
        m = simple_model(
            mode="int",
            valuation={"w": {"Q": frozenset({("a",)})}, "v": {}})
        names = [v.name for v in validate_model(m)]
        assert "valuation heredity" in names

    def test_congruence_violation(self):
        m = simple_model(
            principle="eq1",
            classes={"w": (frozenset({"a", "b"}),),
                     "v": (frozenset({"a", "b"}),)},
            valuation={"w": {"Q": frozenset({("a",)})}, "v": {}})
        names = [v.name for v in validate_model(m)]
        assert "congruence" in names

    def test_expanding_domains_violation(self):
        m = simple_model(domains={"w": ("a", "b"), "v": ("a",)})
        names = [v.name for v in validate_model(m)]
        assert "expanding domains" in names


class TestEvaluate:
    def test_box_true_everywhere(self):
        m = simple_model()
        for w in m.frame.worlds:
            assert evaluate(m, w, {}, parse("[]true"))

    def test_dead_end_box_vacuous(self):
        m = simple_model(access=[])
        assert evaluate(m, "w", {}, parse("[]false"))
        assert not evaluate(m, "w", {}, parse("<>true"))

    def test_modality_rejected_in_int_mode(self):
        m = simple_model(mode="int")
        with pytest.raises(EvaluationError):
            evaluate(m, "w", {}, parse("[]true"))

    def test_unassigned_variable(self):
        m = simple_model()
        with pytest.raises(EvaluationError):
            evaluate(m, "w", {}, parse("Q(x)"))

    def test_assignment_outside_domain(self):
        m = simple_model()
        with pytest.raises(EvaluationError):
            evaluate(m, "w", {"x": "zz"}, parse("Q(x)"))

    def test_intuitionistic_chain(self):
        # Q holds of a only at the later world: both Q(x) and ~Q(x) fail
        # at the root.  Cross-checked against the naive evaluator below.
        m = simple_model(
            mode="int", principle="eq1",
            valuation={"w": {}, "v": {"Q": frozenset({("a",)})}})
        assert validate_model(m) == []
        for text in ("Q(x)", "~Q(x)"):
            assert evaluate(m, "w", {"x": "a"}, parse(text)) is False
            assert naive_int_eval(m, "w", {"x": "a"}, parse(text)) is False
        assert evaluate(m, "v", {"x": "a"}, parse("Q(x)")) is True

    def test_equality_uses_partition(self):
        m = simple_model(
            principle="eq1",
            classes={"w": (frozenset({"a", "b"}),),
                     "v": (frozenset({"a", "b"}),)})
        assert evaluate(m, "w", {"x": "a", "y": "b"}, parse("x = y"))

    def test_intuitionistic_agrees_with_naive_oracle(self):
        rng = random.Random(99)
        m = simple_model(
            mode="int", principle="eq1",
            valuation={"w": {"Q1": frozenset({("a",)})},
                       "v": {"Q1": frozenset({("a",), ("b",)}),
                             "Q2": frozenset({("b",)})}})
        assert validate_model(m) == []
        for _ in range(300):
            f = random_formula(rng, depth=3, vars_in_scope=["x"])
            if any(tok in str(f) for tok in ("[]", "<>", "P(")):
                continue
            sigma = {x: rng.choice(("a", "b")) for x in ("x", "y", "z", "u")}
            for w in m.frame.worlds:
                assert evaluate(m, w, sigma, f) == naive_int_eval(m, w, sigma, f)


def naive_int_eval(m, w, sigma, f):
    """Independent intuitionistic evaluator used as a test oracle."""
    from monotrick import syntax as s
    up = [v for v in m.frame.worlds if (w, v) in m.frame.access]
    if isinstance(f, s.Atom):
        return tuple(sigma[x] for x in f.args) in \
            m.valuation.get(w, {}).get(f.letter, frozenset())
    if isinstance(f, s.Eq):
        return m.related(w, sigma[f.left], sigma[f.right])
    if isinstance(f, s.Verum):
        return True
    if isinstance(f, s.Falsum):
        return False
    if isinstance(f, s.And):
        return naive_int_eval(m, w, sigma, f.left) and \
            naive_int_eval(m, w, sigma, f.right)
    if isinstance(f, s.Or):
        return naive_int_eval(m, w, sigma, f.left) or \
            naive_int_eval(m, w, sigma, f.right)
    if isinstance(f, s.Not):
        return naive_int_eval(m, w, sigma, s.Implies(f.body, s.Falsum()))
    if isinstance(f, s.Iff):
        return naive_int_eval(m, w, sigma, s.Implies(f.left, f.right)) and \
            naive_int_eval(m, w, sigma, s.Implies(f.right, f.left))
    if isinstance(f, s.Implies):
        for v in up:
            if naive_int_eval(m, v, sigma, f.left) and \
                    not naive_int_eval(m, v, sigma, f.right):
                return False
        return True
    if isinstance(f, s.Forall):
        for v in up:
            for a in m.domains[v]:
                if not naive_int_eval(m, v, {**sigma, f.var: a}, f.body):
                    return False
        return True
    if isinstance(f, s.Exists):
        return any(naive_int_eval(m, w, {**sigma, f.var: a}, f.body)
                   for a in m.domains[w])
    raise AssertionError(type(f))


class TestValidInModel:
    def test_verum_valid(self):
        assert valid_in_model(simple_model(), parse("true")) == (True, None)

    def test_eq1_scheme_valid_in_eq1_model(self):
        m = simple_model(
            principle="eq1",
            classes={"w": (frozenset({"a", "b"}),),
                     "v": (frozenset({"a", "b"}),)})
        assert validate_model(m) == []
        assert valid_in_model(m, parse("x = y -> [](x = y)")) == (True, None)

    def test_decidable_equality_fails_with_late_merge(self):
        m = simple_model(
            mode="int", principle="eq1",
            classes={"w": identity_partition(("a", "b")),
                     "v": (frozenset({"a", "b"}),)})
        assert validate_model(m) == []
        ok, witness = valid_in_model(m, parse("x = y | ~(x = y)"))
        assert not ok
        world, sigma = witness
        assert world == "w"
        assert set(sigma.values()) == {"a", "b"}


def test_modal_dualities_pointwise():
    rng = random.Random(5)
    m = simple_model(valuation={
        "w": {"Q1": frozenset({("a",)}), "p": frozenset()},
        "v": {"Q1": frozenset({("b",)}), "p": frozenset({()})},
    })
    for _ in range(300):
        f = random_formula(rng, depth=3, vars_in_scope=["x"])
        if "P(" in str(f):
            continue
        sigma = {x: rng.choice(("a", "b")) for x in ("x", "y", "z", "u")}
        for w in m.frame.worlds:
            dia = evaluate(m, w, sigma, parse(f"<>({f})"))
            box = evaluate(m, w, sigma, parse(f"~[]~({f})"))
            assert dia == box
            ex = evaluate(m, w, sigma, parse(f"exists x ({f})"))
            fa = evaluate(m, w, sigma, parse(f"~forall x ~({f})"))
            assert ex == fa


class TestJson:
    def test_round_trip(self):
        m = simple_model(valuation={
            "w": {"Q": frozenset({("a",)})},
            "v": {"Q": frozenset({("a",), ("b",)})},
        })
        d = model_to_dict(m)
        m2 = model_from_dict(json.loads(json.dumps(d)))
        assert model_to_dict(m2) == d
        assert validate_model(m2) == []

    def test_unknown_keys_rejected(self):
        d = model_to_dict(simple_model())
        d["extra"] = 1
        with pytest.raises(ValueError, match="unknown model keys"):
            model_from_dict(d)

    def test_missing_key_rejected(self):
        d = model_to_dict(simple_model())
        del d["equality"]
        with pytest.raises(ValueError, match="missing key"):
            model_from_dict(d)

    def test_frame_subset_format(self):
        fr = frame_from_dict({"worlds": ["w0", "w1"], "access": [["w0", "w1"]]})
        assert fr.worlds == ("w0", "w1")
        assert fr.access == frozenset({("w0", "w1")})
        with pytest.raises(ValueError):
            frame_from_dict({"worlds": [], "access": [], "bogus": 1})
