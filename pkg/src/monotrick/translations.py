"""The Kripke-trick translation family and companion Kripke models.

A binary atom ``P(x,y)`` in a classical formula is rewritten, per
variant, to a monadic (modal or positive) formula; the companion model
of a finite classical structure then makes the rewritten atom true at
the root exactly when the original pair is in the relation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

from .semantics import Equality, Frame, Model, identity_partition
from .syntax import (
    And, Atom, Box, Diamond, Eq, Exists, Falsum, Forall, Formula, Iff,
    Implies, Not, Or, Verum, classify, letters, modal_depth, subformulas,
)


class Variant(Enum):
    DIAMOND2 = "d2"
    NEG_DIAMOND1 = "nd1"
    POSITIVE_IMP = "pi"
    NEG_DISJ = "ndj"


class TranslationError(ValueError):
    pass


@dataclass
class ClassicalStructure:
    """Finite domain with one binary relation; input side of the trick."""

    domain: tuple
    relation: frozenset
    unary: dict[str, frozenset] = field(default_factory=dict)
    nullary: dict[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        dom = set(self.domain)
        if not dom:
            raise ValueError("domain must be nonempty")
        for (a, b) in self.relation:
            if a not in dom or b not in dom:
                raise ValueError(f"relation pair ({a},{b}) leaves the domain")

    def is_symmetric(self) -> bool:
        return all((b, a) in self.relation for (a, b) in self.relation)

    def is_irreflexive(self) -> bool:
        return all(a != b for (a, b) in self.relation)


@dataclass(frozen=True)
class NamingScheme:
    q1: str = "Q1"
    q2: str = "Q2"
    q: str = "Q"
    p: str = "p_neg"
    q_prop: str = "q_aux"

    def names(self) -> tuple[str, ...]:
        return (self.q1, self.q2, self.q, self.p, self.q_prop)


def fresh_scheme(f: Formula) -> NamingScheme:
    """Default naming scheme, suffixed to avoid the letters of f."""
    used = set(letters(f))
    base = NamingScheme()
    if not used & set(base.names()):
        return base
    suffix = 1
    while True:
        candidate = NamingScheme(*(f"{n}_{suffix}" for n in base.names()))
        if not used & set(candidate.names()):
            return candidate
        suffix += 1


def fresh_letter(f: Formula, base: str = "p_neg") -> str:
    """A propositional-letter name not occurring in f."""
    used = set(letters(f))
    if base not in used:
        return base
    suffix = 1
    while f"{base}_{suffix}" in used:
        suffix += 1
    return f"{base}_{suffix}"


def positivize(f: Formula, fresh: str) -> Formula:
    """Replace every negation by an implication to the fresh letter.

    ``~g`` becomes ``g -> fresh`` and ``false`` becomes ``fresh``,
    recursively; the result is in the positive fragment.
    """
    if fresh in letters(f):
        raise TranslationError(f"fresh letter {fresh!r} already occurs in the formula")
    target = Atom(fresh)

    def go(g: Formula) -> Formula:
        if isinstance(g, Falsum):
            return target
        if isinstance(g, Not):
            return Implies(go(g.body), target)
        if isinstance(g, (Atom, Eq, Verum)):
            return g
        if isinstance(g, Box):
            return Box(go(g.body))
        if isinstance(g, Diamond):
            return Diamond(go(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, go(g.body))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        ctor = type(g)
        return ctor(go(g.left), go(g.right))

    return go(f)


def _check_trick_input(f: Formula, names: NamingScheme) -> str | None:
    """Validate the admissible signature; returns the binary letter, if any."""
    if modal_depth(f) > 0:
        raise TranslationError("input to the trick must contain no modality")
    if any(isinstance(g, Eq) for g in subformulas(f)):
        raise TranslationError("input to the trick must contain no equality atoms")
    binary = None
    for letter, arity in letters(f).items():
        if arity >= 3:
            raise TranslationError(f"letter {letter!r} has arity {arity} > 2")
        if arity == 2:
            if binary is not None:
                raise TranslationError(
                    f"second binary letter {letter!r} (after {binary!r})")
            binary = letter
        elif arity == 1:
            raise TranslationError(
                f"unary letter {letter!r} not admitted in trick input")
        if letter in names.names():
            raise TranslationError(f"letter {letter!r} collides with the naming scheme")
    return binary


def kripke_trick(f: Formula, variant: Variant,
                 names: NamingScheme | None = None) -> Formula:
    """Rewrite every binary atom P(s,t) per the chosen variant.

    The result is monadic; all non-atom structure is unchanged.
    """
    if names is None:
        names = fresh_scheme(f)
    _check_trick_input(f, names)
    if variant in (Variant.POSITIVE_IMP, Variant.NEG_DISJ) and not classify(f).is_positive:
        warnings.warn("positive-fragment variants expect a positive input; "
                      "apply positivize first", stacklevel=2)

    def replace(s: str, t: str) -> Formula:
        pair = And(Atom(names.q1, (s,)), Atom(names.q2, (t,)))
        if variant is Variant.DIAMOND2:
            return Diamond(pair)
        if variant is Variant.NEG_DIAMOND1:
            return Not(Diamond(And(Atom(names.q, (s,)), Atom(names.q, (t,)))))
        if variant is Variant.POSITIVE_IMP:
            return Or(Implies(pair, Atom(names.p)), Atom(names.q_prop))
        return Or(Not(pair), Atom(names.q_prop))

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            if len(g.args) == 2:
                return replace(g.args[0], g.args[1])
            return g
        if isinstance(g, (Verum, Falsum)):
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, Forall):
            return Forall(g.var, go(g.body))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.body))
        ctor = type(g)
        return ctor(go(g.left), go(g.right))

    return go(f)


def _world_name(a, b) -> str:
    return f"w_{a}_{b}"


def build_companion_model(m: ClassicalStructure, variant: Variant,
                          names: NamingScheme | None = None):
    """Companion Kripke model for the Diamond2/NegDiamond1 variants.

    Returns (model, root).  The frame is universal with a constant
    domain; equality is the identity.  At the root nothing is true, so
    evaluating a translated sentence there mirrors classical truth.
    """
    if names is None:
        names = NamingScheme()
    if variant not in (Variant.DIAMOND2, Variant.NEG_DIAMOND1):
        raise TranslationError(
            f"no companion construction for variant {variant.value}")
    root = "root"
    domain = tuple(sorted(m.domain, key=str))
    valuation: dict[str, dict[str, frozenset]] = {root: {}}
    worlds = [root]

    if variant is Variant.DIAMOND2:
        for (a, b) in sorted(m.relation, key=lambda p: (str(p[0]), str(p[1]))):
            w = _world_name(a, b)
            worlds.append(w)
            valuation[w] = {names.q1: frozenset([(a,)]),
                            names.q2: frozenset([(b,)])}
    else:
        if not (m.is_symmetric() and m.is_irreflexive()):
            raise TranslationError(
                "NegDiamond1 requires a symmetric irreflexive relation")
        seen = set()
        for a in domain:
            for b in domain:
                key = tuple(sorted((a, b), key=str))
                if key in seen or (a, b) in m.relation:
                    continue
                seen.add(key)
                w = _world_name(key[0], key[1])
                worlds.append(w)
                valuation[w] = {names.q: frozenset({(key[0],), (key[1],)})}

    frame = Frame(tuple(worlds), frozenset((u, v) for u in worlds for v in worlds))
    model = Model(
        frame=frame,
        domains={w: domain for w in worlds},
        valuation=valuation,
        equality=Equality("eq3", {w: identity_partition(domain) for w in worlds}),
        mode="modal",
        constant_domains=True,
    )
    return model, root
