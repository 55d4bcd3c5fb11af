"""Kripke frames and models: validation, modal/intuitionistic evaluation.

Equality at each world is a partition of that world's domain.  Three
principles constrain how the partitions relate along accessibility:

* ``eq1`` -- upward-hereditary congruence,
* ``eq2`` -- upward- and downward-hereditary congruence,
* ``eq3`` -- the identity relation at every world.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .syntax import (
    And, Atom, Box, Diamond, Eq, Exists, Falsum, Forall, Formula, Iff,
    Implies, Not, Or, Verum, free_variables,
)

MODES = ("modal", "int")
PRINCIPLES = ("eq1", "eq2", "eq3")


class EvaluationError(ValueError):
    pass


def _ind_key(a):
    return str(a)


@dataclass(frozen=True)
class Frame:
    worlds: tuple[str, ...]
    access: frozenset[tuple[str, str]]

    def successors(self, w: str) -> tuple[str, ...]:
        return tuple(v for v in self.worlds if (w, v) in self.access)


@dataclass
class Equality:
    principle: str
    classes: dict[str, tuple[frozenset, ...]]  # world -> partition of D(w)


@dataclass(frozen=True)
class Violation:
    name: str
    witness: str

    def __str__(self) -> str:
        return f"{self.name}: {self.witness}"


def identity_partition(domain) -> tuple[frozenset, ...]:
    return tuple(frozenset([a]) for a in sorted(domain, key=_ind_key))


@dataclass
class Model:
    frame: Frame
    domains: dict[str, tuple]          # world -> individuals
    valuation: dict[str, dict[str, frozenset]]  # world -> letter -> tuples
    equality: Equality
    mode: str = "modal"
    constant_domains: bool = False
    _blocks: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._blocks = {
            w: {a: block for block in part for a in block}
            for w, part in self.equality.classes.items()
        }

    def domain(self, w: str) -> tuple:
        return self.domains[w]

    def related(self, w: str, a, b) -> bool:
        blocks = self._blocks.get(w, {})
        return a == b or (a in blocks and blocks.get(a) is blocks.get(b))

    def block_of(self, w: str, a) -> frozenset:
        return self._blocks.get(w, {}).get(a, frozenset([a]))

    def truth(self, w: str, letter: str, args: tuple) -> bool:
        return args in self.valuation.get(w, {}).get(letter, frozenset())


def partition_congruent(partition, valuation_at_w) -> tuple | None:
    """Check that ε-related individuals are atom-indistinguishable.

    Returns None if congruent, else a witness (letter, tuple, variant).
    """
    blocks = {a: block for block in partition for a in block}
    for letter, tuples in valuation_at_w.items():
        for tup in tuples:
            variants = product(*(sorted(blocks.get(a, frozenset([a])), key=_ind_key)
                                 for a in tup))
            for variant in variants:
                if variant not in tuples:
                    return (letter, tup, variant)
    return None


def validate_model(m: Model) -> list[Violation]:
    """Check every structural invariant; violations are data, not errors."""
    out: list[Violation] = []
    worlds = m.frame.worlds
    wset = set(worlds)
    if not worlds:
        out.append(Violation("nonempty worlds", "frame has no worlds"))
        return out
    if len(set(worlds)) != len(worlds):
        out.append(Violation("distinct worlds", "duplicate world identifiers"))
    for (a, b) in m.frame.access:
        if a not in wset or b not in wset:
            out.append(Violation("access range", f"edge ({a},{b}) leaves the world set"))
    if m.mode not in MODES:
        out.append(Violation("mode", f"unknown mode {m.mode!r}"))
    if m.equality.principle not in PRINCIPLES:
        out.append(Violation("equality principle",
                             f"unknown principle {m.equality.principle!r}"))

    for w in worlds:
        dom = m.domains.get(w)
        if dom is None:
            out.append(Violation("domain coverage", f"world {w} has no domain"))
        elif len(dom) == 0:
            out.append(Violation("empty domain", f"world {w} has an empty domain"))
    if any(v.name == "domain coverage" for v in out):
        return out

    for (w, v) in sorted(m.frame.access):
        if w in wset and v in wset and not set(m.domains[w]) <= set(m.domains[v]):
            out.append(Violation("expanding domains",
                                 f"D({w}) is not included in D({v})"))
    if m.constant_domains:
        base = set(m.domains[worlds[0]])
        for w in worlds[1:]:
            if set(m.domains[w]) != base:
                out.append(Violation("constant domains",
                                     f"D({w}) differs from D({worlds[0]})"))

    arities: dict[str, int] = {}
    for w in worlds:
        dom = set(m.domains[w])
        for letter, tuples in m.valuation.get(w, {}).items():
            for tup in tuples:
                seen = arities.setdefault(letter, len(tup))
                if seen != len(tup):
                    out.append(Violation("valuation arity",
                                         f"letter {letter} has tuples of mixed length"))
                if not set(tup) <= dom:
                    out.append(Violation(
                        "valuation range",
                        f"{letter}{tup} at {w} uses individuals outside D({w})"))
    if m.mode == "int":
        for (w, v) in sorted(m.frame.access):
            if w not in wset or v not in wset:
                continue
            for letter, tuples in m.valuation.get(w, {}).items():
                missing = tuples - m.valuation.get(v, {}).get(letter, frozenset())
                if missing:
                    tup = sorted(missing)[0]
                    out.append(Violation(
                        "valuation heredity",
                        f"{letter}{tup} holds at {w} but not at successor {v}"))

    for w in worlds:
        part = m.equality.classes.get(w)
        if part is None:
            out.append(Violation("equality partition", f"no partition for world {w}"))
            continue
        covered: list = []
        for block in part:
            covered.extend(block)
        if sorted(covered, key=_ind_key) != sorted(m.domains[w], key=_ind_key):
            out.append(Violation("equality partition",
                                 f"classes at {w} do not partition D({w})"))
            continue
        witness = partition_congruent(part, m.valuation.get(w, {}))
        if witness is not None:
            letter, tup, variant = witness
            out.append(Violation(
                "congruence",
                f"at {w}: {letter}{tup} holds but ε-variant {variant} does not"))

    principle = m.equality.principle
    for (w, v) in sorted(m.frame.access):
        if w not in m.equality.classes or v not in m.equality.classes:
            continue
        dom_w = m.domains[w]
        for a in dom_w:
            for b in dom_w:
                if _ind_key(a) >= _ind_key(b):
                    continue
                if principle in ("eq1", "eq2"):
                    if m.related(w, a, b) and not m.related(v, a, b):
                        out.append(Violation(
                            "Eq1 upward heredity",
                            f"{a} ε {b} at {w} but not at successor {v}"))
                if principle == "eq2":
                    if m.related(v, a, b) and not m.related(w, a, b):
                        out.append(Violation(
                            "Eq2 downward heredity",
                            f"{a} ε {b} at successor {v} but not at {w}"))
    if principle == "eq3":
        for w in worlds:
            if w not in m.equality.classes:
                continue
            for block in m.equality.classes[w]:
                if len(block) > 1:
                    out.append(Violation(
                        "Eq3 identity",
                        f"non-singleton class {sorted(block, key=_ind_key)} at {w}"))

    if m.mode == "int":
        for w in worlds:
            if (w, w) not in m.frame.access:
                out.append(Violation("intuitionistic frame must be a preorder",
                                     f"world {w} is not reflexive"))
        for (a, b) in sorted(m.frame.access):
            for c in worlds:
                if (b, c) in m.frame.access and (a, c) not in m.frame.access:
                    out.append(Violation("intuitionistic frame must be a preorder",
                                         f"missing transitive edge ({a},{c})"))
    return out


def evaluate(m: Model, w: str, assignment: dict, f: Formula) -> bool:
    """Truth of f at world w under the assignment, per the model's mode."""
    if w not in set(m.frame.worlds):
        raise EvaluationError(f"unknown world {w!r}")
    dom = set(m.domains[w])
    for var, ind in assignment.items():
        if ind not in dom:
            raise EvaluationError(
                f"assignment sends {var} to {ind!r}, outside D({w})")
    missing = free_variables(f) - set(assignment)
    if missing:
        raise EvaluationError(f"unassigned free variables: {sorted(missing)}")
    return _eval(m, w, dict(assignment), f)


def _eval(m: Model, w: str, sigma: dict, f: Formula) -> bool:
    if isinstance(f, Atom):
        return m.truth(w, f.letter, tuple(sigma[x] for x in f.args))
    if isinstance(f, Eq):
        return m.related(w, sigma[f.left], sigma[f.right])
    if isinstance(f, Verum):
        return True
    if isinstance(f, Falsum):
        return False
    if isinstance(f, And):
        return _eval(m, w, sigma, f.left) and _eval(m, w, sigma, f.right)
    if isinstance(f, Or):
        return _eval(m, w, sigma, f.left) or _eval(m, w, sigma, f.right)
    if isinstance(f, Exists):
        return any(_eval(m, w, {**sigma, f.var: a}, f.body)
                   for a in m.domains[w])

    if m.mode == "modal":
        if isinstance(f, Not):
            return not _eval(m, w, sigma, f.body)
        if isinstance(f, Implies):
            return (not _eval(m, w, sigma, f.left)) or _eval(m, w, sigma, f.right)
        if isinstance(f, Iff):
            return _eval(m, w, sigma, f.left) == _eval(m, w, sigma, f.right)
        if isinstance(f, Box):
            return all(_eval(m, v, sigma, f.body) for v in m.frame.successors(w))
        if isinstance(f, Diamond):
            return any(_eval(m, v, sigma, f.body) for v in m.frame.successors(w))
        if isinstance(f, Forall):
            return all(_eval(m, w, {**sigma, f.var: a}, f.body)
                       for a in m.domains[w])
    else:
        if isinstance(f, (Box, Diamond)):
            raise EvaluationError(
                "modal operators are not allowed in intuitionistic mode")
        if isinstance(f, Not):
            return all(not _eval(m, v, sigma, f.body)
                       for v in m.frame.successors(w))
        if isinstance(f, Implies):
            return all((not _eval(m, v, sigma, f.left))
                       or _eval(m, v, sigma, f.right)
                       for v in m.frame.successors(w))
        if isinstance(f, Iff):
            return _eval(m, w, sigma, Implies(f.left, f.right)) and \
                _eval(m, w, sigma, Implies(f.right, f.left))
        if isinstance(f, Forall):
            return all(_eval(m, v, {**sigma, f.var: a}, f.body)
                       for v in m.frame.successors(w)
                       for a in m.domains[v])
    raise EvaluationError(f"cannot evaluate node {type(f).__name__}")


def valid_in_model(m: Model, f: Formula):
    """Truth at every world under every assignment of f's free variables.

    Returns (True, None) or (False, (world, assignment)).
    """
    fv = sorted(free_variables(f))
    for w in m.frame.worlds:
        for combo in product(m.domains[w], repeat=len(fv)):
            sigma = dict(zip(fv, combo))
            if not _eval(m, w, sigma, f):
                return False, (w, sigma)
    return True, None


# ---------------------------------------------------------------------------
# JSON model files

_MODEL_KEYS = {"mode", "constant_domains", "worlds", "access", "domains",
               "valuation", "equality"}
_EQ_KEYS = {"principle", "classes"}
_FRAME_KEYS = {"worlds", "access"}


def model_to_dict(m: Model) -> dict:
    return {
        "mode": m.mode,
        "constant_domains": m.constant_domains,
        "worlds": list(m.frame.worlds),
        "access": sorted([list(e) for e in m.frame.access]),
        "domains": {w: [_ind_key(a) for a in sorted(dom, key=_ind_key)]
                    for w, dom in m.domains.items()},
        "valuation": {
            w: {letter: sorted([_ind_key(a) for a in tup] for tup in tuples)
                for letter, tuples in sorted(val.items())}
            for w, val in m.valuation.items()
        },
        "equality": {
            "principle": m.equality.principle,
            "classes": {
                w: sorted(sorted(_ind_key(a) for a in block) for block in part)
                for w, part in m.equality.classes.items()
            },
        },
    }


def _reject_unknown(d: dict, allowed: set[str], what: str):
    unknown = set(d) - allowed
    if unknown:
        raise ValueError(f"unknown {what} keys: {sorted(unknown)}")


def frame_from_dict(d: dict) -> Frame:
    _reject_unknown(d, _FRAME_KEYS, "frame")
    worlds = tuple(str(w) for w in d["worlds"])
    access = frozenset((str(a), str(b)) for a, b in d["access"])
    return Frame(worlds, access)


def model_from_dict(d: dict) -> Model:
    _reject_unknown(d, _MODEL_KEYS, "model")
    for key in ("mode", "worlds", "access", "domains", "valuation", "equality"):
        if key not in d:
            raise ValueError(f"model file is missing key {key!r}")
    if d["mode"] not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {d['mode']!r}")
    eq = d["equality"]
    _reject_unknown(eq, _EQ_KEYS, "equality")
    if eq["principle"] not in PRINCIPLES:
        raise ValueError(f"equality principle must be one of {PRINCIPLES}")
    frame = frame_from_dict({"worlds": d["worlds"], "access": d["access"]})
    domains = {w: tuple(str(a) for a in dom) for w, dom in d["domains"].items()}
    valuation = {
        w: {letter: frozenset(tuple(str(a) for a in tup) for tup in tuples)
            for letter, tuples in val.items()}
        for w, val in d["valuation"].items()
    }
    classes = {
        w: tuple(frozenset(str(a) for a in block) for block in part)
        for w, part in eq["classes"].items()
    }
    return Model(
        frame=frame,
        domains=domains,
        valuation=valuation,
        equality=Equality(eq["principle"], classes),
        mode=d["mode"],
        constant_domains=bool(d.get("constant_domains", False)),
    )


def load_model(path: str) -> Model:
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def load_frame(path: str) -> Frame:
    with open(path, encoding="utf-8") as fh:
        return frame_from_dict(json.load(fh))
