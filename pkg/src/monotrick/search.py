"""Exhaustive finite search: classical satisfiability, frame enumeration,
bounded satisfiability/validity over frame classes, and the
fixed-finite-frame decision procedure.

All enumerations are deterministic: world counts and domain sizes
ascend, relations and valuations follow lexicographic bit order, and
witnesses are always the enumeration-order-least, independent of the
worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import islice, product

from .semantics import (
    Equality, Frame, Model, evaluate, identity_partition, model_to_dict,
    partition_congruent, valid_in_model,
)
from .syntax import (
    And, Atom, Box, Diamond, Eq, Exists, Falsum, Forall, Formula, Iff,
    Implies, Not, Or, Verum, classify, free_variables, letters, modal_depth,
    parse,
)
from .translations import ClassicalStructure

PROPERTY_NAMES = ("reflexive", "transitive", "symmetric", "serial",
                  "euclidean", "linear", "partial_order",
                  "irreflexive_transitive")


class StepLimitExceeded(Exception):
    """Raised internally when the enumeration step cap is hit."""


class _StepCounter:
    def __init__(self, limit: int | None):
        self.limit = limit
        self.steps = 0

    def tick(self):
        self.steps += 1
        if self.limit is not None and self.steps > self.limit:
            raise StepLimitExceeded


@dataclass(frozen=True)
class FrameClass:
    properties: frozenset[str] = frozenset()
    alt_bound: int | None = None

    def __post_init__(self):
        unknown = self.properties - set(PROPERTY_NAMES)
        if unknown:
            raise ValueError(f"unknown frame properties: {sorted(unknown)}")
        if self.alt_bound is not None and self.alt_bound < 0:
            raise ValueError("alt_n bound must be non-negative")

    def with_properties(self, *names: str) -> "FrameClass":
        return FrameClass(self.properties | set(names), self.alt_bound)


def parse_frame_class(text: str) -> FrameClass:
    """Parse a comma-separated property list, e.g. 'reflexive,alt_2'."""
    props: set[str] = set()
    alt = None
    for item in filter(None, (s.strip() for s in text.split(","))):
        if item.startswith("alt_"):
            alt = int(item[4:])
        else:
            props.add(item)
    return FrameClass(frozenset(props), alt)


@dataclass(frozen=True)
class PropertyReport:
    reflexive: bool
    transitive: bool
    symmetric: bool
    serial: bool
    euclidean: bool
    linear: bool
    partial_order: bool
    irreflexive_transitive: bool
    max_out_degree: int

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in PROPERTY_NAMES} | {
            "max_out_degree": self.max_out_degree}


def frame_properties(fr: Frame) -> PropertyReport:
    """Compute every frame-class property by direct definition."""
    ws = fr.worlds
    acc = fr.access
    reflexive = all((w, w) in acc for w in ws)
    irreflexive = all((w, w) not in acc for w in ws)
    symmetric = all((b, a) in acc for (a, b) in acc)
    transitive = all((a, c) in acc
                     for (a, b) in acc for (b2, c) in acc if b == b2)
    serial = all(any((w, v) in acc for v in ws) for w in ws)
    euclidean = all((b, c) in acc
                    for (a, b) in acc for (a2, c) in acc if a == a2)
    total = all((a, b) in acc or (b, a) in acc for a in ws for b in ws)
    antisymmetric = all(a == b for (a, b) in acc if (b, a) in acc)
    out_degree = max(len(fr.successors(w)) for w in ws) if ws else 0
    return PropertyReport(
        reflexive=reflexive,
        transitive=transitive,
        symmetric=symmetric,
        serial=serial,
        euclidean=euclidean,
        linear=transitive and total,
        partial_order=reflexive and transitive and antisymmetric,
        irreflexive_transitive=irreflexive and transitive,
        max_out_degree=out_degree,
    )


def frame_matches(fr: Frame, cls: FrameClass) -> bool:
    report = frame_properties(fr)
    if any(not getattr(report, name) for name in cls.properties):
        return False
    return cls.alt_bound is None or report.max_out_degree <= cls.alt_bound


def enumerate_frames(world_bound: int, cls: FrameClass = FrameClass()):
    """Yield every frame on canonical worlds w0..wk matching cls.

    World count ascends; accessibility relations follow lexicographic
    bit order over the sorted pair list.
    """
    if world_bound < 1:
        raise ValueError("world_bound must be >= 1")
    for n in range(1, world_bound + 1):
        worlds = tuple(f"w{i}" for i in range(n))
        pairs = [(a, b) for a in worlds for b in worlds]
        for mask in range(1 << len(pairs)):
            access = frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
            fr = Frame(worlds, access)
            if frame_matches(fr, cls):
                yield fr


# ---------------------------------------------------------------------------
# Classical finite-model search

class ClassicalSearchError(ValueError):
    pass


def classical_evaluate(domain: tuple, interp: dict, assignment: dict,
                       f: Formula) -> bool:
    """Classical truth over a finite domain; equality is identity."""
    if isinstance(f, Atom):
        return tuple(assignment[x] for x in f.args) in interp.get(f.letter, frozenset())
    if isinstance(f, Eq):
        return assignment[f.left] == assignment[f.right]
    if isinstance(f, Verum):
        return True
    if isinstance(f, Falsum):
        return False
    if isinstance(f, Not):
        return not classical_evaluate(domain, interp, assignment, f.body)
    if isinstance(f, And):
        return classical_evaluate(domain, interp, assignment, f.left) and \
            classical_evaluate(domain, interp, assignment, f.right)
    if isinstance(f, Or):
        return classical_evaluate(domain, interp, assignment, f.left) or \
            classical_evaluate(domain, interp, assignment, f.right)
    if isinstance(f, Implies):
        return (not classical_evaluate(domain, interp, assignment, f.left)) or \
            classical_evaluate(domain, interp, assignment, f.right)
    if isinstance(f, Iff):
        return classical_evaluate(domain, interp, assignment, f.left) == \
            classical_evaluate(domain, interp, assignment, f.right)
    if isinstance(f, Forall):
        return all(classical_evaluate(domain, interp, {**assignment, f.var: a}, f.body)
                   for a in domain)
    if isinstance(f, Exists):
        return any(classical_evaluate(domain, interp, {**assignment, f.var: a}, f.body)
                   for a in domain)
    raise ClassicalSearchError(f"modality in classical formula: {type(f).__name__}")


def _subsets(tuples: list):
    """All subsets of a sorted tuple list, in lexicographic bit order."""
    for mask in range(1 << len(tuples)):
        yield frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)


def classical_sat(f: Formula, size_bound: int) -> ClassicalStructure | None:
    """First structure of size <= size_bound satisfying the closed formula f.

    Enumeration is deterministic: sizes ascend; each letter's
    interpretation follows lexicographic bit order.
    """
    if size_bound < 1:
        raise ValueError("size_bound must be >= 1")
    if modal_depth(f) > 0:
        raise ClassicalSearchError("classical search rejects modal formulas")
    if free_variables(f):
        raise ClassicalSearchError(
            f"formula must be closed; free: {sorted(free_variables(f))}")
    arities = letters(f)
    binaries = sorted(name for name, a in arities.items() if a == 2)
    if any(a > 2 for a in arities.values()):
        raise ClassicalSearchError("letters of arity > 2 are not supported")
    if len(binaries) > 1:
        raise ClassicalSearchError(f"more than one binary letter: {binaries}")
    names = sorted(arities)
    for n in range(1, size_bound + 1):
        domain = tuple(range(n))
        candidate_sets = [
            list(_subsets(sorted(product(domain, repeat=arities[name]))))
            for name in names
        ]
        for combo in product(*candidate_sets):
            interp = dict(zip(names, combo))
            if classical_evaluate(domain, interp, {}, f):
                return ClassicalStructure(
                    domain=domain,
                    relation=interp[binaries[0]] if binaries else frozenset(),
                    unary={name: frozenset(t[0] for t in interp[name])
                           for name in names if arities[name] == 1},
                    nullary={name: () in interp[name]
                             for name in names if arities[name] == 0},
                )
    return None


# ---------------------------------------------------------------------------
# Model enumeration over frames

def _set_partitions(items: tuple):
    """Every partition of items as a tuple of frozensets; deterministic."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + (part[i] | {first},) + part[i + 1:]
        yield part + (frozenset([first]),)


def _domain_assignments(frame: Frame, domain_bound: int, constant: bool):
    pool = tuple(f"a{i}" for i in range(domain_bound))
    worlds = frame.worlds
    if constant:
        for size in range(1, domain_bound + 1):
            yield {w: pool[:size] for w in worlds}
        return
    for sizes in product(range(1, domain_bound + 1), repeat=len(worlds)):
        by_world = dict(zip(worlds, sizes))
        if all(by_world[w] <= by_world[v] for (w, v) in frame.access):
            yield {w: pool[:s] for w, s in by_world.items()}


def _valuation_families(frame: Frame, domains: dict, letter_arities: dict,
                        hereditary: bool):
    """Per-letter families of per-world extensions, heredity-filtered."""
    families = []
    names = sorted(letter_arities)
    for name in names:
        arity = letter_arities[name]
        per_world = [
            list(_subsets(sorted(product(domains[w], repeat=arity))))
            for w in frame.worlds
        ]
        options = []
        for combo in product(*per_world):
            family = dict(zip(frame.worlds, combo))
            if hereditary and any(not family[w] <= family[v]
                                  for (w, v) in frame.access):
                continue
            options.append(family)
        families.append((name, options))
    return families


def _partition_blocks(part):
    return {a: block for block in part for a in block}


def _eq_families(frame: Frame, domains: dict, valuation: dict, principle: str):
    """Per-world partition families consistent with the principle and
    congruent with the valuation.

    Principle "any" applies only the congruence filter, yielding every
    congruent family regardless of cross-world heredity.
    """
    if principle == "eq3":
        yield {w: identity_partition(domains[w]) for w in frame.worlds}
        return
    per_world = []
    for w in frame.worlds:
        options = []
        for part in _set_partitions(tuple(sorted(domains[w]))):
            if partition_congruent(part, valuation.get(w, {})) is None:
                options.append(part)
        per_world.append(options)
    for combo in product(*per_world):
        family = dict(zip(frame.worlds, combo))
        if principle == "any":
            yield family
            continue
        blocks = {w: _partition_blocks(family[w]) for w in frame.worlds}
        ok = True
        for (w, v) in frame.access:
            for a in domains[w]:
                for b in domains[w]:
                    if a >= b:
                        continue
                    same_w = blocks[w].get(a) is blocks[w].get(b)
                    same_v = blocks[v].get(a) is blocks[v].get(b)
                    if same_w and not same_v:
                        ok = False  # upward heredity (eq1 and eq2)
                    if principle == "eq2" and same_v and not same_w:
                        ok = False
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            yield family


def enumerate_models(frame: Frame, letter_arities: dict, domain_bound: int,
                     mode: str, eq_principle: str, constant_domains: bool = False,
                     counter: _StepCounter | None = None):
    """Yield every model on the frame within the domain bound.

    Only the given letters are interpreted; others cannot affect
    evaluation.  In intuitionistic mode valuations are hereditary.
    """
    hereditary = mode == "int"
    for domains in _domain_assignments(frame, domain_bound, constant_domains):
        families = _valuation_families(frame, domains, letter_arities, hereditary)
        names = [name for name, _ in families]
        for combo in product(*(options for _, options in families)):
            valuation = {
                w: {name: family[w] for name, family in zip(names, combo)}
                for w in frame.worlds
            }
            for eq_family in _eq_families(frame, domains, valuation, eq_principle):
                if counter is not None:
                    counter.tick()
                yield Model(
                    frame=frame,
                    domains=domains,
                    valuation=valuation,
                    equality=Equality(eq_principle, eq_family),
                    mode=mode,
                    constant_domains=constant_domains,
                )


# ---------------------------------------------------------------------------
# Verdicts and bounded decision procedures

@dataclass
class Verdict:
    outcome: str  # valid | countermodel | satisfiable |
    #               unsatisfiable_up_to_bound | bound_exhausted
    bounds_used: dict
    model: Model | None = None
    world: str | None = None
    assignment: dict | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "outcome": self.outcome,
            "bounds_used": dict(self.bounds_used),
            "warnings": list(self.warnings),
        }
        if self.model is not None:
            out["witness"] = {
                "model": model_to_dict(self.model),
                "world": self.world,
                "assignment": {x: str(a) for x, a in (self.assignment or {}).items()},
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _first_hit(candidates, check, workers: int):
    """First non-None check(c) in candidate order, worker-count independent."""
    if workers <= 1:
        for c in candidates:
            hit = check(c)
            if hit is not None:
                return hit
        return None
    it = iter(candidates)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        while True:
            chunk = list(islice(it, workers * 16))
            if not chunk:
                return None
            for hit in pool.map(check, chunk):
                if hit is not None:
                    return hit


def _satisfying_point(model: Model, f: Formula):
    fv = sorted(free_variables(f))
    for w in model.frame.worlds:
        for combo in product(model.domains[w], repeat=len(fv)):
            sigma = dict(zip(fv, combo))
            if evaluate(model, w, sigma, f):
                return model, w, sigma
    return None


def sat_bounded(f: Formula, cls: FrameClass, world_bound: int, domain_bound: int,
                mode: str = "modal", eq_principle: str = "eq3",
                constant_domains: bool = False, workers: int = 1,
                max_steps: int | None = None) -> Verdict:
    """Search for a model and point satisfying f within the bounds."""
    if world_bound < 1 or domain_bound < 1:
        raise ValueError("bounds must be >= 1")
    if mode == "int":
        cls = cls.with_properties("reflexive", "transitive")
    bounds = {"world_bound": world_bound, "domain_bound": domain_bound,
              "mode": mode, "eq_principle": eq_principle,
              "constant_domains": constant_domains}
    counter = _StepCounter(max_steps)
    letter_arities = letters(f)

    def candidates():
        for frame in enumerate_frames(world_bound, cls):
            yield from enumerate_models(frame, letter_arities, domain_bound,
                                        mode, eq_principle, constant_domains,
                                        counter)

    try:
        hit = _first_hit(candidates(), lambda m: _satisfying_point(m, f), workers)
    except StepLimitExceeded:
        return Verdict("bound_exhausted", bounds | {"max_steps": max_steps})
    if hit is None:
        return Verdict("unsatisfiable_up_to_bound", bounds)
    model, w, sigma = hit
    return Verdict("satisfiable", bounds, model=model, world=w, assignment=sigma)


def default_domain_bound(f: Formula) -> int:
    """Heuristic bound: 2^(unary letters) * (variables + 1)."""
    unary = sum(1 for a in letters(f).values() if a == 1)
    from .syntax import all_variables
    return (2 ** unary) * (len(all_variables(f)) + 1)


def decide_valid_over_frame(fr: Frame, f: Formula, domain_bound: int | None = None,
                            mode: str = "modal", eq_principle: str = "eq3",
                            constant_domains: bool = False, workers: int = 1,
                            max_steps: int | None = None) -> Verdict:
    """Validity of f over all models on the fixed finite frame fr,
    within the domain bound; returns the first countermodel otherwise."""
    heuristic = domain_bound is None
    if heuristic:
        domain_bound = default_domain_bound(f)
    if domain_bound < 1:
        raise ValueError("domain_bound must be >= 1")
    if mode == "int" and not frame_matches(
            fr, FrameClass(frozenset({"reflexive", "transitive"}))):
        raise ValueError("intuitionistic mode requires a preorder frame")
    bounds = {"domain_bound": domain_bound, "mode": mode,
              "eq_principle": eq_principle, "constant_domains": constant_domains,
              "domain_bound_heuristic": heuristic}
    warnings_list = []
    if not classify(f).is_monadic:
        warnings_list.append(
            "formula is not monadic; the fixed-frame decidability "
            "guarantee does not apply")
    counter = _StepCounter(max_steps)
    letter_arities = letters(f)

    def check(model: Model):
        ok, witness = valid_in_model(model, f)
        if ok:
            return None
        w, sigma = witness
        return model, w, sigma

    try:
        hit = _first_hit(
            enumerate_models(fr, letter_arities, domain_bound, mode,
                             eq_principle, constant_domains, counter),
            check, workers)
    except StepLimitExceeded:
        return Verdict("bound_exhausted", bounds | {"max_steps": max_steps},
                       warnings=warnings_list)
    if hit is None:
        return Verdict("valid", bounds, warnings=warnings_list)
    model, w, sigma = hit
    return Verdict("countermodel", bounds, model=model, world=w,
                   assignment=sigma, warnings=warnings_list)


# ---------------------------------------------------------------------------
# Equality-principle separation harness

@dataclass
class SeparationFinding:
    frame: Frame
    formula: Formula
    mode: str
    valid_principle: str
    failing_principle: str
    counter_verdict: Verdict
    reverified: bool

    def to_dict(self) -> dict:
        return {
            "frame": {"worlds": list(self.frame.worlds),
                      "access": sorted(list(e) for e in self.frame.access)},
            "formula": str(self.formula),
            "mode": self.mode,
            "valid_principle": self.valid_principle,
            "failing_principle": self.failing_principle,
            "counter_verdict": self.counter_verdict.to_dict(),
            "reverified": self.reverified,
        }


@dataclass
class SeparationReport:
    world_bound: int
    domain_bound: int
    eq3_not_eq2: SeparationFinding | None
    eq2_not_eq1: SeparationFinding | None

    def to_dict(self) -> dict:
        return {
            "world_bound": self.world_bound,
            "domain_bound": self.domain_bound,
            "eq3_not_eq2": (self.eq3_not_eq2.to_dict() if self.eq3_not_eq2
                            else "not found within bounds"),
            "eq2_not_eq1": (self.eq2_not_eq1.to_dict() if self.eq2_not_eq1
                            else "not found within bounds"),
        }


_SEPARATION_CANDIDATES = (
    ("modal", "~(x = y) -> []~(x = y)"),
    ("modal", "(x = y) <-> [](x = y)"),
    ("int", "(x = y) | ~(x = y)"),
)


def _reverify(verdict: Verdict, f: Formula) -> bool:
    from .semantics import validate_model
    if verdict.model is None:
        return False
    if validate_model(verdict.model):
        return False
    return evaluate(verdict.model, verdict.world, verdict.assignment, f) is False


def eq_separation_search(world_bound: int = 3, domain_bound: int = 2,
                         candidates=_SEPARATION_CANDIDATES,
                         max_steps: int | None = None) -> SeparationReport:
    """Search small frames for pairs separating the equality principles.

    Because every eq3 (identity) model also satisfies the eq2
    conditions, and every eq2 model the eq1 condition, validity can
    only shrink from eq3 to eq2 to eq1; the search exploits that chain.
    An explicit "not found within bounds" entry is reported for each
    separation the search fails to exhibit.
    """
    parsed = [(mode, parse(text)) for mode, text in candidates]
    found_32 = None
    found_21 = None
    for fr in enumerate_frames(world_bound, FrameClass()):
        preorder = frame_matches(
            fr, FrameClass(frozenset({"reflexive", "transitive"})))
        for mode, f in parsed:
            if found_32 is not None and found_21 is not None:
                break
            if mode == "int" and not preorder:
                continue
            v3 = decide_valid_over_frame(fr, f, domain_bound, mode, "eq3",
                                         max_steps=max_steps)
            if v3.outcome != "valid":
                continue
            v2 = decide_valid_over_frame(fr, f, domain_bound, mode, "eq2",
                                         max_steps=max_steps)
            if v2.outcome == "countermodel" and found_32 is None:
                found_32 = SeparationFinding(fr, f, mode, "eq3", "eq2", v2,
                                             _reverify(v2, f))
            if v2.outcome != "valid":
                continue
            if found_21 is None:
                v1 = decide_valid_over_frame(fr, f, domain_bound, mode, "eq1",
                                             max_steps=max_steps)
                if v1.outcome == "countermodel":
                    found_21 = SeparationFinding(fr, f, mode, "eq2", "eq1", v1,
                                                 _reverify(v1, f))
        if found_32 is not None and found_21 is not None:
            break
    return SeparationReport(world_bound, domain_bound, found_32, found_21)
