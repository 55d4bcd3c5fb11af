"""Reproducibility experiment: translation faithfulness on small structures.

For every corpus sentence and every classical structure up to a size
bound, classical truth (computed by the independent classical
evaluator) is compared against Kripke evaluation of the translated
sentence at the companion-model root.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations, product

from .search import classical_evaluate
from .semantics import evaluate
from .syntax import Formula, free_variables, letters, modal_depth, parse, render
from .translations import (
    ClassicalStructure, Variant, build_companion_model, fresh_scheme,
    kripke_trick,
)


def enumerate_structures(max_size: int, symmetric_irreflexive: bool = False):
    """All classical structures of domain size 1..max_size, deterministically.

    With symmetric_irreflexive, only undirected loop-free relations
    (each unordered edge stored in both directions).
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    for n in range(1, max_size + 1):
        domain = tuple(range(n))
        if symmetric_irreflexive:
            edges = list(combinations(domain, 2))
            for mask in range(1 << len(edges)):
                chosen = [e for i, e in enumerate(edges) if mask >> i & 1]
                rel = frozenset(p for (a, b) in chosen for p in ((a, b), (b, a)))
                yield ClassicalStructure(domain, rel)
        else:
            pairs = sorted(product(domain, repeat=2))
            for mask in range(1 << len(pairs)):
                yield ClassicalStructure(
                    domain, frozenset(p for i, p in enumerate(pairs)
                                      if mask >> i & 1))


@dataclass
class ExperimentReport:
    variant: str
    corpus_size: int
    structure_count: int
    agreement: int
    disagreements: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "corpus_size": self.corpus_size,
            "structure_count": self.structure_count,
            "agreement": self.agreement,
            "disagreements": list(self.disagreements),
            "skipped": list(self.skipped),
            "wall_time": self.wall_time,
        }


def _admissible(f: Formula, variant: Variant) -> str | None:
    """Reason the formula is outside the experiment's signature, or None."""
    if free_variables(f):
        return f"open formula; free: {sorted(free_variables(f))}"
    if modal_depth(f) > 0:
        return "contains a modality"
    binary = [name for name, a in letters(f).items() if a >= 2]
    if any(a > 2 for a in letters(f).values()) or len(binary) > 1:
        return "signature must contain at most one binary letter"
    if any(a == 1 for a in letters(f).values()):
        return "unary letters are not admitted in trick input"
    return None


def trick_experiment(corpus, variant: Variant, size_bound: int) -> ExperimentReport:
    """Compare classical truth with companion-root truth of the translation."""
    if variant not in (Variant.DIAMOND2, Variant.NEG_DIAMOND1):
        raise ValueError(
            f"variant {variant.value} has no companion-model construction")
    started = time.perf_counter()
    formulas = []
    skipped = []
    for entry in corpus:
        f = parse(entry) if isinstance(entry, str) else entry
        reason = _admissible(f, variant)
        if reason is not None:
            skipped.append({"formula": render(f), "reason": reason})
            continue
        formulas.append(f)

    symmetric = variant is Variant.NEG_DIAMOND1
    structures = list(enumerate_structures(size_bound, symmetric))
    agreement = 0
    disagreements = []
    for f in formulas:
        scheme = fresh_scheme(f)
        translated = kripke_trick(f, variant, scheme)
        binary = next((name for name, a in letters(f).items() if a == 2), None)
        for idx, s in enumerate(structures):
            interp = {binary: s.relation} if binary else {}
            classical = classical_evaluate(s.domain, interp, {}, f)
            model, root = build_companion_model(s, variant, scheme)
            modal = evaluate(model, root, {}, translated)
            if classical == modal:
                agreement += 1
            else:
                disagreements.append({
                    "formula": render(f),
                    "structure": {"domain": list(s.domain),
                                  "relation": sorted(map(list, s.relation))},
                    "structure_index": idx,
                    "classical": classical,
                    "modal": modal,
                })
    return ExperimentReport(
        variant=variant.value,
        corpus_size=len(formulas),
        structure_count=len(structures),
        agreement=agreement,
        disagreements=disagreements,
        skipped=skipped,
        wall_time=time.perf_counter() - started,
    )
