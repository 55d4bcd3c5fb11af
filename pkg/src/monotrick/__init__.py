"""Kripke-trick translations, Kripke semantics with equality principles,
and bounded finite-model search."""

from .syntax import (
    And, Atom, Box, Diamond, Eq, Exists, Falsum, Forall, Formula,
    FragmentReport, Iff, Implies, Not, Or, ParseError, Verum, classify,
    free_variables, letters, modal_depth, parse, render,
)
from .semantics import (
    Equality, EvaluationError, Frame, Model, Violation, evaluate,
    frame_from_dict, load_frame, load_model, model_from_dict, model_to_dict,
    valid_in_model, validate_model,
)
from .translations import (
    ClassicalStructure, NamingScheme, TranslationError, Variant,
    build_companion_model, fresh_letter, fresh_scheme, kripke_trick, positivize,
)
from .search import (
    FrameClass, PropertyReport, Verdict, classical_sat, decide_valid_over_frame,
    enumerate_frames, enumerate_models, eq_separation_search, frame_properties,
    sat_bounded,
)
from .experiments import ExperimentReport, enumerate_structures, trick_experiment

__version__ = "0.1.0"
