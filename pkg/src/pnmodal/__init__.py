"""Pre-ordered neighborhood models for the intuitionistic logic of false belief.

The common entry points are re-exported here; submodules hold the rest.
"""

from .formula import (
    And, Atom, Bottom, Formula, Imp, Meta, Modal, ModalOp, Or, ParseError, Scheme,
    parse, parse_scheme, render, instantiate, subformulas,
)
from .model import Cond, Model, ModelError, check_conditions, parse_class, validate
from .semantics import extension, extensions, forces, check_persistence, globally_true
from .logics import LOGIC_IDS, LogicSpec, logic_spec
from .search import SearchConfig, SearchOutcome, enumerate_models, find_countermodel
from .proof import Derivation, DerivationError, check_derivation, match_scheme
from .experiments import run_experiment

__version__ = "0.1.0"

__all__ = [
    "And", "Atom", "Bottom", "Formula", "Imp", "Meta", "Modal", "ModalOp", "Or", "ParseError", "Scheme",
    "parse", "parse_scheme", "render", "instantiate", "subformulas",
    "Cond", "Model", "ModelError", "check_conditions", "parse_class", "validate",
    "extension", "extensions", "forces", "check_persistence", "globally_true",
    "LOGIC_IDS", "LogicSpec", "logic_spec",
    "SearchConfig", "SearchOutcome", "enumerate_models", "find_countermodel",
    "Derivation", "DerivationError", "check_derivation", "match_scheme",
    "run_experiment",
]
