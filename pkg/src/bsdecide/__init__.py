"""Satisfiability for the Bernays-Schoenfinkel class by Herbrand grounding."""

from .grounder import WitnessPolicy, ground, herbrand_universe, pi_translate, skolemize
from .logic import Fragment, classify, con_of, free_of, substitute_ground, vars_of
from .oracle import decide_by_bound, find_model, fo_evaluate
from .padding import pad, unpad
from .pipeline import decide, run_pipeline
from .prop import dpll_solve, evaluate, to_cnf, truth_table_solve
from .syntax import parse, pretty_print

__version__ = "0.1.0"

__all__ = [
    "Fragment",
    "WitnessPolicy",
    "classify",
    "con_of",
    "decide",
    "decide_by_bound",
    "dpll_solve",
    "evaluate",
    "find_model",
    "fo_evaluate",
    "free_of",
    "ground",
    "herbrand_universe",
    "pad",
    "parse",
    "pi_translate",
    "pretty_print",
    "run_pipeline",
    "skolemize",
    "substitute_ground",
    "to_cnf",
    "truth_table_solve",
    "unpad",
    "vars_of",
]
