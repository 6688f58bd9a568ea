"""Double-head pushdown automata with input-driven signatures."""
from .constructions import (Dfa, complement, complete, intersect_regular, parse_dfa, reverse,
                            union_regular)
from .decision import equals_regular, is_empty, is_finite, regular_subset_of, subset_of_regular
from .engine import (Configuration, HaltReason, RunResult, TraceStep, accepts, apply,
                     enabled_transitions, find_accepting_trace, run_deterministic)
from .model import (BOTTOM, Action, Automaton, Head, Kind, Mode, Signature, Transition,
                    classify_determinism, classify_mode, parse_automaton, serialize_automaton,
                    validate)

__all__ = [
    "BOTTOM", "Action", "Automaton", "Configuration", "Dfa", "HaltReason", "Head", "Kind",
    "Mode", "RunResult", "Signature", "TraceStep", "Transition", "accepts", "apply",
    "classify_determinism", "classify_mode", "complement", "complete", "enabled_transitions",
    "equals_regular", "find_accepting_trace", "intersect_regular", "is_empty", "is_finite",
    "parse_automaton", "parse_dfa", "regular_subset_of", "reverse", "run_deterministic",
    "serialize_automaton", "subset_of_regular", "union_regular", "validate",
]
