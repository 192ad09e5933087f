"""Supervisory-control toolkit for assembly sequencing.

Models tasks and ordering constraints as finite automata, synthesizes the
least restrictive controllable nonblocking supervisor, enumerates the
feasible assembly sequences, and serves step-by-step operator guidance.
"""

from supseq.automata import (
    Automaton,
    AutomatonError,
    ControllabilityMismatch,
    DanglingReference,
    DuplicateTransition,
    EmptyStateSet,
    Event,
    ExecutionResult,
    NonblockingReport,
    UnknownEvent,
    UnknownState,
    bounded_words,
    canonical_key,
    compose_all,
    coreachable_states,
    is_nonblocking,
    minimize,
    new_automaton,
    reachable_states,
    state_label,
    synchronous_composition,
    with_initial,
)
from supseq.synthesis import (
    Certificates,
    ControllabilityReport,
    OracleTooLarge,
    RemovalReason,
    SynthesisResult,
    WordSets,
    brute_force_supremal,
    check_controllability,
    synthesize,
)
from supseq.modeling import (
    AssemblyModel,
    CyclicDigraph,
    InvalidName,
    PrecedenceDigraph,
    SelfPrecedence,
    TaskKind,
    TaskSpec,
    TracePredicate,
    case_study_model,
    compile_precedence_digraph,
    forbid_start_after_done,
    immediate_successor_spec,
    precedence_spec,
    repetitive_task,
    service_interlock_spec,
    single_task,
    trace_predicates,
)
from supseq.enumeration import SequenceSet, count_sequences, enumerate_sequences
from supseq.dot import export_dot
from supseq.modelfile import (
    ParseError,
    ValidationError,
    load_model,
    save_model,
    select_automaton,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
