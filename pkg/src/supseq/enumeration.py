"""Enumerate and count the complete sequences a supervisor admits.

A complete sequence is an event trace from the initial state to a marked
state. Enumeration is depth-first with events taken alphabetically, pruned to
states that can still reach a marked state, and bounded in both length and
count so that repeatable tasks (which make the language infinite) cannot hang
the walk.
"""

from __future__ import annotations

from dataclasses import dataclass

from supseq.automata import Automaton, State, Trace, coreachable_states, reachable_states


@dataclass(frozen=True)
class SequenceSet:
    """Enumerated complete traces plus exhaustiveness flags.

    `complete` is True only when every complete trace of the automaton is
    listed; `language_infinite` reports a reachable cycle that can still lead
    to completion, which forces truncation at `bound_used`.
    """

    sequences: tuple[Trace, ...]
    complete: bool
    language_infinite: bool
    bound_used: int


def _trim_states(a: Automaton) -> frozenset[State]:
    return reachable_states(a) & coreachable_states(a)


def _has_cycle_within(a: Automaton, keep: frozenset[State]) -> bool:
    indeg: dict[State, int] = {s: 0 for s in keep}
    succ: dict[State, list[State]] = {s: [] for s in keep}
    for (source, _), target in a.transitions.items():
        if source in keep and target in keep:
            succ[source].append(target)
            indeg[target] += 1
    queue = [s for s in keep if indeg[s] == 0]
    visited = 0
    while queue:
        state = queue.pop()
        visited += 1
        for target in succ[state]:
            indeg[target] -= 1
            if indeg[target] == 0:
                queue.append(target)
    return visited != len(keep)


def enumerate_sequences(
    a: Automaton, max_len: int = 64, max_count: int = 100_000
) -> SequenceSet:
    """All complete traces up to `max_len`, at most `max_count` of them.

    Traces come out in depth-first order with alphabetical event choice, so
    the listing is deterministic. Branches that can no longer reach a marked
    state are pruned, which also guarantees termination on cyclic automata.
    """
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    if max_count < 1:
        raise ValueError("max_count must be positive")

    keep = _trim_states(a)
    infinite = _has_cycle_within(a, keep)

    sequences: list[Trace] = []
    truncated = False
    count_exceeded = False

    if a.initial in keep:
        stack: list[tuple[State, Trace]] = [(a.initial, ())]
        while stack:
            state, word = stack.pop()
            if state in a.marked:
                if len(sequences) >= max_count:
                    count_exceeded = True
                    break
                sequences.append(word)
            moves = [
                (ename, target)
                for ename, target in a._out[state].items()
                if target in keep
            ]
            if not moves:
                continue
            if len(word) == max_len:
                truncated = True
                continue
            for ename, target in reversed(moves):
                stack.append((target, word + (ename,)))

    return SequenceSet(
        sequences=tuple(sequences),
        complete=not truncated and not count_exceeded,
        language_infinite=infinite,
        bound_used=max_len,
    )


def count_sequences(a: Automaton) -> int | None:
    """Exact number of complete traces, or None when the language is infinite.

    Counts distinct accepting paths by dynamic programming over the acyclic
    reachable-and-coreachable part; a cycle there means infinitely many.
    """
    keep = _trim_states(a)
    if a.initial not in keep:
        return 0
    if _has_cycle_within(a, keep):
        return None

    succ: dict[State, list[State]] = {s: [] for s in keep}
    indeg: dict[State, int] = {s: 0 for s in keep}
    for (source, _), target in a.transitions.items():
        if source in keep and target in keep:
            succ[source].append(target)
            indeg[target] += 1

    topo: list[State] = [s for s in keep if indeg[s] == 0]
    cursor = 0
    degrees = dict(indeg)
    while cursor < len(topo):
        state = topo[cursor]
        cursor += 1
        for target in succ[state]:
            degrees[target] -= 1
            if degrees[target] == 0:
                topo.append(target)

    paths: dict[State, int] = {}
    for state in reversed(topo):
        total = 1 if state in a.marked else 0
        for target in succ[state]:
            total += paths[target]
        paths[state] = total
    return paths[a.initial]
