"""Deterministic finite automata with marked states and controllable events.

Automaton values are immutable: every operation returns a new automaton.
State identifiers can be any hashable value. Synchronous composition yields
tuple identifiers recording both parents; `state_label` renders those as
dot-joined strings for display and serialization.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping

State = Hashable
Trace = tuple[str, ...]


class AutomatonError(Exception):
    """Base class for automaton construction and operation failures."""


class EmptyStateSet(AutomatonError):
    """An automaton needs at least one state."""


class DuplicateTransition(AutomatonError):
    """Two different successors declared for the same (state, event) pair."""


class DanglingReference(AutomatonError):
    """A transition, initial state, or marked state refers to an undeclared state or event."""


class ControllabilityMismatch(AutomatonError):
    """The same event name is used with conflicting controllability flags."""


class UnknownEvent(AutomatonError):
    pass


class UnknownState(AutomatonError):
    pass


@dataclass(frozen=True, order=True)
class Event:
    """A named event; controllable events are the ones a supervisor may disable."""

    name: str
    controllable: bool

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("event name must be a non-empty string")


@dataclass(frozen=True)
class ExecutionResult:
    """Outcome of running a trace: the state reached, or the position that failed.

    `state` is the last state entered. When the trace runs to completion,
    `undefined_at` is None; otherwise it is the index of the event that had
    no defined transition.
    """

    state: State
    undefined_at: int | None

    @property
    def ok(self) -> bool:
        return self.undefined_at is None


@dataclass(frozen=True)
class NonblockingReport:
    """Verdict of the nonblocking check, with a witness when it fails.

    `blocking_state` is a reachable state from which no marked state can be
    reached, and `trace` is a shortest event sequence leading to it.
    """

    nonblocking: bool
    blocking_state: State = None
    trace: Trace | None = None


def _normalize_alphabet(alphabet: Iterable[Event]) -> dict[str, Event]:
    by_name: dict[str, Event] = {}
    for ev in alphabet:
        if not isinstance(ev, Event):
            raise DanglingReference(f"alphabet entries must be Event values, got {ev!r}")
        known = by_name.get(ev.name)
        if known is None:
            by_name[ev.name] = ev
        elif known.controllable != ev.controllable:
            raise ControllabilityMismatch(
                f"event {ev.name!r} declared both controllable and uncontrollable"
            )
    return by_name


def _iter_transition_triples(
    transitions: Mapping | Iterable,
) -> Iterator[tuple[State, object, State]]:
    if isinstance(transitions, Mapping):
        for key, target in transitions.items():
            source, event = key
            yield source, event, target
    else:
        for source, event, target in transitions:
            yield source, event, target


class Automaton:
    """A deterministic FA with a partial transition function and marked states.

    Construction validates determinism and referential integrity once; the
    value is then safe to share across threads. Transitions are keyed by
    (state, event name).
    """

    __slots__ = (
        "name",
        "states",
        "events",
        "initial",
        "marked",
        "transitions",
        "_state_set",
        "_by_name",
        "_out",
    )

    def __init__(
        self,
        name: str,
        states: Iterable[State],
        alphabet: Iterable[Event],
        transitions: Mapping | Iterable,
        initial: State,
        marked: Iterable[State],
    ) -> None:
        states = tuple(states)
        if not states:
            raise EmptyStateSet(f"automaton {name!r} must have at least one state")
        state_set = frozenset(states)
        if len(state_set) != len(states):
            raise DanglingReference(f"automaton {name!r} repeats a state identifier")

        by_name = _normalize_alphabet(alphabet)

        if initial not in state_set:
            raise DanglingReference(f"initial state {initial!r} is not a declared state")
        marked = frozenset(marked)
        for m in marked:
            if m not in state_set:
                raise DanglingReference(f"marked state {m!r} is not a declared state")

        tmap: dict[tuple[State, str], State] = {}
        for source, event, target in _iter_transition_triples(transitions):
            if isinstance(event, Event):
                declared = by_name.get(event.name)
                if declared is None:
                    raise DanglingReference(
                        f"transition event {event.name!r} is not in the alphabet"
                    )
                if declared.controllable != event.controllable:
                    raise ControllabilityMismatch(
                        f"event {event.name!r} declared both controllable and uncontrollable"
                    )
                ename = event.name
            else:
                ename = event
                if ename not in by_name:
                    raise DanglingReference(
                        f"transition event {ename!r} is not in the alphabet"
                    )
            if source not in state_set:
                raise DanglingReference(f"transition source {source!r} is not a declared state")
            if target not in state_set:
                raise DanglingReference(f"transition target {target!r} is not a declared state")
            key = (source, ename)
            if key in tmap and tmap[key] != target:
                raise DuplicateTransition(
                    f"state {source!r} has two successors for event {ename!r}"
                )
            tmap[key] = target

        out: dict[State, dict[str, State]] = {s: {} for s in states}
        for (source, ename), target in tmap.items():
            out[source][ename] = target
        # Sorted inner maps make every downstream iteration order-deterministic.
        out = {s: dict(sorted(succ.items())) for s, succ in out.items()}

        object.__setattr__(self, "name", name)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "events", tuple(sorted(by_name.values())))
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "marked", marked)
        object.__setattr__(self, "transitions", tmap)
        object.__setattr__(self, "_state_set", state_set)
        object.__setattr__(self, "_by_name", by_name)
        object.__setattr__(self, "_out", out)

    def __setattr__(self, key, value):
        raise AttributeError("Automaton values are immutable")

    def __repr__(self) -> str:
        return (
            f"<Automaton {self.name!r}: {len(self.states)} states, "
            f"{self.n_transitions} transitions>"
        )

    @property
    def n_transitions(self) -> int:
        return len(self.transitions)

    @property
    def event_names(self) -> frozenset[str]:
        return frozenset(self._by_name)

    def event(self, name: str) -> Event:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownEvent(f"event {name!r} is not in the alphabet of {self.name!r}") from None

    def has_state(self, state: State) -> bool:
        return state in self._state_set

    def is_marked(self, state: State) -> bool:
        if state not in self._state_set:
            raise UnknownState(f"state {state!r} is not a state of {self.name!r}")
        return state in self.marked

    def successor(self, state: State, event: str) -> State | None:
        """The target of the transition, or None when it is undefined."""
        if state not in self._state_set:
            raise UnknownState(f"state {state!r} is not a state of {self.name!r}")
        if event not in self._by_name:
            raise UnknownEvent(f"event {event!r} is not in the alphabet of {self.name!r}")
        succ = self._out[state]
        if event in succ:
            return succ[event]
        return None

    def enabled_events(self, state: State) -> tuple[Event, ...]:
        """Events with a defined transition at `state`, sorted by name."""
        if state not in self._state_set:
            raise UnknownState(f"state {state!r} is not a state of {self.name!r}")
        return tuple(self._by_name[e] for e in self._out[state])

    def execute(self, trace: Iterable[str | Event]) -> ExecutionResult:
        """Run a trace from the initial state through the partial transition map."""
        state = self.initial
        for k, ev in enumerate(trace):
            name = ev.name if isinstance(ev, Event) else ev
            if name not in self._by_name:
                raise UnknownEvent(f"event {name!r} is not in the alphabet of {self.name!r}")
            succ = self._out[state]
            if name not in succ:
                return ExecutionResult(state=state, undefined_at=k)
            state = succ[name]
        return ExecutionResult(state=state, undefined_at=None)

    def accepts(self, trace: Iterable[str | Event]) -> bool:
        """True when the trace is executable and ends in a marked state."""
        result = self.execute(trace)
        return result.ok and result.state in self.marked


def new_automaton(
    name: str,
    states: Iterable[State],
    alphabet: Iterable[Event],
    transitions: Mapping | Iterable,
    initial: State,
    marked: Iterable[State],
) -> Automaton:
    """Validate and build an immutable automaton."""
    return Automaton(name, states, alphabet, transitions, initial, marked)


def state_label(state: State) -> str:
    """Render a (possibly nested tuple) state identifier as a dot-joined string."""
    if isinstance(state, tuple):
        return ".".join(state_label(part) for part in state)
    return str(state)


def synchronous_composition(a: Automaton, b: Automaton, name: str | None = None) -> Automaton:
    """Parallel product: shared events move both operands, private events interleave.

    Only states reachable from the composite initial state are retained.
    Composite identifiers are (a_state, b_state) pairs, and a composite state
    is marked iff both parents are marked.
    """
    merged = _normalize_alphabet(list(a.events) + list(b.events))
    a_names = a.event_names
    b_names = b.event_names

    initial = (a.initial, b.initial)
    order: list[tuple[State, State]] = [initial]
    seen = {initial}
    transitions: dict[tuple[tuple[State, State], str], tuple[State, State]] = {}
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        p, q = state
        moves: list[tuple[str, tuple[State, State]]] = []
        p_out = a._out[p]
        q_out = b._out[q]
        for ename, pt in p_out.items():
            if ename in b_names:
                if ename in q_out:
                    moves.append((ename, (pt, q_out[ename])))
            else:
                moves.append((ename, (pt, q)))
        for ename, qt in q_out.items():
            if ename not in a_names:
                moves.append((ename, (p, qt)))
        moves.sort(key=lambda m: m[0])
        for ename, target in moves:
            transitions[(state, ename)] = target
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)

    marked = [s for s in order if s[0] in a.marked and s[1] in b.marked]
    return Automaton(
        name or f"{a.name}||{b.name}",
        order,
        merged.values(),
        transitions,
        initial,
        marked,
    )


def compose_all(automata: Iterable[Automaton], name: str | None = None) -> Automaton:
    """Left fold of synchronous composition; a singleton list folds to itself."""
    automata = list(automata)
    if not automata:
        raise EmptyStateSet("compose_all needs at least one automaton")
    result = automata[0]
    for other in automata[1:]:
        result = synchronous_composition(result, other)
    if name is not None and result.name != name:
        result = rename(result, name)
    return result


def rename(a: Automaton, name: str) -> Automaton:
    return Automaton(name, a.states, a.events, a.transitions, a.initial, a.marked)


def with_initial(a: Automaton, state: State, name: str | None = None) -> Automaton:
    """The same automaton rerooted at a different initial state."""
    if not a.has_state(state):
        raise UnknownState(f"state {state!r} is not a state of {a.name!r}")
    return Automaton(name or a.name, a.states, a.events, a.transitions, state, a.marked)


def restrict(a: Automaton, keep: Iterable[State], name: str | None = None) -> Automaton:
    """Sub-automaton induced by `keep`; the initial state must be kept."""
    keep = set(keep)
    states = [s for s in a.states if s in keep]
    transitions = {
        key: t for key, t in a.transitions.items() if key[0] in keep and t in keep
    }
    marked = [s for s in states if s in a.marked]
    return Automaton(name or a.name, states, a.events, transitions, a.initial, marked)


def reachable_states(a: Automaton) -> frozenset[State]:
    """Least set containing the initial state and closed under transitions."""
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        state = queue.popleft()
        for target in a._out[state].values():
            if target not in seen:
                seen.add(target)
                queue.append(target)
    return frozenset(seen)


def coreachable_states(a: Automaton) -> frozenset[State]:
    """Least set containing the marked states and closed under predecessors."""
    preds: dict[State, list[State]] = {}
    for (source, _), target in a.transitions.items():
        preds.setdefault(target, []).append(source)
    seen = set(a.marked)
    queue = deque(a.marked)
    while queue:
        state = queue.popleft()
        for source in preds.get(state, ()):
            if source not in seen:
                seen.add(source)
                queue.append(source)
    return frozenset(seen)


def bfs_order(a: Automaton) -> list[State]:
    """Reachable states in breadth-first discovery order, events taken alphabetically."""
    order = [a.initial]
    seen = {a.initial}
    queue = deque([a.initial])
    while queue:
        state = queue.popleft()
        for target in a._out[state].values():
            if target not in seen:
                seen.add(target)
                order.append(target)
                queue.append(target)
    return order


def reachable_part(a: Automaton, name: str | None = None) -> Automaton:
    """Restriction of the automaton to its reachable states (in discovery order)."""
    order = bfs_order(a)
    if len(order) == len(a.states):
        return a if name is None else rename(a, name)
    keep = set(order)
    transitions = {key: t for key, t in a.transitions.items() if key[0] in keep}
    marked = [s for s in order if s in a.marked]
    return Automaton(name or a.name, order, a.events, transitions, a.initial, marked)


def is_nonblocking(a: Automaton) -> NonblockingReport:
    """Check that every reachable state can still reach a marked state.

    On failure the report carries the first blocking state found by
    breadth-first search (shortest witness trace, alphabetical tie-break).
    """
    coreach = coreachable_states(a)
    parent: dict[State, tuple[State, str]] = {}
    seen = {a.initial}
    queue = deque([a.initial])
    witness = None
    while queue:
        state = queue.popleft()
        if state not in coreach:
            witness = state
            break
        for ename, target in a._out[state].items():
            if target not in seen:
                seen.add(target)
                parent[target] = (state, ename)
                queue.append(target)
    if witness is None:
        return NonblockingReport(nonblocking=True)
    trace: list[str] = []
    cursor = witness
    while cursor in parent:
        cursor, ename = parent[cursor]
        trace.append(ename)
    trace.reverse()
    return NonblockingReport(nonblocking=False, blocking_state=witness, trace=tuple(trace))


def minimize(a: Automaton, name: str | None = None) -> Automaton:
    """Smallest automaton with the same marked language and the same defined words.

    Partial transitions are significant: a missing transition is
    distinguishable from any present one, so states are merged only when they
    agree on marking, on which events are defined, and on successor classes.
    The input is first restricted to its reachable part. Output states are
    relabeled q0..qn in breadth-first discovery order.
    """
    order = bfs_order(a)
    out = {s: a._out[s] for s in order}

    # Moore partition refinement, seeded by the marking flag.
    block: dict[State, int] = {}
    seed: dict[bool, int] = {}
    for s in order:
        flag = s in a.marked
        if flag not in seed:
            seed[flag] = len(seed)
        block[s] = seed[flag]
    n_blocks = len(seed)
    while True:
        signatures: dict[tuple, int] = {}
        new_block: dict[State, int] = {}
        for s in order:
            sig = (block[s], tuple((e, block[t]) for e, t in out[s].items()))
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_block[s] = signatures[sig]
        if len(signatures) == n_blocks:
            break
        block = new_block
        n_blocks = len(signatures)

    representative: dict[int, State] = {}
    for s in order:
        representative.setdefault(block[s], s)

    # Relabel the quotient breadth-first from the initial block.
    start = block[a.initial]
    labels = {start: "q0"}
    block_order = [start]
    queue = deque([start])
    while queue:
        b = queue.popleft()
        rep = representative[b]
        for _, target in out[rep].items():
            tb = block[target]
            if tb not in labels:
                labels[tb] = f"q{len(labels)}"
                block_order.append(tb)
                queue.append(tb)

    states = [labels[b] for b in block_order]
    transitions = {}
    for b in block_order:
        rep = representative[b]
        for ename, target in out[rep].items():
            transitions[(labels[b], ename)] = labels[block[target]]
    marked = [labels[b] for b in block_order if representative[b] in a.marked]
    return Automaton(name or a.name, states, a.events, transitions, "q0", marked)


def bounded_words(a: Automaton, max_len: int) -> tuple[frozenset[Trace], frozenset[Trace]]:
    """All executable words and all accepted words of length at most `max_len`."""
    defined: set[Trace] = set()
    accepted: set[Trace] = set()
    stack: list[tuple[State, Trace]] = [(a.initial, ())]
    while stack:
        state, word = stack.pop()
        defined.add(word)
        if state in a.marked:
            accepted.add(word)
        if len(word) < max_len:
            for ename, target in a._out[state].items():
                stack.append((target, word + (ename,)))
    return frozenset(defined), frozenset(accepted)


def canonical_key(a: Automaton) -> tuple:
    """A canonical fingerprint of the reachable part, invariant under state relabeling.

    Two deterministic automata are isomorphic on their reachable parts iff
    their keys are equal (the breadth-first relabeling is canonical for
    deterministic transition maps with alphabetically ordered events).
    """
    order = bfs_order(a)
    index = {s: i for i, s in enumerate(order)}
    transitions = tuple(
        sorted(
            (index[source], ename, index[target])
            for (source, ename), target in a.transitions.items()
            if source in index
        )
    )
    marked = tuple(sorted(index[s] for s in a.marked if s in index))
    events = tuple((e.name, e.controllable) for e in a.events)
    return (events, len(order), transitions, marked)
