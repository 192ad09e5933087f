"""Monolithic supervisor synthesis over an explicit composed state space.

The supervisor is computed as the greatest sub-automaton of the composed
plant-and-constraint behavior in which every state can still reach a marked
state and no state lets an uncontrollable event escape into a removed or
undefined configuration while the plant can execute it. Independent checkers
for controllability and nonblocking certify each result, and a brute-force
enumeration over controllable-transition subsets serves as a test oracle for
maximal permissiveness.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from supseq.automata import (
    Automaton,
    ControllabilityMismatch,
    EmptyStateSet,
    State,
    Trace,
    bounded_words,
    compose_all,
    is_nonblocking,
    reachable_part,
    restrict,
)


class OracleTooLarge(Exception):
    """The brute-force oracle refuses instances beyond its transition budget."""


class RemovalReason(str, Enum):
    NOT_COREACHABLE = "NotCoreachable"
    UNCONTROLLABLE_PREDECESSOR = "UncontrollablePredecessor"


@dataclass(frozen=True)
class Certificates:
    controllable: bool
    nonblocking: bool


@dataclass(frozen=True)
class Counterexample:
    """A trace to a state pair where the plant enables an uncontrollable event
    that the candidate disables."""

    trace: Trace
    plant_state: State
    candidate_state: State
    event: str


@dataclass(frozen=True)
class ControllabilityReport:
    ok: bool
    counterexample: Counterexample | None = None


@dataclass(frozen=True)
class SynthesisResult:
    """Supervisor plus removal diagnostics.

    `supervisor` is None when the initial state itself had to be removed
    (over-constrained model, no feasible sequence). `removed_states` lists
    every discarded state of the composed behavior with the reason it fell;
    together with the supervisor states they account for every reachable
    composite state. `certificates` holds the independently verified
    controllability and nonblocking verdicts (None when empty).
    """

    supervisor: Automaton | None
    removed_states: tuple[tuple[State, RemovalReason], ...]
    iterations: int
    certificates: Certificates | None

    @property
    def is_empty(self) -> bool:
        return self.supervisor is None


def _plant_projection(strip: int):
    def project(state: State) -> State:
        for _ in range(strip):
            state = state[0]
        return state

    return project


def synthesize(
    plants: Sequence[Automaton],
    specs: Sequence[Automaton] = (),
) -> SynthesisResult:
    """Synthesize the least restrictive controllable nonblocking supervisor.

    The composed behavior of plants and constraints is pruned iteratively:
    first every state that cannot reach a marked state is dropped, then every
    state where the plant can fire an uncontrollable event whose successor is
    missing or already dropped — uncontrollable chains propagate backwards
    until only controllable cuts remain. The rounds repeat to a fixpoint.
    """
    plants = list(plants)
    specs = list(specs)
    if not plants:
        raise EmptyStateSet("synthesis needs at least one plant automaton")

    plant = compose_all(plants)
    composition = reachable_part(compose_all(plants + specs))
    project = _plant_projection(len(specs))

    uncontrollable = {e.name for e in plant.events if not e.controllable}
    plant_out = plant._out
    comp_out = composition._out

    retained = set(composition.states)
    removal_log: list[tuple[State, RemovalReason]] = []
    iterations = 0

    while True:
        removed_this_round: list[tuple[State, RemovalReason]] = []

        coreach = _coreachable_within(composition, retained)
        for state in composition.states:
            if state in retained and state not in coreach:
                retained.discard(state)
                removed_this_round.append((state, RemovalReason.NOT_COREACHABLE))

        # Back-propagate over uncontrollable events until stable within the round.
        while True:
            dangerous = []
            for state in composition.states:
                if state not in retained:
                    continue
                succ = comp_out[state]
                for ename in plant_out[project(state)]:
                    if ename not in uncontrollable:
                        continue
                    if ename not in succ or succ[ename] not in retained:
                        dangerous.append(state)
                        break
            if not dangerous:
                break
            for state in dangerous:
                retained.discard(state)
                removed_this_round.append(
                    (state, RemovalReason.UNCONTROLLABLE_PREDECESSOR)
                )

        if not removed_this_round:
            break
        iterations += 1
        removal_log.extend(removed_this_round)

    if composition.initial not in retained:
        return SynthesisResult(
            supervisor=None,
            removed_states=tuple(removal_log),
            iterations=iterations,
            certificates=None,
        )

    supervisor = restrict(composition, retained, name="supervisor")
    certificates = Certificates(
        controllable=check_controllability(plant, supervisor).ok,
        nonblocking=is_nonblocking(supervisor).nonblocking,
    )
    return SynthesisResult(
        supervisor=supervisor,
        removed_states=tuple(removal_log),
        iterations=iterations,
        certificates=certificates,
    )


def _coreachable_within(a: Automaton, retained: set[State]) -> set[State]:
    preds: dict[State, list[State]] = {}
    for (source, _), target in a.transitions.items():
        if source in retained and target in retained:
            preds.setdefault(target, []).append(source)
    seen = {s for s in a.marked if s in retained}
    queue = deque(seen)
    while queue:
        state = queue.popleft()
        for source in preds.get(state, ()):
            if source not in seen:
                seen.add(source)
                queue.append(source)
    return seen


def check_controllability(plant: Automaton, candidate: Automaton) -> ControllabilityReport:
    """Search plant ∥ candidate for an uncontrollable event the candidate disables.

    Events outside the candidate's alphabet are unconstrained by it and never
    count as disabled. Shared event names must carry the same controllability
    flag in both automata.
    """
    for ev in candidate.events:
        if ev.name in plant.event_names and plant.event(ev.name).controllable != ev.controllable:
            raise ControllabilityMismatch(
                f"event {ev.name!r} declared both controllable and uncontrollable"
            )

    plant_names = plant.event_names
    cand_names = candidate.event_names

    start = (plant.initial, candidate.initial)
    seen = {start}
    parent: dict[tuple[State, State], tuple[tuple[State, State], str]] = {}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        p, c = pair
        p_out = plant._out[p]
        c_out = candidate._out[c]
        for ename, pt in p_out.items():
            if ename in cand_names:
                if ename in c_out:
                    target = (pt, c_out[ename])
                else:
                    if not plant.event(ename).controllable:
                        trace: list[str] = []
                        cursor = pair
                        while cursor in parent:
                            cursor, moved = parent[cursor]
                            trace.append(moved)
                        trace.reverse()
                        return ControllabilityReport(
                            ok=False,
                            counterexample=Counterexample(
                                trace=tuple(trace),
                                plant_state=p,
                                candidate_state=c,
                                event=ename,
                            ),
                        )
                    continue
            else:
                target = (pt, c)
            if target not in seen:
                seen.add(target)
                parent[target] = (pair, ename)
                queue.append(target)
        for ename, ct in c_out.items():
            if ename not in plant_names:
                target = (p, ct)
                if target not in seen:
                    seen.add(target)
                    parent[target] = (pair, ename)
                    queue.append(target)
    return ControllabilityReport(ok=True)


@dataclass(frozen=True)
class WordSets:
    """Bounded language sample: accepted words and executable prefixes."""

    accepted: frozenset[Trace]
    prefixes: frozenset[Trace]


_ORACLE_BUDGET = 16


def brute_force_supremal(
    plants: Sequence[Automaton],
    specs: Sequence[Automaton],
    word_bound: int,
) -> WordSets:
    """Exhaustive oracle for the supremal controllable nonblocking behavior.

    Conceptually, every subset of the composition's controllable transitions
    is disabled in turn; each result is trimmed to its reachable and
    coreachable part and kept when it is controllable against the plant and
    nonblocking. The union of the surviving marked-word sets and prefix sets
    up to `word_bound` is the supremal language at that bound.

    Distinct subsets often trim to the same sub-automaton, so the walk
    visits trimmed candidates directly: starting from the trim of the full
    composition, it removes one live controllable transition at a time and
    re-trims (trim(T - t) equals trim(K - S - t), so every subset's trim is
    reached) with memoization on the surviving transition set. A candidate
    that passes both checks ends its branch: further disablement only yields
    sub-languages already inside the union, so only failing candidates are
    expanded. Exponential in the worst case — refuses instances with more
    controllable transitions than the budget of 16.
    """
    plants = list(plants)
    specs = list(specs)
    plant = compose_all(plants)
    composition = reachable_part(compose_all(plants + specs))

    n_controllable = sum(
        1
        for (_, ename) in composition.transitions
        if composition.event(ename).controllable
    )
    if n_controllable > _ORACLE_BUDGET:
        raise OracleTooLarge(
            f"{n_controllable} controllable transitions exceed "
            f"the oracle budget of {_ORACLE_BUDGET}"
        )

    controllable_names = {e.name for e in composition.events if e.controllable}
    all_triples = frozenset(
        (source, ename, target)
        for (source, ename), target in composition.transitions.items()
    )

    accepted: set[Trace] = set()
    prefixes: set[Trace] = set()
    seen: set[frozenset] = set()
    stack = [_trim_triples(composition, all_triples)]
    while stack:
        triples = stack.pop()
        if triples in seen:
            continue
        seen.add(triples)
        if not triples and composition.initial not in composition.marked:
            continue

        keep_states = {composition.initial}
        for source, _, target in triples:
            keep_states.add(source)
            keep_states.add(target)
        candidate = Automaton(
            "candidate",
            [s for s in composition.states if s in keep_states],
            composition.events,
            [(s, e, t) for s, e, t in triples],
            composition.initial,
            [s for s in composition.marked if s in keep_states],
        )
        if check_controllability(plant, candidate).ok and is_nonblocking(
            candidate
        ).nonblocking:
            defined, marked_words = bounded_words(candidate, word_bound)
            prefixes |= defined
            accepted |= marked_words
            continue
        for triple in triples:
            if triple[1] in controllable_names:
                stack.append(_trim_triples(composition, triples - {triple}))

    return WordSets(accepted=frozenset(accepted), prefixes=frozenset(prefixes))


def _trim_triples(a: Automaton, triples: frozenset) -> frozenset:
    """Transitions surviving the trim to reachable-and-coreachable states."""
    out: dict[State, list[State]] = {}
    preds: dict[State, list[State]] = {}
    for source, _, target in triples:
        out.setdefault(source, []).append(target)
        preds.setdefault(target, []).append(source)

    reach = {a.initial}
    queue = deque([a.initial])
    while queue:
        state = queue.popleft()
        for target in out.get(state, ()):
            if target not in reach:
                reach.add(target)
                queue.append(target)

    coreach = set(a.marked)
    queue = deque(a.marked)
    while queue:
        state = queue.popleft()
        for source in preds.get(state, ()):
            if source not in coreach:
                coreach.add(source)
                queue.append(source)

    keep = reach & coreach
    return frozenset(
        (s, e, t) for s, e, t in triples if s in keep and t in keep
    )
