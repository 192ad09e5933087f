import random

import pytest

from supseq.automata import Automaton, Event, minimize, reachable_states
from supseq.modeling import case_study_model
from supseq.synthesis import synthesize


def random_automaton(
    rng: random.Random,
    events: list[Event],
    max_states: int,
    density: float = 0.5,
    marked_p: float = 0.4,
    name: str = "rand",
) -> Automaton:
    """Deterministic random DFA over the given alphabet."""
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    transitions = []
    for s in states:
        for ev in events:
            if rng.random() < density:
                transitions.append((s, ev.name, rng.choice(states)))
    marked = [s for s in states if rng.random() < marked_p]
    return Automaton(name, states, events, transitions, "s0", marked)


def event_pool(shared: int, private_a: int, private_b: int, rng: random.Random):
    """Alphabets with a shared core: controllability fixed per event name."""
    def mk(prefix, count):
        return [Event(f"{prefix}{i}", rng.random() < 0.5) for i in range(count)]

    shared_events = mk("sh", shared)
    a_events = shared_events + mk("pa", private_a)
    b_events = shared_events + mk("pb", private_b)
    return a_events, b_events


def distinguishability_classes(a: Automaton) -> list[list]:
    """Independent minimality oracle: pairwise table filling over the
    reachable states, with definedness and marking both significant."""
    reach = [s for s in a.states if s in reachable_states(a)]
    out = {
        s: {e.name: a.successor(s, e.name) for e in a.enabled_events(s)} for s in reach
    }
    index = {s: i for i, s in enumerate(reach)}
    dist = set()
    for i, p in enumerate(reach):
        for q in reach[i + 1:]:
            if (p in a.marked) != (q in a.marked) or set(out[p]) != set(out[q]):
                dist.add((p, q))
    changed = True
    while changed:
        changed = False
        for i, p in enumerate(reach):
            for q in reach[i + 1:]:
                if (p, q) in dist:
                    continue
                for ename, pt in out[p].items():
                    qt = out[q][ename]
                    if pt == qt:
                        continue
                    key = (pt, qt) if index[pt] <= index[qt] else (qt, pt)
                    if key in dist:
                        dist.add((p, q))
                        changed = True
                        break
    classes: list[list] = []
    for s in reach:
        for cls in classes:
            rep = cls[0]
            key = (rep, s) if index[rep] <= index[s] else (s, rep)
            if key not in dist:
                cls.append(s)
                break
        else:
            classes.append([s])
    return classes


@pytest.fixture(scope="session")
def case_study():
    return case_study_model()


@pytest.fixture(scope="session")
def case_study_synthesis(case_study):
    return synthesize(list(case_study.plants), list(case_study.specs))


@pytest.fixture(scope="session")
def case_study_supervisor(case_study_synthesis):
    return minimize(case_study_synthesis.supervisor, name="supervisor")
