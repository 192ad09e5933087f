"""Load and save assembly models as canonical, human-editable JSON.

A model file declares events, tasks, and automata explicitly, and may use two
generator shortcuts: a `precedence` edge list and a `dynamic` list of named
constraint patterns. Loading expands the shortcuts into specification
automata; saving always writes the expanded canonical form (fixed field
order, sorted events, stable state and transition order), so save-load-save
is byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from supseq.automata import (
    Automaton,
    AutomatonError,
    Event,
    state_label,
)
from supseq.modeling import (
    AssemblyModel,
    ModelingError,
    PrecedenceDigraph,
    TaskKind,
    TaskSpec,
    TracePredicate,
    exactly_once_predicate,
    forbid_after_predicate,
    forbid_start_after_done,
    immediate_successor_predicate,
    immediate_successor_spec,
    precedence_predicate,
    precedence_spec,
    repetitive_task,
    service_interlock_predicate,
    service_interlock_spec,
    single_task,
)


class ParseError(Exception):
    """The file is not syntactically valid; carries line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(Exception):
    """The file parsed but violates a model invariant, named in the message."""


_AUTOMATON_KINDS = ("plant", "spec", "supervisor", "composite")


def _expect(condition: bool, invariant: str) -> None:
    if not condition:
        raise ValidationError(invariant)


def load_model(path: str | Path) -> AssemblyModel:
    """Parse, validate, and expand a model file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from None
    return model_from_document(doc)


def model_from_document(doc: Any) -> AssemblyModel:
    _expect(isinstance(doc, dict), "model document must be a JSON object")
    name = doc.get("name", "model")
    _expect(isinstance(name, str) and name != "", "model name must be a non-empty string")

    events: dict[str, Event] = {}
    for entry in doc.get("events", []):
        _expect(
            isinstance(entry, dict) and isinstance(entry.get("name"), str)
            and isinstance(entry.get("controllable"), bool),
            "each event needs a string name and a boolean controllable flag",
        )
        ename = entry["name"]
        flag = entry["controllable"]
        if ename in events:
            _expect(
                events[ename].controllable == flag,
                f"event {ename!r} declared twice with conflicting controllability",
            )
        events[ename] = Event(ename, flag)

    tasks: list[TaskSpec] = []
    task_names: set[str] = set()
    for entry in doc.get("tasks", []):
        _expect(
            isinstance(entry, dict) and isinstance(entry.get("name"), str),
            "each task needs a string name",
        )
        tname = entry["name"]
        kind_raw = entry.get("kind", "single")
        _expect(
            kind_raw in (TaskKind.SINGLE.value, TaskKind.REPETITIVE.value),
            f"task {tname!r} kind must be 'single' or 'repetitive'",
        )
        _expect(tname not in task_names, f"task {tname!r} declared twice")
        task_names.add(tname)
        tasks.append(TaskSpec(tname, TaskKind(kind_raw)))

    # Task shortcuts register their own events; explicit declarations must agree.
    for task in tasks:
        for ev in (Event(f"{task.name}_start", True), Event(f"{task.name}_done", False)):
            if ev.name in events:
                _expect(
                    events[ev.name].controllable == ev.controllable,
                    f"event {ev.name!r} conflicts with the flag implied by task {task.name!r}",
                )
            events[ev.name] = ev

    plants: list[Automaton] = []
    specs: list[Automaton] = []
    supervisors: list[Automaton] = []
    explicit_names: set[str] = set()
    for entry in doc.get("automata", []):
        automaton, kind = _automaton_from_entry(entry, events)
        _expect(
            automaton.name not in explicit_names,
            f"automaton {automaton.name!r} declared twice",
        )
        explicit_names.add(automaton.name)
        if kind == "plant":
            plants.append(automaton)
        elif kind == "spec":
            specs.append(automaton)
        else:
            supervisors.append(automaton)

    plant_names = {p.name for p in plants}
    for task in tasks:
        if task.name in plant_names:
            continue
        if task.kind is TaskKind.SINGLE:
            plants.append(single_task(task.name))
        else:
            plants.append(repetitive_task(task.name))

    predicates: list[TracePredicate] = []
    edges: list[tuple[str, str]] = []
    for entry in doc.get("precedence", []):
        _expect(
            isinstance(entry, (list, tuple)) and len(entry) == 2
            and all(isinstance(x, str) for x in entry),
            "each precedence entry must be a [before, after] pair of task names",
        )
        before, after = entry
        _expect(before in task_names, f"precedence uses undeclared task {before!r}")
        _expect(after in task_names, f"precedence uses undeclared task {after!r}")
        edges.append((before, after))
    if edges:
        try:
            digraph = PrecedenceDigraph(tuple(sorted(task_names)), tuple(edges))
        except ModelingError as exc:
            raise ValidationError(str(exc)) from None
        for before, after in digraph.edges:
            specs.append(precedence_spec(before, after))
            predicates.append(precedence_predicate(before, after))

    ordered_tasks = [t.name for t in tasks]
    for entry in doc.get("dynamic", []):
        _expect(
            isinstance(entry, dict) and isinstance(entry.get("pattern"), str),
            "each dynamic entry needs a string pattern name",
        )
        try:
            spec, predicate = _dynamic_pattern(entry, ordered_tasks)
        except ModelingError as exc:
            raise ValidationError(str(exc)) from None
        specs.append(spec)
        predicates.append(predicate)

    single_names = [t.name for t in tasks if t.kind is TaskKind.SINGLE]
    if single_names:
        predicates.append(exactly_once_predicate(single_names))

    return AssemblyModel(
        name=name,
        tasks=tuple(tasks),
        plants=tuple(plants),
        specs=tuple(specs),
        predicates=tuple(predicates),
        supervisors=tuple(supervisors),
    )


def _dynamic_pattern(entry: dict, tasks: list[str]) -> tuple[Automaton, TracePredicate]:
    pattern = entry["pattern"]
    if pattern == "forbid_start_after_done":
        blocker, blocked = entry.get("blocker"), entry.get("blocked")
        _expect(
            isinstance(blocker, str) and isinstance(blocked, str),
            "forbid_start_after_done needs 'blocker' and 'blocked' task names",
        )
        return (
            forbid_start_after_done(blocker, blocked),
            forbid_after_predicate(blocker, blocked),
        )
    if pattern == "immediate_successor":
        condition = entry.get("condition")
        trigger = entry.get("trigger")
        subject = entry.get("subject")
        _expect(
            all(isinstance(x, str) for x in (condition, trigger, subject)),
            "immediate_successor needs 'condition', 'trigger', and 'subject' task names",
        )
        return (
            immediate_successor_spec(tasks, condition, trigger, subject),
            immediate_successor_predicate(condition, trigger, subject),
        )
    if pattern == "service_interlock":
        service = entry.get("service")
        adjacency = entry.get("adjacency")
        pair = entry.get("pair")
        final = entry.get("final")
        _expect(
            isinstance(service, str) and isinstance(final, str)
            and isinstance(adjacency, (list, tuple)) and len(adjacency) == 2
            and isinstance(pair, (list, tuple)) and len(pair) == 2,
            "service_interlock needs 'service', 'adjacency' pair, 'pair' pair, and 'final'",
        )
        return (
            service_interlock_spec(tasks, service, tuple(adjacency), tuple(pair), final),
            service_interlock_predicate(service, tuple(adjacency), tuple(pair), final),
        )
    raise ValidationError(f"unknown dynamic pattern {pattern!r}")


def _automaton_from_entry(entry: Any, events: dict[str, Event]) -> tuple[Automaton, str]:
    _expect(isinstance(entry, dict), "each automaton entry must be an object")
    name = entry.get("name")
    _expect(isinstance(name, str) and name != "", "automaton name must be a non-empty string")
    kind = entry.get("kind", "plant")
    _expect(kind in _AUTOMATON_KINDS, f"automaton {name!r} kind must be one of {_AUTOMATON_KINDS}")
    states = entry.get("states")
    _expect(
        isinstance(states, list) and states and all(isinstance(s, str) for s in states),
        f"automaton {name!r} needs a non-empty list of state names",
    )
    initial = entry.get("initial")
    _expect(initial in states, f"automaton {name!r} initial state must be a declared state")
    marked = entry.get("marked", [])
    for m in marked:
        _expect(m in states, f"automaton {name!r} marks undeclared state {m!r}")

    used_events: dict[str, Event] = {}
    triples = []
    seen_keys: set[tuple[str, str]] = set()
    for item in entry.get("transitions", []):
        _expect(
            isinstance(item, list) and len(item) == 3 and all(isinstance(x, str) for x in item),
            f"automaton {name!r} transitions must be [source, event, target] triples",
        )
        source, ename, target = item
        _expect(source in states, f"automaton {name!r} transition from undeclared state {source!r}")
        _expect(target in states, f"automaton {name!r} transition to undeclared state {target!r}")
        _expect(ename in events, f"automaton {name!r} uses undeclared event {ename!r}")
        _expect(
            (source, ename) not in seen_keys,
            f"automaton {name!r} declares two transitions for ({source!r}, {ename!r})",
        )
        seen_keys.add((source, ename))
        used_events[ename] = events[ename]
        triples.append((source, ename, target))

    alphabet = entry.get("alphabet")
    if alphabet is not None:
        for ename in alphabet:
            _expect(ename in events, f"automaton {name!r} lists undeclared event {ename!r}")
            used_events[ename] = events[ename]

    try:
        automaton = Automaton(name, states, used_events.values(), triples, initial, marked)
    except AutomatonError as exc:
        raise ValidationError(str(exc)) from None
    return automaton, kind


def model_to_document(model: AssemblyModel) -> dict:
    """Canonical document form: fixed key order, sorted events, expanded automata."""
    events: dict[str, Event] = {}
    groups = [
        ("plant", model.plants),
        ("spec", model.specs),
        ("supervisor", model.supervisors),
    ]
    for _, automata in groups:
        for automaton in automata:
            for ev in automaton.events:
                known = events.get(ev.name)
                if known is not None and known.controllable != ev.controllable:
                    raise ValidationError(
                        f"event {ev.name!r} has conflicting controllability across automata"
                    )
                events[ev.name] = ev

    doc: dict[str, Any] = {"name": model.name}
    doc["events"] = [
        {"name": ev.name, "controllable": ev.controllable}
        for ev in sorted(events.values())
    ]
    if model.tasks:
        doc["tasks"] = [
            {"name": t.name, "kind": t.kind.value}
            for t in sorted(model.tasks, key=lambda t: t.name)
        ]
    doc["automata"] = [
        _automaton_to_entry(automaton, kind)
        for kind, automata in groups
        for automaton in automata
    ]
    return doc


def _automaton_to_entry(a: Automaton, kind: str) -> dict:
    labels = [state_label(s) for s in a.states]
    if len(set(labels)) != len(labels):
        raise ValidationError(
            f"automaton {a.name!r} has state labels that collide when flattened; "
            "minimize or relabel before saving"
        )
    label_of = dict(zip(a.states, labels))
    label_index = {label: i for i, label in enumerate(labels)}
    transitions = sorted(
        ((label_of[source], ename, label_of[target])
         for (source, ename), target in a.transitions.items()),
        key=lambda t: (label_index[t[0]], t[1]),
    )
    return {
        "name": a.name,
        "kind": kind,
        "states": labels,
        "initial": label_of[a.initial],
        "marked": [label_of[s] for s in a.states if s in a.marked],
        "alphabet": [ev.name for ev in a.events],
        "transitions": [list(t) for t in transitions],
    }


def dumps_model(model: AssemblyModel) -> str:
    return json.dumps(model_to_document(model), indent=2) + "\n"


def save_model(model: AssemblyModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def select_automaton(model: AssemblyModel, name: str | None = None) -> Automaton:
    """Pick one automaton from a file: by name, else the single supervisor,
    else the only automaton present."""
    everything = list(model.plants) + list(model.specs) + list(model.supervisors)
    if name is not None:
        for automaton in everything:
            if automaton.name == name:
                return automaton
        raise ValidationError(f"no automaton named {name!r} in {model.name!r}")
    if len(model.supervisors) == 1:
        return model.supervisors[0]
    if len(everything) == 1:
        return everything[0]
    raise ValidationError(
        f"{model.name!r} holds {len(everything)} automata; pass a name to choose one"
    )
