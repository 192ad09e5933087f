"""Command-line driver: compose, synthesize, verify, enumerate, export, search, serve.

Every command writes deterministic output, supports machine-readable JSON
where it reports results, and exits non-zero on errors or failed checks.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from supseq.automata import (
    AutomatonError,
    compose_all,
    coreachable_states,
    is_nonblocking,
    minimize,
    reachable_states,
    state_label,
)
from supseq.digraph_search import search_case_study_digraph
from supseq.dot import export_dot
from supseq.enumeration import count_sequences, enumerate_sequences
from supseq.modelfile import (
    ParseError,
    ValidationError,
    load_model,
    save_model,
    select_automaton,
)
from supseq.modeling import (
    AssemblyModel,
    CASE_STUDY_DYNAMIC,
    CASE_STUDY_EDGES,
    ModelingError,
)
from supseq.synthesis import check_controllability, synthesize


def _emit(payload: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload, indent=2))
    else:
        for line in lines:
            print(line)


def cmd_compose(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    composite = compose_all(list(model.plants) + list(model.specs), name=f"{model.name}_composite")
    blocking = sorted(
        state_label(s) for s in reachable_states(composite) - coreachable_states(composite)
    )
    payload = {
        "name": composite.name,
        "states": len(composite.states),
        "transitions": composite.n_transitions,
        "nonblocking": not blocking,
        "blocking_states": blocking,
    }
    _emit(
        payload,
        args.json,
        [
            f"{composite.name}: {payload['states']} states, {payload['transitions']} transitions",
            "nonblocking" if not blocking else f"blocking states: {', '.join(blocking)}",
        ],
    )
    if args.output:
        out_model = AssemblyModel(
            name=composite.name,
            tasks=model.tasks,
            plants=(),
            specs=(),
            supervisors=(minimize(composite, name=composite.name) if args.minimize else composite,),
        )
        save_model(out_model, args.output)
    return 0


def cmd_synthesize(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    result = synthesize(list(model.plants), list(model.specs))
    removed = [[state_label(s), reason.value] for s, reason in result.removed_states]
    if result.is_empty:
        payload = {"empty": True, "removed_states": removed, "iterations": result.iterations}
        _emit(
            payload,
            args.json,
            ["no supervisor exists: every sequence violates the constraints "
             f"({len(removed)} states removed)"],
        )
        return 1
    supervisor = result.supervisor
    if args.minimize:
        supervisor = minimize(supervisor, name="supervisor")
    payload = {
        "empty": False,
        "states": len(supervisor.states),
        "transitions": supervisor.n_transitions,
        "minimized": bool(args.minimize),
        "removed_states": removed,
        "iterations": result.iterations,
        "certificates": {
            "controllable": result.certificates.controllable,
            "nonblocking": result.certificates.nonblocking,
        },
    }
    _emit(
        payload,
        args.json,
        [
            f"supervisor: {payload['states']} states, {payload['transitions']} transitions"
            + (" (minimized)" if args.minimize else ""),
            f"removed {len(removed)} states, {result.iterations} refinement rounds",
            f"certificates: controllable={result.certificates.controllable}, "
            f"nonblocking={result.certificates.nonblocking}",
        ],
    )
    if args.output:
        out_model = AssemblyModel(
            name=f"{model.name}_supervisor",
            tasks=model.tasks,
            plants=(),
            specs=(),
            supervisors=(supervisor,),
        )
        save_model(out_model, args.output)
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    candidate_model = load_model(args.supervisor)
    candidate = select_automaton(candidate_model, args.name)
    plant = compose_all(list(model.plants))
    report = check_controllability(plant, candidate)
    nb = is_nonblocking(candidate)
    payload = {
        "controllable": report.ok,
        "nonblocking": nb.nonblocking,
    }
    lines = []
    if report.ok:
        lines.append("controllable: yes")
    else:
        ce = report.counterexample
        payload["counterexample"] = {
            "trace": list(ce.trace),
            "event": ce.event,
            "plant_state": state_label(ce.plant_state),
            "candidate_state": state_label(ce.candidate_state),
        }
        lines.append(
            f"controllable: NO - after {' '.join(ce.trace) or '<empty>'} the plant "
            f"enables uncontrollable {ce.event} but the candidate disables it"
        )
    if nb.nonblocking:
        lines.append("nonblocking: yes")
    else:
        payload["blocking_witness"] = {
            "state": state_label(nb.blocking_state),
            "trace": list(nb.trace),
        }
        lines.append(
            f"nonblocking: NO - state {state_label(nb.blocking_state)} reached via "
            f"{' '.join(nb.trace) or '<empty>'} cannot reach a marked state"
        )
    _emit(payload, args.json, lines)
    return 0 if report.ok and nb.nonblocking else 1


def cmd_enumerate(args: argparse.Namespace) -> int:
    model = load_model(args.supervisor)
    automaton = select_automaton(model, args.name)
    result = enumerate_sequences(automaton, max_len=args.max_len, max_count=args.max_count)
    count = count_sequences(automaton)
    if args.json:
        payload = {
            "sequences": [list(t) for t in result.sequences],
            "complete": result.complete,
            "language_infinite": result.language_infinite,
            "bound_used": result.bound_used,
            "count": count,
        }
        print(json.dumps(payload, indent=2))
    else:
        for trace in result.sequences:
            print(" ".join(trace))
        summary = f"# {len(result.sequences)} sequences"
        if result.language_infinite:
            summary += " (language is infinite; bounded listing)"
        elif not result.complete:
            summary += " (truncated)"
        print(summary, file=sys.stderr)
    return 0


def cmd_export_dot(args: argparse.Namespace) -> int:
    model = load_model(args.file)
    automaton = select_automaton(model, args.name)
    sys.stdout.write(export_dot(automaton))
    return 0


def cmd_find_digraph(args: argparse.Namespace) -> int:
    target_composite = _parse_pair(args.target_composite, "--target-composite")
    target_supervisor = _parse_pair(args.target_supervisor, "--target-supervisor")
    progress = None
    if not args.json:
        progress = lambda n, _: print(f"  screened {n} digraphs...", file=sys.stderr)
    result = search_case_study_digraph(
        target_composite=target_composite,
        target_supervisor=target_supervisor,
        progress=progress,
    )

    def candidate_payload(c):
        return {
            "edges": [list(e) for e in c.edges],
            "composite": [c.composite_states, c.composite_transitions],
            "blocking_states": list(c.blocking_states or ()),
            "supervisor": (
                [c.supervisor_states, c.supervisor_transitions]
                if c.supervisor_states is not None
                else None
            ),
        }

    payload = {
        "digraphs_checked": result.digraphs_checked,
        "exact": result.exact,
        "matches": [candidate_payload(c) for c in result.matches],
        "pinned": candidate_payload(result.pinned) if result.pinned else None,
        "near_misses": [candidate_payload(c) for c in result.near_misses],
    }
    lines = [f"checked {result.digraphs_checked} acyclic digraphs"]
    if result.exact:
        lines.append(f"{len(result.matches)} digraphs reproduce the target sizes exactly")
    else:
        lines.append("no digraph reproduces the target sizes exactly; nearest candidates:")
        for c in result.near_misses[:5]:
            lines.append(
                f"  {c.edges} -> composite {c.composite_states}/{c.composite_transitions}, "
                f"blocking {len(c.blocking_states or ())}, supervisor "
                f"{c.supervisor_states}/{c.supervisor_transitions}"
            )
    if result.pinned:
        lines.append(
            f"pinned fixture: {result.pinned.edges} "
            f"(composite {result.pinned.composite_states}/{result.pinned.composite_transitions}, "
            f"supervisor {result.pinned.supervisor_states}/{result.pinned.supervisor_transitions})"
        )
    _emit(payload, args.json, lines)
    if args.emit_model:
        _write_case_study_file(args.emit_model, result.pinned.edges if result.pinned else ())
    return 0 if result.pinned else 1


def _write_case_study_file(path: str, edges) -> None:
    doc = {
        "name": "case_study",
        "events": [],
        "tasks": (
            [{"name": t, "kind": "single"} for t in ("A", "B", "C", "D", "E")]
            + [{"name": "F", "kind": "repetitive"}]
        ),
        "precedence": [list(e) for e in edges],
        "dynamic": [dict(d) for d in CASE_STUDY_DYNAMIC],
        "automata": [],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def cmd_case_study(args: argparse.Namespace) -> int:
    _write_case_study_file(args.output, CASE_STUDY_EDGES)
    if not args.json:
        print(f"wrote case-study model with pinned precedence to {args.output}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from supseq.service import create_app

    model = load_model(args.supervisor)
    automaton = select_automaton(model, args.name)
    app = create_app(automaton, tasks=model.tasks, model_name=model.name)
    port = args.port if args.port is not None else int(os.environ.get("PORT", "8000"))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def _parse_pair(text: str, flag: str) -> tuple[int, int]:
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise SystemExit(f"{flag} expects two comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="supseq",
        description="Model assembly tasks as automata, synthesize supervisors, "
        "enumerate feasible sequences, and serve operator guidance.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", help="compose a model's tasks and constraints")
    p.add_argument("model")
    p.add_argument("-o", "--output", help="write the composite to a model file")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("synthesize", help="synthesize the least restrictive supervisor")
    p.add_argument("model")
    p.add_argument("-o", "--output", help="write the supervisor to a model file")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", help="check a candidate supervisor against a model")
    p.add_argument("model")
    p.add_argument("--supervisor", required=True)
    p.add_argument("--name", help="automaton name inside the supervisor file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="list all complete sequences of a supervisor")
    p.add_argument("supervisor")
    p.add_argument("--name")
    p.add_argument("--max-len", type=int, default=64)
    p.add_argument("--max-count", type=int, default=100_000)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--json", action="store_true")
    group.add_argument("--lines", action="store_true", help="one sequence per line (default)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("export-dot", help="render an automaton file as Graphviz DOT")
    p.add_argument("file")
    p.add_argument("--name")
    p.set_defaults(func=cmd_export_dot)

    p = sub.add_parser(
        "find-digraph",
        help="search precedence digraphs that reproduce given target model sizes",
    )
    p.add_argument("--target-composite", default="33,45")
    p.add_argument("--target-supervisor", default="25,34")
    p.add_argument("--emit-model", help="write the pinned case-study model file here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_find_digraph)

    p = sub.add_parser("case-study", help="write the pinned case-study model file")
    p.add_argument("output")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_case_study)

    p = sub.add_parser("serve", help="run the interactive guidance service")
    p.add_argument("supervisor")
    p.add_argument("--name")
    p.add_argument("--port", type=int, default=None, help="default: $PORT or 8000")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, AutomatonError, ModelingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
