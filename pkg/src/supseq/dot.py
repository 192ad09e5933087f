"""Graphviz DOT rendering of automata.

Marked states get a double green outline, blocking states (reachable but
unable to reach a marked state) a dashed red outline, and the initial state
an entry arrow. Node and edge order follow the automaton's state order, so
the output is byte-stable across runs.
"""

from __future__ import annotations

from supseq.automata import Automaton, State, coreachable_states, reachable_states, state_label


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    a: Automaton,
    highlight_marked: bool = True,
    highlight_blocking: bool = True,
    current: State | None = None,
) -> str:
    """Render the automaton as a DOT digraph.

    `current` optionally fills one state (by identifier or flattened label),
    used by the guidance service to show an operator's position.
    """
    blocking: frozenset[State] = frozenset()
    if highlight_blocking:
        blocking = reachable_states(a) - coreachable_states(a)

    labels = {s: state_label(s) for s in a.states}
    current_label = None
    if current is not None:
        current_label = current if isinstance(current, str) else state_label(current)

    lines = [f"digraph {_quote(a.name)} {{", "  rankdir=TB;", '  node [shape=ellipse];']
    lines.append("  __start [shape=point, label=\"\"];")
    index = {s: i for i, s in enumerate(a.states)}
    for s in a.states:
        attrs = [f"label={_quote(labels[s])}"]
        styles = []
        if highlight_marked and s in a.marked:
            attrs.append("peripheries=2")
            attrs.append('color="green3"')
        if s in blocking:
            styles.append("dashed")
            attrs.append('color="red"')
        if current_label is not None and (s == current or labels[s] == current_label):
            styles.append("filled")
            attrs.append('fillcolor="lightblue"')
        if styles:
            attrs.append(f'style="{",".join(styles)}"')
        lines.append(f"  n{index[s]} [{', '.join(attrs)}];")
    lines.append(f"  __start -> n{index[a.initial]};")
    edges = sorted(
        ((index[source], ename, index[target])
         for (source, ename), target in a.transitions.items()),
    )
    for source_i, ename, target_i in edges:
        lines.append(f"  n{source_i} -> n{target_i} [label={_quote(ename)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
