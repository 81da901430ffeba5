import graphviz

from core.ftauto import FiniteTreeAutomaton
from core.rabin import RabinAutomaton


def graph_emit(automaton: RabinAutomaton | FiniteTreeAutomaton) -> str:
    """DOT text: a node per state, a point node per bundle with its letter on the incoming edge."""
    if isinstance(automaton, FiniteTreeAutomaton):
        A, initial, final = automaton.base, automaton.initial, automaton.final
    else:
        A, initial, final = automaton, frozenset(), None

    dot = graphviz.Digraph('automaton', graph_attr={'rankdir': 'TB'})
    if A.num_states == 0:
        return dot.source
    for state, name in enumerate(A.states):
        shape = 'doublecircle' if state in initial else 'circle'
        dot.node(f"s{state}", name, shape=shape, style='bold' if state == final else 'solid')
    for index, bundle in enumerate(A.bundles):
        hub = f"b{index}"
        dot.node(hub, '', shape='point')
        dot.edge(f"s{bundle.source}", hub, label=A.alphabet.token(bundle.label))
        for direction, terminal in enumerate(bundle.terminals):
            dot.edge(hub, f"s{terminal}", label=str(direction), style='dashed' if direction else 'solid')
    return dot.source
