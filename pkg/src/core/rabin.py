from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import TYPE_CHECKING, Mapping, NamedTuple, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from core.logger_config import logger
from core.treecore import (EPSILON, Alphabet, FullSubtree, Pattern, TreeSignature, Word, block_height,
                           check_pattern, format_word, from_labeling, translate)

if TYPE_CHECKING:
    from core.cellauto import CellularAutomaton


class Bundle(NamedTuple):
    source: int
    label: int
    terminals: tuple[int, ...]


@dataclass(frozen=True)
class RabinAutomaton:
    signature: TreeSignature
    alphabet: Alphabet
    states: tuple[str, ...]
    bundles: tuple[Bundle, ...]

    def __post_init__(self):
        states = tuple(self.states)
        if len(set(states)) != len(states):
            raise ValueError("duplicate state names")
        for name in states:
            if not name or any(ch.isspace() for ch in name):
                raise ValueError(f"invalid state name {name!r}")
        bundles = []
        for source, label, terminals in self.bundles:
            bundle = Bundle(int(source), int(label), tuple(int(t) for t in terminals))
            if len(bundle.terminals) != self.signature.arity:
                raise ValueError(f"bundle {bundle} must have exactly {self.signature.arity} terminals")
            if not all(0 <= state < len(states) for state in (bundle.source, *bundle.terminals)):
                raise ValueError(f"bundle {bundle} refers to an unknown state")
            if not 0 <= bundle.label < len(self.alphabet):
                raise ValueError(f"bundle {bundle} carries a label outside the alphabet")
            bundles.append(bundle)
        ordered = tuple(sorted(bundles))
        if len(set(ordered)) != len(ordered):
            raise ValueError("duplicate transition bundles")
        object.__setattr__(self, 'states', states)
        object.__setattr__(self, 'bundles', ordered)

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.signature, self.alphabet, self.states, self.bundles))

    @property
    def num_states(self) -> int:
        return len(self.states)

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise ValueError(f"unknown state {name!r}") from None

    @cached_property
    def sources(self) -> np.ndarray:
        return np.array([b.source for b in self.bundles], dtype=np.intp)

    @cached_property
    def labels(self) -> np.ndarray:
        return np.array([b.label for b in self.bundles], dtype=np.intp)

    @cached_property
    def terminals(self) -> np.ndarray:
        array = np.array([b.terminals for b in self.bundles], dtype=np.intp)
        return array.reshape(len(self.bundles), self.signature.arity)

    @cached_property
    def bundles_from(self) -> tuple[tuple[int, ...], ...]:
        outgoing: list[list[int]] = [[] for _ in self.states]
        for index, bundle in enumerate(self.bundles):
            outgoing[bundle.source].append(index)
        return tuple(tuple(indices) for indices in outgoing)

    @cached_property
    def bundle_set(self) -> frozenset[Bundle]:
        return frozenset(self.bundles)

    def describe(self, bundle: Bundle) -> str:
        terminals = ' '.join(self.states[t] for t in bundle.terminals)
        return f"{self.states[bundle.source]} {self.alphabet.token(bundle.label)} {terminals}"


@dataclass(frozen=True)
class RunAssignment:
    domain: FullSubtree
    assignment: Mapping[Word, int]


@dataclass(frozen=True)
class RegularConfigurationMachine:
    signature: TreeSignature
    alphabet: Alphabet
    states: tuple[str, ...]
    root: int
    colors: tuple[int, ...]
    steps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        object.__setattr__(self, 'colors', tuple(self.colors))
        object.__setattr__(self, 'steps', tuple(tuple(step) for step in self.steps))
        size = len(self.states)
        if len(set(self.states)) != size:
            raise ValueError("duplicate machine state names")
        if not (len(self.colors) == len(self.steps) == size) or not 0 <= self.root < size:
            raise ValueError("machine tables do not match its state set")
        for step in self.steps:
            if len(step) != self.signature.arity or not all(0 <= s < size for s in step):
                raise ValueError(f"invalid step {step}")
        if not all(0 <= color < len(self.alphabet) for color in self.colors):
            raise ValueError("machine color outside the alphabet")
        if len(_reachable(self.root, self.steps)) != size:
            raise ValueError("every machine state must be reachable from the root")


def _reachable(root: int, steps: tuple[tuple[int, ...], ...] | list[tuple[int, ...]]) -> list[int]:
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        state = queue.popleft()
        for successor in steps[state]:
            if successor not in seen:
                seen.add(successor)
                order.append(successor)
                queue.append(successor)
    return order


def _trimmed_machine(sig: TreeSignature, alphabet: Alphabet, names: list[str], root: int,
                     colors: list[int], steps: list[tuple[int, ...]]) -> RegularConfigurationMachine:
    order = _reachable(root, steps)
    renumber = {old: new for new, old in enumerate(order)}
    return RegularConfigurationMachine(
        signature=sig,
        alphabet=alphabet,
        states=tuple(names[old] for old in order),
        root=0,
        colors=tuple(colors[old] for old in order),
        steps=tuple(tuple(renumber[s] for s in steps[old]) for old in order))


def full_shift_automaton(sig: TreeSignature, alphabet: Alphabet) -> RabinAutomaton:
    loop = tuple(0 for _ in sig.directions)
    return RabinAutomaton(sig, alphabet, ('s',), tuple(Bundle(0, label, loop) for label in range(len(alphabet))))


def possible_states(A: RabinAutomaton, p: Pattern, boundary: np.ndarray) -> dict[Word, np.ndarray]:
    """Bottom-up sets of states that may sit at each vertex; `boundary` is used below the leaves."""
    check_pattern(p, A.signature, A.alphabet)
    table: dict[Word, np.ndarray] = {}
    preorder: list[tuple[Word, Pattern]] = []
    stack: list[tuple[Word, Pattern]] = [(EPSILON, p)]
    while stack:
        word, node = stack.pop()
        preorder.append((word, node))
        stack.extend((word + (direction,), child) for direction, child in enumerate(node.children))

    # children precede their parent in reversed preorder
    for word, node in reversed(preorder):
        if node.is_leaf:
            child_sets = [boundary] * A.signature.arity
        else:
            child_sets = [table[word + (direction,)] for direction in A.signature.directions]
        ok = A.labels == node.label
        for direction, child_set in enumerate(child_sets):
            ok &= child_set[A.terminals[:, direction]]
        result = np.zeros(A.num_states, dtype=bool)
        result[A.sources[ok]] = True
        table[word] = result
    return table


def extract_run(A: RabinAutomaton, p: Pattern, table: dict[Word, np.ndarray], boundary: np.ndarray,
                root_choices: np.ndarray) -> Optional[RunAssignment]:
    candidates = np.flatnonzero(table[EPSILON] & root_choices)
    if candidates.size == 0:
        return None
    assignment: dict[Word, int] = {EPSILON: int(candidates[0])}

    def descend(node: Pattern, word: Word, state: int) -> None:
        child_sets = ([boundary] * A.signature.arity if node.is_leaf
                      else [table[word + (direction,)] for direction in A.signature.directions])
        for index in A.bundles_from[state]:
            bundle = A.bundles[index]
            if bundle.label == node.label and all(
                    child_sets[direction][terminal] for direction, terminal in enumerate(bundle.terminals)):
                break
        else:
            raise RuntimeError(f"no bundle realises state {A.states[state]} at {format_word(word)}")
        for direction, terminal in enumerate(bundle.terminals):
            assignment[word + (direction,)] = terminal
            if not node.is_leaf:
                descend(node.children[direction], word + (direction,), terminal)

    descend(p, EPSILON, assignment[EPSILON])
    return RunAssignment(domain=p.support.expanded(A.signature), assignment=assignment)


def accepts_pattern(A: RabinAutomaton, p: Pattern) -> bool:
    boundary = np.ones(A.num_states, dtype=bool)
    return bool(possible_states(A, p, boundary)[EPSILON].any())


def accepting_run(A: RabinAutomaton, p: Pattern) -> Optional[RunAssignment]:
    boundary = np.ones(A.num_states, dtype=bool)
    table = possible_states(A, p, boundary)
    return extract_run(A, p, table, boundary, boundary)


def check_run(A: RabinAutomaton, p: Pattern, run: RunAssignment) -> bool:
    try:
        for word, label in p.items():
            bundle = Bundle(run.assignment[word], label,
                            tuple(run.assignment[word + (direction,)] for direction in A.signature.directions))
            if bundle not in A.bundle_set:
                return False
    except KeyError:
        return False
    return True


def essential_mask(A: RabinAutomaton) -> np.ndarray:
    alive = np.ones(A.num_states, dtype=bool)
    while True:
        live_bundles = alive[A.sources] & alive[A.terminals].all(axis=1)
        survivors = np.zeros(A.num_states, dtype=bool)
        survivors[A.sources[live_bundles]] = True
        if np.array_equal(survivors, alive):
            return alive
        alive = survivors


def sub_automaton(A: RabinAutomaton, keep: np.ndarray) -> RabinAutomaton:
    kept = [int(state) for state in np.flatnonzero(keep)]
    renumber = {old: new for new, old in enumerate(kept)}
    bundles = tuple(
        Bundle(renumber[b.source], b.label, tuple(renumber[t] for t in b.terminals))
        for b in A.bundles if b.source in renumber and all(t in renumber for t in b.terminals))
    return RabinAutomaton(A.signature, A.alphabet, tuple(A.states[old] for old in kept), bundles)


def is_essential(A: RabinAutomaton) -> bool:
    return bool(essential_mask(A).all())


def essentialize(A: RabinAutomaton) -> RabinAutomaton:
    mask = essential_mask(A)
    if mask.all():
        return A
    result = sub_automaton(A, mask)
    logger.debug(f"Эссенциализация: состояний {A.num_states} -> {result.num_states}, "
                 f"пучков {len(A.bundles)} -> {len(result.bundles)}")
    return result


def is_deterministic(A: RabinAutomaton) -> bool:
    return len({(b.source, b.label) for b in A.bundles}) == len(A.bundles)


def is_codeterministic(A: RabinAutomaton) -> bool:
    return len({(b.terminals, b.label) for b in A.bundles}) == len(A.bundles)


def is_cocomplete(A: RabinAutomaton) -> bool:
    covered = {(b.terminals, b.label) for b in A.bundles}
    return len(covered) == A.num_states ** A.signature.arity * len(A.alphabet)


def join(A1: RabinAutomaton, A2: RabinAutomaton) -> RabinAutomaton:
    if A1.signature != A2.signature:
        raise ValueError(f"cannot join automata of arity {A1.signature.arity} and {A2.signature.arity}")
    if A1.alphabet != A2.alphabet:
        raise ValueError("cannot join automata over different alphabets")
    width = A2.num_states
    states = tuple(f"({first},{second})" for first in A1.states for second in A2.states)
    by_label: dict[int, list[Bundle]] = {}
    for bundle in A2.bundles:
        by_label.setdefault(bundle.label, []).append(bundle)
    bundles = [
        Bundle(b1.source * width + b2.source, b1.label,
               tuple(t1 * width + t2 for t1, t2 in zip(b1.terminals, b2.terminals)))
        for b1 in A1.bundles for b2 in by_label.get(b1.label, ())]
    logger.debug(f"Произведение автоматов: {len(states)} состояний, {len(bundles)} пучков")
    return RabinAutomaton(A1.signature, A1.alphabet, states, tuple(bundles))


def is_strongly_connected(A: RabinAutomaton) -> bool:
    """Zero states or a state without outgoing bundles count as not connected."""
    if A.num_states == 0 or not is_essential(A):
        return False
    rows = np.repeat(A.sources, A.signature.arity)
    cols = A.terminals.reshape(-1)
    graph = csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(A.num_states, A.num_states))
    count, _ = connected_components(graph, directed=True, connection='strong')
    return count == 1


def bundle_path(A: RabinAutomaton, start: int, target: int) -> Optional[list[tuple[int, int]]]:
    """Shortest bundle path as (bundle index, direction) pairs; ties go to lower bundle indices."""
    if start == target:
        return []
    previous: dict[int, tuple[int, int, int]] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        state = queue.popleft()
        for index in A.bundles_from[state]:
            for direction, terminal in enumerate(A.bundles[index].terminals):
                if terminal in seen:
                    continue
                seen.add(terminal)
                previous[terminal] = (state, index, direction)
                if terminal == target:
                    path = []
                    node = target
                    while node != start:
                        parent, bundle_index, step = previous[node]
                        path.append((bundle_index, step))
                        node = parent
                    return path[::-1]
                queue.append(terminal)
    return None


def glue_blocks(A: RabinAutomaton, p: Pattern, q: Pattern) -> Pattern:
    sig = A.signature
    n = block_height(p, sig)
    if n is None or block_height(q, sig) is None:
        raise ValueError("glue_blocks expects two blocks")
    if not is_strongly_connected(A):
        raise ValueError("glue_blocks requires an essential, strongly connected automaton")
    run_p = accepting_run(A, p)
    run_q = accepting_run(A, q)
    if run_p is None or run_q is None:
        raise ValueError("both blocks must be accepted by the automaton")

    target = run_q.assignment[EPSILON]
    labeling = dict(p.items())
    paths: dict[int, list[tuple[int, int]]] = {}
    for w in product(sig.directions, repeat=n):
        state = run_p.assignment[w]
        if state not in paths:
            path = bundle_path(A, state, target)
            if path is None:
                raise ValueError(f"no bundle path from {A.states[state]} to {A.states[target]}")
            paths[state] = path
        vertex: Word = w
        for index, direction in paths[state]:
            bundle = A.bundles[index]
            labeling[vertex] = bundle.label
            for sibling in sig.directions:
                if sibling != direction:
                    leaf_state = bundle.terminals[sibling]
                    labeling[vertex + (sibling,)] = A.bundles[A.bundles_from[leaf_state][0]].label
            vertex = vertex + (direction,)
        labeling.update(translate(vertex, q))

    glued = from_labeling(labeling, sig)
    if not accepts_pattern(A, glued):
        logger.error("Склеенный паттерн не принят автоматом")
        raise RuntimeError("glued pattern is not accepted")
    logger.debug(f"Склейка: высота {glued.height}, вершин {glued.size}")
    return glued


def _state_id(A: RabinAutomaton, state: int | str) -> int:
    if isinstance(state, str):
        return A.state_index(state)
    if not 0 <= state < A.num_states:
        raise ValueError(f"state index {state} out of range")
    return state


def default_xi(A: RabinAutomaton) -> dict[int, Bundle]:
    xi = {}
    for state, outgoing in enumerate(A.bundles_from):
        if not outgoing:
            raise ValueError(f"automaton is not essential: state {A.states[state]} has no bundle")
        xi[state] = A.bundles[outgoing[0]]
    return xi


def _checked_xi(A: RabinAutomaton, xi: Optional[Mapping[int, Bundle]]) -> dict[int, Bundle]:
    chosen = default_xi(A)
    for state, bundle in (xi or {}).items():
        if bundle not in A.bundle_set or bundle.source != state:
            raise ValueError(f"chosen bundle for {A.states[state]} must be a bundle of the automaton starting there")
        chosen[state] = Bundle(*bundle)
    return chosen


def xi_machine(A: RabinAutomaton, state: int | str,
               xi: Optional[Mapping[int, Bundle]] = None) -> RegularConfigurationMachine:
    start = _state_id(A, state)
    chosen = _checked_xi(A, xi)
    return _trimmed_machine(
        A.signature, A.alphabet, list(A.states), start,
        [chosen[s].label for s in range(A.num_states)],
        [chosen[s].terminals for s in range(A.num_states)])


def regular_approximation(A: RabinAutomaton, p: Pattern, run: Optional[RunAssignment] = None,
                          xi: Optional[Mapping[int, Bundle]] = None) -> RegularConfigurationMachine:
    sig = A.signature
    n = block_height(p, sig)
    if n is None:
        raise ValueError("regular_approximation expects a block")
    if run is None:
        run = accepting_run(A, p)
        if run is None:
            raise ValueError("block is not accepted by the automaton")
    elif not check_run(A, p, run):
        raise ValueError("the given run does not accept the block")
    chosen = _checked_xi(A, xi)

    words = [word for word, _ in p.items()]
    word_index = {word: index for index, word in enumerate(words)}
    offset = len(words)
    names = [f"w:{format_word(word)}" for word in words] + [f"s:{name}" for name in A.states]
    colors = [p.at(word) for word in words] + [chosen[s].label for s in range(A.num_states)]
    steps: list[tuple[int, ...]] = []
    for word in words:
        if len(word) < n - 1:
            steps.append(tuple(word_index[word + (d,)] for d in sig.directions))
        else:
            steps.append(tuple(offset + run.assignment[word + (d,)] for d in sig.directions))
    steps.extend(tuple(offset + t for t in chosen[s].terminals) for s in range(A.num_states))
    return _trimmed_machine(sig, A.alphabet, names, 0, colors, steps)


def _unroll_from(m: RegularConfigurationMachine, state: int, height: int) -> Pattern:
    cache: dict[tuple[int, int], Pattern] = {}

    def build(s: int, h: int) -> Pattern:
        key = (s, h)
        if key not in cache:
            children = () if h == 1 else tuple(build(t, h - 1) for t in m.steps[s])
            cache[key] = Pattern(m.colors[s], children)
        return cache[key]

    return build(state, height)


def unroll(m: RegularConfigurationMachine, height: int) -> Pattern:
    if height < 1:
        raise ValueError(f"height must be at least 1, got {height}")
    return _unroll_from(m, m.root, height)


def apply_machine(tau: 'CellularAutomaton', m: RegularConfigurationMachine) -> RegularConfigurationMachine:
    if tau.domain.signature != m.signature or tau.domain.alphabet != m.alphabet:
        raise ValueError("machine does not live over the cellular automaton's domain alphabet")
    colors = tuple(tau.rule(_unroll_from(m, state, tau.memory)) for state in range(len(m.states)))
    return RegularConfigurationMachine(m.signature, tau.target, m.states, m.root, colors, m.steps)


def minimize_machine(m: RegularConfigurationMachine) -> RegularConfigurationMachine:
    classes = list(m.colors)
    while True:
        signatures = [(classes[s], tuple(classes[t] for t in m.steps[s])) for s in range(len(m.states))]
        numbering: dict[tuple, int] = {}
        refined = [numbering.setdefault(sig, len(numbering)) for sig in signatures]
        if len(numbering) == len(set(classes)):
            break
        classes = refined
    representative: dict[int, int] = {}
    for state in _reachable(m.root, m.steps):
        representative.setdefault(classes[state], state)
    members = sorted(representative.values())
    index = {classes[state]: new for new, state in enumerate(members)}
    return _trimmed_machine(
        m.signature, m.alphabet, [m.states[s] for s in members], index[classes[m.root]],
        [m.colors[s] for s in members],
        [tuple(index[classes[t]] for t in m.steps[s]) for s in members])


def orbit_size(m: RegularConfigurationMachine) -> int:
    """Number of distinct shifted configurations f^w."""
    return len(minimize_machine(m).states)


def accepted_blocks(A: RabinAutomaton, n: int) -> frozenset[Pattern]:
    """Blocks of height n of the shift presented by A."""
    if n < 1:
        raise ValueError(f"block size must be at least 1, got {n}")
    A = essentialize(A)
    cache: dict[tuple[int, int], frozenset[Pattern]] = {}

    def rooted(state: int, height: int) -> frozenset[Pattern]:
        key = (state, height)
        if key not in cache:
            found = set()
            for index in A.bundles_from[state]:
                bundle = A.bundles[index]
                if height == 1:
                    found.add(Pattern(bundle.label))
                    continue
                below = [rooted(t, height - 1) for t in bundle.terminals]
                found.update(Pattern(bundle.label, children) for children in product(*below))
            cache[key] = frozenset(found)
        return cache[key]

    return frozenset().union(*(rooted(state, n) for state in range(A.num_states)))
