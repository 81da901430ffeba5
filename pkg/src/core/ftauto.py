from dataclasses import dataclass
from itertools import product
from typing import Optional

import numpy as np

from core.logger_config import logger
from core.rabin import Bundle, RabinAutomaton, essentialize, is_codeterministic, possible_states
from core.treecore import EPSILON, Pattern

# Subset states are materialized lazily; beyond this the construction is refused.
MAX_SUBSET_STATES = 4096


@dataclass(frozen=True)
class FiniteTreeAutomaton:
    base: RabinAutomaton
    initial: frozenset[int]
    final: int

    def __post_init__(self):
        object.__setattr__(self, 'initial', frozenset(self.initial))
        if not 0 <= self.final < self.base.num_states:
            raise ValueError(f"final state {self.final} is not a state of the base automaton")
        if not all(0 <= state < self.base.num_states for state in self.initial):
            raise ValueError("initial states must be states of the base automaton")

    @property
    def initial_mask(self) -> np.ndarray:
        mask = np.zeros(self.base.num_states, dtype=bool)
        mask[list(self.initial)] = True
        return mask


def fta_accepts(B: FiniteTreeAutomaton, p: Pattern) -> bool:
    boundary = np.zeros(B.base.num_states, dtype=bool)
    boundary[B.final] = True
    root = possible_states(B.base, p, boundary)[EPSILON]
    return bool((root & B.initial_mask).any())


def _subset_name(A: RabinAutomaton, mask: int) -> str:
    return '{' + ','.join(A.states[s] for s in range(A.num_states) if mask >> s & 1) + '}'


def subset_closure(A: RabinAutomaton) -> tuple[RabinAutomaton, int]:
    """Subset automaton generated bottom-up from the full state set; returns it with the index of that set."""
    sig = A.signature
    full = (1 << A.num_states) - 1
    by_label: dict[int, list[Bundle]] = {}
    for bundle in A.bundles:
        by_label.setdefault(bundle.label, []).append(bundle)

    subsets = [full]
    index = {full: 0}
    bundles: list[Bundle] = []
    done = 0
    while done < len(subsets):
        known = len(subsets)
        for children in product(range(known), repeat=sig.arity):
            if max(children) < done:
                continue
            for label, candidates in by_label.items():
                source = 0
                for bundle in candidates:
                    if all(subsets[c] >> t & 1 for c, t in zip(children, bundle.terminals)):
                        source |= 1 << bundle.source
                if not source:
                    continue
                if source not in index:
                    if len(subsets) >= MAX_SUBSET_STATES:
                        raise ValueError(f"subset construction exceeds {MAX_SUBSET_STATES} states")
                    index[source] = len(subsets)
                    subsets.append(source)
                bundles.append(Bundle(index[source], label, children))
        done = known

    closure = RabinAutomaton(sig, A.alphabet, tuple(_subset_name(A, mask) for mask in subsets), tuple(bundles))
    logger.debug(f"Построение подмножеств: {A.num_states} -> {closure.num_states} состояний, "
                 f"{len(closure.bundles)} пучков")
    return closure, 0


def codeterminize(A: RabinAutomaton) -> RabinAutomaton:
    closure, _ = subset_closure(essentialize(A))
    return essentialize(closure)


def full_pattern_fta(A: RabinAutomaton) -> FiniteTreeAutomaton:
    """Finite-tree automaton accepting exactly the full-tree-patterns of the shift of A."""
    A = essentialize(A)
    if A.num_states == 0:
        empty = RabinAutomaton(A.signature, A.alphabet, ('{}',), ())
        return FiniteTreeAutomaton(empty, frozenset(), 0)
    closure, full = subset_closure(A)
    return FiniteTreeAutomaton(closure, frozenset(range(closure.num_states)), full)


def _fresh_name(taken: tuple[str, ...], name: str = 'K') -> str:
    while name in taken:
        name += "'"
    return name


def complement_fta(B: FiniteTreeAutomaton) -> FiniteTreeAutomaton:
    base = B.base
    if not is_codeterministic(base):
        raise ValueError("only co-deterministic finite-tree automata can be complemented")
    sink = base.num_states
    covered = {(b.terminals, b.label) for b in base.bundles}
    extra = [Bundle(sink, label, terminals)
             for terminals in product(range(sink + 1), repeat=base.signature.arity)
             for label in range(len(base.alphabet))
             if (terminals, label) not in covered]
    states = base.states + (_fresh_name(base.states),)
    complemented = RabinAutomaton(base.signature, base.alphabet, states, base.bundles + tuple(extra))
    initial = frozenset(range(sink + 1)) - B.initial
    logger.debug(f"Дополнение: добавлено {len(extra)} пучков в сток")
    return FiniteTreeAutomaton(complemented, initial, B.final)


def complement_of_shift(A: RabinAutomaton) -> FiniteTreeAutomaton:
    return complement_fta(full_pattern_fta(A))


def productive_heights(B: FiniteTreeAutomaton) -> np.ndarray:
    """Minimal height of a pattern rooted at each state (0 for unproductive states)."""
    base = B.base
    heights = np.zeros(base.num_states, dtype=np.intp)
    leaf = (base.terminals == B.final).all(axis=1)
    heights[np.unique(base.sources[leaf])] = 1
    level = 1
    while True:
        productive = heights > 0
        ready = productive[base.terminals].all(axis=1)
        fresh = np.unique(base.sources[ready])
        fresh = fresh[heights[fresh] == 0]
        if fresh.size == 0:
            return heights
        level += 1
        heights[fresh] = level


def fta_is_empty(B: FiniteTreeAutomaton) -> bool:
    heights = productive_heights(B)
    empty = not bool((heights[B.initial_mask] > 0).any())
    logger.debug(f"Проверка пустоты: {'пусто' if empty else 'непусто'} ({B.base.num_states} состояний)")
    return empty


def fta_witness(B: FiniteTreeAutomaton) -> Optional[Pattern]:
    """An accepted pattern of minimal height, or None."""
    base = B.base
    heights = productive_heights(B)
    rooted = [(int(heights[s]), s) for s in sorted(B.initial) if heights[s] > 0]
    if not rooted:
        return None

    def build(state: int) -> Pattern:
        height = int(heights[state])
        for index in base.bundles_from[state]:
            bundle = base.bundles[index]
            if height == 1:
                if all(t == B.final for t in bundle.terminals):
                    return Pattern(bundle.label)
            elif all(0 < heights[t] < height for t in bundle.terminals):
                return Pattern(bundle.label, tuple(build(t) for t in bundle.terminals))
        raise RuntimeError(f"state {base.states[state]} has no certificate bundle")

    return build(min(rooted)[1])
