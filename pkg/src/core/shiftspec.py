from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Optional

from core.logger_config import logger
from core.rabin import Bundle, RabinAutomaton, accepted_blocks, essentialize
from core.treecore import (Alphabet, Pattern, TreeSignature, all_blocks, block_height, block_token, check_pattern,
                           delta, extend_blocks, extensions, restrict)


@dataclass(frozen=True)
class SftSpec:
    signature: TreeSignature
    alphabet: Alphabet
    memory: int
    forbidden: frozenset[Pattern]

    def __post_init__(self):
        object.__setattr__(self, 'forbidden', frozenset(self.forbidden))
        if self.memory < 1:
            raise ValueError(f"memory must be at least 1, got {self.memory}")
        for block in self.forbidden:
            check_pattern(block, self.signature, self.alphabet)
            if block_height(block, self.signature) != self.memory:
                raise ValueError(f"forbidden pattern of height {block.height} is not a block of height {self.memory}")


def full_shift(sig: TreeSignature, alphabet: Alphabet) -> SftSpec:
    return SftSpec(sig, alphabet, 1, frozenset())


def normalize(sig: TreeSignature, alphabet: Alphabet, raw: Iterable[Pattern],
              memory: Optional[int] = None) -> SftSpec:
    """Extend every forbidden block to the largest forbidden height, or to `memory` if that is larger."""
    raw = list(raw)
    for block in raw:
        check_pattern(block, sig, alphabet)
        if block_height(block, sig) is None:
            raise ValueError("forbidden patterns must be blocks")
    if not raw:
        return SftSpec(sig, alphabet, memory or 1, frozenset())
    memory = max([block.height for block in raw] + [memory or 1])
    forbidden = extend_blocks(raw, sig, alphabet)
    if any(block.height < memory for block in forbidden):
        forbidden = frozenset(ext for block in forbidden for ext in extensions(block, memory, sig, alphabet))
    logger.debug(f"Нормализация SFT: память {memory}, запрещённых блоков {len(forbidden)}")
    return SftSpec(sig, alphabet, memory, forbidden)


def _window(node: Pattern, height: int) -> Optional[Pattern]:
    """The block of the given height at node, or None if the subtree is too shallow."""
    if height == 1:
        return Pattern(node.label)
    if node.is_leaf:
        return None
    children = []
    for child in node.children:
        window = _window(child, height - 1)
        if window is None:
            return None
        children.append(window)
    return Pattern(node.label, tuple(children))


def locally_avoids(X: SftSpec, p: Pattern) -> bool:
    """No forbidden block occurs at any vertex of p deep enough to hold one."""
    if not X.forbidden:
        return True
    stack = [p]
    while stack:
        node = stack.pop()
        window = _window(node, X.memory)
        if window is not None and window in X.forbidden:
            return False
        stack.extend(node.children)
    return True


@dataclass(frozen=True)
class HigherBlockShift:
    """Bundle automaton whose states are the allowed blocks one level lower than `height`.

    A bundle joins a state block to child blocks agreeing with its lower levels; it stands for
    the glued block of full height, and relabeling the glued blocks presents images of the shift.
    """
    height: int
    automaton: RabinAutomaton
    state_blocks: tuple[Pattern, ...]

    def glued(self, bundle: Bundle) -> Pattern:
        return Pattern(self.state_blocks[bundle.source].label,
                       tuple(self.state_blocks[t] for t in bundle.terminals))

    def relabel(self, letter_of: Callable[[Pattern], int], alphabet: Alphabet) -> RabinAutomaton:
        A = self.automaton
        bundles = tuple(Bundle(b.source, letter_of(self.glued(b)), b.terminals) for b in A.bundles)
        return RabinAutomaton(A.signature, alphabet, A.states, bundles)


def higher_block_presentation(X: SftSpec, height: int) -> HigherBlockShift:
    sig = X.signature
    if height < max(2, X.memory):
        raise ValueError(f"higher block height {height} must be at least max(2, memory) = {max(2, X.memory)}")
    states = [block for block in all_blocks(sig, X.alphabet, height - 1) if locally_avoids(X, block)]
    index = {block: i for i, block in enumerate(states)}
    # states indexed by their top levels, which the parent block repeats as its child
    by_stem: dict[Optional[Pattern], list[int]] = {}
    for i, block in enumerate(states):
        stem = restrict(block, delta(sig, height - 2)) if height > 2 else None
        by_stem.setdefault(stem, []).append(i)

    bundles = []
    for block in states:
        if height > 2:
            candidates = [by_stem.get(child, []) for child in block.children]
        else:
            candidates = [by_stem.get(None, []) for _ in sig.directions]
        for terminals in product(*candidates):
            glued = Pattern(block.label, tuple(states[t] for t in terminals))
            if locally_avoids(X, glued):
                bundles.append(Bundle(index[block], block.label, terminals))

    automaton = RabinAutomaton(sig, X.alphabet, tuple(block_token(block, X.alphabet) for block in states),
                               tuple(bundles))
    essential = essentialize(automaton)
    kept = tuple(states[automaton.state_index(name)] for name in essential.states)
    logger.debug(f"Блочное представление высоты {height}: {len(states)} -> {essential.num_states} состояний, "
                 f"{len(essential.bundles)} пучков")
    return HigherBlockShift(height, essential, kept)


@lru_cache(maxsize=128)
def presentation(X: SftSpec) -> RabinAutomaton:
    return higher_block_presentation(X, max(X.memory, 2)).automaton


def blocks(X: SftSpec, n: int) -> frozenset[Pattern]:
    return accepted_blocks(presentation(X), n)
