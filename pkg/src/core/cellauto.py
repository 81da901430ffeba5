from itertools import product
from types import MappingProxyType
from typing import Callable, Mapping

from core.logger_config import logger
from core.rabin import RabinAutomaton, is_essential
from core.shiftspec import HigherBlockShift, SftSpec, blocks, higher_block_presentation
from core.treecore import Alphabet, Pattern, block_height, delta, format_pattern, restrict


class CellularAutomaton:
    """Sliding block code: the letter at each vertex is the rule applied to the block of height `memory` there.

    The table keeps the declared memory, which may be below the domain's; the lift to `lifted_memory`
    happens on demand through `lifted_rule`, where the extra levels are ignored.
    """

    def __init__(self, domain: SftSpec, target: Alphabet, memory: int, table: Mapping[Pattern, int]):
        if memory < 1:
            raise ValueError(f"memory must be at least 1, got {memory}")
        self.domain = domain
        self.target = target
        self.memory = memory
        expected = blocks(domain, memory)
        given = frozenset(table)
        if given != expected:
            missing = sorted(format_pattern(b, domain.alphabet) for b in expected - given)
            extra = sorted(format_pattern(b, domain.alphabet) for b in given - expected)
            raise ValueError(f"local rule must cover exactly the domain blocks of height {memory}; "
                             f"missing {missing[:3]}, unexpected {extra[:3]}")
        for block, letter in table.items():
            if not 0 <= letter < len(target):
                raise ValueError(f"rule for {format_pattern(block, domain.alphabet)} leaves the target alphabet")
        self.table = MappingProxyType(dict(table))

    @classmethod
    def from_function(cls, domain: SftSpec, target: Alphabet, memory: int,
                      rule: Callable[[Pattern], int]) -> 'CellularAutomaton':
        return cls(domain, target, memory, {block: rule(block) for block in blocks(domain, memory)})

    @classmethod
    def identity(cls, domain: SftSpec) -> 'CellularAutomaton':
        return cls.from_function(domain, domain.alphabet, 1, lambda block: block.label)

    @property
    def lifted_memory(self) -> int:
        return max(2, self.memory, self.domain.memory)

    def rule(self, block: Pattern) -> int:
        try:
            return self.table[block]
        except KeyError:
            raise ValueError(f"local rule is undefined on {format_pattern(block, self.domain.alphabet)}") from None

    def lifted_rule(self, block: Pattern) -> int:
        return self.rule(restrict(block, delta(self.domain.signature, self.memory)))

    def __eq__(self, other):
        if not isinstance(other, CellularAutomaton):
            return NotImplemented
        return (self.domain, self.target, self.memory, dict(self.table)) == \
            (other.domain, other.target, other.memory, dict(other.table))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return (f"CellularAutomaton(arity={self.domain.signature.arity}, memory={self.memory}, "
                f"rules={len(self.table)})")


def apply_to_pattern(tau: CellularAutomaton, p: Pattern) -> Pattern:
    height = block_height(p, tau.domain.signature)
    if height is None or height < tau.memory:
        raise ValueError(f"input must be a block of height at least {tau.memory}")
    window = delta(tau.domain.signature, tau.memory)

    def image(node: Pattern, levels: int) -> Pattern:
        letter = tau.rule(restrict(node, window))
        if levels == 1:
            return Pattern(letter)
        return Pattern(letter, tuple(image(child, levels - 1) for child in node.children))

    return image(p, height - tau.memory + 1)


def image_block_shift(tau: CellularAutomaton) -> HigherBlockShift:
    return higher_block_presentation(tau.domain, tau.lifted_memory)


def image_automaton(tau: CellularAutomaton) -> RabinAutomaton:
    result = image_block_shift(tau).relabel(tau.lifted_rule, tau.target)
    logger.debug(f"Автомат образа: {result.num_states} состояний, {len(result.bundles)} пучков")
    return result


def sft_cover(A: RabinAutomaton) -> tuple[SftSpec, CellularAutomaton]:
    """Shift of matching bundle trees and the one-cell letter map that sends it onto the shift of A."""
    if not is_essential(A):
        raise ValueError("sft_cover requires an essential automaton")
    sig = A.signature
    if not A.bundles:
        # a lone token whose only block of height 2 is forbidden: the empty shift
        lone = Alphabet(('t0',))
        Z = SftSpec(sig, lone, 2, frozenset({Pattern(0, tuple(Pattern(0) for _ in sig.directions))}))
        logger.debug("SFT-накрытие пустого сдвига")
        return Z, CellularAutomaton.from_function(Z, A.alphabet, 1, lambda block: 0)
    tokens = Alphabet(tuple(f"t{i}" for i in range(len(A.bundles))))
    forbidden = set()
    for i, bundle in enumerate(A.bundles):
        for children in product(range(len(A.bundles)), repeat=sig.arity):
            if any(A.bundles[c].source != t for c, t in zip(children, bundle.terminals)):
                forbidden.add(Pattern(i, tuple(Pattern(c) for c in children)))
    Z = SftSpec(sig, tokens, 2, frozenset(forbidden))
    labeling = CellularAutomaton.from_function(Z, A.alphabet, 1, lambda block: A.bundles[block.label].label)
    logger.debug(f"SFT-накрытие: алфавит {len(tokens)}, запрещённых блоков {len(forbidden)}")
    return Z, labeling


def _relabel_pattern(p: Pattern, letter_map: Callable[[int], int]) -> Pattern:
    return Pattern(letter_map(p.label), tuple(_relabel_pattern(child, letter_map) for child in p.children))


def compose_relabel(tau: CellularAutomaton, prior: CellularAutomaton) -> CellularAutomaton:
    if prior.memory != 1:
        raise ValueError("only a one-cell relabeling can be composed in front")
    if prior.target != tau.domain.alphabet or prior.domain.signature != tau.domain.signature:
        raise ValueError("relabeling target does not match the cellular automaton's domain alphabet")

    def letter_map(letter: int) -> int:
        return prior.rule(Pattern(letter))

    return CellularAutomaton.from_function(
        prior.domain, tau.target, tau.memory, lambda block: tau.rule(_relabel_pattern(block, letter_map)))
