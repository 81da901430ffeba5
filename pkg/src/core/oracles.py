from typing import Optional

from core.cellauto import CellularAutomaton, apply_to_pattern
from core.ftauto import FiniteTreeAutomaton, fta_accepts
from core.logger_config import logger
from core.shiftspec import SftSpec, locally_avoids
from core.treecore import MAX_ENUMERATION_HEIGHT, Pattern, all_blocks, enumerate_patterns, extensions


class BruteForce:
    """Exponential reference procedures used to cross-check the fixpoint algorithms."""

    @staticmethod
    def fta_witness(B: FiniteTreeAutomaton) -> Optional[Pattern]:
        """Scan every pattern of height ≤ |S|; an accepted pattern exists iff one of these is accepted."""
        bound = max(1, B.base.num_states)
        if bound > MAX_ENUMERATION_HEIGHT:
            raise ValueError(f"brute-force emptiness needs height {bound}, guard is {MAX_ENUMERATION_HEIGHT}")
        for p in enumerate_patterns(B.base.signature, B.base.alphabet, bound):
            if fta_accepts(B, p):
                return p
        return None

    @staticmethod
    def fta_is_empty(B: FiniteTreeAutomaton) -> bool:
        empty = BruteForce.fta_witness(B) is None
        logger.debug(f"Перебор паттернов: {'пусто' if empty else 'непусто'}")
        return empty

    @staticmethod
    def extendable(X: SftSpec, block: Pattern, depth: int) -> bool:
        """block extends by `depth` more levels without creating a forbidden block."""
        if not locally_avoids(X, block):
            return False
        if depth == 0:
            return True
        target = block.height + depth
        return any(locally_avoids(X, ext) for ext in extensions(block, target, X.signature, X.alphabet))

    @staticmethod
    def sft_blocks(X: SftSpec, n: int, depth: int) -> frozenset[Pattern]:
        return frozenset(block for block in all_blocks(X.signature, X.alphabet, n)
                         if BruteForce.extendable(X, block, depth))

    @staticmethod
    def preimages(tau: CellularAutomaton, q: Pattern) -> list[Pattern]:
        """Domain-avoiding blocks one memory deeper than q whose image is q."""
        height = q.height + tau.memory - 1
        found = []
        for p in all_blocks(tau.domain.signature, tau.domain.alphabet, height):
            if not locally_avoids(tau.domain, p):
                continue
            try:
                if apply_to_pattern(tau, p) == q:
                    found.append(p)
            except ValueError:
                continue
        return found

    @staticmethod
    def image_blocks(tau: CellularAutomaton, m: int, depth: int = 0) -> frozenset[Pattern]:
        height = m + tau.memory - 1
        return frozenset(apply_to_pattern(tau, p) for p in BruteForce.sft_blocks(tau.domain, height, depth))
