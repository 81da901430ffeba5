import unittest

import pytest

from core.cellauto import (CellularAutomaton, apply_to_pattern, compose_relabel, image_automaton, image_block_shift,
                           sft_cover)
from core.decide import equal_shifts
from core.oracles import BruteForce
from core.rabin import Bundle, RabinAutomaton, accepted_blocks
from core.shiftspec import blocks, full_shift
from core.treecore import Pattern, delta, subpattern
from tests.corpus import (BINARY, BITS, UNARY, bit_flip, constant_zero, even_shift, golden_mean, golden_presentation,
                          golden_to_even, word, xor_ca)


class TestCellularAutomaton(unittest.TestCase):

    def test_table_must_cover_domain_blocks(self):
        table = dict(golden_to_even().table)
        table.pop(word(0, 0))
        with pytest.raises(ValueError):
            CellularAutomaton(golden_mean(), BITS, 2, table)

    def test_table_rejects_forbidden_block(self):
        table = dict(golden_to_even().table)
        table[word(1, 1)] = 0
        with pytest.raises(ValueError):
            CellularAutomaton(golden_mean(), BITS, 2, table)

    def test_letter_outside_target(self):
        with pytest.raises(ValueError):
            CellularAutomaton.from_function(full_shift(UNARY, BITS), BITS, 1, lambda block: 2)

    def test_memory_must_be_positive(self):
        with pytest.raises(ValueError):
            CellularAutomaton(full_shift(UNARY, BITS), BITS, 0, {})

    def test_rule_lookup(self):
        tau = golden_to_even()
        assert tau.rule(word(0, 0)) == 1
        assert tau.rule(word(1, 0)) == 0
        with pytest.raises(ValueError):
            tau.rule(word(1, 1))

    def test_lifted_memory(self):
        assert golden_to_even().lifted_memory == 2
        assert xor_ca().lifted_memory == 3
        assert bit_flip().lifted_memory == 2

    def test_identity(self):
        tau = CellularAutomaton.identity(golden_mean())
        assert tau.memory == 1
        assert dict(tau.table) == {Pattern(0): 0, Pattern(1): 1}

    def test_equality(self):
        assert golden_to_even() == golden_to_even()
        assert bit_flip() != CellularAutomaton.identity(full_shift(UNARY, BITS))


class TestApplyToPattern(unittest.TestCase):

    def test_golden_to_even(self):
        assert apply_to_pattern(golden_to_even(), word(0, 1, 0, 1)) == word(0, 0, 0)

    def test_xor(self):
        assert apply_to_pattern(xor_ca(), word(0, 0, 1, 0, 1)) == word(1, 0, 0)

    def test_binary_constant(self):
        image = apply_to_pattern(constant_zero(), Pattern(1, (Pattern(0), Pattern(1))))
        assert image == Pattern(0)

    def test_too_short_input(self):
        with pytest.raises(ValueError):
            apply_to_pattern(xor_ca(), word(0, 1))

    def test_rejects_non_block(self):
        with pytest.raises(ValueError):
            apply_to_pattern(bit_flip(BINARY), Pattern(0, (Pattern(1), Pattern(0, (Pattern(0), Pattern(0))))))

    def test_image_is_local(self):
        tau = xor_ca()
        p = word(0, 1, 1, 0, 1, 0)
        image = apply_to_pattern(tau, p)
        child = apply_to_pattern(tau, subpattern(p, (0,), delta(UNARY, 5)))
        assert child == subpattern(image, (0,), delta(UNARY, 3))


class TestImageAutomaton(unittest.TestCase):

    def test_golden_to_even_gives_even_shift(self):
        assert image_automaton(golden_to_even()) == even_shift()

    def test_constant_image(self):
        image = image_automaton(constant_zero())
        found = accepted_blocks(image, 2)
        assert found == {Pattern(0, (Pattern(0), Pattern(0)))}

    def test_block_shift_height(self):
        assert image_block_shift(xor_ca()).height == 3
        assert image_block_shift(xor_ca()).automaton.num_states == 4

    def test_image_blocks_agree_with_brute_force(self):
        for tau in [golden_to_even(), xor_ca(), bit_flip()]:
            image = image_automaton(tau)
            for m in (1, 2, 3):
                assert accepted_blocks(image, m) == BruteForce.image_blocks(tau, m, 1)

    def test_bit_flip_image_is_full(self):
        assert accepted_blocks(image_automaton(bit_flip()), 3) == blocks(full_shift(UNARY, BITS), 3)


class TestSftCover(unittest.TestCase):

    def test_golden_cover(self):
        Z, labeling = sft_cover(golden_presentation())
        assert len(Z.alphabet) == 3
        assert Z.memory == 2
        assert labeling.memory == 1
        assert labeling.target == BITS
        assert equal_shifts(image_automaton(labeling), golden_presentation()).answer

    def test_requires_essential_automaton(self):
        stuck = RabinAutomaton(UNARY, BITS, ('p', 'q'), (Bundle(0, 0, (1,)),))
        with pytest.raises(ValueError):
            sft_cover(stuck)

    def test_compose_relabel(self):
        _, labeling = sft_cover(golden_presentation())
        composed = compose_relabel(golden_to_even(), labeling)
        assert composed.domain == labeling.domain
        assert composed.memory == 2
        assert equal_shifts(image_automaton(composed), even_shift()).answer

    def test_empty_automaton_cover(self):
        Z, labeling = sft_cover(RabinAutomaton(UNARY, BITS, (), ()))
        assert blocks(Z, 1) == frozenset()
        assert len(labeling.table) == 0
        assert labeling.target == BITS
        assert image_automaton(labeling).num_states == 0

    def test_compose_needs_one_cell_relabeling(self):
        with pytest.raises(ValueError):
            compose_relabel(bit_flip(), xor_ca())


if __name__ == '__main__':
    unittest.main()
