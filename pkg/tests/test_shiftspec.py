import unittest

import pytest

from core.oracles import BruteForce
from core.rabin import Bundle, accepts_pattern, is_codeterministic
from core.shiftspec import (SftSpec, blocks, full_shift, higher_block_presentation, locally_avoids, normalize,
                            presentation)
from core.treecore import Pattern, all_blocks, delta, enumerate_patterns, extensions, subpattern
from tests.corpus import (AB, BINARY, BITS, UNARY, even_sum, even_sum_sft, golden_mean, monochromatic_sft, pat,
                          word)


class TestNormalize(unittest.TestCase):

    def test_golden_mean(self):
        X = golden_mean()
        assert X.memory == 2
        assert X.forbidden == {word(1, 1)}

    def test_monochromatic_children(self):
        X = monochromatic_sft()
        assert X.memory == 2
        assert len(X.forbidden) == 4

    def test_empty_forbidden_set(self):
        X = normalize(BINARY, AB, [])
        assert X == full_shift(BINARY, AB)
        assert X.memory == 1

    def test_mixed_heights(self):
        X = normalize(UNARY, BITS, [word(1, 1), word(0, 0, 0)])
        assert X.memory == 3
        assert X.forbidden == {word(1, 1, 0), word(1, 1, 1), word(0, 0, 0)}

    def test_declared_memory_extends(self):
        X = normalize(UNARY, BITS, [word(1, 1)], memory=3)
        assert X.memory == 3
        assert X.forbidden == {word(1, 1, 0), word(1, 1, 1)}

    def test_rejects_non_block(self):
        with pytest.raises(ValueError):
            normalize(BINARY, AB, [pat("(a (a) (b (a) (a)))")])

    def test_spec_rejects_wrong_height(self):
        with pytest.raises(ValueError):
            SftSpec(UNARY, BITS, 3, frozenset({word(1, 1)}))

    def test_normalize_preserves_the_shift(self):
        raw = [word(1, 1), word(0, 0, 0)]
        X = normalize(UNARY, BITS, raw)
        for n in range(1, 5):
            expected = {p for p in all_blocks(UNARY, BITS, n)
                        if any(_avoids_raw(q, raw) for q in extensions(p, n + 2, UNARY, BITS))}
            assert blocks(X, n) == expected


class TestPresentation(unittest.TestCase):

    def test_golden_mean(self):
        A = presentation(golden_mean())
        assert A.states == ('0', '1')
        assert A.bundles == (Bundle(0, 0, (0,)), Bundle(0, 0, (1,)), Bundle(1, 1, (0,)))

    def test_even_sum_matches_hand_built_automaton(self):
        assert presentation(even_sum_sft()) == even_sum()

    def test_full_shift(self):
        A = presentation(full_shift(BINARY, AB))
        assert A.num_states == 2
        assert all(len(outgoing) == 4 for outgoing in A.bundles_from)
        assert all(accepts_pattern(A, p) for p in enumerate_patterns(BINARY, AB, 3))

    def test_everything_forbidden(self):
        X = normalize(BINARY, AB, all_blocks(BINARY, AB, 2))
        assert presentation(X).num_states == 0

    def test_codeterministic(self):
        for X in [golden_mean(), even_sum_sft(), monochromatic_sft(), full_shift(BINARY, AB)]:
            assert is_codeterministic(presentation(X))

    def test_accepted_patterns_avoid_forbidden_blocks(self):
        for X in [golden_mean(), monochromatic_sft()]:
            A = presentation(X)
            for p in enumerate_patterns(X.signature, X.alphabet, 3):
                if accepts_pattern(A, p):
                    assert locally_avoids(X, p)

    def test_higher_blocks_need_enough_height(self):
        with pytest.raises(ValueError):
            higher_block_presentation(normalize(UNARY, BITS, [word(0, 0, 0)]), 2)

    def test_third_higher_block_shift(self):
        shift = higher_block_presentation(golden_mean(), 3)
        assert set(shift.automaton.states) == {'0.0', '0.1', '1.0'}
        glued = {shift.glued(bundle) for bundle in shift.automaton.bundles}
        assert glued == {word(0, 0, 0), word(0, 0, 1), word(0, 1, 0), word(1, 0, 0), word(1, 0, 1)}


class TestBlocks(unittest.TestCase):

    def test_golden_mean(self):
        assert blocks(golden_mean(), 2) == {word(0, 0), word(0, 1), word(1, 0)}

    def test_full_shift(self):
        assert len(blocks(full_shift(BINARY, BITS), 2)) == 8

    def test_even_sum(self):
        found = blocks(even_sum_sft(), 2)
        assert found == {pat(text, BINARY, BITS) for text in
                         ["(0 (0) (0))", "(0 (1) (1))", "(1 (0) (1))", "(1 (1) (0))"]}

    def test_restrictions_agree(self):
        X = golden_mean()
        for n in range(1, 4):
            restricted = {subpattern(p, (), delta(UNARY, n)) for p in blocks(X, n + 1)}
            assert restricted == blocks(X, n)

    def test_agrees_with_brute_force(self):
        for X, heights in [(golden_mean(), range(1, 5)), (even_sum_sft(), (1, 2)), (monochromatic_sft(), (1, 2))]:
            for n in heights:
                assert blocks(X, n) == BruteForce.sft_blocks(X, n, 1)

    def test_extendability_is_required(self):
        # every infinite word avoiding 00 and 11 alternates, so it contains 010 or 101
        X = normalize(UNARY, BITS, [word(0, 0), word(1, 1), word(0, 1, 0), word(1, 0, 1)])
        assert locally_avoids(X, Pattern(0))
        assert blocks(X, 1) == frozenset()
        assert not BruteForce.extendable(X, Pattern(0), 3)


def _avoids_raw(p: Pattern, raw: list[Pattern]) -> bool:
    return all(subpattern(p, w, q.support) != q
               for q in raw for w, _ in p.items() if len(w) + q.height <= p.height)


if __name__ == '__main__':
    unittest.main()
