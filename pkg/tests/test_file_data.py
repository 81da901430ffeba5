import os
import tempfile
import unittest

import pytest

from core.file_data import (FileData, FormatError, parse_automaton, parse_ca, parse_fta, parse_machine, parse_sft,
                            print_automaton, print_ca, print_fta, print_machine, print_sft)
from core.ftauto import complement_of_shift
from core.rabin import xi_machine
from tests.corpus import (BITS, UNARY, even_shift, golden_mean, golden_presentation, golden_to_even, monochromatic,
                          word)

GOLDEN_AUTOMATON = """\
# golden mean presentation
arity 1
alphabet 0 1
states 0 1
bundle 0 0 0
bundle 0 0 1
bundle 1 1 0
"""

GOLDEN_CA = """\
arity 1
in_alphabet 0 1
out_alphabet 0 1
forbid (1 (1))
memory 2
rule (0 (0)) 1
rule (0 (1)) 0
rule (1 (0)) 0
"""


class TestParsers(unittest.TestCase):

    def test_automaton(self):
        assert parse_automaton(GOLDEN_AUTOMATON) == golden_presentation()

    def test_sft(self):
        X = parse_sft("arity 1\nalphabet 0 1\nforbid (1 (1))\n")
        assert X == golden_mean()

    def test_sft_declared_memory(self):
        X = parse_sft("arity 1\nalphabet 0 1\nmemory 3\nforbid (1 (1))\n")
        assert X.memory == 3
        assert X.forbidden == {word(1, 1, 0), word(1, 1, 1)}

    def test_ca(self):
        assert parse_ca(GOLDEN_CA) == golden_to_even()

    def test_tabs_separate_fields(self):
        assert parse_sft("arity\t1\nalphabet\t0 1\nforbid\t(1 (1))\n") == golden_mean()
        assert parse_ca(GOLDEN_CA.replace(' ', '\t')) == golden_to_even()
        assert parse_automaton(GOLDEN_AUTOMATON.replace(' ', '\t')) == golden_presentation()

    def test_fta(self):
        B = parse_fta(GOLDEN_AUTOMATON + "initial 1\nfinal 0\n")
        assert B.base == golden_presentation()
        assert B.initial == {1}
        assert B.final == 0

    def test_machine(self):
        m = parse_machine("arity 1\nalphabet 0 1\nroot p\nnode p 1 q\nnode q 0 p\n")
        assert m.states == ('p', 'q')
        assert m.colors == (1, 0)
        assert m.steps == ((1,), (0,))


class TestFormatErrors(unittest.TestCase):

    def test_unknown_keyword(self):
        with pytest.raises(FormatError) as info:
            parse_automaton(GOLDEN_AUTOMATON.replace("bundle 1 1 0", "bundel 1 1 0"), 'golden.ura')
        assert info.value.line == 7
        assert info.value.token == 'bundel'
        assert str(info.value).startswith('golden.ura:7:')

    def test_unknown_state(self):
        with pytest.raises(FormatError) as info:
            parse_automaton(GOLDEN_AUTOMATON.replace("bundle 1 1 0", "bundle 1 1 2"))
        assert info.value.line == 7
        assert info.value.token == '2'

    def test_unknown_letter(self):
        with pytest.raises(FormatError) as info:
            parse_automaton(GOLDEN_AUTOMATON.replace("bundle 1 1 0", "bundle 1 x 0"))
        assert info.value.token == 'x'

    def test_missing_header(self):
        with pytest.raises(FormatError) as info:
            parse_automaton("arity 1\nalphabet 0 1\n")
        assert info.value.token == 'states'

    def test_duplicate_bundle(self):
        with pytest.raises(FormatError) as info:
            parse_automaton(GOLDEN_AUTOMATON + "bundle 0 0 0\n")
        assert info.value.line == 8

    def test_wrong_terminal_count(self):
        with pytest.raises(FormatError):
            parse_automaton(GOLDEN_AUTOMATON + "bundle 0 0 0 1\n")

    def test_non_integer_arity(self):
        with pytest.raises(FormatError) as info:
            parse_sft("arity two\nalphabet 0 1\n")
        assert info.value.line == 1

    def test_bad_forbidden_pattern(self):
        with pytest.raises(FormatError) as info:
            parse_sft("arity 1\nalphabet 0 1\nforbid (1 (2))\n")
        assert info.value.line == 3

    def test_incomplete_rule_table(self):
        with pytest.raises(FormatError):
            parse_ca(GOLDEN_CA.replace("rule (1 (0)) 0\n", ""))

    def test_rule_twice(self):
        with pytest.raises(FormatError) as info:
            parse_ca(GOLDEN_CA + "rule (0 (0)) 0\n")
        assert info.value.line == 9

    def test_unreachable_machine_node(self):
        with pytest.raises(FormatError):
            parse_machine("arity 1\nalphabet 0 1\nroot p\nnode p 1 p\nnode q 0 p\n")


class TestPrinters(unittest.TestCase):

    def test_automaton_text(self):
        assert print_automaton(golden_presentation()) == GOLDEN_AUTOMATON.split('\n', 1)[1]

    def test_printed_objects_parse_back(self):
        for A in [monochromatic(), even_shift()]:
            assert parse_automaton(print_automaton(A)) == A
        assert parse_sft(print_sft(golden_mean())) == golden_mean()
        assert parse_ca(print_ca(golden_to_even())) == golden_to_even()
        complement = complement_of_shift(golden_presentation())
        assert parse_fta(print_fta(complement)) == complement
        machine = xi_machine(golden_presentation(), '1')
        assert parse_machine(print_machine(machine)) == machine


class TestFileData(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.directory.cleanup()

    def _write(self, name: str, text: str) -> str:
        path = os.path.join(self.directory.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
        return path

    def test_load_by_extension(self):
        assert FileData(self._write('golden.ura', GOLDEN_AUTOMATON)).load() == golden_presentation()
        assert FileData(self._write('golden.ca', GOLDEN_CA)).load() == golden_to_even()

    def test_error_names_the_file(self):
        path = self._write('broken.sft', "arity 1\nalphabet 0 1\nforbid (1 (1)\n")
        with pytest.raises(FormatError) as info:
            FileData(path).load()
        assert info.value.file == 'broken.sft'
        assert info.value.line == 3

    def test_unsupported_extension(self):
        with pytest.raises(FormatError):
            FileData(self._write('golden.txt', GOLDEN_AUTOMATON)).load()

    def test_pattern_over_several_lines(self):
        path = self._write('p.pat', "# a word\n(0\n  (1 (0)))\n")
        assert FileData(path).load_pattern(UNARY, BITS) == word(0, 1, 0)

    def test_empty_pattern_file(self):
        with pytest.raises(FormatError):
            FileData(self._write('p.pat', "# nothing\n")).load_pattern(UNARY, BITS)


if __name__ == '__main__':
    unittest.main()
