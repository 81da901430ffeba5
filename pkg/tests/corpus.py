"""Shared automata, shifts and cellular automata for the test suite."""
from itertools import product

from hypothesis import strategies as st

from core.cellauto import CellularAutomaton
from core.ftauto import FiniteTreeAutomaton
from core.rabin import Bundle, RabinAutomaton, full_shift_automaton
from core.shiftspec import SftSpec, blocks, full_shift, normalize, presentation
from core.treecore import Alphabet, Pattern, TreeSignature, parse_pattern

UNARY = TreeSignature(1)
BINARY = TreeSignature(2)
BITS = Alphabet(('0', '1'))
AB = Alphabet(('a', 'b'))


def word(*labels: int) -> Pattern:
    """Unary pattern read from the root down."""
    pattern = Pattern(labels[-1])
    for label in reversed(labels[:-1]):
        pattern = Pattern(label, (pattern,))
    return pattern


def pat(text: str, sig: TreeSignature = BINARY, alphabet: Alphabet = AB) -> Pattern:
    return parse_pattern(text, sig, alphabet)


def monochromatic() -> RabinAutomaton:
    return RabinAutomaton(BINARY, AB, ('a', 'b'), (
        Bundle(0, 0, (0, 0)), Bundle(0, 0, (1, 1)), Bundle(1, 1, (0, 0)), Bundle(1, 1, (1, 1))))


def even_sum() -> RabinAutomaton:
    return RabinAutomaton(BINARY, BITS, ('0', '1'), (
        Bundle(0, 0, (0, 0)), Bundle(0, 0, (1, 1)), Bundle(1, 1, (0, 1)), Bundle(1, 1, (1, 0))))


def even_shift() -> RabinAutomaton:
    return RabinAutomaton(UNARY, BITS, ('0', '1'), (Bundle(0, 1, (0,)), Bundle(0, 0, (1,)), Bundle(1, 0, (0,))))


def golden_mean() -> SftSpec:
    return normalize(UNARY, BITS, [word(1, 1)])


def even_sum_sft() -> SftSpec:
    forbidden = [pat(f"({a} ({b}) ({c}))", BINARY, BITS)
                 for a, b, c in product('01', repeat=3) if (int(a) + int(b) + int(c)) % 2]
    return normalize(BINARY, BITS, forbidden)


def monochromatic_sft() -> SftSpec:
    forbidden = [pat(f"({a} ({b}) ({c}))") for a, b, c in product('ab', repeat=3) if b != c]
    return normalize(BINARY, AB, forbidden)


def golden_presentation() -> RabinAutomaton:
    return presentation(golden_mean())


def golden_to_even() -> CellularAutomaton:
    return CellularAutomaton.from_function(
        golden_mean(), BITS, 2, lambda block: int(block.label == block.children[0].label))


def xor_ca() -> CellularAutomaton:
    def rule(block: Pattern) -> int:
        return (block.label + block.children[0].children[0].label) % 2
    return CellularAutomaton.from_function(full_shift(UNARY, BITS), BITS, 3, rule)


def bit_flip(sig: TreeSignature = UNARY) -> CellularAutomaton:
    return CellularAutomaton.from_function(full_shift(sig, BITS), BITS, 1, lambda block: 1 - block.label)


def constant_zero(sig: TreeSignature = BINARY) -> CellularAutomaton:
    return CellularAutomaton.from_function(full_shift(sig, BITS), BITS, 2, lambda block: 0)


def example_automata() -> list[RabinAutomaton]:
    return [monochromatic(), even_sum(), even_shift(), golden_presentation(), full_shift_automaton(BINARY, AB)]


@st.composite
def automata(draw, max_states: int = 3, arities=(1, 2), alphabet_sizes=(1, 2), max_bundles: int = 6):
    arity = draw(st.sampled_from(arities))
    letters = draw(st.sampled_from(alphabet_sizes))
    size = draw(st.integers(min_value=1, max_value=max_states))
    candidates = [Bundle(s, a, t) for s in range(size) for a in range(letters)
                  for t in product(range(size), repeat=arity)]
    chosen = draw(st.lists(st.sampled_from(candidates), unique=True, max_size=max_bundles))
    return RabinAutomaton(TreeSignature(arity), Alphabet(tuple('ab'[:letters])),
                          tuple(f"q{i}" for i in range(size)), tuple(chosen))


@st.composite
def finite_tree_automata(draw, max_states: int = 3):
    base = draw(automata(max_states=max_states))
    states = range(base.num_states)
    initial = draw(st.frozensets(st.sampled_from(states)))
    final = draw(st.sampled_from(states))
    return FiniteTreeAutomaton(base, initial, final)


@st.composite
def full_shift_endomorphisms(draw):
    sig, memory = draw(st.sampled_from([(UNARY, 1), (UNARY, 2), (UNARY, 3), (BINARY, 1), (BINARY, 2)]))
    domain = full_shift(sig, BITS)
    table = {block: draw(st.integers(min_value=0, max_value=1))
             for block in sorted(blocks(domain, memory), key=repr)}
    return CellularAutomaton(domain, BITS, memory, table)


def example_sfts() -> list[SftSpec]:
    return [golden_mean(), even_sum_sft(), monochromatic_sft(), full_shift(UNARY, BITS), full_shift(BINARY, AB)]


@st.composite
def sft_endomorphisms(draw):
    """Cellular automata from a small non-full SFT to its own alphabet; the image may still leave the SFT."""
    domain = draw(st.sampled_from([golden_mean(), even_sum_sft(), monochromatic_sft()]))
    memory = draw(st.integers(min_value=1, max_value=2))
    table = {block: draw(st.integers(min_value=0, max_value=len(domain.alphabet) - 1))
             for block in sorted(blocks(domain, memory), key=repr)}
    return CellularAutomaton(domain, domain.alphabet, memory, table)
