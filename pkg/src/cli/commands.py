import argparse
from typing import Callable

from cli.graph_emit import graph_emit
from core.cellauto import CellularAutomaton, image_automaton
from core.decide import Verdict, decide_injective, decide_surjective, equal_shifts, is_full
from core.file_data import FileData, print_automaton, print_fta, print_machine
from core.ftauto import (FiniteTreeAutomaton, codeterminize, complement_fta, complement_of_shift, fta_accepts,
                         fta_witness)
from core.logger_config import logger, set_verbosity
from core.logger_console import LoggerConsole as console
from core.oracles import BruteForce
from core.rabin import (RabinAutomaton, RegularConfigurationMachine, accepted_blocks, accepts_pattern, essentialize,
                        glue_blocks, regular_approximation, unroll)
from core.shiftspec import SftSpec, presentation
from core.treecore import Alphabet, Pattern, TreeSignature, format_pattern

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


def _load(path: str, *kinds: type):
    loaded = FileData(path).load()
    if kinds and not isinstance(loaded, kinds):
        expected = ' or '.join(kind.__name__ for kind in kinds)
        raise UsageError(f"{path}: expected {expected}, got {type(loaded).__name__}")
    return loaded


def _shift(path: str) -> RabinAutomaton:
    loaded = _load(path, RabinAutomaton, SftSpec)
    return presentation(loaded) if isinstance(loaded, SftSpec) else loaded


def _pattern(path: str, sig: TreeSignature, alphabet: Alphabet) -> Pattern:
    return FileData(path).load_pattern(sig, alphabet)


def _emit(text: str) -> None:
    console.log(text.rstrip('\n'))


def _report_verdict(verdict: Verdict, holds: str, fails: str, alphabet: Alphabet) -> int:
    if verdict.answer:
        _emit(holds)
        return EXIT_OK
    _emit(fails)
    if verdict.witness is not None:
        _emit(f"witness {format_pattern(verdict.witness, alphabet)}")
    return EXIT_FAILS


def cmd_accept(args) -> int:
    automaton = _load(args.automaton, RabinAutomaton, FiniteTreeAutomaton)
    base = automaton.base if isinstance(automaton, FiniteTreeAutomaton) else automaton
    p = _pattern(args.pattern, base.signature, base.alphabet)
    accepted = fta_accepts(automaton, p) if isinstance(automaton, FiniteTreeAutomaton) else accepts_pattern(base, p)
    _emit('accepted' if accepted else 'rejected')
    return EXIT_OK if accepted else EXIT_FAILS


def cmd_blocks(args) -> int:
    A = _shift(args.shift)
    found = accepted_blocks(A, args.height)
    for line in sorted(format_pattern(block, A.alphabet) for block in found):
        _emit(line)
    return EXIT_OK


def cmd_essentialize(args) -> int:
    _emit(print_automaton(essentialize(_load(args.automaton, RabinAutomaton))))
    return EXIT_OK


def cmd_codeterminize(args) -> int:
    _emit(print_automaton(codeterminize(_shift(args.automaton))))
    return EXIT_OK


def cmd_complement(args) -> int:
    loaded = _load(args.automaton, RabinAutomaton, SftSpec, FiniteTreeAutomaton)
    if isinstance(loaded, FiniteTreeAutomaton):
        _emit(print_fta(complement_fta(loaded)))
    else:
        _emit(print_fta(complement_of_shift(presentation(loaded) if isinstance(loaded, SftSpec) else loaded)))
    return EXIT_OK


def cmd_empty(args) -> int:
    B = _load(args.fta, FiniteTreeAutomaton)
    witness = BruteForce.fta_witness(B) if args.oracle else fta_witness(B)
    verdict = Verdict(witness is None, witness)
    return _report_verdict(verdict, 'empty', 'nonempty', B.base.alphabet)


def cmd_full(args) -> int:
    A = _shift(args.shift)
    verdict = is_full(A, oracle=args.oracle)
    return _report_verdict(verdict, 'full', 'not full', A.alphabet)


def cmd_equal(args) -> int:
    A1, A2 = _shift(args.first), _shift(args.second)
    verdict = equal_shifts(A1, A2, oracle=args.oracle, workers=args.workers)
    return _report_verdict(verdict, 'equal', 'different', A1.alphabet)


def cmd_image(args) -> int:
    _emit(print_automaton(image_automaton(_load(args.ca, CellularAutomaton))))
    return EXIT_OK


def cmd_surjective(args) -> int:
    tau = _load(args.ca, CellularAutomaton)
    target = _shift(args.target)
    domain = _shift(args.domain) if args.domain else None
    verdict = decide_surjective(tau, target, domain, oracle=args.oracle, workers=args.workers)
    return _report_verdict(verdict, 'surjective', 'not surjective', target.alphabet)


def cmd_injective(args) -> int:
    tau = _load(args.ca, CellularAutomaton)
    verdict = decide_injective(tau)
    if verdict.answer:
        _emit('injective')
        return EXIT_OK
    certificate = verdict.certificate
    _emit('not injective')
    _emit(f"states {certificate.states[0]} {certificate.states[1]}")
    for number, machine in enumerate(certificate.preimages, start=1):
        _emit(f"# preimage {number}")
        _emit(print_machine(machine))
    return EXIT_FAILS


def cmd_glue(args) -> int:
    A = _load(args.automaton, RabinAutomaton)
    p = _pattern(args.first, A.signature, A.alphabet)
    q = _pattern(args.second, A.signature, A.alphabet)
    _emit(format_pattern(glue_blocks(A, p, q), A.alphabet))
    return EXIT_OK


def cmd_regularize(args) -> int:
    A = _load(args.automaton, RabinAutomaton)
    p = _pattern(args.pattern, A.signature, A.alphabet)
    _emit(print_machine(regular_approximation(A, p)))
    return EXIT_OK


def cmd_unroll(args) -> int:
    m = _load(args.machine, RegularConfigurationMachine)
    _emit(format_pattern(unroll(m, args.height), m.alphabet))
    return EXIT_OK


def cmd_graph(args) -> int:
    loaded = _load(args.automaton, RabinAutomaton, SftSpec, FiniteTreeAutomaton)
    _emit(graph_emit(presentation(loaded) if isinstance(loaded, SftSpec) else loaded))
    return EXIT_OK


COMMANDS: dict[str, tuple[Callable, tuple[str, ...], str]] = {
    'accept': (cmd_accept, ('automaton', 'pattern'), "test a pattern against an automaton or FTA"),
    'blocks': (cmd_blocks, ('shift',), "list the blocks of a shift of the given height"),
    'essentialize': (cmd_essentialize, ('automaton',), "remove states without bundles, recursively"),
    'codeterminize': (cmd_codeterminize, ('automaton',), "subset construction"),
    'complement': (cmd_complement, ('automaton',), "finite-tree automaton of the complement pattern set"),
    'empty': (cmd_empty, ('fta',), "emptiness of a finite-tree automaton"),
    'full': (cmd_full, ('shift',), "is the shift the full shift"),
    'equal': (cmd_equal, ('first', 'second'), "do two shifts coincide"),
    'image': (cmd_image, ('ca',), "automaton presenting the image of a cellular automaton"),
    'surjective': (cmd_surjective, ('ca', 'target'), "is the cellular automaton onto the target shift"),
    'injective': (cmd_injective, ('ca',), "is the cellular automaton injective"),
    'glue': (cmd_glue, ('automaton', 'first', 'second'), "glue two blocks in a strongly connected automaton"),
    'regularize': (cmd_regularize, ('automaton', 'pattern'), "regular configuration extending a block"),
    'unroll': (cmd_unroll, ('machine',), "block of a regular configuration"),
    'graph': (cmd_graph, ('automaton',), "DOT description of an automaton"),
}


def build_parser() -> argparse.ArgumentParser:
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument('--oracle', action='store_true', help="use brute-force pattern enumeration for emptiness")
    options.add_argument('--workers', type=int, default=1, help="threads for the two emptiness checks")
    options.add_argument('--height', type=int, default=2, help="block height for blocks and unroll")
    options.add_argument('--domain', default=None, help="presentation of a sofic domain for surjective")
    options.add_argument('--verbose', action='store_true', help="debug diagnostics on stderr")

    parser = argparse.ArgumentParser(prog='sofic', description="Sofic tree shifts on k-ary trees")
    verbs = parser.add_subparsers(dest='verb', required=True)
    for verb, (handler, inputs, description) in COMMANDS.items():
        sub = verbs.add_parser(verb, parents=[options], help=description)
        for name in inputs:
            sub.add_argument(name)
        sub.set_defaults(handler=handler)
    return parser


def run(argv: list[str]) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    set_verbosity(args.verbose)
    if args.workers < 1 or args.height < 1:
        logger.error("--workers and --height must be positive")
        return EXIT_USAGE
    try:
        return args.handler(args)
    except (ValueError, OSError) as e:
        logger.error(f"Ошибка команды {args.verb}: {e}")
        _emit(f"error: {e}")
        return EXIT_USAGE
    except RecursionError:
        logger.error(f"Ошибка команды {args.verb}: слишком глубокий образец")
        _emit("error: pattern nesting too deep for this command")
        return EXIT_USAGE
