import os
from functools import wraps
from typing import Callable, Iterator, Optional

import chardet

from core.cellauto import CellularAutomaton
from core.ftauto import FiniteTreeAutomaton
from core.logger_config import logger
from core.rabin import Bundle, RabinAutomaton, RegularConfigurationMachine
from core.shiftspec import SftSpec, normalize
from core.treecore import Alphabet, Pattern, TreeSignature, format_pattern, parse_pattern


class FormatError(ValueError):
    def __init__(self, file: str, line: int, token: str, message: str):
        self.file = file
        self.line = line
        self.token = token
        super().__init__(f"{file}:{line}: {message} (token {token!r})")


def detect_encoding(func):
    @wraps(func)
    def wrapper(self, *args, **kwargs):
        with open(self.file_path, 'rb') as f:
            raw = f.read()
        try:
            raw.decode('utf-8')
            kwargs['encoding'] = 'utf-8'
        except UnicodeDecodeError:
            kwargs['encoding'] = chardet.detect(raw)['encoding'] or 'utf-8'
        return func(self, *args, **kwargs)
    return wrapper


class _Records:
    """Keyword lines of one text object; blank lines and '#' comments are skipped."""

    def __init__(self, text: str, file: str):
        self.file = file
        self.lines: list[tuple[int, str, str]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            keyword, *rest = line.split(None, 1)
            self.lines.append((number, keyword, rest[0].strip() if rest else ''))

    def error(self, line: int, token: str, message: str) -> FormatError:
        return FormatError(self.file, line, token, message)

    def all(self, *keywords: str) -> Iterator[tuple[int, str, str]]:
        known = set(keywords)
        for number, keyword, rest in self.lines:
            if keyword not in known:
                raise self.error(number, keyword, "unknown keyword")
            yield number, keyword, rest

    def single(self, keyword: str, required: bool = True) -> Optional[tuple[int, str]]:
        found = [(number, rest) for number, kw, rest in self.lines if kw == keyword]
        if len(found) > 1:
            raise self.error(found[1][0], keyword, "header given twice")
        if not found:
            if required:
                raise self.error(0, keyword, "missing header")
            return None
        return found[0]

    def integer(self, keyword: str, required: bool = True) -> Optional[int]:
        entry = self.single(keyword, required)
        if entry is None:
            return None
        number, rest = entry
        try:
            return int(rest)
        except ValueError:
            raise self.error(number, rest, f"{keyword} must be an integer") from None

    def guarded(self, number: int, token: str, build: Callable):
        try:
            return build()
        except FormatError:
            raise
        except ValueError as e:
            raise self.error(number, token, str(e)) from None


def _signature(records: _Records) -> TreeSignature:
    arity = records.integer('arity')
    return records.guarded(records.single('arity')[0], str(arity), lambda: TreeSignature(arity))


def _alphabet(records: _Records, keyword: str) -> Alphabet:
    number, rest = records.single(keyword)
    return records.guarded(number, rest, lambda: Alphabet(tuple(rest.split())))


def _state_ids(records: _Records, number: int, names: list[str], index: dict[str, int]) -> list[int]:
    ids = []
    for name in names:
        if name not in index:
            raise records.error(number, name, "unknown state")
        ids.append(index[name])
    return ids


AUTOMATON_KEYWORDS = ('arity', 'alphabet', 'states', 'bundle')


def _automaton(records: _Records) -> RabinAutomaton:
    sig = _signature(records)
    alphabet = _alphabet(records, 'alphabet')
    number, rest = records.single('states')
    states = tuple(rest.split())
    index = {name: i for i, name in enumerate(states)}
    bundles = []
    seen = set()
    for number, keyword, rest in records.lines:
        if keyword != 'bundle':
            continue
        tokens = rest.split()
        if len(tokens) != sig.arity + 2:
            raise records.error(number, rest, f"bundle needs a source, a letter and {sig.arity} terminals")
        source, letter, *children = tokens
        label = records.guarded(number, letter, lambda: alphabet.index(letter))
        bundle = Bundle(_state_ids(records, number, [source], index)[0], label,
                        tuple(_state_ids(records, number, children, index)))
        if bundle in seen:
            raise records.error(number, rest, "duplicate bundle")
        seen.add(bundle)
        bundles.append(bundle)
    return records.guarded(number, 'states', lambda: RabinAutomaton(sig, alphabet, states, tuple(bundles)))


def parse_automaton(text: str, file: str = '<string>') -> RabinAutomaton:
    records = _Records(text, file)
    list(records.all(*AUTOMATON_KEYWORDS))
    return _automaton(records)


def parse_fta(text: str, file: str = '<string>') -> FiniteTreeAutomaton:
    records = _Records(text, file)
    list(records.all(*AUTOMATON_KEYWORDS, 'initial', 'final'))
    base = _automaton(records)
    index = {name: i for i, name in enumerate(base.states)}
    entry = records.single('initial', required=False)
    initial = _state_ids(records, entry[0], entry[1].split(), index) if entry else []
    number, rest = records.single('final')
    final = _state_ids(records, number, [rest], index)[0]
    return FiniteTreeAutomaton(base, frozenset(initial), final)


def _patterns(records: _Records, keyword: str, sig: TreeSignature, alphabet: Alphabet) -> list[Pattern]:
    return [records.guarded(number, rest, lambda rest=rest: parse_pattern(rest, sig, alphabet))
            for number, kw, rest in records.lines if kw == keyword]


def _sft(records: _Records, alphabet_keyword: str, memory_keyword: str) -> SftSpec:
    sig = _signature(records)
    alphabet = _alphabet(records, alphabet_keyword)
    memory = records.integer(memory_keyword, required=False)
    forbidden = _patterns(records, 'forbid', sig, alphabet)
    entry = records.single(memory_keyword, required=False)
    return records.guarded(entry[0] if entry else 0, memory_keyword,
                           lambda: normalize(sig, alphabet, forbidden, memory))


def parse_sft(text: str, file: str = '<string>') -> SftSpec:
    records = _Records(text, file)
    list(records.all('arity', 'alphabet', 'memory', 'forbid'))
    return _sft(records, 'alphabet', 'memory')


def parse_ca(text: str, file: str = '<string>') -> CellularAutomaton:
    records = _Records(text, file)
    list(records.all('arity', 'in_alphabet', 'out_alphabet', 'domain_memory', 'forbid', 'memory', 'rule'))
    domain = _sft(records, 'in_alphabet', 'domain_memory')
    target = _alphabet(records, 'out_alphabet')
    memory = records.integer('memory')
    table: dict[Pattern, int] = {}
    for number, keyword, rest in records.lines:
        if keyword != 'rule':
            continue
        pattern_text, letter = rest.rsplit(None, 1) if len(rest.split()) > 1 else ('', rest)
        block = records.guarded(number, pattern_text,
                                lambda: parse_pattern(pattern_text, domain.signature, domain.alphabet))
        if block in table:
            raise records.error(number, pattern_text, "rule given twice")
        table[block] = records.guarded(number, letter, lambda: target.index(letter))
    return records.guarded(records.single('memory')[0], 'rule',
                           lambda: CellularAutomaton(domain, target, memory, table))


def parse_machine(text: str, file: str = '<string>') -> RegularConfigurationMachine:
    records = _Records(text, file)
    list(records.all('arity', 'alphabet', 'root', 'node'))
    sig = _signature(records)
    alphabet = _alphabet(records, 'alphabet')
    nodes = [(number, rest.split()) for number, kw, rest in records.lines if kw == 'node']
    names = [tokens[0] if tokens else '' for _, tokens in nodes]
    index = {name: i for i, name in enumerate(names)}
    colors, steps = [], []
    for number, tokens in nodes:
        if len(tokens) != sig.arity + 2:
            raise records.error(number, ' '.join(tokens), f"node needs a name, a color and {sig.arity} successors")
        colors.append(records.guarded(number, tokens[1], lambda token=tokens[1]: alphabet.index(token)))
        steps.append(tuple(_state_ids(records, number, tokens[2:], index)))
    number, rest = records.single('root')
    root = _state_ids(records, number, [rest], index)[0]
    return records.guarded(number, rest, lambda: RegularConfigurationMachine(
        sig, alphabet, tuple(names), root, tuple(colors), tuple(steps)))


def print_automaton(A: RabinAutomaton) -> str:
    lines = [f"arity {A.signature.arity}", f"alphabet {' '.join(A.alphabet)}", f"states {' '.join(A.states)}"]
    lines.extend(f"bundle {A.describe(bundle)}" for bundle in A.bundles)
    return '\n'.join(lines) + '\n'


def print_fta(B: FiniteTreeAutomaton) -> str:
    names = B.base.states
    initial = ' '.join(names[s] for s in sorted(B.initial))
    return print_automaton(B.base) + f"initial {initial}".rstrip() + f"\nfinal {names[B.final]}\n"


def _forbid_lines(X: SftSpec) -> list[str]:
    return sorted(f"forbid {format_pattern(block, X.alphabet)}" for block in X.forbidden)


def print_sft(X: SftSpec) -> str:
    lines = [f"arity {X.signature.arity}", f"alphabet {' '.join(X.alphabet)}", f"memory {X.memory}"]
    return '\n'.join(lines + _forbid_lines(X)) + '\n'


def print_ca(tau: CellularAutomaton) -> str:
    X = tau.domain
    lines = [f"arity {X.signature.arity}", f"in_alphabet {' '.join(X.alphabet)}",
             f"out_alphabet {' '.join(tau.target)}", f"domain_memory {X.memory}"]
    lines.extend(_forbid_lines(X))
    lines.append(f"memory {tau.memory}")
    lines.extend(sorted(f"rule {format_pattern(block, X.alphabet)} {tau.target.token(letter)}"
                        for block, letter in tau.table.items()))
    return '\n'.join(lines) + '\n'


def print_machine(m: RegularConfigurationMachine) -> str:
    lines = [f"arity {m.signature.arity}", f"alphabet {' '.join(m.alphabet)}", f"root {m.states[m.root]}"]
    lines.extend(f"node {name} {m.alphabet.token(color)} {' '.join(m.states[s] for s in step)}"
                 for name, color, step in zip(m.states, m.colors, m.steps))
    return '\n'.join(lines) + '\n'


PARSERS = {
    '.ura': parse_automaton,
    '.fta': parse_fta,
    '.sft': parse_sft,
    '.ca': parse_ca,
    '.rcm': parse_machine,
}


class FileData:
    def __init__(self, file_path: str):
        self.file_path = file_path
        self.file_name = os.path.basename(file_path)
        self.extension = os.path.splitext(file_path)[1].lower()

    @detect_encoding
    def read_text(self, encoding: str = 'utf-8') -> str:
        with open(self.file_path, 'r', encoding=encoding) as f:
            text = f.read()
        logger.debug(f"Файл {self.file_name} прочитан в кодировке {encoding}")
        return text

    def load(self):
        parser = PARSERS.get(self.extension)
        if parser is None:
            raise FormatError(self.file_name, 0, self.extension, "unsupported file extension")
        loaded = parser(self.read_text(), self.file_name)
        logger.debug(f"Загружен объект {type(loaded).__name__} из {self.file_name}")
        return loaded

    def load_pattern(self, sig: TreeSignature, alphabet: Alphabet) -> Pattern:
        lines = [(number, line.strip()) for number, line in enumerate(self.read_text().splitlines(), start=1)
                 if line.strip() and not line.strip().startswith('#')]
        if not lines:
            raise FormatError(self.file_name, 0, '', "no pattern in file")
        text = ' '.join(line for _, line in lines)
        try:
            return parse_pattern(text, sig, alphabet)
        except ValueError as e:
            raise FormatError(self.file_name, lines[0][0], lines[0][1][:20], str(e)) from None
