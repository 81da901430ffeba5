import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional

from core.logger_config import logger

Word = tuple[int, ...]
EPSILON: Word = ()

# Pattern counts grow doubly exponentially with the height.
MAX_ENUMERATION_HEIGHT = 8

_TOKEN_RE = re.compile(r'\(|\)|[^\s()]+')


def format_word(word: Word) -> str:
    if not word:
        return 'ε'
    separator = '.' if any(direction > 9 for direction in word) else ''
    return separator.join(str(direction) for direction in word)


class SupportError(ValueError):
    def __init__(self, word: Word, message: str = ''):
        self.word = word
        super().__init__(message or f"word {format_word(word)} is outside the pattern support")


@dataclass(frozen=True)
class TreeSignature:
    arity: int

    def __post_init__(self):
        if not isinstance(self.arity, int) or self.arity < 1:
            raise ValueError(f"arity must be a positive integer, got {self.arity!r}")

    @property
    def directions(self) -> range:
        return range(self.arity)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, 'symbols', tuple(self.symbols))
        if not self.symbols:
            raise ValueError("alphabet must not be empty")
        for token in self.symbols:
            if not token or _TOKEN_RE.fullmatch(token) is None or token in '()':
                raise ValueError(f"invalid alphabet token {token!r}")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate tokens in alphabet {' '.join(self.symbols)}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def index(self, token: str) -> int:
        try:
            return self.symbols.index(token)
        except ValueError:
            raise ValueError(f"letter {token!r} is not in the alphabet") from None

    def token(self, letter: int) -> str:
        if not 0 <= letter < len(self.symbols):
            raise ValueError(f"letter index {letter} is outside the alphabet of size {len(self.symbols)}")
        return self.symbols[letter]


@dataclass(frozen=True)
class FullSubtree:
    children: tuple['FullSubtree', ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'children', tuple(self.children))

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash(('shape', self.children))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @cached_property
    def height(self) -> int:
        return 1 + max((child.height for child in self.children), default=0)

    @cached_property
    def size(self) -> int:
        return 1 + sum(child.size for child in self.children)

    def words(self) -> Iterator[Word]:
        stack: list[tuple[Word, FullSubtree]] = [(EPSILON, self)]
        while stack:
            word, node = stack.pop()
            yield word
            for direction in reversed(range(len(node.children))):
                stack.append((word + (direction,), node.children[direction]))

    def leaves(self) -> Iterator[Word]:
        return (word for word in self.words() if self.subtree(word).is_leaf)

    def subtree(self, word: Word) -> 'FullSubtree':
        node = self
        for depth, direction in enumerate(word):
            if direction >= len(node.children):
                raise SupportError(word[:depth + 1])
            node = node.children[direction]
        return node

    def contains(self, word: Word) -> bool:
        try:
            self.subtree(word)
        except SupportError:
            return False
        return True

    def expanded(self, sig: TreeSignature) -> 'FullSubtree':
        """Every leaf receives a full set of leaf children."""
        if self.is_leaf:
            return FullSubtree(tuple(FullSubtree() for _ in sig.directions))
        return FullSubtree(tuple(child.expanded(sig) for child in self.children))


@dataclass(frozen=True)
class Pattern:
    label: int
    children: tuple['Pattern', ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'children', tuple(self.children))

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.label, self.children))

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @cached_property
    def height(self) -> int:
        return 1 + max((child.height for child in self.children), default=0)

    @cached_property
    def size(self) -> int:
        return 1 + sum(child.size for child in self.children)

    @cached_property
    def support(self) -> FullSubtree:
        return FullSubtree(tuple(child.support for child in self.children))

    def node(self, word: Word) -> 'Pattern':
        node = self
        for depth, direction in enumerate(word):
            if direction >= len(node.children):
                raise SupportError(word[:depth + 1])
            node = node.children[direction]
        return node

    def at(self, word: Word) -> int:
        return self.node(word).label

    def items(self) -> Iterator[tuple[Word, int]]:
        stack: list[tuple[Word, Pattern]] = [(EPSILON, self)]
        while stack:
            word, node = stack.pop()
            yield word, node.label
            for direction in reversed(range(len(node.children))):
                stack.append((word + (direction,), node.children[direction]))

    def labels(self) -> tuple[int, ...]:
        return tuple(label for _, label in self.items())

    def letters(self) -> frozenset[int]:
        return frozenset(self.labels())


def check_pattern(p: Pattern, sig: TreeSignature, alphabet: Alphabet) -> Pattern:
    for word, label in p.items():
        node = p.node(word)
        if node.children and len(node.children) != sig.arity:
            raise ValueError(f"vertex {format_word(word)} has {len(node.children)} children, arity is {sig.arity}")
        if not 0 <= label < len(alphabet):
            raise ValueError(f"label {label} at {format_word(word)} is outside the alphabet")
    return p


@lru_cache(maxsize=256)
def _delta(arity: int, n: int) -> FullSubtree:
    if n == 1:
        return FullSubtree()
    child = _delta(arity, n - 1)
    return FullSubtree(tuple(child for _ in range(arity)))


def delta(sig: TreeSignature, n: int) -> FullSubtree:
    if n < 1:
        raise ValueError(f"block height must be at least 1, got {n}")
    return _delta(sig.arity, n)


def block_height(p: Pattern, sig: TreeSignature) -> Optional[int]:
    """n if p is a block of height n, None otherwise."""
    if p.support == delta(sig, p.height):
        return p.height
    return None


def restrict(p: Pattern, shape: FullSubtree, prefix: Word = EPSILON) -> Pattern:
    if shape.is_leaf:
        return Pattern(p.label)
    if len(p.children) != len(shape.children):
        raise SupportError(prefix + (0,))
    return Pattern(p.label, tuple(
        restrict(child, sub, prefix + (direction,))
        for direction, (child, sub) in enumerate(zip(p.children, shape.children))))


def subpattern(p: Pattern, w: Word, shape: FullSubtree) -> Pattern:
    return restrict(p.node(w), shape, w)


def translate(w: Word, p: Pattern) -> dict[Word, int]:
    return {w + m: label for m, label in p.items()}


def from_labeling(labeling: Mapping[Word, int], sig: TreeSignature) -> Pattern:
    if EPSILON not in labeling:
        raise ValueError("labeling does not contain the root")
    used = 0

    def build(word: Word) -> Pattern:
        nonlocal used
        used += 1
        present = [word + (direction,) in labeling for direction in sig.directions]
        if not any(present):
            return Pattern(labeling[word])
        if not all(present):
            raise ValueError(f"vertex {format_word(word)} has only some of its children")
        return Pattern(labeling[word], tuple(build(word + (direction,)) for direction in sig.directions))

    pattern = build(EPSILON)
    if used != len(labeling):
        raise ValueError("labeling is not supported on a full subtree containing the root")
    return pattern


def _extend(node: Optional[Pattern], height: int, sig: TreeSignature, letters: int) -> list[Pattern]:
    labels = range(letters) if node is None else (node.label,)
    if height == 1:
        return [Pattern(label) for label in labels]
    subtrees = [
        _extend(node.children[direction] if node is not None and node.children else None, height - 1, sig, letters)
        for direction in sig.directions]
    return [Pattern(label, children) for label in labels for children in product(*subtrees)]


def extensions(block: Pattern, n: int, sig: TreeSignature, alphabet: Alphabet) -> list[Pattern]:
    if block_height(block, sig) is None:
        raise ValueError("only blocks can be extended")
    if block.height > n:
        raise ValueError(f"block of height {block.height} cannot be extended to height {n}")
    return _extend(block, n, sig, len(alphabet))


def all_blocks(sig: TreeSignature, alphabet: Alphabet, n: int) -> list[Pattern]:
    delta(sig, n)
    return _extend(None, n, sig, len(alphabet))


def extend_blocks(blocks: Iterable[Pattern], sig: TreeSignature, alphabet: Alphabet) -> frozenset[Pattern]:
    blocks = list(blocks)
    if not blocks:
        return frozenset()
    n = max(block.height for block in blocks)
    result = frozenset(ext for block in blocks for ext in extensions(block, n, sig, alphabet))
    logger.debug(f"Блоки расширены до высоты {n}: {len(blocks)} -> {len(result)}")
    return result


@lru_cache(maxsize=64)
def shapes_of_height(arity: int, height: int) -> tuple[FullSubtree, ...]:
    if height == 1:
        return (FullSubtree(),)
    lower = shapes_up_to(arity, height - 1)
    return tuple(
        FullSubtree(children) for children in product(lower, repeat=arity)
        if max(child.height for child in children) == height - 1)


def shapes_up_to(arity: int, height: int) -> tuple[FullSubtree, ...]:
    return tuple(shape for h in range(1, height + 1) for shape in shapes_of_height(arity, h))


def label_shape(shape: FullSubtree, labels: Iterable[int]) -> Pattern:
    """Labels are consumed in preorder."""
    remaining = iter(labels)

    def build(node: FullSubtree) -> Pattern:
        label = next(remaining)
        return Pattern(label, tuple(build(child) for child in node.children))

    return build(shape)


def enumerate_patterns(sig: TreeSignature, alphabet: Alphabet, max_height: int) -> Iterator[Pattern]:
    """Every full-tree-pattern of height ≤ max_height exactly once.

    Heights ascend; within a height shapes follow the recursive product order of
    their children, and labelings of a shape are lexicographic in preorder.
    """
    if max_height < 1:
        raise ValueError(f"max_height must be at least 1, got {max_height}")
    if max_height > MAX_ENUMERATION_HEIGHT:
        raise ValueError(f"max_height {max_height} exceeds the enumeration guard {MAX_ENUMERATION_HEIGHT}")
    for height in range(1, max_height + 1):
        for shape in shapes_of_height(sig.arity, height):
            for labels in product(range(len(alphabet)), repeat=shape.size):
                yield label_shape(shape, labels)


def format_pattern(p: Pattern, alphabet: Alphabet) -> str:
    if p.is_leaf:
        return f"({alphabet.token(p.label)})"
    inner = ' '.join(format_pattern(child, alphabet) for child in p.children)
    return f"({alphabet.token(p.label)} {inner})"


def block_token(p: Pattern, alphabet: Alphabet) -> str:
    return '.'.join(alphabet.token(label) for label in p.labels())


def parse_pattern(text: str, sig: TreeSignature, alphabet: Alphabet) -> Pattern:
    tokens = _TOKEN_RE.findall(text)
    position = 0

    def expect(token: str) -> None:
        nonlocal position
        if position >= len(tokens):
            raise ValueError(f"expected {token!r}, got end of input")
        if tokens[position] != token:
            raise ValueError(f"expected {token!r}, got {tokens[position]!r}")
        position += 1

    def open_node() -> None:
        nonlocal position
        expect('(')
        if position >= len(tokens) or tokens[position] in '()':
            found = tokens[position] if position < len(tokens) else 'end of input'
            raise ValueError(f"expected a letter, got {found!r}")
        open_vertices.append((alphabet.index(tokens[position]), []))
        position += 1

    open_vertices: list[tuple[int, list[Pattern]]] = []
    pattern = None
    open_node()
    while open_vertices:
        if position < len(tokens) and tokens[position] == '(':
            open_node()
            continue
        expect(')')
        label, children = open_vertices.pop()
        if children and len(children) != sig.arity:
            raise ValueError(f"vertex with {len(children)} children, arity is {sig.arity}")
        node = Pattern(label, tuple(children))
        # cached height, size and hash are filled bottom-up so that deep patterns never recurse
        _ = node.height, node.size, hash(node)
        if open_vertices:
            open_vertices[-1][1].append(node)
        else:
            pattern = node
    if position != len(tokens):
        raise ValueError(f"unexpected token {tokens[position]!r} after the pattern")
    return pattern
