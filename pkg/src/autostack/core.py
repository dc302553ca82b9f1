"""Alphabets with formal inverses, words, and group presentations.

Words are plain tuples of letter strings.  The empty tuple is the empty word.
Every ordering decision elsewhere in the package (shortlex, tie-breaks,
enumeration order) goes through :meth:`Alphabet.index`, i.e. the order in
which the letters were declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

Word = tuple  # tuple[str, ...]

EMPTY: Word = ()

# Symbols with a fixed meaning in padded words, async tapes and the file grammar.
PAD = "$"
END = "#"
RESERVED_CHARS = frozenset("$#(),_ \t\n")


class AlphabetError(ValueError):
    pass


def _check_letter(x: str) -> None:
    if not isinstance(x, str) or not x:
        raise AlphabetError(f"letters must be non-empty strings, got {x!r}")
    if x == "1" or x.startswith("\\") or any(c in RESERVED_CHARS for c in x):
        raise AlphabetError(f"letter {x!r} uses a reserved symbol")
    if x == "->":
        raise AlphabetError("'->' cannot be a letter")


@dataclass(frozen=True)
class Alphabet:
    """A finite, totally ordered letter set with an involution ``inv``.

    ``inverses[i]`` is the inverse of ``letters[i]``; a letter may be its own
    inverse.
    """

    letters: tuple
    inverses: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)
    _inv: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        letters = tuple(self.letters)
        inverses = tuple(self.inverses)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "inverses", inverses)
        if len(letters) != len(inverses):
            raise AlphabetError("letters and inverses differ in length")
        if len(set(letters)) != len(letters):
            raise AlphabetError("duplicate letter")
        for x in letters:
            _check_letter(x)
        index = {x: i for i, x in enumerate(letters)}
        inv = dict(zip(letters, inverses))
        for x, y in inv.items():
            if y not in index:
                raise AlphabetError(f"inverse {y!r} of {x!r} is not a letter")
            if inv[y] != x:
                raise AlphabetError(f"inversion is not an involution at {x!r}")
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_inv", inv)

    @classmethod
    def from_pairs(cls, letters: Sequence[str], pairs: Iterable[tuple] = ()) -> "Alphabet":
        """Build from an ordered letter list and inverse pairs.

        Letters not mentioned in any pair are self-inverse.
        """
        inv = {x: x for x in letters}
        for x, y in pairs:
            if x not in inv or y not in inv:
                raise AlphabetError(f"inverse pair ({x}, {y}) names an unknown letter")
            inv[x] = y
            inv[y] = x
        return cls(tuple(letters), tuple(inv[x] for x in letters))

    @classmethod
    def free(cls, names: Sequence[str]) -> "Alphabet":
        """Each name ``x`` gets the inverse ``x.upper()`` (or ``x.lower()``)."""
        letters = []
        pairs = []
        for x in names:
            y = x.upper() if x.upper() != x else x.lower()
            letters += [x, y]
            pairs.append((x, y))
        return cls.from_pairs(letters, pairs)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, x) -> bool:
        return x in self._index

    def index(self, x: str) -> int:
        return self._index[x]

    def inv(self, x: str) -> str:
        return self._inv[x]

    def inverse(self, w: Sequence[str]) -> Word:
        return formal_inverse(self, w)

    def inverse_pairs(self) -> list:
        """Pairs ``(x, inv(x))`` with ``x`` first in letter order; fixed points omitted."""
        out = []
        for x in self.letters:
            y = self._inv[x]
            if x != y and self._index[x] < self._index[y]:
                out.append((x, y))
        return out

    def is_word(self, w) -> bool:
        return all(x in self._index for x in w)

    def check_word(self, w) -> Word:
        w = tuple(w)
        for x in w:
            if x not in self._index:
                raise AlphabetError(f"{x!r} is not a letter of this alphabet")
        return w

    def key(self, w: Sequence[str]) -> tuple:
        """Shortlex sort key."""
        return (len(w), tuple(self._index[x] for x in w))

    def lex_key(self, w: Sequence[str]) -> tuple:
        return tuple(self._index[x] for x in w)

    def parse(self, text: str) -> Word:
        """Read a word written either space-separated or as concatenated letters.

        ``"1"``, ``"λ"`` and the blank string denote the empty word.
        """
        text = text.strip()
        if text in ("", "1", "λ"):
            return EMPTY
        if any(c.isspace() for c in text):
            return self.check_word(text.split())
        out = []
        pos = 0
        by_length = sorted(self.letters, key=len, reverse=True)
        while pos < len(text):
            for x in by_length:
                if text.startswith(x, pos):
                    out.append(x)
                    pos += len(x)
                    break
            else:
                raise AlphabetError(f"cannot read a letter at position {pos} of {text!r}")
        return tuple(out)

    def format(self, w: Sequence[str], sep: str | None = None) -> str:
        if not w:
            return "1"
        if sep is None:
            sep = "" if all(len(x) == 1 for x in self.letters) else " "
        return sep.join(w)

    def restrict(self, keep: Iterable[str]) -> "Alphabet":
        """Sub-alphabet on ``keep`` (must be closed under ``inv``), same order."""
        keep = set(keep)
        letters = [x for x in self.letters if x in keep]
        for x in letters:
            if self._inv[x] not in keep:
                raise AlphabetError(f"{x!r} kept without its inverse")
        return Alphabet(tuple(letters), tuple(self._inv[x] for x in letters))


def formal_inverse(alphabet: Alphabet, w: Sequence[str]) -> Word:
    return tuple(alphabet.inv(x) for x in reversed(w))


def free_reduce(alphabet: Alphabet, w: Sequence[str]) -> Word:
    stack: list = []
    for x in w:
        if stack and stack[-1] == alphabet.inv(x):
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def is_freely_reduced(alphabet: Alphabet, w: Sequence[str]) -> bool:
    return all(w[i + 1] != alphabet.inv(w[i]) for i in range(len(w) - 1))


def common_prefix_length(u: Sequence, v: Sequence) -> int:
    n = 0
    for x, y in zip(u, v):
        if x != y:
            break
        n += 1
    return n


def words_up_to(letters: Sequence, max_len: int):
    """All words of length <= max_len in shortlex order of ``letters``."""
    level = [()]
    yield ()
    for _ in range(max_len):
        level = [w + (x,) for w in level for x in letters]
        yield from level


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    relators: tuple = ()

    def __post_init__(self):
        rels = tuple(self.alphabet.check_word(r) for r in self.relators)
        object.__setattr__(self, "relators", rels)

    def relator_set(self) -> frozenset:
        return frozenset(self.relators)


class GroupOracle:
    """Group arithmetic used to check answers independently of rewriting.

    Subclasses define ``identity``, ``multiply`` and ``letter``; elements must
    be hashable so they can key dictionaries.
    """

    alphabet: Alphabet

    def identity(self) -> Hashable:
        raise NotImplementedError

    def multiply(self, g, h) -> Hashable:
        raise NotImplementedError

    def letter(self, x: str) -> Hashable:
        raise NotImplementedError

    def eval(self, w: Sequence[str]) -> Hashable:
        g = self.identity()
        for x in w:
            g = self.multiply(g, self.letter(x))
        return g

    def is_identity(self, w: Sequence[str]) -> bool:
        return self.eval(w) == self.identity()

    def equal(self, u: Sequence[str], v: Sequence[str]) -> bool:
        return self.eval(u) == self.eval(v)
