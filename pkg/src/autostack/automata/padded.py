"""Padded n-tuple alphabets and synchronously regular relations.

A tuple of words ``(u1, ..., un)`` is zipped into one word over tuples,
shorter coordinates being filled with the pad symbol ``$``.  A relation is
synchronously regular when the set of these padded words is regular; it is
stored as a :class:`SyncRelation` wrapping a DFA over the padded alphabet.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from autostack.core import PAD
from autostack.automata import dfa as fa
from autostack.automata.dfa import AutomatonError, Dfa


@lru_cache(maxsize=None)
def padded_symbols(base: tuple, arity: int) -> tuple:
    """``(A ∪ {$})^n`` minus the all-pad tuple, in product order (``$`` last)."""
    if arity < 1:
        raise AutomatonError("arity must be positive")
    for x in base:
        if x == PAD:
            raise AutomatonError("the pad symbol cannot be a base letter")
    comps = tuple(base) + (PAD,)
    allpad = (PAD,) * arity
    return tuple(s for s in itertools.product(comps, repeat=arity) if s != allpad)


def pad_tuple(words: Sequence[Sequence]) -> tuple:
    words = [tuple(w) for w in words]
    m = max((len(w) for w in words), default=0)
    return tuple(tuple(w[i] if i < len(w) else PAD for w in words) for i in range(m))


def unpad(padded: Sequence[tuple], arity: int | None = None) -> tuple:
    """Inverse of :func:`pad_tuple`; rejects malformed padded words."""
    padded = [tuple(s) for s in padded]
    if arity is None:
        if not padded:
            raise AutomatonError("cannot infer the arity of the empty padded word")
        arity = len(padded[0])
    words = [[] for _ in range(arity)]
    ended = [False] * arity
    for pos, sym in enumerate(padded):
        if len(sym) != arity:
            raise AutomatonError(f"symbol {sym!r} at {pos} has the wrong arity")
        if all(c == PAD for c in sym):
            raise AutomatonError(f"all-pad symbol at position {pos}")
        for i, c in enumerate(sym):
            if c == PAD:
                ended[i] = True
            elif ended[i]:
                raise AutomatonError(f"coordinate {i} resumes after padding at position {pos}")
            else:
                words[i].append(c)
    return tuple(tuple(w) for w in words)


def well_formed(base: tuple, arity: int) -> Dfa:
    """Padded words in which no coordinate resumes after a pad."""
    symbols = padded_symbols(base, arity)
    states = list(itertools.product((False, True), repeat=arity))
    index = {s: i for i, s in enumerate(states)}
    dead = len(states)
    rows = []
    for ended in states:
        row = []
        for sym in symbols:
            if any(e and c != PAD for e, c in zip(ended, sym)):
                row.append(dead)
            else:
                row.append(index[tuple(e or c == PAD for e, c in zip(ended, sym))])
        rows.append(row)
    rows.append([dead] * len(symbols))
    return fa.minimize(Dfa(symbols, rows, 0, range(len(states))))


@dataclass(frozen=True)
class SyncRelation:
    """Synchronously regular ``arity``-ary relation over ``base``.

    The wrapped DFA only ever accepts well-formed padded words; the
    constructor intersects with the well-formedness automaton unless told the
    input is already clean.
    """

    base: tuple
    arity: int
    dfa: Dfa
    trusted: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        base = tuple(self.base)
        object.__setattr__(self, "base", base)
        symbols = padded_symbols(base, self.arity)
        d = self.dfa
        if d.alphabet != symbols:
            if set(d.alphabet) <= set(symbols):
                d = fa.extend_alphabet(d, symbols)
            else:
                raise AutomatonError("relation DFA is not over the padded alphabet")
        if not self.trusted:
            d = fa.minimize(fa.intersection(d, well_formed(base, self.arity)))
        object.__setattr__(self, "dfa", d)

    @property
    def symbols(self) -> tuple:
        return padded_symbols(self.base, self.arity)

    def contains(self, words: Sequence[Sequence]) -> bool:
        if len(words) != self.arity:
            raise AutomatonError(f"expected a {self.arity}-tuple")
        return self.dfa.accepts_word(pad_tuple(words))

    __contains__ = contains

    def enumerate(self, max_len: int) -> list:
        """Accepted tuples with padded length <= max_len, in padded shortlex order."""
        return [unpad(p, self.arity) for p in fa.enumerate_words(self.dfa, max_len)]

    def union(self, other: "SyncRelation") -> "SyncRelation":
        self._compatible(other)
        return SyncRelation(self.base, self.arity, fa.minimize(fa.union(self.dfa, other.dfa)), True)

    def intersection(self, other: "SyncRelation") -> "SyncRelation":
        self._compatible(other)
        return SyncRelation(
            self.base, self.arity, fa.minimize(fa.intersection(self.dfa, other.dfa)), True
        )

    def difference(self, other: "SyncRelation") -> "SyncRelation":
        self._compatible(other)
        return SyncRelation(
            self.base, self.arity, fa.minimize(fa.difference(self.dfa, other.dfa)), True
        )

    def complement(self) -> "SyncRelation":
        d = fa.intersection(fa.complement(self.dfa), well_formed(self.base, self.arity))
        return SyncRelation(self.base, self.arity, fa.minimize(d), True)

    def is_empty(self) -> bool:
        return fa.is_empty(self.dfa)

    def equivalent(self, other: "SyncRelation") -> bool:
        self._compatible(other)
        return fa.equivalent(self.dfa, other.dfa)

    def project(self, i: int) -> Dfa:
        """Coordinate ``i`` as a language over ``base`` (pads dropped)."""
        return fa.hom_image(self.dfa, lambda s: () if s[i] == PAD else (s[i],), self.base)

    def _compatible(self, other: "SyncRelation") -> None:
        if self.base != other.base or self.arity != other.arity:
            raise AutomatonError("relations over different padded alphabets")


def empty_relation(base: Sequence, arity: int) -> SyncRelation:
    return SyncRelation(tuple(base), arity, fa.empty(padded_symbols(tuple(base), arity)), True)


def relation_from_tuples(base: Sequence, arity: int, tuples: Iterable) -> SyncRelation:
    base = tuple(base)
    d = fa.finite_language(padded_symbols(base, arity), [pad_tuple(t) for t in tuples])
    return SyncRelation(base, arity, fa.minimize(d), True)


def padded_singleton(base: Sequence, words: Sequence[Sequence]) -> Dfa:
    """The one-word language ``{mu(words)}`` over the padded alphabet."""
    base = tuple(base)
    return fa.singleton(padded_symbols(base, len(words)), pad_tuple(words))


def diagonal(lang: Dfa, arity: int = 2) -> SyncRelation:
    """``{mu(w, ..., w) : w in L}``: every transition on ``x`` becomes one on ``(x, ..., x)``."""
    base = lang.alphabet
    symbols = padded_symbols(base, arity)
    dead = lang.n_states
    rows = []
    for q in range(lang.n_states):
        row = []
        for s in symbols:
            if s[0] != PAD and all(c == s[0] for c in s):
                row.append(lang.delta[q][lang.symbol_index(s[0])])
            else:
                row.append(dead)
        rows.append(row)
    rows.append([dead] * len(symbols))
    return SyncRelation(base, arity, fa.minimize(Dfa(symbols, rows, lang.start, lang.accepts)), True)


def pad_suffix(lang: Dfa) -> Dfa:
    """``L · $*`` over ``base ∪ {$}``."""
    ext = tuple(lang.alphabet) + (PAD,)
    d = fa.extend_alphabet(lang, ext)
    return fa.concat(d, fa.words_over(ext, [PAD]))


def coordinate(i: int):
    return lambda s: (s[i],)


def cartesian_product(langs: Sequence[Dfa]) -> SyncRelation:
    """``mu(L1 × ... × Ln)`` as the intersection of ``rho_i^{-1}(L_i $*)``."""
    langs = list(langs)
    base = langs[0].alphabet
    for lang in langs:
        if lang.alphabet != base:
            raise AutomatonError("alphabet mismatch in cartesian product")
    symbols = padded_symbols(base, len(langs))
    parts = [fa.hom_preimage(pad_suffix(lang), coordinate(i), symbols) for i, lang in enumerate(langs)]
    return SyncRelation(base, len(langs), fa.intersection_all(parts), True)


def concat_relations(first: Dfa, second: Dfa, base: Sequence, arity: int) -> SyncRelation:
    """Concatenate two padded languages; the result is re-checked for well-formedness."""
    return SyncRelation(tuple(base), arity, fa.concat(first, second))


def diagonal_times(lang: Dfa, words: Sequence[Sequence]) -> SyncRelation:
    """``Delta(L) · mu(words)``, the shape of every rule family in the package."""
    base = lang.alphabet
    arity = len(words)
    diag = diagonal(lang, arity).dfa
    return SyncRelation(base, arity, fa.concat(diag, padded_singleton(base, words)), True)
