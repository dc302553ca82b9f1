"""Stacking structures from asynchronously automatic structures.

Given prefix-closed regular normal forms ``N`` and, for each letter ``a``, a
two-tape machine ``M_a`` accepting exactly the pairs ``(y_g, y_ga)``, the
stacking map is

* ``a`` on tree edges;
* ``y_g^-1 y_ga`` on other edges with ``len(y_g) + len(y_ga) <= C^2 + 3C``;
* ``s^-1 p_q a r_q^-1 t`` otherwise, where the run of ``M_a`` on
  ``(y_g, y_ga)`` is cut before its shortest suffix reading ``C + 1`` letters
  of ``y_g``: ``q`` is the state at the cut, ``s``/``t`` the letters read
  after it, and ``(p_q, r_q)`` the tapes of a fixed short path from ``q`` to
  the accept state.

The small-edge part of the graph is a finite but very large set, so it is
evaluated on demand instead of being stored as an automaton.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from autostack.automata import dfa as fa
from autostack.automata.asynchronous import (
    AsyncAutomaton,
    async_project_first,
    async_run,
    k_automaton,
    second_coordinates,
    shuffle_blocks,
    shuffle_tapes,
    tape_of,
)
from autostack.automata.dfa import Dfa
from autostack.core import END, Alphabet, GroupOracle, Word, formal_inverse, words_up_to
from autostack.stacking.structure import PhiGraph, StackingError, StackingStructure, degenerate_domain


class AsyncAutomaticStructure:
    """Normal forms plus one two-tape multiplier per letter, with a block bound."""

    def __init__(self, alphabet: Alphabet, normal_forms: Dfa, multipliers: dict, block_bound: int):
        self.alphabet = alphabet
        if normal_forms.alphabet != alphabet.letters:
            normal_forms = fa.extend_alphabet(normal_forms, alphabet.letters)
        self.normal_forms = fa.minimize(normal_forms)
        self.multipliers = {a: multipliers[a] for a in alphabet.letters}
        self.block_bound = block_bound
        if not self.normal_forms.accepts_word(()) or not fa.is_prefix_closed(self.normal_forms):
            raise StackingError("normal forms must be prefix-closed and contain the empty word")
        for a, m in self.multipliers.items():
            if m.alphabet != alphabet.letters:
                raise StackingError(f"multiplier for {a!r} reads a different alphabet")
        if block_bound < 1:
            raise StackingError("the block bound must be positive")

    def multiply(self, y: Word, a: str) -> Word:
        """The normal form of ``ya``, read off the multiplier."""
        found = second_coordinates(self.multipliers[a], y, self.block_bound * (len(y) + 2))
        if len(found) != 1:
            raise StackingError(
                f"multiplier for {a!r} gives {len(found)} partners for {self.alphabet.format(y)}"
            )
        return found[0]

    def validate(self, max_len: int = 8, oracle: GroupOracle | None = None, any_len: int = 4) -> None:
        """Spot checks by enumeration; raises :class:`StackingError` with a witness.

        Every normal form up to ``max_len`` has exactly one partner under each
        multiplier, the partner is a normal form (and represents ``ya`` if an
        oracle is given), and every block of the shuffle is at most the block
        bound.  Words up to ``any_len`` outside ``N`` must have no partner.
        """
        fmt = self.alphabet.format
        for y in fa.enumerate_words(self.normal_forms, max_len):
            for a in self.alphabet.letters:
                z = self.multiply(y, a)
                if not self.normal_forms.accepts_word(z):
                    raise StackingError(f"partner {fmt(z)} of ({fmt(y)}, {a}) is not a normal form")
                if oracle is not None and not oracle.equal(z, y + (a,)):
                    raise StackingError(f"partner {fmt(z)} of ({fmt(y)}, {a}) is the wrong element")
                blocks = shuffle_blocks(self.multipliers[a], y, z)
                worst = max(n for _, n in blocks)
                if worst > self.block_bound:
                    raise StackingError(
                        f"shuffle of ({fmt(y)}, {fmt(z)}) has a block of length {worst} "
                        f"above the bound {self.block_bound}"
                    )
        for y in words_up_to(self.alphabet.letters, any_len):
            if self.normal_forms.accepts_word(y):
                continue
            for a, m in self.multipliers.items():
                if second_coordinates(m, y, self.block_bound * (len(y) + 2)):
                    raise StackingError(f"multiplier for {a!r} accepts a pair with {fmt(y)} outside N")


@dataclass(frozen=True)
class LetterData:
    """Per-letter constants: good states and their short accepting paths."""

    letter: str
    good: tuple
    path: dict  # q -> W_q
    tapes: dict  # q -> (p_q, r_q)


class AsyncPhi(PhiGraph):
    regular = False

    def __init__(self, structure: AsyncAutomaticStructure, letter_data: dict, c: int):
        self.structure = structure
        self.alphabet = structure.alphabet
        self.letter_data = letter_data
        self.c = c
        self.small_limit = c * c + 3 * c
        self.bound = self.small_limit

    # -- direct evaluation ------------------------------------------------

    def classify(self, y: Word, a: str):
        """``("degenerate", None)``, ``("small", z)`` or ``("large", z)`` with ``z = y_ga``."""
        st = self.structure
        y = tuple(y)
        if st.normal_forms.accepts_word(y + (a,)) or (y and y[-1] == self.alphabet.inv(a)):
            return "degenerate", None
        z = st.multiply(y, a)
        if len(y) + len(z) <= self.small_limit:
            return "small", z
        return "large", z

    def split(self, y: Word, a: str, z: Word) -> tuple:
        """Cut the run on ``(y, z)`` before its shortest suffix with ``C + 1`` letters of ``y``.

        Returns ``(q, s, t)``.
        """
        m = self.structure.multipliers[a]
        shuffle, ok = async_run(m, y, z)
        if not ok:
            raise StackingError("multiplier rejects the pair it produced")
        states = []
        q = m.start
        for x in shuffle:
            states.append(q)
            q = m.step(q, x)
        need = self.c + 2  # tape-1 symbols in the suffix, end marker included
        seen = 0
        cut = None
        for i in range(len(shuffle) - 1, -1, -1):
            if tape_of(m.kinds[states[i]]) == 1:
                seen += 1
                if seen == need:
                    cut = i
                    break
        if cut is None:
            raise StackingError("normal form too short for the large case")
        q = states[cut]
        s, t, end = shuffle_tapes(m, shuffle[cut:], q)
        if end != m.accept or s[-1:] != (END,) or t[-1:] != (END,):
            raise StackingError("suffix of the run does not end in the accept state")
        if q not in self.letter_data[a].path:
            raise StackingError("cut state is not a good state")
        return q, s[:-1], t[:-1]

    def large_value(self, a: str, q: int, s: Word, t: Word) -> Word:
        p, r = self.letter_data[a].tapes[q]
        inv = self.alphabet.inverse
        return inv(s) + p + (a,) + inv(r) + t

    def value(self, y: Word, a: str) -> Word:
        kind, z = self.classify(y, a)
        if kind == "degenerate":
            return (a,)
        if kind == "small":
            return formal_inverse(self.alphabet, tuple(y)) + z
        q, s, t = self.split(tuple(y), a, z)
        return self.large_value(a, q, s, t)

    def lookup(self, y: Word, a: str) -> list:
        return [self.value(y, a)]

    # -- the automaton pieces of the graph ----------------------------------

    @cached_property
    def _degenerate(self) -> dict:
        st = self.structure
        return {a: degenerate_domain(self.alphabet, st.normal_forms, a) for a in self.alphabet.letters}

    def suffix_pairs(self, a: str, q: int) -> dict:
        """``S_{a,q}``: every ``s`` of length ``C + 1`` mapped to its unique ``t``.

        Depth-first over runs from ``q`` to the accept state reading exactly
        ``C + 1`` tape-1 letters and at most ``C^2 + 2C`` tape-2 letters.
        """
        m = self.structure.multipliers[a]
        live = m.graph_live()
        n1 = self.c + 1
        t_max = self.c * self.c + 2 * self.c
        out: dict = {}
        stack = [(q, (), (), False, False)]
        while stack:
            p, s, t, done1, done2 = stack.pop()
            kind = m.kinds[p]
            if kind == "qf":
                if done1 and done2 and len(s) == n1:
                    if s in out and out[s] != t:
                        raise StackingError("two partners for the same suffix")
                    out[s] = t
                continue
            if p not in live:
                continue
            tape = tape_of(kind)
            if tape == 1:
                if len(s) < n1:
                    for x in m.alphabet:
                        stack.append((m.step(p, x), s + (x,), t, done1, done2))
                else:
                    stack.append((m.step(p, END), s, t, True, done2))
            else:
                if len(t) < t_max:
                    for x in m.alphabet:
                        stack.append((m.step(p, x), s, t + (x,), done1, done2))
                stack.append((m.step(p, END), s, t, done1, True))
        return out

    @cached_property
    def large_components(self) -> tuple:
        """``(a, q, s, t, L)`` with ``L = rho1(K_{a,q}) s`` minus the tree-edge domains.

        The small-edge domain is not subtracted here; it is excluded by the
        length test in :meth:`lookup_by_components`.
        """
        letters = self.alphabet.letters
        out = []
        for a in letters:
            m = self.structure.multipliers[a]
            for q in self.letter_data[a].good:
                if m.kinds[q] != "Q1":
                    continue
                pairs = self.suffix_pairs(a, q)
                if not pairs:
                    continue
                reach = async_project_first(k_automaton(m, q))
                for s in sorted(pairs, key=self.alphabet.key):
                    dom = fa.concat(reach, fa.singleton(letters, s))
                    dom = fa.minimize(fa.difference(dom, self._degenerate[a]))
                    if not fa.is_empty(dom):
                        out.append((a, q, s, pairs[s], dom))
        return tuple(out)

    def lookup_by_components(self, y: Word, a: str) -> list:
        """Evaluate through the graph decomposition instead of the direct split."""
        y = tuple(y)
        if self._degenerate[a].accepts_word(y):
            return [(a,)]
        z = self.structure.multiply(y, a)
        if len(y) + len(z) <= self.small_limit:
            return [formal_inverse(self.alphabet, y) + z]
        return [
            self.large_value(a, q, s, t)
            for b, q, s, t, dom in self.large_components
            if b == a and dom.accepts_word(y)
        ]

    def components(self) -> tuple:
        raise StackingError("the small-edge part of this stacking graph is only available on demand")

    def relation(self):
        raise StackingError("the small-edge part of this stacking graph is only available on demand")


def letter_constants(m: AsyncAutomaton, a: str, c: int) -> LetterData:
    good = tuple(m.good_states())
    path = {}
    tapes = {}
    for q in good:
        w = m.shortest_path_word(q)
        if w is None or len(w) >= c:
            raise StackingError(f"good state {m.names[q]} of the {a!r} multiplier has no short accepting path")
        p, r, end = shuffle_tapes(m, w, q)
        if end != m.accept:
            raise StackingError("short path does not end in the accept state")
        path[q] = w
        tapes[q] = (p[:-1], r[:-1])
    return LetterData(a, good, path, tapes)


def stacking_constant(structure: AsyncAutomaticStructure) -> int:
    biggest = max(m.n_states for m in structure.multipliers.values())
    return max(structure.block_bound, 4, biggest + 1)


def stacking_from_async(structure: AsyncAutomaticStructure) -> StackingStructure:
    c = stacking_constant(structure)
    data = {a: letter_constants(m, a, c) for a, m in structure.multipliers.items()}
    phi = AsyncPhi(structure, data, c)
    return StackingStructure(structure.alphabet, structure.normal_forms, phi, bound=phi.bound)
