"""Stacking structures: normal forms, the stacking map and its graph.

The stacking map is kept as its graph, a set of triples ``(y, a, phi(y, a))``.
Three representations are supported:

* :class:`ComponentPhi` - a finite union of products ``Y x {a} x {u}`` with
  ``Y`` regular; this is the shape every conversion in the package produces.
* :class:`RelationPhi` - an arbitrary ternary synchronous relation (for
  structures read from files).
* the lazily evaluated graph built from an asynchronously automatic
  structure (see :mod:`autostack.stacking.from_async`).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from autostack.automata import dfa as fa
from autostack.automata.dfa import Dfa
from autostack.automata.padded import (
    SyncRelation,
    cartesian_product,
    empty_relation,
    padded_symbols,
    unpad,
)
from autostack.core import PAD, Alphabet, Presentation, Word
from autostack.rewriting import BudgetExhausted, DEFAULT_STEP_LIMIT, RewriteStep, RewriteTrace


class StackingError(ValueError):
    pass


@dataclass(frozen=True)
class PhiComponent:
    domain: Dfa
    letter: str
    value: Word


class PhiGraph:
    """Interface shared by the stacking-map representations."""

    bound: int
    regular: bool = True

    def lookup(self, y: Word, a: str) -> list:
        """All ``u`` with ``(y, a, u)`` in the graph (one for a valid structure)."""
        raise NotImplementedError

    def components(self) -> tuple:
        raise NotImplementedError

    def relation(self) -> SyncRelation:
        raise NotImplementedError


class ComponentPhi(PhiGraph):
    def __init__(self, alphabet: Alphabet, components: Sequence[PhiComponent]):
        self.alphabet = alphabet
        comps = []
        for c in components:
            d = c.domain
            if d.alphabet != alphabet.letters:
                d = fa.extend_alphabet(d, alphabet.letters)
            d = fa.minimize(d)
            if not fa.is_empty(d):
                comps.append(PhiComponent(d, c.letter, tuple(c.value)))
        key = alphabet.key
        comps.sort(key=lambda c: (alphabet.index(c.letter), key(c.value)))
        # merge components with the same (letter, value)
        merged: list = []
        for c in comps:
            if merged and merged[-1].letter == c.letter and merged[-1].value == c.value:
                merged[-1] = PhiComponent(fa.minimize(fa.union(merged[-1].domain, c.domain)), c.letter, c.value)
            else:
                merged.append(c)
        self._components = tuple(merged)
        self.bound = max((len(c.value) for c in merged), default=0)
        by_letter: dict = {}
        for c in merged:
            by_letter.setdefault(c.letter, []).append(c)
        self._by_letter = by_letter

    def components(self) -> tuple:
        return self._components

    def lookup(self, y: Word, a: str) -> list:
        y = tuple(y)
        return [c.value for c in self._by_letter.get(a, ()) if c.domain.accepts_word(y)]

    @cached_property
    def _relation(self) -> SyncRelation:
        letters = self.alphabet.letters
        parts = [
            cartesian_product(
                [c.domain, fa.singleton(letters, (c.letter,)), fa.singleton(letters, c.value)]
            ).dfa
            for c in self._components
        ]
        if not parts:
            return empty_relation(letters, 3)
        d = fa.minimize(fa.union_all(parts, padded_symbols(letters, 3)))
        return SyncRelation(letters, 3, d, True)

    def relation(self) -> SyncRelation:
        return self._relation


class RelationPhi(PhiGraph):
    def __init__(self, alphabet: Alphabet, relation: SyncRelation):
        if relation.arity != 3 or relation.base != alphabet.letters:
            raise StackingError("the stacking graph must be a ternary relation over the alphabet")
        self.alphabet = alphabet
        self._rel = relation
        self._live = relation.dfa.live_states()
        self.bound = max((len(u) for _, u in self._pairs), default=0)

    def relation(self) -> SyncRelation:
        return self._rel

    @cached_property
    def _pairs(self) -> list:
        """The finitely many ``(a, u)`` occurring as second and third coordinates."""
        letters = self.alphabet.letters
        d = self._rel.dfa
        proj = fa.hom_image(
            d,
            lambda s: () if s[1] == PAD and s[2] == PAD else ((s[1], s[2]),),
            padded_symbols(letters, 2),
        )
        if not fa.is_finite(proj):
            raise StackingError("stacking graph has unboundedly long values")
        words = fa.enumerate_words(proj, max(1, _finite_depth(proj)))
        out = []
        for p in words:
            a, u = unpad(p, 2)
            if len(a) != 1:
                raise StackingError(f"middle coordinate {a!r} is not a single letter")
            out.append((a[0], u))
        return out

    def components(self) -> tuple:
        letters = self.alphabet.letters
        pairs2 = padded_symbols(letters, 2) + ((PAD, PAD),)
        symbols3 = padded_symbols(letters, 3)
        comps = []
        for a, u in self._pairs:
            mu = [(a if i == 0 else PAD, u[i] if i < len(u) else PAD) for i in range(max(1, len(u)))]
            tail = fa.concat(fa.singleton(pairs2, mu), fa.words_over(pairs2, [(PAD, PAD)]))
            sel = fa.hom_preimage(tail, lambda s: ((s[1], s[2]),), symbols3)
            hit = fa.intersection(self._rel.dfa, sel)
            dom = fa.hom_image(hit, lambda s: () if s[0] == PAD else (s[0],), letters)
            comps.append(PhiComponent(fa.minimize(dom), a, u))
        return ComponentPhi(self.alphabet, comps).components()

    def lookup(self, y: Word, a: str) -> list:
        d = self._rel.dfa
        live = self._live
        y = tuple(y)
        span = max(len(y), 1)
        k = self.bound
        letters = self.alphabet.letters
        out = []
        stack = [(0, d.start, (), False)]
        while stack:
            i, q, u, done = stack.pop()
            c1 = y[i] if i < len(y) else PAD
            c2 = a if i == 0 else PAD
            if i >= span and done:
                if q in d.accepts:
                    out.append(u)
                continue
            options = []
            if not done and len(u) < k:
                options += [(x, False) for x in letters]
            if i < span:
                options.append((PAD, True))
            elif not done:
                # both first coordinates exhausted: u may stop here
                if q in d.accepts:
                    out.append(u)
            for c3, finish in options:
                r = d.step(q, (c1, c2, c3))
                if r in live:
                    stack.append((i + 1, r, u + ((c3,) if c3 != PAD else ()), done or finish))
        return sorted(set(out), key=self.alphabet.key)


def _finite_depth(d: Dfa) -> int:
    """Length of the longest accepted word of a finite language."""
    live = d.live_states()
    order: list = []
    seen: set = set()

    def visit(q):
        seen.add(q)
        for r in d.delta[q]:
            if r in live and r not in seen:
                visit(r)
        order.append(q)

    if d.start in live:
        visit(d.start)
    depth = {}
    for q in order:  # reverse topological: successors first
        depth[q] = max([depth[r] + 1 for r in d.delta[q] if r in live] + [0])
    return depth.get(d.start, 0)


class StackingStructure:
    """Normal forms ``N`` (prefix-closed, with the empty word), stacking graph, bound."""

    def __init__(self, alphabet: Alphabet, normal_forms: Dfa, phi: PhiGraph, bound: int | None = None, check: bool = True):
        self.alphabet = alphabet
        if normal_forms.alphabet != alphabet.letters:
            normal_forms = fa.extend_alphabet(normal_forms, alphabet.letters)
        self.normal_forms = fa.minimize(normal_forms)
        self.phi = phi
        self.bound = phi.bound if bound is None else bound
        if check:
            if not self.normal_forms.accepts_word(()):
                raise StackingError("the normal forms must contain the empty word")
            if not fa.is_prefix_closed(self.normal_forms):
                raise StackingError("the normal forms must be prefix-closed")
            if phi.bound > self.bound:
                raise StackingError(f"stacking values reach length {phi.bound} above the bound {self.bound}")

    def __repr__(self) -> str:
        return f"StackingStructure(letters={' '.join(self.alphabet.letters)}, bound={self.bound})"

    def is_normal(self, y: Sequence) -> bool:
        return self.normal_forms.accepts_word(tuple(y))

    def is_degenerate(self, y: Word, a: str) -> bool:
        """Tree edge test: ``ya`` is a normal form or ``y`` ends in ``a^-1``."""
        y = tuple(y)
        return self.is_normal(y + (a,)) or (bool(y) and y[-1] == self.alphabet.inv(a))

    def phi_eval(self, y: Sequence, a: str) -> Word:
        y = tuple(y)
        if not self.is_normal(y):
            raise StackingError(f"{self.alphabet.format(y)} is not a normal form")
        found = self.phi.lookup(y, a)
        if len(found) != 1:
            raise StackingError(
                f"stacking graph has {len(found)} values at ({self.alphabet.format(y)}, {a})"
            )
        return found[0]

    # -- rewriting with the stacking rules ----------------------------------

    def find_redex(self, w: Sequence):
        """The unique stacking rule applying to ``w`` as ``(lhs, rhs)``, or ``None``."""
        d = self.normal_forms
        q = d.start
        inv = self.alphabet.inv
        for n, a in enumerate(w):
            q = d.step(q, a)
            if q in d.accepts:
                continue
            y = tuple(w[:n])
            if y and y[-1] == inv(a):
                return y + (a,), y[:-1]
            return y + (a,), y + self.phi_eval(y, a)
        return None

    def reduce(self, w: Sequence, step_limit: int = DEFAULT_STEP_LIMIT) -> RewriteTrace:
        start = self.alphabet.check_word(w)
        w = start
        steps = []
        while True:
            r = self.find_redex(w)
            if r is None:
                return RewriteTrace(start, tuple(steps), w)
            if len(steps) >= step_limit:
                raise BudgetExhausted(
                    f"no normal form within {step_limit} steps", RewriteTrace(start, tuple(steps), w)
                )
            lhs, rhs = r
            z = w[len(lhs) :]
            steps.append(RewriteStep(lhs, rhs, z))
            w = rhs + z

    def normal_form(self, w: Sequence, step_limit: int = DEFAULT_STEP_LIMIT) -> Word:
        return self.reduce(w, step_limit).final

    def edge_target(self, y: Word, a: str, step_limit: int = DEFAULT_STEP_LIMIT) -> Word:
        """Normal form of ``ya`` for a normal form ``y``."""
        y = tuple(y)
        if self.is_normal(y + (a,)):
            return y + (a,)
        if y and y[-1] == self.alphabet.inv(a):
            return y[:-1]
        return self.normal_form(y + (a,), step_limit)

    def is_identity(self, w: Sequence, step_limit: int = DEFAULT_STEP_LIMIT) -> bool:
        return self.normal_form(w, step_limit) == ()


def phi_eval(s: StackingStructure, y: Sequence, a: str) -> Word:
    return s.phi_eval(y, a)


def degenerate_domain(alphabet: Alphabet, normal_forms: Dfa, a: str) -> Dfa:
    """``J_a ∪ (N ∩ A* a^-1)``: the normal forms whose ``a``-edge is a tree edge."""
    letters = alphabet.letters
    j = fa.intersection(fa.quotient_by_word(normal_forms, (a,)), normal_forms)
    ends = fa.intersection(normal_forms, fa.suffix_language(letters, (alphabet.inv(a),)))
    return fa.minimize(fa.union(j, ends))


def stacking_presentation(s: StackingStructure) -> Presentation:
    """Relators ``u a^-1`` over the values ``u != a`` of the stacking map."""
    rels = set()
    for c in s.phi.components():
        if c.value != (c.letter,):
            rels.add(c.value + (s.alphabet.inv(c.letter),))
    key = s.alphabet.key
    return Presentation(s.alphabet, tuple(sorted(rels, key=key)))
