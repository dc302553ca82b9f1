"""Conversions between stacking structures and prefix-rewriting systems."""

from __future__ import annotations

from typing import Iterable

from autostack.automata import dfa as fa
from autostack.core import GroupOracle, formal_inverse
from autostack.rewriting import PrefixRewritingSystem
from autostack.stacking.structure import (
    ComponentPhi,
    PhiComponent,
    StackingError,
    StackingStructure,
    degenerate_domain,
)


def stacking_to_cprs(s: StackingStructure) -> PrefixRewritingSystem:
    """The stacking rules: ``(ya, y phi(y, a))`` on recursive edges and ``(y a a^-1, y)``.

    Families are ``(L_{a,u}, a, u)`` and ``(J_a, a a^-1, 1)``; the irreducible
    words are exactly the normal forms.
    """
    alphabet = s.alphabet
    letters = alphabet.letters
    n = s.normal_forms
    degenerate = {a: degenerate_domain(alphabet, n, a) for a in letters}
    families = []
    for c in s.phi.components():
        a = c.letter
        if c.value == (a,):
            continue
        dom = fa.difference(fa.intersection(c.domain, n), degenerate[a])
        if not fa.is_empty(dom):
            families.append((fa.minimize(dom), (a,), c.value))
    for a in letters:
        j = fa.intersection(fa.quotient_by_word(n, (a,)), n)
        families.append((fa.minimize(j), (a, alphabet.inv(a)), ()))
    return PrefixRewritingSystem(alphabet, families, bound=max(s.bound, 2))


def check_processed_exact(q: PrefixRewritingSystem) -> None:
    """Exact automaton checks that ``q`` is processed; raises on failure."""
    if set(q.base) != set(q.alphabet.letters):
        raise StackingError("a processed system acts on words over the whole inverse-closed alphabet")
    irr = q.irreducible
    letters = q.alphabet.letters
    lhs = []
    for f in q.families:
        if not f.lhs:
            raise StackingError("a rule lhs is a proper prefix of its rhs")
        proper = fa.concat(f.prefixes, fa.singleton(letters, f.lhs[:-1]))
        if not fa.is_subset(proper, irr):
            w = fa.shortest_word(fa.difference(proper, irr))
            raise StackingError(f"rule lhs {q.alphabet.format(w + f.lhs[-1:])} has a reducible proper prefix")
        lhs.append(f.lhs_language())
    for i in range(len(lhs)):
        for j in range(i + 1, len(lhs)):
            both = fa.intersection(lhs[i], lhs[j])
            if not fa.is_empty(both):
                w = fa.shortest_word(both)
                raise StackingError(f"two rules share the lhs {q.alphabet.format(w)}")


def cprs_to_stacking(q: PrefixRewritingSystem, check: bool = True) -> StackingStructure:
    """Stacking structure of a processed bounded convergent prefix-rewriting system.

    ``N = Irr(q)``; on a recursive edge the unique rule ``(ya, v)`` is split as
    ``ya = w s a``, ``v = w t`` with ``w`` longest, and ``phi(y, a) = s^-1 t``.
    """
    if check:
        check_processed_exact(q)
    alphabet = q.alphabet
    n = q.irreducible
    k = q.bound
    degenerate = {a: degenerate_domain(alphabet, n, a) for a in alphabet.letters}
    comps = [PhiComponent(degenerate[a], a, (a,)) for a in alphabet.letters]
    for f in q.families:
        a = f.lhs[-1]
        s = f.lhs[:-1]
        t = f.rhs
        if len(s) + 1 > k or len(t) > k:
            raise StackingError("rule split exceeds the bound")
        ys = fa.concat(f.prefixes, fa.singleton(alphabet.letters, s))
        dom = fa.difference(fa.intersection(ys, n), degenerate[a])
        if fa.is_empty(dom):
            continue
        comps.append(PhiComponent(fa.minimize(dom), a, formal_inverse(alphabet, s) + t))
    phi = ComponentPhi(alphabet, comps)
    return StackingStructure(alphabet, n, phi, bound=max(2 * k, phi.bound, 1))


def identity_letters(s: StackingStructure, oracle: GroupOracle | None = None) -> list:
    if oracle is not None:
        return [x for x in s.alphabet.letters if oracle.is_identity((x,))]
    return [x for x in s.alphabet.letters if s.normal_form((x,)) == ()]


def restrict_language(d: fa.Dfa, letters: Iterable) -> fa.Dfa:
    letters = tuple(letters)
    return fa.minimize(fa.hom_preimage(d, lambda x: (x,), letters))


def strip_identity_letters(s: StackingStructure, oracle: GroupOracle | None = None) -> StackingStructure:
    """Drop the letters representing the identity, deleting them from every stacking value."""
    drop = set(identity_letters(s, oracle))
    if not drop:
        return s
    for x in drop:
        if s.normal_forms.accepts_word((x,)):
            raise StackingError(f"identity letter {x!r} occurs in a normal form")
    alphabet = s.alphabet.restrict(x for x in s.alphabet.letters if x not in drop)
    keep = alphabet.letters
    comps = []
    for c in s.phi.components():
        if c.letter in drop:
            continue
        value = tuple(x for x in c.value if x not in drop)
        comps.append(PhiComponent(restrict_language(c.domain, keep), c.letter, value))
    n = restrict_language(s.normal_forms, keep)
    phi = ComponentPhi(alphabet, comps)
    return StackingStructure(alphabet, n, phi, bound=s.bound)
