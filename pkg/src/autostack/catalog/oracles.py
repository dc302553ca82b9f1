"""Group arithmetic independent of rewriting, used to check answers."""

from __future__ import annotations

from typing import Sequence

from autostack.core import Alphabet, GroupOracle, free_reduce


class FreeGroupOracle(GroupOracle):
    """Elements are freely reduced words."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet

    def identity(self):
        return ()

    def multiply(self, g, h):
        return free_reduce(self.alphabet, g + h)

    def letter(self, x):
        return (x,)


class VectorOracle(GroupOracle):
    """Free abelian group: each letter is an integer vector."""

    def __init__(self, alphabet: Alphabet, vectors: dict):
        self.alphabet = alphabet
        self.vectors = {x: tuple(v) for x, v in vectors.items()}
        self.dim = len(next(iter(self.vectors.values())))

    def identity(self):
        return (0,) * self.dim

    def multiply(self, g, h):
        return tuple(x + y for x, y in zip(g, h))

    def letter(self, x):
        return self.vectors[x]


class PermutationOracle(GroupOracle):
    """Letters act as permutations of ``range(n)``; words act left to right."""

    def __init__(self, alphabet: Alphabet, images: dict):
        self.alphabet = alphabet
        self.images = {x: tuple(p) for x, p in images.items()}
        self.n = len(next(iter(self.images.values())))

    def identity(self):
        return tuple(range(self.n))

    def multiply(self, g, h):
        return tuple(h[i] for i in g)

    def letter(self, x):
        return self.images[x]


class KleinBottleOracle(GroupOracle):
    """``Z ⋊ Z`` with ``b a b^-1 = a^-1``; elements ``(m, n)`` stand for ``a^m b^n``."""

    def __init__(self, alphabet: Alphabet, a="a", b="b"):
        self.alphabet = alphabet
        self._letters = {
            a: (1, 0),
            alphabet.inv(a): (-1, 0),
            b: (0, 1),
            alphabet.inv(b): (0, -1),
        }

    def identity(self):
        return (0, 0)

    def multiply(self, g, h):
        m1, n1 = g
        m2, n2 = h
        return (m1 + (m2 if n1 % 2 == 0 else -m2), n1 + n2)

    def letter(self, x):
        return self._letters[x]


class NormalFormOracle(GroupOracle):
    """Elements are normal forms of a convergent string rewriting system."""

    def __init__(self, srs):
        self.srs = srs
        self.alphabet = srs.alphabet

    def identity(self):
        return ()

    def multiply(self, g, h):
        return self.srs.reduce(tuple(g) + tuple(h))

    def letter(self, x):
        return self.srs.reduce((x,))

    def eval(self, w: Sequence):
        return self.srs.reduce(tuple(w))
