"""The built-in groups, each with a convergent rewriting system and an oracle.

Every entry is verified when it is loaded: the rules must be locally
confluent and shortlex-reducing, and the oracle must agree with normal-form
equality on all words up to length 5.  An entry that fails refuses to load.
"""

from __future__ import annotations

import os
from functools import cached_property
from pathlib import Path

from autostack.automata import dfa as fa
from autostack.automata.asynchronous import sync_to_async
from autostack.automata.padded import SyncRelation, diagonal_times, padded_symbols
from autostack.core import Alphabet, GroupOracle, words_up_to
from autostack.catalog.oracles import (
    FreeGroupOracle,
    KleinBottleOracle,
    NormalFormOracle,
    PermutationOracle,
    VectorOracle,
)
from autostack.rewriting import RewritingError, StringRewritingSystem, check_local_confluence, lift_srs, process

CATALOG_ENV = "AUTOSTACK_CATALOG_DIR"
SHIPPED = ("free2", "z2", "s3", "klein")


class CatalogError(ValueError):
    pass


class CatalogEntry:
    """A group given by a finite convergent rewriting system plus an oracle."""

    def __init__(
        self,
        name: str,
        alphabet: Alphabet,
        srs: StringRewritingSystem,
        oracle: GroupOracle,
        doc: str = "",
        async_structure=None,
    ):
        self.name = name
        self.alphabet = alphabet
        self.srs = srs
        self.oracle = oracle
        self.doc = doc
        self._async_builder = async_structure

    def __repr__(self) -> str:
        return f"CatalogEntry({self.name!r})"

    def parse(self, text: str):
        return self.alphabet.parse(text)

    def format(self, w) -> str:
        return self.alphabet.format(w)

    @cached_property
    def prefix_system(self):
        return lift_srs(self.srs)

    @cached_property
    def processed(self):
        return process(self.prefix_system, oracle=self.oracle)

    @cached_property
    def stacking(self):
        from autostack.stacking import cprs_to_stacking

        return cprs_to_stacking(self.processed)

    @cached_property
    def async_structure(self):
        if self._async_builder is None:
            return None
        return self._async_builder(self.alphabet)

    @cached_property
    def async_stacking(self):
        from autostack.stacking import stacking_from_async

        if self.async_structure is None:
            return None
        return stacking_from_async(self.async_structure)

    def verify(self, max_len: int = 5) -> None:
        """Raise :class:`CatalogError` unless the rules and the oracle agree."""
        try:
            check_local_confluence(self.srs).require()
        except RewritingError as e:
            raise CatalogError(f"{self.name}: {e}") from None
        fmt = self.alphabet.format
        value_of_nf: dict = {}
        nf_of_value: dict = {}
        for w in words_up_to(self.alphabet.letters, max_len):
            nf = self.srs.reduce(w)
            g = self.oracle.eval(w)
            if nf in value_of_nf and value_of_nf[nf] != g:
                raise CatalogError(f"{self.name}: {fmt(w)} has normal form {fmt(nf)} but a different oracle value")
            value_of_nf[nf] = g
            if g in nf_of_value and nf_of_value[g] != nf:
                raise CatalogError(
                    f"{self.name}: {fmt(nf_of_value[g])} and {fmt(nf)} are equal in the group but both irreducible"
                )
            nf_of_value[g] = nf


# -- hand-built synchronous multipliers -------------------------------------------


def tree_multiplier(alphabet: Alphabet, normal_forms: fa.Dfa, x: str) -> SyncRelation:
    """Pairs ``(y, nf(yx))`` when every ``x``-edge is a tree edge.

    ``yx`` is a normal form, or ``y = y'x^-1`` and the partner is ``y'``.
    """
    xi = alphabet.inv(x)
    forward = fa.intersection(fa.quotient_by_word(normal_forms, (x,)), normal_forms)
    back = fa.intersection(fa.quotient_by_word(normal_forms, (xi,)), normal_forms)
    r1 = diagonal_times(fa.minimize(forward), [(), (x,)])
    r2 = diagonal_times(fa.minimize(back), [(xi,), ()])
    return r1.union(r2)


def _shift_multiplier(letters: tuple, x: str, xi: str) -> SyncRelation:
    """``(x^m u, x^(m+1) u)`` on ``(a*|A*)(b*|B*)`` where ``x`` is ``a`` or ``A``."""
    pairs = {
        ("s", (x, x)): "P",
        ("s", (xi, xi)): "Q",
        ("s", ("$", x)): "E",
        ("s", ("b", x)): "Cb",
        ("s", ("B", x)): "CB",
        ("s", (xi, "b")): "Db",
        ("s", (xi, "B")): "DB",
        ("s", (xi, "$")): "E",
        ("P", (x, x)): "P",
        ("P", ("$", x)): "E",
        ("P", ("b", x)): "Cb",
        ("P", ("B", x)): "CB",
        ("Q", (xi, xi)): "Q",
        ("Q", (xi, "b")): "Db",
        ("Q", (xi, "B")): "DB",
        ("Q", (xi, "$")): "E",
    }
    for y in ("b", "B"):
        pairs[("C" + y, (y, y))] = "C" + y
        pairs[("C" + y, ("$", y))] = "E"
        pairs[("D" + y, (y, y))] = "D" + y
        pairs[("D" + y, (y, "$"))] = "E"
    d = fa.from_partial(padded_symbols(letters, 2), pairs, "s", ["E"])
    return SyncRelation(letters, 2, fa.minimize(d))


def _async_from_sync(alphabet: Alphabet, normal_forms: fa.Dfa, relations: dict, block_bound: int):
    from autostack.stacking.from_async import AsyncAutomaticStructure

    mults = {a: sync_to_async(relations[a]) for a in alphabet.letters}
    return AsyncAutomaticStructure(alphabet, normal_forms, mults, block_bound)


def free2_async(alphabet: Alphabet):
    srs = _free_rules(alphabet)
    n = fa.minimize(StringRewritingSystem(alphabet, srs).irreducible_language())
    rels = {x: tree_multiplier(alphabet, n, x) for x in alphabet.letters}
    return _async_from_sync(alphabet, n, rels, 2)


def z2_async(alphabet: Alphabet):
    n = fa.minimize(StringRewritingSystem(alphabet, _z2_rules(alphabet)).irreducible_language())
    letters = alphabet.letters
    rels = {
        "a": _shift_multiplier(letters, "a", "A"),
        "A": _shift_multiplier(letters, "A", "a"),
        "b": tree_multiplier(alphabet, n, "b"),
        "B": tree_multiplier(alphabet, n, "B"),
    }
    return _async_from_sync(alphabet, n, rels, 2)


# -- rule lists -----------------------------------------------------------------------


def _free_rules(alphabet: Alphabet) -> list:
    return [((x, alphabet.inv(x)), ()) for x in alphabet.letters if alphabet.inv(x) != x]


def _z2_rules(alphabet: Alphabet) -> list:
    # b-letters move right past a-letters
    swaps = [((y, x), (x, y)) for y in ("b", "B") for x in ("a", "A")]
    return _free_rules(alphabet) + swaps


def _klein_rules(alphabet: Alphabet) -> list:
    # b a b^-1 = a^-1, so b-letters move right past a-letters flipping them
    flip = {"a": "A", "A": "a"}
    swaps = [((y, x), (flip[x], y)) for y in ("b", "B") for x in ("a", "A")]
    return _free_rules(alphabet) + swaps


def _builtin(name: str) -> CatalogEntry:
    if name == "free2":
        al = Alphabet.free(["a", "b"])
        return CatalogEntry(
            name, al, StringRewritingSystem(al, _free_rules(al)), FreeGroupOracle(al),
            "Free group on a, b with free reduction.", free2_async,
        )
    if name == "z2":
        al = Alphabet.free(["a", "b"])
        vectors = {"a": (1, 0), "A": (-1, 0), "b": (0, 1), "B": (0, -1)}
        return CatalogEntry(
            name, al, StringRewritingSystem(al, _z2_rules(al)), VectorOracle(al, vectors),
            "Free abelian group of rank two; normal forms a^m b^n.", z2_async,
        )
    if name == "s3":
        al = Alphabet.from_pairs(["b", "a"])
        rules = [(("a", "a"), ()), (("b", "b"), ()), (("a", "b", "a"), ("b", "a", "b"))]
        images = {"a": (1, 0, 2), "b": (0, 2, 1)}
        return CatalogEntry(
            name, al, StringRewritingSystem(al, rules), PermutationOracle(al, images),
            "Symmetric group on three points generated by two transpositions.",
        )
    if name == "klein":
        al = Alphabet.free(["a", "b"])
        return CatalogEntry(
            name, al, StringRewritingSystem(al, _klein_rules(al)), KleinBottleOracle(al),
            "Fundamental group of the Klein bottle, b a b^-1 = a^-1.",
        )
    raise CatalogError(f"unknown catalog entry {name!r}")


def _user_entry(name: str) -> CatalogEntry | None:
    root = os.environ.get(CATALOG_ENV)
    if not root:
        return None
    path = Path(root) / f"{name}.rules"
    if not path.is_file():
        return None
    from autostack.catalog.formats import read_rules

    rf = read_rules(path.read_text(encoding="utf-8"))
    srs = rf.string_system()
    return CatalogEntry(name, rf.alphabet, srs, NormalFormOracle(srs), f"User entry from {path.name}.")


_CACHE: dict = {}


def load_entry(name: str, verify: bool = True) -> CatalogEntry:
    """Load and verify a catalog entry; user catalogs come first, then built-ins."""
    root = os.environ.get(CATALOG_ENV, "")
    key = (name, root)
    if key in _CACHE:
        return _CACHE[key]
    entry = _user_entry(name)
    if entry is None:
        entry = _builtin(name)
    if verify:
        entry.verify()
    _CACHE[key] = entry
    return entry


def entry_names() -> list:
    names = list(SHIPPED)
    root = os.environ.get(CATALOG_ENV)
    if root and Path(root).is_dir():
        names += sorted(p.stem for p in Path(root).glob("*.rules") if p.stem not in names)
    return names
