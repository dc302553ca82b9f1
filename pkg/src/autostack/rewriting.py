"""Prefix-rewriting systems, string rewriting systems and the processing step.

A prefix-rewriting system is stored as a list of *rule families*
``(F, s, t)``, each denoting the rules ``{(w s, w t) : w in F}`` where ``F``
is a regular language.  Families are normalized so that ``s`` and ``t`` do
not start with the same letter, and merged so that each pair ``(s, t)``
occurs once.  A finite rule list is the special case of finite families.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from autostack.automata import dfa as fa
from autostack.automata.dfa import Dfa
from autostack.automata.padded import SyncRelation, diagonal_times, padded_symbols
from autostack.core import Alphabet, GroupOracle, Word, common_prefix_length

DEFAULT_STEP_LIMIT = 10**6


class RewritingError(ValueError):
    pass


class BudgetExhausted(RewritingError):
    """Raised when a reduction hits its step limit; carries the partial trace."""

    def __init__(self, message: str, trace: "RewriteTrace | None" = None):
        super().__init__(message)
        self.trace = trace


def split_rule(u: Sequence, v: Sequence) -> tuple:
    """``(w, s, t)`` with ``u = ws``, ``v = wt`` and ``w`` as long as possible."""
    u, v = tuple(u), tuple(v)
    n = common_prefix_length(u, v)
    return u[:n], u[n:], v[n:]


def pair_key(alphabet: Alphabet, s: Sequence, t: Sequence) -> tuple:
    """Total order on suffix pairs: length then lex on ``s``, then on ``t``."""
    return (alphabet.key(s), alphabet.key(t))


@dataclass(frozen=True)
class RuleFamily:
    prefixes: Dfa
    lhs: Word
    rhs: Word

    def rules(self, max_prefix_len: int) -> list:
        return [(w + self.lhs, w + self.rhs) for w in fa.enumerate_words(self.prefixes, max_prefix_len)]

    def lhs_language(self) -> Dfa:
        return fa.concat(self.prefixes, fa.singleton(self.prefixes.alphabet, self.lhs))


@dataclass(frozen=True)
class RewriteStep:
    lhs: Word
    rhs: Word
    suffix: Word

    @property
    def before(self) -> Word:
        return self.lhs + self.suffix

    @property
    def after(self) -> Word:
        return self.rhs + self.suffix


@dataclass(frozen=True)
class RewriteTrace:
    start: Word
    steps: tuple
    final: Word

    def __len__(self) -> int:
        return len(self.steps)

    def words(self) -> list:
        return [self.start] + [s.after for s in self.steps]


def _normalize_family(alphabet: Alphabet, prefixes: Dfa, s: Word, t: Word) -> tuple:
    n = common_prefix_length(s, t)
    if n:
        prefixes = fa.concat(prefixes, fa.singleton(alphabet.letters, s[:n]))
        s, t = s[n:], t[n:]
    if s == t:
        raise RewritingError("a rule must have distinct sides")
    return prefixes, s, t


class PrefixRewritingSystem:
    """Rules ``(u, v)`` applied only at the start of a word: ``uz -> vz``.

    ``base`` optionally restricts the letters of the words the system is
    meant to act on (a monoid generating set); irreducible words are then
    taken over ``base`` only.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        families: Iterable,
        base: Sequence | None = None,
        bound: int | None = None,
    ):
        self.alphabet = alphabet
        self.base = tuple(alphabet.letters) if base is None else tuple(x for x in alphabet.letters if x in set(base))
        letters = alphabet.letters
        merged: dict = {}
        for item in families:
            if isinstance(item, RuleFamily):
                prefixes, s, t = item.prefixes, item.lhs, item.rhs
            else:
                prefixes, s, t = item
            s, t = alphabet.check_word(s), alphabet.check_word(t)
            if prefixes.alphabet != letters:
                prefixes = fa.extend_alphabet(prefixes, letters)
            prefixes, s, t = _normalize_family(alphabet, prefixes, s, t)
            if fa.is_empty(prefixes):
                continue
            if (s, t) in merged:
                prefixes = fa.union(merged[(s, t)], prefixes)
            merged[(s, t)] = prefixes
        keys = sorted(merged, key=lambda st: pair_key(alphabet, *st))
        self.families = tuple(RuleFamily(fa.minimize(merged[k]), k[0], k[1]) for k in keys)
        computed = max((max(len(f.lhs), len(f.rhs)) for f in self.families), default=0)
        if bound is not None and bound < computed:
            raise RewritingError(f"declared bound {bound} is below the rule bound {computed}")
        self.bound = computed if bound is None else bound
        by_lhs: dict = defaultdict(list)
        for i, f in enumerate(self.families):
            by_lhs[f.lhs].append(i)
        self._by_lhs = dict(by_lhs)
        self._lhs_lengths = sorted({len(s) for s in self._by_lhs})

    @classmethod
    def from_rules(cls, alphabet: Alphabet, rules: Iterable, base=None, bound=None):
        groups: dict = defaultdict(list)
        for u, v in rules:
            w, s, t = split_rule(alphabet.check_word(u), alphabet.check_word(v))
            if s == t:
                raise RewritingError(f"rule {u!r} -> {v!r} has equal sides")
            groups[(s, t)].append(w)
        families = [
            (fa.finite_language(alphabet.letters, ws), s, t) for (s, t), ws in groups.items()
        ]
        return cls(alphabet, families, base, bound)

    def __repr__(self) -> str:
        return f"PrefixRewritingSystem({len(self.families)} families, bound={self.bound})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PrefixRewritingSystem):
            return NotImplemented
        if self.alphabet != other.alphabet or self.base != other.base:
            return False
        if [(f.lhs, f.rhs) for f in self.families] != [(f.lhs, f.rhs) for f in other.families]:
            return False
        return all(fa.equivalent(f.prefixes, g.prefixes) for f, g in zip(self.families, other.families))

    __hash__ = None

    # -- rule sets ---------------------------------------------------------

    def rules(self, max_lhs_len: int) -> list:
        """Every rule with ``len(lhs) <= max_lhs_len``, sorted by lhs then rhs (shortlex)."""
        out = set()
        for f in self.families:
            if len(f.lhs) <= max_lhs_len:
                out.update(f.rules(max_lhs_len - len(f.lhs)))
        key = self.alphabet.key
        return sorted(out, key=lambda r: (key(r[0]), key(r[1])))

    @cached_property
    def lhs_language(self) -> Dfa:
        return fa.minimize(fa.union_all([f.lhs_language() for f in self.families], self.alphabet.letters))

    @cached_property
    def irreducible(self) -> Dfa:
        return irreducible_language(self)

    def relation(self) -> SyncRelation:
        """The padded rule set ``mu(R)`` as a binary synchronous relation."""
        letters = self.alphabet.letters
        parts = [diagonal_times(f.prefixes, (f.lhs, f.rhs)).dfa for f in self.families]
        d = fa.union_all(parts, padded_symbols(letters, 2)) if parts else fa.empty(padded_symbols(letters, 2))
        return SyncRelation(letters, 2, fa.minimize(d), True)

    # -- rewriting -----------------------------------------------------------

    def matches(self, w: Sequence, n: int) -> list:
        """Rules whose left side is exactly the prefix ``w[:n]``, as ``(lhs, rhs)``."""
        out = []
        for ell in self._lhs_lengths:
            if ell > n:
                break
            s = tuple(w[n - ell : n])
            for i in self._by_lhs.get(s, ()):
                f = self.families[i]
                prefix = tuple(w[: n - ell])
                if f.prefixes.accepts_word(prefix):
                    out.append((prefix + f.lhs, prefix + f.rhs))
        return out

    def find_redex(self, w: Sequence):
        """The rule applied to ``w``: shortest reducible prefix, then least rhs.

        Returns ``(lhs, rhs)`` or ``None`` when ``w`` is irreducible.
        """
        w = tuple(w)
        irr = self.irreducible
        q = irr.start
        # walk the irreducible-prefix automaton to find the first reducible prefix
        key = self.alphabet.key
        for n in range(len(w) + 1):
            if n:
                q = irr.step(q, w[n - 1])
            if q in irr.accepts:
                continue
            found = self.matches(w, n)
            if found:
                return min(found, key=lambda r: key(r[1]))
            # outside the base alphabet with no rule: treat as stuck
            return None
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
                    f"no normal form within {step_limit} steps",
                    RewriteTrace(start, tuple(steps), w),
                )
            lhs, rhs = r
            z = w[len(lhs) :]
            steps.append(RewriteStep(lhs, rhs, z))
            w = rhs + z

    def normal_form(self, w: Sequence, step_limit: int = DEFAULT_STEP_LIMIT) -> Word:
        return self.reduce(w, step_limit).final

    def is_irreducible(self, w: Sequence) -> bool:
        return self.irreducible.accepts_word(tuple(w))


def irreducible_language(r: PrefixRewritingSystem) -> Dfa:
    """``base* \\ (LHS · A*)``."""
    letters = r.alphabet.letters
    reducible = fa.concat(r.lhs_language, fa.universal(letters)) if r.families else fa.empty(letters)
    irr = fa.difference(fa.words_over(letters, r.base), reducible)
    return fa.minimize(irr)


def find_redex(r: PrefixRewritingSystem, w: Sequence):
    return r.find_redex(w)


def reduce(r: PrefixRewritingSystem, w: Sequence, step_limit: int = DEFAULT_STEP_LIMIT) -> RewriteTrace:
    return r.reduce(w, step_limit)


def prl(q: PrefixRewritingSystem, w: Sequence, step_limit: int = DEFAULT_STEP_LIMIT) -> int:
    """Number of prefix-rewriting steps from ``w`` to its normal form."""
    return len(q.reduce(w, step_limit).steps)


def boundedness(r: PrefixRewritingSystem) -> int:
    return r.bound


# -- processing -------------------------------------------------------------


def find_inverse_normal_form(
    r: PrefixRewritingSystem, oracle: GroupOracle, b: str, max_depth: int = 12
) -> Word:
    """Shortlex-least irreducible word ``z`` with ``b z`` trivial."""
    irr = r.irreducible
    target = oracle.eval((b,))
    base = r.base
    level = [((), irr.start)]
    for depth in range(max_depth + 1):
        for w, _ in level:
            if oracle.multiply(target, oracle.eval(w)) == oracle.identity():
                return w
        if depth == max_depth:
            break
        nxt = []
        for w, q in level:
            for x in base:
                p = irr.step(q, x)
                if p in irr.accepts:
                    nxt.append((w + (x,), p))
        level = nxt
    raise BudgetExhausted(f"no irreducible inverse of {b!r} up to length {max_depth}")


def process(
    r: PrefixRewritingSystem,
    oracle: GroupOracle | None = None,
    zb_depth: int = 12,
    check: bool = True,
) -> PrefixRewritingSystem:
    """Turn a bounded convergent system over ``base`` into a processed one.

    Keeps the rules whose proper lhs prefixes are irreducible, keeps one rule
    per lhs (the one with least suffix pair), and adds rules removing the
    inverse letters that are not in ``base``.
    """
    alphabet = r.alphabet
    letters = alphabet.letters
    base = r.base
    irr = r.irreducible
    base_star = fa.words_over(letters, base)
    pieces = []  # (lhs-language L_i, s_i, t_i) in suffix-pair order
    for f in r.families:
        if not f.lhs:
            raise RewritingError("a rule whose lhs is a prefix of its rhs cannot terminate")
        if f.lhs[-1] not in base:
            continue
        keep = fa.intersection(f.prefixes, fa.quotient_by_word(irr, f.lhs[:-1]))
        keep = fa.intersection(keep, base_star)
        if fa.is_empty(keep):
            continue
        lhs_lang = fa.concat(keep, fa.singleton(letters, f.lhs))
        pieces.append((fa.minimize(lhs_lang), f.lhs, f.rhs))
    families = []
    taken = fa.empty(letters)
    for lang, s, t in pieces:  # already in suffix-pair order
        fresh = fa.minimize(fa.difference(lang, taken))
        taken = fa.union(taken, lang)
        if fa.is_empty(fresh):
            continue
        # lhs = y s with y ranging over the quotient
        families.append((fa.minimize(_strip_suffix(fresh, s)), s, t))
    bound = r.bound
    missing = [b for b in base if alphabet.inv(b) not in base]
    if missing and oracle is None:
        raise RewritingError("an oracle is needed to find inverse normal forms")
    for b in missing:
        binv = alphabet.inv(b)
        z = find_inverse_normal_form(r, oracle, b, zb_depth)
        not_ending_b = fa.difference(irr, fa.concat(fa.universal(letters), fa.singleton(letters, (b,))))
        families.append((fa.minimize(not_ending_b), (binv,), z))
        families.append((fa.minimize(fa.quotient_by_word(irr, (b,))), (b, binv), ()))
        bound = max(bound, 2, len(z))
    q = PrefixRewritingSystem(alphabet, families, base=None, bound=bound)
    if check and not fa.equivalent(q.irreducible, irr):
        raise RewritingError("processing changed the irreducible words")
    return q


def _strip_suffix(lang: Dfa, s: Word) -> Dfa:
    """``{y : y s in lang}``; every word of ``lang`` is assumed to end in ``s``."""
    return fa.quotient_by_word(lang, s)


@dataclass(frozen=True)
class ProcessedCertificate:
    inverses: bool
    prefixes_irreducible: bool
    unique_rhs: bool
    checked_up_to: int
    witnesses: tuple = ()

    @property
    def ok(self) -> bool:
        return self.inverses and self.prefixes_irreducible and self.unique_rhs


def certify_processed(
    q: PrefixRewritingSystem, max_lhs_len: int = 8, oracle: GroupOracle | None = None
) -> ProcessedCertificate:
    """Check the three processed-system conditions on every rule with lhs up to ``max_lhs_len``."""
    alphabet = q.alphabet
    witnesses = []
    inverses = set(q.base) == set(alphabet.letters)
    if oracle is not None:
        for x in alphabet.letters:
            if not oracle.is_identity((x, alphabet.inv(x))):
                inverses = False
                witnesses.append(("inverse", (x,)))
    rules = q.rules(max_lhs_len)
    prefixes_ok = True
    rhs_of: dict = {}
    unique = True
    for u, v in rules:
        if not q.is_irreducible(u[:-1]):
            prefixes_ok = False
            witnesses.append(("reducible-prefix", u))
        if u in rhs_of and rhs_of[u] != v:
            unique = False
            witnesses.append(("duplicate-lhs", u))
        rhs_of.setdefault(u, v)
    return ProcessedCertificate(inverses, prefixes_ok, unique, max_lhs_len, tuple(witnesses))


# -- string rewriting ---------------------------------------------------------


class StringRewritingSystem:
    """Finite rules ``(u, v)`` applied anywhere: ``x u z -> x v z``."""

    def __init__(self, alphabet: Alphabet, rules: Iterable):
        self.alphabet = alphabet
        rs = []
        for u, v in rules:
            u, v = alphabet.check_word(u), alphabet.check_word(v)
            if u == v:
                raise RewritingError(f"rule {u!r} has equal sides")
            if not u:
                raise RewritingError("the empty word cannot be a left side")
            rs.append((u, v))
        self.rules = tuple(rs)
        by_last: dict = defaultdict(list)
        for u, v in self.rules:
            by_last[u[-1]].append((u, v))
        self._by_last = dict(by_last)

    def __repr__(self) -> str:
        return f"StringRewritingSystem({len(self.rules)} rules)"

    def __eq__(self, other) -> bool:
        if not isinstance(other, StringRewritingSystem):
            return NotImplemented
        return self.alphabet == other.alphabet and self.rules == other.rules

    __hash__ = None

    @property
    def bound(self) -> int:
        return max((max(len(u), len(v)) for u, v in self.rules), default=0)

    def reduce(self, w: Sequence, step_limit: int = DEFAULT_STEP_LIMIT) -> Word:
        """Normal form by rewriting the leftmost-ending occurrence first."""
        todo = list(reversed(self.alphabet.check_word(w)))
        out: list = []
        steps = 0
        while todo:
            out.append(todo.pop())
            for u, v in self._by_last.get(out[-1], ()):
                n = len(u)
                if n <= len(out) and tuple(out[-n:]) == u:
                    steps += 1
                    if steps > step_limit:
                        raise BudgetExhausted(f"no normal form within {step_limit} steps")
                    del out[-n:]
                    todo.extend(reversed(v))
                    break
        return tuple(out)

    def is_irreducible(self, w: Sequence) -> bool:
        w = tuple(w)
        return not any(
            w[i : i + len(u)] == u for u, _ in self.rules for i in range(len(w) - len(u) + 1)
        )

    def irreducible_language(self) -> Dfa:
        letters = self.alphabet.letters
        lhs = fa.finite_language(letters, [u for u, _ in self.rules])
        anywhere = fa.concat_all([fa.universal(letters), lhs, fa.universal(letters)])
        return fa.minimize(fa.complement(anywhere))


@dataclass(frozen=True)
class ConfluenceReport:
    critical_pairs: int
    failures: tuple  # (word, left, right, left_nf, right_nf)
    not_reducing: tuple  # rules with lhs not shortlex-greater than rhs

    @property
    def ok(self) -> bool:
        return not self.failures and not self.not_reducing

    def require(self) -> None:
        if self.not_reducing:
            u, v = self.not_reducing[0]
            raise RewritingError(f"rule {u!r} -> {v!r} does not decrease in shortlex order")
        if self.failures:
            word, left, right, ln, rn = self.failures[0]
            raise RewritingError(
                f"critical pair on {word!r} does not join: {left!r} ->* {ln!r}, {right!r} ->* {rn!r}"
            )


def critical_pairs(s: StringRewritingSystem) -> list:
    """Overlap and containment critical pairs as ``(word, left, right)``."""
    out = []
    rules = s.rules
    for i, (u1, v1) in enumerate(rules):
        for j, (u2, v2) in enumerate(rules):
            # proper overlaps: a suffix of u1 equals a prefix of u2
            for k in range(1, min(len(u1), len(u2))):
                if u1[-k:] == u2[:k]:
                    word = u1 + u2[k:]
                    out.append((word, v1 + u2[k:], u1[:-k] + v2))
            # containment: u2 occurs inside u1
            for p in range(len(u1) - len(u2) + 1):
                if i == j and p == 0:
                    continue
                if u1[p : p + len(u2)] == u2:
                    out.append((u1, v1, u1[:p] + v2 + u1[p + len(u2) :]))
    return out


def check_local_confluence(s: StringRewritingSystem, step_limit: int = 10**5) -> ConfluenceReport:
    key = s.alphabet.key
    bad_order = tuple((u, v) for u, v in s.rules if not key(v) < key(u))
    if bad_order:
        return ConfluenceReport(0, (), bad_order)
    pairs = critical_pairs(s)
    failures = []
    for word, left, right in pairs:
        ln, rn = s.reduce(left, step_limit), s.reduce(right, step_limit)
        if ln != rn:
            failures.append((word, left, right, ln, rn))
    return ConfluenceReport(len(pairs), tuple(failures), ())


def lift_srs(s: StringRewritingSystem) -> PrefixRewritingSystem:
    """The prefix-rewriting system ``{(w u, w v) : (u, v) in S, w in A*}``."""
    letters = s.alphabet.letters
    families = [(fa.universal(letters), u, v) for u, v in s.rules]
    return PrefixRewritingSystem(s.alphabet, families, bound=s.bound)
