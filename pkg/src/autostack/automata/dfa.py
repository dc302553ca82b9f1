"""Complete deterministic finite automata and the regular-language toolkit.

A :class:`Dfa` is immutable: states are ``0..n-1``, ``delta[q][i]`` is the
successor of ``q`` on ``alphabet[i]``.  Symbols are any hashable values
(strings for plain letters, tuples for padded symbols).  Enumeration and
canonical numbering follow the order of ``alphabet``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True)
class Dfa:
    alphabet: tuple
    delta: tuple
    start: int
    accepts: frozenset
    _sym: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        delta = tuple(tuple(row) for row in self.delta)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "accepts", frozenset(self.accepts))
        sym = {x: i for i, x in enumerate(alphabet)}
        if len(sym) != len(alphabet):
            raise AutomatonError("duplicate symbol in alphabet")
        n = len(delta)
        if n == 0:
            raise AutomatonError("a DFA needs at least one state")
        if not 0 <= self.start < n:
            raise AutomatonError(f"start state {self.start} out of range")
        for q, row in enumerate(delta):
            if len(row) != len(alphabet):
                raise AutomatonError(f"state {q} has {len(row)} transitions, expected {len(alphabet)}")
            for r in row:
                if not 0 <= r < n:
                    raise AutomatonError(f"transition target {r} out of range")
        for q in self.accepts:
            if not 0 <= q < n:
                raise AutomatonError(f"accept state {q} out of range")
        object.__setattr__(self, "_sym", sym)

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def symbol_index(self, x) -> int:
        try:
            return self._sym[x]
        except KeyError:
            raise AutomatonError(f"symbol {x!r} not in alphabet") from None

    def step(self, q: int, x) -> int:
        return self.delta[q][self.symbol_index(x)]

    def run(self, word: Iterable, q: int | None = None) -> int:
        if q is None:
            q = self.start
        delta, sym = self.delta, self._sym
        for x in word:
            i = sym.get(x)
            if i is None:
                raise AutomatonError(f"symbol {x!r} not in alphabet")
            q = delta[q][i]
        return q

    def accepts_word(self, word: Iterable) -> bool:
        return self.run(word) in self.accepts

    __contains__ = accepts_word

    def live_states(self) -> frozenset:
        """States from which some accept state is reachable."""
        back = [[] for _ in range(self.n_states)]
        for q, row in enumerate(self.delta):
            for r in row:
                back[r].append(q)
        seen = set(self.accepts)
        todo = list(seen)
        while todo:
            r = todo.pop()
            for q in back[r]:
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def reachable_states(self) -> list:
        seen = {self.start}
        order = [self.start]
        i = 0
        while i < len(order):
            for r in self.delta[order[i]]:
                if r not in seen:
                    seen.add(r)
                    order.append(r)
            i += 1
        return order

    def to_dot(self, name: str = "dfa") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for q in range(self.n_states):
            shape = "doublecircle" if q in self.accepts else "circle"
            lines.append(f'  {q} [shape={shape}];')
        lines.append(f"  start [shape=point]; start -> {self.start};")
        for q, row in enumerate(self.delta):
            for i, r in enumerate(row):
                lines.append(f'  {q} -> {r} [label="{symbol_text(self.alphabet[i])}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def symbol_text(x) -> str:
    if isinstance(x, tuple):
        return "(" + ",".join("_" if c == "$" else str(c) for c in x) + ")"
    return str(x)


# --- construction -----------------------------------------------------------


def from_partial(alphabet: Sequence, transitions: dict, start, accepts: Iterable) -> Dfa:
    """Build a complete DFA from ``{(state, symbol): state}`` over arbitrary
    hashable state names; missing transitions go to a fresh dead state."""
    names: dict = {}

    def num(s):
        if s not in names:
            names[s] = len(names)
        return names[s]

    num(start)
    for (p, _), r in transitions.items():
        num(p)
        num(r)
    acc = [num(s) for s in accepts]
    n = len(names)
    sym = {x: i for i, x in enumerate(alphabet)}
    rows = [[None] * len(alphabet) for _ in range(n)]
    for (p, x), r in transitions.items():
        if x not in sym:
            raise AutomatonError(f"symbol {x!r} not in alphabet")
        rows[names[p]][sym[x]] = names[r]
    dead = None
    for row in rows:
        for i, r in enumerate(row):
            if r is None:
                if dead is None:
                    dead = len(rows)
                row[i] = dead
    if dead is not None:
        rows.append([dead] * len(alphabet))
    return Dfa(tuple(alphabet), rows, names[start], acc)


def empty(alphabet: Sequence) -> Dfa:
    return Dfa(tuple(alphabet), [[0] * len(alphabet)], 0, ())


def universal(alphabet: Sequence) -> Dfa:
    return Dfa(tuple(alphabet), [[0] * len(alphabet)], 0, (0,))


def words_over(alphabet: Sequence, letters: Iterable) -> Dfa:
    """``letters*`` as a language over the (possibly larger) ``alphabet``."""
    keep = set(letters)
    row = [0 if x in keep else 1 for x in alphabet]
    return Dfa(tuple(alphabet), [row, [1] * len(alphabet)], 0, (0,))


def finite_language(alphabet: Sequence, words: Iterable) -> Dfa:
    """Trie automaton for a finite set of words."""
    trans: dict = {}
    accept = set()
    count = 1
    for w in words:
        q = 0
        for x in w:
            r = trans.get((q, x))
            if r is None:
                r = count
                count += 1
                trans[(q, x)] = r
            q = r
        accept.add(q)
    return from_partial(alphabet, trans, 0, accept)


def singleton(alphabet: Sequence, word: Sequence) -> Dfa:
    return finite_language(alphabet, [tuple(word)])


def length_at_most(alphabet: Sequence, n: int) -> Dfa:
    rows = [[min(q + 1, n + 1)] * len(alphabet) for q in range(n + 2)]
    return Dfa(tuple(alphabet), rows, 0, range(n + 1))


def suffix_language(alphabet: Sequence, suffix: Sequence) -> Dfa:
    """``alphabet* · suffix``."""
    return concat(universal(alphabet), singleton(alphabet, suffix))


def extend_alphabet(d: Dfa, alphabet: Sequence) -> Dfa:
    """Same language viewed over a superset alphabet (new symbols go to a dead state)."""
    alphabet = tuple(alphabet)
    missing = [x for x in d.alphabet if x not in set(alphabet)]
    if missing:
        raise AutomatonError(f"new alphabet lacks {missing!r}")
    dead = d.n_states
    rows = []
    for q in range(d.n_states):
        rows.append([d.delta[q][d._sym[x]] if x in d._sym else dead for x in alphabet])
    rows.append([dead] * len(alphabet))
    return trim(Dfa(alphabet, rows, d.start, d.accepts))


# --- boolean operations -------------------------------------------------------


def _same_alphabet(d1: Dfa, d2: Dfa) -> None:
    if d1.alphabet != d2.alphabet:
        raise AutomatonError("alphabet mismatch")


def product(d1: Dfa, d2: Dfa, op: Callable[[bool, bool], bool]) -> Dfa:
    _same_alphabet(d1, d2)
    k = len(d1.alphabet)
    index = {(d1.start, d2.start): 0}
    pairs = [(d1.start, d2.start)]
    rows = []
    i = 0
    while i < len(pairs):
        p, q = pairs[i]
        rp, rq = d1.delta[p], d2.delta[q]
        row = []
        for j in range(k):
            key = (rp[j], rq[j])
            r = index.get(key)
            if r is None:
                r = index[key] = len(pairs)
                pairs.append(key)
            row.append(r)
        rows.append(row)
        i += 1
    acc = [n for n, (p, q) in enumerate(pairs) if op(p in d1.accepts, q in d2.accepts)]
    return Dfa(d1.alphabet, rows, 0, acc)


def intersection(d1: Dfa, d2: Dfa) -> Dfa:
    return product(d1, d2, lambda a, b: a and b)


def union(d1: Dfa, d2: Dfa) -> Dfa:
    return product(d1, d2, lambda a, b: a or b)


def difference(d1: Dfa, d2: Dfa) -> Dfa:
    return product(d1, d2, lambda a, b: a and not b)


def symmetric_difference(d1: Dfa, d2: Dfa) -> Dfa:
    return product(d1, d2, lambda a, b: a != b)


def complement(d: Dfa) -> Dfa:
    return Dfa(d.alphabet, d.delta, d.start, set(range(d.n_states)) - d.accepts)


def union_all(dfas: Sequence[Dfa], alphabet: Sequence | None = None) -> Dfa:
    dfas = list(dfas)
    if not dfas:
        if alphabet is None:
            raise AutomatonError("empty union needs an alphabet")
        return empty(alphabet)
    if len(dfas) == 1:
        return dfas[0]
    nfa = Nfa(dfas[0].alphabet)
    starts = [nfa.add_dfa(d) for d in dfas]
    for s in starts:
        nfa.starts.add(s)
    return minimize(nfa.determinize())


def intersection_all(dfas: Sequence[Dfa]) -> Dfa:
    dfas = list(dfas)
    out = dfas[0]
    for d in dfas[1:]:
        out = minimize(intersection(out, d))
    return out


def is_empty(d: Dfa) -> bool:
    return d.start not in d.live_states()


def is_universal(d: Dfa) -> bool:
    return is_empty(complement(d))


def equivalent(d1: Dfa, d2: Dfa) -> bool:
    return canonical(d1) == canonical(d2)


def is_subset(d1: Dfa, d2: Dfa) -> bool:
    return is_empty(difference(d1, d2))


# --- nondeterministic automata -----------------------------------------------


class Nfa:
    """Mutable epsilon-NFA used only as an intermediate for determinization."""

    def __init__(self, alphabet: Sequence):
        self.alphabet = tuple(alphabet)
        self.trans: list = []  # state -> {symbol: set(states)}
        self.eps: list = []
        self.starts: set = set()
        self.accepts: set = set()

    def add_state(self, accept: bool = False) -> int:
        self.trans.append({})
        self.eps.append(set())
        q = len(self.trans) - 1
        if accept:
            self.accepts.add(q)
        return q

    def add(self, p: int, x, q: int) -> None:
        self.trans[p].setdefault(x, set()).add(q)

    def add_eps(self, p: int, q: int) -> None:
        self.eps[p].add(q)

    def add_dfa(self, d: Dfa, prune: bool = True) -> int:
        """Copy ``d`` in (dead states dropped) and return the copy of its start."""
        if d.alphabet != self.alphabet:
            raise AutomatonError("alphabet mismatch")
        live = d.live_states() if prune else frozenset(range(d.n_states))
        base = len(self.trans)
        for q in range(d.n_states):
            self.add_state(q in d.accepts)
        for q in live:
            for i, r in enumerate(d.delta[q]):
                if r in live:
                    self.add(base + q, d.alphabet[i], base + r)
        return base + d.start

    def closure(self, states: Iterable[int]) -> frozenset:
        seen = set(states)
        todo = list(seen)
        while todo:
            p = todo.pop()
            for q in self.eps[p]:
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def determinize(self) -> Dfa:
        """Subset construction, reachable subsets only."""
        start = self.closure(self.starts)
        index = {start: 0}
        subsets = [start]
        rows = []
        i = 0
        while i < len(subsets):
            cur = subsets[i]
            row = []
            for x in self.alphabet:
                nxt = set()
                for p in cur:
                    nxt.update(self.trans[p].get(x, ()))
                key = self.closure(nxt) if nxt else frozenset()
                r = index.get(key)
                if r is None:
                    r = index[key] = len(subsets)
                    subsets.append(key)
                row.append(r)
            rows.append(row)
            i += 1
        acc = [n for n, s in enumerate(subsets) if s & self.accepts]
        return Dfa(self.alphabet, rows, 0, acc)


def concat(d1: Dfa, d2: Dfa) -> Dfa:
    _same_alphabet(d1, d2)
    nfa = Nfa(d1.alphabet)
    s1 = nfa.add_dfa(d1)
    base1 = s1 - d1.start
    s2 = nfa.add_dfa(d2)
    for q in d1.accepts:
        nfa.accepts.discard(base1 + q)
        nfa.add_eps(base1 + q, s2)
    nfa.starts.add(s1)
    return minimize(nfa.determinize())


def concat_all(dfas: Sequence[Dfa]) -> Dfa:
    out = dfas[0]
    for d in dfas[1:]:
        out = concat(out, d)
    return out


def star(d: Dfa) -> Dfa:
    nfa = Nfa(d.alphabet)
    hub = nfa.add_state(accept=True)
    s = nfa.add_dfa(d)
    base = s - d.start
    nfa.add_eps(hub, s)
    for q in d.accepts:
        nfa.add_eps(base + q, hub)
    nfa.starts.add(hub)
    return minimize(nfa.determinize())


# --- homomorphisms and quotients ---------------------------------------------


def hom_preimage(d: Dfa, h: Callable | dict, source_alphabet: Sequence) -> Dfa:
    """``{w over source : h(w) in L(d)}`` by relabelling: delta'(q, x) = delta(q, h(x))."""
    hf = h.get if isinstance(h, dict) else h
    source_alphabet = tuple(source_alphabet)
    images = [tuple(hf(x)) for x in source_alphabet]
    rows = [[d.run(img, q) for img in images] for q in range(d.n_states)]
    return Dfa(source_alphabet, rows, d.start, d.accepts)


def hom_image(d: Dfa, h: Callable | dict, target_alphabet: Sequence) -> Dfa:
    """``{h(w) : w in L(d)}`` via NFA substitution then subset construction."""
    hf = h.get if isinstance(h, dict) else h
    nfa = Nfa(target_alphabet)
    live = d.live_states()
    for q in range(d.n_states):
        nfa.add_state(q in d.accepts)
    nfa.starts.add(d.start)
    for q in live:
        for i, r in enumerate(d.delta[q]):
            if r not in live:
                continue
            img = tuple(hf(d.alphabet[i]))
            if not img:
                nfa.add_eps(q, r)
                continue
            p = q
            for j, y in enumerate(img):
                nxt = r if j == len(img) - 1 else nfa.add_state()
                nfa.add(p, y, nxt)
                p = nxt
    return minimize(nfa.determinize())


def quotient_by_word(d: Dfa, w: Sequence) -> Dfa:
    """``L/w = {x : xw in L}``: same machine, accept states pulled back along ``w``."""
    acc = [q for q in range(d.n_states) if d.run(w, q) in d.accepts]
    return Dfa(d.alphabet, d.delta, d.start, acc)


def prefixes(d: Dfa) -> Dfa:
    live = d.live_states()
    return Dfa(d.alphabet, d.delta, d.start, live)


def is_prefix_closed(d: Dfa) -> bool:
    """Every prefix of an accepted word is accepted."""
    m = trim(d)
    live = m.live_states()
    for q in m.reachable_states():
        if q in live and q not in m.accepts:
            return False
    return True


# --- minimization ------------------------------------------------------------


def trim(d: Dfa) -> Dfa:
    """Restrict to reachable states (numbered in BFS order)."""
    order = d.reachable_states()
    if len(order) == d.n_states and order == list(range(d.n_states)):
        return d
    new = {q: i for i, q in enumerate(order)}
    rows = [[new[r] for r in d.delta[q]] for q in order]
    return Dfa(d.alphabet, rows, 0, [new[q] for q in order if q in d.accepts])


def minimize(d: Dfa) -> Dfa:
    """Hopcroft partition refinement on the reachable part, then canonical numbering."""
    d = trim(d)
    n, k = d.n_states, len(d.alphabet)
    acc = set(d.accepts)
    rej = set(range(n)) - acc
    blocks = [b for b in (acc, rej) if b]
    if len(blocks) == 1:
        return _renumber(d, [0] * n)
    inverse = [[[] for _ in range(n)] for _ in range(k)]
    for q in range(n):
        for i, r in enumerate(d.delta[q]):
            inverse[i][r].append(q)
    block_of = [0] * n
    for b_id, b in enumerate(blocks):
        for q in b:
            block_of[q] = b_id
    work = {min(range(2), key=lambda i: len(blocks[i]))}
    while work:
        splitter_id = work.pop()
        splitter = list(blocks[splitter_id])
        for i in range(k):
            pre = set()
            inv_i = inverse[i]
            for r in splitter:
                pre.update(inv_i[r])
            if not pre:
                continue
            touched: dict = {}
            for q in pre:
                touched.setdefault(block_of[q], set()).add(q)
            for b_id, inside in touched.items():
                block = blocks[b_id]
                if len(inside) == len(block):
                    continue
                outside = block - inside
                blocks[b_id] = inside
                new_id = len(blocks)
                blocks.append(outside)
                for q in outside:
                    block_of[q] = new_id
                if b_id in work:
                    work.add(new_id)
                else:
                    work.add(b_id if len(inside) <= len(outside) else new_id)
    return _renumber(d, block_of)


def _renumber(d: Dfa, block_of: list) -> Dfa:
    """Quotient by ``block_of`` and number blocks by BFS from start in symbol order."""
    order = {block_of[d.start]: 0}
    queue = deque([d.start])
    rep = {block_of[d.start]: d.start}
    rows = []
    while queue:
        q = queue.popleft()
        row = []
        for r in d.delta[q]:
            b = block_of[r]
            if b not in order:
                order[b] = len(order)
                rep[b] = r
                queue.append(r)
            row.append(order[b])
        rows.append(row)
    acc = [order[block_of[q]] for q in d.accepts if block_of[q] in order]
    return Dfa(d.alphabet, rows, 0, acc)


def canonical(d: Dfa) -> tuple:
    m = minimize(d)
    return (m.alphabet, m.delta, tuple(sorted(m.accepts)))


# --- enumeration ---------------------------------------------------------------


def enumerate_words(d: Dfa, max_len: int) -> list:
    """Accepted words of length <= max_len, length-then-lexicographic by symbol order."""
    if max_len < 0:
        return []
    live = d.live_states()
    out = []
    level = [((), d.start)] if d.start in live else []
    for length in range(max_len + 1):
        out.extend(w for w, q in level if q in d.accepts)
        if length == max_len:
            break
        nxt = []
        for w, q in level:
            row = d.delta[q]
            for i, x in enumerate(d.alphabet):
                r = row[i]
                if r in live:
                    nxt.append((w + (x,), r))
        level = nxt
    return out


def count_words(d: Dfa, length: int) -> int:
    counts = [0] * d.n_states
    counts[d.start] = 1
    for _ in range(length):
        nxt = [0] * d.n_states
        for q, c in enumerate(counts):
            if c:
                for r in d.delta[q]:
                    nxt[r] += c
        counts = nxt
    return sum(counts[q] for q in d.accepts)


def is_finite(d: Dfa) -> bool:
    """No cycle through a live reachable state."""
    m = trim(d)
    live = m.live_states()
    color = {}

    def visit(q):
        color[q] = 1
        for r in m.delta[q]:
            if r not in live:
                continue
            c = color.get(r)
            if c == 1:
                return False
            if c is None and not visit(r):
                return False
        color[q] = 2
        return True

    import sys

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * m.n_states + 100))
    try:
        return m.start not in live or visit(m.start)
    finally:
        sys.setrecursionlimit(limit)


def shortest_word(d: Dfa):
    """Shortlex-least accepted word, or None."""
    if d.start in d.accepts:
        return ()
    prev = {d.start: None}
    queue = deque([d.start])
    while queue:
        q = queue.popleft()
        for i, r in enumerate(d.delta[q]):
            if r not in prev:
                prev[r] = (q, d.alphabet[i])
                if r in d.accepts:
                    out = []
                    while prev[r] is not None:
                        r, x = prev[r]
                        out.append(x)
                    return tuple(reversed(out))
                queue.append(r)
    return None


def relabel(d: Dfa, mapping: Callable[[Hashable], Hashable]) -> Dfa:
    """Rename symbols one-to-one."""
    return Dfa(tuple(mapping(x) for x in d.alphabet), d.delta, d.start, d.accepts)
