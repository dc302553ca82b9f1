"""Deterministic asynchronous two-tape automata.

The machine reads ``u#`` and ``v#``; the kind of the current state says which
tape the next symbol comes from.  State kinds:

    Q1, Q2      read tape 1 / tape 2, neither tape finished
    Q1#, Q2#    read tape 1 / tape 2 after the *other* tape has finished
    qf          the unique accept state
    F           the unique absorbing failure state
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from autostack.core import END
from autostack.automata import dfa as fa
from autostack.automata.dfa import AutomatonError, Dfa, Nfa

KINDS = ("Q1", "Q1#", "Q2", "Q2#", "qf", "F")
FAIL = "F"


def tape_of(kind: str) -> int | None:
    if kind in ("Q1", "Q1#"):
        return 1
    if kind in ("Q2", "Q2#"):
        return 2
    return None


@dataclass(frozen=True)
class AsyncAutomaton:
    alphabet: tuple
    kinds: tuple
    delta: tuple  # delta[q][i] over alphabet + (END,)
    start: int
    names: tuple = field(default=(), compare=False)  # display only
    _sym: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if END in alphabet:
            raise AutomatonError("the end marker cannot be a letter")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "delta", tuple(tuple(r) for r in self.delta))
        names = tuple(self.names) or tuple(str(i) for i in range(len(self.kinds)))
        object.__setattr__(self, "names", names)
        sym = {x: i for i, x in enumerate(alphabet + (END,))}
        object.__setattr__(self, "_sym", sym)
        self._check_typing()

    @property
    def symbols(self) -> tuple:
        return self.alphabet + (END,)

    @property
    def n_states(self) -> int:
        return len(self.kinds)

    @property
    def accept(self) -> int:
        return self.kinds.index("qf")

    @property
    def fail(self) -> int:
        return self.kinds.index("F")

    def _check_typing(self) -> None:
        kinds = self.kinds
        n = len(kinds)
        for k in kinds:
            if k not in KINDS:
                raise AutomatonError(f"unknown state kind {k!r}")
        if kinds.count("qf") != 1 or kinds.count("F") != 1:
            raise AutomatonError("need exactly one qf state and one F state")
        if len(self.delta) != n:
            raise AutomatonError("transition table size mismatch")
        if kinds[self.start] not in ("Q1", "Q2"):
            raise AutomatonError("start state must read from a tape with neither tape finished")
        end = len(self.alphabet)
        for q, row in enumerate(self.delta):
            if len(row) != end + 1:
                raise AutomatonError(f"state {self.names[q]} needs {end + 1} transitions")
            k = kinds[q]
            for i, r in enumerate(row):
                if not 0 <= r < n:
                    raise AutomatonError("transition target out of range")
                kr = kinds[r]
                letter = i < end
                if k in ("Q1", "Q2") and letter:
                    ok = kr in ("Q1", "Q2", "F")
                elif (k == "Q2" and not letter) or (k == "Q1#" and letter):
                    ok = kr in ("Q1#", "F")
                elif (k == "Q1" and not letter) or (k == "Q2#" and letter):
                    ok = kr in ("Q2#", "F")
                elif k in ("Q1#", "Q2#") and not letter:
                    ok = kr in ("qf", "F")
                elif k == "F":
                    ok = kr == "F"
                else:
                    ok = True
                if not ok:
                    sym = self.symbols[i]
                    raise AutomatonError(
                        f"transition {self.names[q]} --{sym}--> {self.names[r]} "
                        f"violates the typing of {k} states"
                    )

    @classmethod
    def build(cls, alphabet: Sequence, states: dict, start, transitions: dict) -> "AsyncAutomaton":
        """Assemble from named states ``{name: kind}`` and ``{(name, symbol): name}``.

        Missing transitions go to the failure state, which is added if absent.
        """
        alphabet = tuple(alphabet)
        states = dict(states)
        fail = [s for s, k in states.items() if k == "F"]
        if not fail:
            states["F"] = "F"
            fail = ["F"]
        names = list(states)
        index = {s: i for i, s in enumerate(names)}
        symbols = alphabet + (END,)
        rows = [[index[fail[0]]] * len(symbols) for _ in names]
        sym = {x: i for i, x in enumerate(symbols)}
        for (p, x), r in transitions.items():
            rows[index[p]][sym[x]] = index[r]
        return cls(alphabet, tuple(states[s] for s in names), rows, index[start], tuple(names))

    def step(self, q: int, x) -> int:
        return self.delta[q][self._sym[x]]

    def run_word(self, word: Sequence, q: int | None = None) -> int:
        """Follow a symbol sequence through the state graph (no tape semantics)."""
        if q is None:
            q = self.start
        for x in word:
            q = self.delta[q][self._sym[x]]
        return q

    def kind(self, q: int) -> str:
        return self.kinds[q]

    def graph_live(self) -> frozenset:
        """States with a path to ``qf`` in the state graph."""
        back = [[] for _ in range(self.n_states)]
        for q, row in enumerate(self.delta):
            for r in row:
                back[r].append(q)
        target = self.accept
        seen = {target}
        todo = [target]
        while todo:
            r = todo.pop()
            for q in back[r]:
                if q not in seen:
                    seen.add(q)
                    todo.append(q)
        return frozenset(seen)

    def graph_reachable(self, q: int | None = None) -> frozenset:
        q = self.start if q is None else q
        seen = {q}
        todo = [q]
        while todo:
            p = todo.pop()
            for r in self.delta[p]:
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return frozenset(seen)

    def good_states(self) -> list:
        """Tape-reading states (Q1 ∪ Q2) reachable from start and co-reachable to qf."""
        reach = self.graph_reachable()
        live = self.graph_live()
        return [
            q
            for q in range(self.n_states)
            if self.kinds[q] in ("Q1", "Q2") and q in reach and q in live
        ]

    def shortest_path_word(self, q: int):
        """Shortlex-least symbol word labelling a path from ``q`` to ``qf``."""
        d = Dfa(self.symbols, self.delta, q, (self.accept,))
        return fa.shortest_word(d)

    def accepts(self, u: Sequence, v: Sequence) -> bool:
        return async_run(self, u, v)[1]


def async_run(m: AsyncAutomaton, u: Sequence, v: Sequence, state: int | None = None):
    """The shuffle of ``(u#, v#)`` from ``state`` and whether the pair is accepted.

    Returns ``(shuffle, accepted)``; ``shuffle`` has ``len(u) + len(v) + 2``
    symbols, each either a tape symbol or ``"F"`` once the run has failed.
    """
    q = m.start if state is None else state
    tapes = (tuple(u) + (END,), tuple(v) + (END,))
    for t in tapes:
        if END in t[:-1]:
            raise AutomatonError("the end marker cannot occur inside a tape word")
    pos = [0, 0]
    total = len(tapes[0]) + len(tapes[1])
    out = []
    failed = False
    for _ in range(total):
        if failed:
            out.append(FAIL)
            continue
        t = tape_of(m.kinds[q])
        if t is None or pos[t - 1] >= len(tapes[t - 1]):
            failed = True
            out.append(FAIL)
            continue
        x = tapes[t - 1][pos[t - 1]]
        pos[t - 1] += 1
        out.append(x)
        q = m.delta[q][m._sym[x]]
    accepted = not failed and q == m.accept
    return tuple(out), accepted


def shuffle_tapes(m: AsyncAutomaton, word: Sequence, state: int | None = None):
    """Split a path word from ``state`` into the symbols read from each tape.

    Returns ``(tape1, tape2, final_state)`` with end markers kept.
    """
    q = m.start if state is None else state
    tapes = ([], [])
    for x in word:
        t = tape_of(m.kinds[q])
        if t is None:
            raise AutomatonError("path continues past a final state")
        tapes[t - 1].append(x)
        q = m.step(q, x)
    return tuple(tapes[0]), tuple(tapes[1]), q


def shuffle_blocks(m: AsyncAutomaton, u: Sequence, v: Sequence) -> list:
    """Maximal same-tape runs ``[(tape, length), ...]`` of the accepted shuffle."""
    q = m.start
    shuffle, ok = async_run(m, u, v)
    if not ok:
        raise AutomatonError("pair is not accepted")
    blocks: list = []
    for x in shuffle:
        t = tape_of(m.kinds[q])
        if blocks and blocks[-1][0] == t:
            blocks[-1] = (t, blocks[-1][1] + 1)
        else:
            blocks.append((t, 1))
        q = m.step(q, x)
    return blocks


def block_bound(m: AsyncAutomaton, u: Sequence, v: Sequence) -> int:
    return max((n for _, n in shuffle_blocks(m, u, v)), default=0)


def _projection_nfa(m: AsyncAutomaton, max_total: int | None = None) -> Nfa:
    """NFA over the base alphabet reading tape 1; tape-2 reads become epsilon moves.

    With ``max_total`` set, states also count the base letters read from both
    tapes and runs exceeding the count die.
    """
    nfa = Nfa(m.alphabet)
    index: dict = {}
    end = len(m.alphabet)
    fail = m.fail

    def node(q, c):
        key = (q, c)
        if key not in index:
            index[key] = nfa.add_state(accept=(q == m.accept))
            todo.append(key)
        return index[key]

    todo: list = []
    nfa.starts.add(node(m.start, 0))
    while todo:
        q, c = todo.pop()
        p = index[(q, c)]
        t = tape_of(m.kinds[q])
        if t is None:
            continue
        row = m.delta[q]
        for i in range(end + 1):
            r = row[i]
            if r == fail:
                continue
            c2 = c + 1 if (i < end and max_total is not None) else c
            if max_total is not None and c2 > max_total:
                continue
            if t == 1 and i < end:
                nfa.add(p, m.alphabet[i], node(r, c2))
            else:
                nfa.add_eps(p, node(r, c2))
    return nfa


def async_project_first(m: AsyncAutomaton) -> Dfa:
    """DFA for ``{u : (u, v) accepted for some v}`` (Rabin-Scott determinization)."""
    return fa.minimize(_projection_nfa(m).determinize())


def project_first_bounded(m: AsyncAutomaton, max_total: int) -> Dfa:
    """``{u : (u, v) accepted, len(u) + len(v) <= max_total}``."""
    return fa.minimize(_projection_nfa(m, max_total).determinize())


def second_coordinates(m: AsyncAutomaton, u: Sequence, max_len: int) -> list:
    """Every ``v`` with ``len(v) <= max_len`` such that ``(u, v)`` is accepted.

    Depth-first over runs: tape-1 symbols are forced by ``u``, tape-2 symbols
    are guessed; branches entering states that cannot reach ``qf`` are cut.
    """
    live = m.graph_live()
    tape1 = tuple(u) + (END,)
    results = []
    symbols = m.symbols
    seen_dead = set()
    stack = [(m.start, 0, ())]
    while stack:
        q, i, v = stack.pop()
        key = (q, i, len(v))
        if key in seen_dead:
            continue
        k = m.kinds[q]
        if k == "qf":
            if i == len(tape1) and v and v[-1] == END:
                results.append(v[:-1])
            continue
        if q not in live:
            continue
        t = tape_of(k)
        if t == 1:
            if i >= len(tape1):
                continue
            stack.append((m.step(q, tape1[i]), i + 1, v))
        else:
            if v and v[-1] == END:
                continue
            for x in reversed(symbols):
                if x != END and len(v) >= max_len:
                    continue
                stack.append((m.step(q, x), i, v + (x,)))
    return sorted(set(results), key=lambda w: (len(w), w))


def k_automaton(m: AsyncAutomaton, q: int) -> AsyncAutomaton:
    """Acceptor of ``{(u, v) : the run on (u, v) uses all letters and stops in q}``.

    ``q`` must read a tape with neither tape finished.  All states of the
    original finished-tape kinds are dropped; a single fresh state waits for
    the end marker of the other tape.
    """
    kind = m.kinds[q]
    if kind not in ("Q1", "Q2"):
        raise AutomatonError("target state must be of kind Q1 or Q2")
    n = m.n_states
    end = len(m.alphabet)
    fail = m.fail
    wait = n  # the fresh state
    kinds = list(m.kinds)
    for p in range(n):
        if kinds[p] in ("Q1#", "Q2#"):
            kinds[p] = "F"
    kinds.append("Q2#" if kind == "Q1" else "Q1#")
    # collapse the demoted states onto the single failure state
    rows = []
    for p in range(n):
        if kinds[p] in ("Q1", "Q2"):
            row = [m.delta[p][i] if m.kinds[m.delta[p][i]] in ("Q1", "Q2") else fail for i in range(end)]
            row.append(wait if p == q else fail)
        elif p == m.accept:
            row = [fail] * (end + 1)
        else:
            row = [fail] * (end + 1)
        rows.append(row)
    rows.append([fail] * end + [m.accept])
    # merge every demoted state into the canonical fail state
    remap = {}
    for p in range(n):
        remap[p] = fail if (kinds[p] == "F") else p
    rows = [[remap.get(r, r) for r in row] for row in rows]
    keep = [p for p in range(n + 1) if p == wait or remap.get(p, p) == p]
    new = {p: i for i, p in enumerate(keep)}
    rows = [[new[r] for r in rows[p]] for p in keep]
    kinds = [kinds[p] for p in keep]
    names = [m.names[p] if p < n else f"wait[{m.names[q]}]" for p in keep]
    return AsyncAutomaton(m.alphabet, tuple(kinds), rows, new[m.start], tuple(names))


def _rebuild(m: AsyncAutomaton, keep: list, block: dict) -> AsyncAutomaton:
    """Quotient by ``block`` (state -> block id), renumbered in BFS order from start."""
    reps: dict = {}
    for q in keep:
        reps.setdefault(block[q], q)
    order = [block[m.start]]
    seen = {order[0]}
    i = 0
    while i < len(order):
        b = order[i]
        i += 1
        for r in m.delta[reps[b]]:
            if block[r] not in seen:
                seen.add(block[r])
                order.append(block[r])
    for b in sorted(reps):  # qf/F may be unreachable but must exist
        if b not in seen:
            seen.add(b)
            order.append(b)
    new = {b: i for i, b in enumerate(order)}
    kinds = [m.kinds[reps[b]] for b in order]
    rows = [[new[block[r]] for r in m.delta[reps[b]]] for b in order]
    names = [m.names[reps[b]] for b in order]
    return AsyncAutomaton(m.alphabet, tuple(kinds), rows, 0, tuple(names))


def minimize_async(m: AsyncAutomaton) -> AsyncAutomaton:
    """Smallest equivalent machine obtained by merging states of the same kind.

    Transitions into states that cannot reach ``qf`` are sent to ``F`` first;
    the accepted pairs do not change.
    """
    live = m.graph_live()
    fail = m.fail
    rows = [[r if r in live else fail for r in row] for row in m.delta]
    rows[fail] = [fail] * len(m.symbols)
    m = AsyncAutomaton(m.alphabet, m.kinds, rows, m.start, m.names)
    reach = set(m.graph_reachable()) | {m.accept, fail}
    keep = sorted(reach)
    block = {q: KINDS.index(m.kinds[q]) for q in keep}
    while True:
        sig = {q: (block[q],) + tuple(block[r] for r in m.delta[q]) for q in keep}
        ids: dict = {}
        nxt = {q: ids.setdefault(sig[q], len(ids)) for q in keep}
        if len(ids) == len(set(block.values())):
            break
        block = nxt
    return _rebuild(m, keep, block)


def sync_to_async(rel) -> AsyncAutomaton:
    """Asynchronous machine accepting the same pairs as a binary synchronous relation.

    The machine alternates between the tapes one letter at a time, so every
    block of its shuffles has length one until a tape runs out.
    """
    from autostack.core import PAD

    if rel.arity != 2:
        raise AutomatonError("only binary relations can be read by a two-tape machine")
    d = rel.dfa
    base = rel.base
    live = d.live_states()
    states: dict = {"qf": "qf", "F": "F"}
    trans: dict = {}

    def name(tag, s, x=None):
        return (tag, s) if x is None else (tag, s, x)

    todo = [name("1", d.start)]
    states[todo[0]] = "Q1"
    kinds = {"1": "Q1", "2": "Q2", "1#": "Q1#", "2#": "Q2#"}

    def target(tag, s, x=None):
        if s not in live:
            return "F"
        n = name(tag, s, x)
        if n not in states:
            states[n] = kinds[tag]
            todo.append(n)
        return n

    def finish(s):
        return "qf" if s in d.accepts else "F"

    while todo:
        n = todo.pop()
        tag, s = n[0], n[1]
        if tag == "1":
            for x in base:
                trans[(n, x)] = target("2", s, x)
            trans[(n, END)] = target("2#", s)
        elif tag == "2":
            x = n[2]
            for y in base:
                trans[(n, y)] = target("1", d.step(s, (x, y)))
            trans[(n, END)] = target("1#", d.step(s, (x, PAD)))
        elif tag == "1#":
            for x in base:
                trans[(n, x)] = target("1#", d.step(s, (x, PAD)))
            trans[(n, END)] = finish(s)
        else:
            for y in base:
                trans[(n, y)] = target("2#", d.step(s, (PAD, y)))
            trans[(n, END)] = finish(s)
    order = sorted((n for n in states if isinstance(n, tuple)), key=repr)
    named = {n: "s%d" % i for i, n in enumerate(order)}
    named["qf"], named["F"] = "qf", "F"
    m = AsyncAutomaton.build(
        base,
        {named[n]: k for n, k in states.items()},
        named[name("1", d.start)],
        {(named[p], x): named[r] for (p, x), r in trans.items()},
    )
    return minimize_async(m)
