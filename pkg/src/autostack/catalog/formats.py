"""Text formats for alphabets, rules, automata, relations and structures.

The grammar is line oriented.  Blank lines and lines starting with ``#`` are
ignored.  Words are written with letters separated by spaces (or run together
when every letter is one character); ``1`` is the empty word.  Inside
automaton blocks a padded symbol is written ``(x,y)`` with ``_`` for the pad,
and the end marker of two-tape machines is written ``\\eot``.

Blocks::

    DFA                       RELATION <arity>          ASYNC
    alphabet a A b B          base a A b B              alphabet a A b B
    states 3                  states 2                  states 4
    start 0                   start 0                   start 0
    accept 0 1                accept 1                  kinds Q1 Q2 qf F
    0 a 1                     0 (a,_) 1                 0 a 1
    ...                       ...                       0 \\eot 3
    END                       END                       END

Documents combine a header line, ``LETTERS:``/``INV:`` lines and blocks.
Serialization is canonical: transitions are listed by state and then by
symbol order, so equal objects give identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from autostack.automata.asynchronous import AsyncAutomaton
from autostack.automata.dfa import AutomatonError, Dfa
from autostack.automata.padded import SyncRelation, padded_symbols
from autostack.core import END, PAD, Alphabet, AlphabetError, Presentation, Word
from autostack.rewriting import PrefixRewritingSystem, RewritingError, StringRewritingSystem

EOT = "\\eot"
PAD_TEXT = "_"
KIND_TEXT = {"Q1": "Q1", "Q1#": "Q1eot", "Q2": "Q2", "Q2#": "Q2eot", "qf": "accept", "F": "fail"}
TEXT_KIND = {v: k for k, v in KIND_TEXT.items()}


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        self.message = message
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


class Lines:
    """Cursor over the significant lines of a text."""

    def __init__(self, text: str):
        self.items = []
        for n, raw in enumerate(text.splitlines(), 1):
            s = raw.strip()
            if not s or s.startswith("#"):
                continue
            self.items.append((n, raw))
        self.pos = 0

    def at_end(self) -> bool:
        return self.pos >= len(self.items)

    def peek(self) -> str | None:
        return None if self.at_end() else self.items[self.pos][1].strip()

    def next(self) -> tuple:
        if self.at_end():
            last = self.items[-1][0] if self.items else 0
            raise ParseError("unexpected end of input", last + 1, 1)
        n, raw = self.items[self.pos]
        self.pos += 1
        return n, raw

    def error(self, message: str, token: str | None = None) -> ParseError:
        n, raw = self.items[min(self.pos, len(self.items)) - 1] if self.items else (0, "")
        col = raw.find(token) + 1 if token and token in raw else len(raw) - len(raw.lstrip()) + 1
        return ParseError(message, n, col)

    def keyword(self, key: str) -> list:
        """Consume a line ``key rest...`` and return the tokens after ``key``."""
        n, raw = self.next()
        tokens = raw.split()
        if not tokens or tokens[0].rstrip(":") != key.rstrip(":"):
            raise self.error(f"expected {key!r}", tokens[0] if tokens else None)
        return tokens[1:]

    def optional(self, key: str) -> list | None:
        line = self.peek()
        if line is None:
            return None
        head = line.split()[0]
        if head.rstrip(":") == key.rstrip(":"):
            return self.keyword(key)
        return None

    def int_keyword(self, key: str) -> int:
        rest = self.keyword(key)
        if len(rest) != 1 or not rest[0].isdigit():
            raise self.error(f"{key} takes one non-negative integer", rest[0] if rest else None)
        return int(rest[0])


# -- symbols -------------------------------------------------------------------


def symbol_to_text(x) -> str:
    if x == END:
        return EOT
    if isinstance(x, tuple):
        return "(" + ",".join(PAD_TEXT if c == PAD else c for c in x) + ")"
    return x


def text_to_symbol(tok: str):
    if tok == EOT:
        return END
    if tok.startswith("(") and tok.endswith(")"):
        return tuple(PAD if c == PAD_TEXT else c for c in tok[1:-1].split(","))
    return tok


def word_text(alphabet: Alphabet, w: Sequence) -> str:
    return alphabet.format(w, " ")


def parse_word(lines: Lines, alphabet: Alphabet, text: str) -> Word:
    try:
        return alphabet.parse(text)
    except AlphabetError as e:
        raise lines.error(str(e), text.strip().split()[0] if text.strip() else None) from None


# -- alphabets -----------------------------------------------------------------


def read_alphabet(lines: Lines) -> Alphabet:
    letters = lines.keyword("LETTERS:")
    for x in letters:
        if any(c in x for c in "$#") or x == PAD_TEXT:
            raise lines.error(f"letter {x!r} uses a reserved symbol", x)
    pairs = []
    while True:
        rest = lines.optional("INV:")
        if rest is None:
            break
        if len(rest) % 2:
            raise lines.error("INV takes pairs of letters")
        pairs += [(rest[i], rest[i + 1]) for i in range(0, len(rest), 2)]
    try:
        return Alphabet.from_pairs(letters, pairs)
    except AlphabetError as e:
        raise lines.error(str(e)) from None


def write_alphabet(alphabet: Alphabet) -> list:
    out = ["LETTERS: " + " ".join(alphabet.letters)]
    for x, y in alphabet.inverse_pairs():
        out.append(f"INV: {x} {y}")
    return out


# -- automata ------------------------------------------------------------------


def _read_table(lines: Lines, symbols: tuple, n: int) -> list:
    sym_index = {s: i for i, s in enumerate(symbols)}
    rows = [[None] * len(symbols) for _ in range(n)]
    while True:
        line = lines.peek()
        if line is None:
            raise lines.error("missing END")
        if line == "END":
            lines.next()
            break
        _, raw = lines.next()
        tokens = raw.split()
        if len(tokens) != 3:
            raise lines.error("transition lines have the form 'state symbol state'")
        p, x, q = tokens
        if not p.isdigit() or not q.isdigit() or int(p) >= n or int(q) >= n:
            raise lines.error("state out of range", p if not p.isdigit() or int(p) >= n else q)
        sym = text_to_symbol(x)
        if sym not in sym_index:
            raise lines.error(f"unknown symbol {x!r}", x)
        if rows[int(p)][sym_index[sym]] is not None:
            raise lines.error(f"duplicate transition from {p} on {x}", x)
        rows[int(p)][sym_index[sym]] = int(q)
    for p in range(n):
        for i, r in enumerate(rows[p]):
            if r is None:
                raise lines.error(f"missing transition for state {p} on {symbol_to_text(symbols[i])}")
    return rows


def _read_states(lines: Lines) -> tuple:
    n = lines.int_keyword("states")
    if n < 1:
        raise lines.error("an automaton needs at least one state")
    start = lines.int_keyword("start")
    if start >= n:
        raise lines.error("start state out of range")
    return n, start


def _read_accept(lines: Lines, n: int) -> list:
    rest = lines.keyword("accept")
    if not all(t.isdigit() and int(t) < n for t in rest):
        raise lines.error("accept lists states by number")
    return [int(t) for t in rest]


def _check_symbol_text(lines: Lines, symbols) -> None:
    for s in symbols:
        if s in ("$", "#", PAD_TEXT, EOT) or "(" in s or "," in s:
            raise lines.error(f"symbol {s!r} is reserved", s)


def read_dfa_block(lines: Lines, alphabet: Sequence | None = None) -> Dfa:
    lines.keyword("DFA")
    symbols = tuple(text_to_symbol(t) for t in lines.keyword("alphabet"))
    if alphabet is not None and symbols != tuple(alphabet):
        raise lines.error("automaton alphabet differs from the declared letters")
    n, start = _read_states(lines)
    accept = _read_accept(lines, n)
    rows = _read_table(lines, symbols, n)
    try:
        return Dfa(symbols, rows, start, accept)
    except AutomatonError as e:
        raise lines.error(str(e)) from None


def write_dfa_block(d: Dfa) -> list:
    out = ["DFA", "alphabet " + " ".join(symbol_to_text(x) for x in d.alphabet)]
    out += [f"states {d.n_states}", f"start {d.start}"]
    out.append(("accept " + " ".join(str(q) for q in sorted(d.accepts))).rstrip())
    for p in range(d.n_states):
        for x, q in zip(d.alphabet, d.delta[p]):
            out.append(f"{p} {symbol_to_text(x)} {q}")
    out.append("END")
    return out


def read_relation_block(lines: Lines) -> SyncRelation:
    rest = lines.keyword("RELATION")
    if len(rest) != 1 or not rest[0].isdigit() or int(rest[0]) < 1:
        raise lines.error("RELATION takes the arity")
    arity = int(rest[0])
    base = tuple(lines.keyword("base"))
    _check_symbol_text(lines, base)
    symbols = padded_symbols(base, arity)
    n, start = _read_states(lines)
    accept = _read_accept(lines, n)
    rows = _read_table(lines, symbols, n)
    for row in rows:
        pass
    try:
        return SyncRelation(base, arity, Dfa(symbols, rows, start, accept))
    except AutomatonError as e:
        raise lines.error(str(e)) from None


def write_relation_block(r: SyncRelation) -> list:
    d = r.dfa
    out = [f"RELATION {r.arity}", "base " + " ".join(r.base)]
    out += [f"states {d.n_states}", f"start {d.start}"]
    out.append(("accept " + " ".join(str(q) for q in sorted(d.accepts))).rstrip())
    for p in range(d.n_states):
        for x, q in zip(d.alphabet, d.delta[p]):
            out.append(f"{p} {symbol_to_text(x)} {q}")
    out.append("END")
    return out


def read_async_block(lines: Lines) -> AsyncAutomaton:
    lines.keyword("ASYNC")
    alphabet = tuple(lines.keyword("alphabet"))
    _check_symbol_text(lines, alphabet)
    n, start = _read_states(lines)
    kinds_text = lines.keyword("kinds")
    if len(kinds_text) != n:
        raise lines.error(f"kinds lists {len(kinds_text)} states, expected {n}")
    kinds = []
    for k in kinds_text:
        if k not in TEXT_KIND:
            raise lines.error(f"unknown state kind {k!r}", k)
        kinds.append(TEXT_KIND[k])
    rows = _read_table(lines, alphabet + (END,), n)
    try:
        return AsyncAutomaton(alphabet, tuple(kinds), rows, start)
    except AutomatonError as e:
        raise lines.error(str(e)) from None


def write_async_block(m: AsyncAutomaton) -> list:
    out = ["ASYNC", "alphabet " + " ".join(m.alphabet)]
    out += [f"states {m.n_states}", f"start {m.start}"]
    out.append("kinds " + " ".join(KIND_TEXT[k] for k in m.kinds))
    for p in range(m.n_states):
        for x, q in zip(m.symbols, m.delta[p]):
            out.append(f"{p} {symbol_to_text(x)} {q}")
    out.append("END")
    return out


# -- documents -------------------------------------------------------------------


@dataclass
class RulesFile:
    alphabet: Alphabet
    rules: tuple
    kind: str = "string"  # or "prefix"
    base: tuple | None = None

    def string_system(self) -> StringRewritingSystem:
        return StringRewritingSystem(self.alphabet, self.rules)

    def prefix_system(self) -> PrefixRewritingSystem:
        return PrefixRewritingSystem.from_rules(self.alphabet, self.rules, base=self.base)


def _text(text_or_lines) -> Lines:
    return text_or_lines if isinstance(text_or_lines, Lines) else Lines(text_or_lines)


def read_rules(text: str) -> RulesFile:
    lines = Lines(text)
    alphabet = read_alphabet(lines)
    base = lines.optional("BASE:")
    if base is not None:
        for x in base:
            if x not in alphabet:
                raise lines.error(f"unknown letter {x!r}", x)
    kind = "string"
    rest = lines.optional("KIND:")
    if rest is not None:
        if rest not in (["string"], ["prefix"]):
            raise lines.error("KIND is 'string' or 'prefix'")
        kind = rest[0]
    lines.keyword("RULES:")
    rules = []
    while not lines.at_end():
        if lines.peek() == "END":
            lines.next()
            break
        _, raw = lines.next()
        if "->" not in raw:
            raise lines.error("rule lines have the form 'lhs -> rhs'")
        lhs, rhs = raw.split("->", 1)
        u, v = parse_word(lines, alphabet, lhs), parse_word(lines, alphabet, rhs)
        if u == v:
            raise lines.error("a rule needs distinct sides")
        rules.append((u, v))
    if not lines.at_end():
        raise lines.error("unexpected text after the rules")
    return RulesFile(alphabet, tuple(rules), kind, tuple(base) if base is not None else None)


def write_rules(rf: RulesFile) -> str:
    out = write_alphabet(rf.alphabet)
    if rf.base is not None:
        out.append("BASE: " + " ".join(rf.base))
    if rf.kind != "string":
        out.append(f"KIND: {rf.kind}")
    out.append("RULES:")
    for u, v in rf.rules:
        out.append(f"{word_text(rf.alphabet, u)} -> {word_text(rf.alphabet, v)}")
    return "\n".join(out) + "\n"


def read_presentation(text: str) -> Presentation:
    lines = Lines(text)
    lines.keyword("PRESENTATION")
    alphabet = read_alphabet(lines)
    lines.keyword("RELATORS:")
    rels = []
    while not lines.at_end():
        _, raw = lines.next()
        if raw.strip() == "END":
            break
        rels.append(parse_word(lines, alphabet, raw))
    return Presentation(alphabet, tuple(rels))


def write_presentation(p: Presentation) -> str:
    out = ["PRESENTATION"] + write_alphabet(p.alphabet) + ["RELATORS:"]
    out += [word_text(p.alphabet, r) for r in p.relators]
    return "\n".join(out) + "\n"


def read_prs(text) -> PrefixRewritingSystem:
    lines = _text(text)
    lines.keyword("PREFIX-REWRITING")
    alphabet = read_alphabet(lines)
    base = lines.optional("BASE:")
    bound = lines.int_keyword("BOUND:")
    families = []
    while not lines.at_end() and lines.peek().split()[0] == "FAMILY":
        _, raw = lines.next()
        body = raw.split(None, 1)[1] if len(raw.split(None, 1)) > 1 else ""
        if "->" not in body:
            raise lines.error("FAMILY lines have the form 'FAMILY s -> t'")
        s, t = body.split("->", 1)
        s, t = parse_word(lines, alphabet, s), parse_word(lines, alphabet, t)
        d = read_dfa_block(lines, alphabet.letters)
        families.append((d, s, t))
    if not lines.at_end():
        raise lines.error("unexpected text in a prefix-rewriting document")
    try:
        return PrefixRewritingSystem(alphabet, families, base=base, bound=bound)
    except RewritingError as e:
        raise ParseError(str(e)) from None


def write_prs(r: PrefixRewritingSystem) -> str:
    out = ["PREFIX-REWRITING"] + write_alphabet(r.alphabet)
    if r.base != r.alphabet.letters:
        out.append("BASE: " + " ".join(r.base))
    out.append(f"BOUND: {r.bound}")
    for f in r.families:
        out.append(f"FAMILY {word_text(r.alphabet, f.lhs)} -> {word_text(r.alphabet, f.rhs)}")
        out += write_dfa_block(f.prefixes)
    return "\n".join(out) + "\n"


def read_async_structure(text):
    from autostack.stacking.from_async import AsyncAutomaticStructure

    lines = _text(text)
    lines.keyword("ASYNC-AUTOMATIC")
    return _read_async_structure_body(lines, AsyncAutomaticStructure)


def _read_async_structure_body(lines: Lines, cls):
    alphabet = read_alphabet(lines)
    c0 = lines.int_keyword("BLOCK-BOUND:")
    lines.keyword("NORMAL-FORMS")
    n = read_dfa_block(lines, alphabet.letters)
    mults = {}
    while not lines.at_end():
        rest = lines.keyword("MULTIPLIER")
        if len(rest) != 1 or rest[0] not in alphabet:
            raise lines.error("MULTIPLIER names one letter")
        mults[rest[0]] = read_async_block(lines)
    missing = [a for a in alphabet.letters if a not in mults]
    if missing:
        raise lines.error(f"no multiplier for {missing[0]!r}")
    try:
        return cls(alphabet, n, mults, c0)
    except ValueError as e:
        raise ParseError(str(e)) from None


def write_async_structure(s, header: str = "ASYNC-AUTOMATIC") -> str:
    out = [header] + write_alphabet(s.alphabet)
    out.append(f"BLOCK-BOUND: {s.block_bound}")
    out.append("NORMAL-FORMS")
    out += write_dfa_block(s.normal_forms)
    for a in s.alphabet.letters:
        out.append(f"MULTIPLIER {a}")
        out += write_async_block(s.multipliers[a])
    return "\n".join(out) + "\n"


def read_stacking(text):
    """A stacking bundle: regular graph, or the recipe built from an async structure."""
    from autostack.stacking import AsyncAutomaticStructure, RelationPhi, StackingStructure, stacking_from_async

    lines = _text(text)
    head = lines.peek()
    if head == "STACKING-FROM-ASYNC":
        lines.next()
        return stacking_from_async(_read_async_structure_body(lines, AsyncAutomaticStructure))
    lines.keyword("STACKING")
    alphabet = read_alphabet(lines)
    bound = lines.int_keyword("BOUND:")
    lines.keyword("NORMAL-FORMS")
    n = read_dfa_block(lines, alphabet.letters)
    lines.keyword("PHI")
    rel = read_relation_block(lines)
    if rel.arity != 3 or rel.base != alphabet.letters:
        raise lines.error("the stacking graph is a ternary relation over the letters")
    if not lines.at_end():
        raise lines.error("unexpected text after the stacking graph")
    try:
        return StackingStructure(alphabet, n, RelationPhi(alphabet, rel), bound=bound)
    except ValueError as e:
        raise ParseError(str(e)) from None


def write_stacking(s) -> str:
    from autostack.stacking import AsyncPhi

    if isinstance(s.phi, AsyncPhi):
        return write_async_structure(s.phi.structure, "STACKING-FROM-ASYNC")
    out = ["STACKING"] + write_alphabet(s.alphabet)
    out.append(f"BOUND: {s.bound}")
    out.append("NORMAL-FORMS")
    out += write_dfa_block(s.normal_forms)
    out.append("PHI")
    out += write_relation_block(s.phi.relation())
    return "\n".join(out) + "\n"


def document_kind(text: str) -> str:
    """``rules``, ``prefix``, ``stacking``, ``stacking-async``, ``async``, ``presentation``, or raise."""
    lines = Lines(text)
    head = lines.peek()
    if head is None:
        raise ParseError("empty document", 1, 1)
    first = head.split()[0]
    kinds = {
        "LETTERS:": "rules",
        "PREFIX-REWRITING": "prefix",
        "STACKING": "stacking",
        "STACKING-FROM-ASYNC": "stacking-async",
        "ASYNC-AUTOMATIC": "async",
        "PRESENTATION": "presentation",
        "DFA": "dfa",
        "RELATION": "relation",
        "ASYNC": "async-automaton",
    }
    if first in kinds:
        return kinds[first]
    raise ParseError(f"unknown document type {first!r}", lines.items[0][0], 1)


def read_dfa(text: str) -> Dfa:
    lines = Lines(text)
    d = read_dfa_block(lines)
    if not lines.at_end():
        raise lines.error("unexpected text after END")
    return d


def write_dfa(d: Dfa) -> str:
    return "\n".join(write_dfa_block(d)) + "\n"


def read_relation(text: str) -> SyncRelation:
    lines = Lines(text)
    r = read_relation_block(lines)
    if not lines.at_end():
        raise lines.error("unexpected text after END")
    return r


def write_relation(r: SyncRelation) -> str:
    return "\n".join(write_relation_block(r)) + "\n"


def read_async(text: str) -> AsyncAutomaton:
    lines = Lines(text)
    m = read_async_block(lines)
    if not lines.at_end():
        raise lines.error("unexpected text after END")
    return m


def write_async(m: AsyncAutomaton) -> str:
    return "\n".join(write_async_block(m)) + "\n"
