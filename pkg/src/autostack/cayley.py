"""Finite balls in the Cayley graph and checks of stacking structures on them.

Vertices are normal forms (never oracle elements).  Each vertex ``y`` and
letter ``a`` give the directed edge ``(y, a, nf(ya))``; it is a tree edge
when ``ya`` is itself the normal form or ``y`` ends in ``a^-1``.  Anything
decided on a ball is only decided up to its radius, so reports keep verified
and unverified edges apart.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from autostack.automata import dfa as fa
from autostack.core import Alphabet, GroupOracle, Word
from autostack.rewriting import DEFAULT_STEP_LIMIT, BudgetExhausted, PrefixRewritingSystem, prl
from autostack.stacking.structure import StackingError, StackingStructure

EdgeKey = tuple  # (source normal form, letter)


@dataclass(frozen=True)
class BallEdge:
    source: Word
    letter: str
    target: Word
    degenerate: bool
    dangling: bool  # target lies outside the ball

    @property
    def key(self) -> EdgeKey:
        return (self.source, self.letter)


class CayleyBall:
    def __init__(self, alphabet: Alphabet, radius: int, vertices: Sequence[Word], edges: dict):
        self.alphabet = alphabet
        self.radius = radius
        self.vertices = tuple(vertices)
        self.vertex_set = frozenset(self.vertices)
        self.edges = edges

    def __contains__(self, y) -> bool:
        return tuple(y) in self.vertex_set

    def edge(self, y: Word, a: str) -> BallEdge:
        return self.edges[(tuple(y), a)]

    def internal_edges(self) -> list:
        return [e for e in self.edges.values() if not e.dangling]

    def tree_edges(self) -> list:
        return [e for e in self.internal_edges() if e.degenerate]

    def recursive_edges(self) -> list:
        return [e for e in self.internal_edges() if not e.degenerate]

    def dangling_edges(self) -> list:
        return [e for e in self.edges.values() if e.dangling]

    def sphere(self) -> list:
        return [y for y in self.vertices if len(y) == self.radius]

    def is_boundary(self, y: Word) -> bool:
        return len(y) == self.radius

    def undirected_key(self, e: BallEdge) -> tuple:
        """The same key for ``e`` and its reverse edge."""
        key = self.alphabet.key
        idx = self.alphabet.index
        here = (key(e.source), idx(e.letter))
        there = (key(e.target), idx(self.alphabet.inv(e.letter)))
        return (e.source, e.letter) if here <= there else (e.target, self.alphabet.inv(e.letter))

    def stats(self) -> dict:
        internal = self.internal_edges()
        tree = {self.undirected_key(e) for e in internal if e.degenerate}
        recursive = {self.undirected_key(e) for e in internal if not e.degenerate}
        return {
            "radius": self.radius,
            "vertices": len(self.vertices),
            "sphere": len(self.sphere()),
            "directed_edges": len(internal),
            "dangling_edges": len(self.dangling_edges()),
            "tree_edges": len(tree),
            "recursive_edges": len(recursive),
        }

    def check_tree(self) -> list:
        """Problems with the maximal tree and the edge pairing (empty when fine)."""
        problems = []
        fmt = self.alphabet.format
        inv = self.alphabet.inv
        for e in self.internal_edges():
            back = self.edges.get((e.target, inv(e.letter)))
            if back is None or back.target != e.source:
                problems.append(f"edge ({fmt(e.source)}, {e.letter}) has no reverse edge")
            elif back.degenerate != e.degenerate:
                problems.append(f"edge ({fmt(e.source)}, {e.letter}) and its reverse are classified differently")
        # union-find over undirected tree edges: spanning and acyclic
        parent = {y: y for y in self.vertices}

        def find(y):
            while parent[y] != y:
                parent[y] = parent[parent[y]]
                y = parent[y]
            return y

        seen = set()
        for e in self.tree_edges():
            k = self.undirected_key(e)
            if k in seen:
                continue
            seen.add(k)
            r1, r2 = find(e.source), find(e.target)
            if r1 == r2:
                problems.append(f"tree edges close a cycle at ({fmt(e.source)}, {e.letter})")
            else:
                parent[r1] = r2
        roots = {find(y) for y in self.vertices}
        if len(roots) > 1:
            problems.append(f"tree edges leave {len(roots)} components")
        return problems

    def distances_from(self, y: Word) -> dict:
        """Breadth-first distances inside the ball."""
        y = tuple(y)
        dist = {y: 0}
        todo = deque([y])
        while todo:
            v = todo.popleft()
            for a in self.alphabet.letters:
                e = self.edges.get((v, a))
                if e is not None and not e.dangling and e.target not in dist:
                    dist[e.target] = dist[v] + 1
                    todo.append(e.target)
        return dist

    def to_dot(self, flow: "FlowAssignment | None" = None) -> str:
        def name(w):
            return json.dumps(self.alphabet.format(w))

        lines = ["digraph ball {", "  rankdir=LR;"]
        for y in self.vertices:
            lines.append(f"  {name(y)};")
        for e in sorted(self.internal_edges(), key=lambda e: self._order(e)):
            if self.undirected_key(e) != e.key:
                continue
            label = e.letter
            style = "solid" if e.degenerate else "dashed"
            if flow is not None and e.key in flow.paths and flow.paths[e.key].verified:
                label += " / " + self.alphabet.format(flow.paths[e.key].word)
            lines.append(f"  {name(e.source)} -> {name(e.target)} [label={json.dumps(label)}, style={style}];")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def _order(self, e: BallEdge) -> tuple:
        return (self.alphabet.key(e.source), self.alphabet.index(e.letter))


class DescentCycle(StackingError):
    """Resolving an edge needed the edge itself: the stacking map is not well-founded."""

    def __init__(self, alphabet: Alphabet, cycle: tuple):
        fmt = alphabet.format
        super().__init__("descent cycle " + " -> ".join(f"({fmt(y)}, {a})" for y, a in cycle))
        self.cycle = cycle


def stacking_targets(s: StackingStructure, step_limit: int = DEFAULT_STEP_LIMIT):
    """``(y, a) -> nf(ya)`` found by walking stacking paths, memoized.

    A recursive edge is resolved by following ``phi(y, a)`` from ``y``,
    resolving each edge on the way first.  Meeting an edge that is still
    being resolved means the descent relation has a cycle, reported as
    :class:`DescentCycle` instead of rewriting forever.
    """
    alphabet = s.alphabet
    inv = alphabet.inv
    key = lambda e: (alphabet.key(e[0]), alphabet.index(e[1]))  # noqa: E731
    memo: dict = {}
    work = [0]

    def immediate(y, a):
        if s.is_normal(y + (a,)):
            return y + (a,)
        if y and y[-1] == inv(a):
            return y[:-1]
        return None

    def target(y: Word, a: str) -> Word:
        y = tuple(y)
        if (y, a) in memo:
            return memo[(y, a)]
        r = immediate(y, a)
        if r is not None:
            return r
        stack = [[(y, a), s.phi_eval(y, a), 0, y]]
        open_edges = {(y, a): 0}
        while stack:
            frame = stack[-1]
            edge, word, i, v = frame
            if i == len(word):
                stack.pop()
                del open_edges[edge]
                memo[edge] = v
                continue
            e = (v, word[i])
            if e in memo:
                frame[2], frame[3] = i + 1, memo[e]
                continue
            if e in open_edges:
                cyc = [f[0] for f in reversed(stack[open_edges[e] :])]
                first = min(range(len(cyc)), key=lambda j: key(cyc[j]))
                raise DescentCycle(alphabet, tuple(cyc[first:] + cyc[:first]))
            r = immediate(*e)
            if r is not None:
                frame[2], frame[3] = i + 1, r
                continue
            work[0] += 1
            if work[0] > step_limit:
                raise BudgetExhausted(f"edge resolution exceeded {step_limit} steps")
            open_edges[e] = len(stack)
            stack.append([e, s.phi_eval(*e), 0, e[0]])
        return memo[(y, a)]

    return target


def _edge_function(source, step_limit: int):
    if isinstance(source, StackingStructure):
        return source.alphabet, source.normal_forms, stacking_targets(source, step_limit)
    if isinstance(source, PrefixRewritingSystem):
        return source.alphabet, source.irreducible, lambda y, a: source.normal_form(y + (a,), step_limit)
    raise TypeError("build_ball needs a stacking structure or a prefix-rewriting system")


def build_ball(source, radius: int, step_limit: int = DEFAULT_STEP_LIMIT) -> CayleyBall:
    """Normal forms of length at most ``radius`` with every outgoing edge resolved."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    alphabet, n, target = _edge_function(source, step_limit)
    inv = alphabet.inv
    vertices = fa.enumerate_words(n, radius)
    edges = {}
    for y in vertices:
        for a in alphabet.letters:
            z = target(y, a)
            degenerate = z == y + (a,) or (bool(y) and y[-1] == inv(a) and z == y[:-1])
            edges[(y, a)] = BallEdge(y, a, z, degenerate, len(z) > radius)
    return CayleyBall(alphabet, radius, vertices, edges)


# -- flow function ---------------------------------------------------------------


@dataclass(frozen=True)
class FlowPath:
    edge: EdgeKey
    word: Word
    steps: tuple  # ((vertex, letter), ...) traversed, when verified
    verified: bool


@dataclass
class FlowAssignment:
    ball: CayleyBall
    bound: int
    paths: dict  # recursive edge key -> FlowPath
    violations: list = field(default_factory=list)

    def unverified(self) -> list:
        return [k for k, p in self.paths.items() if not p.verified]

    def path_of(self, e: EdgeKey) -> tuple:
        """``Phi(e)`` as directed edges; tree edges map to themselves."""
        if e in self.paths:
            return self.paths[e].steps
        return (e,)


def flow_from_stacking(s: StackingStructure, ball: CayleyBall) -> FlowAssignment:
    """Trace ``phi(y, a)`` from ``y`` for every recursive edge of the ball.

    A path leaving the ball is unverified; a verified path that does not end
    at the target of its edge, or is longer than the bound, is a violation.
    """
    fmt = s.alphabet.format
    paths = {}
    violations = []
    for e in ball.edges.values():
        if e.degenerate:
            continue
        word = s.phi_eval(e.source, e.letter)
        if len(word) > s.bound:
            violations.append(f"phi({fmt(e.source)}, {e.letter}) = {fmt(word)} is longer than {s.bound}")
        v = e.source
        steps = []
        ok = not e.dangling
        for b in word:
            f = ball.edges.get((v, b))
            if f is None or f.dangling:
                ok = False
                break
            steps.append((v, b))
            v = f.target
        if ok and v != e.target:
            violations.append(
                f"path phi({fmt(e.source)}, {e.letter}) = {fmt(word)} ends at {fmt(v)}, not {fmt(e.target)}"
            )
        paths[e.key] = FlowPath(e.key, word, tuple(steps) if ok else (), ok)
    return FlowAssignment(ball, s.bound, paths, violations)


@dataclass
class DescentReport:
    nodes: int
    arcs: tuple  # ((smaller edge, larger edge), ...)
    acyclic: bool
    depth: int
    cycle: tuple  # witness edges, empty when acyclic
    unverified: int

    def to_json(self, alphabet: Alphabet) -> str:
        def name(e):
            return [alphabet.format(e[0]), e[1]]

        data = {
            "acyclic": self.acyclic,
            "arcs": [[name(x), name(y)] for x, y in self.arcs],
            "cycle": [name(e) for e in self.cycle],
            "depth": self.depth,
            "nodes": self.nodes,
            "unverified": self.unverified,
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"


def descent_arcs(flow: FlowAssignment) -> list:
    """``(e', e)`` for recursive ``e'`` on the verified path of recursive ``e``."""
    paths = flow.paths
    out = set()
    for e, p in paths.items():
        if not p.verified:
            continue
        for step in p.steps:
            if step in paths and paths[step].verified:
                out.add((step, e))
    return sorted(out, key=lambda arc: (_edge_key(flow.ball, arc[1]), _edge_key(flow.ball, arc[0])))


def _edge_key(ball: CayleyBall, e: EdgeKey) -> tuple:
    return (ball.alphabet.key(e[0]), ball.alphabet.index(e[1]))


def check_wellfounded(flow: FlowAssignment, ball: CayleyBall | None = None) -> DescentReport:
    """Topologically sort the descent digraph on verified recursive edges."""
    ball = ball or flow.ball
    arcs = descent_arcs(flow)
    nodes = sorted((e for e, p in flow.paths.items() if p.verified), key=lambda e: _edge_key(ball, e))
    succ = {e: [] for e in nodes}
    indeg = {e: 0 for e in nodes}
    for small, big in arcs:
        succ[small].append(big)
        indeg[big] += 1
    depth = {e: 0 for e in nodes}
    todo = deque(e for e in nodes if indeg[e] == 0)
    done = 0
    while todo:
        e = todo.popleft()
        done += 1
        for f in succ[e]:
            depth[f] = max(depth[f], depth[e] + 1)
            indeg[f] -= 1
            if indeg[f] == 0:
                todo.append(f)
    cycle: tuple = ()
    if done < len(nodes):
        cycle = _find_cycle([e for e in nodes if indeg[e] > 0], arcs)
    return DescentReport(
        nodes=len(nodes),
        arcs=tuple(arcs),
        acyclic=not cycle,
        depth=max(depth.values(), default=0) if not cycle else -1,
        cycle=cycle,
        unverified=len(flow.unverified()),
    )


def _find_cycle(remaining: list, arcs: list) -> tuple:
    """A cycle among the nodes Kahn's algorithm could not remove.

    Each of them keeps a predecessor among them, so walking backwards must
    revisit a node.
    """
    alive = set(remaining)
    pred: dict = {e: [] for e in remaining}
    for small, big in arcs:
        if small in alive and big in alive:
            pred[big].append(small)
    seen: dict = {}
    path = []
    v = remaining[0]
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = pred[v][0]
    return tuple(reversed(path[seen[v] :]))


def check_descent_prl(flow: FlowAssignment, q: PrefixRewritingSystem, step_limit: int = DEFAULT_STEP_LIMIT) -> list:
    """Descent arcs ``e' -> e`` where ``prl(e')`` is not below ``prl(e)``."""
    cache: dict = {}

    def p(e):
        if e not in cache:
            cache[e] = prl(q, e[0] + (e[1],), step_limit)
        return cache[e]

    return [(small, big, p(small), p(big)) for small, big in descent_arcs(flow) if p(small) >= p(big)]


# -- full verification -------------------------------------------------------------------


@dataclass
class VerificationReport:
    radius: int
    stats: dict
    functionality: list
    bound: list
    degenerate: list
    representation: list
    flow: list
    tree: list
    descent: DescentReport

    @property
    def failures(self) -> int:
        return (
            len(self.functionality)
            + len(self.bound)
            + len(self.degenerate)
            + len(self.representation)
            + len(self.flow)
            + len(self.tree)
            + (0 if self.descent.acyclic else 1)
        )

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def lines(self, alphabet: Alphabet) -> list:
        fmt = alphabet.format
        out = [f"radius {self.radius}"]
        for k in sorted(self.stats):
            out.append(f"{k} {self.stats[k]}")
        for label, items in (
            ("functionality", self.functionality),
            ("bound", self.bound),
            ("degenerate", self.degenerate),
            ("representation", self.representation),
            ("flow", self.flow),
            ("tree", self.tree),
        ):
            out.append(f"{label} {'ok' if not items else 'FAIL ' + str(len(items))}")
            out += [f"  {x}" for x in items[:10]]
        d = self.descent
        if d.acyclic:
            out.append(f"descent ok nodes {d.nodes} arcs {len(d.arcs)} depth {d.depth}")
        else:
            out.append("descent FAIL cycle " + " -> ".join(f"({fmt(e[0])}, {e[1]})" for e in d.cycle))
        out.append(f"unverified {d.unverified}")
        out.append("result " + ("ok" if self.ok else f"FAIL {self.failures}"))
        return out


def verify_stacking(
    s: StackingStructure,
    radius: int,
    oracle: GroupOracle | None = None,
    step_limit: int = DEFAULT_STEP_LIMIT,
) -> VerificationReport:
    """Check the defining properties of a stacking structure on a ball.

    Functionality (exactly one value per vertex and letter), the length bound,
    ``phi(y, a) = a`` on tree edges, ``phi(y, a) = a`` in the group when an
    oracle is given, endpoints of traced paths, the tree, and acyclicity of
    the descent digraph.
    """
    fmt = s.alphabet.format
    functionality, bound, degenerate, representation = [], [], [], []
    for y in fa.enumerate_words(s.normal_forms, radius):
        for a in s.alphabet.letters:
            found = s.phi.lookup(y, a)
            if len(found) != 1:
                functionality.append(f"({fmt(y)}, {a}) has {len(found)} values")
                continue
            u = found[0]
            if len(u) > s.bound:
                bound.append(f"phi({fmt(y)}, {a}) = {fmt(u)} is longer than {s.bound}")
            if s.is_degenerate(y, a) and u != (a,):
                degenerate.append(f"tree edge ({fmt(y)}, {a}) has phi = {fmt(u)}")
            if oracle is not None and not oracle.equal(u, (a,)):
                representation.append(f"phi({fmt(y)}, {a}) = {fmt(u)} is not equal to {a} in the group")
    parts = dict(
        radius=radius,
        functionality=functionality,
        bound=bound,
        degenerate=degenerate,
        representation=representation,
    )
    if functionality:
        # values cannot be traced, so only the vertex checks are reported
        empty = DescentReport(0, (), True, 0, (), 0)
        return VerificationReport(stats={}, flow=[], tree=[], descent=empty, **parts)
    try:
        ball = build_ball(s, radius, step_limit)
    except DescentCycle as c:
        looping = DescentReport(0, (), False, -1, c.cycle, 0)
        return VerificationReport(stats={}, flow=[], tree=[], descent=looping, **parts)
    flow = flow_from_stacking(s, ball)
    return VerificationReport(
        stats=ball.stats(),
        flow=flow.violations,
        tree=ball.check_tree(),
        descent=check_wellfounded(flow, ball),
        **parts,
    )


# -- fellow travelling ---------------------------------------------------------------------


@dataclass
class FellowReport:
    constant: int
    pairs: int
    indeterminate: int
    worst: tuple | None  # (y, z, i)
    capped: bool


def fellow_traveler(
    normal_forms: fa.Dfa,
    ball: CayleyBall,
    pairs: Iterable | None = None,
    cap: int | None = None,
) -> FellowReport:
    """Largest ball distance between same-length prefixes of paired normal forms.

    ``pairs`` defaults to ``(y, nf(ya))`` over the internal edges.  A distance
    not realised inside the ball is counted as indeterminate, not guessed.
    """
    if pairs is None:
        pairs = [(e.source, e.target) for e in ball.internal_edges()]
    dist_cache: dict = {}
    best = 0
    worst = None
    indeterminate = 0
    count = 0
    for y, z in pairs:
        y, z = tuple(y), tuple(z)
        if not normal_forms.accepts_word(y) or not normal_forms.accepts_word(z):
            raise StackingError("fellow-traveller pairs must be normal forms")
        count += 1
        for i in range(max(len(y), len(z)) + 1):
            u, v = y[:i], z[:i]
            if u == v:
                continue
            if u not in dist_cache:
                dist_cache[u] = ball.distances_from(u) if u in ball else {}
            d = dist_cache[u].get(v)
            if d is None:
                indeterminate += 1
                continue
            if d > best:
                best, worst = d, (y, z, i)
                if cap is not None and best > cap:
                    return FellowReport(best, count, indeterminate, worst, True)
    return FellowReport(best, count, indeterminate, worst, False)
