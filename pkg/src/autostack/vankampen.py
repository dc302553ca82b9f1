"""Van Kampen diagrams as combinatorial maps, built from a stacking structure.

A diagram has vertices ``0..V-1`` and edges ``(tail, head, letter)``.  Edge
``e`` has two darts: ``2e`` runs from tail to head reading the letter and
``2e + 1`` runs back reading its inverse.  Each 2-cell is stored as the cyclic
list of darts around it, and the boundary is the list of darts spelling the
boundary word from the basepoint.

Orientation convention: together with the *outer orbit* (the boundary walked
backwards, every dart reversed) the face lists partition the darts, and
consecutive darts ``d, d'`` in any of these cycles satisfy
``d' = sigma(reverse(d))``.  That defines the rotation ``sigma`` at every
vertex, and the diagram is a planar disk exactly when each vertex carries a
single rotation cycle, the 1-skeleton is connected and
``V - E + (F + 1) = 2``.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from autostack.core import Alphabet, Presentation, Word
from autostack.rewriting import BudgetExhausted, DEFAULT_STEP_LIMIT
from autostack.stacking.structure import StackingError, StackingStructure

DEFAULT_MAX_DEPTH = 10**4


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class VanKampenDiagram:
    alphabet: Alphabet
    n_vertices: int
    edges: tuple  # ((tail, head, letter), ...)
    faces: tuple  # ((dart, ...), ...)
    boundary: tuple  # (dart, ...)
    basepoint: int = 0

    # -- darts ------------------------------------------------------------

    def tail(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e[1] if d & 1 else e[0]

    def head(self, d: int) -> int:
        e = self.edges[d >> 1]
        return e[0] if d & 1 else e[1]

    def label(self, d: int) -> str:
        x = self.edges[d >> 1][2]
        return self.alphabet.inv(x) if d & 1 else x

    def read(self, darts: Iterable[int]) -> Word:
        return tuple(self.label(d) for d in darts)

    @property
    def boundary_word(self) -> Word:
        return self.read(self.boundary)

    def face_label(self, i: int) -> Word:
        return self.read(self.faces[i])

    def vertex_at(self, position: int) -> int:
        """Vertex reached after ``position`` letters of the boundary word."""
        if position == len(self.boundary):
            return self.basepoint
        return self.tail(self.boundary[position])

    def outer_orbit(self) -> tuple:
        return tuple(d ^ 1 for d in reversed(self.boundary))

    def orbits(self) -> list:
        out = list(self.faces)
        if self.boundary:
            out.append(self.outer_orbit())
        return out

    def rotation(self) -> dict:
        """``sigma`` as a map dart -> dart (partial if the orbits are inconsistent)."""
        sigma = {}
        for cycle in self.orbits():
            n = len(cycle)
            for i in range(n):
                sigma[cycle[i] ^ 1] = cycle[(i + 1) % n]
        return sigma

    def rotation_cycles(self) -> dict:
        """Vertex -> list of rotation cycles of its outgoing darts."""
        sigma = self.rotation()
        out: dict = {v: [] for v in range(self.n_vertices)}
        seen = set()
        for d in range(2 * len(self.edges)):
            if d in seen or d not in sigma:
                continue
            cyc = []
            x = d
            while x not in seen:
                seen.add(x)
                cyc.append(x)
                x = sigma.get(x, x)
            out[self.tail(d)].append(tuple(cyc))
        return out

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.faces)

    # -- export -------------------------------------------------------------

    def to_json(self) -> str:
        fmt = self.alphabet.format
        cycles = self.rotation_cycles()
        data = {
            "letters": list(self.alphabet.letters),
            "inverses": [self.alphabet.inv(x) for x in self.alphabet.letters],
            "vertices": self.n_vertices,
            "basepoint": self.basepoint,
            "edges": [list(e) for e in self.edges],
            "rotation": [[list(c) for c in cycles[v]] for v in range(self.n_vertices)],
            "faces": [list(f) for f in self.faces],
            "face_labels": [fmt(self.face_label(i)) for i in range(len(self.faces))],
            "boundary": list(self.boundary),
            "boundary_word": fmt(self.boundary_word),
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    def to_dot(self) -> str:
        fmt = self.alphabet.format
        lines = ["digraph diagram {"]
        faces = "; ".join(f"{i}: {fmt(self.face_label(i))}" for i in range(len(self.faces)))
        lines.append(f"  label={json.dumps('faces ' + faces if faces else 'no faces')};")
        for v in range(self.n_vertices):
            shape = "doublecircle" if v == self.basepoint else "circle"
            lines.append(f"  v{v} [shape={shape}];")
        for t, h, x in self.edges:
            lines.append(f"  v{t} -> v{h} [label={json.dumps(x)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def diagram_from_json(text: str) -> VanKampenDiagram:
    data = json.loads(text)
    letters = data["letters"]
    pairs = [(x, y) for x, y in zip(letters, data["inverses"]) if x != y]
    alphabet = Alphabet.from_pairs(letters, pairs)
    return VanKampenDiagram(
        alphabet,
        int(data["vertices"]),
        tuple((int(t), int(h), x) for t, h, x in data["edges"]),
        tuple(tuple(int(d) for d in f) for f in data["faces"]),
        tuple(int(d) for d in data["boundary"]),
        int(data["basepoint"]),
    )


# -- primitive diagrams and operations ---------------------------------------------


def point_diagram(alphabet: Alphabet) -> VanKampenDiagram:
    return VanKampenDiagram(alphabet, 1, (), (), ())


def segment_diagram(alphabet: Alphabet, path: Sequence[str]) -> VanKampenDiagram:
    """A path labeled ``path`` walked out and back: boundary ``path path^-1``."""
    n = len(path)
    edges = tuple((i, i + 1, x) for i, x in enumerate(path))
    boundary = tuple(2 * i for i in range(n)) + tuple(2 * i + 1 for i in reversed(range(n)))
    return VanKampenDiagram(alphabet, n + 1, edges, (), boundary)


def glue(first: VanKampenDiagram, second: VanKampenDiagram, shared: int) -> VanKampenDiagram:
    """Identify the last ``shared`` boundary darts of ``first`` (spelling
    ``y^-1``) with the first ``shared`` of ``second`` (spelling ``y``).

    The boundary of the result is ``first`` without that suffix followed by
    ``second`` without that prefix.
    """
    nb1 = len(first.boundary)
    if shared > nb1 or shared > len(second.boundary):
        raise DiagramError("shared path longer than a boundary")
    suffix = first.boundary[nb1 - shared :]
    prefix = second.boundary[:shared]
    edge_map: dict = {}
    flip: dict = {}
    vmap: dict = {second.basepoint: first.basepoint}

    def bind(v2, v1):
        if vmap.setdefault(v2, v1) != v1:
            raise DiagramError("gluing along a path that is not simple")

    for j, p in enumerate(prefix):
        s = suffix[shared - 1 - j] ^ 1  # the dart of ``first`` that p becomes
        if second.label(p) != first.label(s):
            raise DiagramError("shared boundary words do not match")
        e2, e1 = p >> 1, s >> 1
        f = (p & 1) ^ (s & 1)
        if e2 in edge_map and (edge_map[e2], flip[e2]) != (e1, f):
            raise DiagramError("gluing along a path that is not simple")
        edge_map[e2], flip[e2] = e1, f
        bind(second.tail(p), first.tail(s))
        bind(second.head(p), first.head(s))
    edges = list(first.edges)
    for e2, (t, h, x) in enumerate(second.edges):
        if e2 in edge_map:
            continue
        edge_map[e2], flip[e2] = len(edges), 0
        edges.append((t, h, x))  # endpoints renamed below
    n = first.n_vertices
    for v in range(second.n_vertices):
        if v not in vmap:
            vmap[v] = n
            n += 1
    for e2, (t, h, x) in enumerate(second.edges):
        e1 = edge_map[e2]
        if e1 >= len(first.edges):
            edges[e1] = (vmap[t], vmap[h], x)

    def dart(d):
        return 2 * edge_map[d >> 1] + ((d & 1) ^ flip[d >> 1])

    faces = first.faces + tuple(tuple(dart(d) for d in f) for f in second.faces)
    boundary = first.boundary[: nb1 - shared] + tuple(dart(d) for d in second.boundary[shared:])
    return VanKampenDiagram(first.alphabet, n, tuple(edges), faces, boundary, first.basepoint)


def seashell_glue(diagrams: Sequence[VanKampenDiagram], shared: Sequence[int]) -> VanKampenDiagram:
    """Glue diagrams for ``y_{i-1} b_i y_i^-1`` left to right along the ``y_i``.

    ``shared[i]`` is the length of the path between diagram ``i`` and ``i + 1``.
    """
    if not diagrams:
        raise DiagramError("nothing to glue")
    if len(shared) != len(diagrams) - 1:
        raise DiagramError("need one shared length between consecutive diagrams")
    out = diagrams[0]
    for d, k in zip(diagrams[1:], shared):
        out = glue(out, d, k)
    return out


def attach_face(d: VanKampenDiagram, start: int, length: int, letter: str) -> VanKampenDiagram:
    """Replace the boundary darts ``[start, start + length)`` by one new edge
    labeled ``letter`` and close the gap with a 2-cell."""
    segment = d.boundary[start : start + length]
    if len(segment) != length:
        raise DiagramError("face attached beyond the boundary")
    u = d.vertex_at(start)
    v = d.vertex_at(start + length)
    e = len(d.edges)
    face = tuple(x ^ 1 for x in reversed(segment)) + (2 * e,)
    boundary = d.boundary[:start] + (2 * e,) + d.boundary[start + length :]
    return VanKampenDiagram(d.alphabet, d.n_vertices, d.edges + ((u, v, letter),), d.faces + (face,), boundary, d.basepoint)


# -- the recursive builder ----------------------------------------------------------


@dataclass
class _Build:
    s: StackingStructure
    step_limit: int
    max_depth: int
    memo: dict = field(default_factory=dict)
    phi_faces: int = 0


def _edge_diagram(b: _Build, y: Word, a: str, depth: int) -> VanKampenDiagram:
    key = (y, a)
    if key in b.memo:
        return b.memo[key]
    if depth > b.max_depth:
        raise BudgetExhausted(f"descent deeper than {b.max_depth} at ({b.s.alphabet.format(y)}, {a})")
    s = b.s
    z = s.edge_target(y, a, b.step_limit)
    if s.is_degenerate(y, a):
        out = segment_diagram(s.alphabet, y + (a,) if z == y + (a,) else y)
    else:
        phi = s.phi_eval(y, a)
        ys = [y]
        for x in phi:
            ys.append(s.edge_target(ys[-1], x, b.step_limit))
        if ys[-1] != z:
            raise StackingError(f"path phi({s.alphabet.format(y)}, {a}) does not end at {s.alphabet.format(z)}")
        parts = [_edge_diagram(b, ys[j], x, depth + 1) for j, x in enumerate(phi)]
        shell = seashell_glue(parts, [len(v) for v in ys[1:-1]]) if parts else point_diagram(s.alphabet)
        out = attach_face(shell, len(y), len(phi), a)
    b.memo[key] = out
    return out


def _run(b: _Build, fn, *args):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * b.max_depth + 1000))
    try:
        return fn(*args)
    except RecursionError:
        raise BudgetExhausted("diagram recursion too deep") from None
    finally:
        sys.setrecursionlimit(old)


def build_edge_diagram(
    s: StackingStructure,
    y: Sequence,
    a: str,
    step_limit: int = DEFAULT_STEP_LIMIT,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> VanKampenDiagram:
    """Diagram with boundary ``y a nf(ya)^-1``; a tree edge gives no 2-cells."""
    y = tuple(y)
    if not s.is_normal(y):
        raise DiagramError(f"{s.alphabet.format(y)} is not a normal form")
    b = _Build(s, step_limit, max_depth)
    return _run(b, _edge_diagram, b, y, a, 0)


def build_diagram(
    s: StackingStructure,
    w: Sequence,
    step_limit: int = DEFAULT_STEP_LIMIT,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> VanKampenDiagram:
    """Diagram with boundary ``w`` for a word representing the identity."""
    w = s.alphabet.check_word(w)
    if s.normal_form(w, step_limit) != ():
        raise DiagramError(f"{s.alphabet.format(w)} does not represent the identity")
    if not w:
        return point_diagram(s.alphabet)
    b = _Build(s, step_limit, max_depth)
    ys = [()]
    for x in w:
        ys.append(s.edge_target(ys[-1], x, step_limit))

    def go():
        parts = [_edge_diagram(b, ys[i], x, 0) for i, x in enumerate(w)]
        return seashell_glue(parts, [len(v) for v in ys[1:-1]])

    return _run(b, go)


# -- validation ------------------------------------------------------------------------


def cyclic_key(alphabet: Alphabet, w: Sequence[str]) -> tuple:
    """The same key for all rotations of ``w`` and of its formal inverse."""
    w = tuple(w)
    if not w:
        return ()
    inv = alphabet.inverse(w)
    return min(
        (alphabet.key(v[i:] + v[:i]), v[i:] + v[:i]) for v in (w, inv) for i in range(len(v))
    )[1]


@dataclass
class DiagramReport:
    checks: dict  # name -> list of witnesses (empty when the check passes)

    @property
    def ok(self) -> bool:
        return all(not v for v in self.checks.values())

    def lines(self) -> list:
        out = []
        for name in sorted(self.checks):
            bad = self.checks[name]
            out.append(f"{name} {'ok' if not bad else 'FAIL ' + str(bad[0])}")
        return out


def validate_diagram(
    d: VanKampenDiagram,
    relators,
    boundary_word: Sequence | None = None,
) -> DiagramReport:
    """Check a diagram against a presentation (or an iterable of relators).

    Checks: darts partitioned by the faces and the outer orbit, every cycle
    closed, one rotation cycle per vertex, connectivity, Euler characteristic
    one with the planar count ``V - E + (F + 1) = 2``, the boundary word, and
    every face labeled by a relator up to rotation and inversion.
    """
    al = d.alphabet
    fmt = al.format
    rels = relators.relators if isinstance(relators, Presentation) else tuple(relators)
    allowed = {cyclic_key(al, r) for r in rels}
    checks: dict = {k: [] for k in ("partition", "cycles", "rotation", "connected", "euler", "planar", "boundary", "relators")}
    n_darts = 2 * len(d.edges)
    count = [0] * n_darts
    for cyc in d.orbits():
        for x in cyc:
            if not 0 <= x < n_darts:
                checks["partition"].append(f"dart {x} out of range")
            else:
                count[x] += 1
        for i, x in enumerate(cyc):
            nxt = cyc[(i + 1) % len(cyc)]
            if 0 <= x < n_darts and 0 <= nxt < n_darts and d.head(x) != d.tail(nxt):
                checks["cycles"].append(f"darts {x} and {nxt} are not consecutive")
                break
    for x, c in enumerate(count):
        if c != 1:
            checks["partition"].append(f"dart {x} lies on {c} cycles")
    if not checks["partition"] and not checks["cycles"]:
        cycles = d.rotation_cycles()
        for v in range(d.n_vertices):
            if len(cycles[v]) > 1:
                checks["rotation"].append(f"vertex {v} has {len(cycles[v])} rotation cycles")
    # connectivity
    adj: dict = {v: [] for v in range(d.n_vertices)}
    for t, h, _ in d.edges:
        adj[t].append(h)
        adj[h].append(t)
    seen = {d.basepoint}
    todo = [d.basepoint]
    while todo:
        v = todo.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                todo.append(u)
    if len(seen) != d.n_vertices:
        missing = min(set(range(d.n_vertices)) - seen)
        checks["connected"].append(f"vertex {missing} is not reachable from the basepoint")
    chi = d.euler_characteristic
    if chi != 1:
        checks["euler"].append(f"V - E + F = {chi}")
    if chi + 1 != 2 or checks["rotation"]:
        checks["planar"].append(f"V - E + (F + 1) = {chi + 1}")
    # boundary
    if d.boundary:
        if d.tail(d.boundary[0]) != d.basepoint or d.head(d.boundary[-1]) != d.basepoint:
            checks["boundary"].append("boundary does not start and end at the basepoint")
    if boundary_word is not None and d.boundary_word != tuple(boundary_word):
        checks["boundary"].append(f"boundary reads {fmt(d.boundary_word)}, expected {fmt(boundary_word)}")
    for i in range(len(d.faces)):
        lab = d.face_label(i)
        if cyclic_key(al, lab) not in allowed:
            checks["relators"].append(f"face {i} reads {fmt(lab)}")
    return DiagramReport(checks)


def diagram_size(d: VanKampenDiagram) -> dict:
    return {"vertices": d.n_vertices, "edges": len(d.edges), "faces": len(d.faces)}
