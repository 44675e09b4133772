"""Graphs embedded on orientable surfaces, as combinatorial maps.

An embedding is stored as a rotation system: every edge ``e`` contributes two
darts (half-edges) ``2e`` and ``2e + 1``, attached to endpoint slot 0 and
slot 1 of the edge respectively, and each vertex carries the clockwise cyclic
order of the darts attached to it.  ``reverse(d) == d ^ 1`` by construction.
Faces are the orbits of ``d -> rotation-successor of reverse(d)``; the genus
then falls out of Euler's formula and is required to be a non-negative
integer at construction time.

Besides the static queries (faces, genus, dual map) this module implements
the surgery the rest of the package relies on: cutting the surface along
vertex-disjoint cycles, splitting a vertex along a contiguous rotation arc,
expanding an edge into an embedded band of parallel edges, adding a chord
across a face, and ``disjointify`` which re-routes a family of pairwise
non-crossing cycles onto pairwise vertex-disjoint ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from typing import Iterable, Sequence

from .errors import InternalInvariantError, PreconditionError, StructuralError

Dart = int


class EmbeddedGraph:
    """A connected multigraph with a rotation system on an orientable surface.

    Immutable once constructed; all surgery returns new graphs.  Vertices are
    ``0..n-1``, edges ``0..m-1``, darts ``0..2m-1`` with ``head(2e) ==
    edges[e][0]`` and ``head(2e+1) == edges[e][1]`` (the head of a dart is the
    vertex it is attached to).
    """

    __slots__ = ("n", "edges", "rotation", "faces", "face_of", "genus",
                 "_rot_pos", "_rot_next")

    def __init__(self, n: int, edges: Sequence[tuple[int, int]],
                 rotation: Sequence[Sequence[Dart]]):
        self.n = int(n)
        self.edges = tuple((int(u), int(v)) for u, v in edges)
        self.rotation = tuple(tuple(int(d) for d in r) for r in rotation)
        self._validate_structure()
        self._index_rotation()
        self.faces = self._trace_faces()
        self.face_of = {}
        for i, f in enumerate(self.faces):
            for d in f:
                self.face_of[d] = i
        euler = self.n - len(self.edges) + len(self.faces)
        if euler % 2 != 0 or euler > 2:
            raise StructuralError(
                "rotation system does not describe an orientable surface: "
                "V - E + F = %d" % euler)
        self.genus = (2 - euler) // 2

    # -- construction-time checks -------------------------------------------------

    def _validate_structure(self) -> None:
        if self.n < 1:
            raise StructuralError("graph needs at least one vertex")
        if len(self.rotation) != self.n:
            raise StructuralError("rotation must list one cycle per vertex")
        m = len(self.edges)
        for e, (u, v) in enumerate(self.edges):
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise StructuralError("edge %d has endpoint out of range" % e)
        seen: dict[int, int] = {}
        for v, rot in enumerate(self.rotation):
            for d in rot:
                if not (0 <= d < 2 * m):
                    raise StructuralError("dart %d out of range" % d)
                if self.edges[d >> 1][d & 1] != v:
                    raise StructuralError(
                        "dart %d listed at vertex %d but attached to %d"
                        % (d, v, self.edges[d >> 1][d & 1]))
                if d in seen:
                    raise StructuralError("dart %d listed twice" % d)
                seen[d] = v
        if len(seen) != 2 * m:
            raise StructuralError("rotation omits %d dart(s)" % (2 * m - len(seen)))
        # connectivity of the underlying graph
        if m:
            reached = {self.edges[0][0]}
            stack = [self.edges[0][0]]
            adj: list[list[int]] = [[] for _ in range(self.n)]
            for u, v in self.edges:
                adj[u].append(v)
                adj[v].append(u)
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in reached:
                        reached.add(y)
                        stack.append(y)
            if len(reached) != self.n:
                raise StructuralError("graph is disconnected")
        elif self.n > 1:
            raise StructuralError("graph is disconnected")

    def _index_rotation(self) -> None:
        pos = {}
        nxt = {}
        for v, rot in enumerate(self.rotation):
            for i, d in enumerate(rot):
                pos[d] = (v, i)
                nxt[d] = rot[(i + 1) % len(rot)]
        self._rot_pos = pos
        self._rot_next = nxt

    def _trace_faces(self) -> tuple[tuple[Dart, ...], ...]:
        faces = []
        unseen = set(range(2 * len(self.edges)))
        while unseen:
            d0 = min(unseen)
            face = []
            d = d0
            while True:
                face.append(d)
                unseen.discard(d)
                d = self._rot_next[d ^ 1]
                if d == d0:
                    break
            faces.append(tuple(face))
        return tuple(faces)

    # -- dart helpers -------------------------------------------------------------

    def head(self, d: Dart) -> int:
        """Vertex a dart is attached to."""
        return self.edges[d >> 1][d & 1]

    def tail(self, d: Dart) -> int:
        """Other endpoint of the dart's edge."""
        return self.edges[d >> 1][1 - (d & 1)]

    def rot_next(self, d: Dart) -> Dart:
        """Clockwise successor of ``d`` in the rotation at its head."""
        return self._rot_next[d]

    def darts_at(self, v: int) -> tuple[Dart, ...]:
        return self.rotation[v]

    def degree(self, v: int) -> int:
        return len(self.rotation[v])

    def face_successor(self, d: Dart) -> Dart:
        return self._rot_next[d ^ 1]

    # -- derived maps -------------------------------------------------------------

    def dual(self) -> "DualGraph":
        """The dual map: one vertex per face, one edge per primal edge.

        Dual edge ``e`` keeps the id of primal edge ``e``; its slot-0 end is
        the face containing primal dart ``2e``.  The dual lives on the same
        surface (equal genus), and dualising twice gives back the primal map
        up to relabelling vertices by their minimum dart.
        """
        edges = [(self.face_of[2 * e], self.face_of[2 * e + 1])
                 for e in range(len(self.edges))]
        return DualGraph(len(self.faces), edges, self.faces, primal=self)

    def to_dot(self, cycles: Sequence[Sequence[Dart]] = ()) -> str:
        """Graphviz dump of the underlying multigraph; cycles get colors."""
        palette = ["red", "blue", "forestgreen", "orange", "purple", "brown"]
        color = {}
        for i, cyc in enumerate(cycles):
            for d in cyc:
                color[d >> 1] = palette[i % len(palette)]
        lines = ["graph embedded {"]
        for v in range(self.n):
            lines.append('  %d [label="%d"];' % (v, v))
        for e, (u, v) in enumerate(self.edges):
            attr = ' [color=%s]' % color[e] if e in color else ""
            lines.append("  %d -- %d%s;" % (u, v, attr))
        lines.append("}")
        return "\n".join(lines)


class DualGraph(EmbeddedGraph):
    """Dual map; ``primal`` points back at the graph it was derived from."""

    __slots__ = ("primal",)

    def __init__(self, n, edges, rotation, primal):
        self.primal = primal
        super().__init__(n, edges, rotation)


# ---------------------------------------------------------------------------
# cutting along vertex-disjoint cycles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutComponent:
    """One component of the surface cut along the given cycles.

    ``chi`` is the Euler characteristic of the compact surface-with-boundary,
    ``boundary`` lists the ``(cycle_index, side)`` circles bounding it, and
    ``faces`` the primal faces it consists of.
    """

    faces: frozenset
    chi: int
    boundary: tuple

    @property
    def is_disk(self) -> bool:
        return self.chi == 1 and len(self.boundary) == 1

    @property
    def is_annulus(self) -> bool:
        return self.chi == 0 and len(self.boundary) == 2

    @property
    def boundary_cycles(self) -> frozenset:
        return frozenset(i for i, _side in self.boundary)


@dataclass(frozen=True)
class CutComplex:
    """Result of :func:`cut_along`: components plus a side lookup.

    ``side_component[(i, s)]`` is the index of the component adjacent to side
    ``s`` (0 = traversal-dart side, 1 = reverse side) of input cycle ``i``.
    """

    components: tuple
    side_component: dict


def _cycle_vertices(graph: EmbeddedGraph, darts: Sequence[Dart]) -> list[int]:
    verts = []
    k = len(darts)
    if k == 0:
        raise PreconditionError("empty cycle")
    for i, d in enumerate(darts):
        if graph.tail(d) != graph.head(darts[(i + 1) % k]):
            raise PreconditionError("darts do not form a closed walk")
        verts.append(graph.head(d))
    if len(set(verts)) != len(verts):
        raise PreconditionError("cycle is not simple")
    return verts


def cut_along(graph: EmbeddedGraph,
              cycles: Sequence[Sequence[Dart]]) -> CutComplex:
    """Cut the surface along pairwise vertex-disjoint simple cycles.

    Components are computed without rebuilding the map: faces are grouped by
    dual connectivity through non-cycle edges, and for a component K the cut
    surface has ``chi(K) = #interior vertices - #interior edges + #faces``
    (the boundary copies of cycle vertices and edges cancel).  Each cycle
    contributes exactly two boundary circles, one per side.
    """
    cycles = [tuple(c) for c in cycles]
    all_verts: set[int] = set()
    cycle_edges: set[int] = set()
    for darts in cycles:
        vs = _cycle_vertices(graph, darts)
        if all_verts & set(vs):
            raise PreconditionError("cycles are not vertex-disjoint")
        all_verts.update(vs)
        cycle_edges.update(d >> 1 for d in darts)

    parent = list(range(len(graph.faces)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in range(len(graph.edges)):
        if e not in cycle_edges:
            a, b = find(graph.face_of[2 * e]), find(graph.face_of[2 * e + 1])
            if a != b:
                parent[a] = b

    roots = sorted({find(f) for f in range(len(graph.faces))})
    comp_index = {r: i for i, r in enumerate(roots)}
    n_comp = len(roots)

    side_component = {}
    boundary: list[list] = [[] for _ in range(n_comp)]
    for i, darts in enumerate(cycles):
        for side, ds in ((0, darts), (1, [d ^ 1 for d in darts])):
            comps = {comp_index[find(graph.face_of[d])] for d in ds}
            if len(comps) != 1:
                raise InternalInvariantError(
                    "one side of a cycle touches several components",
                    witness=(i, side, comps))
            k = comps.pop()
            side_component[(i, side)] = k
            boundary[k].append((i, side))

    faces_of = [[] for _ in range(n_comp)]
    for f in range(len(graph.faces)):
        faces_of[comp_index[find(f)]].append(f)
    chi = [len(fs) for fs in faces_of]
    for e in range(len(graph.edges)):
        if e not in cycle_edges:
            chi[comp_index[find(graph.face_of[2 * e])]] -= 1
    for v in range(graph.n):
        if v not in all_verts and graph.degree(v):
            k = comp_index[find(graph.face_of[graph.rotation[v][0]])]
            chi[k] += 1

    components = tuple(
        CutComponent(frozenset(faces_of[k]), chi[k], tuple(sorted(boundary[k])))
        for k in range(n_comp))
    return CutComplex(components, side_component)


# ---------------------------------------------------------------------------
# surgery primitives
# ---------------------------------------------------------------------------

def split_vertex(graph: EmbeddedGraph, v: int,
                 arc: Sequence[Dart]) -> EmbeddedGraph:
    """Split vertex ``v`` along a contiguous rotation arc.

    The darts of ``arc`` (a contiguous, non-empty, proper block of the
    rotation at ``v``, given in rotation order) move to a fresh vertex, and a
    bridge edge joins the two halves where the arc used to sit.  This is the
    inverse of contracting the bridge, so the genus never changes.
    """
    rot = list(graph.rotation[v])
    arc = [int(d) for d in arc]
    if not arc or len(arc) >= len(rot):
        raise PreconditionError("arc must be a non-empty proper block")
    try:
        start = rot.index(arc[0])
    except ValueError:
        raise PreconditionError("arc dart not at vertex %d" % v)
    for i, d in enumerate(arc):
        if rot[(start + i) % len(rot)] != d:
            raise PreconditionError("arc is not contiguous in the rotation")

    new_vertex = graph.n
    bridge = len(graph.edges)
    edges = [list(e) for e in graph.edges] + [[v, new_vertex]]
    for d in arc:
        edges[d >> 1][d & 1] = new_vertex
    keep = [rot[(start + len(arc) + i) % len(rot)]
            for i in range(len(rot) - len(arc))]
    rotation = [list(r) for r in graph.rotation]
    rotation[v] = [2 * bridge] + keep
    rotation.append([2 * bridge + 1] + arc)
    return EmbeddedGraph(graph.n + 1, edges, rotation)


def expand_edge(graph: EmbeddedGraph, e: int, k: int) -> tuple[EmbeddedGraph, list[int]]:
    """Replace edge ``e`` by an embedded band of ``k`` parallel edges.

    Returns the new graph and the edge ids of the parallels in band order;
    slot 0 of every parallel is the slot-0 endpoint of ``e``, and the first
    id in the list is ``e`` itself.  Bigons appear between neighbours in the
    band, so the genus is unchanged.
    """
    if k < 1:
        raise PreconditionError("need at least one parallel copy")
    m = len(graph.edges)
    u, v = graph.edges[e]
    ids = [e] + list(range(m, m + k - 1))
    edges = list(graph.edges) + [(u, v)] * (k - 1)
    rotation = [list(r) for r in graph.rotation]

    def replace(vertex, old, block):
        r = rotation[vertex]
        i = r.index(old)
        rotation[vertex] = r[:i] + block + r[i + 1:]

    replace(u, 2 * e, [2 * p for p in ids])
    if u == v:
        # loop: both darts live at the same vertex; handle the second dart on
        # the rotation as updated above
        r = rotation[u]
        i = r.index(2 * e + 1)
        rotation[u] = r[:i] + [2 * p + 1 for p in reversed(ids)] + r[i + 1:]
    else:
        replace(v, 2 * e + 1, [2 * p + 1 for p in reversed(ids)])
    return EmbeddedGraph(graph.n, edges, rotation), ids


def add_chord(graph: EmbeddedGraph, d1: Dart, d2: Dart) -> tuple[EmbeddedGraph, int]:
    """Add an edge across a face, between the corners after darts ``d1``, ``d2``.

    Both darts must lie on the same face and differ; the face splits in two,
    so the genus is unchanged.  The corner after dart ``d`` is at the vertex
    ``head(reverse(d))``.  Returns the new graph and the new edge id.
    """
    if d1 == d2:
        raise PreconditionError("chord needs two distinct corners")
    if graph.face_of[d1] != graph.face_of[d2]:
        raise PreconditionError("chord corners must lie on one face")
    w1, w2 = graph.head(d1 ^ 1), graph.head(d2 ^ 1)
    new_edge = len(graph.edges)
    edges = list(graph.edges) + [(w1, w2)]
    rotation = [list(r) for r in graph.rotation]
    i = rotation[w1].index(d1 ^ 1)
    rotation[w1].insert(i + 1, 2 * new_edge)
    j = rotation[w2].index(d2 ^ 1)
    rotation[w2].insert(j + 1, 2 * new_edge + 1)
    out = EmbeddedGraph(graph.n, edges, rotation)
    if out.genus != graph.genus:
        raise InternalInvariantError("chord changed the genus",
                                     witness=(d1, d2))
    return out, new_edge


# ---------------------------------------------------------------------------
# disjointifying a family of pairwise non-crossing cycles
# ---------------------------------------------------------------------------

def _shared_path_through(graph: EmbeddedGraph, edges1: set, edges2: set,
                         e: int):
    """Maximal common path of two simple cycles containing shared edge ``e``.

    Both cycles are simple, so consecutive shared edges meet at a common
    vertex and the common subgraph through ``e`` is a path.  Returns
    ``(ordered_edges, start_vertex)`` in a canonical direction: the path is
    walked so that its smallest-id edge is traversed slot0 -> slot1.
    """
    shared = edges1 & edges2
    inc: dict[int, list[int]] = {}
    for f in shared:
        for x in graph.edges[f]:
            inc.setdefault(x, []).append(f)

    def extend(start_edge, start_vertex):
        out = []
        cur_e, cur_v = start_edge, start_vertex
        seen = {start_edge}
        while True:
            nxt = [f for f in inc.get(cur_v, ()) if f != cur_e]
            if not nxt or nxt[0] in seen:
                return out, cur_v
            f = nxt[0]
            seen.add(f)
            out.append(f)
            a, b = graph.edges[f]
            cur_v = b if a == cur_v else a
            cur_e = f

    u, v = graph.edges[e]
    back, x_end = extend(e, u)
    fwd, y_end = extend(e, v)
    path = list(reversed(back)) + [e] + fwd
    start = x_end
    e0 = min(path)
    if _edge_direction(graph, path, start, e0) < 0:
        path = list(reversed(path))
        start = y_end
    return path, start


def _edge_direction(graph: EmbeddedGraph, order: list[int], start: int,
                    e: int) -> int:
    """+1 if walking ``order`` from ``start`` traverses ``e`` slot0 -> slot1."""
    cur_v = start
    for f in order:
        a, b = graph.edges[f]
        if f == e:
            return 1 if cur_v == a else -1
        cur_v = b if a == cur_v else a
    raise InternalInvariantError("edge missing from its own path", witness=e)


def _band_before(graph: EmbeddedGraph, cyc1: set, cyc2: set, e: int) -> int:
    """Relative band order of two cycles at shared edge ``e``.

    Returns -1 if cycle 1 sits before cycle 2 in the slot-0 insertion frame
    of ``e``, +1 for the opposite, 0 if the cycles coincide.  The relation is
    read off at the divergence end of their maximal common path: the cycle
    whose continuation dart is met first when scanning clockwise from the
    path's terminal dart lies on a fixed side of the band.
    """
    if cyc1 == cyc2:
        return 0
    path, start = _shared_path_through(graph, cyc1, cyc2, e)
    cur_v = start
    for f in path:
        a, b = graph.edges[f]
        cur_v = b if a == cur_v else a
    y = cur_v
    t = path[-1]
    p_y = 2 * t if graph.edges[t][0] == y else 2 * t + 1
    path_set = set(path)

    def out_dart(cyc: set) -> Dart:
        cands = [d for d in graph.rotation[y]
                 if (d >> 1) in cyc and (d >> 1) not in path_set]
        if len(cands) != 1:
            raise InternalInvariantError(
                "cycle does not leave the shared path cleanly",
                witness=(y, sorted(cyc), path))
        return cands[0]

    o1, o2 = out_dart(cyc1), out_dart(cyc2)
    rot = graph.rotation[y]
    i = rot.index(p_y)
    first_found = 0
    for step in range(1, len(rot)):
        d = rot[(i + step) % len(rot)]
        if d == o1:
            first_found = -1
            break
        if d == o2:
            first_found = 1
            break
    if first_found == 0:
        raise InternalInvariantError("divergence darts not found", witness=y)

    # Translate into the slot-0 insertion frame of e.  In the terminal
    # edge's frame the relation is first_found * dir(t); switching frames
    # multiplies by dir(t) * dir(e), so the dir(t) factors cancel.
    return first_found * _edge_direction(graph, path, start, e)


def disjointify(graph: EmbeddedGraph,
                cycles: Sequence[Sequence[Dart]]):
    """Re-route pairwise non-crossing simple cycles to vertex-disjoint ones.

    First every edge shared by several cycles is expanded into a band of
    parallels, ordered so that the strands never cross; then every vertex
    still shared by two or more (now edge-disjoint) cycles is split along a
    contiguous arc separating them.  Neither step changes the genus, and each
    output cycle stays freely homotopic to its input.

    Returns ``(new_graph, new_cycles)`` with cycles as dart tuples.
    Crossing inputs raise :class:`PreconditionError`.
    """
    cycles = [list(c) for c in cycles]
    for c in cycles:
        _cycle_vertices(graph, c)
    edge_sets = [set(d >> 1 for d in c) for c in cycles]

    # Step 1: expand shared edges, assigning one parallel per cycle.
    sharers: dict[int, list[int]] = {}
    for i, es in enumerate(edge_sets):
        for e in es:
            sharers.setdefault(e, []).append(i)
    plan = []
    for e, owners in sorted(sharers.items()):
        if len(owners) < 2:
            continue

        def cmp(i, j, _e=e):
            return _band_before(graph, edge_sets[i], edge_sets[j], _e)

        plan.append((e, sorted(owners, key=cmp_to_key(cmp))))

    g = graph
    for e, owners in plan:
        g, ids = expand_edge(g, e, len(owners))
        for slot, i in enumerate(owners):
            new_e = ids[slot]
            if new_e == e:
                continue
            cycles[i] = [
                (2 * new_e) | (d & 1) if (d >> 1) == e else d
                for d in cycles[i]
            ]

    # Step 2: split shared vertices until all cycles are vertex-disjoint.
    while True:
        at_vertex: dict[int, list[int]] = {}
        for i, c in enumerate(cycles):
            for d in c:
                at_vertex.setdefault(g.head(d), []).append(i)
        shared = sorted(v for v, owners in at_vertex.items() if len(owners) > 1)
        if not shared:
            break
        v = shared[0]
        owners = at_vertex[v]
        rot = list(g.rotation[v])
        c0 = owners[0]
        d_pair = _cycle_darts_at(g, cycles[c0], v)
        i1, i2 = sorted(rot.index(d) for d in d_pair)
        arc_a = rot[i1 + 1:i2]
        arc_b = rot[i2 + 1:] + rot[:i1]
        c1 = owners[1]
        c1_darts = _cycle_darts_at(g, cycles[c1], v)
        in_a = [d in arc_a for d in c1_darts]
        if all(in_a):
            arc = arc_a
        elif not any(in_a):
            arc = arc_b
        else:
            raise PreconditionError(
                "cycles cross at vertex %d; disjointify needs a "
                "non-crossing family" % v)
        if not arc:
            raise InternalInvariantError("empty separating arc", witness=v)
        g = split_vertex(g, v, arc)

    return g, [tuple(c) for c in cycles]


def edge_sets_of(cycle):
    return {d >> 1 for d in cycle}


def _cycle_darts_at(graph: EmbeddedGraph, cycle: Sequence[Dart], v: int) -> list[Dart]:
    out = [d for d in graph.rotation[v] if (d >> 1) in {x >> 1 for x in cycle}]
    if len(out) != 2:
        raise InternalInvariantError(
            "simple cycle must have exactly two darts at a vertex",
            witness=(v, cycle))
    return out


# ---------------------------------------------------------------------------
# map isomorphism
# ---------------------------------------------------------------------------

def canonical_form(graph: EmbeddedGraph) -> tuple:
    """Canonical signature of a connected combinatorial map.

    Darts are relabelled by a deterministic traversal (generators: rotation
    successor and reversal) from every possible start dart; the minimum
    resulting transition table is the signature.  Two maps are isomorphic as
    oriented embedded graphs iff their signatures coincide.
    """
    m2 = 2 * len(graph.edges)
    if m2 == 0:
        return (graph.n,)
    best = None
    for d0 in range(m2):
        label = {d0: 0}
        order = [d0]
        i = 0
        while i < len(order):
            d = order[i]
            for nxt in (graph._rot_next[d], d ^ 1):
                if nxt not in label:
                    label[nxt] = len(order)
                    order.append(nxt)
            i += 1
        sig = tuple((label[graph._rot_next[d]], label[d ^ 1]) for d in order)
        if best is None or sig < best:
            best = sig
    return best


def maps_isomorphic(a: EmbeddedGraph, b: EmbeddedGraph) -> bool:
    return canonical_form(a) == canonical_form(b)
