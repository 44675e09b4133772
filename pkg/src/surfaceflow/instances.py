"""Problem instances: embedded supply+demand graphs with capacities.

Wire format (JSON)::

    {"vertices": n,
     "edges": [{"id": 0, "u": 0, "v": 1, "kind": "supply", "cap": 1}, ...],
     "rotation": [[dart ids, clockwise], ...]}

Edge ids must be dense (``0..m-1``, listed in order); the dart of edge ``e``
attached to ``u`` is ``2e``, the one attached to ``v`` is ``2e+1``.
Serialization is byte-deterministic so generated instances can be used as
golden files.

The generators produce the instance families used by the test-suite and the
CLI: the ring-and-radial gap family (fractional/integral gap ``n`` on genus
``>= n``), toroidal grids with demand chords, and random planar instances
grown by face chords (always genus 0).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InstanceFormatError, InternalInvariantError, StructuralError
from .surface import EmbeddedGraph, add_chord, split_vertex

SUPPLY = "supply"
DEMAND = "demand"


@dataclass(frozen=True)
class Instance:
    """An embedded multiflow instance.

    ``graph`` is the map of supply and demand edges together; ``kinds`` and
    ``caps`` are indexed by edge id.  Capacities are positive integers.
    """

    graph: EmbeddedGraph
    kinds: tuple
    caps: tuple

    def __post_init__(self):
        m = len(self.graph.edges)
        if len(self.kinds) != m or len(self.caps) != m:
            raise InstanceFormatError("schema", "kind/cap lists must match edges")
        for e in range(m):
            if self.kinds[e] not in (SUPPLY, DEMAND):
                raise InstanceFormatError(
                    "schema", "edge %d has unknown kind %r" % (e, self.kinds[e]))
            if not isinstance(self.caps[e], int) or isinstance(self.caps[e], bool):
                raise InstanceFormatError(
                    "schema", "edge %d capacity must be an integer" % e)
            if self.caps[e] < 1:
                raise InstanceFormatError(
                    "capacity", "edge %d has non-positive capacity" % e)

    @property
    def demand_edges(self) -> tuple:
        return tuple(e for e, k in enumerate(self.kinds) if k == DEMAND)

    @property
    def supply_edges(self) -> tuple:
        return tuple(e for e, k in enumerate(self.kinds) if k == SUPPLY)

    def cap(self, e: int) -> int:
        return self.caps[e]

    def is_demand(self, e: int) -> bool:
        return self.kinds[e] == DEMAND

    def with_caps(self, caps: Sequence[int]) -> "Instance":
        return Instance(self.graph, self.kinds, tuple(caps))


def parse_instance(data) -> Instance:
    """Parse and validate the wire format (a JSON string or a parsed dict)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError("schema", "invalid JSON: %s" % exc)
    if not isinstance(data, dict):
        raise InstanceFormatError("schema", "instance must be a JSON object")
    for key in ("vertices", "edges", "rotation"):
        if key not in data:
            raise InstanceFormatError("schema", "missing field %r" % key)
    n = data["vertices"]
    if not isinstance(n, int) or n < 1:
        raise InstanceFormatError("schema", "vertices must be a positive int")
    raw_edges = data["edges"]
    if not isinstance(raw_edges, list):
        raise InstanceFormatError("schema", "edges must be a list")
    edges, kinds, caps = [], [], []
    for i, rec in enumerate(raw_edges):
        if not isinstance(rec, dict):
            raise InstanceFormatError("schema", "edge %d must be an object" % i)
        for key in ("id", "u", "v", "kind", "cap"):
            if key not in rec:
                raise InstanceFormatError(
                    "schema", "edge %d missing field %r" % (i, key))
        if rec["id"] != i:
            raise InstanceFormatError(
                "schema", "edge ids must be dense and ordered (got %r at "
                "position %d)" % (rec["id"], i))
        if not isinstance(rec["u"], int) or not isinstance(rec["v"], int):
            raise InstanceFormatError("schema", "edge %d endpoints must be ints" % i)
        if rec["kind"] not in (SUPPLY, DEMAND):
            raise InstanceFormatError("schema", "edge %d has bad kind" % i)
        if not isinstance(rec["cap"], int) or isinstance(rec["cap"], bool):
            raise InstanceFormatError("schema", "edge %d cap must be an int" % i)
        edges.append((rec["u"], rec["v"]))
        kinds.append(rec["kind"])
        caps.append(rec["cap"])
    rotation = data["rotation"]
    if not isinstance(rotation, list) or any(
            not isinstance(r, list) for r in rotation):
        raise InstanceFormatError("rotation", "rotation must be a list of lists")
    try:
        graph = EmbeddedGraph(n, edges, rotation)
    except StructuralError as exc:
        msg = str(exc)
        if "disconnected" in msg:
            raise InstanceFormatError("disconnected", msg)
        if "dart" in msg or "rotation" in msg or "omits" in msg:
            raise InstanceFormatError("rotation", msg)
        raise InstanceFormatError("schema", msg)
    return Instance(graph, tuple(kinds), tuple(caps))


def serialize_instance(inst: Instance) -> str:
    """Deterministic JSON for an instance (stable bytes for fixed input)."""
    g = inst.graph
    doc = {
        "vertices": g.n,
        "edges": [
            {"id": e, "u": u, "v": v, "kind": inst.kinds[e],
             "cap": inst.caps[e]}
            for e, (u, v) in enumerate(g.edges)
        ],
        "rotation": [list(r) for r in g.rotation],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(inst))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def generate_gap_family(n: int) -> Instance:
    """Ring-and-radial family with fractional value ``n`` but integral
    optimum 1.

    ``n`` concentric rings on ``4n`` spokes; spoke ``k`` ends at an outer
    terminal, and terminal ``k`` is paired with the antipodal terminal
    ``k + 2n``.  Every vertex of degree four is then split into two
    degree-three vertices joined by a bridge, so that two edge-disjoint
    transit paths can never share a vertex.  All capacities are 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cols = 4 * n

    def ring_vertex(r, k):  # r in 1..n
        return (r - 1) * cols + (k % cols)

    def terminal(k):
        return n * cols + (k % cols)

    edges = []
    kinds = []
    ring_edge = {}
    for r in range(1, n + 1):
        for k in range(cols):
            ring_edge[(r, k)] = len(edges)
            edges.append((ring_vertex(r, k), ring_vertex(r, k + 1)))
            kinds.append(SUPPLY)
    radial_edge = {}
    for k in range(cols):
        radial_edge[(n + 1, k)] = len(edges)  # terminal spoke segment
        edges.append((terminal(k), ring_vertex(n, k)))
        kinds.append(SUPPLY)
        for r in range(n, 1, -1):
            radial_edge[(r, k)] = len(edges)
            edges.append((ring_vertex(r, k), ring_vertex(r - 1, k)))
            kinds.append(SUPPLY)
    for k in range(2 * n):
        edges.append((terminal(k), terminal(k + 2 * n)))
        kinds.append(DEMAND)

    # clockwise rotations from the concentric drawing:
    # at a ring vertex: outward spoke, previous ring edge, inward spoke,
    # next ring edge.
    rotation = [None] * (n * cols + cols)
    for r in range(1, n + 1):
        for k in range(cols):
            out = (2 * radial_edge[(r + 1, k)] + 1)
            nxt = 2 * ring_edge[(r, k)]
            prv = 2 * ring_edge[(r, (k - 1) % cols)] + 1
            rot = [out, prv]
            if r > 1:
                rot.append(2 * radial_edge[(r, k)])
            rot.append(nxt)
            rotation[ring_vertex(r, k)] = rot
    for k in range(cols):
        demand_id = len(edges) - 2 * n + (k % (2 * n))
        slot = 0 if k < 2 * n else 1
        rotation[terminal(k)] = [2 * radial_edge[(n + 1, k)],
                                 2 * demand_id + slot]
    graph = EmbeddedGraph(n * cols + cols, edges, rotation)

    # split every degree-4 vertex along the (inward, next-ring) arc
    for r in range(2, n + 1):
        for k in range(cols):
            v = ring_vertex(r, k)
            rot = graph.rotation[v]
            # arc = the two darts after [out, prev]: inward spoke + next ring
            arc = [d for d in rot
                   if d == 2 * radial_edge[(r, k)] or d == 2 * ring_edge[(r, k)]]
            i1, i2 = rot.index(arc[0]), rot.index(arc[1])
            if (i1 + 1) % len(rot) != i2:
                arc = [arc[1], arc[0]]
            graph = split_vertex(graph, v, arc)
            kinds.append(SUPPLY)
    caps = tuple(1 for _ in range(len(graph.edges)))
    return Instance(graph, tuple(kinds), caps)


def _torus_map(p: int, q: int) -> EmbeddedGraph:
    def vid(i, j):
        return (i % p) * q + (j % q)

    edges = []
    right, down = {}, {}
    for i in range(p):
        for j in range(q):
            right[(i, j)] = len(edges)
            edges.append((vid(i, j), vid(i, j + 1)))
    for i in range(p):
        for j in range(q):
            down[(i, j)] = len(edges)
            edges.append((vid(i, j), vid(i + 1, j)))
    rotation = []
    for i in range(p):
        for j in range(q):
            rotation.append([2 * down[((i - 1) % p, j)] + 1,
                             2 * right[(i, j)],
                             2 * down[(i, j)],
                             2 * right[(i, (j - 1) % q)] + 1])
    return EmbeddedGraph(p * q, edges, rotation)


def generate_torus_grid(p: int, q: int, demands, cap_mode: str = "unit",
                        seed: int = 0) -> Instance:
    """A ``p x q`` toroidal grid plus demand chords.

    ``demands`` is either an integer (that many random demand pairs) or an
    explicit list of vertex pairs.  Each demand edge is embedded in a common
    face of its endpoints when one exists (keeping genus 1), otherwise its
    darts are inserted at a fixed rotation position, which may raise the
    genus of the combined map by one.  ``cap_mode`` is ``"unit"`` (all 1) or
    ``"random"`` (supply capacities uniform in 1..5).  Deterministic in
    ``seed``.
    """
    if p < 3 or q < 3:
        raise ValueError("toroidal grid needs p, q >= 3")
    rng = random.Random(seed)
    graph = _torus_map(p, q)
    n_supply = len(graph.edges)
    if isinstance(demands, int):
        pairs = []
        while len(pairs) < demands:
            u = rng.randrange(p * q)
            v = rng.randrange(p * q)
            if u != v and (u, v) not in pairs and (v, u) not in pairs:
                pairs.append((u, v))
    else:
        pairs = [tuple(x) for x in demands]
    for u, v in pairs:
        graph = _insert_chord_edge(graph, u, v)
    kinds = tuple([SUPPLY] * n_supply + [DEMAND] * len(pairs))
    if cap_mode == "unit":
        caps = tuple(1 for _ in graph.edges)
    elif cap_mode == "random":
        caps = tuple(rng.randint(1, 5) if k == SUPPLY else rng.randint(1, 3)
                     for k in kinds)
    else:
        raise ValueError("cap_mode must be 'unit' or 'random'")
    return Instance(graph, kinds, caps)


def _insert_chord_edge(graph: EmbeddedGraph, u: int, v: int) -> EmbeddedGraph:
    """Add an edge u-v: inside a shared face if possible, else at fixed
    rotation positions (which may add a handle)."""
    for face in graph.faces:
        d1 = d2 = None
        for d in face:
            w = graph.head(d ^ 1)
            if w == u and d1 is None:
                d1 = d
            elif w == v and d2 is None:
                d2 = d
        if d1 is not None and d2 is not None:
            g, _e = add_chord(graph, d1, d2)
            return g
    e = len(graph.edges)
    edges = list(graph.edges) + [(u, v)]
    rotation = [list(r) for r in graph.rotation]
    rotation[u].append(2 * e)
    rotation[v].append(2 * e + 1)
    return EmbeddedGraph(graph.n, edges, rotation)


def generate_planar_random(size: int, seed: int = 0,
                           cap_mode: str = "random",
                           n_demands: int | None = None) -> Instance:
    """Random planar instance with about ``size`` edges (genus always 0).

    Grown from a cycle by adding chords across random faces; demand edges
    are chords too, so the combined map stays planar.  Deterministic in
    ``seed``.
    """
    if size < 6:
        raise ValueError("size must be >= 6")
    rng = random.Random(seed)
    k = rng.randint(4, max(4, min(8, size // 2)))
    edges = [(i, (i + 1) % k) for i in range(k)]
    rotation = [[2 * ((i - 1) % k) + 1, 2 * i] for i in range(k)]
    graph = EmbeddedGraph(k, edges, rotation)
    if n_demands is None:
        n_demands = rng.randint(1, 3)
    n_supply_chords = max(0, size - k - n_demands)
    for _ in range(n_supply_chords):
        graph = _random_chord(graph, rng) or graph
    n_supply = len(graph.edges)
    added = 0
    guard = 0
    while added < n_demands and guard < 200:
        guard += 1
        g2 = _random_chord(graph, rng, distinct_endpoints=True)
        if g2 is not None:
            graph = g2
            added += 1
    kinds = tuple([SUPPLY] * n_supply + [DEMAND] * added)
    if cap_mode == "unit":
        caps = tuple(1 for _ in graph.edges)
    else:
        caps = tuple(rng.randint(1, 5) if kd == SUPPLY else rng.randint(1, 2)
                     for kd in kinds)
    inst = Instance(graph, kinds, caps)
    if inst.graph.genus != 0:
        raise InternalInvariantError(
            "planar generator produced genus %d" % inst.graph.genus)
    return inst


def _random_chord(graph: EmbeddedGraph, rng: random.Random,
                  distinct_endpoints: bool = False):
    faces = [f for f in graph.faces if len(f) >= 2]
    if not faces:
        return None
    for _attempt in range(20):
        face = faces[rng.randrange(len(faces))]
        i, j = rng.sample(range(len(face)), 2)
        d1, d2 = face[i], face[j]
        if distinct_endpoints and graph.head(d1 ^ 1) == graph.head(d2 ^ 1):
            continue
        g, _e = add_chord(graph, d1, d2)
        return g
    return None
