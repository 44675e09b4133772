"""Topological uncrossing of D-cycle multiflows.

Two simple cycles *cross* at a maximal shared subpath (possibly a single
vertex) when, after contracting the shared path, their four divergent edges
alternate around the contracted vertex.  ``uncross_all`` takes a discretized
multiflow (an integer multiset of D-cycles) and repeatedly reroutes pairs
that cross at least twice, swapping the cycle segments between two crossings,
until every pair crosses at most once.  Each rewrite preserves the multiset
size, never increases any edge load, and strictly decreases the potential
``(total edge count, total crossing count)`` lexicographically, which bounds
the number of iterations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InternalInvariantError, PreconditionError
from .flows import DCycle, Multiflow
from .instances import Instance
from .rational import QQ, ZERO, rat
from .surface import EmbeddedGraph, _cycle_darts_at


# ---------------------------------------------------------------------------
# crossings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharedPath:
    """A maximal common subpath of two cycles (single vertices allowed).

    ``is_crossing`` records whether the four divergent edges alternate around
    the contracted path; a non-alternating shared path is a touching.
    """

    vertices: tuple
    edges: tuple
    is_crossing: bool


def _cycle_edge_sets(darts: Sequence[int]):
    return {d >> 1 for d in darts}


def _merged_rotation(graph: EmbeddedGraph, verts: Sequence[int],
                     edges: Sequence[int]) -> list:
    """Rotation at the vertex obtained by contracting the given path.

    Contracting one edge with darts ``d`` (merged side) and ``d'`` splices the
    other endpoint's rotation, started right after ``d'``, into the merged
    list in place of ``d``; orientation is preserved because all rotations
    share the same (clockwise) sense.
    """
    merged = list(graph.rotation[verts[0]])
    absorbed = {verts[0]}
    for v, e in zip(verts[1:], edges):
        d, d_opp = 2 * e, 2 * e + 1
        if graph.head(d) not in absorbed:
            d, d_opp = d_opp, d
        rot = list(graph.rotation[v])
        j = rot.index(d_opp)
        seg = rot[j + 1:] + rot[:j]
        i = merged.index(d)
        merged = merged[:i] + seg + merged[i + 1:]
        absorbed.add(v)
    return merged


def shared_elements(graph: EmbeddedGraph, darts1: Sequence[int],
                    darts2: Sequence[int]) -> list:
    """All maximal shared subpaths of two simple cycles, classified.

    Returns them ordered by first appearance along ``darts1``.  Identical
    cycles (equal edge sets) share everything and cross nowhere; the result
    is empty in that case.
    """
    e1, e2 = _cycle_edge_sets(darts1), _cycle_edge_sets(darts2)
    if e1 == e2:
        return []
    v1 = {graph.head(d) for d in darts1}
    v2 = {graph.head(d) for d in darts2}
    sv = v1 & v2
    se = e1 & e2
    if not sv:
        return []

    inc: dict[int, list] = {v: [] for v in sv}
    for e in se:
        a, b = graph.edges[e]
        inc[a].append(e)
        inc[b].append(e)

    elements = []
    seen = set()
    for v0 in sv:
        if v0 in seen or len(inc[v0]) == 2:
            continue  # start walks only from path endpoints
        verts, edges = [v0], []
        seen.add(v0)
        cur, prev_e = v0, None
        while True:
            nxt = [e for e in inc[cur] if e != prev_e]
            if not nxt:
                break
            e = nxt[0]
            cur = graph.edges[e][0] if graph.edges[e][1] == cur \
                else graph.edges[e][1]
            verts.append(cur)
            edges.append(e)
            seen.add(cur)
            prev_e = e
        elements.append((tuple(verts), tuple(edges)))
    if len(seen) != len(sv):
        # a leftover component is a cycle of shared edges, i.e. both cycles
        # coincide, contradicting the edge-set check above
        raise InternalInvariantError("shared subgraph has a cycle component",
                                     witness=sorted(sv - seen))

    out = []
    for verts, edges in elements:
        a, b = verts[0], verts[-1]
        div1 = [d for d in _cycle_darts_at(graph, darts1, a) +
                (_cycle_darts_at(graph, darts1, b) if b != a else [])
                if (d >> 1) not in se]
        div2 = [d for d in _cycle_darts_at(graph, darts2, a) +
                (_cycle_darts_at(graph, darts2, b) if b != a else [])
                if (d >> 1) not in se]
        if len(div1) != 2 or len(div2) != 2:
            raise InternalInvariantError(
                "shared path does not have two divergent darts per cycle",
                witness=(verts, div1, div2))
        merged = _merged_rotation(graph, verts, edges)
        four = [d for d in merged if d in set(div1) | set(div2)]
        labels = [d in set(div1) for d in four]
        alternating = len(four) == 4 and labels[0] != labels[1] \
            and labels[1] != labels[2] and labels[2] != labels[3]
        out.append(SharedPath(verts, edges, alternating))

    # order by first appearance along darts1
    pos = {graph.head(d): i for i, d in reversed(list(enumerate(darts1)))}
    out.sort(key=lambda s: min(pos[v] for v in s.vertices))
    return out


def crossings(graph: EmbeddedGraph, darts1: Sequence[int],
              darts2: Sequence[int]) -> list:
    return [s for s in shared_elements(graph, darts1, darts2)
            if s.is_crossing]


def cr(graph: EmbeddedGraph, darts1: Sequence[int],
       darts2: Sequence[int]) -> int:
    """Number of crossings of two simple cycles."""
    return len(crossings(graph, darts1, darts2))


# ---------------------------------------------------------------------------
# discretization
# ---------------------------------------------------------------------------

def discretize(flow: Multiflow, epsilon) -> tuple:
    """Round the flow down to integer multiples of a quantum.

    The quantum is ``epsilon * |f| / (|E| * |D|)``, so the loss is at most
    ``epsilon * |f|`` whenever the support has size at most ``|E| * |D|``.
    Returns ``(counts, quantum)`` where counts maps each D-cycle to the
    integer number of quanta it carries.
    """
    epsilon = rat(epsilon)
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    total = flow.value
    if total == 0:
        return {}, ZERO
    inst = flow.instance
    quantum = epsilon * total / (len(inst.graph.edges)
                                 * max(1, len(inst.demand_edges)))
    counts = {}
    for c, v in flow.values.items():
        k = int(v / quantum)
        if k:
            counts[c] = k
    return counts, quantum


def multiset_value(counts: dict, quantum) -> QQ:
    return sum(counts.values()) * quantum if counts else ZERO


def multiset_to_flow(instance: Instance, counts: dict, quantum) -> Multiflow:
    flow = Multiflow(instance)
    for c, k in counts.items():
        flow.set(c, k * quantum)
    return flow


def multiset_edge_loads(counts: dict) -> dict:
    loads: dict[int, int] = {}
    for c, k in counts.items():
        for e in c.edge_set:
            loads[e] = loads.get(e, 0) + k
    return loads


# ---------------------------------------------------------------------------
# the uncrossing operation
# ---------------------------------------------------------------------------

def _reverse_cycle(darts: Sequence[int]) -> tuple:
    return tuple(d ^ 1 for d in reversed(darts))


def _rotate_to(darts: Sequence[int], i: int) -> tuple:
    return tuple(darts[i:]) + tuple(darts[:i])


def _orient_demand_before(graph: EmbeddedGraph, darts, path: SharedPath,
                          q_verts: set, demand: int):
    """Orient a cycle so that, traversing all of the shared path and then
    walking onward, the demand edge is met before any vertex of ``q_verts``.

    Returns the oriented cycle rotated to start at the first path vertex.
    """
    pv = set(path.vertices)
    for seq in (tuple(darts), _reverse_cycle(darts)):
        n = len(seq)
        start = None
        for i, d in enumerate(seq):
            if graph.head(d) in pv and graph.head(seq[i - 1]) not in pv:
                start = i
                break
        if start is None:
            raise InternalInvariantError("shared path spans the whole cycle",
                                         witness=path)
        seq = _rotate_to(seq, start)
        ok = None
        for d in seq:
            if (d >> 1) == demand:
                ok = True
                break
            if graph.tail(d) in q_verts:
                ok = False
                break
        if ok:
            return seq
    raise InternalInvariantError(
        "no orientation reaches the demand edge before the second crossing",
        witness=(tuple(darts), path, tuple(sorted(q_verts))))


def _orient_agree_on_path(graph: EmbeddedGraph, darts,
                          path: SharedPath, first_vertex: int):
    """Orient a cycle so it traverses the shared path starting at the given
    end, rotated to start there."""
    pv = set(path.vertices)
    for seq in (tuple(darts), _reverse_cycle(darts)):
        for i, d in enumerate(seq):
            if graph.head(d) == first_vertex \
                    and graph.head(seq[i - 1]) not in pv:
                return _rotate_to(seq, i)
    raise InternalInvariantError("cycle does not enter the shared path at "
                                 "the requested end", witness=path)


def _split_at(graph: EmbeddedGraph, seq, b: int) -> tuple:
    """Split an oriented cycle starting at ``a`` into the ``a -> b`` prefix
    and the ``b -> a`` suffix."""
    for i, d in enumerate(seq):
        if graph.tail(d) == b:
            return seq[:i + 1], seq[i + 1:]
    raise InternalInvariantError("split vertex not on cycle", witness=b)


def _extract_demand_cycle(graph: EmbeddedGraph, walk,
                          demand: int) -> tuple:
    """Simple cycle through the demand edge contained in a closed walk.

    Starts at the demand dart and keeps a stack of darts, popping any loop
    that returns to an already-visited vertex; terminates on returning to
    the start vertex.  Discarded loops are exactly the demand-free cycles.
    """
    try:
        k = next(i for i, d in enumerate(walk) if (d >> 1) == demand)
    except StopIteration:
        raise InternalInvariantError(
            "rerouted walk lost its demand edge", witness=tuple(walk))
    walk = _rotate_to(tuple(walk), k)
    start = graph.head(walk[0])
    stack = []
    arrived = {}
    for d in walk:
        stack.append(d)
        v = graph.tail(d)
        if v == start:
            return tuple(stack)
        if v in arrived:
            idx = arrived[v]
            for dd in stack[idx + 1:]:
                arrived.pop(graph.tail(dd), None)
            del stack[idx + 1:]
            arrived[v] = idx
        else:
            arrived[v] = len(stack) - 1
    raise InternalInvariantError("walk is not closed", witness=tuple(walk))


def uncross_pair(instance: Instance, c1: DCycle, c2: DCycle,
                 p: SharedPath, q: SharedPath) -> tuple:
    """One uncrossing rewrite of two cycles at crossings ``p`` and ``q``.

    ``q`` must contain no demand edge.  Returns the two replacement
    D-cycles; together they use a sub-multiset of the original edges, so
    every edge load weakly decreases.
    """
    g = instance.graph
    if any(instance.is_demand(e) for e in q.edges):
        raise PreconditionError("second crossing must avoid demand edges")
    q_verts = set(q.vertices)

    o1 = _orient_demand_before(g, c1.darts, p, q_verts, c1.demand)
    a = g.head(o1[0])
    # b: first vertex of q met when walking the oriented first cycle from a
    b = next(g.tail(d) for d in o1 if g.tail(d) in q_verts)

    if any(instance.is_demand(e) for e in p.edges):
        o2 = _orient_agree_on_path(g, c2.darts, p, a)
    else:
        o2 = _orient_demand_before(g, c2.darts, p, q_verts, c2.demand)
        # the second cycle may enter the shared path at the other end; only
        # the split vertices a and b matter, so re-root the orientation at a
        o2 = _rotate_to(o2, next(i for i, d in enumerate(o2)
                                 if g.head(d) == a))

    c1_plus, c1_minus = _split_at(g, o1, b)
    c2_plus, c2_minus = _split_at(g, o2, b)
    new1 = _extract_demand_cycle(g, c1_plus + c2_minus, c1.demand)
    new2 = _extract_demand_cycle(g, c2_plus + c1_minus, c2.demand)
    return (DCycle.from_darts(instance, new1),
            DCycle.from_darts(instance, new2))


# ---------------------------------------------------------------------------
# the full loop
# ---------------------------------------------------------------------------

def _pick_crossings(instance: Instance, c1: DCycle, c2: DCycle, cross):
    """Deterministic choice of the two crossings to uncross at.

    The crossing containing the (necessarily shared) demand edge is
    preferred as the first one; the second is the next crossing, in order
    along the first cycle, that avoids demand edges.
    """
    demand_cross = [s for s in cross
                    if any(instance.is_demand(e) for e in s.edges)]
    p = demand_cross[0] if demand_cross else cross[0]
    q = next(s for s in cross
             if s is not p
             and not any(instance.is_demand(e) for e in s.edges))
    return p, q


class UncrossTrace:
    """Per-iteration record of the potential, for invariant checking."""

    def __init__(self):
        self.steps = []  # (phi1, phi2) after each rewrite

    def record(self, phi1: int, phi2: int):
        self.steps.append((phi1, phi2))


def _potentials(graph: EmbeddedGraph, counts: dict, cr_cache: dict):
    phi1 = sum(k * len(c) for c, k in counts.items())
    phi2 = 0
    cycles = list(counts)
    for i, ci in enumerate(cycles):
        for cj in cycles[i + 1:]:
            phi2 += 2 * counts[ci] * counts[cj] * _cr_cached(
                graph, ci, cj, cr_cache)
    return phi1, phi2


def _cr_cached(graph: EmbeddedGraph, c1: DCycle, c2: DCycle,
               cache: dict) -> int:
    key = (c1.darts, c2.darts) if c1.darts <= c2.darts \
        else (c2.darts, c1.darts)
    if key not in cache:
        cache[key] = cr(graph, c1.darts, c2.darts)
    return cache[key]


def uncross_all(instance: Instance, counts: dict,
                check_invariants: bool = False) -> tuple:
    """Rewrite the multiset until every pair of cycles crosses at most once.

    Returns ``(counts, trace)``.  With ``check_invariants`` the multiset
    size, every edge load, and the lexicographic decrease of the potential
    are verified after every rewrite (slow; intended for tests).
    """
    g = instance.graph
    counts = dict(counts)
    cache: dict = {}
    trace = UncrossTrace()
    size0 = sum(counts.values())
    loads0 = multiset_edge_loads(counts)
    phi = _potentials(g, counts, cache) if check_invariants else None

    guard = 0
    limit = 16 * (sum(k * len(c) for c, k in counts.items()) + 1) ** 2
    while True:
        guard += 1
        if guard > limit:
            raise InternalInvariantError("uncrossing failed to terminate",
                                         witness=guard)
        pair = None
        cycles = list(counts)
        for i, ci in enumerate(cycles):
            for cj in cycles[i + 1:]:
                if _cr_cached(g, ci, cj, cache) >= 2:
                    pair = (ci, cj)
                    break
            if pair:
                break
        if pair is None:
            break
        c1, c2 = pair
        cross = crossings(g, c1.darts, c2.darts)
        p, q = _pick_crossings(instance, c1, c2, cross)
        new1, new2 = uncross_pair(instance, c1, c2, p, q)
        for c in (c1, c2):
            counts[c] -= 1
            if counts[c] == 0:
                del counts[c]
        for c in (new1, new2):
            counts[c] = counts.get(c, 0) + 1

        if check_invariants:
            if sum(counts.values()) != size0:
                raise InternalInvariantError("multiset size changed")
            loads = multiset_edge_loads(counts)
            for e, k in loads.items():
                if k > loads0.get(e, 0):
                    raise InternalInvariantError(
                        "edge load increased during uncrossing",
                        witness=(e, k, loads0.get(e, 0)))
            new_phi = _potentials(g, counts, cache)
            if not (new_phi < phi):
                raise InternalInvariantError(
                    "potential did not decrease", witness=(phi, new_phi))
            phi = new_phi
            trace.record(*new_phi)
    return counts, trace


def uncross_flow(flow: Multiflow, epsilon,
                 check_invariants: bool = False) -> Multiflow:
    """Discretize and fully uncross a multiflow.

    The result has value at least ``(1 - epsilon)`` times the input value
    and any two cycles in its support cross at most once.
    """
    counts, quantum = discretize(flow, epsilon)
    counts, _ = uncross_all(flow.instance, counts, check_invariants)
    out = multiset_to_flow(flow.instance, counts, quantum)
    out.verify_feasible()
    return out
