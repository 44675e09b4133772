"""Rounding the separating part of a multiflow to an integral one.

Pipeline: a laminar multiflow on separating cycles is first re-optimized
over its own support to a vertex solution, which is half-integral; integer
parts are banked and the remaining half-cycles are moved onto parallel unit
edges so that every parallel carries at most two halves.  Cycles sharing a
parallel form an intersection graph that embeds on the same surface, so a
degeneracy-greedy coloring needs at most ``chi(g)`` colors (five for the
plane, with an exact five-coloring fallback); the largest color class is
routed at value one on top of the banked flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Sequence

from .errors import InternalInvariantError, PreconditionError
from .flows import DCycle, Multiflow
from .instances import Instance
from .lp import _simplex_exact
from .rational import QQ, ZERO, floor_rat, rat
from .surface import expand_edge
from .topology import inside_faces


def heawood_bound(genus: int) -> int:
    """Chromatic bound for graphs of the given positive genus."""
    if genus < 1:
        raise PreconditionError("bound applies to positive genus")
    return (7 + math.isqrt(1 + 48 * genus)) // 2


def color_limit(genus: int) -> int:
    """Colors we guarantee: five in the plane (greedy on a 5-degenerate
    graph plus an exact fallback), the map color bound otherwise."""
    return 5 if genus == 0 else heawood_bound(genus)


# ---------------------------------------------------------------------------
# half-integralization
# ---------------------------------------------------------------------------

def half_integralize(flow: Multiflow) -> Multiflow:
    """Best multiflow on the same support with half-integral values.

    Re-solves the capacity LP restricted to the support with the exact
    simplex; the resulting vertex is half-integral for laminar separating
    supports.  Small supports fall back to exhaustive search over
    half-integral vectors if the vertex ever fails the check.
    """
    inst = flow.instance
    cycles = flow.support()
    if not cycles:
        return Multiflow(inst)
    rows, caps = _capacity_rows(inst, cycles)
    x, _, _ = _simplex_exact([rat(1)] * len(cycles), rows, caps, [], [])
    if all(2 * v == int(2 * v) for v in x):
        out = Multiflow(inst)
        for c, v in zip(cycles, x):
            out.set(c, v)
    elif len(cycles) <= 12:
        out = _enumerate_half_integral(inst, cycles)
    else:
        raise InternalInvariantError(
            "restricted LP vertex is not half-integral", witness=x)
    out.verify_feasible()
    if 2 * out.value < flow.value:
        raise InternalInvariantError(
            "half-integral flow below half the input value",
            witness=(out.value, flow.value))
    return out


def _capacity_rows(inst: Instance, cycles: Sequence[DCycle]):
    edge_rows: dict[int, dict] = {}
    for i, c in enumerate(cycles):
        for e in c.edge_set:
            edge_rows.setdefault(e, {})[i] = rat(1)
    items = sorted(edge_rows.items())
    return [row for _, row in items], [rat(inst.cap(e)) for e, _ in items]


def _enumerate_half_integral(inst: Instance,
                             cycles: Sequence[DCycle]) -> Multiflow:
    half = rat("1/2")
    caps = {e: rat(inst.cap(e)) for c in cycles for e in c.edge_set}
    best_vec, best_val = None, rat(-1)

    def recurse(i, vec, val):
        nonlocal best_vec, best_val
        bound = val
        for c in cycles[i:]:
            bound += min(caps[e] for e in c.edge_set)
        if bound <= best_val:
            return
        if i == len(cycles):
            if val > best_val:
                best_val, best_vec = val, list(vec)
            return
        c = cycles[i]
        top = min(caps[e] for e in c.edge_set)
        k = int(top / half)
        for steps in range(k, -1, -1):
            v = steps * half
            for e in c.edge_set:
                caps[e] -= v
            vec.append(v)
            recurse(i + 1, vec, val + v)
            vec.pop()
            for e in c.edge_set:
                caps[e] += v

    recurse(0, [], ZERO)
    out = Multiflow(inst)
    for c, v in zip(cycles, best_vec):
        out.set(c, v)
    return out


# ---------------------------------------------------------------------------
# reduction to the unit-capacity setting
# ---------------------------------------------------------------------------

@dataclass
class UnitReduction:
    """Banked integer parts plus the residual half-cycles on unit parallels.

    ``unit_instance`` carries one unit-capacity parallel per two residual
    half-cycles on each edge; ``unit_cycles[i]`` is the re-routed copy of
    ``orig_cycles[i]``; ``orig_of`` maps every unit edge back to the edge of
    the original instance it came from.
    """

    banked: Multiflow
    unit_instance: Instance = None
    unit_cycles: list = field(default_factory=list)
    orig_cycles: list = field(default_factory=list)
    orig_of: dict = field(default_factory=dict)


def reduce_to_unit(flow_half: Multiflow) -> UnitReduction:
    """Split off integer parts and move residual halves to unit parallels.

    Residual cycles claim strands innermost-first on each shared edge, two
    halves per parallel, which keeps the re-routed family non-crossing.
    """
    inst = flow_half.instance
    g = inst.graph
    banked = Multiflow(inst)
    residual = []
    for c in flow_half.support():
        v = flow_half.values[c]
        ip = floor_rat(v)
        if v - ip not in (ZERO, rat("1/2")):
            raise PreconditionError("flow is not half-integral")
        if ip:
            banked.set(c, ip)
        if v - ip:
            residual.append(c)
    red = UnitReduction(banked)
    if not residual:
        return red

    insides = {c: inside_faces(g, c.darts) for c in residual}
    users: dict[int, list] = {}
    for c in residual:
        for e in c.edge_set:
            users.setdefault(e, []).append(c)
    banked_loads = banked.edge_loads()
    for e, cs in users.items():
        need = (len(cs) + 1) // 2
        if need + banked_loads.get(e, ZERO) > inst.cap(e):
            raise InternalInvariantError(
                "residual halves exceed leftover capacity",
                witness=(e, len(cs)))

    # strand order along each edge: cycles whose inside touches the face of
    # the traversal dart first (innermost first), then the others outermost
    # first; nesting makes each group a chain
    def strand_order(e, cs):
        f0 = g.face_of[2 * e]
        side0 = [c for c in cs if f0 in insides[c]]
        side1 = [c for c in cs if c not in set(side0)]
        key = lambda c: (len(insides[c]), c.darts)
        return sorted(side0, key=key) + sorted(side1, key=key, reverse=True)

    graph = g
    band_of: dict[int, list] = {}
    orig_of = {e: e for e in range(len(g.edges))}
    for e in sorted(users):
        k = (len(users[e]) + 1) // 2
        if k == 1:
            band_of[e] = [e]
            continue
        graph, ids = expand_edge(graph, e, k)
        band_of[e] = ids
        for p in ids:
            orig_of[p] = e
    kinds = tuple(inst.kinds[orig_of[e]] for e in range(len(graph.edges)))
    unit_inst = Instance(graph, kinds, (1,) * len(graph.edges))

    assign: dict[tuple, int] = {}
    for e, cs in users.items():
        for i, c in enumerate(strand_order(e, cs)):
            assign[(e, c)] = band_of[e][i // 2]
    unit_cycles = []
    for c in residual:
        darts = tuple(2 * assign[(d >> 1, c)] + (d & 1) for d in c.darts)
        unit_cycles.append(DCycle.from_darts(unit_inst, darts))

    red.unit_instance = unit_inst
    red.unit_cycles = unit_cycles
    red.orig_cycles = list(residual)
    red.orig_of = orig_of
    unit_flow = Multiflow(unit_inst)
    for c in unit_cycles:
        unit_flow.add(c, rat("1/2"))
    unit_flow.verify_feasible()
    return red


# ---------------------------------------------------------------------------
# coloring and selection
# ---------------------------------------------------------------------------

def intersection_adjacency(cycles: Sequence[DCycle]) -> list:
    """Adjacency lists: two cycles are adjacent iff they share an edge."""
    adj = [set() for _ in cycles]
    by_edge: dict[int, list] = {}
    for i, c in enumerate(cycles):
        for e in c.edge_set:
            by_edge.setdefault(e, []).append(i)
    for ids in by_edge.values():
        for i in ids:
            for j in ids:
                if i != j:
                    adj[i].add(j)
    return [sorted(s) for s in adj]


def degeneracy_coloring(adj: list) -> list:
    """Greedy coloring along a reverse degeneracy order."""
    n = len(adj)
    deg = [len(a) for a in adj]
    alive = set(range(n))
    order = []
    neigh = [set(a) for a in adj]
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        order.append(v)
        alive.discard(v)
        for w in neigh[v]:
            if w in alive:
                deg[w] -= 1
    color = [-1] * n
    for v in reversed(order):
        used = {color[w] for w in adj[v] if color[w] >= 0}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    return color


def _backtrack_coloring(adj: list, k: int):
    """Exact k-coloring by backtracking on a most-constrained-first order."""
    n = len(adj)
    order = sorted(range(n), key=lambda v: -len(adj[v]))
    color = [-1] * n

    def go(i):
        if i == n:
            return True
        v = order[i]
        used = {color[w] for w in adj[v] if color[w] >= 0}
        for c in range(k):
            if c not in used:
                color[v] = c
                if go(i + 1):
                    return True
                color[v] = -1
        return False

    return color if go(0) else None


def color_and_select(red: UnitReduction, genus: int):
    """Color the intersection graph, route the largest class at value one.

    Returns ``(integral_flow, colors_used, class_sizes)``; the flow lives on
    the original instance and includes the banked integer parts.
    """
    out = Multiflow(red.banked.instance, dict(red.banked.values))
    if not red.unit_cycles:
        return out, 0, []
    adj = intersection_adjacency(red.unit_cycles)
    color = degeneracy_coloring(adj)
    limit = color_limit(genus)
    used = max(color) + 1
    if used > limit:
        if genus == 0:
            color = _backtrack_coloring(adj, limit)
            if color is None:
                raise InternalInvariantError(
                    "planar intersection graph is not 5-colorable",
                    witness=adj)
            used = max(color) + 1
        else:
            raise InternalInvariantError(
                "coloring exceeded the map color bound",
                witness=(used, limit))
    classes: dict[int, list] = {}
    for i, c in enumerate(color):
        classes.setdefault(c, []).append(i)
    sizes = [len(classes[c]) for c in sorted(classes)]
    best = max(sorted(classes), key=lambda c: len(classes[c]))
    for i in classes[best]:
        out.add(red.orig_cycles[i], 1)
    out.verify_feasible()
    return out, used, sizes


@dataclass
class SeparatingRounding:
    """Full result of the separating branch."""

    half: Multiflow
    integral: Multiflow
    banked_value: QQ
    colors_used: int
    class_sizes: list


def round_separating(flow_sep: Multiflow) -> SeparatingRounding:
    """Half-integralize, reduce to unit parallels, color, and select."""
    half = half_integralize(flow_sep)
    red = reduce_to_unit(half)
    genus = flow_sep.instance.graph.genus
    integral, used, sizes = color_and_select(red, genus)
    limit = color_limit(genus)
    if limit * integral.value < 2 * half.value:
        raise InternalInvariantError(
            "integral value below the guaranteed fraction",
            witness=(integral.value, half.value))
    return SeparatingRounding(half, integral, red.banked.value, used, sizes)
