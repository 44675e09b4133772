"""Exact ground truth for desk-scale instances.

Both oracles first enumerate every D-cycle of the instance and then run a
deterministic branch-and-bound: over integral cycle values for the maximum
integral multiflow, over covering edges for the minimum multicut.  They are
deliberately exponential and guarded by an explicit work budget; exceeding
it is a refusal (:class:`OracleBudgetExceeded`), never a wrong answer.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .errors import OracleBudgetExceeded
from .flows import DCycle, Multiflow
from .instances import Instance
from .lp import solve_lp
from .rational import floor_rat


@dataclass(frozen=True)
class OracleBudget:
    """Work limits: enumerated D-cycles, search nodes, wall-clock seconds."""

    max_cycles: int = 20000
    max_nodes: int = 500000
    max_seconds: float = 30.0


DEFAULT_BUDGET = OracleBudget()


class _Clock:
    def __init__(self, budget: OracleBudget):
        self.deadline = time.monotonic() + budget.max_seconds

    def check(self, what: str) -> None:
        if time.monotonic() > self.deadline:
            raise OracleBudgetExceeded("time budget exhausted during " + what)


def enumerate_d_cycles(instance: Instance,
                       budget: OracleBudget = DEFAULT_BUDGET) -> list:
    """All D-cycles of the instance, deduplicated, in canonical order.

    For each demand edge, simple supply paths between its endpoints are
    enumerated by depth-first search with a visited-vertex set; each path
    closes to a D-cycle through the demand dart.
    """
    graph = instance.graph
    clock = _Clock(budget)
    adjacency: dict[int, list] = {}
    for e in instance.supply_edges:
        for d in (2 * e, 2 * e + 1):
            adjacency.setdefault(graph.head(d), []).append(d)
    for v in adjacency:
        adjacency[v].sort()
    found: set = set()
    for d_edge in instance.demand_edges:
        dd = 2 * d_edge + 1
        s, t = graph.head(dd), graph.tail(dd)
        # the demand dart runs s -> t; close it with supply paths t -> s
        stack = [(t, iter(adjacency.get(t, ())))]
        path: list = []
        visited = {t}
        while stack:
            v, it = stack[-1]
            advanced = False
            for d in it:
                clock.check("cycle enumeration")
                w = graph.tail(d)
                if w == s:
                    cycle = DCycle.from_darts(instance, (dd, *path, d))
                    found.add(cycle)
                    if len(found) > budget.max_cycles:
                        raise OracleBudgetExceeded(
                            "more than %d D-cycles" % budget.max_cycles)
                    continue
                if w in visited:
                    continue
                visited.add(w)
                path.append(d)
                stack.append((w, iter(adjacency.get(w, ()))))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
                visited.discard(v)
    return sorted(found, key=lambda c: c.darts)


def _cycle_lp(instance: Instance, cycles, caps) -> object:
    rows_by_edge: dict[int, dict] = {}
    for i, c in enumerate(cycles):
        for e in c.edge_set:
            rows_by_edge.setdefault(e, {})[i] = 1
    edges = sorted(rows_by_edge)
    lp = solve_lp([1] * len(cycles),
                  [rows_by_edge[e] for e in edges],
                  [caps[e] for e in edges])
    return lp


def exact_integral_multiflow(instance: Instance,
                             budget: OracleBudget = DEFAULT_BUDGET):
    """Provably maximum integral multiflow, as ``(value, Multiflow)``."""
    cycles = enumerate_d_cycles(instance, budget)
    if not cycles:
        return 0, Multiflow(instance)
    clock = _Clock(budget)
    caps = dict(enumerate(instance.caps))
    root = _cycle_lp(instance, cycles, caps)
    # explore large fractional values first; the LP value caps the optimum
    order = sorted(range(len(cycles)),
                   key=lambda i: (-root.x[i], cycles[i].darts))
    cycles = [cycles[i] for i in order]
    ceiling = floor_rat(root.value)
    best_value = -1
    best: dict = {}
    current: dict = {}
    nodes = 0

    def max_feasible(j, residual):
        return min(floor_rat(residual[e]) for e in cycles[j].edge_set)

    def search(start, residual, value):
        # branch on the index of the next cycle with positive value, so
        # the depth is the support size, not the number of cycles
        nonlocal nodes, best_value, best
        nodes += 1
        if nodes > budget.max_nodes:
            raise OracleBudgetExceeded(
                "more than %d search nodes" % budget.max_nodes)
        clock.check("flow search")
        if value > best_value:
            best_value = value
            best = dict(current)
        if best_value == ceiling:
            return
        choices = [(j, max_feasible(j, residual))
                   for j in range(start, len(cycles))]
        choices = [(j, m) for j, m in choices if m > 0]
        if value + sum(m for _, m in choices) <= best_value:
            return
        if len(choices) > 1:
            lp = _cycle_lp(instance, [cycles[j] for j, _ in choices],
                           residual)
            if value + floor_rat(lp.value) <= best_value:
                return
        for j, m in choices:
            for x in range(m, 0, -1):
                nxt = dict(residual)
                for e in cycles[j].edge_set:
                    nxt[e] -= x
                current[j] = x
                search(j + 1, nxt, value + x)
                del current[j]
                if best_value == ceiling:
                    return

    search(0, dict(caps), 0)
    flow = Multiflow(instance)
    for j, x in best.items():
        flow.add(cycles[j], x)
    flow.verify_feasible()
    if flow.value != best_value:
        raise AssertionError("oracle bookkeeping mismatch")
    return best_value, flow


def exact_min_multicut(instance: Instance,
                       budget: OracleBudget = DEFAULT_BUDGET):
    """Minimum-capacity edge set meeting every D-cycle.

    Branch-and-bound hitting set: branch on the edges of an uncovered
    cycle with the fewest edges, bound by a greedy packing of edge-disjoint
    uncovered cycles (a valid lower bound by weak duality).
    """
    cycles = enumerate_d_cycles(instance, budget)
    if not cycles:
        return 0, ()
    clock = _Clock(budget)
    cycles = sorted(cycles, key=lambda c: (len(c.edge_set), c.darts))
    # start from the trivial cut: every demand edge
    demand_cut = tuple(sorted(instance.demand_edges))
    best_cost = sum(instance.caps[e] for e in demand_cut)
    best_edges = demand_cut
    nodes = 0

    def packing_bound(uncovered):
        used: set = set()
        total = 0
        for c in uncovered:
            if c.edge_set & used:
                continue
            used |= c.edge_set
            total += min(instance.caps[e] for e in c.edge_set)
        return total

    def search(chosen: set, cost: int, uncovered):
        nonlocal nodes, best_cost, best_edges
        nodes += 1
        if nodes > budget.max_nodes:
            raise OracleBudgetExceeded(
                "more than %d search nodes" % budget.max_nodes)
        clock.check("multicut search")
        if not uncovered:
            if cost < best_cost or (cost == best_cost and
                                    tuple(sorted(chosen)) < best_edges):
                best_cost = cost
                best_edges = tuple(sorted(chosen))
            return
        if cost + packing_bound(uncovered) >= best_cost:
            return
        pivot = uncovered[0]
        for e in sorted(pivot.edge_set):
            rest = [c for c in uncovered if e not in c.edge_set]
            search(chosen | {e}, cost + instance.caps[e], rest)

    search(set(), 0, cycles)
    return best_cost, best_edges
