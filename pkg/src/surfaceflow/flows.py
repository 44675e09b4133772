"""Fractional multiflows: LP solving, decomposition, feasibility.

A ``DCycle`` is a simple cycle containing exactly one demand edge; the
maximum multiflow LP assigns non-negative values to D-cycles subject to
edge capacities.  Solving works on the compact per-demand edge-flow
formulation (two directed variables per supply edge per demand plus one
variable on the demand edge itself), which an exact flow decomposition then
converts into a D-cycle multiflow of support at most ``|D| * |E|``.

The LP dual's capacity prices form a fractional multicut: every D-cycle has
total price at least 1.  ``solve_fractional`` verifies this exactly via
shortest paths and returns the prices as an optimality certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .errors import InternalInvariantError, PreconditionError
from .instances import Instance
from .lp import LPResult, solve_lp
from .rational import QQ, ZERO, rat, rat_str


def _canonical_darts(darts: Sequence[int]) -> tuple:
    """Lexicographically minimal representative over rotations and reversal."""
    darts = tuple(darts)
    k = len(darts)
    rev = tuple(d ^ 1 for d in reversed(darts))
    best = None
    for seq in (darts, rev):
        for s in range(k):
            cand = seq[s:] + seq[:s]
            if best is None or cand < best:
                best = cand
    return best


@dataclass(frozen=True)
class DCycle:
    """A simple cycle through exactly one demand edge, as a dart sequence.

    Stored canonically (minimal over rotation and reversal), so equal cycles
    compare and hash equal regardless of traversal.
    """

    darts: tuple
    demand: int

    @staticmethod
    def from_darts(instance: Instance, darts: Sequence[int]) -> "DCycle":
        g = instance.graph
        darts = tuple(int(d) for d in darts)
        if not darts:
            raise PreconditionError("empty cycle")
        verts = []
        for i, d in enumerate(darts):
            if g.tail(d) != g.head(darts[(i + 1) % len(darts)]):
                raise PreconditionError("darts do not chain into a cycle")
            verts.append(g.head(d))
        if len(set(verts)) != len(verts):
            raise PreconditionError("cycle revisits a vertex")
        demands = [d >> 1 for d in darts if instance.is_demand(d >> 1)]
        if len(demands) != 1:
            raise PreconditionError(
                "a D-cycle must contain exactly one demand edge, got %d"
                % len(demands))
        return DCycle(_canonical_darts(darts), demands[0])

    @property
    def edge_set(self) -> frozenset:
        return frozenset(d >> 1 for d in self.darts)

    def vertices(self, instance: Instance) -> tuple:
        return tuple(instance.graph.head(d) for d in self.darts)

    def __len__(self):
        return len(self.darts)


@dataclass
class Multiflow:
    """A rational assignment of values to D-cycles."""

    instance: Instance
    values: dict = field(default_factory=dict)

    def set(self, cycle: DCycle, value) -> None:
        value = rat(value)
        if value < 0:
            raise PreconditionError("flow values must be non-negative")
        if value == 0:
            self.values.pop(cycle, None)
        else:
            self.values[cycle] = value

    def add(self, cycle: DCycle, value) -> None:
        self.set(cycle, self.values.get(cycle, ZERO) + rat(value))

    @property
    def value(self):
        return sum(self.values.values(), ZERO)

    def edge_load(self, e: int):
        return sum((v for c, v in self.values.items() if e in c.edge_set),
                   ZERO)

    def edge_loads(self) -> dict:
        loads: dict = {}
        for c, v in self.values.items():
            for e in c.edge_set:
                loads[e] = loads.get(e, ZERO) + v
        return loads

    def support(self) -> list:
        """Cycles with positive value, in a deterministic order."""
        return sorted(self.values, key=lambda c: c.darts)

    def restrict(self, keep: Iterable[DCycle]) -> "Multiflow":
        keep = set(keep)
        return Multiflow(self.instance,
                         {c: v for c, v in self.values.items() if c in keep})

    def verify_feasible(self) -> None:
        """Raise if any capacity is exceeded (exact comparison)."""
        for e, load in self.edge_loads().items():
            if load > self.instance.cap(e):
                raise InternalInvariantError(
                    "edge %d overloaded: %s > %d" % (e, load,
                                                     self.instance.cap(e)),
                    witness=(e, load))

    def to_wire(self) -> list:
        return [{"cycle": list(c.darts), "demand": c.demand,
                 "value": rat_str(v)} for c, v in
                sorted(self.values.items(), key=lambda kv: kv[0].darts)]

    @staticmethod
    def from_wire(instance: Instance, data: list) -> "Multiflow":
        flow = Multiflow(instance)
        for rec in data:
            cycle = DCycle.from_darts(instance, rec["cycle"])
            if cycle.demand != rec["demand"]:
                raise PreconditionError(
                    "cycle record demand mismatch: %r" % (rec,))
            flow.add(cycle, rat(rec["value"]))
        return flow


@dataclass
class EdgeFlowSolution:
    """Optimal compact-LP solution: per-demand signed edge flows.

    ``flow[d][e]`` is the net flow of demand ``d`` on supply edge ``e``,
    positive in slot0 -> slot1 direction; ``demand_value[d]`` the amount
    routed.  ``multicut`` maps every edge to its dual price (a fractional
    multicut of the same total weight as the flow).
    """

    flow: dict
    demand_value: dict
    multicut: dict
    value: object
    engine: str


def solve_fractional(instance: Instance) -> EdgeFlowSolution:
    """Exact maximum fractional multiflow with a multicut certificate."""
    g = instance.graph
    demands = instance.demand_edges
    supply = instance.supply_edges
    if not demands:
        return EdgeFlowSolution({}, {}, {e: ZERO for e in supply}, ZERO,
                                engine="trivial")

    # variable layout per demand: (x+_e, x-_e for e in supply), then w_d
    per = 2 * len(supply)
    sup_index = {e: i for i, e in enumerate(supply)}

    def var_plus(di, e):
        return di * per + 2 * sup_index[e]

    def var_minus(di, e):
        return di * per + 2 * sup_index[e] + 1

    n_vars = len(demands) * per + len(demands)

    def var_w(di):
        return len(demands) * per + di

    c = [ZERO] * n_vars
    for di in range(len(demands)):
        c[var_w(di)] = rat(1)

    A_eq, b_eq = [], []
    for di, d in enumerate(demands):
        s, t = g.edges[d]
        rows = {v: {} for v in range(g.n)}
        for e in supply:
            a, b = g.edges[e]
            if a == b:
                continue  # a supply loop can never lie on a simple D-cycle
            rows[a][var_plus(di, e)] = rows[a].get(var_plus(di, e), ZERO) - 1
            rows[b][var_plus(di, e)] = rows[b].get(var_plus(di, e), ZERO) + 1
            rows[a][var_minus(di, e)] = rows[a].get(var_minus(di, e), ZERO) + 1
            rows[b][var_minus(di, e)] = rows[b].get(var_minus(di, e), ZERO) - 1
        # the demand edge carries w_d from t back to s
        rows[t][var_w(di)] = rows[t].get(var_w(di), ZERO) - 1
        rows[s][var_w(di)] = rows[s].get(var_w(di), ZERO) + 1
        for v in range(g.n):
            if v == s:
                continue  # one conservation row per demand is redundant
            row = {j: rat(coef) for j, coef in rows[v].items() if coef != 0}
            if row:
                A_eq.append(row)
                b_eq.append(ZERO)

    A_ub, b_ub = [], []
    cap_row_of = {}
    for e in supply:
        row = {}
        for di in range(len(demands)):
            row[var_plus(di, e)] = rat(1)
            row[var_minus(di, e)] = rat(1)
        cap_row_of[e] = len(A_ub)
        A_ub.append(row)
        b_ub.append(rat(instance.cap(e)))
    for di, d in enumerate(demands):
        cap_row_of[d] = len(A_ub)
        A_ub.append({var_w(di): rat(1)})
        b_ub.append(rat(instance.cap(d)))

    res = solve_lp(c, A_ub, b_ub, A_eq, b_eq)

    flow = {}
    demand_value = {}
    for di, d in enumerate(demands):
        nets = {}
        for e in supply:
            net = res.x[var_plus(di, e)] - res.x[var_minus(di, e)]
            if net != 0:
                nets[e] = net
        flow[d] = nets
        demand_value[d] = res.x[var_w(di)]
    multicut = {e: res.y_ub[cap_row_of[e]] for e in list(supply) + list(demands)}
    sol = EdgeFlowSolution(flow, demand_value, multicut, res.value, res.engine)
    _verify_multicut(instance, sol)
    return sol


def _verify_multicut(instance: Instance, sol: EdgeFlowSolution) -> None:
    """The dual prices must cover every D-cycle with weight >= 1 and have
    total capacity-weighted cost equal to the flow value (strong duality)."""
    g = instance.graph
    y = sol.multicut
    total = sum((rat(instance.cap(e)) * v for e, v in y.items()), ZERO)
    if total != sol.value:
        raise InternalInvariantError(
            "multicut certificate cost %s != flow value %s"
            % (total, sol.value), witness=y)
    for d in instance.demand_edges:
        s, t = g.edges[d]
        dist = shortest_path_length(instance, s, t, y)
        if dist is not None and dist + y[d] < 1:
            raise InternalInvariantError(
                "multicut certificate misses a D-cycle through demand %d" % d,
                witness=(d, dist))


def shortest_path_length(instance: Instance, s: int, t: int,
                         weights: Mapping[int, object]):
    """Exact Bellman-Ford over supply edges (weights are non-negative)."""
    g = instance.graph
    dist = {s: ZERO}
    for _ in range(g.n):
        changed = False
        for e in instance.supply_edges:
            a, b = g.edges[e]
            w = weights.get(e, ZERO)
            for x, yv in ((a, b), (b, a)):
                if x in dist:
                    nd = dist[x] + w
                    if yv not in dist or nd < dist[yv]:
                        dist[yv] = nd
                        changed = True
        if not changed:
            break
    return dist.get(t)


def decompose(instance: Instance, sol: EdgeFlowSolution) -> Multiflow:
    """Exact flow decomposition of the compact solution into D-cycles.

    Per demand, repeatedly extracts a shortest (fewest edges, then smallest
    dart ids) positive-flow path from ``s`` to ``t`` and peels off its
    bottleneck.  Cycles in the flow that avoid the demand edge are discarded;
    they carry no objective value.
    """
    g = instance.graph
    flow = Multiflow(instance)
    for d in instance.demand_edges:
        s, t = g.edges[d]
        remaining = sol.demand_value.get(d, ZERO)
        nets = dict(sol.flow.get(d, {}))
        demand_dart = 2 * d + 1  # attached to t, pointing back to s
        guard = 0
        while remaining > 0:
            guard += 1
            if guard > 4 * len(g.edges) + 8:
                raise InternalInvariantError(
                    "flow decomposition failed to terminate", witness=d)
            path = _shortest_positive_path(instance, nets, s, t)
            if path is None:
                raise InternalInvariantError(
                    "conservation violated: no residual path for demand %d"
                    % d, witness=nets)
            bottleneck = remaining
            for dart in path:
                e = dart >> 1
                avail = nets[e] if (dart & 1) == 0 else -nets[e]
                if avail < bottleneck:
                    bottleneck = avail
            for dart in path:
                e = dart >> 1
                nets[e] -= bottleneck if (dart & 1) == 0 else -bottleneck
                if nets[e] == 0:
                    del nets[e]
            remaining -= bottleneck
            cycle = DCycle.from_darts(instance, list(path) + [demand_dart])
            flow.add(cycle, bottleneck)
    return flow


def _shortest_positive_path(instance: Instance, nets: dict, s: int, t: int):
    """BFS over residual arcs; deterministic smallest-dart tie-breaks.

    Arcs: edge e with net > 0 goes slot0 -> slot1 (traversal dart ``2e``),
    net < 0 the other way (dart ``2e+1``).
    """
    g = instance.graph
    adj: dict[int, list] = {}
    for e, net in sorted(nets.items()):
        if net == 0:
            continue
        dart = 2 * e if net > 0 else 2 * e + 1
        a = g.head(dart)
        adj.setdefault(a, []).append(dart)
    for lst in adj.values():
        lst.sort()
    if s == t:
        return ()
    parent = {s: None}
    frontier = [s]
    while frontier:
        nxt = []
        for v in frontier:
            for dart in adj.get(v, ()):
                w = g.tail(dart)
                if w not in parent:
                    parent[w] = dart
                    if w == t:
                        path = []
                        x = t
                        while parent[x] is not None:
                            path.append(parent[x])
                            x = g.head(parent[x])
                        return tuple(reversed(path))
                    nxt.append(w)
        frontier = nxt
    return None


def solve_and_decompose(instance: Instance):
    """Convenience wrapper: returns ``(multiflow, edge_solution)``.

    Checks the decomposition reproduces the LP value exactly and respects
    the support bound ``|D| * |E|``.
    """
    sol = solve_fractional(instance)
    flow = decompose(instance, sol)
    if flow.value != sol.value:
        raise InternalInvariantError(
            "decomposition lost value: %s != %s" % (flow.value, sol.value))
    bound = len(instance.demand_edges) * max(1, len(instance.graph.edges))
    if len(flow.values) > bound:
        raise InternalInvariantError(
            "decomposition support exceeds |D||E|",
            witness=len(flow.values))
    flow.verify_feasible()
    return flow, sol
