"""End-to-end approximation pipeline and its machine-readable report.

Stages: fractional LP, decomposition into D-cycles, uncrossing, branch
selection by the exact comparison ``2 |f̄(separating)| >= |f̄|``, then either
the separating rounding (half-integralize, unit reduction, coloring) or the
non-separating one (heaviest homotopy class, cyclic order, greedy); the
improved branch rounds a whole color class of homotopy classes instead.
Every stage's guaranteed bound is re-checked on the actual numbers and
recorded in the report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .errors import InternalInvariantError, PreconditionError
from .flows import Multiflow, decompose, solve_fractional
from .instances import Instance
from .oracle import DEFAULT_BUDGET, exact_integral_multiflow
from .rational import ONE, ZERO, rat, rat_str
from .round_nonseparating import improved_g2, select_class_and_round
from .round_separating import color_limit, round_separating
from .topology import classify_homotopy, split_support
from .uncross import uncross_flow

BRANCHES = ("auto", "separating", "nonseparating", "improved")
VERIFY_LEVELS = ("off", "invariants", "full-oracle")


@dataclass(frozen=True)
class PipelineConfig:
    epsilon: object = "1/2"
    branch: str = "auto"
    verify: str = "off"

    def __post_init__(self):
        eps = rat(self.epsilon)
        if not ZERO < eps < ONE:
            raise PreconditionError("epsilon must lie strictly in (0, 1)")
        if self.branch not in BRANCHES:
            raise PreconditionError("unknown branch %r" % (self.branch,))
        if self.verify not in VERIFY_LEVELS:
            raise PreconditionError("unknown verify level %r" % (self.verify,))

    @property
    def eps(self):
        return rat(self.epsilon)


def _stage(name):
    class _Tag:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if isinstance(exc, InternalInvariantError):
                raise InternalInvariantError(
                    "[stage %s] %s" % (name, exc), witness=exc.witness
                ) from exc
            return False

    return _Tag()


def _check(report, name: str, ok: bool, witness=None) -> None:
    report["checks"].append({"name": name, "ok": bool(ok)})
    if not ok:
        raise InternalInvariantError(
            "pipeline bound %r failed" % name, witness=witness)


def run(instance: Instance, config: PipelineConfig = PipelineConfig()):
    """Run the full pipeline; returns ``(integral Multiflow, report dict)``."""
    invariants = config.verify != "off"
    report: dict = {
        "schema": "surfaceflow-report/1",
        "config": {"epsilon": rat_str(config.eps), "branch": config.branch,
                   "verify": config.verify},
        "instance": {"vertices": instance.graph.n,
                     "edges": len(instance.graph.edges),
                     "demands": len(instance.demand_edges),
                     "genus": instance.graph.genus},
        "stages": {},
        "checks": [],
    }

    with _stage("lp"):
        sol = solve_fractional(instance)
    report["stages"]["lp"] = {"value": rat_str(sol.value),
                              "engine": sol.engine,
                              "multicut_value": rat_str(sol.value)}

    with _stage("decompose"):
        flow = decompose(instance, sol)
    report["stages"]["decompose"] = {"value": rat_str(flow.value),
                                     "support": len(flow.values)}

    with _stage("uncross"):
        fbar = uncross_flow(flow, config.eps, check_invariants=invariants)
    report["stages"]["uncross"] = {"value": rat_str(fbar.value),
                                   "support": len(fbar.values)}
    _check(report, "uncross value >= (1 - epsilon) * LP",
           fbar.value >= (ONE - config.eps) * sol.value,
           witness=(fbar.value, sol.value))

    sep, sep_v, nonsep, nonsep_v = split_support(fbar)
    sep_total = sum(sep_v, ZERO)
    nonsep_total = sum(nonsep_v, ZERO)
    branch = config.branch
    if branch == "auto":
        branch = "separating" if 2 * sep_total >= fbar.value \
            else "nonseparating"
    report["stages"]["split"] = {
        "separating_value": rat_str(sep_total),
        "nonseparating_value": rat_str(nonsep_total),
        "branch": branch,
    }

    if branch == "separating":
        with _stage("round_separating"):
            rounding = round_separating(fbar.restrict(sep))
        out = rounding.integral
        limit = color_limit(instance.graph.genus)
        report["stages"]["round"] = {
            "branch": "separating",
            "half_value": rat_str(rounding.half.value),
            "banked_value": rat_str(rounding.banked_value),
            "colors_used": rounding.colors_used,
            "class_sizes": rounding.class_sizes,
        }
        _check(report, "half-integral value >= separating value / 2",
               2 * rounding.half.value >= sep_total,
               witness=(rounding.half.value, sep_total))
        _check(report, "integral value >= 2 * half value / color limit",
               limit * out.value >= 2 * rounding.half.value,
               witness=(out.value, rounding.half.value, limit))
    else:
        with _stage("classify"):
            classification = classify_homotopy(instance.graph, nonsep,
                                               nonsep_v)
        report["stages"]["classify"] = {
            "classes": [list(c) for c in classification.classes],
            "totals": [rat_str(t) for t in classification.totals],
        }
        if branch == "improved":
            with _stage("round_improved"):
                out = improved_g2(fbar, classification)
            report["stages"]["round"] = {"branch": "improved",
                                         "value": rat_str(out.value)}
        else:
            with _stage("round_nonseparating"):
                out = select_class_and_round(fbar, classification)
            report["stages"]["round"] = {"branch": "nonseparating",
                                         "value": rat_str(out.value)}
            _check(report, "greedy value >= class value / 2",
                   2 * out.value >= classification.totals[0],
                   witness=(out.value, classification.totals[0]))

    with _stage("output"):
        out.verify_feasible()
        for c, v in out.values.items():
            if v != int(v):
                raise InternalInvariantError(
                    "non-integral output value", witness=(c.darts, v))
    report["output"] = {"value": rat_str(out.value),
                        "flow": out.to_wire()}

    if config.verify == "full-oracle":
        opt, _ = exact_integral_multiflow(instance, DEFAULT_BUDGET)
        report["oracle"] = {"value": opt}
        _check(report, "pipeline value <= exact optimum",
               out.value <= opt, witness=(out.value, opt))
        _check(report, "exact optimum <= LP value",
               opt <= sol.value, witness=(opt, sol.value))
    return out, report


def render_report(report: dict) -> str:
    """Byte-stable JSON rendering of a report."""
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


def solution_wire(flow: Multiflow) -> dict:
    return {"schema": "surfaceflow-solution/1",
            "value": rat_str(flow.value),
            "flow": flow.to_wire()}


def verify_solution(instance: Instance, data: dict) -> dict:
    """Independent check of a serialized solution against an instance.

    Recomputes feasibility, integrality and the total value; any mismatch
    is reported with a witness instead of raising.
    """
    problems = []
    try:
        flow = Multiflow.from_wire(instance, data.get("flow", []))
    except Exception as exc:  # malformed cycles are a verdict, not a crash
        return {"ok": False, "problems":
                [{"kind": "malformed", "witness": str(exc)}]}
    for e, load in sorted(flow.edge_loads().items()):
        if load > instance.cap(e):
            problems.append({"kind": "capacity", "witness":
                             {"edge": e, "load": rat_str(load),
                              "cap": instance.cap(e)}})
    integral = all(v == int(v) for v in flow.values.values())
    if not integral:
        problems.append({"kind": "integrality", "witness":
                         [rat_str(v) for v in flow.values.values()
                          if v != int(v)]})
    declared = data.get("value")
    if declared is not None and rat(declared) != flow.value:
        problems.append({"kind": "value", "witness":
                         {"declared": declared,
                          "recomputed": rat_str(flow.value)}})
    return {"ok": not problems, "problems": problems,
            "value": rat_str(flow.value)}
