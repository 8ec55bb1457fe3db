"""Outer-inner cutting-plane solver for the epigraph master problem.

The master's cones are dropped from a mixed-integer linear relaxation whose
bound drives the lower side; the upper side comes from re-solving each
adopted scenario's dispatch exactly with the commitment fixed, which also
yields the cone-feasible incumbent the method returns. Violated cones at the
relaxation's solution spawn supporting-hyperplane cuts, with the capacity
family restricted to rows binding at the inner solutions and the other
family thinned to the most-violated fraction.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backends import ClarabelConicBackend, HighsMilpBackend
from .constraints import LE, ConstraintSystem, Key
from .cuts import (
    Cut,
    CutPool,
    capacity_cut,
    cone_violation,
    detect_violations,
    select_most_violated,
    soc_cut,
)
from .errors import BackendFailure
from .formulation import (
    CommitmentDecision,
    MasterProblem,
    ScenarioDispatch,
    build_dispatch_block,
    scoped_values,
)
from .network import NetworkCase


@dataclass
class OicpaConfig:
    epsilon: float = 1e-4        # relative optimality gap target
    eps_tol: float = 1e-5        # cone violation worth cutting
    eps_par: float = 0.5e-5      # parallelism threshold for the pool
    p_cut: float = 0.55          # fraction of ranked violations to cut
    max_rounds: int = 200
    stall_policy: str = "strict"        # "strict" | "separate-all"
    soc_cut_variant: str = "adaptive"   # "adaptive" | "paper" | "tight"
    activity_tol: float = 1e-6
    milp_gap: float = 1e-6
    time_limit: float | None = None
    threads: int = 1

    def __post_init__(self):
        if not 0.0 < self.p_cut <= 1.0:
            raise ValueError("p_cut must lie in (0, 1]")
        if min(self.epsilon, self.eps_tol, self.eps_par) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class OicpaRound:
    round: int
    lb: float
    ub: float
    rel_gap: float
    abs_gap: float
    milp_seconds: float
    cuts_added: int
    cuts_rejected_parallel: int


@dataclass
class OicpaResult:
    status: str  # "optimal" | "stalled" | "round_limit"
    x: CommitmentDecision
    objective: float
    lb: float
    ub: float
    trace: list[OicpaRound]
    inner_points: dict = field(default_factory=dict)  # scenario -> dispatch values
    pool: CutPool | None = None
    nnz: int = 0


def _gap(ub: float, lb: float) -> float:
    if math.isinf(ub):
        return math.inf
    return (ub - lb) / max(abs(ub), 1.0)


def solve_dispatch(case: NetworkCase, x: CommitmentDecision, status: dict,
                   conic: ClarabelConicBackend) -> tuple[float, ScenarioDispatch]:
    """Exact scenario dispatch cost for a fixed commitment."""
    cs, _ = build_dispatch_block(case, status=status, x=x)
    res = conic.solve(cs)
    if res.status != "optimal":
        raise BackendFailure(f"dispatch solve returned {res.status}")
    return res.objective, ScenarioDispatch(case, res.values)


def _relaxed_view(cs: ConstraintSystem) -> ConstraintSystem:
    out = ConstraintSystem(cs.minimize)
    out.vars = {k: type(v)(k, v.kind, v.lb, v.ub) for k, v in cs.vars.items()}
    out.rows = dict(cs.rows)
    out.objective = dict(cs.objective)
    out.obj_const = cs.obj_const
    return out


def _tag_parts(tag: Key) -> tuple[tuple, tuple]:
    """Split a cone key into its scenario prefix and (n, m, t) indices."""
    if tag[0] == "scn":
        return tag[:2], tag[3:]
    return (), tag[1:]


def _make_soc_cut(point: dict, tag: Key, variant: str) -> Cut:
    prefix, (n, m, t) = _tag_parts(tag)
    return soc_cut(
        point[(*prefix, "c", n, m, t)], point[(*prefix, "s", n, m, t)],
        point[(*prefix, "cm", n, m, t)], point[(*prefix, "cm", m, n, t)],
        (*prefix, "c", n, m, t), (*prefix, "s", n, m, t),
        (*prefix, "cm", n, m, t), (*prefix, "cm", m, n, t),
        tag, variant=variant,
    )


def _make_capacity_cut(point: dict, tag: Key, case: NetworkCase) -> Cut:
    prefix, (n, m, t) = _tag_parts(tag)
    return capacity_cut(
        point[(*prefix, "pf", n, m, t)], point[(*prefix, "qf", n, m, t)],
        case.line_capacity[(n, m)],
        (*prefix, "pf", n, m, t), (*prefix, "qf", n, m, t), tag,
    )


def run_oicpa(master: MasterProblem, cfg: OicpaConfig | None = None,
              conic: ClarabelConicBackend | None = None,
              milp: HighsMilpBackend | None = None,
              pool: CutPool | None = None) -> OicpaResult:
    cfg = cfg or OicpaConfig()
    conic = conic or ClarabelConicBackend()
    milp = milp or HighsMilpBackend()
    pool = pool if pool is not None else CutPool(cfg.eps_par)
    case = master.case
    cs = master.cs
    scen_keys = sorted(master.scenarios)

    relaxed = _relaxed_view(cs)
    for cut in pool.all():
        if all(k in relaxed.vars for k in cut.coeffs):
            relaxed.add_row(("cut", cut.uid), cut.coeffs, LE, cut.rhs)

    cap_cones = {k: c for k, c in cs.cones.items() if c.kind == "capacity"}
    soc_cones = {k: c for k, c in cs.cones.items() if c.kind == "soc"}
    cones_by_scen: dict[int, dict] = {k: {} for k in scen_keys}
    for ck, cone in cap_cones.items():
        cones_by_scen[ck[1]][ck] = cone

    lb, ub = -math.inf, math.inf
    incumbent_x = None
    inner_points: dict[int, dict] = {}
    trace: list[OicpaRound] = []
    status = "round_limit"
    warm = None
    force_full = False

    for rnd in range(1, cfg.max_rounds + 1):
        limit = None if force_full else cfg.time_limit
        mres = milp.solve(relaxed, warm_start=warm, gap=cfg.milp_gap,
                          time_limit=limit)
        if mres.status == "limit" and not mres.values:
            # ran out of time before any incumbent: try once without the cap
            mres = milp.solve(relaxed, warm_start=warm, gap=cfg.milp_gap)
        if mres.status not in ("optimal", "feasible"):
            raise BackendFailure(f"master relaxation returned {mres.status}")
        force_full = False
        lb = max(lb, mres.bound)
        point = mres.values
        warm = point
        x_hat = CommitmentDecision.from_values(case, point)

        added = rejected = 0

        # violated voltage-product cones at the relaxation's solution
        found = detect_violations(point, soc_cones, cfg.eps_tol, "soc")
        for tag, _ in select_most_violated(found, cfg.p_cut):
            cut = _make_soc_cut(point, tag, cfg.soc_cut_variant)
            if pool.add(cut, rnd):
                relaxed.add_row(("cut", cut.uid), cut.coeffs, LE, cut.rhs)
                added += 1
            else:
                rejected += 1

        # exact inner solves at the fixed commitment: upper bound + active set
        statuses = {k: master.scenarios[k] for k in scen_keys}

        def inner(k: int):
            return solve_dispatch(case, x_hat, statuses[k], conic)

        if cfg.threads > 1 and len(scen_keys) > 1:
            with ThreadPoolExecutor(max_workers=cfg.threads) as tp:
                inner_res = dict(zip(scen_keys, tp.map(inner, scen_keys)))
        else:
            inner_res = {k: inner(k) for k in scen_keys}

        commit_cost = x_hat.commitment_cost(case)
        round_ub = commit_cost + max(v for v, _ in inner_res.values())
        if round_ub < ub:
            ub = round_ub
            incumbent_x = x_hat
            inner_points = {k: d.values for k, (_, d) in inner_res.items()}

        # capacity cuts only where the inner solution is binding
        for k in scen_keys:
            _, disp = inner_res[k]
            active = set()
            for ck, cone in cones_by_scen[k].items():
                _, (n, m, t) = _tag_parts(ck)
                flow = math.hypot(disp.values[("pf", n, m, t)],
                                  disp.values[("qf", n, m, t)])
                s_cap = case.line_capacity[(n, m)]
                if flow >= s_cap - cfg.activity_tol * max(1.0, s_cap):
                    active.add(ck)
            for tag, _ in detect_violations(point, cones_by_scen[k], cfg.eps_tol,
                                            "capacity", restrict=active):
                cut = _make_capacity_cut(point, tag, case)
                if pool.add(cut, rnd):
                    relaxed.add_row(("cut", cut.uid), cut.coeffs, LE, cut.rhs)
                    added += 1
                else:
                    rejected += 1

        gap = _gap(ub, lb)
        trace.append(OicpaRound(rnd, lb, ub, gap, math.nan, mres.runtime,
                                added, rejected))
        if gap < cfg.epsilon:
            status = "optimal"
            break
        if added == 0 and mres.status != "optimal":
            # nothing left to cut, but the relaxation itself was only solved
            # to its time limit: the remaining gap is branch-and-bound slack,
            # so re-solve uncapped before judging a stall
            force_full = True
            continue
        if added == 0 and cfg.stall_policy == "separate-all":
            for family, cones in (("soc", soc_cones), ("capacity", cap_cones)):
                for tag, _ in detect_violations(point, cones, cfg.eps_tol, family):
                    if family == "soc":
                        cut = _make_soc_cut(point, tag, cfg.soc_cut_variant)
                    else:
                        cut = _make_capacity_cut(point, tag, case)
                    if pool.add(cut, rnd):
                        relaxed.add_row(("cut", cut.uid), cut.coeffs, LE, cut.rhs)
                        added += 1
                    else:
                        rejected += 1
            trace[-1].cuts_added = added
            trace[-1].cuts_rejected_parallel = rejected
        if added == 0:
            status = "stalled"
            break

    for row in trace:
        row.abs_gap = _gap(ub, row.lb)
    return OicpaResult(status, incumbent_x, ub, lb, ub, trace,
                       inner_points, pool, relaxed.nnz())
