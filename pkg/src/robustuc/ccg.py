"""Scenario-generation outer loop coordinating master and worst-case solves.

Each iteration adopts the latest worst trajectory into the master, re-solves
for a new commitment, and prices that commitment against every trajectory;
the loop stops when the bounds close, every adopted scenario having added a
distinct index. Cuts discovered while solving one master stay valid for the
next (same cones, larger scenario set), so the pool is carried across
iterations.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

from .backends import ClarabelConicBackend, HighsMilpBackend
from .cuts import CutPool
from .duality import SubproblemConfig, solve_subproblem
from .errors import BackendFailure
from .formulation import CommitmentDecision, assemble_master, evaluate_cost
from .network import NetworkCase, require_valid
from .oicpa import OicpaConfig, OicpaResult, run_oicpa, solve_dispatch
from .scenarios import TrajectorySet, apply_trajectory


@dataclass
class CcgConfig:
    epsilon: float = 1e-4
    max_iter: int = 25
    master: str = "oicpa"          # "oicpa" | "direct"
    sub_mode: str = "enumerate"    # "enumerate" | "monolithic"
    big_m: float | None = None
    master_epsilon: float | None = None  # defaults to epsilon
    threads: int = 1
    seed: int | None = None        # echoed into outputs; the solve is deterministic
    oicpa: OicpaConfig = field(default_factory=OicpaConfig)

    def __post_init__(self):
        if self.epsilon <= 0 or self.max_iter < 0:
            raise ValueError("epsilon must be positive and max_iter nonnegative")


@dataclass
class CcgIteration:
    iter: int
    k_added: int | None
    lb: float
    master_runtime_s: float
    master_nnz: int
    ub: float
    sub_runtime_s: float
    gap: float


@dataclass
class RobustSchedule:
    status: str  # "optimal" | "iter_limit" | "cycle_detected" | "master_stalled"
    x: CommitmentDecision
    lb: float
    ub: float
    gap: float
    worst_k: int
    log: list[CcgIteration]
    scenario_costs: dict = field(default_factory=dict)  # k -> (served+commit, unserved)
    dispatches: dict = field(default_factory=dict)      # k -> ScenarioDispatch
    oicpa_traces: list = field(default_factory=list)
    nominal_x: CommitmentDecision | None = None  # initialization master's schedule
    # worst-case total re-priced on the primal side; should match ub to
    # solver tolerance, and a material excess flags unreliable dual pricing
    priced_ub: float = math.nan


def _gap(ub: float, lb: float) -> float:
    if math.isinf(ub):
        return math.inf
    return (ub - lb) / max(abs(ub), 1.0)


def _solve_master(case, adopted, cfg, conic, milp, pool) -> OicpaResult:
    if cfg.master == "direct":
        raise BackendFailure(
            "no MISOCP-capable backend is configured; use master='oicpa'"
        )
    mp = assemble_master(case, adopted)
    ocfg = replace(cfg.oicpa, epsilon=cfg.master_epsilon or cfg.epsilon,
                   threads=cfg.threads)
    return run_oicpa(mp, ocfg, conic, milp, pool=pool)


def run_ccg(case: NetworkCase, ts: TrajectorySet, cfg: CcgConfig | None = None,
            conic: ClarabelConicBackend | None = None,
            milp: HighsMilpBackend | None = None) -> RobustSchedule:
    """Worst-case-cost-minimizing commitment over the trajectory set."""
    cfg = cfg or CcgConfig()
    conic = conic or ClarabelConicBackend()
    milp = milp or HighsMilpBackend()
    require_valid(case)
    sub_cfg = SubproblemConfig(mode=cfg.sub_mode, big_m=cfg.big_m,
                               threads=cfg.threads)
    statuses = {k: apply_trajectory(case, ts, k) for k in range(ts.n_traj + 1)}
    pool = CutPool(cfg.oicpa.eps_par)
    log: list[CcgIteration] = []
    oicpa_traces = []

    def price(x: CommitmentDecision):
        t0 = time.perf_counter()
        sub = solve_subproblem(case, x, ts, sub_cfg, conic, milp)
        return sub, time.perf_counter() - t0

    t0 = time.perf_counter()
    mres = _solve_master(case, {0: statuses[0]}, cfg, conic, milp, pool)
    m_time = time.perf_counter() - t0
    oicpa_traces.append(mres.trace)
    if mres.status != "optimal":
        return RobustSchedule("master_stalled", mres.x, mres.lb, math.inf,
                              math.inf, 0, log, oicpa_traces=oicpa_traces)
    lb = mres.lb
    x = mres.x
    nominal_x = x
    sub, s_time = price(x)
    ub = x.commitment_cost(case) + sub.value
    best_x, best_worst_k = x, sub.worst_k
    gap = _gap(ub, lb)
    log.append(CcgIteration(0, None, lb, m_time, mres.nnz, ub, s_time, gap))

    status = "iter_limit" if cfg.max_iter == 0 else None
    adopted: dict[int, dict] = {}
    next_k = sub.worst_k
    if gap < cfg.epsilon:
        status = "optimal"

    i = 0
    while status is None and i < cfg.max_iter:
        i += 1
        if next_k in adopted:
            status = "cycle_detected"
            break
        adopted[next_k] = statuses[next_k]
        t0 = time.perf_counter()
        mres = _solve_master(case, adopted, cfg, conic, milp, pool)
        m_time = time.perf_counter() - t0
        oicpa_traces.append(mres.trace)
        if mres.status != "optimal":
            status = "master_stalled"
            break
        lb = max(lb, mres.lb)
        x = mres.x
        sub, s_time = price(x)
        cand = x.commitment_cost(case) + sub.value
        if cand < ub:
            ub = cand
            best_x, best_worst_k = x, sub.worst_k
        next_k = sub.worst_k
        gap = _gap(ub, lb)
        log.append(CcgIteration(i, list(adopted)[-1], lb, m_time, mres.nnz,
                                ub, s_time, gap))
        if gap < cfg.epsilon:
            status = "optimal"
    if status is None:
        status = "iter_limit"

    costs, dispatches = {}, {}
    for k in range(ts.n_traj + 1):
        _, disp = solve_dispatch(case, best_x, statuses[k], conic)
        costs[k] = evaluate_cost(case, best_x, disp)
        dispatches[k] = disp
    priced_ub = max(sum(pair) for pair in costs.values())
    return RobustSchedule(status, best_x, lb, ub, gap, best_worst_k, log,
                          costs, dispatches, oicpa_traces, nominal_x, priced_ub)


@dataclass
class ComparisonReport:
    nominal_cost: tuple[float, float]
    robust_cost: tuple[float, float]
    nominal_worst_k: int
    robust_worst_k: int
    on_off: dict  # unit -> {"nominal": [...], "robust": [...]}


def compare_commitments(case: NetworkCase, ts: TrajectorySet,
                        x_nominal: CommitmentDecision, x_robust: CommitmentDecision,
                        cfg: CcgConfig | None = None,
                        conic: ClarabelConicBackend | None = None) -> ComparisonReport:
    """Price both schedules at their own worst trajectories, side by side."""
    cfg = cfg or CcgConfig()
    conic = conic or ClarabelConicBackend()
    for label, x in (("nominal", x_nominal), ("robust", x_robust)):
        bad = x.check_logic(case)
        if bad:
            raise ValueError(f"{label} schedule violates commitment logic: {bad[0]}")
    sub_cfg = SubproblemConfig(mode=cfg.sub_mode, big_m=cfg.big_m, threads=cfg.threads)
    rows = []
    for x in (x_nominal, x_robust):
        sub = solve_subproblem(case, x, ts, sub_cfg, conic)
        _, disp = solve_dispatch(case, x, apply_trajectory(case, ts, sub.worst_k), conic)
        rows.append((evaluate_cost(case, x, disp), sub.worst_k))
    grid = {
        g.id: {"nominal": list(x_nominal.u[g.id]), "robust": list(x_robust.u[g.id])}
        for g in case.generators
    }
    return ComparisonReport(rows[0][0], rows[1][0], rows[0][1], rows[1][1], grid)
