"""Brute-force reference solvers for small instances.

Ground truth is built on an entirely separate path from the production code:
the commitment space is enumerated directly, the per-scenario dispatch is
modeled in cvxpy from the case data (no shared builder), and feasibility of
each candidate schedule is checked semantically. Agreement between this
module and the decomposition is the package's strongest correctness check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import cvxpy as cp
import numpy as np

from .errors import EnumerationTooLarge
from .formulation import CommitmentDecision
from .network import NetworkCase, adjacency, require_valid
from .scenarios import TrajectorySet, apply_trajectory


@dataclass
class OracleResult:
    optimum: float
    commitment: CommitmentDecision
    table: dict = field(default_factory=dict)  # on/off pattern -> per-scenario costs
    enumeration_count: int = 0


def dispatch_value_cvxpy(case: NetworkCase, x: CommitmentDecision,
                         status: dict) -> float:
    """Scenario dispatch cost modeled independently in cvxpy."""
    T = case.periods
    base = case.base_mva
    neighbors, units_at = adjacency(case)
    gens = {g.id: g for g in case.generators}

    p = {g: cp.Variable(T) for g in gens}
    q = {g: cp.Variable(T) for g in gens}
    pbar = {g: cp.Variable(T) for g in gens}
    pu = {n: cp.Variable(T) for n in case.buses}
    qu = {n: cp.Variable(T) for n in case.buses}
    cnn = {n: cp.Variable(T) for n in case.buses}
    directed = [(n, m) for (n, m) in case.lines] + [(m, n) for (n, m) in case.lines]
    pf = {e: cp.Variable(T) for e in directed}
    qf = {e: cp.Variable(T) for e in directed}
    cpair = {e: cp.Variable(T) for e in case.lines}
    spair = {e: cp.Variable(T) for e in case.lines}
    cm = {e: cp.Variable(T) for e in directed}

    cons = []
    for gid, g in gens.items():
        u = np.array(x.u[gid], dtype=float)
        y = np.array(x.y[gid], dtype=float)
        z = np.array(x.z[gid], dtype=float)
        cons += [p[gid] >= g.p_min * u, p[gid] <= g.p_max * u,
                 p[gid] <= pbar[gid], pbar[gid] <= g.p_max * u,
                 q[gid] >= g.q_min * u, q[gid] <= g.q_max * u]
        if g.is_thermal:
            # same vacuous-ramp clamp as the production builder
            r_up, r_su = min(g.ramp_up, g.p_max), min(g.ramp_startup, g.p_max)
            r_dn, r_sd = min(g.ramp_down, g.p_max), min(g.ramp_shutdown, g.p_max)
            prev_p = lambda t: p[gid][t - 1] if t >= 1 else g.p0
            prev_u = lambda t: u[t - 1] if t >= 1 else float(g.u0)
            for t in range(T):
                up_cap = r_up * prev_u(t) + r_su * y[t]
                cons.append(p[gid][t] - prev_p(t) <= up_cap)
                cons.append(pbar[gid][t] - prev_p(t) <= up_cap)
                cons.append(prev_p(t) - p[gid][t] <= r_dn * prev_u(t) + r_sd * z[t])
                z_next = z[t + 1] if t + 1 < T else 0.0
                cons.append(pbar[gid][t]
                            <= g.p_max * (u[t] - z_next) + r_sd * z_next)
    for area in case.reserve_areas:
        members = [gid for gid in area.units if gens[gid].is_thermal]
        for t in range(T):
            cons.append(sum(pbar[gid][t] - p[gid][t] for gid in members)
                        >= area.requirement[t])

    for n in case.buses:
        dp = np.array(case.demand_p[n])
        dq = np.array(case.demand_q[n])
        cons += [pu[n] >= 0, pu[n] <= dp, qu[n] >= 0, qu[n] <= dq,
                 cnn[n] >= case.v_min[n] ** 2, cnn[n] <= case.v_max[n] ** 2]
        flow_p = sum(pf[(n, m)] for m in neighbors[n]) if neighbors[n] else 0.0
        flow_q = sum(qf[(n, m)] for m in neighbors[n]) if neighbors[n] else 0.0
        gen_p = sum(p[gid] for gid in units_at[n]) if units_at[n] else 0.0
        gen_q = sum(q[gid] for gid in units_at[n]) if units_at[n] else 0.0
        cons.append(gen_p - dp + pu[n] == flow_p)
        cons.append(gen_q - dq + qu[n] == flow_q)

    for (n, m) in case.lines:
        G = case.line_conductance[(n, m)]
        B = case.line_susceptance[(n, m)]
        bsh = case.line_shunt[(n, m)]
        S = case.line_capacity[(n, m)]
        a = status[(n, m)]
        vnm = case.v_pair(n, m)
        cvar, svar = cpair[(n, m)], spair[(n, m)]
        for (i, j), sflip in (((n, m), 1.0), ((m, n), -1.0)):
            s_ij = sflip * svar  # the odd-symmetry partner of the stored variable
            cons.append(pf[(i, j)] == -G * cm[(i, j)] + G * cvar - B * s_ij)
            cons.append(qf[(i, j)] == (B - bsh) * cm[(i, j)] - G * s_ij - B * cvar)
            vmin2, vmax2 = case.v_min[i] ** 2, case.v_max[i] ** 2
            cons += [cm[(i, j)] >= a * vmin2, cm[(i, j)] <= a * vmax2,
                     cnn[i] - vmax2 * (1 - a) <= cm[(i, j)],
                     cm[(i, j)] <= cnn[i] - vmin2 * (1 - a)]
        cons += [cvar <= a * vnm, cvar >= -a * vnm, svar <= a * vnm, svar >= -a * vnm]
        if a:  # dead-line cones vanish under the zero-fixing specialization
            cons.append(cp.norm(cp.vstack([pf[(n, m)], qf[(n, m)]]), axis=0) <= S)
            cons.append(cp.norm(cp.vstack([2 * cvar, 2 * svar, cm[(n, m)] - cm[(m, n)]]),
                                axis=0) <= cm[(n, m)] + cm[(m, n)])

    cost = sum(g.variable_cost * base * cp.sum(p[gid]) for gid, g in gens.items())
    cost += case.unserved_cost * base * sum(cp.sum(pu[n]) + cp.sum(qu[n])
                                            for n in case.buses)
    prob = cp.Problem(cp.Minimize(cost), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"oracle dispatch ended with status {prob.status}")
    return float(prob.value)


def _free_thermal_units(case: NetworkCase) -> list:
    return [g for g in case.generators if g.is_thermal and not g.fixed_on]


def _candidate_schedules(case: NetworkCase, limit: int):
    """Every logic-feasible commitment; renewables and pinned units stay on."""
    free = _free_thermal_units(case)
    n_bits = len(free) * case.periods
    if 2 ** n_bits > limit:
        raise EnumerationTooLarge(
            f"2^{n_bits} commitment patterns exceed the limit {limit}"
        )
    fixed_ids = [g.id for g in case.generators if g not in free]
    count = 0
    for bits in itertools.product((0, 1), repeat=n_bits):
        on_off = {}
        for i, g in enumerate(free):
            on_off[g.id] = bits[i * case.periods:(i + 1) * case.periods]
        for gid in fixed_ids:
            on_off[gid] = [1] * case.periods
        x = CommitmentDecision.from_on_off(case, on_off)
        count += 1
        if not x.check_logic(case):
            yield bits, x, count


def brute_force_robust(case: NetworkCase, ts: TrajectorySet,
                       limit: int = 2 ** 16,
                       scenario_subset: list | None = None) -> OracleResult:
    """Enumerate commitments, price each against its worst scenario, keep the min.

    Ties go to the lexicographically smallest on/off pattern, which is the
    order the enumeration visits.
    """
    require_valid(case)
    scenarios = (sorted(scenario_subset) if scenario_subset is not None
                 else list(range(ts.n_traj + 1)))
    statuses = {k: apply_trajectory(case, ts, k) for k in scenarios}
    best_val, best_x, best_bits = math.inf, None, None
    table = {}
    examined = 0
    for bits, x, count in _candidate_schedules(case, limit):
        examined = count
        commit = x.commitment_cost(case)
        per_k = {k: dispatch_value_cvxpy(case, x, statuses[k]) for k in scenarios}
        worst = commit + max(per_k.values())
        table[bits] = {"commitment": commit, "scenario_costs": per_k, "worst": worst}
        if worst < best_val - 1e-9:
            best_val, best_x, best_bits = worst, x, bits
    if best_x is None:
        raise RuntimeError("no logic-feasible commitment exists")
    return OracleResult(best_val, best_x, table, examined)


def extensive_form(case: NetworkCase, ts: TrajectorySet, method: str = "oicpa",
                   epsilon: float = 1e-5, limit: int = 2 ** 16) -> float:
    """Deterministic equivalent over the whole trajectory set.

    method="oicpa" assembles the all-scenario master and solves it with the
    cutting-plane method (no cone-capable mixed-integer backend is assumed);
    method="enumerate" routes through the brute-force oracle instead.
    """
    if method == "enumerate":
        return brute_force_robust(case, ts, limit=limit).optimum
    if method != "oicpa":
        raise ValueError(f"unknown extensive-form method {method!r}")
    from .formulation import assemble_master
    from .oicpa import OicpaConfig, run_oicpa

    scenarios = {k: apply_trajectory(case, ts, k) for k in range(ts.n_traj + 1)}
    res = run_oicpa(assemble_master(case, scenarios), OicpaConfig(epsilon=epsilon))
    if res.status != "optimal":
        raise RuntimeError(f"extensive-form solve ended with status {res.status}")
    return res.objective
