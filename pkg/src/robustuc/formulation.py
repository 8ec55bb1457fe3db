"""Primal unit-commitment model: commitment logic, dispatch and network rows.

The network uses the lifted voltage-product variables (c, s, cnn) of the
rectangular power-flow form, with the product equality relaxed to a rotated
second-order cone, and per-line on/off status entering only through row
right-hand sides so a whole scenario is one rhs vector away from another.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import EQ, GE, LE, ConstraintSystem, Key
from .errors import InfeasibleInitialState
from .network import Generator, NetworkCase, adjacency, require_valid


@dataclass(frozen=True)
class CommitmentDecision:
    """First-stage on/off, startup and shutdown indicators per unit and period."""

    u: dict
    y: dict
    z: dict

    @staticmethod
    def from_on_off(case: NetworkCase, on_off: dict) -> "CommitmentDecision":
        """Derive startup/shutdown indicators from an on/off matrix."""
        u, y, z = {}, {}, {}
        for g in case.generators:
            seq = tuple(int(v) for v in on_off[g.id])
            if len(seq) != case.periods:
                raise ValueError(f"unit {g.id}: expected {case.periods} periods")
            ys, zs, prev = [], [], g.u0
            for val in seq:
                delta = val - prev
                ys.append(1 if delta > 0 else 0)
                zs.append(1 if delta < 0 else 0)
                prev = val
            u[g.id] = seq
            y[g.id] = tuple(ys)
            z[g.id] = tuple(zs)
        return CommitmentDecision(u, y, z)

    @staticmethod
    def from_values(case: NetworkCase, values: dict) -> "CommitmentDecision":
        """Extract the committed schedule from a solved model's variable values."""
        u, y, z = {}, {}, {}
        for g in case.generators:
            u[g.id] = tuple(int(round(values[("u", g.id, t)])) for t in range(1, case.periods + 1))
            y[g.id] = tuple(int(round(values[("y", g.id, t)])) for t in range(1, case.periods + 1))
            z[g.id] = tuple(int(round(values[("z", g.id, t)])) for t in range(1, case.periods + 1))
        return CommitmentDecision(u, y, z)

    def commitment_cost(self, case: NetworkCase) -> float:
        """Fixed plus startup plus shutdown cost; synthetic units carry none."""
        total = 0.0
        for g in case.schedulable_units():
            total += sum(
                g.fixed_cost * self.u[g.id][t]
                + g.startup_cost * self.y[g.id][t]
                + g.shutdown_cost * self.z[g.id][t]
                for t in range(case.periods)
            )
        return total

    def check_logic(self, case: NetworkCase) -> list[str]:
        """Violations of the commitment logic, empty when schedule is feasible."""
        bad = []
        T = case.periods
        for g in case.generators:
            u, y, z = self.u[g.id], self.y[g.id], self.z[g.id]
            prev = g.u0
            for t in range(T):
                if y[t] - z[t] != u[t] - prev:
                    bad.append(f"{g.id}: transition mismatch at period {t + 1}")
                if y[t] + z[t] > 1:
                    bad.append(f"{g.id}: simultaneous startup and shutdown at {t + 1}")
                prev = u[t]
            if g.fixed_on and any(v != 1 for v in u):
                bad.append(f"{g.id}: fixed-on unit switched off")
            if not g.is_thermal:
                continue
            L = min(g.up_residual, T)
            F = min(g.down_residual, T)
            if any(u[t] != 1 for t in range(L)):
                bad.append(f"{g.id}: off during residual up time")
            if any(u[t] != 0 for t in range(F)):
                bad.append(f"{g.id}: on during residual down time")
            for t in range(T):
                if y[t]:
                    span = range(t, min(t + g.min_up, T))
                    if any(u[s] != 1 for s in span):
                        bad.append(f"{g.id}: min up time violated after startup at {t + 1}")
                if z[t]:
                    span = range(t, min(t + g.min_down, T))
                    if any(u[s] != 0 for s in span):
                        bad.append(f"{g.id}: min down time violated after shutdown at {t + 1}")
        return bad


class ScenarioDispatch:
    """Second-stage continuous values for one line-status vector."""

    def __init__(self, case: NetworkCase, values: dict):
        self.case = case
        self.values = values

    def p(self, gen_id: str, t: int) -> float:
        return self.values[("p", gen_id, t)]

    def q(self, gen_id: str, t: int) -> float:
        return self.values[("q", gen_id, t)]

    def p_avail(self, gen_id: str, t: int) -> float:
        return self.values[("pbar", gen_id, t)]

    def p_unserved(self, bus, t: int) -> float:
        # interior-point noise can leave slacks a hair below zero
        return max(0.0, self.values[("pu", bus, t)])

    def q_unserved(self, bus, t: int) -> float:
        return max(0.0, self.values[("qu", bus, t)])

    def flow_p(self, n, m, t: int) -> float:
        return self.values[("pf", n, m, t)]

    def flow_q(self, n, m, t: int) -> float:
        return self.values[("qf", n, m, t)]

    def served_cost(self) -> float:
        base = self.case.base_mva
        return sum(
            g.variable_cost * base * self.p(g.id, t)
            for g in self.case.generators
            for t in range(1, self.case.periods + 1)
        )

    def unserved_cost(self) -> float:
        base = self.case.base_mva
        return sum(
            self.case.unserved_cost * base * (self.p_unserved(n, t) + self.q_unserved(n, t))
            for n in self.case.buses
            for t in range(1, self.case.periods + 1)
        )


def evaluate_cost(case: NetworkCase, x: CommitmentDecision,
                  d: ScenarioDispatch) -> tuple[float, float]:
    """(commitment + served energy cost, unserved energy cost); sum is the objective."""
    return x.commitment_cost(case) + d.served_cost(), d.unserved_cost()


def _check_initial_state(g: Generator, T: int) -> None:
    L = min(g.up_residual, T)
    F = min(g.down_residual, T)
    if L > 0 and g.u0 != 1:
        raise InfeasibleInitialState(f"{g.id}: residual up time but initially off")
    if F > 0 and g.u0 != 0:
        raise InfeasibleInitialState(f"{g.id}: residual down time but initially on")


def build_commitment_block(case: NetworkCase,
                           into: ConstraintSystem | None = None) -> ConstraintSystem:
    """Binary commitment variables, transition logic and minimum up/down rows."""
    require_valid(case)
    cs = into if into is not None else ConstraintSystem()
    T = case.periods
    for g in case.generators:
        _check_initial_state(g, T)
        for t in range(1, T + 1):
            if g.fixed_on:
                cs.add_var(("u", g.id, t), "binary", 1, 1)
                cs.add_var(("y", g.id, t), "binary", 0, 0)
                cs.add_var(("z", g.id, t), "binary", 0, 0)
            else:
                cs.add_var(("u", g.id, t), "binary", 0, 1)
                cs.add_var(("y", g.id, t), "binary", 0, 1)
                cs.add_var(("z", g.id, t), "binary", 0, 1)
            cs.add_obj(("u", g.id, t), g.fixed_cost)
            cs.add_obj(("y", g.id, t), g.startup_cost)
            cs.add_obj(("z", g.id, t), g.shutdown_cost)

        for t in range(1, T + 1):
            coeffs = {("y", g.id, t): 1.0, ("z", g.id, t): -1.0, ("u", g.id, t): -1.0}
            if t == 1:
                cs.add_row(("logic", g.id, t), coeffs, EQ, -float(g.u0))
            else:
                coeffs[("u", g.id, t - 1)] = 1.0
                cs.add_row(("logic", g.id, t), coeffs, EQ, 0.0)
            cs.add_row(("excl", g.id, t),
                       {("y", g.id, t): 1.0, ("z", g.id, t): 1.0}, LE, 1.0)

        if not g.is_thermal or g.fixed_on:
            continue
        L = min(g.up_residual, T)
        F = min(g.down_residual, T)
        if L:
            cs.add_row(("must_on", g.id),
                       {("u", g.id, t): 1.0 for t in range(1, L + 1)}, EQ, float(L))
        if F:
            cs.add_row(("must_off", g.id),
                       {("u", g.id, t): 1.0 for t in range(1, F + 1)}, EQ, 0.0)

        for tt in range(L + 1, T - g.min_up + 2):
            coeffs = {("u", g.id, t): 1.0 for t in range(tt, tt + g.min_up)}
            coeffs[("y", g.id, tt)] = coeffs.get(("y", g.id, tt), 0.0) - float(g.min_up)
            cs.add_row(("min_up", g.id, tt), coeffs, GE, 0.0)
        for tt in range(max(1, T - g.min_up + 2), T + 1):
            coeffs = {("u", g.id, t): 1.0 for t in range(tt, T + 1)}
            coeffs[("y", g.id, tt)] = coeffs.get(("y", g.id, tt), 0.0) - float(T - tt + 1)
            cs.add_row(("min_up_tail", g.id, tt), coeffs, GE, 0.0)

        for tt in range(F + 1, T - g.min_down + 2):
            coeffs = {("u", g.id, t): 1.0 for t in range(tt, tt + g.min_down)}
            coeffs[("z", g.id, tt)] = coeffs.get(("z", g.id, tt), 0.0) + float(g.min_down)
            cs.add_row(("min_down", g.id, tt), coeffs, LE, float(g.min_down))
        for tt in range(max(1, T - g.min_down + 2), T + 1):
            coeffs = {("u", g.id, t): 1.0 for t in range(tt, T + 1)}
            coeffs[("z", g.id, tt)] = coeffs.get(("z", g.id, tt), 0.0) + float(T - tt + 1)
            cs.add_row(("min_down_tail", g.id, tt), coeffs, LE, float(T - tt + 1))
    return cs


def build_dispatch_block(
    case: NetworkCase,
    status: dict | None = None,
    x: CommitmentDecision | None = None,
    into: ConstraintSystem | None = None,
    scope: int | None = None,
    set_objective: bool = True,
) -> tuple[ConstraintSystem, dict]:
    """Continuous dispatch and network rows for one scenario.

    With ``x`` given, commitment terms fold into right-hand sides and the
    block is a standalone, dualizable SOCP (variables free, bounds as rows).
    Without ``x`` the rows reference the commitment variables of ``into``.
    With ``status=None`` the per-line on/off terms stay parametric.
    Returns the system and the dispatch-cost coefficient map (used either as
    the objective or as an epigraph row by the master assembler).
    """
    require_valid(case)
    cs = into if into is not None else ConstraintSystem()
    T = case.periods
    base = case.base_mva
    neighbors, units_at = adjacency(case)

    def kf(*parts) -> Key:
        return parts if scope is None else ("scn", scope, *parts)

    def uval(g: Generator, t: int) -> float:
        if t == 0:
            return float(g.u0)
        return float(x.u[g.id][t - 1])

    def commit_terms(coeffs: dict, rhs: float, terms: list) -> tuple[dict, float]:
        # terms: (kind, gen, period, coefficient) moved to rhs when x is fixed
        for kind, g, t, coeff in terms:
            if x is not None:
                val = {"u": uval(g, t), "y": float(x.y[g.id][t - 1]),
                       "z": float(x.z[g.id][t - 1])}[kind] if t >= 1 else uval(g, t)
                rhs -= coeff * val
            else:
                if kind == "u" and t == 0:
                    rhs -= coeff * float(g.u0)
                else:
                    key = (kind, g.id, t)
                    coeffs[key] = coeffs.get(key, 0.0) + coeff
        return coeffs, rhs

    cost: dict[Key, float] = {}

    for g in case.generators:
        for t in range(1, T + 1):
            for name in ("p", "q", "pbar"):
                cs.add_var(kf(name, g.id, t))
            cost[kf("p", g.id, t)] = g.variable_cost * base

            co, rhs = commit_terms({kf("p", g.id, t): -1.0}, 0.0, [("u", g, t, g.p_min)])
            cs.add_row(kf("p_lb", g.id, t), co, LE, rhs)
            co, rhs = commit_terms({kf("p", g.id, t): 1.0}, 0.0, [("u", g, t, -g.p_max)])
            cs.add_row(kf("p_ub", g.id, t), co, LE, rhs)
            cs.add_row(kf("p_pbar", g.id, t),
                       {kf("p", g.id, t): 1.0, kf("pbar", g.id, t): -1.0}, LE, 0.0)
            co, rhs = commit_terms({kf("pbar", g.id, t): 1.0}, 0.0, [("u", g, t, -g.p_max)])
            cs.add_row(kf("pbar_ub", g.id, t), co, LE, rhs)
            co, rhs = commit_terms({kf("q", g.id, t): -1.0}, 0.0, [("u", g, t, g.q_min)])
            cs.add_row(kf("q_lb", g.id, t), co, LE, rhs)
            co, rhs = commit_terms({kf("q", g.id, t): 1.0}, 0.0, [("u", g, t, -g.q_max)])
            cs.add_row(kf("q_ub", g.id, t), co, LE, rhs)

        if not g.is_thermal:
            continue
        # ramp limits beyond p_max are vacuous; clamping keeps the row data on
        # the same scale as the rest of the model
        r_up = min(g.ramp_up, g.p_max)
        r_su = min(g.ramp_startup, g.p_max)
        r_dn = min(g.ramp_down, g.p_max)
        r_sd = min(g.ramp_shutdown, g.p_max)
        for t in range(1, T + 1):
            # up/startup ramp on both the dispatch level and its available cap
            for fam, lead in (("ramp_up", ("p", g.id, t)), ("ramp_pbar", ("pbar", g.id, t))):
                coeffs = {kf(*lead): 1.0}
                rhs = 0.0
                if t > 1:
                    coeffs[kf("p", g.id, t - 1)] = -1.0
                else:
                    rhs += g.p0
                co, rhs = commit_terms(coeffs, rhs, [("u", g, t - 1, -r_up),
                                                     ("y", g, t, -r_su)])
                cs.add_row(kf(fam, g.id, t), co, LE, rhs)
            # down/shutdown ramp
            coeffs = {kf("p", g.id, t): -1.0}
            rhs = 0.0
            if t > 1:
                coeffs[kf("p", g.id, t - 1)] = 1.0
            else:
                rhs -= g.p0
            co, rhs = commit_terms(coeffs, rhs, [("u", g, t - 1, -r_dn),
                                                 ("z", g, t, -r_sd)])
            cs.add_row(kf("ramp_down", g.id, t), co, LE, rhs)
            # available cap shrinks ahead of a shutdown
            coeffs = {kf("pbar", g.id, t): 1.0}
            terms = [("u", g, t, -g.p_max)]
            if t < T:
                terms.append(("z", g, t + 1, g.p_max - r_sd))
            co, rhs = commit_terms(coeffs, 0.0, terms)
            cs.add_row(kf("pbar_sd", g.id, t), co, LE, rhs)

    for area in case.reserve_areas:
        members = [case.generator(uid) for uid in area.units]
        members = [g for g in members if g.is_thermal]
        for t in range(1, T + 1):
            coeffs = {}
            for g in members:
                coeffs[kf("p", g.id, t)] = 1.0
                coeffs[kf("pbar", g.id, t)] = -1.0
            cs.add_row(kf("reserve", area.id, t), coeffs, LE, -area.requirement[t - 1])

    for n in case.buses:
        for t in range(1, T + 1):
            cs.add_var(kf("pu", n, t))
            cs.add_var(kf("qu", n, t))
            cs.add_var(kf("cnn", n, t))
            cost[kf("pu", n, t)] = case.unserved_cost * base
            cost[kf("qu", n, t)] = case.unserved_cost * base
            cs.add_row(kf("pu_lb", n, t), {kf("pu", n, t): -1.0}, LE, 0.0)
            cs.add_row(kf("pu_ub", n, t), {kf("pu", n, t): 1.0}, LE, case.demand_p[n][t - 1])
            cs.add_row(kf("qu_lb", n, t), {kf("qu", n, t): -1.0}, LE, 0.0)
            cs.add_row(kf("qu_ub", n, t), {kf("qu", n, t): 1.0}, LE, case.demand_q[n][t - 1])
            cs.add_row(kf("cnn_lb", n, t), {kf("cnn", n, t): -1.0}, LE, -case.v_min[n] ** 2)
            cs.add_row(kf("cnn_ub", n, t), {kf("cnn", n, t): 1.0}, LE, case.v_max[n] ** 2)

    for (n, m) in case.lines:
        G = case.line_conductance[(n, m)]
        B = case.line_susceptance[(n, m)]
        bsh = case.line_shunt[(n, m)]
        S = case.line_capacity[(n, m)]
        vpair = case.v_pair(n, m)
        dead = status is not None and status[(n, m)] == 0
        for t in range(1, T + 1):
            for (i, j) in ((n, m), (m, n)):
                for name in ("pf", "qf", "c", "s", "cm"):
                    cs.add_var(kf(name, i, j, t))

            for (i, j) in ((n, m), (m, n)):
                cs.add_row(kf("flow_p", i, j, t),
                           {kf("pf", i, j, t): 1.0, kf("cm", i, j, t): G,
                            kf("c", i, j, t): -G, kf("s", i, j, t): B}, EQ, 0.0)
                cs.add_row(kf("flow_q", i, j, t),
                           {kf("qf", i, j, t): 1.0, kf("cm", i, j, t): -(B - bsh),
                            kf("s", i, j, t): G, kf("c", i, j, t): B}, EQ, 0.0)

            cs.add_row(kf("sym_c", n, m, t),
                       {kf("c", n, m, t): 1.0, kf("c", m, n, t): -1.0}, EQ, 0.0)
            cs.add_row(kf("sym_s", n, m, t),
                       {kf("s", n, m, t): 1.0, kf("s", m, n, t): 1.0}, EQ, 0.0)

            if dead:
                # zero-fixing specialization: the lifted variables of a dead
                # line are pinned outright and its cones vanish, which keeps
                # a strictly interior point available for the solver
                cs.add_row(kf("c_fix", n, m, t), {kf("c", n, m, t): 1.0}, EQ, 0.0)
                cs.add_row(kf("s_fix", n, m, t), {kf("s", n, m, t): 1.0}, EQ, 0.0)
                for (i, j) in ((n, m), (m, n)):
                    cs.add_row(kf("cm_fix", i, j, t), {kf("cm", i, j, t): 1.0},
                               EQ, 0.0)
                continue

            for name in ("f", "d1", "d2", "d3", "d4"):
                cs.add_var(kf(name, n, m, t))
            cs.add_row(kf("cap_f", n, m, t), {kf("f", n, m, t): 1.0}, EQ, S)
            cs.add_cone(kf("cap", n, m, t), kf("f", n, m, t),
                        (kf("pf", n, m, t), kf("qf", n, m, t)), kind="capacity")

            cs.add_row(kf("d1", n, m, t),
                       {kf("d1", n, m, t): 1.0, kf("c", n, m, t): -2.0}, EQ, 0.0)
            cs.add_row(kf("d2", n, m, t),
                       {kf("d2", n, m, t): 1.0, kf("s", n, m, t): -2.0}, EQ, 0.0)
            cs.add_row(kf("d3", n, m, t),
                       {kf("d3", n, m, t): 1.0, kf("cm", n, m, t): -1.0,
                        kf("cm", m, n, t): 1.0}, EQ, 0.0)
            cs.add_row(kf("d4", n, m, t),
                       {kf("d4", n, m, t): 1.0, kf("cm", n, m, t): -1.0,
                        kf("cm", m, n, t): -1.0}, EQ, 0.0)
            cs.add_cone(kf("soc", n, m, t), kf("d4", n, m, t),
                        (kf("d1", n, m, t), kf("d2", n, m, t), kf("d3", n, m, t)),
                        kind="soc")

            line = (n, m)

            def arow(key, coeffs, rhs, slope):
                if status is None:
                    cs.add_row(key, coeffs, LE, rhs, line=line, rhs_slope=slope)
                else:
                    cs.add_row(key, coeffs, LE, rhs + slope * status[line])

            arow(kf("c_lb", n, m, t), {kf("c", n, m, t): -1.0}, 0.0, vpair)
            arow(kf("c_ub", n, m, t), {kf("c", n, m, t): 1.0}, 0.0, vpair)
            arow(kf("s_lb", n, m, t), {kf("s", n, m, t): -1.0}, 0.0, vpair)
            arow(kf("s_ub", n, m, t), {kf("s", n, m, t): 1.0}, 0.0, vpair)
            for (i, j) in ((n, m), (m, n)):
                vmin2 = case.v_min[i] ** 2
                vmax2 = case.v_max[i] ** 2
                arow(kf("cm_lb", i, j, t), {kf("cm", i, j, t): -1.0}, 0.0, -vmin2)
                arow(kf("cm_ub", i, j, t), {kf("cm", i, j, t): 1.0}, 0.0, vmax2)
                arow(kf("mc_lb", i, j, t),
                     {kf("cnn", i, t): 1.0, kf("cm", i, j, t): -1.0}, vmax2, -vmax2)
                arow(kf("mc_ub", i, j, t),
                     {kf("cm", i, j, t): 1.0, kf("cnn", i, t): -1.0}, -vmin2, vmin2)

    for n, t in ((n, t) for n in case.buses for t in range(1, T + 1)):
        pco = {kf("pu", n, t): 1.0}
        qco = {kf("qu", n, t): 1.0}
        for gid in units_at[n]:
            pco[kf("p", gid, t)] = 1.0
            qco[kf("q", gid, t)] = 1.0
        for m in neighbors[n]:
            pco[kf("pf", n, m, t)] = -1.0
            qco[kf("qf", n, m, t)] = -1.0
        cs.add_row(kf("bal_p", n, t), pco, EQ, case.demand_p[n][t - 1])
        cs.add_row(kf("bal_q", n, t), qco, EQ, case.demand_q[n][t - 1])

    if set_objective:
        for k, coeff in cost.items():
            cs.add_obj(k, coeff)
    return cs, cost


@dataclass
class MasterProblem:
    """Commitment block plus one dispatch block per adopted scenario."""

    cs: ConstraintSystem
    case: NetworkCase
    scenarios: dict  # scenario index -> line-status vector

    def nnz(self) -> int:
        return self.cs.nnz()


def assemble_master(case: NetworkCase, scenarios: dict) -> MasterProblem:
    """Epigraph master: commitment cost plus the worst adopted-scenario cost.

    The epigraph variable lives in cost-normalized units so the epigraph rows
    mix order-one entries with the per-unit network data; raw dollar-scale
    coefficients next to admittances cost the MILP solver dearly.
    """
    if not scenarios:
        raise ValueError("master needs at least one scenario (use {0: all-on})")
    scale = max(1.0, case.unserved_cost * case.base_mva)
    cs = build_commitment_block(case)
    cs.add_var(("R",), lb=0.0)
    cs.add_obj(("R",), scale)
    for k, status in scenarios.items():
        _, cost = build_dispatch_block(case, status=status, into=cs, scope=k,
                                       set_objective=False)
        coeffs = {key: v / scale for key, v in cost.items()}
        coeffs[("R",)] = -1.0
        cs.add_row(("epi", k), coeffs, LE, 0.0)
    return MasterProblem(cs, case, dict(scenarios))


def scoped_values(values: dict, scope: int) -> dict:
    """Extract one scenario's dispatch values with the scope prefix stripped."""
    out = {}
    for key, val in values.items():
        if len(key) >= 2 and key[0] == "scn" and key[1] == scope:
            out[key[2:]] = val
    return out


def shedding_point(case: NetworkCase, x: CommitmentDecision, status: dict,
                   level: float | None = None) -> dict:
    """Full-shedding feasible point: flat voltage, zero flows, demand on slack.

    Exists whenever committed units have zero minimum output and a reactive
    range containing zero, voltage bands share a common level, shunts are
    zero, and no reserve requirement is active; raises ValueError otherwise.
    """
    lo = max(case.v_min[n] ** 2 for n in case.buses)
    hi = min(case.v_max[n] ** 2 for n in case.buses)
    if lo > hi:
        raise ValueError("voltage bands admit no common level")
    v = level if level is not None else lo
    if any(case.line_shunt[e] != 0.0 for e in case.lines):
        raise ValueError("flat-voltage witness needs zero shunt susceptance")
    if any(sum(a.requirement) > 0 for a in case.reserve_areas):
        raise ValueError("witness incompatible with positive reserve requirements")
    point: dict[Key, float] = {}
    for g in case.generators:
        if g.is_thermal and g.p0 > g.ramp_down * g.u0 + g.ramp_shutdown * x.z[g.id][0]:
            raise ValueError(f"unit {g.id} cannot ramp down to zero in one period")
        for t in range(1, case.periods + 1):
            on = x.u[g.id][t - 1]
            if on and (g.p_min > 0 or g.q_min > 0 or g.q_max < 0):
                raise ValueError(f"unit {g.id} cannot idle at zero output")
            point[("p", g.id, t)] = 0.0
            point[("q", g.id, t)] = 0.0
            point[("pbar", g.id, t)] = 0.0
    for n in case.buses:
        for t in range(1, case.periods + 1):
            point[("pu", n, t)] = case.demand_p[n][t - 1]
            point[("qu", n, t)] = case.demand_q[n][t - 1]
            point[("cnn", n, t)] = v
    for (n, m) in case.lines:
        on = status[(n, m)]
        val = v if on else 0.0
        for t in range(1, case.periods + 1):
            for (i, j) in ((n, m), (m, n)):
                point[("c", i, j, t)] = val
                point[("s", i, j, t)] = 0.0
                point[("cm", i, j, t)] = val
                point[("pf", i, j, t)] = 0.0
                point[("qf", i, j, t)] = 0.0
            point[("f", n, m, t)] = case.line_capacity[(n, m)]
            point[("d1", n, m, t)] = 2.0 * val
            point[("d2", n, m, t)] = 0.0
            point[("d3", n, m, t)] = 0.0
            point[("d4", n, m, t)] = 2.0 * val
    return point
