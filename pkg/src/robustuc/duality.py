"""Dual of the fixed-commitment dispatch SOCP and the worst-trajectory search.

The dual is derived mechanically from the primal constraint system rather
than transcribed, so every multiplier is named by the primal row it prices.
The worst-trajectory subproblem substitutes the trajectory-indicator form of
each line status into the dual objective and linearizes the resulting
indicator-times-multiplier products exactly with big-M boxes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

from .backends import ClarabelConicBackend, HighsMilpBackend, SolverOptions
from .constraints import EQ, GE, LE, ConstraintSystem, Key, dualize
from .errors import BackendFailure, BigMTooSmall
from .formulation import CommitmentDecision, build_dispatch_block
from .network import NetworkCase, require_valid
from .scenarios import TrajectorySet, apply_trajectory


def value_cap(case: NetworkCase) -> float:
    """Upper bound on any scenario's dispatch cost (full-shedding cost)."""
    return case.unserved_cost * case.base_mva * case.total_demand()


def default_big_m(case: NetworkCase) -> float:
    """Cap for the switching-row multipliers in the linearized subproblem.

    Balance prices top out at the shedding cost, but the multipliers of the
    voltage-product boxes absorb those prices scaled by the line constants,
    so the pure cost cap is amplified by the strongest line coupling. The
    post-solve at-bound check still guards the final value.
    """
    coupling = 0.0
    for e in case.lines:
        G = abs(case.line_conductance[e])
        B = abs(case.line_susceptance[e])
        bsh = abs(case.line_shunt[e])
        coupling = max(coupling, G + B + abs(B - bsh) + bsh)
    return value_cap(case) * (1.0 + coupling)


@dataclass
class SubproblemConfig:
    mode: str = "enumerate"  # "enumerate" | "monolithic"
    big_m: float | None = None
    threads: int = 1


class DualSolution:
    """Multipliers keyed by the primal rows and cones they price."""

    def __init__(self, values: dict):
        self.values = values

    def multiplier(self, key: Key) -> float:
        return self.values[key]

    def family(self, name: str) -> dict:
        return {k: v for k, v in self.values.items()
                if isinstance(k, tuple) and k and k[0] == name}

    def cone_block(self, cone_key: Key) -> tuple:
        head = self.values[(*cone_key, "t")]
        tail = []
        i = 0
        while (*cone_key, "x", i) in self.values:
            tail.append(self.values[(*cone_key, "x", i)])
            i += 1
        return (head, *tail)


@dataclass
class MergedSubproblem:
    """Dual system with trajectory indicators and linearized status products.

    ``big_m`` is stored in the normalized multiplier units the system is
    solved in; ``scale`` converts back to dollars for reporting.
    """

    cs: ConstraintSystem
    n_traj: int
    big_m: float
    scale: float = 1.0
    # (product var, priced dual var, line) triples that carry the big-M rows
    products: list = field(default_factory=list)


@dataclass
class SubproblemResult:
    value: float
    worst_k: int
    dual: DualSolution
    per_scenario: dict = field(default_factory=dict)
    runtime: float = 0.0


def cost_scale(case: NetworkCase) -> float:
    """Normalization constant taking dollar-sized costs to order one."""
    return max(1.0, case.unserved_cost * case.base_mva)


def _normalized_dual(primal: ConstraintSystem, s: float) -> ConstraintSystem:
    # cost-normalize before dualization and fold the scale back into the dual
    # objective: the dual's value stays in dollars while its multipliers (and
    # stationarity right-hand sides) keep unit magnitude; without this the
    # interior-point solves lose several digits to cancellation
    primal.objective = {k: v / s for k, v in primal.objective.items()}
    dual = dualize(primal)
    dual.objective = {k: v * s for k, v in dual.objective.items()}
    dual.obj_param = {k: (line, coeff * s)
                      for k, (line, coeff) in dual.obj_param.items()}
    return dual


def build_parametric_dual(case: NetworkCase, x: CommitmentDecision) -> ConstraintSystem:
    """Dual of the dispatch problem with line statuses left symbolic."""
    primal, _ = build_dispatch_block(case, status=None, x=x)
    return _normalized_dual(primal, cost_scale(case))


def build_dual(case: NetworkCase, x: CommitmentDecision, status: dict) -> ConstraintSystem:
    """Maximization SOCP dual of the dispatch problem for one status vector.

    Dualizes the specialized primal directly, so dead lines contribute plain
    equality multipliers instead of degenerate cone blocks.
    """
    require_valid(case)
    primal, _ = build_dispatch_block(case, status=status, x=x)
    return _normalized_dual(primal, cost_scale(case))


def build_merged_subproblem(case: NetworkCase, x: CommitmentDecision,
                            ts: TrajectorySet,
                            big_m: float | None = None) -> MergedSubproblem:
    """Worst-trajectory model: dual feasibility plus indicator choice rows.

    Every dual objective term of the form coeff * a_line * multiplier becomes
    coeff * w with four box rows tying w to the multiplier and the line's
    survival indicator; the line status itself is the affine form in the
    trajectory indicators, of which at most one may be active.
    """
    require_valid(case)
    s = cost_scale(case)
    M = (big_m if big_m is not None else default_big_m(case)) / s
    dual = build_parametric_dual(case, x)
    if ts.n_traj == 0:
        all_on = {line: 1 for line in case.lines}
        return MergedSubproblem(dual.substitute_line_status(all_on), 0, M, s)

    # trajectories hitting each line, for the indicator expansion of its status
    hit: dict[tuple, list[int]] = {line: [] for line in case.lines}
    for k in range(1, ts.n_traj + 1):
        for line in ts.disabled[k - 1]:
            hit[line].append(k)

    cs = dual
    for k in range(1, ts.n_traj + 1):
        cs.add_var(("omega", k), "binary", 0, 1)
    cs.add_row(("pick",), {("omega", k): 1.0 for k in range(1, ts.n_traj + 1)}, LE, 1.0)

    products = []
    param = dict(cs.obj_param)
    cs.obj_param = {}
    for lam_key, (line, coeff) in param.items():
        outages = hit[line]
        if not outages:
            # no trajectory touches this line: status is identically one
            cs.add_obj(lam_key, coeff)
            continue
        w = ("w", *lam_key)
        cs.add_var(w, lb=0.0)
        cs.add_obj(w, coeff)
        # w <= M * a_line, with a_line = 1 - sum of hitting indicators
        co = {w: 1.0}
        for k in outages:
            co[("omega", k)] = M
        cs.add_row(("w_cap", *lam_key), co, LE, M)
        # multiplier - M * (1 - a_line) <= w
        co = {lam_key: 1.0, w: -1.0}
        for k in outages:
            co[("omega", k)] = -M
        cs.add_row(("w_floor", *lam_key), co, LE, 0.0)
        cs.add_row(("w_tie", *lam_key), {w: 1.0, lam_key: -1.0}, LE, 0.0)
        products.append((w, lam_key, line))
    return MergedSubproblem(cs, ts.n_traj, M, s, products)


def _check_big_m(ms: MergedSubproblem, values: dict) -> None:
    # a truncated multiplier distorts the value even on a dead line, because
    # the cap propagates through the stationarity equalities
    slack = max(1e-6, 1e-6 * ms.big_m)
    for w, lam, line in ms.products:
        if values[w] >= ms.big_m - slack or values[lam] >= ms.big_m - slack:
            raise BigMTooSmall(
                f"multiplier {lam} for line {line} sits at the big-M cap "
                f"{ms.big_m * ms.scale:g}; raise big_m"
            )


def _fix_omega(cs: ConstraintSystem, k: int, n_traj: int) -> ConstraintSystem:
    out = ConstraintSystem(cs.minimize)
    out.vars = {}
    for key, v in cs.vars.items():
        if key[0] == "omega":
            val = 1.0 if key[1] == k else 0.0
            out.vars[key] = type(v)(key, "continuous", val, val)
        else:
            out.vars[key] = type(v)(key, v.kind, v.lb, v.ub)
    out.rows = cs.rows
    out.cones = cs.cones
    out.objective = cs.objective
    out.obj_const = cs.obj_const
    return out


def _relaxed_milp_view(ms: MergedSubproblem, cap: float) -> ConstraintSystem:
    """Cone-free copy with diamond cuts and boxes so the MILP stays bounded."""
    cs = ms.cs
    out = ConstraintSystem(cs.minimize)
    box = 10.0 * max(ms.big_m, cap / ms.scale, 1.0)
    for key, v in cs.vars.items():
        lb = v.lb if not math.isinf(v.lb) else -box
        ub = v.ub if not math.isinf(v.ub) else box
        out.vars[key] = type(v)(key, v.kind, lb, ub)
    out.rows = dict(cs.rows)
    out.objective = cs.objective
    out.obj_const = cs.obj_const
    for ck, cone in cs.cones.items():
        for i, tk in enumerate(cone.tail):
            out.add_row(("diam+", *ck, i), {tk: 1.0, cone.head: -1.0}, LE, 0.0)
            out.add_row(("diam-", *ck, i), {tk: -1.0, cone.head: -1.0}, LE, 0.0)
    return out


def solve_subproblem(case: NetworkCase, x: CommitmentDecision, ts: TrajectorySet,
                     cfg: SubproblemConfig | None = None,
                     conic: ClarabelConicBackend | None = None,
                     milp: HighsMilpBackend | None = None) -> SubproblemResult:
    """Worst trajectory for a fixed commitment; value is the dispatch cost.

    Enumerate mode solves the dual once per scenario, in parallel when asked,
    and reduces deterministically (max value, then smallest index; index 0 is
    the no-outage member). Monolithic mode optimizes the merged model in one
    loop by alternating its cone-free mixed-integer relaxation with exact
    continuous solves at the indicator choices the relaxation proposes; both
    modes agree to solver tolerance.
    """
    cfg = cfg or SubproblemConfig()
    conic = conic or ClarabelConicBackend()
    runtime = 0.0

    if cfg.mode == "enumerate":
        statuses = [apply_trajectory(case, ts, k) for k in range(ts.n_traj + 1)]

        def solve_k(k: int):
            return conic.solve(build_dual(case, x, statuses[k]))

        if cfg.threads > 1 and ts.n_traj > 0:
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                results = list(pool.map(solve_k, range(ts.n_traj + 1)))
        else:
            results = [solve_k(k) for k in range(ts.n_traj + 1)]
        best_k, best = 0, None
        per = {}
        for k, res in enumerate(results):
            if res.status != "optimal":
                raise BackendFailure(f"scenario {k} dual solve returned {res.status}")
            per[k] = res.objective
            runtime += res.runtime
            if best is None or res.objective > best.objective:
                best, best_k = res, k
        return SubproblemResult(best.objective, best_k, DualSolution(best.values),
                                per, runtime)

    if cfg.mode != "monolithic":
        raise ValueError(f"unknown subproblem mode {cfg.mode!r}")

    ms = build_merged_subproblem(case, x, ts, cfg.big_m)
    if ms.n_traj == 0:
        res = conic.solve(ms.cs)
        if res.status != "optimal":
            raise BackendFailure(f"subproblem solve returned {res.status}")
        return SubproblemResult(res.objective, 0, DualSolution(res.values),
                                {0: res.objective}, res.runtime)

    milp = milp or HighsMilpBackend()
    cap = value_cap(case)
    relaxed = _relaxed_milp_view(ms, cap)
    visited: dict[int, tuple[float, dict]] = {}
    best_k, best_val, best_vals = 0, -math.inf, None
    for _ in range(ts.n_traj + 2):
        mres = milp.solve(relaxed)
        if mres.status not in ("optimal", "feasible"):
            raise BackendFailure(f"merged relaxation returned {mres.status}")
        runtime += mres.runtime
        k_hat = 0
        for k in range(1, ms.n_traj + 1):
            if round(mres.values[("omega", k)]):
                k_hat = k
        tol = max(1e-9, 1e-8 * abs(best_val)) if visited else 0.0
        if visited and mres.objective <= best_val + tol:
            break
        if k_hat in visited:
            break
        res = conic.solve(_fix_omega(ms.cs, k_hat, ms.n_traj))
        if res.status != "optimal":
            raise BackendFailure(f"merged restriction at choice {k_hat}: {res.status}")
        runtime += res.runtime
        visited[k_hat] = (res.objective, res.values)
        if res.objective > best_val:
            best_k, best_val, best_vals = k_hat, res.objective, res.values
        # value cut: at this choice the objective cannot beat the exact value
        coeffs = dict(ms.cs.objective)
        rhs = res.objective - ms.cs.obj_const
        if k_hat == 0:
            for k in range(1, ms.n_traj + 1):
                coeffs[("omega", k)] = coeffs.get(("omega", k), 0.0) - cap
        else:
            coeffs[("omega", k_hat)] = coeffs.get(("omega", k_hat), 0.0) + cap
            rhs += cap
        relaxed.add_row(("value_cut", k_hat), coeffs, LE, rhs)
    _check_big_m(ms, best_vals)
    per = {k: v for k, (v, _) in visited.items()}
    return SubproblemResult(best_val, best_k, DualSolution(best_vals), per, runtime)
