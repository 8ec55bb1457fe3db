"""Thin contracts over the two solver capabilities the algorithms need.

The mixed-integer path only ever sees linear rows (cones are handled by the
cutting-plane layer), so a plain MILP solver suffices; the continuous path
needs second-order cones with duals. Both wrappers are deterministic for a
fixed model, which the reproducibility checks rely on.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import clarabel
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

from .constraints import EQ, GE, LE, ConstraintSystem, Key
from .errors import BackendFailure, NumericalTrouble

BINARY_TOL = 1e-6


@dataclass
class SolverOptions:
    milp_gap: float = 1e-6
    time_limit: float | None = None
    threads: int = 1
    conic_tol: float = 1e-9


@dataclass
class MilpResult:
    status: str  # "optimal" | "feasible" | "infeasible" | "limit"
    objective: float
    bound: float
    values: dict[Key, float] = field(default_factory=dict)
    runtime: float = 0.0
    gap: float = 0.0

    def value(self, key: Key) -> float:
        return self.values[key]


@dataclass
class ConicResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: float
    values: dict[Key, float] = field(default_factory=dict)
    row_duals: dict[Key, float] = field(default_factory=dict)
    cone_duals: dict[Key, tuple] = field(default_factory=dict)
    runtime: float = 0.0

    def value(self, key: Key) -> float:
        return self.values[key]


def _order(cs: ConstraintSystem) -> list[Key]:
    return list(cs.vars)


class HighsMilpBackend:
    """Binary + linear rows via HiGHS (scipy.optimize.milp).

    A warm-start assignment is accepted for interface compatibility but the
    scipy entry point cannot consume it; solves are exact to the gap target
    regardless, so incumbent monotonicity still holds.
    """

    def __init__(self, options: SolverOptions | None = None):
        self.options = options or SolverOptions()

    def solve(self, cs: ConstraintSystem, warm_start: dict | None = None,
              gap: float | None = None, time_limit: float | None = None) -> MilpResult:
        if cs.cones:
            raise BackendFailure("MILP backend cannot handle cone rows")
        if cs.is_parametric():
            raise BackendFailure("resolve line status before solving")
        keys = _order(cs)
        idx = {k: i for i, k in enumerate(keys)}
        n = len(keys)
        sign = 1.0 if cs.minimize else -1.0
        c = np.zeros(n)
        for k, coeff in cs.objective.items():
            c[idx[k]] = sign * coeff
        integrality = np.array(
            [1 if cs.vars[k].kind == "binary" else 0 for k in keys]
        )
        lb = np.array([max(cs.vars[k].lb, 0.0) if cs.vars[k].kind == "binary"
                       else cs.vars[k].lb for k in keys])
        ub = np.array([min(cs.vars[k].ub, 1.0) if cs.vars[k].kind == "binary"
                       else cs.vars[k].ub for k in keys])

        constraints = []
        if cs.rows:
            data, rows_i, cols_i, lo, hi = [], [], [], [], []
            for r, row in enumerate(cs.rows.values()):
                for vk, coeff in row.coeffs.items():
                    data.append(coeff)
                    rows_i.append(r)
                    cols_i.append(idx[vk])
                if row.sense == LE:
                    lo.append(-np.inf)
                    hi.append(row.rhs)
                elif row.sense == GE:
                    lo.append(row.rhs)
                    hi.append(np.inf)
                else:
                    lo.append(row.rhs)
                    hi.append(row.rhs)
            mat = sparse.csc_matrix(
                (data, (rows_i, cols_i)), shape=(len(cs.rows), n)
            )
            constraints = [LinearConstraint(mat, np.array(lo), np.array(hi))]

        opts = {"mip_rel_gap": gap if gap is not None else self.options.milp_gap}
        limit = time_limit if time_limit is not None else self.options.time_limit
        if limit is not None:
            opts["time_limit"] = limit
        t0 = time.perf_counter()
        res = milp(c=c, integrality=integrality, bounds=Bounds(lb, ub),
                   constraints=constraints, options=opts)
        runtime = time.perf_counter() - t0

        if res.status == 2:
            return MilpResult("infeasible", math.inf, math.inf, runtime=runtime)
        if res.status == 3:
            raise BackendFailure("MILP reported unbounded; model is missing bounds")
        if res.x is None:
            status = "limit" if res.status == 1 else "infeasible"
            if res.status not in (1, 2):
                raise BackendFailure(f"MILP failed: {res.message}")
            bound = (sign * res.mip_dual_bound + cs.obj_const
                     if res.mip_dual_bound is not None else -math.inf)
            return MilpResult(status, math.inf, bound, runtime=runtime)

        x = np.asarray(res.x, dtype=float)
        for i in np.nonzero(integrality)[0]:
            if abs(x[i] - round(x[i])) > BINARY_TOL:
                raise NumericalTrouble(
                    f"binary variable {keys[i]} returned fractional value {x[i]}"
                )
            x[i] = round(x[i])
        values = {k: float(x[idx[k]]) for k in keys}
        obj = sign * float(res.fun) + cs.obj_const
        bound = sign * float(res.mip_dual_bound) + cs.obj_const
        status = "optimal" if res.status == 0 else "feasible"
        return MilpResult(status, obj, bound, values, runtime,
                          gap=float(res.mip_gap or 0.0))


class ClarabelConicBackend:
    """Continuous linear + second-order-cone rows with primal/dual values."""

    def __init__(self, options: SolverOptions | None = None):
        self.options = options or SolverOptions()

    def solve(self, cs: ConstraintSystem) -> ConicResult:
        if cs.n_binary:
            raise BackendFailure("conic backend cannot handle binary variables")
        if cs.is_parametric():
            raise BackendFailure("resolve line status before solving")
        keys = _order(cs)
        idx = {k: i for i, k in enumerate(keys)}
        n = len(keys)
        sign = 1.0 if cs.minimize else -1.0
        q = np.zeros(n)
        for k, coeff in cs.objective.items():
            q[idx[k]] = sign * coeff
        # normalize the cost scale: dollar-sized objectives next to per-unit
        # constraint data otherwise cost several digits of accuracy
        obj_scale = max(1.0, float(np.max(np.abs(q))) if len(q) else 1.0)
        q = q / obj_scale

        data, rows_i, cols_i, b = [], [], [], []
        eq_keys, ineq_keys = [], []

        def emit(coeffs: dict, rhs: float):
            r = len(b)
            for vk, coeff in coeffs.items():
                data.append(coeff)
                rows_i.append(r)
                cols_i.append(idx[vk])
            b.append(rhs)

        for row in cs.rows.values():
            if row.sense == EQ:
                emit(row.coeffs, row.rhs)
                eq_keys.append(row.key)
        n_eq = len(b)
        for row in cs.rows.values():
            if row.sense == EQ:
                continue
            flip = -1.0 if row.sense == GE else 1.0
            emit({k: flip * c for k, c in row.coeffs.items()}, flip * row.rhs)
            ineq_keys.append(row.key)
        for k in keys:
            v = cs.vars[k]
            if not math.isinf(v.lb):
                emit({k: -1.0}, -v.lb)
                ineq_keys.append(("_lb", *k))
            if not math.isinf(v.ub):
                emit({k: 1.0}, v.ub)
                ineq_keys.append(("_ub", *k))
        n_ineq = len(b) - n_eq

        cones = []
        if n_eq:
            cones.append(clarabel.ZeroConeT(n_eq))
        if n_ineq:
            cones.append(clarabel.NonnegativeConeT(n_ineq))
        cone_spans = []
        for ck, cone in cs.cones.items():
            start = len(b)
            emit({cone.head: -1.0}, 0.0)
            for tk in cone.tail:
                emit({tk: -1.0}, 0.0)
            cones.append(clarabel.SecondOrderConeT(1 + len(cone.tail)))
            cone_spans.append((ck, start, 1 + len(cone.tail)))

        A = sparse.csc_matrix((data, (rows_i, cols_i)), shape=(len(b), n))
        P = sparse.csc_matrix((n, n))
        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.tol_gap_abs = self.options.conic_tol
        settings.tol_gap_rel = self.options.conic_tol
        settings.tol_feas = self.options.conic_tol
        t0 = time.perf_counter()
        solver = clarabel.DefaultSolver(P, q, A, np.array(b), cones, settings)
        sol = solver.solve()
        runtime = time.perf_counter() - t0

        status = str(sol.status)
        if status in ("Solved", "AlmostSolved"):
            x = np.asarray(sol.x)
            z = np.asarray(sol.z) * obj_scale
            values = {k: float(x[idx[k]]) for k in keys}
            row_duals = {}
            for r, rk in enumerate(eq_keys):
                row_duals[rk] = sign * float(z[r])
            for r, rk in enumerate(ineq_keys):
                if not isinstance(rk, tuple) or rk[0] not in ("_lb", "_ub"):
                    row_duals[rk] = float(z[n_eq + r])
            cone_duals = {
                ck: tuple(float(z[start + i]) for i in range(span))
                for ck, start, span in cone_spans
            }
            obj = sign * float(sol.obj_val) * obj_scale + cs.obj_const
            return ConicResult("optimal", obj, values, row_duals, cone_duals, runtime)
        if status == "PrimalInfeasible":
            return ConicResult("infeasible", math.inf if cs.minimize else -math.inf,
                               runtime=runtime)
        if status == "DualInfeasible":
            return ConicResult("unbounded", -math.inf if cs.minimize else math.inf,
                               runtime=runtime)
        if status in ("MaxIterations", "MaxTime", "InsufficientProgress"):
            raise NumericalTrouble(f"conic solve stopped with status {status}")
        raise BackendFailure(f"conic solve failed with status {status}")
