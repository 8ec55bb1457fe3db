"""Solver-agnostic constraint system and mechanical conic duality.

Variables and rows are identified by structured tuple keys ``(family, *idx)``
so that every row can be traced back to its constraint family for cut
bookkeeping and dual-variable naming. A row's right-hand side may carry a
linear term in a line's on/off status (``rhs + rhs_slope * a[line]``); the
same parametric form propagates into the dual objective, which is what the
worst-trajectory subproblem linearizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

Key = tuple

LE, GE, EQ = "<=", ">=", "=="


@dataclass
class VarDef:
    key: Key
    kind: str = "continuous"  # "continuous" | "binary"
    lb: float = -math.inf
    ub: float = math.inf


@dataclass
class LinRow:
    key: Key
    coeffs: dict
    sense: str
    rhs: float
    line: tuple | None = None  # line whose status scales the rhs
    rhs_slope: float = 0.0

    def rhs_at(self, status: dict | None) -> float:
        if self.line is None or self.rhs_slope == 0.0:
            return self.rhs
        if status is None:
            raise ValueError(f"row {self.key} needs a line-status vector")
        return self.rhs + self.rhs_slope * status[self.line]


@dataclass
class SocRow:
    """Second-order cone ``||tail||_2 <= head``."""

    key: Key
    head: Key
    tail: tuple
    kind: str = "soc"  # "capacity" | "soc": which cut family separates it


class ConstraintSystem:
    def __init__(self, minimize: bool = True):
        self.minimize = minimize
        self.vars: dict[Key, VarDef] = {}
        self.rows: dict[Key, LinRow] = {}
        self.cones: dict[Key, SocRow] = {}
        self.objective: dict[Key, float] = {}
        # objective += coeff * a[line] * var, resolved by substitute_line_status
        self.obj_param: dict[Key, tuple[tuple, float]] = {}
        self.obj_const: float = 0.0

    # -- construction ------------------------------------------------------

    def add_var(self, key: Key, kind: str = "continuous",
                lb: float = -math.inf, ub: float = math.inf) -> Key:
        if key in self.vars:
            raise KeyError(f"duplicate variable {key}")
        self.vars[key] = VarDef(key, kind, lb, ub)
        return key

    def add_row(self, key: Key, coeffs: dict, sense: str, rhs: float,
                line: tuple | None = None, rhs_slope: float = 0.0) -> Key:
        if key in self.rows:
            raise KeyError(f"duplicate row {key}")
        for v in coeffs:
            if v not in self.vars:
                raise KeyError(f"row {key} references unknown variable {v}")
        self.rows[key] = LinRow(key, dict(coeffs), sense, rhs, line, rhs_slope)
        return key

    def add_cone(self, key: Key, head: Key, tail: tuple, kind: str = "soc") -> Key:
        if key in self.cones:
            raise KeyError(f"duplicate cone {key}")
        for v in (head, *tail):
            if v not in self.vars:
                raise KeyError(f"cone {key} references unknown variable {v}")
        self.cones[key] = SocRow(key, head, tuple(tail), kind)
        return key

    def add_obj(self, key: Key, coeff: float) -> None:
        self.objective[key] = self.objective.get(key, 0.0) + coeff

    def add_obj_param(self, key: Key, line: tuple, coeff: float) -> None:
        if key in self.obj_param:
            raise KeyError(f"variable {key} already carries a parametric objective")
        self.obj_param[key] = (line, coeff)

    # -- queries -----------------------------------------------------------

    @property
    def n_binary(self) -> int:
        return sum(1 for v in self.vars.values() if v.kind == "binary")

    def nnz(self) -> int:
        return sum(len(r.coeffs) for r in self.rows.values())

    def is_parametric(self) -> bool:
        return bool(self.obj_param) or any(
            r.line is not None and r.rhs_slope != 0.0 for r in self.rows.values()
        )

    def objective_value(self, point: dict) -> float:
        val = self.obj_const
        for k, c in self.objective.items():
            val += c * point[k]
        if self.obj_param:
            raise ValueError("parametric objective cannot be evaluated without a status")
        return val

    def row_activity(self, row: LinRow, point: dict, status: dict | None = None) -> float:
        """lhs - rhs for <= rows after normalization (positive means violated)."""
        lhs = sum(c * point[v] for v, c in row.coeffs.items())
        rhs = row.rhs_at(status)
        if row.sense == GE:
            return rhs - lhs
        if row.sense == EQ:
            return abs(lhs - rhs)
        return lhs - rhs

    def max_violation(self, point: dict, status: dict | None = None) -> float:
        worst = 0.0
        for row in self.rows.values():
            worst = max(worst, self.row_activity(row, point, status))
        for v in self.vars.values():
            worst = max(worst, v.lb - point[v.key], point[v.key] - v.ub)
        return worst

    # -- transforms --------------------------------------------------------

    def substitute_line_status(self, status: dict) -> "ConstraintSystem":
        """Fold a concrete line-status vector into rhs and objective terms."""
        out = ConstraintSystem(self.minimize)
        out.vars = {k: replace(v) for k, v in self.vars.items()}
        for k, r in self.rows.items():
            out.rows[k] = LinRow(k, dict(r.coeffs), r.sense, r.rhs_at(status))
        out.cones = {k: replace(c) for k, c in self.cones.items()}
        out.objective = dict(self.objective)
        out.obj_const = self.obj_const
        for vk, (line, coeff) in self.obj_param.items():
            scaled = coeff * status[line]
            if scaled:
                out.add_obj(vk, scaled)
        return out

    def merged_with(self, other: "ConstraintSystem") -> None:
        """Splice another system's variables, rows, cones and objective in place."""
        for k, v in other.vars.items():
            if k in self.vars:
                raise KeyError(f"variable collision {k}")
            self.vars[k] = replace(v)
        for k, r in other.rows.items():
            if k in self.rows:
                raise KeyError(f"row collision {k}")
            self.rows[k] = LinRow(k, dict(r.coeffs), r.sense, r.rhs, r.line, r.rhs_slope)
        for k, c in other.cones.items():
            if k in self.cones:
                raise KeyError(f"cone collision {k}")
            self.cones[k] = replace(c)
        for k, c in other.objective.items():
            self.add_obj(k, c)
        for k, (line, coeff) in other.obj_param.items():
            self.add_obj_param(k, line, coeff)
        self.obj_const += other.obj_const


def dualize(primal: ConstraintSystem) -> ConstraintSystem:
    """Mechanical conic dual of a continuous minimization system.

    Every linear row spawns one dual variable (nonnegative for inequalities,
    free for equalities) named by the row key; every cone spawns a dual cone
    block named ``(*cone_key, "t")`` / ``(*cone_key, "x", i)``. Every primal
    variable spawns one dual equality row named by the variable key. Rows with
    a status-dependent rhs yield status-dependent dual objective terms, kept
    parametric so the caller can either substitute a vector or linearize the
    products against trajectory indicators.

    Requires all primal variable bounds to be written as rows (the dispatch
    builder guarantees this), so the dual rows are plain equalities.
    """
    if not primal.minimize:
        raise ValueError("dualize expects a minimization system")
    if primal.obj_param:
        raise ValueError("parametric objectives cannot be dualized")
    for v in primal.vars.values():
        if v.kind != "continuous" or not math.isinf(v.lb) or not math.isinf(v.ub):
            raise ValueError(
                f"variable {v.key} must be continuous and free; write bounds as rows"
            )

    dual = ConstraintSystem(minimize=False)
    # stationarity accumulator: primal var -> {dual var: coeff}
    station: dict[Key, dict[Key, float]] = {k: {} for k in primal.vars}

    for rk, row in primal.rows.items():
        flip = -1.0 if row.sense == GE else 1.0
        if row.sense == EQ:
            dual.add_var(rk)
        else:
            dual.add_var(rk, lb=0.0)
        dual.add_obj(rk, -flip * row.rhs)
        if row.line is not None and row.rhs_slope != 0.0:
            dual.add_obj_param(rk, row.line, -flip * row.rhs_slope)
        for vk, c in row.coeffs.items():
            station[vk][rk] = station[vk].get(rk, 0.0) + flip * c

    for ck, cone in primal.cones.items():
        head_key = (*ck, "t")
        dual.add_var(head_key)
        tail_keys = []
        for i in range(len(cone.tail)):
            tk = (*ck, "x", i)
            dual.add_var(tk)
            tail_keys.append(tk)
        dual.add_cone(("dual", *ck), head_key, tuple(tail_keys), kind=cone.kind)
        station[cone.head][head_key] = station[cone.head].get(head_key, 0.0) - 1.0
        for tk, vk in zip(tail_keys, cone.tail):
            station[vk][tk] = station[vk].get(tk, 0.0) - 1.0

    for vk in primal.vars:
        coeffs = {k: c for k, c in station[vk].items() if c != 0.0}
        dual.add_row(("stat", *vk), coeffs, EQ, -primal.objective.get(vk, 0.0))

    dual.obj_const = primal.obj_const
    return dual
