"""Immutable grid description and structural queries.

All electrical quantities are stored in per-unit on ``base_mva``; costs are
in dollars, with per-MWh rates applied to per-unit power times the base.
Instances are treated as read-only after validation and may be shared freely
across concurrent scenario solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Union

from .errors import CaseValidationError

BusId = Union[int, str]
Line = tuple  # (n, m) with the orientation given by the case


@dataclass(frozen=True)
class Generator:
    id: str
    bus: BusId
    kind: str = "thermal"  # "thermal" | "renewable"
    fixed_cost: float = 0.0
    startup_cost: float = 0.0
    shutdown_cost: float = 0.0
    variable_cost: float = 0.0
    p_min: float = 0.0
    p_max: float = 0.0
    q_min: float = 0.0
    q_max: float = 0.0
    ramp_up: float = 1e3
    ramp_startup: float = 1e3
    ramp_down: float = 1e3
    ramp_shutdown: float = 1e3
    min_up: int = 1
    min_down: int = 1
    up_residual: int = 0    # periods the unit must still stay on
    down_residual: int = 0  # periods the unit must still stay off
    u0: int = 0
    y0: int = 0
    z0: int = 0
    p0: float = 0.0
    fixed_on: bool = False   # commitment pinned to 1 in every period
    synthetic: bool = False  # reactive-support unit added by preprocessing

    @property
    def is_thermal(self) -> bool:
        return self.kind == "thermal"


@dataclass(frozen=True)
class ReserveArea:
    id: str
    units: tuple[str, ...]
    requirement: tuple[float, ...]  # per period, per-unit power


@dataclass(frozen=True)
class NetworkCase:
    base_mva: float
    periods: int
    buses: tuple[BusId, ...]
    lines: tuple[Line, ...]
    generators: tuple[Generator, ...]
    demand_p: dict[BusId, tuple[float, ...]]
    demand_q: dict[BusId, tuple[float, ...]]
    unserved_cost: float
    line_capacity: dict[Line, float]
    line_conductance: dict[Line, float]
    line_susceptance: dict[Line, float]
    line_shunt: dict[Line, float]
    v_min: dict[BusId, float]
    v_max: dict[BusId, float]
    reserve_areas: tuple[ReserveArea, ...] = ()
    name: str = "case"

    def generator(self, gen_id: str) -> Generator:
        for g in self.generators:
            if g.id == gen_id:
                return g
        raise KeyError(gen_id)

    def v_pair(self, n: BusId, m: BusId) -> float:
        """Product of the voltage caps at a line's two ends."""
        return self.v_max[n] * self.v_max[m]

    def total_demand(self) -> float:
        """Sum of active plus reactive demand over all buses and periods (p.u.)."""
        total = 0.0
        for n in self.buses:
            total += sum(self.demand_p[n]) + sum(self.demand_q[n])
        return total

    def thermal_units(self) -> list[Generator]:
        return [g for g in self.generators if g.is_thermal]

    def schedulable_units(self) -> list[Generator]:
        """Units that carry commitment costs and may serve reserve."""
        return [g for g in self.generators if not g.synthetic]


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def is_valid(self) -> bool:
        return not self.errors

    def error(self, msg: str) -> None:
        self.errors.append(msg)

    def warn(self, msg: str) -> None:
        self.warnings.append(msg)


def validate_case(case: NetworkCase) -> ValidationReport:
    """Check every structural invariant; errors block all downstream operations."""
    rep = ValidationReport()
    if case.periods < 1:
        rep.error(f"horizon must cover at least one period, got {case.periods}")
    if case.base_mva <= 0:
        rep.error(f"base_mva must be positive, got {case.base_mva}")
    bus_set = set(case.buses)
    if len(bus_set) != len(case.buses):
        rep.error("duplicate bus ids")

    seen = set()
    for n, m in case.lines:
        if n == m:
            rep.error(f"line ({n},{m}) is a self-loop")
        if n not in bus_set or m not in bus_set:
            rep.error(f"line ({n},{m}) references an undeclared bus")
        key = frozenset((n, m))
        if key in seen:
            rep.error(f"line ({n},{m}) declared twice")
        seen.add(key)
        if case.line_capacity.get((n, m), 0.0) <= 0:
            rep.error(f"line ({n},{m}) capacity must be positive")

    for n in case.buses:
        vmin, vmax = case.v_min.get(n), case.v_max.get(n)
        if vmin is None or vmax is None:
            rep.error(f"bus {n} missing voltage bounds")
            continue
        if vmin <= 0 or vmax <= 0:
            rep.error(f"bus {n} voltage bounds must be positive")
        if vmin > vmax:
            rep.error(f"bus {n} voltage bounds inverted (min {vmin} > max {vmax})")
        for dem, label in ((case.demand_p, "active"), (case.demand_q, "reactive")):
            series = dem.get(n)
            if series is None or len(series) != case.periods:
                rep.error(f"bus {n} {label} demand must list {case.periods} periods")
            elif not all(abs(v) < 1e12 for v in series):
                rep.error(f"bus {n} {label} demand is not finite")

    gen_ids = set()
    for g in case.generators:
        if g.id in gen_ids:
            rep.error(f"duplicate generator id {g.id}")
        gen_ids.add(g.id)
        if g.bus not in bus_set:
            rep.error(f"generator {g.id} sits at undeclared bus {g.bus}")
        if g.kind not in ("thermal", "renewable"):
            rep.error(f"generator {g.id} has unknown kind {g.kind!r}")
        if g.p_min > g.p_max:
            rep.error(f"generator {g.id}: p_min > p_max")
        if g.p_min < 0:
            rep.warn(f"generator {g.id}: negative p_min")
        if g.q_min > g.q_max:
            rep.error(f"generator {g.id}: q_min > q_max")
        if min(g.ramp_up, g.ramp_startup, g.ramp_down, g.ramp_shutdown) < 0:
            rep.error(f"generator {g.id}: ramp limits must be nonnegative")
        if g.up_residual * g.down_residual != 0:
            rep.error(
                f"generator {g.id}: residual up time {g.up_residual} and down time "
                f"{g.down_residual} are both positive"
            )
        if g.is_thermal and (g.min_up < 1 or g.min_down < 1):
            rep.error(f"generator {g.id}: thermal min up/down times must be >= 1")
        if min(g.fixed_cost, g.startup_cost, g.shutdown_cost, g.variable_cost) < 0:
            rep.error(f"generator {g.id}: costs must be nonnegative")
        if g.u0 not in (0, 1) or g.y0 not in (0, 1) or g.z0 not in (0, 1):
            rep.error(f"generator {g.id}: initial statuses must be 0/1")
        if g.up_residual > case.periods or g.down_residual > case.periods:
            rep.warn(
                f"generator {g.id}: residual time exceeds horizon and is clamped to T"
            )

    if case.unserved_cost < 0:
        rep.error("unserved energy cost must be nonnegative")
    max_var = max((g.variable_cost for g in case.generators), default=0.0)
    if case.generators and case.unserved_cost <= max_var:
        rep.warn(
            "unserved energy cost does not exceed the largest variable cost; "
            "shedding is never penalized relative to generation"
        )

    area_units: set[str] = set()
    for area in case.reserve_areas:
        for uid in area.units:
            if uid not in gen_ids:
                rep.error(f"reserve area {area.id} references unknown unit {uid}")
            elif uid in area_units:
                rep.error(f"unit {uid} appears in more than one reserve area")
            area_units.add(uid)
        if len(area.requirement) != case.periods:
            rep.error(f"reserve area {area.id} requirement must list {case.periods} periods")
        elif any(r < 0 for r in area.requirement):
            rep.error(f"reserve area {area.id} requirement must be nonnegative")

    return rep


def require_valid(case: NetworkCase) -> None:
    rep = validate_case(case)
    if not rep.is_valid:
        raise CaseValidationError(rep.errors)


def clamp_residuals(case: NetworkCase) -> NetworkCase:
    """Clamp residual forced up/down times to the horizon length."""
    gens = tuple(
        replace(
            g,
            up_residual=min(g.up_residual, case.periods),
            down_residual=min(g.down_residual, case.periods),
        )
        for g in case.generators
    )
    return replace(case, generators=gens)


def ensure_reactive_support(case: NetworkCase, q_bar: float | None = None) -> NetworkCase:
    """Give every generator-free bus a synthetic always-on reactive unit.

    The synthetic unit produces no active power, carries no cost, and can
    absorb or supply reactive power up to ``q_bar`` (default: twice the bus's
    peak reactive demand magnitude). Idempotent: buses that already host any
    unit, synthetic or not, are left alone.
    """
    require_valid(case)
    occupied = {g.bus for g in case.generators}
    new_units = []
    for n in case.buses:
        if n in occupied:
            continue
        cap = q_bar if q_bar is not None else 2.0 * max(
            (abs(v) for v in case.demand_q[n]), default=0.0
        )
        new_units.append(
            Generator(
                id=f"qsup_{n}",
                bus=n,
                kind="renewable",
                q_min=-cap,
                q_max=cap,
                u0=1,
                fixed_on=True,
                synthetic=True,
            )
        )
    if not new_units:
        return case
    return replace(case, generators=case.generators + tuple(new_units))


def adjacency(case: NetworkCase) -> tuple[dict[BusId, list[BusId]], dict[BusId, list[str]]]:
    """Neighbor buses and resident units per bus, in declaration order."""
    neighbors: dict[BusId, list[BusId]] = {n: [] for n in case.buses}
    units: dict[BusId, list[str]] = {n: [] for n in case.buses}
    for n, m in case.lines:
        neighbors[n].append(m)
        neighbors[m].append(n)
    for g in case.generators:
        units[g.bus].append(g.id)
    return neighbors, units
