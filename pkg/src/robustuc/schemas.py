"""File formats and API payload models.

Cases travel in megawatt units with an explicit MVA base and are converted
to the per-unit internal form on load; solutions carry enough dispatch data
to reproduce their own cost breakdown exactly.
"""

from __future__ import annotations

from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .formulation import CommitmentDecision, ScenarioDispatch
from .network import Generator, NetworkCase, ReserveArea

BusId = Union[int, str]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BusModel(_Strict):
    id: BusId
    v_min: float
    v_max: float
    demand_p_mw: list[float]
    demand_q_mvar: list[float]


class LineModel(_Strict):
    n: BusId
    m: BusId
    capacity_mva: float
    conductance: float
    susceptance: float
    shunt: float = 0.0


class GeneratorModel(_Strict):
    id: str
    bus: BusId
    kind: Literal["thermal", "renewable"] = "thermal"
    fixed_cost: float = 0.0
    startup_cost: float = 0.0
    shutdown_cost: float = 0.0
    variable_cost: float = 0.0
    p_min_mw: float = 0.0
    p_max_mw: float = 0.0
    q_min_mvar: float = 0.0
    q_max_mvar: float = 0.0
    ramp_up_mw: Optional[float] = None        # None: limited only by capacity
    ramp_startup_mw: Optional[float] = None
    ramp_down_mw: Optional[float] = None
    ramp_shutdown_mw: Optional[float] = None
    min_up: int = 1
    min_down: int = 1
    up_residual: int = 0
    down_residual: int = 0
    u0: int = 0
    p0_mw: float = 0.0
    fixed_on: bool = False


class ReserveAreaModel(_Strict):
    id: str
    units: list[str]
    requirement_mw: list[float]


class CaseFileModel(_Strict):
    version: Literal[1] = 1
    name: str = "case"
    base_mva: float
    periods: int
    buses: list[BusModel]
    lines: list[LineModel]
    generators: list[GeneratorModel]
    reserve_areas: list[ReserveAreaModel] = Field(default_factory=list)
    unserved_cost_per_mwh: float


class TrajectoryFileModel(_Strict):
    version: Literal[1] = 1
    trajectories: list[list[tuple[BusId, BusId]]]


def strip_unknown_keys(model_cls, data, path="", warnings=None):
    """Drop keys a model does not declare, recording a warning per drop."""
    warnings = warnings if warnings is not None else []
    if not isinstance(data, dict):
        return data, warnings
    fields = model_cls.model_fields
    cleaned = {}
    for key, value in data.items():
        if key not in fields:
            warnings.append(f"ignored unknown key {path}{key}")
            continue
        ann = fields[key].annotation
        sub_model = None
        for candidate in getattr(ann, "__args__", (ann,)):
            if isinstance(candidate, type) and issubclass(candidate, BaseModel):
                sub_model = candidate
        if sub_model is not None and isinstance(value, list):
            value = [strip_unknown_keys(sub_model, v, f"{path}{key}[{i}].", warnings)[0]
                     for i, v in enumerate(value)]
        elif sub_model is not None and isinstance(value, dict):
            value, _ = strip_unknown_keys(sub_model, value, f"{path}{key}.", warnings)
        cleaned[key] = value
    return cleaned, warnings


def load_case_file(data: dict, strict: bool = True) -> tuple[CaseFileModel, list[str]]:
    warnings: list[str] = []
    if not strict:
        data, warnings = strip_unknown_keys(CaseFileModel, data)
    return CaseFileModel.model_validate(data), warnings


def to_network_case(model: CaseFileModel) -> NetworkCase:
    base = model.base_mva
    gens = []
    for g in model.generators:
        p_max = g.p_max_mw / base
        gens.append(Generator(
            id=g.id, bus=g.bus, kind=g.kind,
            fixed_cost=g.fixed_cost, startup_cost=g.startup_cost,
            shutdown_cost=g.shutdown_cost, variable_cost=g.variable_cost,
            p_min=g.p_min_mw / base, p_max=p_max,
            q_min=g.q_min_mvar / base, q_max=g.q_max_mvar / base,
            ramp_up=(g.ramp_up_mw / base if g.ramp_up_mw is not None else p_max),
            ramp_startup=(g.ramp_startup_mw / base if g.ramp_startup_mw is not None else p_max),
            ramp_down=(g.ramp_down_mw / base if g.ramp_down_mw is not None else p_max),
            ramp_shutdown=(g.ramp_shutdown_mw / base if g.ramp_shutdown_mw is not None else p_max),
            min_up=g.min_up, min_down=g.min_down,
            up_residual=g.up_residual, down_residual=g.down_residual,
            u0=g.u0, p0=g.p0_mw / base, fixed_on=g.fixed_on,
        ))
    lines = tuple((ln.n, ln.m) for ln in model.lines)
    return NetworkCase(
        base_mva=base, periods=model.periods,
        buses=tuple(b.id for b in model.buses),
        lines=lines,
        generators=tuple(gens),
        demand_p={b.id: tuple(v / base for v in b.demand_p_mw) for b in model.buses},
        demand_q={b.id: tuple(v / base for v in b.demand_q_mvar) for b in model.buses},
        unserved_cost=model.unserved_cost_per_mwh,
        line_capacity={(ln.n, ln.m): ln.capacity_mva / base for ln in model.lines},
        line_conductance={(ln.n, ln.m): ln.conductance for ln in model.lines},
        line_susceptance={(ln.n, ln.m): ln.susceptance for ln in model.lines},
        line_shunt={(ln.n, ln.m): ln.shunt for ln in model.lines},
        v_min={b.id: b.v_min for b in model.buses},
        v_max={b.id: b.v_max for b in model.buses},
        reserve_areas=tuple(
            ReserveArea(a.id, tuple(a.units), tuple(v / base for v in a.requirement_mw))
            for a in model.reserve_areas
        ),
        name=model.name,
    )


def from_network_case(case: NetworkCase) -> CaseFileModel:
    base = case.base_mva
    return CaseFileModel(
        name=case.name, base_mva=base, periods=case.periods,
        buses=[BusModel(id=n, v_min=case.v_min[n], v_max=case.v_max[n],
                        demand_p_mw=[v * base for v in case.demand_p[n]],
                        demand_q_mvar=[v * base for v in case.demand_q[n]])
               for n in case.buses],
        lines=[LineModel(n=n, m=m, capacity_mva=case.line_capacity[(n, m)] * base,
                         conductance=case.line_conductance[(n, m)],
                         susceptance=case.line_susceptance[(n, m)],
                         shunt=case.line_shunt[(n, m)])
               for (n, m) in case.lines],
        generators=[GeneratorModel(
            id=g.id, bus=g.bus, kind=g.kind, fixed_cost=g.fixed_cost,
            startup_cost=g.startup_cost, shutdown_cost=g.shutdown_cost,
            variable_cost=g.variable_cost,
            p_min_mw=g.p_min * base, p_max_mw=g.p_max * base,
            q_min_mvar=g.q_min * base, q_max_mvar=g.q_max * base,
            ramp_up_mw=g.ramp_up * base, ramp_startup_mw=g.ramp_startup * base,
            ramp_down_mw=g.ramp_down * base, ramp_shutdown_mw=g.ramp_shutdown * base,
            min_up=g.min_up, min_down=g.min_down,
            up_residual=g.up_residual, down_residual=g.down_residual,
            u0=g.u0, p0_mw=g.p0 * base, fixed_on=g.fixed_on,
        ) for g in case.generators if not g.synthetic],
        reserve_areas=[ReserveAreaModel(
            id=a.id, units=list(a.units),
            requirement_mw=[v * base for v in a.requirement]) for a in case.reserve_areas],
        unserved_cost_per_mwh=case.unserved_cost,
    )


class SolveOptionsModel(_Strict):
    epsilon: float = 1e-4
    eps_tol: float = 1e-5
    eps_par: float = 0.5e-5
    p_cut: float = 0.55
    max_iter: int = 25
    max_rounds: int = 200
    big_m: Optional[float] = None
    sub_mode: Literal["enumerate", "monolithic"] = "enumerate"
    master: Literal["oicpa", "direct"] = "oicpa"
    threads: int = 1
    seed: Optional[int] = None
    milp_gap: float = 1e-6
    time_limit: Optional[float] = None
    soc_cut_variant: Literal["adaptive", "paper", "tight"] = "adaptive"
    stall_policy: Literal["strict", "separate-all"] = "strict"
    master_epsilon: Optional[float] = None
    reactive_support_q_mvar: Optional[float] = None


class CommitmentModel(_Strict):
    u: dict[str, list[int]]
    y: dict[str, list[int]]
    z: dict[str, list[int]]


class DispatchSummaryModel(_Strict):
    p_mw: dict[str, list[float]]
    q_mvar: dict[str, list[float]]
    p_unserved_mw: dict[str, list[float]]
    q_unserved_mvar: dict[str, list[float]]


class CostPairModel(_Strict):
    commitment_plus_served: float
    unserved: float


class SolutionFileModel(_Strict):
    version: Literal[1] = 1
    tool_version: str = __version__
    case_name: str
    status: str
    lb: float
    ub: float
    priced_ub: float
    gap: float
    worst_k: int
    commitment: CommitmentModel
    scenario_costs: dict[str, CostPairModel]
    dispatch: dict[str, DispatchSummaryModel]
    ccg_log_csv: str
    oicpa_trace_csvs: list[str]
    options: SolveOptionsModel
    wall_clock_seconds: float
    created_at: str


def commitment_to_model(x: CommitmentDecision) -> CommitmentModel:
    return CommitmentModel(u={g: list(v) for g, v in x.u.items()},
                           y={g: list(v) for g, v in x.y.items()},
                           z={g: list(v) for g, v in x.z.items()})


def commitment_from_model(case: NetworkCase, model: CommitmentModel) -> CommitmentDecision:
    return CommitmentDecision(
        u={g.id: tuple(model.u[g.id]) for g in case.generators},
        y={g.id: tuple(model.y[g.id]) for g in case.generators},
        z={g.id: tuple(model.z[g.id]) for g in case.generators},
    )


def dispatch_to_model(case: NetworkCase, d: ScenarioDispatch) -> DispatchSummaryModel:
    base = case.base_mva
    T = case.periods
    return DispatchSummaryModel(
        p_mw={g.id: [d.p(g.id, t) * base for t in range(1, T + 1)]
              for g in case.generators},
        q_mvar={g.id: [d.q(g.id, t) * base for t in range(1, T + 1)]
                for g in case.generators},
        p_unserved_mw={str(n): [d.p_unserved(n, t) * base for t in range(1, T + 1)]
                       for n in case.buses},
        q_unserved_mvar={str(n): [d.q_unserved(n, t) * base for t in range(1, T + 1)]
                         for n in case.buses},
    )


def dispatch_from_model(case: NetworkCase, model: DispatchSummaryModel) -> ScenarioDispatch:
    base = case.base_mva
    values = {}
    for g in case.generators:
        for t in range(1, case.periods + 1):
            values[("p", g.id, t)] = model.p_mw[g.id][t - 1] / base
            values[("q", g.id, t)] = model.q_mvar[g.id][t - 1] / base
    for n in case.buses:
        for t in range(1, case.periods + 1):
            values[("pu", n, t)] = model.p_unserved_mw[str(n)][t - 1] / base
            values[("qu", n, t)] = model.q_unserved_mvar[str(n)][t - 1] / base
    return ScenarioDispatch(case, values)


class SolveRequest(_Strict):
    case: CaseFileModel
    trajectories: TrajectoryFileModel
    options: SolveOptionsModel = Field(default_factory=SolveOptionsModel)
    strict_schema: bool = True


class SolveResponse(_Strict):
    status: str
    solution: SolutionFileModel


class ValidationResponse(_Strict):
    errors: list[str]
    warnings: list[str]


class WorstCaseRequest(_Strict):
    case: CaseFileModel
    trajectories: TrajectoryFileModel
    commitment: CommitmentModel
    options: SolveOptionsModel = Field(default_factory=SolveOptionsModel)


class WorstCaseResponse(_Strict):
    worst_k: int
    value: float
    commitment_plus_served: float
    unserved: float


class OracleRequest(_Strict):
    case: CaseFileModel
    trajectories: TrajectoryFileModel
    limit: int = 2 ** 16
    check_ccg: bool = False
    options: SolveOptionsModel = Field(default_factory=SolveOptionsModel)


class OracleResponse(_Strict):
    optimum: float
    commitment: CommitmentModel
    enumeration_count: int
    ccg_objective: Optional[float] = None
    verdict: Optional[str] = None  # "AGREE" | "DISAGREE"
