"""HTTP surface: validation, robust solves, worst-case pricing and the oracle.

Solves run synchronously in the request; the CLI drives this app in-process
by default, so the service layer is also the single place request payloads
are checked and results shaped, whether or not a network hop is involved.
"""

from __future__ import annotations

import datetime
import time

import numpy as np
from fastapi import FastAPI, HTTPException

from . import __version__
from .ccg import CcgConfig, run_ccg
from .duality import SubproblemConfig, solve_subproblem
from .errors import BackendFailure, CaseValidationError, RobustUcError, UnknownLine
from .formulation import evaluate_cost
from .network import ensure_reactive_support, validate_case
from .oicpa import OicpaConfig, solve_dispatch
from .oracle import brute_force_robust
from .scenarios import TrajectorySet, apply_trajectory
from .schemas import (
    CaseFileModel,
    OracleRequest,
    OracleResponse,
    SolutionFileModel,
    SolveOptionsModel,
    SolveRequest,
    SolveResponse,
    TrajectoryFileModel,
    ValidationResponse,
    WorstCaseRequest,
    WorstCaseResponse,
    commitment_from_model,
    commitment_to_model,
    dispatch_to_model,
    to_network_case,
)
from .traces import ccg_log_csv, oicpa_trace_csv

app = FastAPI(title="robustuc", version=__version__)


def _ccg_config(opts: SolveOptionsModel) -> CcgConfig:
    oicpa = OicpaConfig(
        epsilon=opts.epsilon, eps_tol=opts.eps_tol, eps_par=opts.eps_par,
        p_cut=opts.p_cut, max_rounds=opts.max_rounds,
        stall_policy=opts.stall_policy, soc_cut_variant=opts.soc_cut_variant,
        milp_gap=opts.milp_gap, time_limit=opts.time_limit, threads=opts.threads,
    )
    return CcgConfig(
        epsilon=opts.epsilon, max_iter=opts.max_iter, master=opts.master,
        sub_mode=opts.sub_mode, big_m=opts.big_m,
        master_epsilon=opts.master_epsilon, threads=opts.threads,
        seed=opts.seed, oicpa=oicpa,
    )


def _prepare(case_model: CaseFileModel, traj_model: TrajectoryFileModel,
             opts: SolveOptionsModel):
    case = to_network_case(case_model)
    report = validate_case(case)
    if report.errors:
        raise HTTPException(status_code=400, detail={"errors": report.errors,
                                                     "warnings": report.warnings})
    q_bar = (opts.reactive_support_q_mvar / case.base_mva
             if opts.reactive_support_q_mvar is not None else None)
    case = ensure_reactive_support(case, q_bar=q_bar)
    try:
        ts = TrajectorySet.from_lists(case, [list(t) for t in traj_model.trajectories])
    except UnknownLine as exc:
        raise HTTPException(status_code=400, detail={"errors": [str(exc)]})
    return case, ts


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/validate", response_model=ValidationResponse)
def validate(case_model: CaseFileModel):
    case = to_network_case(case_model)
    report = validate_case(case)
    return ValidationResponse(errors=report.errors, warnings=report.warnings)


@app.post("/solve", response_model=SolveResponse)
def solve(req: SolveRequest):
    if req.options.seed is not None:
        np.random.seed(req.options.seed)
    case, ts = _prepare(req.case, req.trajectories, req.options)
    t0 = time.perf_counter()
    try:
        sched = run_ccg(case, ts, _ccg_config(req.options))
    except RobustUcError as exc:
        raise HTTPException(status_code=500,
                            detail={"errors": [f"solver failure: {exc}"]})
    wall = time.perf_counter() - t0
    solution = SolutionFileModel(
        case_name=case.name,
        status=sched.status,
        lb=sched.lb, ub=sched.ub, priced_ub=sched.priced_ub,
        gap=sched.gap, worst_k=sched.worst_k,
        commitment=commitment_to_model(sched.x),
        scenario_costs={
            str(k): {"commitment_plus_served": c[0], "unserved": c[1]}
            for k, c in sched.scenario_costs.items()
        },
        dispatch={str(k): dispatch_to_model(case, d)
                  for k, d in sched.dispatches.items()},
        ccg_log_csv=ccg_log_csv(sched.log),
        oicpa_trace_csvs=[oicpa_trace_csv(tr) for tr in sched.oicpa_traces],
        options=req.options,
        wall_clock_seconds=wall,
        created_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )
    return SolveResponse(status=sched.status, solution=solution)


@app.post("/worst-case", response_model=WorstCaseResponse)
def worst_case(req: WorstCaseRequest):
    case, ts = _prepare(req.case, req.trajectories, req.options)
    try:
        x = commitment_from_model(case, req.commitment)
    except KeyError as exc:
        raise HTTPException(status_code=400,
                            detail={"errors": [f"commitment misses unit {exc}"]})
    bad = x.check_logic(case)
    if bad:
        raise HTTPException(status_code=400, detail={"errors": bad})
    try:
        sub_cfg = SubproblemConfig(mode=req.options.sub_mode,
                                   big_m=req.options.big_m,
                                   threads=req.options.threads)
        sub = solve_subproblem(case, x, ts, sub_cfg)
        _, disp = solve_dispatch(case, x, apply_trajectory(case, ts, sub.worst_k),
                                 conic=_default_conic())
    except RobustUcError as exc:
        raise HTTPException(status_code=500,
                            detail={"errors": [f"solver failure: {exc}"]})
    served, unserved = evaluate_cost(case, x, disp)
    return WorstCaseResponse(worst_k=sub.worst_k,
                             value=x.commitment_cost(case) + sub.value,
                             commitment_plus_served=served, unserved=unserved)


def _default_conic():
    from .backends import ClarabelConicBackend

    return ClarabelConicBackend()


@app.post("/oracle", response_model=OracleResponse)
def oracle(req: OracleRequest):
    case, ts = _prepare(req.case, req.trajectories, req.options)
    try:
        result = brute_force_robust(case, ts, limit=req.limit)
    except RobustUcError as exc:
        raise HTTPException(status_code=400, detail={"errors": [str(exc)]})
    ccg_obj, verdict = None, None
    if req.check_ccg:
        try:
            sched = run_ccg(case, ts, _ccg_config(req.options))
        except RobustUcError as exc:
            raise HTTPException(status_code=500,
                                detail={"errors": [f"solver failure: {exc}"]})
        ccg_obj = sched.ub
        tol = 2 * req.options.epsilon * max(1.0, abs(result.optimum))
        verdict = "AGREE" if abs(sched.ub - result.optimum) <= tol else "DISAGREE"
    return OracleResponse(optimum=result.optimum,
                          commitment=commitment_to_model(result.commitment),
                          enumeration_count=result.enumeration_count,
                          ccg_objective=ccg_obj, verdict=verdict)
