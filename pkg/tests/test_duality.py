import math

import numpy as np
import pytest

from robustuc.backends import HighsMilpBackend
from robustuc.cases import random_case, random_commitment, random_line_status
from robustuc.constraints import LE, ConstraintSystem
from robustuc.duality import (
    SubproblemConfig,
    _fix_omega,
    build_dual,
    build_merged_subproblem,
    build_parametric_dual,
    solve_subproblem,
)
from robustuc.errors import BigMTooSmall
from robustuc.formulation import CommitmentDecision, build_dispatch_block
from robustuc.scenarios import TrajectorySet, apply_trajectory


def all_on(case):
    return {line: 1 for line in case.lines}


def test_strong_duality_on_random_instance(conic):
    rng = np.random.default_rng(42)
    case = random_case(rng, n_buses=2, periods=2)
    x = random_commitment(rng, case)
    status = random_line_status(rng, case)
    primal = conic.solve(build_dispatch_block(case, status=status, x=x)[0])
    dual = conic.solve(build_dual(case, x, status))
    assert primal.status == dual.status == "optimal"
    rel = abs(primal.objective - dual.objective) / max(1.0, abs(primal.objective))
    assert rel <= 1e-6


def test_all_off_commitment_prices_full_shedding(conic, two_bus):
    case, _ = two_bus
    x = CommitmentDecision.from_on_off(case, {"g1": [0, 0], "g2": [0, 0]})
    expected = case.unserved_cost * case.base_mva * case.total_demand()
    primal = conic.solve(build_dispatch_block(case, status=all_on(case), x=x)[0])
    dual = conic.solve(build_dual(case, x, all_on(case)))
    assert primal.objective == pytest.approx(expected, rel=1e-6)
    assert dual.objective == pytest.approx(expected, rel=1e-6)


def test_dual_has_one_cone_pair_per_line_and_period(two_bus):
    case, _ = two_bus
    x = CommitmentDecision.from_on_off(case, {"g1": [1, 1], "g2": [0, 0]})
    dual = build_dual(case, x, all_on(case))
    assert len(dual.cones) == 2 * len(case.lines) * case.periods
    kinds = {c.kind for c in dual.cones.values()}
    assert kinds == {"capacity", "soc"}


def test_weak_duality_for_perturbed_dual_points(conic, two_bus):
    case, _ = two_bus
    x = CommitmentDecision.from_on_off(case, {"g1": [1, 1], "g2": [0, 0]})
    primal_opt = conic.solve(build_dispatch_block(case, status=all_on(case), x=x)[0]).objective
    dual = build_dual(case, x, all_on(case))
    true_obj = dict(dual.objective)
    rng = np.random.default_rng(1)
    for _ in range(4):
        # optimize a perturbed objective to sample distinct feasible points
        perturbed = {k: v * (1.0 + 0.2 * rng.standard_normal()) for k, v in true_obj.items()}
        dual.objective = perturbed
        res = conic.solve(dual)
        value = sum(true_obj.get(k, 0.0) * res.values[k] for k in res.values)
        assert value <= primal_opt + 1e-5 * max(1.0, abs(primal_opt))
    dual.objective = true_obj


def test_merged_without_trajectories_equals_nominal_dual(conic, two_bus):
    case, _ = two_bus
    x = CommitmentDecision.from_on_off(case, {"g1": [1, 1], "g2": [0, 0]})
    ms = build_merged_subproblem(case, x, TrajectorySet())
    assert not any(k[0] == "omega" for k in ms.cs.vars)
    plain = conic.solve(build_dual(case, x, all_on(case)))
    merged = conic.solve(ms.cs)
    assert merged.objective == pytest.approx(plain.objective, rel=1e-7)


def test_big_m_box_interval_arithmetic(milp):
    # the four linearization rows force w = a * value at binary endpoints
    for a_val, expect in ((1, 3.5), (0, 0.0)):
        cs = ConstraintSystem(minimize=False)
        cs.add_var(("sigma",), lb=0.0)
        cs.add_var(("w",), lb=0.0)
        cs.add_var(("a",), "binary", a_val, a_val)
        M = 10.0
        cs.add_row(("fix",), {("sigma",): 1.0}, LE, 3.5)
        cs.add_row(("fix2",), {("sigma",): -1.0}, LE, -3.5)
        cs.add_row(("cap",), {("w",): 1.0, ("a",): -M}, LE, 0.0)
        cs.add_row(("floor",), {("sigma",): 1.0, ("w",): -1.0, ("a",): M}, LE, M)
        cs.add_row(("tie",), {("w",): 1.0, ("sigma",): -1.0}, LE, 0.0)
        for want_max in (1.0, -1.0):
            cs.objective = {("w",): want_max}
            res = milp.solve(cs)
            assert res.values[("w",)] == pytest.approx(expect, abs=1e-8)


def test_merged_restriction_matches_scenario_dual(conic, three_bus):
    case, ts = three_bus
    x = CommitmentDecision.from_on_off(
        case, {"g1": [1, 1], "g2": [0, 0], "g3": [0, 0]})
    ms = build_merged_subproblem(case, x, ts)
    for k in range(ts.n_traj + 1):
        merged = conic.solve(_fix_omega(ms.cs, k, ms.n_traj))
        plain = conic.solve(build_dual(case, x, apply_trajectory(case, ts, k)))
        rel = abs(merged.objective - plain.objective) / max(1.0, abs(plain.objective))
        assert rel <= 1e-6, f"scenario {k}"


def test_subproblem_modes_agree(conic, milp, three_bus):
    case, ts = three_bus
    x = CommitmentDecision.from_on_off(
        case, {"g1": [1, 1], "g2": [0, 0], "g3": [0, 0]})
    enum = solve_subproblem(case, x, ts, SubproblemConfig(mode="enumerate"), conic, milp)
    mono = solve_subproblem(case, x, ts, SubproblemConfig(mode="monolithic"), conic, milp)
    rel = abs(enum.value - mono.value) / max(1.0, abs(enum.value))
    assert rel <= 1e-6
    assert enum.worst_k == mono.worst_k == 2


def test_subproblem_without_trajectories_returns_nominal(conic, two_bus):
    case, _ = two_bus
    x = CommitmentDecision.from_on_off(case, {"g1": [1, 1], "g2": [0, 0]})
    res = solve_subproblem(case, x, TrajectorySet(), SubproblemConfig(), conic)
    assert res.worst_k == 0
    nominal = conic.solve(build_dispatch_block(case, status=all_on(case), x=x)[0])
    assert res.value == pytest.approx(nominal.objective, rel=1e-6)


def test_islanding_trajectory_is_worst_and_priced_at_shedding(conic, two_bus):
    case, ts = two_bus
    x = CommitmentDecision.from_on_off(case, {"g1": [1, 1], "g2": [0, 0]})
    res = solve_subproblem(case, x, ts, SubproblemConfig(), conic)
    assert res.worst_k == 1
    shed = case.unserved_cost * case.base_mva * (
        sum(case.demand_p[2]) + sum(case.demand_q[2]))
    assert res.value >= shed * 0.999


def test_tie_break_picks_smallest_index(conic, two_bus):
    case, _ = two_bus
    ts = TrajectorySet.from_lists(case, [[(1, 2)], [(1, 2)]])  # identical twins
    x = CommitmentDecision.from_on_off(case, {"g1": [1, 1], "g2": [0, 0]})
    res = solve_subproblem(case, x, ts, SubproblemConfig(), conic)
    assert res.worst_k == 1


def test_enumerate_threads_match_serial(conic, three_bus):
    case, ts = three_bus
    x = CommitmentDecision.from_on_off(
        case, {"g1": [1, 1], "g2": [1, 1], "g3": [0, 0]})
    serial = solve_subproblem(case, x, ts, SubproblemConfig(threads=1), conic)
    threaded = solve_subproblem(case, x, ts, SubproblemConfig(threads=3), conic)
    assert serial.value == threaded.value
    assert serial.worst_k == threaded.worst_k


def test_tiny_big_m_is_detected(conic, milp, three_bus):
    case, ts = three_bus
    x = CommitmentDecision.from_on_off(
        case, {"g1": [1, 1], "g2": [0, 0], "g3": [0, 0]})
    with pytest.raises(BigMTooSmall):
        solve_subproblem(case, x, ts,
                         SubproblemConfig(mode="monolithic", big_m=100.0),
                         conic, milp)


def test_subproblem_value_upper_bounds_robust_optimum(conic, two_bus):
    # any schedule's worst-case cost is at least the robust optimum
    from robustuc.oracle import brute_force_robust

    case, ts = two_bus
    opt = brute_force_robust(case, ts).optimum
    rng = np.random.default_rng(9)
    for _ in range(3):
        x = random_commitment(rng, case)
        sub = solve_subproblem(case, x, ts, SubproblemConfig(), conic)
        total = x.commitment_cost(case) + sub.value
        assert total >= opt - 1e-4 * max(1.0, abs(opt))
