import math

import pytest

from robustuc.constraints import EQ, GE, LE, ConstraintSystem
from robustuc.errors import BackendFailure


def test_milp_rounds_binaries(milp):
    cs = ConstraintSystem()
    cs.add_var(("x",), "binary", 0, 1)
    cs.add_row(("floor",), {("x",): 1.0}, GE, 0.3)
    cs.add_obj(("x",), 1.0)
    res = milp.solve(cs)
    assert res.status == "optimal"
    assert res.values[("x",)] == 1.0
    assert res.objective == pytest.approx(1.0)


def test_milp_reports_infeasible(milp):
    cs = ConstraintSystem()
    cs.add_var(("x",), "binary", 0, 1)
    cs.add_row(("hi",), {("x",): 1.0}, GE, 2.0)
    res = milp.solve(cs)
    assert res.status == "infeasible"


def test_milp_warm_start_keeps_incumbent_monotone(milp):
    cs = ConstraintSystem()
    for i in range(3):
        cs.add_var(("x", i), "binary", 0, 1)
        cs.add_obj(("x", i), float(i + 1))
    cs.add_row(("pick",), {("x", i): 1.0 for i in range(3)}, GE, 1.0)
    cold = milp.solve(cs)
    warm = milp.solve(cs, warm_start=cold.values)
    assert warm.objective <= cold.objective + 1e-9


def test_milp_rejects_cones(milp):
    cs = ConstraintSystem()
    for name in ("a", "b"):
        cs.add_var((name,))
    cs.add_cone(("c",), ("a",), (("b",),))
    with pytest.raises(BackendFailure):
        milp.solve(cs)


def test_conic_cone_projection(conic):
    cs = ConstraintSystem()
    for name in ("p", "q", "f"):
        cs.add_var((name,))
    cs.add_row(("fp",), {("p",): 1.0}, EQ, 3.0)
    cs.add_row(("fq",), {("q",): 1.0}, EQ, 4.0)
    cs.add_cone(("cap",), ("f",), (("p",), ("q",)))
    cs.add_obj(("f",), 1.0)
    res = conic.solve(cs)
    assert res.status == "optimal"
    assert res.objective == pytest.approx(5.0, abs=1e-7)


def test_conic_duality_gap_and_signs(conic):
    # min x + 2y s.t. x + y >= 1, x - y == 0 (no native bounds)
    cs = ConstraintSystem()
    cs.add_var(("x",))
    cs.add_var(("y",))
    cs.add_row(("cover",), {("x",): 1.0, ("y",): 1.0}, GE, 1.0)
    cs.add_row(("tie",), {("x",): 1.0, ("y",): -1.0}, EQ, 0.0)
    cs.add_obj(("x",), 1.0)
    cs.add_obj(("y",), 2.0)
    res = conic.solve(cs)
    assert res.objective == pytest.approx(1.5, abs=1e-7)
    lam = res.row_duals[("cover",)]
    assert lam >= -1e-9  # inequality multiplier is sign-constrained
    dual_obj = lam * 1.0  # equality rhs is zero
    assert abs(dual_obj - res.objective) <= 1e-7


def test_conic_reports_infeasible(conic):
    cs = ConstraintSystem()
    cs.add_var(("x",))
    cs.add_row(("a",), {("x",): 1.0}, EQ, 0.0)
    cs.add_row(("b",), {("x",): 1.0}, EQ, 1.0)
    res = conic.solve(cs)
    assert res.status == "infeasible"


def test_conic_rejects_binaries(conic):
    cs = ConstraintSystem()
    cs.add_var(("x",), "binary", 0, 1)
    with pytest.raises(BackendFailure):
        conic.solve(cs)


def test_solves_are_deterministic(conic, milp):
    cs = ConstraintSystem()
    for name in ("p", "q", "f"):
        cs.add_var((name,))
    cs.add_row(("fp",), {("p",): 1.0}, EQ, 1.2345)
    cs.add_row(("fq",), {("q",): 1.0}, EQ, 2.3456)
    cs.add_cone(("cap",), ("f",), (("p",), ("q",)))
    cs.add_obj(("f",), 1.0)
    a, b = conic.solve(cs), conic.solve(cs)
    assert a.objective == b.objective
    mcs = ConstraintSystem()
    for i in range(4):
        mcs.add_var(("x", i), "binary", 0, 1)
        mcs.add_obj(("x", i), 1.0 + 0.1 * i)
    mcs.add_row(("pick",), {("x", i): 1.0 for i in range(4)}, GE, 2.0)
    r1, r2 = milp.solve(mcs), milp.solve(mcs)
    assert r1.objective == r2.objective and r1.values == r2.values


def test_milp_objective_includes_constant(milp):
    cs = ConstraintSystem()
    cs.add_var(("x",), "binary", 0, 1)
    cs.add_obj(("x",), 2.0)
    cs.obj_const = 10.0
    cs.add_row(("floor",), {("x",): 1.0}, GE, 1.0)
    assert milp.solve(cs).objective == pytest.approx(12.0)
