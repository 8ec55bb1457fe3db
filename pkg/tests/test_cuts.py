import math

import numpy as np
import pytest

from robustuc.constraints import SocRow
from robustuc.cuts import (
    Cut,
    CutPool,
    capacity_cut,
    cone_violation,
    cosine,
    detect_violations,
    is_parallel,
    select_most_violated,
    soc_cut,
)
from robustuc.errors import DegeneratePoint

PK, QK = ("pf",), ("qf",)
CK, SK, NK, MK = ("c",), ("s",), ("cmn",), ("cmm",)


def test_capacity_cut_example_separates_its_point():
    cut = capacity_cut(3.0, 4.0, 2.0, PK, QK, ("cap",))
    # normalized form of 3p + 4q <= 10
    assert cut.coeffs[PK] == pytest.approx(0.6)
    assert cut.coeffs[QK] == pytest.approx(0.8)
    assert cut.rhs == pytest.approx(2.0)
    assert cut.violation({PK: 3.0, QK: 4.0}) == pytest.approx(3.0)


def test_capacity_cut_axis_aligned():
    cut = capacity_cut(1.0, 0.0, 2.0, PK, QK, ("cap",))
    assert cut.coeffs == {PK: 1.0}
    assert cut.rhs == pytest.approx(2.0)


def test_capacity_cut_valid_on_the_disc():
    rng = np.random.default_rng(0)
    cut = capacity_cut(0.9, -1.7, 1.3, PK, QK, ("cap",))
    for _ in range(500):
        r = 1.3 * math.sqrt(rng.random())
        th = rng.uniform(0, 2 * math.pi)
        point = {PK: r * math.cos(th), QK: r * math.sin(th)}
        assert cut.violation(point) <= 1e-9


def test_capacity_cut_degenerate_point_raises():
    with pytest.raises(DegeneratePoint):
        capacity_cut(0.0, 0.0, 1.0, PK, QK, ("cap",))


def test_soc_cut_reference_values():
    cut = soc_cut(1.0, 0.0, 1.0, 1.0, CK, SK, NK, MK, ("soc",), variant="paper")
    n0 = math.sqrt(6.0)
    norm = math.sqrt(16.0 + 2 * n0 ** 2)
    assert cut.coeffs[CK] == pytest.approx(4.0 / norm)
    assert SK not in cut.coeffs
    assert cut.coeffs[NK] == pytest.approx(-n0 / norm)
    assert cut.coeffs[MK] == pytest.approx(-n0 / norm)
    boundary = {CK: 1.0, SK: 0.0, NK: 1.0, MK: 1.0}
    assert cut.violation(boundary) == pytest.approx((4 - 2 * n0) / norm)
    assert cut.violation(boundary) < 0
    violating = {CK: 1.5, SK: 0.0, NK: 1.0, MK: 1.0}
    assert cut.violation(violating) == pytest.approx((6 - 2 * n0) / norm)
    assert cut.violation(violating) > 0


@pytest.mark.parametrize("variant", ["paper", "tight"])
def test_soc_cut_monte_carlo_validity(variant):
    rng = np.random.default_rng(7)
    for _ in range(20):
        cnn, cmm = rng.uniform(0.0, 2.0, size=2)
        r = math.sqrt(cnn * cmm) * (1.0 + rng.uniform(0.05, 1.0))
        th = rng.uniform(0, 2 * math.pi)
        cut = soc_cut(r * math.cos(th), r * math.sin(th), cnn, cmm,
                      CK, SK, NK, MK, ("soc",), variant=variant)
        for _ in range(500):
            a, b = rng.uniform(0.0, 2.0, size=2)
            rr = math.sqrt(a * b) * math.sqrt(rng.random())
            tt = rng.uniform(0, 2 * math.pi)
            point = {CK: rr * math.cos(tt), SK: rr * math.sin(tt), NK: a, MK: b}
            assert cut.violation(point) <= 1e-9


@pytest.mark.parametrize("variant", ["tight", "adaptive"])
def test_separating_variants_always_cut_their_generator(variant):
    rng = np.random.default_rng(21)
    for _ in range(100):
        cnn, cmm = rng.uniform(0.1, 2.0, size=2)
        r = math.sqrt(cnn * cmm) * (1.0 + rng.uniform(1e-3, 0.2))
        th = rng.uniform(0, 2 * math.pi)
        c, s = r * math.cos(th), r * math.sin(th)
        cut = soc_cut(c, s, cnn, cmm, CK, SK, NK, MK, ("soc",), variant=variant)
        assert cut.violation({CK: c, SK: s, NK: cnn, MK: cmm}) > 0


def test_adaptive_variant_prefers_the_reference_constant_when_it_cuts():
    # strongly violating point: the reference constant separates, so the
    # adaptive cut must coincide with it
    args = (1.5, 0.0, 0.4, 0.4, CK, SK, NK, MK, ("soc",))
    assert soc_cut(*args, variant="adaptive").coeffs == \
        soc_cut(*args, variant="paper").coeffs


def test_soc_cut_degenerate_point_raises():
    with pytest.raises(DegeneratePoint):
        soc_cut(0.0, 0.0, 0.0, 0.0, CK, SK, NK, MK, ("soc",))


def test_parallelism_examples_and_boundary():
    a = Cut(("t",), "capacity", {PK: 1.0}, 1.0)
    b = Cut(("t",), "capacity", {PK: 1.0}, 2.0)  # same direction, any rhs
    c = Cut(("t",), "capacity", {QK: 1.0}, 1.0)
    eps = 0.5e-5
    assert is_parallel(a, b, eps)
    assert not is_parallel(a, c, eps)
    # cosine exactly at the boundary is kept
    angle = math.acos(1.0 - eps)
    d = Cut(("t",), "capacity",
            {PK: math.cos(angle), QK: math.sin(angle)}, 1.0)
    assert cosine(a, d) == pytest.approx(1.0 - eps, abs=1e-12)
    assert not is_parallel(a, d, eps)


def test_pool_rejects_parallel_keeps_distinct():
    pool = CutPool(eps_par=0.5e-5)
    a = capacity_cut(3.0, 4.0, 2.0, PK, QK, ("cap",))
    b = capacity_cut(6.0, 8.0, 2.0, PK, QK, ("cap",))  # same direction
    c = capacity_cut(4.0, 3.0, 2.0, PK, QK, ("cap",))
    assert pool.add(a)
    assert not pool.add(b)
    assert pool.add(c)
    assert len(pool) == 2
    cuts = pool.all()
    for i in range(len(cuts)):
        for j in range(i + 1, len(cuts)):
            assert cosine(cuts[i], cuts[j]) <= 1 - 0.5e-5 + 1e-12


def test_detect_violations_ranks_and_filters():
    cones = {
        ("cap", 1): SocRow(("cap", 1), ("f", 1), (("p", 1), ("q", 1)), "capacity"),
        ("cap", 2): SocRow(("cap", 2), ("f", 2), (("p", 2), ("q", 2)), "capacity"),
        ("soc", 1): SocRow(("soc", 1), ("d4",), (("d1",), ("d2",), ("d3",)), "soc"),
    }
    point = {("f", 1): 1.0, ("p", 1): 1.1, ("q", 1): 0.0,   # violation 0.21
             ("f", 2): 1.0, ("p", 2): 0.5, ("q", 2): 0.0,   # satisfied
             ("d4",): 2.0, ("d1",): 2.2, ("d2",): 0.0, ("d3",): 0.0}
    cap = detect_violations(point, cones, 1e-5, "capacity")
    assert [k for k, _ in cap] == [("cap", 1)]
    assert cap[0][1] == pytest.approx(1.1 ** 2 - 1.0)
    soc = detect_violations(point, cones, 1e-5, "soc")
    assert soc[0][1] == pytest.approx((2.2 ** 2 - 4.0) / 4.0)
    assert detect_violations(point, cones, 1e-5, "capacity",
                             restrict={("cap", 2)}) == []
    tight = {**point, ("p", 1): 0.3}
    assert detect_violations(tight, cones, 1e-5, "capacity") == []


def test_selection_rule_rounds_up():
    found = [(("a",), 0.3), (("b",), 0.1)]
    # ceil(0.55 * 2) = 2: both survive
    assert select_most_violated(found, 0.55) == found
    assert select_most_violated(found, 0.5) == found[:1]
    assert select_most_violated([], 0.55) == []


def test_cone_violation_units():
    cap = SocRow(("cap",), ("f",), (("p",), ("q",)), "capacity")
    soc = SocRow(("soc",), ("d4",), (("d1",), ("d2",), ("d3",)), "soc")
    point = {("f",): 2.0, ("p",): 3.0, ("q",): 4.0,
             ("d4",): 2.0, ("d1",): 3.0, ("d2",): 4.0, ("d3",): 0.0}
    assert cone_violation(cap, point) == pytest.approx(25.0 - 4.0)
    assert cone_violation(soc, point) == pytest.approx((25.0 - 4.0) / 4.0)
