"""Constructed example grids used by the test-suite, the CLI and the docs.

All quantities are per-unit on the declared MVA base. Line constants follow
the lifted-variable flow equations used by the formulation: for a series
impedance r + jx the pair is (G, B) = (-r, x) / (r^2 + x^2), so G is
nonpositive for physical lines and B positive.
"""

from __future__ import annotations

import numpy as np

from .formulation import CommitmentDecision
from .network import Generator, NetworkCase, ReserveArea, ensure_reactive_support
from .scenarios import TrajectorySet


def line_params_from_impedance(r: float, x: float, charging: float = 0.0):
    """(conductance, susceptance, half-shunt) for a series impedance r + jx."""
    den = r * r + x * x
    return -r / den, x / den, charging / 2.0


def _flat(value: float, periods: int) -> tuple[float, ...]:
    return tuple(value for _ in range(periods))


def single_bus_case(periods: int = 2) -> NetworkCase:
    """One bus, one unit, no network: exercises pure commitment + slack logic."""
    gen = Generator(
        id="g1", bus=1, variable_cost=5.0, fixed_cost=100.0, startup_cost=20.0,
        shutdown_cost=10.0, p_max=0.5, q_min=-0.3, q_max=0.3,
    )
    return NetworkCase(
        base_mva=100.0, periods=periods, buses=(1,), lines=(),
        generators=(gen,),
        demand_p={1: _flat(0.10, periods)}, demand_q={1: _flat(0.02, periods)},
        unserved_cost=1000.0,
        line_capacity={}, line_conductance={}, line_susceptance={}, line_shunt={},
        v_min={1: 0.95}, v_max={1: 1.05}, name="single_bus",
    )


def two_bus_case(lossy: bool = False) -> tuple[NetworkCase, TrajectorySet]:
    """Cheap unit feeds a remote load over one line; the lone trajectory cuts it.

    The islanding fixture for the robust-vs-nominal comparisons: the nominal
    schedule leaves the backup unit at the load bus off and pays dearly when
    the line goes down.
    """
    periods = 2
    g, b, bsh = line_params_from_impedance(0.02 if lossy else 0.0, 0.1)
    cheap = Generator(id="g1", bus=1, variable_cost=10.0, fixed_cost=50.0,
                      startup_cost=10.0, p_max=1.2, q_min=-0.6, q_max=0.6)
    backup = Generator(id="g2", bus=2, variable_cost=50.0, fixed_cost=200.0,
                       startup_cost=40.0, p_max=0.8, q_min=-0.5, q_max=0.5)
    case = NetworkCase(
        base_mva=100.0, periods=periods, buses=(1, 2), lines=((1, 2),),
        generators=(cheap, backup),
        demand_p={1: _flat(0.20, periods), 2: _flat(0.40, periods)},
        demand_q={1: _flat(0.05, periods), 2: _flat(0.10, periods)},
        unserved_cost=2000.0,
        line_capacity={(1, 2): 1.5},
        line_conductance={(1, 2): g}, line_susceptance={(1, 2): b},
        line_shunt={(1, 2): bsh},
        v_min={1: 0.9, 2: 0.9}, v_max={1: 1.1, 2: 1.1}, name="two_bus",
    )
    return case, TrajectorySet.from_lists(case, [[(1, 2)]])


def three_bus_case() -> tuple[NetworkCase, TrajectorySet]:
    """Triangle grid, three units, two trajectories of different severity."""
    periods = 2
    g, b, bsh = line_params_from_impedance(0.0, 0.08)
    gens = (
        Generator(id="g1", bus=1, variable_cost=8.0, fixed_cost=40.0,
                  startup_cost=10.0, p_max=1.0, q_min=-0.5, q_max=0.5),
        Generator(id="g2", bus=2, variable_cost=25.0, fixed_cost=80.0,
                  startup_cost=20.0, p_max=0.8, q_min=-0.4, q_max=0.4),
        Generator(id="g3", bus=3, variable_cost=60.0, fixed_cost=120.0,
                  startup_cost=30.0, p_max=0.4, q_min=-0.2, q_max=0.2),
    )
    lines = ((1, 2), (2, 3), (1, 3))
    case = NetworkCase(
        base_mva=100.0, periods=periods, buses=(1, 2, 3), lines=lines,
        generators=gens,
        demand_p={1: _flat(0.15, periods), 2: _flat(0.25, periods), 3: _flat(0.20, periods)},
        demand_q={1: _flat(0.03, periods), 2: _flat(0.06, periods), 3: _flat(0.05, periods)},
        unserved_cost=2000.0,
        line_capacity={e: 1.2 for e in lines},
        line_conductance={e: g for e in lines},
        line_susceptance={e: b for e in lines},
        line_shunt={e: bsh for e in lines},
        v_min={n: 0.9 for n in (1, 2, 3)}, v_max={n: 1.1 for n in (1, 2, 3)},
        name="three_bus",
    )
    ts = TrajectorySet.from_lists(case, [[(1, 3)], [(2, 3), (1, 3)]])
    return case, ts


def six_bus_case() -> tuple[NetworkCase, TrajectorySet]:
    """Two three-bus clusters joined by ties; one trajectory splits them apart."""
    periods = 3
    g, b, bsh = line_params_from_impedance(0.0, 0.1)
    gens = (
        Generator(id="a1", bus=1, variable_cost=9.0, fixed_cost=60.0,
                  startup_cost=15.0, p_max=1.5, q_min=-0.7, q_max=0.7,
                  min_up=2, min_down=2, u0=1, up_residual=1, p0=0.5,
                  ramp_down=1.5, ramp_shutdown=1.5),
        Generator(id="a2", bus=2, variable_cost=30.0, fixed_cost=90.0,
                  startup_cost=25.0, p_max=0.6, q_min=-0.3, q_max=0.3),
        Generator(id="b1", bus=4, variable_cost=45.0, fixed_cost=150.0,
                  startup_cost=35.0, p_max=0.9, q_min=-0.5, q_max=0.5),
    )
    lines = ((1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4), (2, 5))
    demand_p = {
        1: _flat(0.10, periods), 2: _flat(0.15, periods), 3: _flat(0.12, periods),
        4: _flat(0.18, periods), 5: _flat(0.14, periods), 6: _flat(0.08, periods),
    }
    case = NetworkCase(
        base_mva=100.0, periods=periods, buses=(1, 2, 3, 4, 5, 6), lines=lines,
        generators=gens,
        demand_p=demand_p,
        demand_q={n: tuple(0.25 * v for v in demand_p[n]) for n in demand_p},
        unserved_cost=2500.0,
        line_capacity={e: (0.9 if e in ((3, 4), (2, 5)) else 1.2) for e in lines},
        line_conductance={e: g for e in lines},
        line_susceptance={e: b for e in lines},
        line_shunt={e: bsh for e in lines},
        v_min={n: 0.92 for n in range(1, 7)}, v_max={n: 1.08 for n in range(1, 7)},
        name="six_bus",
    )
    ts = TrajectorySet.from_lists(
        case, [[(3, 4), (2, 5)], [(1, 2)], [(5, 6), (4, 6)]]
    )
    return case, ts


def thirty_bus_case() -> tuple[NetworkCase, TrajectorySet]:
    """Ring of ten hubs with two leaf buses each; 24 periods, 5 trajectories.

    Lines are lightly lossy and the voltage window narrow, which keeps the
    cone-free master relaxation from synthesizing large fictitious losses
    and holds the cutting-plane workload at desktop scale.
    """
    periods = 24
    hubs = list(range(1, 11))
    leaves = list(range(11, 31))
    buses = tuple(hubs + leaves)
    lines = []
    for i in hubs:
        j = 1 if i == 10 else i + 1
        lines.append((i, j))
    for i in hubs:
        lines.append((i, 10 + i))
        lines.append((i, 20 + i))
    lines = tuple(lines)

    g_ring, b_ring, _ = line_params_from_impedance(0.001, 0.1)
    # spur feeders are modeled lossless: an islanded, generator-free leaf
    # group with lossy internal lines has no strictly interior point and its
    # scenario pricing becomes unreliable for any solver
    g_spur, b_spur, _ = line_params_from_impedance(0.0, 0.14)

    shape = [0.62, 0.58, 0.55, 0.54, 0.56, 0.62, 0.72, 0.84, 0.93, 0.98, 1.0, 0.99,
             0.97, 0.95, 0.94, 0.95, 0.98, 1.0, 0.97, 0.92, 0.85, 0.77, 0.70, 0.65]
    demand_p, demand_q = {}, {}
    for n in buses:
        peak = 0.085 if n in hubs else 0.035
        demand_p[n] = tuple(round(peak * s, 6) for s in shape)
        demand_q[n] = tuple(round(0.22 * peak * s, 6) for s in shape)

    gens = []
    # consistent merit order (cheap energy also cheap to commit) keeps the
    # commitment relaxation tight; scaling runs are not meant to stress-test
    # branch and bound
    hub_specs = [
        (1, 0.60, 8.0, 40.0, 3, 3), (2, 0.55, 11.0, 55.0, 3, 2),
        (3, 0.50, 14.0, 70.0, 2, 2), (4, 0.45, 18.0, 85.0, 2, 2),
        (5, 0.40, 24.0, 100.0, 2, 1), (6, 0.50, 30.0, 120.0, 1, 1),
    ]
    for bus, pmax, cv, cf, tu, td in hub_specs:
        gens.append(Generator(
            id=f"h{bus}", bus=bus, variable_cost=cv, fixed_cost=cf,
            startup_cost=cv, shutdown_cost=0.5 * cv, p_max=pmax,
            q_min=-0.6 * pmax, q_max=0.6 * pmax, min_up=tu, min_down=td,
            ramp_up=0.5 * pmax, ramp_startup=pmax,
            ramp_down=0.5 * pmax, ramp_shutdown=pmax,
            u0=1 if bus <= 3 else 0, p0=0.3 * pmax if bus <= 3 else 0.0,
        ))
    for bus in (28, 30):
        gens.append(Generator(
            id=f"pk{bus}", bus=bus, variable_cost=55.0, fixed_cost=30.0,
            startup_cost=60.0, shutdown_cost=10.0, p_max=0.35,
            q_min=-0.25, q_max=0.25,
        ))

    reserve = ReserveArea(
        id="ring", units=tuple(f"h{b}" for b, *_ in hub_specs),
        requirement=tuple(0.05 for _ in range(periods)),
    )

    cap = {}
    for e in lines:
        n, m = e
        if m <= 10:  # ring segment: wide enough to reroute around any cut
            cap[e] = 1.6
        elif m in (28, 30):  # peaker spurs
            cap[e] = 0.5
        else:
            cap[e] = 0.12 if m % 7 == 0 else 0.30
    case = NetworkCase(
        base_mva=100.0, periods=periods, buses=buses, lines=lines,
        generators=tuple(gens),
        demand_p=demand_p, demand_q=demand_q, unserved_cost=3000.0,
        line_capacity=cap,
        line_conductance={e: (g_ring if e[1] <= 10 else g_spur) for e in lines},
        line_susceptance={e: (b_ring if e[1] <= 10 else b_spur) for e in lines},
        line_shunt={e: 0.0 for e in lines},
        v_min={n: 0.97 for n in buses}, v_max={n: 1.03 for n in buses},
        reserve_areas=(reserve,), name="thirty_bus",
    )
    # severities are clearly separated: the last front cuts a hub out of the
    # ring together with its generator-free leaves, dwarfing the others
    ts = TrajectorySet.from_lists(case, [
        [(1, 2), (2, 3)],
        [(5, 6), (6, 7)],
        [(9, 10), (10, 1), (9, 29)],
        [(3, 4), (4, 14), (4, 24)],
        [(7, 8), (8, 9), (7, 27), (8, 28)],
    ])
    return case, ts


def random_case(rng: np.random.Generator, n_buses: int = 3, periods: int = 2,
                lossy: bool = False, gen_prob: float = 0.7) -> NetworkCase:
    """Random connected grid whose full-shedding point is always feasible."""
    buses = tuple(range(1, n_buses + 1))
    lines = []
    for m in range(2, n_buses + 1):
        n = int(rng.integers(1, m))
        lines.append((n, m))
    if n_buses >= 3 and rng.random() < 0.6:
        extra = (1, n_buses) if (1, n_buses) not in lines else (2, n_buses)
        if extra not in lines and (extra[1], extra[0]) not in lines and extra[0] != extra[1]:
            lines.append(extra)
    lines = tuple(lines)

    gens = []
    for n in buses:
        if n == 1 or rng.random() < gen_prob:
            pmax = float(rng.uniform(0.3, 1.0))
            gens.append(Generator(
                id=f"g{n}", bus=n,
                variable_cost=float(rng.uniform(5.0, 40.0)),
                fixed_cost=float(rng.uniform(0.0, 150.0)),
                startup_cost=float(rng.uniform(0.0, 60.0)),
                shutdown_cost=float(rng.uniform(0.0, 30.0)),
                p_max=pmax,
                q_min=-float(rng.uniform(0.2, 0.6)), q_max=float(rng.uniform(0.2, 0.6)),
                ramp_up=pmax, ramp_startup=pmax, ramp_down=pmax, ramp_shutdown=pmax,
                min_up=int(rng.integers(1, 3)), min_down=int(rng.integers(1, 3)),
                u0=int(rng.integers(0, 2)),
            ))

    demand_p, demand_q = {}, {}
    for n in buses:
        demand_p[n] = tuple(float(rng.uniform(0.05, 0.30)) for _ in range(periods))
        demand_q[n] = tuple(0.2 * v for v in demand_p[n])

    g_params, b_params, shunt = {}, {}, {}
    for e in lines:
        r = float(rng.uniform(0.005, 0.03)) if lossy else 0.0
        xx = float(rng.uniform(0.05, 0.2))
        G, B, bsh = line_params_from_impedance(r, xx)
        g_params[e], b_params[e], shunt[e] = G, B, bsh

    case = NetworkCase(
        base_mva=100.0, periods=periods, buses=buses, lines=lines,
        generators=tuple(gens),
        demand_p=demand_p, demand_q=demand_q,
        unserved_cost=float(rng.uniform(1200.0, 2500.0)),
        line_capacity={e: float(rng.uniform(0.8, 1.6)) for e in lines},
        line_conductance=g_params, line_susceptance=b_params, line_shunt=shunt,
        v_min={n: 0.9 for n in buses}, v_max={n: 1.1 for n in buses},
        name=f"random_{n_buses}bus",
    )
    return ensure_reactive_support(case)


def random_commitment(rng: np.random.Generator, case: NetworkCase) -> CommitmentDecision:
    """Random logic-feasible schedule: runs padded out to the minimum durations."""
    on_off = {}
    for g in case.generators:
        if g.fixed_on:
            on_off[g.id] = [1] * case.periods
            continue
        seq = [int(rng.random() < 0.6) for _ in range(case.periods)]
        if g.is_thermal:
            prev = g.u0
            t = 0
            while t < case.periods:
                if seq[t] != prev and seq[t] == 1:
                    for s in range(t, min(t + g.min_up, case.periods)):
                        seq[s] = 1
                    prev, t = 1, min(t + g.min_up, case.periods)
                elif seq[t] != prev and seq[t] == 0:
                    for s in range(t, min(t + g.min_down, case.periods)):
                        seq[s] = 0
                    prev, t = 0, min(t + g.min_down, case.periods)
                else:
                    prev = seq[t]
                    t += 1
        on_off[g.id] = seq
    x = CommitmentDecision.from_on_off(case, on_off)
    bad = x.check_logic(case)
    if bad:
        raise AssertionError(f"random schedule repair failed: {bad}")
    return x


def random_line_status(rng: np.random.Generator, case: NetworkCase,
                       p_on: float = 0.7) -> dict:
    status = {e: int(rng.random() < p_on) for e in case.lines}
    if all(v == 0 for v in status.values()) and case.lines:
        status[case.lines[0]] = 1
    return status


OUTAGE_LISTS_200 = [
    [(25, 199), (171, 195)],
    [(25, 199), (81, 82), (59, 119)],
    [(93, 191), (100, 184), (14, 121), (97, 186), (109, 186)],
    [(93, 191), (63, 184), (57, 159)],
    [(34, 137), (14, 149), (97, 186), (109, 186)],
    [(85, 120), (42, 44), (58, 95), (45, 187), (46, 122), (81, 178), (25, 64)],
    [(60, 134), (128, 133), (43, 132), (144, 162), (59, 119)],
    [(93, 191), (100, 184), (141, 121), (42, 44), (85, 120)],
    [(25, 199), (81, 178), (46, 122), (45, 187), (58, 177), (83, 146), (60, 186)],
    [(34, 54), (14, 149), (58, 95), (31, 192), (60, 134)],
    [(25, 199), (81, 178), (46, 122), (45, 181), (31, 192), (60, 134)],
    [(34, 54), (14, 149), (83, 186), (60, 186)],
    [(93, 191), (63, 184), (160, 181), (39, 85)],
    [(93, 191), (100, 184), (14, 121), (44, 200), (17, 109)],
    [(34, 54), (14, 15), (14, 121), (58, 95), (31, 192), (60, 186)],
]


def stub_200_bus() -> tuple[NetworkCase, TrajectorySet]:
    """Skeleton 200-bus grid covering the bundled 15-trajectory outage list.

    Topology and parameters are placeholders (a chain plus every line any
    trajectory references); the fixture exists to exercise trajectory-file
    handling at scale, not to reproduce any published dataset.
    """
    periods = 1
    buses = tuple(range(1, 201))
    seen = set()
    lines = []
    for traj in OUTAGE_LISTS_200:
        for n, m in traj:
            key = frozenset((n, m))
            if key not in seen:
                seen.add(key)
                lines.append((n, m))
    for i in range(1, 200):
        key = frozenset((i, i + 1))
        if key not in seen:
            seen.add(key)
            lines.append((i, i + 1))
    lines = tuple(lines)
    G, B, bsh = line_params_from_impedance(0.0, 0.1)
    gen = Generator(id="g1", bus=1, variable_cost=10.0, p_max=5.0,
                    q_min=-2.0, q_max=2.0)
    case = NetworkCase(
        base_mva=100.0, periods=periods, buses=buses, lines=lines,
        generators=(gen,),
        demand_p={n: _flat(0.01, periods) for n in buses},
        demand_q={n: _flat(0.002, periods) for n in buses},
        unserved_cost=1000.0,
        line_capacity={e: 5.0 for e in lines},
        line_conductance={e: G for e in lines},
        line_susceptance={e: B for e in lines},
        line_shunt={e: bsh for e in lines},
        v_min={n: 0.9 for n in buses}, v_max={n: 1.1 for n in buses},
        name="stub_200",
    )
    return case, TrajectorySet.from_lists(case, OUTAGE_LISTS_200)
