"""Command-line client for the solve service.

By default requests are executed against the service app in-process; pass
``--server URL`` to talk to a running instance instead. Exit codes: 0 on
success, 1 for input or validation problems, 2 for solver failures, 3 when
the algorithm stopped short of the gap target (outputs are still written).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_INCOMPLETE = 0, 1, 2, 3
_NONCONVERGED = ("iter_limit", "cycle_detected", "master_stalled")


class _Client:
    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DeprecationWarning)
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict):
        return self._client.post(path, json=payload)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_INVALID)


def _fail_from_response(resp) -> "sys.NoReturn":
    detail = None
    try:
        detail = resp.json().get("detail")
    except Exception:
        pass
    if isinstance(detail, dict):
        for err in detail.get("errors", []):
            click.echo(f"error: {err}", err=True)
    elif isinstance(detail, list):  # pydantic validation: show field paths
        for item in detail:
            loc = ".".join(str(p) for p in item.get("loc", []))
            click.echo(f"error: {loc}: {item.get('msg')}", err=True)
    else:
        click.echo(f"error: HTTP {resp.status_code}", err=True)
    sys.exit(EXIT_SOLVER if resp.status_code >= 500 else EXIT_INVALID)


def _solve_options(kwargs: dict) -> dict:
    opts = {}
    mapping = {
        "epsilon": "epsilon", "eps_tol": "eps_tol", "eps_par": "eps_par",
        "p_cut": "p_cut", "max_iter": "max_iter", "max_rounds": "max_rounds",
        "big_m": "big_m", "sub_mode": "sub_mode", "master": "master",
        "threads": "threads", "seed": "seed", "milp_gap": "milp_gap",
        "time_limit": "time_limit", "soc_cut_variant": "soc_cut_variant",
        "stall_policy": "stall_policy", "master_epsilon": "master_epsilon",
        "reactive_support_q": "reactive_support_q_mvar",
    }
    for key, field in mapping.items():
        if kwargs.get(key) is not None:
            opts[field] = kwargs[key]
    return opts


def _common_solve_flags(fn):
    flags = [
        click.option("--epsilon", type=float, default=1e-4, show_default=True,
                     help="relative optimality gap target"),
        click.option("--eps-tol", type=float, default=1e-5, show_default=True,
                     help="cone violation threshold for cutting"),
        click.option("--eps-par", type=float, default=0.5e-5, show_default=True,
                     help="cut parallelism rejection threshold"),
        click.option("--p-cut", type=float, default=0.55, show_default=True,
                     help="fraction of ranked violations to cut per round"),
        click.option("--max-iter", type=int, default=25, show_default=True),
        click.option("--max-rounds", type=int, default=200, show_default=True,
                     help="cutting-plane rounds per master solve"),
        click.option("--big-m", type=float, default=None,
                     help="override the linearization constant (dollars)"),
        click.option("--sub-mode", type=click.Choice(["enumerate", "monolithic"]),
                     default="enumerate", show_default=True),
        click.option("--master", type=click.Choice(["oicpa", "direct"]),
                     default="oicpa", show_default=True),
        click.option("--threads", type=int, default=1, show_default=True),
        click.option("--seed", type=int, default=None),
        click.option("--milp-gap", type=float, default=1e-6, show_default=True),
        click.option("--time-limit", type=float, default=None,
                     help="per-MILP-solve time limit in seconds"),
        click.option("--soc-cut-variant",
                     type=click.Choice(["adaptive", "paper", "tight"]),
                     default="adaptive", show_default=True),
        click.option("--stall-policy", type=click.Choice(["strict", "separate-all"]),
                     default="strict", show_default=True),
        click.option("--master-epsilon", type=float, default=None,
                     help="tighter gap target for master solves"),
        click.option("--reactive-support-q", type=float, default=None,
                     help="MVAr range of synthetic reactive units"),
        click.option("--server", type=str, default=None,
                     help="base URL of a running service (default: in-process)"),
    ]
    for flag in reversed(flags):
        fn = flag(fn)
    return fn


@click.group()
def main():
    """Robust unit commitment against line-outage trajectories."""


@main.command()
@click.argument("case_path", type=click.Path(exists=True))
@click.argument("traj_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default="out", show_default=True,
              help="directory for solution.json and trace CSVs")
@_common_solve_flags
def solve(case_path, traj_path, out, server, **kwargs):
    """Compute a worst-case-secure commitment and write the solution bundle."""
    payload = {
        "case": _read_json(case_path),
        "trajectories": _read_json(traj_path),
        "options": _solve_options(kwargs),
    }
    resp = _Client(server).post("/solve", payload)
    if resp.status_code != 200:
        _fail_from_response(resp)
    body = resp.json()
    solution = body["solution"]
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "solution.json").write_text(json.dumps(solution, indent=2))
    (out_dir / "ccg_log.csv").write_text(solution["ccg_log_csv"])
    for i, csv_text in enumerate(solution["oicpa_trace_csvs"]):
        (out_dir / f"oicpa_master_{i:03d}.csv").write_text(csv_text)
    click.echo(f"status={body['status']} lb={solution['lb']:.6g} "
               f"ub={solution['ub']:.6g} gap={solution['gap']:.3e} "
               f"worst_k={solution['worst_k']}")
    click.echo(f"outputs written to {out_dir}")
    if body["status"] in _NONCONVERGED:
        sys.exit(EXIT_INCOMPLETE)


@main.command("worst-case")
@click.argument("case_path", type=click.Path(exists=True))
@click.argument("traj_path", type=click.Path(exists=True))
@click.argument("solution_path", type=click.Path(exists=True))
@_common_solve_flags
def worst_case(case_path, traj_path, solution_path, server, **kwargs):
    """Report the worst trajectory and cost breakdown for a stored schedule."""
    solution = _read_json(solution_path)
    if "commitment" not in solution:
        click.echo("error: solution file carries no commitment", err=True)
        sys.exit(EXIT_INVALID)
    payload = {
        "case": _read_json(case_path),
        "trajectories": _read_json(traj_path),
        "commitment": solution["commitment"],
        "options": _solve_options(kwargs),
    }
    resp = _Client(server).post("/worst-case", payload)
    if resp.status_code != 200:
        _fail_from_response(resp)
    body = resp.json()
    click.echo(f"worst_k={body['worst_k']} total={body['value']:.6g}")
    click.echo(f"commitment_plus_served={body['commitment_plus_served']:.6g} "
               f"unserved={body['unserved']:.6g}")


@main.command()
@click.argument("case_path", type=click.Path(exists=True))
@click.argument("traj_path", type=click.Path(exists=True))
@click.option("--limit", type=int, default=2 ** 16, show_default=True,
              help="max commitment patterns to enumerate")
@click.option("--check-ccg", is_flag=True,
              help="also run the decomposition and report agreement")
@_common_solve_flags
def oracle(case_path, traj_path, limit, check_ccg, server, **kwargs):
    """Brute-force reference optimum for small instances."""
    payload = {
        "case": _read_json(case_path),
        "trajectories": _read_json(traj_path),
        "limit": limit,
        "check_ccg": check_ccg,
        "options": _solve_options(kwargs),
    }
    resp = _Client(server).post("/oracle", payload)
    if resp.status_code != 200:
        _fail_from_response(resp)
    body = resp.json()
    click.echo(f"oracle optimum={body['optimum']:.6g} "
               f"({body['enumeration_count']} schedules examined)")
    if check_ccg:
        click.echo(f"ccg objective={body['ccg_objective']:.6g} -> {body['verdict']}")


@main.command()
@click.argument("case_path", type=click.Path(exists=True))
@click.option("--server", type=str, default=None)
def validate(case_path, server):
    """Schema- and invariant-check a case file."""
    resp = _Client(server).post("/validate", _read_json(case_path))
    if resp.status_code != 200:
        _fail_from_response(resp)
    body = resp.json()
    for w in body["warnings"]:
        click.echo(f"warning: {w}")
    if body["errors"]:
        for e in body["errors"]:
            click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INVALID)
    click.echo("case is valid")


@main.command()
@click.argument("name", type=click.Choice(
    ["single_bus", "two_bus", "three_bus", "six_bus", "thirty_bus"]))
@click.option("--out", type=click.Path(), default=".", show_default=True)
def fixture(name, out):
    """Write a bundled example case (and its trajectories) as JSON files."""
    from . import cases
    from .schemas import from_network_case

    builders = {
        "single_bus": lambda: (cases.single_bus_case(), None),
        "two_bus": cases.two_bus_case,
        "three_bus": cases.three_bus_case,
        "six_bus": cases.six_bus_case,
        "thirty_bus": cases.thirty_bus_case,
    }
    built = builders[name]()
    case, ts = built if isinstance(built, tuple) else (built, None)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    case_path = out_dir / f"{name}.case.json"
    case_path.write_text(json.dumps(
        from_network_case(case).model_dump(), indent=2))
    click.echo(f"wrote {case_path}")
    traj = {"version": 1, "trajectories":
            [[list(line) for line in lines] for lines in ts.disabled] if ts else []}
    traj_path = out_dir / f"{name}.trajectories.json"
    traj_path.write_text(json.dumps(traj, indent=2))
    click.echo(f"wrote {traj_path}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
