"""CSV serialization for solve traces; floats round-trip via repr."""

from __future__ import annotations

import io

from .ccg import CcgIteration
from .oicpa import OicpaRound

OICPA_COLUMNS = ["round", "LB", "UB", "rel_gap", "abs_gap", "milp_seconds",
                 "cuts_added", "cuts_rejected_parallel"]
CCG_COLUMNS = ["iter", "k_added", "LB", "master_runtime_s", "master_nnz",
               "UB", "sub_runtime_s", "gap"]


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def oicpa_trace_csv(trace: list[OicpaRound]) -> str:
    out = io.StringIO()
    out.write(",".join(OICPA_COLUMNS) + "\n")
    for r in trace:
        out.write(",".join(_fmt(v) for v in (
            r.round, r.lb, r.ub, r.rel_gap, r.abs_gap, r.milp_seconds,
            r.cuts_added, r.cuts_rejected_parallel)) + "\n")
    return out.getvalue()


def parse_oicpa_trace(text: str) -> list[OicpaRound]:
    lines = [ln for ln in text.strip().splitlines() if ln]
    assert lines[0] == ",".join(OICPA_COLUMNS)
    rows = []
    for ln in lines[1:]:
        c = ln.split(",")
        rows.append(OicpaRound(int(c[0]), float(c[1]), float(c[2]), float(c[3]),
                               float(c[4]), float(c[5]), int(c[6]), int(c[7])))
    return rows


def ccg_log_csv(log: list[CcgIteration]) -> str:
    out = io.StringIO()
    out.write(",".join(CCG_COLUMNS) + "\n")
    for r in log:
        out.write(",".join(_fmt(v) for v in (
            r.iter, r.k_added, r.lb, r.master_runtime_s, r.master_nnz,
            r.ub, r.sub_runtime_s, r.gap)) + "\n")
    return out.getvalue()


def parse_ccg_log(text: str) -> list[CcgIteration]:
    lines = [ln for ln in text.strip().splitlines() if ln]
    assert lines[0] == ",".join(CCG_COLUMNS)
    rows = []
    for ln in lines[1:]:
        c = ln.split(",")
        rows.append(CcgIteration(int(c[0]), int(c[1]) if c[1] else None,
                                 float(c[2]), float(c[3]), int(c[4]),
                                 float(c[5]), float(c[6]), float(c[7])))
    return rows
