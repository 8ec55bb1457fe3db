"""Finite uncertainty set of line-outage trajectories and its application."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import UnknownLine
from .network import BusId, Line, NetworkCase

LineStatus = dict  # Line -> 0/1


@dataclass(frozen=True)
class TrajectorySet:
    """Outage lists, one per trajectory; index 0 is the implicit no-outage member."""

    disabled: tuple[tuple[Line, ...], ...] = ()

    @property
    def n_traj(self) -> int:
        return len(self.disabled)

    @staticmethod
    def from_lists(case: NetworkCase, lists: list[list[tuple]]) -> "TrajectorySet":
        """Resolve raw (n, m) pairs against the case, accepting either orientation."""
        canonical = {}
        for n, m in case.lines:
            canonical[(n, m)] = (n, m)
            canonical[(m, n)] = (n, m)
        resolved = []
        for k, lines in enumerate(lists, start=1):
            traj = []
            for pair in lines:
                key = (pair[0], pair[1])
                if key not in canonical:
                    raise UnknownLine(f"trajectory {k} disables unknown line {key}")
                line = canonical[key]
                if line in traj:
                    raise UnknownLine(f"trajectory {k} lists line {line} twice")
                traj.append(line)
            resolved.append(tuple(traj))
        return TrajectorySet(disabled=tuple(resolved))


@dataclass(frozen=True)
class ScenarioSelection:
    """At most one trajectory realizes; all-zero means no outage."""

    picks: tuple[int, ...]

    def __post_init__(self):
        if any(w not in (0, 1) for w in self.picks) or sum(self.picks) > 1:
            raise ValueError("selection must pick at most one trajectory")

    @property
    def scenario(self) -> int:
        for k, w in enumerate(self.picks, start=1):
            if w:
                return k
        return 0


def apply_trajectory(case: NetworkCase, ts: TrajectorySet, k: int) -> LineStatus:
    """Line-status vector under trajectory k; k=0 keeps every line on."""
    if not 0 <= k <= ts.n_traj:
        raise IndexError(f"trajectory index {k} out of range 0..{ts.n_traj}")
    status = {line: 1 for line in case.lines}
    if k > 0:
        for line in ts.disabled[k - 1]:
            status[line] = 0
    return status


def scenario_count(ts: TrajectorySet) -> int:
    """Number of members in the uncertainty set, the no-outage one included."""
    return ts.n_traj + 1


def islands(case: NetworkCase, status: LineStatus) -> list[set[BusId]]:
    """Connected components of the surviving network, in first-seen order."""
    alive: dict[BusId, list[BusId]] = {n: [] for n in case.buses}
    for (n, m), on in status.items():
        if on:
            alive[n].append(m)
            alive[m].append(n)
    seen: set[BusId] = set()
    parts: list[set[BusId]] = []
    for root in case.buses:
        if root in seen:
            continue
        comp = {root}
        stack = [root]
        while stack:
            cur = stack.pop()
            for nb in alive[cur]:
                if nb not in comp:
                    comp.add(nb)
                    stack.append(nb)
        seen |= comp
        parts.append(comp)
    return parts
