"""Supporting-hyperplane cuts for the two cone families, with a parallelism
filter so the pool never accumulates near-duplicates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constraints import Key, SocRow
from .errors import DegeneratePoint


@dataclass
class Cut:
    tag: Key              # cone row the cut supports
    kind: str             # "capacity" | "soc"
    coeffs: dict          # unit-norm coefficient vector over named variables
    rhs: float
    uid: int = -1
    round_added: int = -1

    def violation(self, point: dict) -> float:
        return sum(c * point[k] for k, c in self.coeffs.items()) - self.rhs


def _normalize(coeffs: dict, rhs: float) -> tuple[dict, float]:
    norm = math.sqrt(sum(c * c for c in coeffs.values()))
    if norm < 1e-12:
        raise DegeneratePoint("cut coefficients vanish")
    return {k: c / norm for k, c in coeffs.items() if c != 0.0}, rhs / norm


def capacity_cut(p_bar: float, q_bar: float, cap: float,
                 p_key: Key, q_key: Key, tag: Key) -> Cut:
    """Half-plane p_bar*p + q_bar*q <= cap * ||(p_bar, q_bar)||.

    Valid for every point of the disc ||(p, q)|| <= cap by Cauchy-Schwarz and
    separates the generating point whenever it lies outside.
    """
    norm = math.hypot(p_bar, q_bar)
    if norm < 1e-12:
        raise DegeneratePoint("capacity cut needs a nonzero flow point")
    coeffs, rhs = _normalize({p_key: p_bar, q_key: q_bar}, cap * norm)
    return Cut(tag, "capacity", coeffs, rhs)


def soc_cut(c_bar: float, s_bar: float, cnn_bar: float, cmm_bar: float,
            c_key: Key, s_key: Key, cnn_key: Key, cmm_key: Key, tag: Key,
            variant: str = "adaptive") -> Cut:
    """Linear cut for the rotated cone c^2 + s^2 <= cnn * cmm.

    Variant "paper" scales by the norm of (2c_bar, 2s_bar, cnn_bar, cmm_bar);
    "tight" replaces the last two entries with their difference, which is the
    exact supporting hyperplane. Both are valid whenever the voltage-product
    components are nonnegative, since either constant dominates the norm of
    (2c_bar, 2s_bar, cnn_bar - cmm_bar) -- but the "paper" constant can fail
    to separate its own generating point (the cut degenerates when the ratio
    of lifted norm to cnn_bar + cmm_bar is below about 1.37), which stalls
    the cutting loop. The default therefore keeps the "paper" constant when
    its cut separates and falls back to "tight" when it cannot.
    """
    if max(abs(c_bar), abs(s_bar), abs(cnn_bar), abs(cmm_bar)) < 1e-12:
        raise DegeneratePoint("cone cut needs a nonzero point")
    delta = cnn_bar - cmm_bar

    def build(n0: float) -> Cut:
        coeffs = {c_key: 4 * c_bar, s_key: 4 * s_bar,
                  cnn_key: delta - n0, cmm_key: -(delta + n0)}
        coeffs, rhs = _normalize(coeffs, 0.0)
        return Cut(tag, "soc", coeffs, rhs)

    tight_n0 = math.sqrt(4 * c_bar ** 2 + 4 * s_bar ** 2 + delta ** 2)
    paper_n0 = math.sqrt(4 * c_bar ** 2 + 4 * s_bar ** 2
                         + cnn_bar ** 2 + cmm_bar ** 2)
    if variant == "tight":
        return build(tight_n0)
    cut = build(paper_n0)
    if variant == "paper":
        return cut
    if variant != "adaptive":
        raise ValueError(f"unknown cut variant {variant!r}")
    point = {c_key: c_bar, s_key: s_bar, cnn_key: cnn_bar, cmm_key: cmm_bar}
    if cut.violation(point) > 1e-12:
        return cut
    return build(tight_n0)


def cosine(a: Cut, b: Cut) -> float:
    keys = set(a.coeffs) | set(b.coeffs)
    dot = sum(a.coeffs.get(k, 0.0) * b.coeffs.get(k, 0.0) for k in keys)
    na = math.sqrt(sum(c * c for c in a.coeffs.values()))
    nb = math.sqrt(sum(c * c for c in b.coeffs.values()))
    return dot / (na * nb)


def is_parallel(a: Cut, b: Cut, eps_par: float) -> bool:
    """True when the angle between the cuts is too small to keep both.

    The boundary itself is kept: a cosine of exactly 1 - eps_par is accepted.
    """
    return cosine(a, b) > 1.0 - eps_par


class CutPool:
    """Cuts grouped by originating cone row, deduplicated by angle."""

    def __init__(self, eps_par: float = 0.5e-5):
        self.eps_par = eps_par
        self.groups: dict[Key, list[Cut]] = {}
        self._next_uid = 0

    def __len__(self) -> int:
        return sum(len(g) for g in self.groups.values())

    def all(self) -> list[Cut]:
        return [c for g in self.groups.values() for c in g]

    def add(self, cut: Cut, round_added: int = -1) -> bool:
        group = self.groups.setdefault(cut.tag, [])
        for existing in group:
            if is_parallel(cut, existing, self.eps_par):
                return False
        cut.uid = self._next_uid
        cut.round_added = round_added
        self._next_uid += 1
        group.append(cut)
        return True


def cone_violation(cone: SocRow, point: dict) -> float:
    """Constraint residual in the natural units of each cone family.

    Capacity cones report p^2 + q^2 - cap^2; voltage-product cones report
    c^2 + s^2 - cnn*cmm, i.e. a quarter of the residual of the lifted form.
    """
    head = point[cone.head]
    sq = sum(point[k] ** 2 for k in cone.tail)
    resid = sq - head ** 2
    return resid / 4.0 if cone.kind == "soc" else resid


def detect_violations(point: dict, cones: dict, eps_tol: float, family: str,
                      restrict: set | None = None) -> list[tuple[Key, float]]:
    """Cone rows violated beyond eps_tol, most violated first.

    ``restrict`` implements the active-set scope: only the listed cone rows
    are examined (rows binding at the latest inner solution).
    """
    found = []
    for key, cone in cones.items():
        if cone.kind != family:
            continue
        if restrict is not None and key not in restrict:
            continue
        v = cone_violation(cone, point)
        if v > eps_tol:
            found.append((key, v))
    found.sort(key=lambda kv: (-kv[1], str(kv[0])))
    return found


def select_most_violated(found: list, p_cut: float) -> list:
    """Keep the top ceil(p_cut * count) entries of a ranked violation list."""
    if not found:
        return []
    keep = math.ceil(p_cut * len(found))
    return found[:keep]
