"""Coarse fibrations, their Hausdorff-metric base spaces, and descent.

An ``(L, A)``-coarse fibration of ``Y`` is a family of subsets whose union
is ``A``-dense and which satisfies, for every pair of fibers ``F1, F2``,

    d_H(F1, F2) <= L d(y1, F2) + A    for all y1 in F1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .actions import QAReport, QuasiAction, orbit_members, qa_constants
from .config import get_epsilon
from .errors import CertificateError, NoFiniteConstantError, SpaceMismatchError, StructureError
from .metric import (
    MetricSpace,
    Subset,
    cross_hausdorff,
    hausdorff_matrix,
    point_to_sets,
    quotient_by_zero_distance,
)
from .quasimaps import QIReport, QuasiMap, qi_report


class CoarseFibration:
    def __init__(self, total: MetricSpace, fibers: Sequence[Subset]):
        fibers = tuple(fibers)
        if not fibers:
            raise StructureError("a coarse fibration needs at least one fiber")
        for F in fibers:
            if F.space is not total and not F.space.same_as(total):
                raise SpaceMismatchError("fiber is not a subset of the total space")
        self.total = total
        self.fibers = fibers

    @classmethod
    def from_ids(cls, total: MetricSpace, fibers) -> "CoarseFibration":
        return cls(total, [total.subset(f) for f in fibers])

    @property
    def members(self) -> list[tuple[int, ...]]:
        return [F.members for F in self.fibers]

    def __len__(self) -> int:
        return len(self.fibers)

    def __repr__(self) -> str:
        return f"<CoarseFibration {len(self)} fibers of {self.total!r}>"


@dataclass(frozen=True)
class FibrationReport:
    L: float
    A1: float  # union of fibers vs Y
    A2: float  # pairwise condition
    A: float


def _pair_condition(dH: np.ndarray, setdist: np.ndarray, L: float) -> float:
    both_inf = np.isinf(dH) & np.isinf(setdist)
    with np.errstate(invalid="ignore"):
        excess = np.where(both_inf, 0.0, dH - L * setdist)
    return max(float(excess.max()), 0.0)


def fibration_constants(total: MetricSpace, fibers: Sequence[Subset], L: float = 1.0
                        ) -> FibrationReport:
    """Minimal constants for both fibration conditions at multiplicative constant ``L``."""
    fib = CoarseFibration(total, fibers)
    members = fib.members
    covered = sorted(set().union(*members))
    A1 = float(total.dist[:, covered].min(axis=1).max())
    P = point_to_sets(total, members)  # P[y, k] = d(y, F_k)
    # the worst y1 in F1 is the one closest to F2
    nearest = np.array([P[list(m)].min(axis=0) for m in members])
    farthest = np.array([P[list(m)].max(axis=0) for m in members])
    dH = np.maximum(farthest, farthest.T)
    A2 = _pair_condition(dH, nearest, L)
    return FibrationReport(float(L), A1, A2, max(A1, A2))


@dataclass(frozen=True)
class OrbitFibration:
    fibration: CoarseFibration
    report: FibrationReport
    action_report: QAReport
    fiber_of: np.ndarray  # fiber index of O_y for every point y

    def __iter__(self):
        return iter((self.fibration, self.report))


def orbit_fibration(rho: QuasiAction, L: float = 1.0, eps: float | None = None,
                    check: bool = True) -> OrbitFibration:
    """Distinct quasi-orbits as fibers, with the ``3 A`` certificate checked."""
    eps = get_epsilon(eps)
    seen: dict[tuple[int, ...], int] = {}
    fiber_of = []
    for orbit in orbit_members(rho):
        fiber_of.append(seen.setdefault(orbit, len(seen)))
    fibers = [Subset(rho.space, m) for m in seen]
    report = fibration_constants(rho.space, fibers, L)
    qa = qa_constants(rho, L)
    if check and np.isfinite(qa.A_qa) and report.A > 3 * qa.A_qa + eps:
        raise CertificateError(
            f"quasi-orbit fibration constant {report.A} exceeds 3 * {qa.A_qa}"
        )
    return OrbitFibration(CoarseFibration(rho.space, fibers), report, qa,
                          np.asarray(fiber_of, dtype=int))


@dataclass(frozen=True)
class FiberSpace:
    """Fibers up to Hausdorff distance zero, with the Hausdorff metric.

    ``projection[k]`` is the base point of fiber ``k`` of the original
    family; base point ids are the index of their representative fiber.
    """

    fibration: CoarseFibration
    base: MetricSpace
    projection: np.ndarray
    representatives: tuple[int, ...]

    def fiber(self, b: int) -> Subset:
        return self.fibration.fibers[self.representatives[b]]


def fiber_space(fibration: CoarseFibration, eps: float | None = None) -> FiberSpace:
    distinct: dict[tuple[int, ...], int] = {}
    first = []
    for k, m in enumerate(fibration.members):
        if m not in distinct:
            distinct[m] = len(distinct)
            first.append(k)
    dedup = np.array([distinct[m] for m in fibration.members], dtype=int)
    dH = hausdorff_matrix(fibration.total, list(distinct))
    pseudo = MetricSpace(first, dH, name="fibers")
    base, proj = quotient_by_zero_distance(pseudo, eps)
    base.name = "base"
    return FiberSpace(fibration, base, proj[dedup], tuple(base.points))


@dataclass(frozen=True)
class RespectReport:
    C: float
    assignment: np.ndarray  # nearest target fiber for every source fiber
    distances: np.ndarray  # d_H(phi(F), F') for all pairs


def quasi_respect_defect(
    phi: QuasiMap, source: CoarseFibration, target: CoarseFibration
) -> RespectReport:
    if not phi.domain.same_as(source.total) or not phi.codomain.same_as(target.total):
        raise SpaceMismatchError("fibrations do not live on the map's spaces")
    a = phi.assignment
    images = [tuple(sorted(set(a[list(m)].tolist()))) for m in source.members]
    dist = cross_hausdorff(phi.codomain, images, target.members)
    nearest = dist.argmin(axis=1)
    C = float(dist[np.arange(len(images)), nearest].max())
    return RespectReport(C, nearest, dist)


@dataclass(frozen=True)
class DescendedMap:
    map: QuasiMap
    C: float
    source_report: QIReport
    report: QIReport

    @property
    def bound(self) -> float:
        return self.source_report.A + 2 * self.C


def _descend(phi: QuasiMap, src: FiberSpace, dst: FiberSpace, respect: RespectReport) -> QuasiMap:
    targets = dst.projection[respect.assignment[list(src.representatives)]]
    return QuasiMap(src.base, dst.base, targets)


def descend_map(
    phi: QuasiMap,
    source: CoarseFibration | FiberSpace,
    target: CoarseFibration | FiberSpace,
    L: float = 1.0,
    eps: float | None = None,
    check: bool = True,
) -> DescendedMap:
    """Induced map of fiber spaces, checked against the ``A + 2C`` bound."""
    eps = get_epsilon(eps)
    src = source if isinstance(source, FiberSpace) else fiber_space(source, eps)
    dst = target if isinstance(target, FiberSpace) else fiber_space(target, eps)
    respect = quasi_respect_defect(phi, src.fibration, dst.fibration)
    if not np.isfinite(respect.C):
        raise NoFiniteConstantError("the map does not quasi-respect the fibrations")
    bar = _descend(phi, src, dst, respect)
    out = DescendedMap(bar, respect.C, qi_report(phi, L), qi_report(bar, L))
    if check and out.source_report.embedding_ok and out.report.A > out.bound + eps:
        raise CertificateError(f"descended constant {out.report.A} exceeds A + 2C = {out.bound}")
    return out


@dataclass(frozen=True)
class DescendedAction:
    action: QuasiAction
    report: QAReport
    C: float
    element_maps: tuple[DescendedMap, ...]
    choice_spread: float  # worst base distance between admissible fiber choices


def descend_action(
    rho: QuasiAction,
    fibration: CoarseFibration | FiberSpace,
    L: float = 1.0,
    eps: float | None = None,
    check: bool = True,
) -> DescendedAction:
    eps = get_epsilon(eps)
    fs = fibration if isinstance(fibration, FiberSpace) else fiber_space(fibration, eps)
    fib = fs.fibration
    respects = [quasi_respect_defect(m, fib, fib) for m in rho.maps]
    C = max(r.C for r in respects)
    if not np.isfinite(C):
        raise NoFiniteConstantError("some element does not quasi-respect the fibration")
    elements = []
    spread = 0.0
    d = fs.base.dist
    for m, r in zip(rho.maps, respects):
        bar = _descend(m, fs, fs, r)
        dm = DescendedMap(bar, r.C, qi_report(m, L), qi_report(bar, L))
        if check and dm.source_report.embedding_ok and dm.report.A > dm.bound + eps:
            raise CertificateError(
                f"descended constant {dm.report.A} exceeds A + 2C = {dm.bound}"
            )
        elements.append(dm)
        for k in fs.representatives:
            ok = np.unique(fs.projection[np.flatnonzero(r.distances[k] <= C + eps)])
            if len(ok) > 1:
                spread = max(spread, float(d[np.ix_(ok, ok)].max()))
    if check and spread > 2 * C + eps:
        raise CertificateError(f"admissible descents differ by {spread} > 2C = {2 * C}")
    action = QuasiAction(rho.group, fs.base, np.stack([e.map.assignment for e in elements]))
    return DescendedAction(action, qa_constants(action, L), C, tuple(elements), spread)
