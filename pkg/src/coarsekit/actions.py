"""Quasi-actions of finite groups on finite generalized metric spaces.

A quasi-action is an ``(L, A)``-quasi-action when every element acts by an
``(L, A)``-quasi-isometry and

    d(rho(g) rho(h) x, rho(gh) x) <= A,    d(rho(e) x, x) <= A.

All the defects below are computed by exhaustive enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import (
    NotProductPreservingError,
    SpaceMismatchError,
    StructureError,
)
from .groups import FiniteGroup, SubgroupHandle
from .metric import INF, MetricSpace, Subset
from .quasimaps import (
    ProductDecomposition,
    QIReport,
    QuasiMap,
    _additive_constant,
    _pairwise_codomain_distance,
    qi_report,
    split_product_map,
)


class QuasiAction:
    """``images[g, x]`` is the position of ``rho(g)(x)``; rows follow ``group.elements``."""

    def __init__(self, group: FiniteGroup, space: MetricSpace, images):
        images = np.asarray(images, dtype=int)
        if images.shape != (len(group), len(space)):
            raise StructureError(
                f"expected one total map per element: shape {(len(group), len(space))}, "
                f"got {images.shape}"
            )
        if images.size and (images.min() < 0 or images.max() >= len(space)):
            raise StructureError("image outside the space")
        images.setflags(write=False)
        self.group = group
        self.space = space
        self.images = images

    @classmethod
    def from_maps(cls, group: FiniteGroup, space: MetricSpace,
                  maps: Mapping[Hashable, QuasiMap] | Sequence[QuasiMap]) -> "QuasiAction":
        if isinstance(maps, Mapping):
            maps = [maps[g] for g in group.elements]
        for m in maps:
            if not (m.domain.same_as(space) and m.codomain.same_as(space)):
                raise SpaceMismatchError("every map must be a self-map of the space")
        return cls(group, space, np.stack([m.assignment for m in maps]))

    @classmethod
    def trivial(cls, group: FiniteGroup, space: MetricSpace) -> "QuasiAction":
        return cls(group, space, np.tile(np.arange(len(space)), (len(group), 1)))

    def map(self, g: Hashable) -> QuasiMap:
        return QuasiMap(self.space, self.space, self.images[self.group.index(g)])

    @property
    def maps(self) -> tuple[QuasiMap, ...]:
        return tuple(QuasiMap(self.space, self.space, row) for row in self.images)

    def __call__(self, g: Hashable, pid: Hashable) -> Hashable:
        return self.space.points[self.images[self.group.index(g), self.space.index(pid)]]

    def __repr__(self) -> str:
        return f"<QuasiAction {self.group!r} on {self.space!r}>"


@dataclass(frozen=True)
class QAReport:
    L: float
    A: float  # worst per-element additive constant at L
    action_defect: float
    identity_defect: float
    density: float  # worst per-element coarse density
    embedding_ok: bool

    @property
    def A_qa(self) -> float:
        return max(self.A, self.action_defect, self.identity_defect)


@dataclass(frozen=True)
class ConjugacyWitness:
    carrier: QuasiMap
    defect: float
    carrier_report: QIReport


def _action_defect(rho: QuasiAction) -> float:
    G, img, d = rho.group, rho.images, rho.space.dist
    worst = 0.0
    for g in range(len(G)):
        # composed[h, x] = rho(g) rho(h) x  versus  rho(gh) x
        composed = img[g][img]
        direct = img[G.table[g]]
        worst = max(worst, float(d[composed, direct].max()))
    return worst


def _identity_defect(rho: QuasiAction) -> float:
    row = rho.images[rho.group.e]
    return float(rho.space.dist[row, np.arange(len(rho.space))].max())


def qa_constants(rho: QuasiAction, L: float = 1.0) -> QAReport:
    d = rho.space.dist
    A, density = 0.0, 0.0
    for row in rho.images:
        A = max(A, _additive_constant(d, d[np.ix_(row, row)], L))
        density = max(density, float(d[:, np.unique(row)].min(axis=1).max()))
    return QAReport(float(L), A, _action_defect(rho), _identity_defect(rho), density,
                    bool(np.isfinite(A)))


def quasi_orbit(rho: QuasiAction, y: Hashable) -> Subset:
    return Subset(rho.space, rho.images[:, rho.space.index(y)])


def orbit_members(rho: QuasiAction) -> list[tuple[int, ...]]:
    """Quasi-orbit of every point, as sorted position tuples."""
    return [tuple(sorted(set(col.tolist()))) for col in rho.images.T]


@dataclass(frozen=True)
class Coboundedness:
    C: float
    base: Hashable


def coboundedness(rho: QuasiAction) -> Coboundedness:
    """Smallest ``max_y d(y, O_b)`` over basepoints ``b`` (least id among minimizers)."""
    d = rho.space.dist
    best, arg = INF, 0
    for b, members in enumerate(orbit_members(rho)):
        c = float(d[:, list(members)].min(axis=1).max())
        if c < best:
            best, arg = c, b
    return Coboundedness(best, rho.space.points[arg])


def restrict(rho: QuasiAction, H: SubgroupHandle) -> QuasiAction:
    if not H.parent.same_as(rho.group):
        raise StructureError("H is not a subgroup of the acting group")
    return QuasiAction(H.group, rho.space, rho.images[list(H.members)])


def _align(rho: QuasiAction, other: QuasiAction) -> np.ndarray:
    """Rows of ``other.images`` reordered to follow ``rho.group.elements``."""
    if set(rho.group.elements) != set(other.group.elements):
        raise StructureError("the two quasi-actions are not of the same group")
    return other.images[[other.group.index(g) for g in rho.group.elements]]


def equivalence_defect(rho: QuasiAction, other: QuasiAction) -> float:
    if not rho.space.same_as(other.space):
        raise SpaceMismatchError("equivalence needs a common space")
    return float(rho.space.dist[rho.images, _align(rho, other)].max())


def conjugacy_defect(
    rho: QuasiAction, other: QuasiAction, f: QuasiMap, L: float = 1.0
) -> ConjugacyWitness:
    """``sup_{g,x} d(f(rho(g) x), rho'(g)(f x))`` for a carrier ``f: X -> X'``."""
    if not (f.domain.same_as(rho.space) and f.codomain.same_as(other.space)):
        raise SpaceMismatchError("the carrier must map the first space to the second")
    img2 = _align(rho, other)
    a = f.assignment
    lhs = a[rho.images]  # f(rho(g) x)
    rhs = img2[:, a]  # rho'(g)(f x)
    defect = float(_pairwise_codomain_distance(other.space, lhs.ravel(), rhs.ravel()).max())
    return ConjugacyWitness(f, defect, qi_report(f, L))


def isometry_defect(rho: QuasiAction) -> float:
    """Worst metric distortion, combined with the action and identity defects.

    Zero exactly when ``rho`` is a genuine isometric action; no tolerance.
    """
    d = rho.space.dist
    worst = 0.0
    for row in rho.images:
        moved = d[np.ix_(row, row)]
        same_inf = np.isinf(moved) & np.isinf(d)
        if (np.isinf(moved) != np.isinf(d)).any():
            return INF
        with np.errstate(invalid="ignore"):
            diff = np.where(same_inf, 0.0, np.abs(moved - d))
        worst = max(worst, float(diff.max()))
    return max(worst, _action_defect(rho), _identity_defect(rho))


@dataclass(frozen=True)
class PermutationAction:
    sigma: np.ndarray  # sigma[g, i]: where element g sends factor i
    decompositions: tuple[ProductDecomposition, ...]
    stabilizers: tuple[SubgroupHandle, ...]
    factor_actions: tuple[QuasiAction, ...]


def permutation_action(
    rho: QuasiAction, basepoints: Sequence[Hashable] | None, tau: float
) -> PermutationAction:
    """Factor permutations of a quasi-action on an L2 product, with stabilizer actions."""
    G = rho.group
    factors = rho.space.factors
    if factors is None:
        raise StructureError("the space is not a product")
    decomps = tuple(split_product_map(m, basepoints, tau) for m in rho.maps)
    sigma = np.array([d.sigma for d in decomps], dtype=int).reshape(len(G), len(factors))
    # sigma_{gh} = sigma_g o sigma_h
    if not np.array_equal(sigma[G.table], sigma[:, sigma]):
        g, h = np.argwhere((sigma[G.table] != sigma[:, sigma]).any(axis=2))[0]
        raise NotProductPreservingError(
            f"sigma of {G.elements[G.table[g, h]]!r} differs from the composite of "
            f"{G.elements[g]!r} and {G.elements[h]!r}"
        )
    stabs, actions = [], []
    for i, f in enumerate(factors):
        members = [g for g in range(len(G)) if sigma[g, i] == i]
        H = SubgroupHandle(G, members)
        stabs.append(H)
        rows = [decomps[g].factor_maps[i].assignment for g in H.members]
        actions.append(QuasiAction(H.group, f, np.stack(rows)))
    return PermutationAction(sigma, decomps, tuple(stabs), tuple(actions))
