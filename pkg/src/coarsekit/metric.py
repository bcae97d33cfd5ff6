"""Finite generalized metric spaces with distances in ``[0, inf]``.

Distances are stored as a dense float64 matrix with ``numpy.inf`` playing
the role of the infinite distance; ``inf + a == inf`` and ``inf > a`` come
for free from IEEE arithmetic. Points are opaque hashable ids, and the
position of a point in ``space.points`` is its canonical order: every
"least id" tie-break in the package means "least position".
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .config import get_epsilon, get_max_points
from .errors import CapExceededError, StructureError

INF = math.inf


class MetricSpace:
    """A finite set of points with a symmetric distance table.

    ``labels`` tags each point with the index of the part it came from
    (disjoint unions); ``parts`` and ``factors`` keep the constituent spaces
    of unions and L2 products. The distance table of a product is built
    lazily from its factors, so product spaces too large to tabulate can
    still be used by the factor-wise algorithms in :mod:`coarsekit.quasimaps`.
    """

    def __init__(
        self,
        points: Sequence[Hashable],
        dist=None,
        *,
        labels: Sequence[int] | None = None,
        parts: Sequence["MetricSpace"] | None = None,
        factors: Sequence["MetricSpace"] | None = None,
        name: str = "",
    ):
        self.points = tuple(points)
        self.index_of = {p: i for i, p in enumerate(self.points)}
        if len(self.index_of) != len(self.points):
            raise StructureError("duplicate point ids")
        self.labels = None if labels is None else np.asarray(labels, dtype=int)
        self.parts = None if parts is None else tuple(parts)
        self.factors = None if factors is None else tuple(factors)
        self.name = name
        if dist is None:
            if self.factors is None:
                raise StructureError("a distance table is required")
        else:
            self.__dict__["dist"] = _as_table(dist, len(self.points))

    @cached_property
    def dist(self) -> np.ndarray:
        # only products reach this: everything else sets the table eagerly
        n = len(self.points)
        if n > get_max_points():
            raise CapExceededError(
                f"product space has {n} points, above the cap {get_max_points()}"
            )
        sq = np.zeros((1, 1))
        for f in self.factors:
            m = len(f)
            sq = (sq[:, None, :, None] + (f.dist**2)[None, :, None, :]).reshape(
                sq.shape[0] * m, sq.shape[1] * m
            )
        table = np.sqrt(sq)
        table.setflags(write=False)
        return table

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        kind = "product" if self.factors else "union" if self.parts else "space"
        return f"<MetricSpace {self.name or kind} n={len(self)}>"

    def index(self, pid: Hashable) -> int:
        try:
            return self.index_of[pid]
        except KeyError:
            raise StructureError(f"unknown point id {pid!r}") from None

    def d(self, p: Hashable, q: Hashable) -> float:
        return float(self.dist[self.index(p), self.index(q)])

    def subset(self, ids: Iterable[Hashable]) -> "Subset":
        return Subset(self, [self.index(p) for p in ids])

    def same_as(self, other: "MetricSpace") -> bool:
        if self is other:
            return True
        if self.points != other.points:
            return False
        if self.factors is not None and other.factors is not None:
            return len(self.factors) == len(other.factors) and all(
                a.same_as(b) for a, b in zip(self.factors, other.factors)
            )
        return bool(np.array_equal(self.dist, other.dist))

    @cached_property
    def components(self) -> "ComponentPartition":
        return finite_components(self)

    @property
    def is_product(self) -> bool:
        return self.factors is not None

    @property
    def factor_sizes(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.factors)


def _as_table(dist, n: int) -> np.ndarray:
    table = np.array(dist, dtype=float)
    if table.ndim != 2 or table.shape != (n, n):
        raise StructureError(
            f"distance table has shape {table.shape}, expected ({n}, {n})"
        )
    table.setflags(write=False)
    return table


class Subset:
    """A nonempty set of points of a space, kept as sorted point positions."""

    __slots__ = ("space", "members")

    def __init__(self, space: MetricSpace, members: Iterable[int]):
        members = tuple(sorted(set(int(i) for i in members)))
        if not members:
            raise StructureError("subsets must be nonempty")
        if members[0] < 0 or members[-1] >= len(space):
            raise StructureError("subset member outside the space")
        self.space = space
        self.members = members

    @property
    def ids(self) -> tuple:
        return tuple(self.space.points[i] for i in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subset):
            return NotImplemented
        return self.space is other.space and self.members == other.members

    def __hash__(self) -> int:
        return hash(self.members)

    def __repr__(self) -> str:
        return f"Subset({list(self.ids)!r})"


@dataclass(frozen=True)
class ComponentPartition:
    blocks: tuple[tuple[int, ...], ...]
    label: np.ndarray  # block index of every point

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple

    def __str__(self) -> str:
        return f"{self.axiom} violated at {self.witness}"


def validate_metric(space: MetricSpace, eps: float | None = None) -> list[Violation]:
    """Check the generalized metric axioms; returns one witness per failed axiom.

    Witnesses are point ids and are the lexicographically least offenders.
    """
    eps = get_epsilon(eps)
    d = space.dist
    n = len(space)
    ids = space.points
    out: list[Violation] = []
    if np.isnan(d).any():
        i, j = np.argwhere(np.isnan(d))[0]
        out.append(Violation("nonnegativity", (ids[i], ids[j])))
    neg = np.argwhere(d < 0)
    if len(neg):
        i, j = neg[0]
        out.append(Violation("nonnegativity", (ids[i], ids[j])))
    diag = np.flatnonzero(np.abs(np.diag(d)) > eps)
    if len(diag):
        out.append(Violation("zero diagonal", (ids[diag[0]],)))
    with np.errstate(invalid="ignore"):
        asym = (d != d.T) & ~(np.abs(d - d.T) <= eps)
    if asym.any():
        i, j = np.argwhere(asym)[0]
        out.append(Violation("symmetry", (ids[i], ids[j])))
    off = ~np.eye(n, dtype=bool)
    close = off & (d <= eps)
    if close.any():
        i, j = np.argwhere(close)[0]
        out.append(Violation("positivity", (ids[i], ids[j])))
    for x in range(n):
        # bad[y, z]: d(x,z) > d(x,y) + d(y,z)
        bad = d[x][None, :] > d[x][:, None] + d + eps
        if bad.any():
            y, z = np.argwhere(bad)[0]
            out.append(Violation("triangle", (ids[x], ids[y], ids[z])))
            break
    return out


def is_metric(space: MetricSpace, eps: float | None = None) -> bool:
    return not validate_metric(space, eps)


def l2_product(factors: Sequence[MetricSpace]) -> MetricSpace:
    """Cartesian product with the L2 combination of factor distances.

    Point ids are tuples of factor ids in ``itertools.product`` order, so the
    position of a point is the row-major index of its factor positions.
    """
    factors = tuple(factors)
    if not factors:
        raise StructureError("a product needs at least one factor")
    for i, f in enumerate(factors):
        if np.isinf(f.dist).any():
            raise StructureError(f"factor {i} has infinite distances")
    points = list(itertools.product(*(f.points for f in factors)))
    return MetricSpace(points, None, factors=factors, name="product")


def disjoint_union(
    parts: Sequence[MetricSpace], names: Sequence[Hashable] | None = None
) -> MetricSpace:
    """Disjoint union; points are ``(name, pid)`` with ``name`` defaulting to the part index."""
    parts = tuple(parts)
    if not parts:
        raise StructureError("a disjoint union needs at least one part")
    names = tuple(range(len(parts))) if names is None else tuple(names)
    if len(names) != len(parts):
        raise StructureError("one name per part is required")
    sizes = [len(p) for p in parts]
    n = sum(sizes)
    table = np.full((n, n), INF)
    points, labels = [], []
    start = 0
    for k, (name, part) in enumerate(zip(names, parts)):
        stop = start + len(part)
        table[start:stop, start:stop] = part.dist
        points.extend((name, p) for p in part.points)
        labels.extend([k] * len(part))
        start = stop
    return MetricSpace(points, table, labels=labels, parts=parts, name="union")


def subspace(space: MetricSpace, members: Iterable[int], name: str = "") -> MetricSpace:
    """Restriction of the metric to the given point positions; ids are kept."""
    members = list(members)
    idx = np.asarray(members, dtype=int)
    return MetricSpace(
        [space.points[i] for i in members], space.dist[np.ix_(idx, idx)], name=name
    )


def finite_components(space: MetricSpace) -> ComponentPartition:
    """Classes of the finite-distance relation, ordered by least member."""
    finite = np.isfinite(space.dist)
    _, raw = connected_components(finite, directed=False)
    order: dict[int, int] = {}
    for r in raw:
        order.setdefault(int(r), len(order))
    label = np.array([order[int(r)] for r in raw], dtype=int)
    blocks = [[] for _ in order]
    for i, c in enumerate(label):
        blocks[c].append(i)
    return ComponentPartition(tuple(tuple(b) for b in blocks), label)


def set_distance(space: MetricSpace, x: Hashable, S: Subset) -> float:
    return float(space.dist[space.index(x), list(S.members)].min())


def hausdorff_distance(space: MetricSpace, S1: Subset, S2: Subset) -> float:
    block = space.dist[np.ix_(S1.members, S2.members)]
    return float(max(block.min(axis=1).max(), block.min(axis=0).max()))


def point_to_sets(space: MetricSpace, sets: Sequence[Sequence[int]]) -> np.ndarray:
    """Matrix ``P[y, k] = d(y, sets[k])`` over all points ``y``."""
    d = space.dist
    out = np.empty((len(space), len(sets)))
    for k, members in enumerate(sets):
        out[:, k] = d[:, list(members)].min(axis=1)
    return out


def cross_hausdorff(
    space: MetricSpace,
    family1: Sequence[Sequence[int]],
    family2: Sequence[Sequence[int]],
) -> np.ndarray:
    """Hausdorff distances ``H[i, j] = d_H(family1[i], family2[j])``."""
    p2 = point_to_sets(space, family2)
    p1 = point_to_sets(space, family1)
    # forward[i, j] = max_{y in family1[i]} d(y, family2[j])
    forward = np.array([p2[list(m)].max(axis=0) for m in family1]).reshape(
        len(family1), len(family2)
    )
    backward = np.array([p1[list(m)].max(axis=0) for m in family2]).reshape(
        len(family2), len(family1)
    )
    return np.maximum(forward, backward.T)


def hausdorff_matrix(space: MetricSpace, family: Sequence[Sequence[int]]) -> np.ndarray:
    p = point_to_sets(space, family)
    forward = np.array([p[list(m)].max(axis=0) for m in family]).reshape(
        len(family), len(family)
    )
    return np.maximum(forward, forward.T)


def quotient_by_zero_distance(
    pseudo: MetricSpace, eps: float | None = None
) -> tuple[MetricSpace, np.ndarray]:
    """Merge points at distance ``<= eps``.

    Returns the quotient space (ids are those of the class representatives,
    the least member of each class) and the projection as an array of
    quotient positions.
    """
    eps = get_epsilon(eps)
    near = pseudo.dist <= eps
    _, raw = connected_components(near, directed=False)
    order: dict[int, int] = {}
    reps: list[int] = []
    for i, r in enumerate(raw):
        if int(r) not in order:
            order[int(r)] = len(order)
            reps.append(i)
    projection = np.array([order[int(r)] for r in raw], dtype=int)
    idx = np.asarray(reps, dtype=int)
    quotient = MetricSpace(
        [pseudo.points[i] for i in reps], pseudo.dist[np.ix_(idx, idx)], name="quotient"
    )
    return quotient, projection


def diameter(space: MetricSpace) -> float:
    if space.factors is not None:
        return math.sqrt(sum(diameter(f) ** 2 for f in space.factors))
    return float(space.dist.max()) if len(space) else 0.0


def line_space(n: int, prefix: str = "p") -> MetricSpace:
    """Points ``p0 .. p{n-1}`` on a line with ``d(pi, pj) = |i - j|``."""
    pos = np.arange(n, dtype=float)
    return MetricSpace(
        [f"{prefix}{i}" for i in range(n)], np.abs(pos[:, None] - pos[None, :]),
        name=f"line{n}",
    )
