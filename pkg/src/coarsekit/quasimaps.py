"""Quasi-isometries between finite generalized metric spaces.

Convention: ``phi`` is an ``(L, A)``-quasi-isometric embedding when

    d(x, y) / L - A  <=  d(phi x, phi y)  <=  L d(x, y) + A

for all pairs, and a quasi-isometry when in addition its image is
``D``-dense for a finite ``D``. Constants are always computed for a given
``L``; only ``A`` and ``D`` are optimized.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import (
    AmbiguousDecompositionError,
    NoFiniteConstantError,
    SpaceMismatchError,
    StructureError,
)
from .metric import INF, MetricSpace, disjoint_union, l2_product


class QuasiMap:
    """A point map, stored as codomain positions indexed by domain position."""

    def __init__(self, domain: MetricSpace, codomain: MetricSpace, assignment):
        a = np.asarray(assignment, dtype=int)
        if a.shape != (len(domain),):
            raise StructureError("the assignment must be total on the domain")
        if len(a) and (a.min() < 0 or a.max() >= len(codomain)):
            raise StructureError("image outside the codomain")
        a.setflags(write=False)
        self.domain = domain
        self.codomain = codomain
        self.assignment = a

    @classmethod
    def from_dict(cls, domain: MetricSpace, codomain: MetricSpace,
                  mapping: Mapping[Hashable, Hashable]) -> "QuasiMap":
        missing = [p for p in domain.points if p not in mapping]
        if missing:
            raise StructureError(f"assignment is missing point {missing[0]!r}")
        return cls(domain, codomain, [codomain.index(mapping[p]) for p in domain.points])

    @classmethod
    def identity(cls, space: MetricSpace) -> "QuasiMap":
        return cls(space, space, np.arange(len(space)))

    def __call__(self, pid: Hashable) -> Hashable:
        return self.codomain.points[self.assignment[self.domain.index(pid)]]

    def as_dict(self) -> dict:
        return {p: self.codomain.points[q] for p, q in zip(self.domain.points, self.assignment)}

    @property
    def image(self) -> np.ndarray:
        return np.unique(self.assignment)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuasiMap):
            return NotImplemented
        return (
            self.domain.same_as(other.domain)
            and self.codomain.same_as(other.codomain)
            and np.array_equal(self.assignment, other.assignment)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"QuasiMap({self.as_dict()!r})"


@dataclass(frozen=True)
class QIReport:
    L: float
    A: float
    density: float
    embedding_ok: bool

    @property
    def is_quasi_isometry(self) -> bool:
        return self.embedding_ok and np.isfinite(self.density)


def _additive_constant(dx: np.ndarray, dy: np.ndarray, L: float) -> float:
    """Least A with dx/L - A <= dy <= L dx + A entrywise (INF-aware)."""
    inf_x, inf_y = np.isinf(dx), np.isinf(dy)
    if (inf_x != inf_y).any():
        return INF
    fin = ~inf_x
    if not fin.any():
        return 0.0
    x, y = dx[fin], dy[fin]
    worst = max(float((x / L - y).max()), float((y - L * x).max()))
    return max(worst, 0.0)


def qi_additive_constant(phi: QuasiMap, L: float = 1.0) -> float:
    """Minimal additive constant at multiplicative constant ``L`` (INF if none exists)."""
    if L < 1:
        raise ValueError("L must be >= 1")
    a = phi.assignment
    return _additive_constant(phi.domain.dist, phi.codomain.dist[np.ix_(a, a)], L)


def coarse_density(phi: QuasiMap) -> float:
    return float(phi.codomain.dist[:, phi.image].min(axis=1).max())


def qi_report(phi: QuasiMap, L: float = 1.0) -> QIReport:
    A = qi_additive_constant(phi, L)
    return QIReport(float(L), A, coarse_density(phi), bool(np.isfinite(A)))


def qi_sweep(phi: QuasiMap, Ls: Sequence[float]) -> list[QIReport]:
    """Reports over a grid of ``L`` values (informational only)."""
    return [qi_report(phi, L) for L in Ls]


def quasi_inverse(phi: QuasiMap) -> QuasiMap:
    """Send each codomain point to a domain point with nearest image (least id on ties)."""
    if not np.isfinite(coarse_density(phi)):
        raise NoFiniteConstantError("the image is not coarsely dense")
    # to_image[q, p] = d(q, phi p); argmin returns the first minimum
    to_image = phi.codomain.dist[:, phi.assignment]
    return QuasiMap(phi.codomain, phi.domain, to_image.argmin(axis=1))


def compose(phi2: QuasiMap, phi1: QuasiMap) -> QuasiMap:
    """``phi2 o phi1``."""
    if not phi1.codomain.same_as(phi2.domain):
        raise SpaceMismatchError("codomain of the first map is not the domain of the second")
    return QuasiMap(phi1.domain, phi2.codomain, phi2.assignment[phi1.assignment])


def pointwise_distance(phi: QuasiMap, psi: QuasiMap) -> float:
    """``sup_x d(phi x, psi x)`` for maps with the same domain and codomain."""
    return float(_pairwise_codomain_distance(phi.codomain, phi.assignment, psi.assignment).max())


def _pairwise_codomain_distance(space: MetricSpace, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if space.factors is None or "dist" in space.__dict__:
        return space.dist[a, b]
    # factor-wise for products too large to tabulate
    ca = np.unravel_index(a, space.factor_sizes)
    cb = np.unravel_index(b, space.factor_sizes)
    sq = np.zeros(len(a))
    for f, u, v in zip(space.factors, ca, cb):
        sq += f.dist[u, v] ** 2
    return np.sqrt(sq)


# -- products and disjoint unions ----------------------------------------


@dataclass(frozen=True, eq=False)
class ProductDecomposition:
    """``sigma[i]`` is the output factor of input factor ``i``; ``factor_maps[i]: X_i -> X'_sigma(i)``."""

    sigma: tuple[int, ...]
    factor_maps: tuple[QuasiMap, ...]
    defect: float = 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProductDecomposition):
            return NotImplemented
        return self.sigma == other.sigma and all(
            np.array_equal(a.assignment, b.assignment)
            for a, b in zip(self.factor_maps, other.factor_maps)
        ) and len(self.factor_maps) == len(other.factor_maps)

    __hash__ = None


def _require_product(space: MetricSpace, role: str) -> tuple[MetricSpace, ...]:
    if space.factors is None:
        raise StructureError(f"{role} is not a product space")
    return space.factors


def split_product_map(
    phi: QuasiMap, basepoints: Sequence[Hashable] | None, tau: float
) -> ProductDecomposition:
    """Read off the factor permutation and factor maps of a map between products.

    Coordinate ``i`` is swept over its factor with the others pinned at the
    basepoints; the output factor whose coordinate then spreads (diameter)
    by more than ``tau`` is ``sigma(i)``, and the slice is ``phi_i``.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    src = _require_product(phi.domain, "domain")
    dst = _require_product(phi.codomain, "codomain")
    if len(src) != len(dst):
        raise AmbiguousDecompositionError("domain and codomain have different factor counts")
    if basepoints is None:
        base = [0] * len(src)
    else:
        if len(basepoints) != len(src):
            raise StructureError("one basepoint per domain factor is required")
        base = [f.index(b) for f, b in zip(src, basepoints)]
    sizes = phi.domain.factor_sizes
    sigma, slices = [], []
    for i, f in enumerate(src):
        coords = [np.full(len(f), b) for b in base]
        coords[i] = np.arange(len(f))
        out = np.unravel_index(phi.assignment[np.ravel_multi_index(coords, sizes)],
                               phi.codomain.factor_sizes)
        spread = [float(g.dist[np.ix_(c, c)].max()) for g, c in zip(dst, out)]
        moving = [j for j, s in enumerate(spread) if s > tau]
        if len(moving) != 1:
            raise AmbiguousDecompositionError(
                f"factor {i}: {len(moving)} output factors vary by more than tau={tau} "
                f"(spreads {spread})"
            )
        j = moving[0]
        sigma.append(j)
        slices.append(QuasiMap(f, dst[j], out[j]))
    if sorted(sigma) != list(range(len(src))):
        raise AmbiguousDecompositionError(f"detected factor map {sigma} is not a permutation")
    assembled = assemble_product_map(sigma, slices, phi.domain, phi.codomain)
    defect = pointwise_distance(phi, assembled)
    return ProductDecomposition(tuple(sigma), tuple(slices), defect)


def assemble_product_map(
    sigma: Sequence[int],
    factor_maps: Sequence[QuasiMap],
    domain: MetricSpace | None = None,
    codomain: MetricSpace | None = None,
) -> QuasiMap:
    """The map ``(x_i) -> (phi_{sigma^-1(i)}(x_{sigma^-1(i)}))``."""
    sigma = list(sigma)
    n = len(sigma)
    if sorted(sigma) != list(range(n)) or len(factor_maps) != n:
        raise StructureError("sigma must be a permutation with one factor map per factor")
    inv = [0] * n
    for i, j in enumerate(sigma):
        inv[j] = i
    if domain is None:
        domain = l2_product([m.domain for m in factor_maps])
    if codomain is None:
        codomain = l2_product([factor_maps[inv[j]].codomain for j in range(n)])
    src = _require_product(domain, "domain")
    dst = _require_product(codomain, "codomain")
    for i, m in enumerate(factor_maps):
        if not m.domain.same_as(src[i]) or not m.codomain.same_as(dst[sigma[i]]):
            raise SpaceMismatchError(f"factor map {i} does not go X_{i} -> X'_{sigma[i]}")
    coords = np.unravel_index(np.arange(len(domain)), domain.factor_sizes)
    out = [factor_maps[inv[j]].assignment[coords[inv[j]]] for j in range(n)]
    return QuasiMap(domain, codomain, np.ravel_multi_index(out, codomain.factor_sizes))


def _offsets(space: MetricSpace) -> np.ndarray:
    return np.concatenate([[0], np.cumsum([len(p) for p in space.parts])])


def product_to_union(
    decomp: ProductDecomposition,
    domain: MetricSpace | None = None,
    codomain: MetricSpace | None = None,
) -> QuasiMap:
    """On part ``i`` apply ``phi_i``, landing in part ``sigma(i)``."""
    n = len(decomp.sigma)
    if domain is None:
        domain = disjoint_union([m.domain for m in decomp.factor_maps])
    if codomain is None:
        targets = [None] * n
        for i, j in enumerate(decomp.sigma):
            targets[j] = decomp.factor_maps[i].codomain
        codomain = disjoint_union(targets)
    if domain.parts is None or codomain.parts is None:
        raise StructureError("product_to_union needs disjoint unions")
    src_off, dst_off = _offsets(domain), _offsets(codomain)
    assignment = np.empty(len(domain), dtype=int)
    for i, (j, m) in enumerate(zip(decomp.sigma, decomp.factor_maps)):
        if not m.domain.same_as(domain.parts[i]) or not m.codomain.same_as(codomain.parts[j]):
            raise SpaceMismatchError(f"factor map {i} does not match the union parts")
        assignment[src_off[i]:src_off[i + 1]] = dst_off[j] + m.assignment
    return QuasiMap(domain, codomain, assignment)


def union_to_product(psi: QuasiMap) -> ProductDecomposition:
    """Inverse of :func:`product_to_union` for maps that send parts bijectively to parts."""
    if psi.domain.parts is None or psi.codomain.parts is None:
        raise StructureError("union_to_product needs maps between disjoint unions")
    src_off, dst_off = _offsets(psi.domain), _offsets(psi.codomain)
    target_label = psi.codomain.labels[psi.assignment]
    sigma, maps = [], []
    for i, part in enumerate(psi.domain.parts):
        hit = np.unique(target_label[src_off[i]:src_off[i + 1]])
        if len(hit) != 1:
            raise StructureError(f"part {i} is spread over parts {hit.tolist()}")
        j = int(hit[0])
        sigma.append(j)
        local = psi.assignment[src_off[i]:src_off[i + 1]] - dst_off[j]
        maps.append(QuasiMap(part, psi.codomain.parts[j], local))
    if sorted(sigma) != list(range(len(psi.codomain.parts))):
        raise StructureError(f"parts are merged or missed: {sigma}")
    return ProductDecomposition(tuple(sigma), tuple(maps), 0.0)
