"""Random instances: graph metrics, isometric actions and their perturbations.

Edge weights are multiples of 1/2, so shortest-path sums are exact in
binary floating point and the seed actions are isometric with no rounding.
"""
from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path

from .actions import QuasiAction
from .groups import FiniteGroup, SubgroupHandle, _closure
from .metric import MetricSpace
from .quasimaps import ProductDecomposition, QuasiMap

WEIGHTS = np.array([1.0, 1.5, 2.0, 2.5, 3.0])


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _graph_metric(W: np.ndarray) -> np.ndarray:
    W = np.minimum(W, W.T)
    np.fill_diagonal(W, np.inf)
    return shortest_path(csgraph_from_dense(W, null_value=np.inf), directed=False)


def random_space(seed, n: int, extra_edges: int | None = None, prefix: str = "x") -> MetricSpace:
    """Shortest-path metric of a random connected weighted graph on ``n`` points."""
    rng = _rng(seed)
    W = np.full((n, n), np.inf)
    order = rng.permutation(n)
    for a, b in zip(order[:-1], order[1:]):  # spanning path
        W[a, b] = rng.choice(WEIGHTS)
    for _ in range(n if extra_edges is None else extra_edges):
        a, b = rng.integers(n, size=2)
        if a != b:
            W[a, b] = min(W[a, b], rng.choice(WEIGHTS))
    return MetricSpace([f"{prefix}{i}" for i in range(n)], _graph_metric(W), name="random")


def isometric_action(seed, G: FiniteGroup, size: int) -> QuasiAction:
    """A genuine isometric action of ``G`` on a random invariant graph metric.

    The space is ``G x {0..k-1}`` (``G`` acting by left translation) plus
    ``size - k|G|`` fixed points; with ``k = 0`` every point is fixed.
    """
    rng = _rng(seed)
    m = len(G)
    k, r = divmod(size, m)
    n = k * m + r
    W = np.full((n, n), np.inf)

    def free(a, i):
        return i * m + a

    def add_orbit(p_of_a, q_of_a, w):
        for a in range(m):
            p, q = p_of_a(a), q_of_a(a)
            if p != q:
                W[p, q] = min(W[p, q], w)

    if k:
        # a random generating set, edges a -- a*s inside each layer
        gens = []
        while _closure(G, gens) != frozenset(range(m)):
            gens.append(int(rng.integers(m)))
        for i in range(k):
            for s in gens:
                add_orbit(lambda a, i=i: free(a, i), lambda a, i=i, s=s: free(int(G.table[a, s]), i),
                          rng.choice(WEIGHTS))
        for i in range(k - 1):
            add_orbit(lambda a, i=i: free(a, i), lambda a, i=i: free(a, i + 1), rng.choice(WEIGHTS))
        for _ in range(k):
            i, j = rng.integers(k, size=2)
            s = int(rng.integers(m))
            add_orbit(lambda a, i=i: free(a, i), lambda a, j=j, s=s: free(int(G.table[a, s]), j),
                      rng.choice(WEIGHTS))
    for f in range(r):
        p = k * m + f
        if k:
            w = rng.choice(WEIGHTS)
            for a in range(m):
                W[p, free(a, 0)] = w
        elif f:
            W[p, p - 1] = rng.choice(WEIGHTS)
    for _ in range(r):
        a, b = rng.integers(r, size=2)
        if a != b:
            W[k * m + a, k * m + b] = rng.choice(WEIGHTS)
    points = [f"x{i}_{a}" for i in range(k) for a in range(m)] + [f"f{j}" for j in range(r)]
    space = MetricSpace(points, _graph_metric(W), name="invariant")
    images = np.empty((m, n), dtype=int)
    for h in range(m):
        for i in range(k):
            images[h, i * m:(i + 1) * m] = i * m + G.table[h]
        images[h, k * m:] = np.arange(k * m, n)
    return QuasiAction(G, space, images)


def perturb(seed, rho: QuasiAction, radius: float) -> QuasiAction:
    """Move every non-identity image to a uniform random point within ``radius``."""
    rng = _rng(seed)
    d = rho.space.dist
    images = np.array(rho.images)
    for g in range(len(rho.group)):
        if g == rho.group.e:
            continue
        for x in range(len(rho.space)):
            near = np.flatnonzero(d[images[g, x]] <= radius)
            images[g, x] = rng.choice(near)
    return QuasiAction(rho.group, rho.space, images)


def generate_random_action(seed, size: int, group: FiniteGroup, L: float = 1.0,
                           A: float = 0.0) -> QuasiAction:
    """Isometric seed action perturbed within radius ``A / 2``.

    ``L`` is only the probe constant at which callers are expected to
    measure the result; the realized constants are computed, not assumed.
    """
    rng = _rng(seed)
    rho = isometric_action(rng, group, size)
    return perturb(rng, rho, A / 2) if A > 0 else rho


def random_fibration(seed, space: MetricSpace, count: int | None = None) -> list[tuple[int, ...]]:
    """Random nonempty subsets; together they cover the space."""
    rng = _rng(seed)
    n = len(space)
    count = count or max(1, n // 3)
    owner = rng.integers(count, size=n)
    fibers = [set(np.flatnonzero(owner == c).tolist()) for c in range(count)]
    for f in fibers:
        f.add(int(rng.integers(n)))
        if rng.random() < 0.5:
            f.add(int(rng.integers(n)))
    return [tuple(sorted(f)) for f in fibers]


def random_decomposition(seed, factors: int, max_size: int = 5) -> ProductDecomposition:
    """Random factor spaces, a random permutation and arbitrary factor maps."""
    rng = _rng(seed)
    sizes = rng.integers(1, max_size + 1, size=factors)
    sigma = rng.permutation(factors)
    sources = [random_space(rng, int(s), prefix=f"a{i}_") for i, s in enumerate(sizes)]
    targets = [None] * factors
    for i, j in enumerate(sigma):
        targets[j] = random_space(rng, int(rng.integers(1, max_size + 1)), prefix=f"b{j}_")
    maps = tuple(
        QuasiMap(sources[i], targets[j], rng.integers(len(targets[j]), size=len(sources[i])))
        for i, j in enumerate(sigma)
    )
    return ProductDecomposition(tuple(int(j) for j in sigma), maps, 0.0)


def random_subgroup(seed, G: FiniteGroup) -> SubgroupHandle:
    rng = _rng(seed)
    gens = rng.integers(len(G), size=int(rng.integers(1, 3)))
    return SubgroupHandle(G, _closure(G, gens.tolist()))
