"""Deterministic instance families shared by the induction and acceptance tests."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from coarsekit import QuasiAction, QuasiMap, SubgroupHandle, all_subgroups, small_groups
from coarsekit.generate import isometric_action, perturb
from coarsekit.induction import component_space

ORDERS = (2, 4, 6, 8, 12)
RADIUS = 1.0


@dataclass(frozen=True)
class Case:
    label: str
    G: object
    H: SubgroupHandle
    alpha: QuasiAction
    isometric: bool


def induction_cases(seed: int = 2024) -> list[Case]:
    """Every group of order 2, 4, 6, 8, 12, every subgroup, isometric and perturbed alpha.

    ``|X| = |H| + 1`` keeps one free orbit plus a fixed point, so the action
    is faithful and the product form stays small.
    """
    out = []
    for name, G in small_groups().items():
        if len(G) not in ORDERS:
            continue
        for k, H in enumerate(all_subgroups(G)):
            rng = np.random.default_rng([seed, len(G), k, sum(map(ord, name))])
            iso = isometric_action(rng, H.group, len(H) + 1)
            out.append(Case(f"{name}/{k}/iso", G, H, iso, True))
            out.append(Case(f"{name}/{k}/pert", G, H, perturb(rng, iso, RADIUS), False))
    return out


def isometrize_cases(seed: int = 99) -> list[tuple[str, QuasiAction, bool]]:
    """Actions of whole groups: isometric and perturbed at two radii, two sizes."""
    out = []
    for name, G in small_groups().items():
        for size in (len(G) + 1, 2 * len(G) + 3):
            rng = np.random.default_rng([seed, len(G), size, sum(map(ord, name))])
            iso = isometric_action(rng, G, size)
            out.append((f"{name}/{size}/iso", iso, True))
            for r in (1.0, 2.0):
                out.append((f"{name}/{size}/r{r}", perturb(rng, iso, r), False))
    return out


def orbit_class_map(b1, b2, carrier):
    """``[O_(g, x)] -> [O'_(g, carrier(x))]`` on the identity-coset components."""
    c1 = int(b1.cosets.coset_of[b1.G.e])
    Z1, blk1 = component_space(b1, c1)
    Z2, blk2 = component_space(b2, int(b2.cosets.coset_of[b2.G.e]))
    target = {}
    for g in b1.cosets.cosets[c1]:
        for x in range(b1.n):
            k = b1.orbit_class(b1.G.elements[g], x)
            target.setdefault(k, b2.orbit_class(b1.G.elements[g], carrier[x]))
    local2 = {int(p): i for i, p in enumerate(blk2)}
    return QuasiMap(Z1, Z2, [local2[target[int(p)]] for p in blk1])
