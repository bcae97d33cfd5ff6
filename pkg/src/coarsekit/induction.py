"""Induced quasi-actions.

Given ``H <= G`` and a quasi-action ``alpha`` of ``H`` on ``X``, the bundle
space is ``Y = G x X`` (one copy of ``X`` per element, copies at infinite
distance) with

    rho_H(h)(g, x) = (g h^-1, alpha(h) x),     left_G(k)(g, x) = (k g, x).

``left_G`` is an isometric action commuting with ``rho_H``, so it descends
to an isometric action of ``G`` on the space of ``rho_H``-quasi-orbits. That
descended action is the induced quasi-action, in its disjoint-union form;
:func:`induced_product_form` converts it into an action on a product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from .actions import (
    ConjugacyWitness,
    PermutationAction,
    QAReport,
    QuasiAction,
    conjugacy_defect,
    permutation_action,
    qa_constants,
)
from .config import get_epsilon, get_max_points
from .errors import (
    AmbiguousDecompositionError,
    CapExceededError,
    CertificateError,
    NotASubgroupError,
    StructureError,
)
from .fibrations import (
    DescendedAction,
    FiberSpace,
    OrbitFibration,
    descend_action,
    fiber_space,
    orbit_fibration,
)
from .groups import (
    CosetSpace,
    FiniteGroup,
    SubgroupHandle,
    coset_action,
    left_cosets,
)
from .metric import MetricSpace, diameter, disjoint_union, finite_components, l2_product, subspace
from .quasimaps import (
    ProductDecomposition,
    QIReport,
    QuasiMap,
    assemble_product_map,
    qi_report,
    union_to_product,
)


def _check_subgroup_action(G: FiniteGroup, H: SubgroupHandle, alpha: QuasiAction) -> None:
    if not H.parent.same_as(G):
        raise NotASubgroupError("H is not a subgroup handle of G")
    A = alpha.group
    if set(A.elements) != set(H.ids):
        raise NotASubgroupError("alpha is not a quasi-action of H")
    pos = np.array([G.index(a) for a in A.elements])
    if not np.array_equal(pos[A.table], G.table[np.ix_(pos, pos)]):
        raise NotASubgroupError("alpha's group law differs from the one of G")


def build_bundle_space(
    G: FiniteGroup, H: SubgroupHandle, alpha: QuasiAction, cap: int | None = None
) -> tuple[MetricSpace, QuasiAction, QuasiAction]:
    """``(Y, rho_H, left_G)``; the point ``(g, x)`` sits at position ``g * |X| + x``."""
    _check_subgroup_action(G, H, alpha)
    X = alpha.space
    n = len(X)
    if len(G) * n > get_max_points(cap):
        raise CapExceededError(
            f"bundle space would have {len(G) * n} points, above the cap {get_max_points(cap)}"
        )
    Y = disjoint_union([X] * len(G), names=G.elements)
    Y.name = "bundle"
    rows = []
    for k, h in enumerate(alpha.group.elements):
        h_inv = G.inv[G.index(h)]
        rows.append((G.table[:, h_inv][:, None] * n + alpha.images[k][None, :]).ravel())
    rhoH = QuasiAction(alpha.group, Y, np.stack(rows))
    left = (G.table[:, :, None] * n + np.arange(n)[None, None, :]).reshape(len(G), -1)
    leftG = QuasiAction(G, Y, left)
    return Y, rhoH, leftG


@dataclass(frozen=True)
class ComponentCosetMap:
    component_to_coset: tuple[int, ...]
    coset_to_component: tuple[int, ...]


@dataclass
class InducedBundle:
    G: FiniteGroup
    H: SubgroupHandle
    alpha: QuasiAction
    L: float
    alpha_report: QAReport
    Y: MetricSpace
    rhoH: QuasiAction
    leftG: QuasiAction
    orbits: OrbitFibration
    base: FiberSpace
    beta: DescendedAction
    cosets: CosetSpace
    coset_perm: np.ndarray
    coset_map: ComponentCosetMap | None = None
    restriction_witness: ConjugacyWitness | None = None
    eps: float = field(default=1e-9, repr=False)

    @property
    def FH(self):
        return self.orbits.fibration

    @property
    def beta_hat(self) -> QuasiAction:
        return self.beta.action

    @property
    def n(self) -> int:
        return len(self.alpha.space)

    def orbit_class(self, g: Hashable, x: int) -> int:
        """Base position of the quasi-orbit through ``(g, x)`` (``x`` a position in X)."""
        y = self.G.index(g) * self.n + x
        return int(self.base.projection[self.orbits.fiber_of[y]])


def induce(
    G: FiniteGroup,
    H: SubgroupHandle,
    alpha: QuasiAction,
    L: float = 1.0,
    eps: float | None = None,
    cap: int | None = None,
) -> InducedBundle:
    eps = get_epsilon(eps)
    Y, rhoH, leftG = build_bundle_space(G, H, alpha, cap)
    orbits = orbit_fibration(rhoH, L, eps)
    base = fiber_space(orbits.fibration, eps)
    beta = descend_action(leftG, base, L, eps)
    cosets = left_cosets(G, H)
    bundle = InducedBundle(
        G, H, alpha, float(L), qa_constants(alpha, L), Y, rhoH, leftG, orbits, base, beta,
        cosets, coset_action(G, cosets), eps=eps,
    )
    bundle.coset_map = component_coset_map(bundle)
    bundle.restriction_witness = restriction_conjugacy(bundle)
    return bundle


def commutation_failures(bundle: InducedBundle) -> int:
    """Number of ``(k, h, p)`` with ``left(k) rho(h) p != rho(h) left(k) p``."""
    lg, rh = bundle.leftG.images, bundle.rhoH.images
    bad = 0
    for k in range(len(lg)):
        bad += int((lg[k][rh] != rh[:, lg[k]]).sum())
    return bad


def component_coset_map(bundle: InducedBundle) -> ComponentCosetMap:
    """Match base components with left cosets and check the actions agree."""
    comps = finite_components(bundle.base.base)
    fibers = bundle.FH.members
    members_of: list[set[int]] = [set() for _ in range(len(bundle.base.base))]
    for k, m in enumerate(fibers):
        members_of[bundle.base.projection[k]].update(m)
    comp_to_coset = []
    for block in comps.blocks:
        ys = set().union(*(members_of[b] for b in block))
        hit = {int(bundle.cosets.coset_of[y // bundle.n]) for y in ys}
        if len(hit) != 1:
            raise CertificateError(f"base component meets cosets {sorted(hit)}")
        comp_to_coset.append(hit.pop())
    if sorted(comp_to_coset) != list(range(len(bundle.cosets))):
        raise CertificateError("base components and cosets are not in bijection")
    coset_to_comp = [0] * len(comp_to_coset)
    for c, i in enumerate(comp_to_coset):
        coset_to_comp[i] = c
    img = bundle.beta_hat.images
    for g in range(len(bundle.G)):
        for c, block in enumerate(comps.blocks):
            landed = set(comps.label[img[g][list(block)]].tolist())
            want = coset_to_comp[bundle.coset_perm[g, comp_to_coset[c]]]
            if landed != {want}:
                raise CertificateError(
                    f"element {bundle.G.elements[g]!r} moves component {c} to {sorted(landed)}, "
                    f"expected {want}"
                )
    return ComponentCosetMap(tuple(comp_to_coset), tuple(coset_to_comp))


def component_space(bundle: InducedBundle, coset: int) -> tuple[MetricSpace, np.ndarray]:
    """Base component of a coset as a space, and its base positions."""
    comps = finite_components(bundle.base.base)
    block = np.asarray(comps.blocks[bundle.coset_map.coset_to_component[coset]], dtype=int)
    return subspace(bundle.base.base, block, name=f"component{coset}"), block


def _localize(block: np.ndarray, positions: np.ndarray) -> np.ndarray:
    lookup = {int(b): k for k, b in enumerate(block)}
    try:
        return np.array([lookup[int(p)] for p in np.ravel(positions)], dtype=int).reshape(
            np.shape(positions)
        )
    except KeyError:
        raise CertificateError("map leaves the component") from None


def orbit_carrier(bundle: InducedBundle, g: Hashable) -> QuasiMap:
    """``x -> [O_(g, x)]`` into the component of the coset ``gH``."""
    coset = int(bundle.cosets.coset_of[bundle.G.index(g)])
    Z, block = component_space(bundle, coset)
    targets = [bundle.orbit_class(g, x) for x in range(bundle.n)]
    return QuasiMap(bundle.alpha.space, Z, _localize(block, np.array(targets)))


def stabilizer_action(bundle: InducedBundle) -> QuasiAction:
    """``H`` acting through the induced action on the component of the coset ``H``."""
    coset = int(bundle.cosets.coset_of[bundle.G.e])
    Z, block = component_space(bundle, coset)
    rows = [bundle.beta_hat.images[bundle.G.index(h)][block] for h in bundle.alpha.group.elements]
    return QuasiAction(bundle.alpha.group, Z, _localize(block, np.stack(rows)))


def restriction_conjugacy(bundle: InducedBundle) -> ConjugacyWitness:
    """Compare ``alpha`` with the stabilizer action via ``x -> [O_(e, x)]``."""
    return conjugacy_defect(
        bundle.alpha, stabilizer_action(bundle), orbit_carrier(bundle, bundle.G.identity),
        bundle.L,
    )


@dataclass(frozen=True)
class Isometrization:
    space: MetricSpace
    action: QuasiAction
    witness: ConjugacyWitness
    input_report: QAReport
    bundle: InducedBundle


def isometrize(rho: QuasiAction, L: float = 1.0, eps: float | None = None,
               cap: int | None = None) -> Isometrization:
    """The isometric action on quasi-orbits of ``G x X``, with the orbit carrier as witness."""
    G = rho.group
    full = SubgroupHandle(G, range(len(G)))
    bundle = induce(G, full, rho, L, eps, cap)
    beta = bundle.beta_hat
    carrier = QuasiMap(
        rho.space, bundle.base.base,
        [bundle.orbit_class(G.identity, x) for x in range(len(rho.space))],
    )
    witness = conjugacy_defect(rho, beta, carrier, L)
    return Isometrization(bundle.base.base, beta, witness, bundle.alpha_report, bundle)


def _component_action(rho: QuasiAction) -> tuple[np.ndarray, np.ndarray]:
    """Component labels and ``perm[g, c]``; raises if an element splits a component."""
    comps = finite_components(rho.space)
    perm = np.empty((len(rho.group), len(comps)), dtype=int)
    for g in range(len(rho.group)):
        for c, block in enumerate(comps.blocks):
            landed = np.unique(comps.label[rho.images[g][list(block)]])
            if len(landed) != 1:
                raise StructureError(
                    f"element {rho.group.elements[g]!r} does not permute finite components"
                )
            perm[g, c] = landed[0]
    return comps.label, perm


def _component_of(space: MetricSpace, label: np.ndarray, sub: MetricSpace) -> int:
    pos = [space.index(p) for p in sub.points]
    hit = np.unique(label[pos])
    if len(hit) != 1 or (label == hit[0]).sum() != len(pos):
        raise StructureError("the given subspace is not a finite component")
    return int(hit[0])


def extend_conjugacy(
    rho: QuasiAction, other: QuasiAction, f0: QuasiMap, L: float = 1.0
) -> ConjugacyWitness:
    """Extend a conjugacy between component stabilizer actions to the whole spaces.

    On the component ``rho(r) Y0`` (``r`` the least element of its coset)
    the extension is ``y -> rho'(r) f0(rho(r^-1) y)``.
    """
    G = rho.group
    if set(G.elements) != set(other.group.elements):
        raise StructureError("the two quasi-actions are not of the same group")
    label, perm = _component_action(rho)
    label2, perm2 = _component_action(other)
    c0 = _component_of(rho.space, label, f0.domain)
    c0p = _component_of(other.space, label2, f0.codomain)
    if len(set(perm[:, c0].tolist())) != perm.shape[1]:
        raise StructureError("G does not act transitively on the components of the first space")
    if len(set(perm2[:, c0p].tolist())) != perm2.shape[1]:
        raise StructureError("G does not act transitively on the components of the second space")
    stab = [g for g in range(len(G)) if perm[g, c0] == c0]
    stab2 = {other.group.elements[g] for g in range(len(G)) if perm2[g, c0p] == c0p}
    if {G.elements[g] for g in stab} != stab2:
        raise StructureError("the two components have different stabilizers")
    cosets = left_cosets(G, SubgroupHandle(G, stab))
    y0 = np.array([rho.space.index(p) for p in f0.domain.points])
    y0_local = {int(y): k for k, y in enumerate(y0)}
    y0p = np.array([other.space.index(p) for p in f0.codomain.points])
    assignment = np.full(len(rho.space), -1, dtype=int)
    for block in cosets.cosets:
        r = block[0]
        r_inv = G.inv[r]
        r2 = other.group.index(G.elements[r])
        comp = perm[r, c0]
        for y in np.flatnonzero(label == comp):
            z = int(rho.images[r_inv, y])
            if z not in y0_local:
                raise StructureError("pulling back by r^-1 leaves the chosen component")
            assignment[y] = other.images[r2, y0p[f0.assignment[y0_local[z]]]]
    f = QuasiMap(rho.space, other.space, assignment)
    return conjugacy_defect(rho, other, f, L)


@dataclass(frozen=True)
class ProductForm:
    space: MetricSpace
    action: QuasiAction
    decompositions: tuple[ProductDecomposition, ...]
    permutation: PermutationAction
    coset_perm: np.ndarray
    carrier_reports: tuple[QIReport, ...]
    tau: float


def induced_product_form(
    bundle: InducedBundle, tau: float | None = None, cap: int | None = None
) -> ProductForm:
    """The induced quasi-action on the L2 product of the base components.

    Factor ``i`` is the component of coset ``i``. The factor permutation
    is read back off the product maps and must equal left multiplication
    on cosets.
    """
    k = len(bundle.cosets)
    parts, blocks = zip(*(component_space(bundle, i) for i in range(k)))
    size = math.prod(len(p) for p in parts)
    if size > get_max_points(cap):
        raise CapExceededError(f"product form would have {size} points")
    U = disjoint_union(parts)
    order = np.concatenate(blocks)
    u_of = np.empty(len(bundle.base.base), dtype=int)
    u_of[order] = np.arange(len(order))
    P = l2_product(parts)
    decomps, rows = [], []
    for g in range(len(bundle.G)):
        psi = QuasiMap(U, U, u_of[bundle.beta_hat.images[g][order]])
        d = union_to_product(psi)
        if d.sigma != tuple(int(i) for i in bundle.coset_perm[g]):
            raise CertificateError("component permutation differs from the coset action")
        decomps.append(d)
        rows.append(assemble_product_map(d.sigma, d.factor_maps, P, P).assignment)
    action = QuasiAction(bundle.G, P, np.stack(rows))
    if tau is None:
        tau = min(diameter(p) for p in parts) / 10
    if tau <= 0:
        raise AmbiguousDecompositionError("a factor is a single point; no scale separates factors")
    perm = permutation_action(action, None, tau)
    if not np.array_equal(perm.sigma, bundle.coset_perm):
        raise CertificateError("detected factor permutation differs from the coset action")
    reports = tuple(
        qi_report(orbit_carrier(bundle, bundle.G.elements[r]), bundle.L)
        for r in bundle.cosets.representatives
    )
    return ProductForm(P, action, tuple(decomps), perm, bundle.coset_perm, reports, tau)
