import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsekit import (
    AmbiguousDecompositionError,
    CapExceededError,
    NotASubgroupError,
    QuasiAction,
    QuasiMap,
    StructureError,
    SubgroupHandle,
    extend_conjugacy,
    induce,
    induced_product_form,
    isometrize,
    isometry_defect,
    line_space,
    qa_constants,
    small_groups,
    subgroup_check,
)
from coarsekit.generate import isometric_action, perturb, random_subgroup
from coarsekit.induction import (
    build_bundle_space,
    commutation_failures,
    component_space,
    orbit_carrier,
)
from coarsekit.metric import subspace

import oracle
from cases import orbit_class_map

GROUPS = small_groups()


def _full(G):
    return SubgroupHandle(G, range(len(G)))


@pytest.fixture
def z4_bundle(z4, line4):
    H = subgroup_check(z4, [0, 2])
    alpha = QuasiAction(H.group, line4, [[0, 1, 2, 3], [3, 2, 1, 0]])
    return induce(z4, H, alpha)


def test_bundle_space_z2(z2, flip):
    Y, rhoH, leftG = build_bundle_space(z2, _full(z2), flip)
    assert len(Y) == 8 and len(Y.components) == 2
    assert rhoH("s", ("e", "p1")) == ("s", "p2")


def test_bundle_space_z4(z4_bundle):
    b = z4_bundle
    assert len(b.Y) == 16 and len(b.Y.components) == 4
    for g in range(4):
        for x in range(4):
            assert b.rhoH(2, (g, f"p{x}")) == ((g + 2) % 4, f"p{3 - x}")
            assert b.leftG(1, (g, f"p{x}")) == ((g + 1) % 4, f"p{x}")
    assert isometry_defect(b.leftG) == 0


def test_bundle_rejects_foreign_action(z4, flip):
    with pytest.raises(NotASubgroupError):
        build_bundle_space(z4, subgroup_check(z4, [0, 2]), flip)


def test_bundle_cap(z4, line4):
    alpha = QuasiAction.trivial(subgroup_check(z4, [0]).group, line4)
    with pytest.raises(CapExceededError):
        induce(z4, subgroup_check(z4, [0]), alpha, cap=10)


def test_induce_z2_flip(z2, flip, line4):
    b = induce(z2, _full(z2), flip)
    carrier = orbit_carrier(b, "e")
    assert np.array_equal(carrier.codomain.dist[np.ix_(carrier.assignment, carrier.assignment)],
                          line4.dist)
    assert len(b.base.base) == 4
    assert b.restriction_witness.defect == 0
    assert b.restriction_witness.carrier_report.A == 0


def test_induce_z4(z4_bundle):
    b = z4_bundle
    assert len(b.base.base.components) == 2
    assert [b.cosets.ids(i) for i in b.coset_map.component_to_coset] == [(0, 2), (1, 3)]
    comps = b.base.base.components
    moved = {int(comps.label[b.beta_hat.images[1][list(blk)]][0]) for blk in comps.blocks}
    assert moved == {0, 1}
    assert comps.label[b.beta_hat.images[1][0]] == 1


def test_induce_trivial_subgroup(z4, line4):
    H = subgroup_check(z4, [0])
    b = induce(z4, H, QuasiAction.trivial(H.group, line4))
    assert all(len(F) == 1 for F in b.FH.fibers)
    assert np.array_equal(b.base.base.dist, b.Y.dist)
    assert np.array_equal(b.beta_hat.images, b.leftG.images)
    assert len(b.base.base.components) == 4


def test_component_counts(z4, line4):
    full = induce(z4, _full(z4), QuasiAction.trivial(z4, line4))
    assert len(full.base.base.components) == 1


def test_isometrize_examples(flip, flipb, z2, line4):
    res = isometrize(flip)
    assert isometry_defect(res.action) == 0
    assert res.witness.defect == 0 and res.witness.carrier_report.A == 0
    res = isometrize(flipb)
    assert isometry_defect(res.action) == 0
    assert res.witness.defect <= 3 and res.witness.carrier_report.A <= 3
    triv = isometrize(QuasiAction.trivial(z2, line4))
    assert np.array_equal(triv.space.dist, line4.dist) and triv.witness.defect == 0


def test_isometrize_flipb_matches_oracle(flipb):
    res = isometrize(flipb)
    ob = oracle.BundleOracle([[0, 1], [1, 0]], 0, [0, 1], flipb.images.tolist(),
                             oracle.table(flipb.space))
    f = ob.carrier(0)
    d = oracle.table(flipb.space)
    assert res.witness.carrier_report.A == oracle.qi_constant(d, ob.dist, f)
    assert res.witness.defect == oracle.conjugacy_defect(ob.dist, flipb.images.tolist(),
                                                         ob.beta(), f)
    assert res.witness.carrier_report.density == oracle.density(ob.dist, f)


def test_restriction_examples(z2, flip, flipb, line4):
    assert induce(z2, _full(z2), QuasiAction.trivial(z2, line4)).restriction_witness.defect == 0
    w = induce(z2, _full(z2), flipb).restriction_witness
    assert w.defect <= 3


def test_extend_identity(z4_bundle):
    b = z4_bundle
    Z, _ = component_space(b, int(b.cosets.coset_of[b.G.e]))
    w = extend_conjugacy(b.beta_hat, b.beta_hat, QuasiMap.identity(Z))
    assert w.defect == 0
    assert np.array_equal(w.carrier.assignment, np.arange(len(b.base.base)))


def test_extend_rejects_non_component(z4_bundle):
    b = z4_bundle
    Z, block = component_space(b, 0)
    part = subspace(b.base.base, block[:2])
    with pytest.raises(StructureError):
        extend_conjugacy(b.beta_hat, b.beta_hat, QuasiMap.identity(part))


def test_product_form_z4(z4_bundle):
    pf = induced_product_form(z4_bundle)
    assert len(pf.space.factors) == 2
    assert pf.permutation.sigma[1].tolist() == [1, 0]
    assert isometry_defect(pf.action) == 0


def test_product_form_single_factor(z2, flip):
    res = isometrize(flip)
    pf = induced_product_form(res.bundle)
    assert len(pf.space.factors) == 1
    n = len(res.space)
    assert np.array_equal(pf.action.images, res.action.images[:, :n])


def _check_against_oracle(b):
    """Base metric, induced action and orbit carriers agree with the brute-force bundle."""
    n = b.n
    H = list(b.H.members)
    alpha_rows = [b.alpha.images[b.alpha.group.index(b.G.elements[h])].tolist() for h in H]
    ob = oracle.BundleOracle(b.G.table.tolist(), b.G.e, H, alpha_rows,
                             oracle.table(b.alpha.space))
    to_oracle = []
    for k in range(len(b.base.base)):
        F = frozenset((y // n, y % n) for y in b.base.fiber(k).members)
        to_oracle.append(ob.class_of_fiber[F])
    assert sorted(to_oracle) == list(range(len(ob.dist)))
    for i, a in enumerate(to_oracle):
        for j, c in enumerate(to_oracle):
            assert b.base.base.dist[i, j] == ob.dist[a][c]
    beta = ob.beta()
    for g in range(len(b.G)):
        for k in range(len(to_oracle)):
            assert to_oracle[b.beta_hat.images[g][k]] == beta[g][to_oracle[k]]
    assert len(oracle.components(ob.dist)) == b.H.index
    return ob, to_oracle


seeds = st.integers(0, 10**6)
names = st.sampled_from(sorted(GROUPS))


@settings(max_examples=40, deadline=None)
@given(seeds, names, st.sampled_from([0.0, 0.5, 1.0, 2.0]))
def test_induction_matches_oracle(seed, name, radius):
    rng = np.random.default_rng(seed)
    G = GROUPS[name]
    H = random_subgroup(rng, G)
    alpha = perturb(rng, isometric_action(rng, H.group, int(rng.integers(2, 9))), radius)
    b = induce(G, H, alpha)
    ob, to_oracle = _check_against_oracle(b)
    assert commutation_failures(b) == 0
    assert isometry_defect(b.beta_hat) == 0
    r = qa_constants(b.beta_hat)
    assert (r.A, r.action_defect, r.identity_defect) == (0, 0, 0)
    assert len(b.base.base.components) == H.index
    A = b.alpha_report.A_qa
    w = b.restriction_witness
    assert w.defect <= 3 * A + 1e-9
    # the restriction carrier lands on the oracle's orbit classes
    Z, block = component_space(b, int(b.cosets.coset_of[G.e]))
    assert [to_oracle[block[c]] for c in w.carrier.assignment] == ob.carrier(G.e)


@settings(max_examples=40, deadline=None)
@given(seeds, names, st.sampled_from([0.0, 0.5, 1.0, 2.0]), st.sampled_from([1.0, 1.5]))
def test_isometrization_bounds(seed, name, radius, L):
    rng = np.random.default_rng(seed)
    rho = perturb(rng, isometric_action(rng, GROUPS[name], int(rng.integers(2, 14))), radius)
    res = isometrize(rho, L)
    A = res.input_report.A_qa
    assert res.witness.carrier_report.A <= 3 * A + 1e-9
    assert res.witness.defect <= 3 * A + 1e-9
    assert res.witness.carrier_report.density <= A + 1e-9
    # lower bound: the identity slice never shrinks distances
    base = res.space.dist[np.ix_(res.witness.carrier.assignment, res.witness.carrier.assignment)]
    assert np.all(base >= rho.space.dist - 1e-9)
    if radius == 0:
        assert res.witness.defect == 0 and res.witness.carrier_report.A == 0


@settings(max_examples=20, deadline=None)
@given(seeds, names)
def test_isometric_alpha_gives_isometric_factors(seed, name):
    rng = np.random.default_rng(seed)
    G = GROUPS[name]
    H = random_subgroup(rng, G)
    alpha = isometric_action(rng, H.group, len(H) + 1)
    b = induce(G, H, alpha)
    assert b.restriction_witness.defect == 0
    assert b.restriction_witness.carrier_report.A == 0
    if H.index <= 3:
        pf = induced_product_form(b)
        assert all(r.A == 0 for r in pf.carrier_reports)
        assert isometry_defect(pf.action) == 0


def test_extend_between_alpha_and_its_isometrization(z4, line4):
    H = subgroup_check(z4, [0, 2])
    flipb = QuasiAction(H.group, line4, [[0, 1, 2, 3], [3, 2, 2, 0]])
    iso = isometrize(flipb)
    b1 = induce(z4, H, flipb)
    b2 = induce(z4, H, QuasiAction(H.group, iso.space, iso.action.images))
    f0 = orbit_class_map(b1, b2, iso.witness.carrier.assignment)
    w = extend_conjugacy(b1.beta_hat, b2.beta_hat, f0)
    assert np.isfinite(w.defect)
    d2 = oracle.table(b2.base.base)
    assert w.defect == oracle.conjugacy_defect(d2, b1.beta_hat.images.tolist(),
                                               b2.beta_hat.images.tolist(),
                                               w.carrier.assignment.tolist())


def test_small_line_cap_guard():
    X = line_space(1)
    G = GROUPS["Z2"]
    b = induce(G, SubgroupHandle(G, [0]), QuasiAction.trivial(SubgroupHandle(G, [0]).group, X))
    with pytest.raises(AmbiguousDecompositionError):
        induced_product_form(b)
