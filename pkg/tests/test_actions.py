import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsekit import (
    INF,
    MetricSpace,
    NotProductPreservingError,
    QuasiAction,
    QuasiMap,
    SpaceMismatchError,
    coboundedness,
    conjugacy_defect,
    coset_action,
    cyclic_group,
    disjoint_union,
    equivalence_defect,
    isometry_defect,
    l2_product,
    left_cosets,
    line_space,
    permutation_action,
    qa_constants,
    quasi_orbit,
    restrict,
    small_groups,
    subgroup_check,
)
from coarsekit.generate import isometric_action, perturb, random_space, random_subgroup
from coarsekit.groups import trivial_group

import oracle

GROUPS = small_groups()


def test_qa_constants(flip, flipb, z2, line4):
    r = qa_constants(flip, 1)
    assert (r.L, r.A_qa) == (1, 0)
    r = qa_constants(flipb, 1)
    assert r.A_qa == 1 and r.A == 1 and r.action_defect == 1
    assert qa_constants(QuasiAction.trivial(z2, line4), 2.0).A_qa == 0


def test_flipb_matches_oracle(flipb):
    d = oracle.table(flipb.space)
    ref = oracle.qa_constants(d, flipb.group.table.tolist(), 0, flipb.images.tolist())
    r = qa_constants(flipb)
    assert (r.A, r.action_defect, r.identity_defect) == (ref["A"], ref["action"], ref["identity"])


def test_quasi_orbit(flip, flipb, z2, line4):
    assert quasi_orbit(flip, "p1").ids == ("p1", "p2")
    assert quasi_orbit(QuasiAction.trivial(z2, line4), "p2").ids == ("p2",)
    assert quasi_orbit(flipb, "p0").ids == ("p0", "p3")


def test_coboundedness(flip, z2, line4):
    assert coboundedness(flip).C == 1
    c = coboundedness(QuasiAction.trivial(z2, line4))
    assert c.C == 2 and c.base == "p1"
    # Z4 rotating a 4-cycle is transitive
    G = cyclic_group(4)
    cyc = np.array([[min(abs(i - j), 4 - abs(i - j)) for j in range(4)] for i in range(4)], float)
    X = MetricSpace(range(4), cyc)
    rot = QuasiAction(G, X, [[(g + x) % 4 for x in range(4)] for g in range(4)])
    assert coboundedness(rot).C == 0


def test_restrict(z4, line4):
    rows = [[0, 1, 2, 3], [1, 2, 3, 0], [3, 2, 1, 0], [0, 3, 2, 1]]
    rho = QuasiAction(z4, line4, rows)
    full = restrict(rho, subgroup_check(z4, range(4)))
    assert np.array_equal(full.images, rho.images)
    half = restrict(rho, subgroup_check(z4, [0, 2]))
    assert half.group.elements == (0, 2) and half.images.tolist() == [rows[0], rows[2]]
    assert restrict(rho, subgroup_check(z4, [0])).images.tolist() == [rows[0]]


def test_equivalence_defect(flip, flipb, z2, line4):
    assert equivalence_defect(flip, flip) == 0
    assert equivalence_defect(flip, flipb) == 1
    U = disjoint_union([line4, line4])
    a = QuasiAction.trivial(z2, U)
    b = QuasiAction(z2, U, [list(range(8)), [4, 5, 6, 7, 0, 1, 2, 3]])
    assert equivalence_defect(a, b) == INF


def test_equivalence_needs_same_space(flip):
    other = QuasiAction.trivial(flip.group, line_space(5))
    with pytest.raises(SpaceMismatchError):
        equivalence_defect(flip, other)


def test_conjugacy_defect(flip, flipb, line4):
    ident = QuasiMap.identity(line4)
    assert conjugacy_defect(flip, flip, ident).defect == 0
    assert conjugacy_defect(flip, flip, flip.map("s")).defect == 0
    w = conjugacy_defect(flip, flipb, ident)
    assert w.defect == 1
    d = oracle.table(line4)
    assert w.defect == oracle.conjugacy_defect(d, flip.images.tolist(), flipb.images.tolist(),
                                               [0, 1, 2, 3])


def test_isometry_defect(flip, flipb, z2, line4):
    assert isometry_defect(flip) == 0
    assert isometry_defect(flipb) == 1
    assert isometry_defect(QuasiAction.trivial(z2, line4)) == 0


def _swap_action(z2, line4, swap: bool):
    P = l2_product([line4, line4])

    def image(x, y):
        fx, fy = f"p{3 - int(x[1])}", f"p{3 - int(y[1])}"
        return P.index((fy, fx) if swap else (fx, fy))

    return QuasiAction(z2, P, [np.arange(16), [image(x, y) for x, y in P.points]])


def test_permutation_action_swap(z2, line4):
    pa = permutation_action(_swap_action(z2, line4, True), None, 0.5)
    assert pa.sigma.tolist() == [[0, 1], [1, 0]]
    assert pa.stabilizers[0].ids == ("e",)
    assert pa.factor_actions[0].images.tolist() == [[0, 1, 2, 3]]


def test_permutation_action_diagonal(z2, line4):
    pa = permutation_action(_swap_action(z2, line4, False), None, 0.5)
    assert pa.sigma.tolist() == [[0, 1], [0, 1]]
    assert all(len(H) == 2 for H in pa.stabilizers)
    assert pa.factor_actions[1].images.tolist() == [[0, 1, 2, 3], [3, 2, 1, 0]]


def test_permutation_action_trivial_group(line4):
    P = l2_product([line4, line4])
    pa = permutation_action(QuasiAction.trivial(trivial_group(), P), None, 0.5)
    assert pa.sigma.tolist() == [[0, 1]]


def test_permutation_action_not_a_homomorphism(line4):
    # Z3 cannot act on two factors by a transposition
    G = cyclic_group(3)
    P = l2_product([line4, line4])
    swap = [P.index((y, x)) for x, y in P.points]
    rho = QuasiAction(G, P, [np.arange(16), swap, swap])
    with pytest.raises(NotProductPreservingError):
        permutation_action(rho, None, 0.5)


seeds = st.integers(0, 10**6)
names = st.sampled_from(sorted(GROUPS))


@settings(max_examples=40, deadline=None)
@given(seeds, names, st.integers(2, 20))
def test_isometric_actions_are_exact(seed, name, size):
    rho = isometric_action(seed, GROUPS[name], size)
    r = qa_constants(rho, 1.0)
    assert (r.L, r.A, r.action_defect, r.identity_defect) == (1.0, 0.0, 0.0, 0.0)
    d = oracle.table(rho.space)
    assert oracle.is_isometric_action(d, rho.group.table.tolist(), rho.group.e,
                                      rho.images.tolist())


@settings(max_examples=40, deadline=None)
@given(seeds, names, st.integers(2, 16), st.sampled_from([0.5, 1.0, 2.0]))
def test_perturbed_constants_match_oracle(seed, name, size, radius):
    rng = np.random.default_rng(seed)
    rho = perturb(rng, isometric_action(rng, GROUPS[name], size), radius)
    L = float(rng.choice([1.0, 1.5]))
    r = qa_constants(rho, L)
    ref = oracle.qa_constants(oracle.table(rho.space), rho.group.table.tolist(), rho.group.e,
                              rho.images.tolist(), L)
    assert r.A == pytest.approx(ref["A"], abs=1e-12)
    assert (r.action_defect, r.identity_defect) == (ref["action"], ref["identity"])
    H = random_subgroup(rng, rho.group)
    assert qa_constants(restrict(rho, H), L).A_qa <= r.A_qa


@settings(max_examples=40, deadline=None)
@given(seeds, names)
def test_equivalence_defect_is_pseudometric(seed, name):
    rng = np.random.default_rng(seed)
    base = isometric_action(rng, GROUPS[name], int(rng.integers(2, 14)))
    acts = [perturb(rng, base, float(rng.choice([0.5, 1.0, 2.0]))) for _ in range(3)]
    D = [[equivalence_defect(a, b) for b in acts] for a in acts]
    for i in range(3):
        assert D[i][i] == 0
        for j in range(3):
            assert D[i][j] == D[j][i]
            for k in range(3):
                assert D[i][k] <= D[i][j] + D[j][k] + 2e-9


@settings(max_examples=30, deadline=None)
@given(seeds, names)
def test_permutation_action_is_homomorphism(seed, name):
    """Wreath-type action: G permutes factors through a coset action."""
    rng = np.random.default_rng(seed)
    G = GROUPS[name]
    H = random_subgroup(rng, G)
    C = left_cosets(G, H)
    if len(C) > 3:
        return
    F = random_space(rng, int(rng.integers(2, 4)))
    P = l2_product([F] * len(C))
    perm = coset_action(G, C)
    rows = []
    for g in range(len(G)):
        coords = np.unravel_index(np.arange(len(P)), P.factor_sizes)
        out = [None] * len(C)
        for i in range(len(C)):
            out[perm[g, i]] = coords[i]
        rows.append(np.ravel_multi_index(out, P.factor_sizes))
    pa = permutation_action(QuasiAction(G, P, rows), None, float(F.dist.max()) / 10)
    assert np.array_equal(pa.sigma, perm)
    assert np.array_equal(pa.sigma[G.table], pa.sigma[:, pa.sigma])
