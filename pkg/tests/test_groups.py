import numpy as np
import pytest

from coarsekit import (
    FiniteGroup,
    NotASubgroupError,
    all_subgroups,
    coset_action,
    left_cosets,
    small_groups,
    subgroup_check,
    validate_group,
)
from coarsekit.groups import (
    alternating_group,
    dihedral_group,
    quaternion_group,
    stabilizer,
    symmetric_group,
    trivial_group,
)

GROUPS = small_groups()


def test_small_tables_are_groups(z2, z4):
    assert validate_group(z2) == []
    assert validate_group(z4) == []


def test_latin_square_witness():
    bad = FiniteGroup(["e", "a"], [[0, 1], [1, 1]], "e")
    assert "latin square (row)" in {v.axiom for v in validate_group(bad)}


def test_non_associative_table():
    # a Latin square with identity 0 that is not associative
    t = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    axioms = {v.axiom for v in validate_group(FiniteGroup(range(5), t, 0))}
    assert "associativity" in axioms


@pytest.mark.parametrize("name", list(GROUPS))
def test_library_groups_are_valid(name):
    assert validate_group(GROUPS[name]) == []


def test_subgroup_check(z4):
    H = subgroup_check(z4, [0, 2])
    assert H.index == 2
    with pytest.raises(NotASubgroupError, match="1"):
        subgroup_check(z4, [0, 1])
    assert subgroup_check(z4, range(4)).index == 1


def test_cosets(z4):
    C = left_cosets(z4, subgroup_check(z4, [0, 2]))
    assert [C.ids(k) for k in range(len(C))] == [(0, 2), (1, 3)]
    assert C.representatives == (0, 1)
    assert len(left_cosets(z4, subgroup_check(z4, range(4)))) == 1
    assert len(left_cosets(z4, subgroup_check(z4, [0]))) == 4


def test_coset_action(z4):
    C = left_cosets(z4, subgroup_check(z4, [0, 2]))
    perm = coset_action(z4, C)
    assert perm[1].tolist() == [1, 0]
    assert perm[0].tolist() == [0, 1]
    assert perm[2, 0] == 0


@pytest.mark.parametrize(
    "G, count",
    [(dihedral_group(6), 16), (alternating_group(4), 10), (dihedral_group(4), 10),
     (quaternion_group(), 6), (symmetric_group(3), 6), (trivial_group(), 1)],
)
def test_subgroup_counts(G, count):
    assert len(all_subgroups(G)) == count


@pytest.mark.parametrize("name", list(GROUPS))
def test_lagrange_and_coset_action(name):
    G = GROUPS[name]
    for H in all_subgroups(G):
        assert len(G) == H.index * len(H)
        C = left_cosets(G, H)
        perm = coset_action(G, C)
        identity_coset = int(C.coset_of[G.e])
        assert set(perm[:, identity_coset].tolist()) == set(range(len(C)))
        assert set(stabilizer(perm, identity_coset)) == set(H.members)
        # brute force: g * (r H) = (g r) H
        for g in range(len(G)):
            for k, r in enumerate(C.representatives):
                assert C.coset_of[G.table[g, r]] == perm[g, k]


def test_subgroup_group_uses_parent_ids():
    G = dihedral_group(4)
    H = subgroup_check(G, ["r0", "r2"])
    assert H.group.elements == ("r0", "r2")
    assert validate_group(H.group) == []
    assert "r2" in H and "s0" not in H


def test_inverse_table():
    G = quaternion_group()
    for g in G.elements:
        assert G.mul(g, G.inverse(g)) == G.identity
    assert np.array_equal(G.table[np.arange(len(G)), G.inv], np.full(len(G), G.e))
