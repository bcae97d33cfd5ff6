"""Finite groups given by multiplication tables, subgroups and left cosets.

Elements are opaque ids; ``table[i, j]`` is the position of the product of
the elements at positions ``i`` and ``j``. Internally everything works on
positions, and "least element id" means least position.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import CertificateError, NotASubgroupError, StructureError
from .metric import Violation


class FiniteGroup:
    def __init__(self, elements: Sequence[Hashable], table, identity: Hashable, name: str = ""):
        self.elements = tuple(elements)
        self.index_of = {g: i for i, g in enumerate(self.elements)}
        if len(self.index_of) != len(self.elements):
            raise StructureError("duplicate element ids")
        n = len(self.elements)
        table = np.array(table)
        if table.ndim != 2 or table.shape != (n, n):
            raise StructureError(f"table has shape {table.shape}, expected ({n}, {n})")
        if not np.issubdtype(table.dtype, np.integer):
            raise StructureError("table entries must be element positions")
        if n and (table.min() < 0 or table.max() >= n):
            raise StructureError("table entry out of range")
        table = table.astype(int)
        table.setflags(write=False)
        self.table = table
        if identity not in self.index_of:
            raise StructureError(f"identity {identity!r} is not an element")
        self.identity = identity
        self.e = self.index_of[identity]
        self.name = name

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"<FiniteGroup {self.name or ''} order={len(self)}>"

    def index(self, g: Hashable) -> int:
        try:
            return self.index_of[g]
        except KeyError:
            raise StructureError(f"unknown element id {g!r}") from None

    def mul(self, a: Hashable, b: Hashable) -> Hashable:
        return self.elements[self.table[self.index(a), self.index(b)]]

    @cached_property
    def inv(self) -> np.ndarray:
        """``inv[i]`` is the position of the inverse of element ``i``."""
        rows, cols = np.nonzero(self.table == self.e)
        out = np.full(len(self), -1, dtype=int)
        out[rows] = cols
        if (out < 0).any():
            raise StructureError("some element has no inverse")
        return out

    def inverse(self, g: Hashable) -> Hashable:
        return self.elements[self.inv[self.index(g)]]

    def same_as(self, other: "FiniteGroup") -> bool:
        return self is other or (
            self.elements == other.elements
            and np.array_equal(self.table, other.table)
            and self.identity == other.identity
        )


def group_from_function(
    elements: Sequence[Hashable], mul: Callable, identity: Hashable, name: str = ""
) -> FiniteGroup:
    elements = list(elements)
    pos = {g: i for i, g in enumerate(elements)}
    table = [[pos[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroup(elements, table, identity, name=name)


def validate_group(candidate: FiniteGroup) -> list[Violation]:
    """Group axioms; one witness (element ids) per failed axiom."""
    t = candidate.table
    n = len(candidate)
    ids = candidate.elements
    out: list[Violation] = []
    for a in range(n):
        vals, counts = np.unique(t[a], return_counts=True)
        if (counts > 1).any():
            v = vals[np.argmax(counts > 1)]
            b1, b2 = np.flatnonzero(t[a] == v)[:2]
            out.append(Violation("latin square (row)", (ids[a], ids[b1], ids[b2])))
            break
    for b in range(n):
        vals, counts = np.unique(t[:, b], return_counts=True)
        if (counts > 1).any():
            v = vals[np.argmax(counts > 1)]
            a1, a2 = np.flatnonzero(t[:, b] == v)[:2]
            out.append(Violation("latin square (column)", (ids[a1], ids[a2], ids[b])))
            break
    e = candidate.e
    bad = np.flatnonzero((t[e] != np.arange(n)) | (t[:, e] != np.arange(n)))
    if len(bad):
        out.append(Violation("identity", (ids[bad[0]],)))
    for a in range(n):
        right = np.flatnonzero(t[a] == e)
        left = np.flatnonzero(t[:, a] == e)
        if not (len(right) and len(left) and right[0] == left[0]):
            out.append(Violation("inverse", (ids[a],)))
            break
    # assoc[a, b, c]: (ab)c == a(bc)
    lhs = t[t]  # lhs[a, b, c] = t[t[a, b], c]
    rhs = t[:, t]  # rhs[a, b, c] = t[a, t[b, c]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b, c = bad[0]
        out.append(Violation("associativity", (ids[a], ids[b], ids[c])))
    return out


class SubgroupHandle:
    """A subgroup of ``parent``, members stored as sorted positions."""

    def __init__(self, parent: FiniteGroup, members: Iterable[int]):
        self.parent = parent
        self.members = tuple(sorted(set(int(m) for m in members)))
        self.member_set = frozenset(self.members)
        # inverse table restricted to H, as parent positions
        self.inv = parent.inv[list(self.members)]

    @property
    def ids(self) -> tuple:
        return tuple(self.parent.elements[m] for m in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, g: Hashable) -> bool:
        return self.parent.index_of.get(g, -1) in self.member_set

    def __repr__(self) -> str:
        return f"SubgroupHandle({list(self.ids)!r})"

    @property
    def index(self) -> int:
        return len(self.parent) // len(self)

    @cached_property
    def group(self) -> FiniteGroup:
        """H as a group in its own right; element ids are the parent's ids."""
        local = {m: k for k, m in enumerate(self.members)}
        sub = self.parent.table[np.ix_(self.members, self.members)]
        table = np.vectorize(local.__getitem__, otypes=[int])(sub) if len(self) else sub
        return FiniteGroup(self.ids, table, self.parent.identity)


def subgroup_check(G: FiniteGroup, members: Iterable[Hashable]) -> SubgroupHandle:
    """Build a handle for ``members``, raising if they are not closed."""
    pos = sorted(set(G.index(m) for m in members))
    if not pos:
        raise NotASubgroupError("the empty set is not a subgroup")
    s = set(pos)
    sub = G.table[np.ix_(pos, pos)]
    for i, a in enumerate(pos):
        for j, b in enumerate(pos):
            if int(sub[i, j]) not in s:
                ga, gb = G.elements[a], G.elements[b]
                raise NotASubgroupError(
                    f"not closed: {ga!r}*{gb!r} = {G.elements[sub[i, j]]!r} is not a member"
                )
    # closure of a nonempty subset of a finite group gives identity and inverses
    return SubgroupHandle(G, pos)


def _closure(G: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
    members = {G.e}
    frontier = [G.e]
    gens = list(gens)
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = int(G.table[a, g])
                if c not in members:
                    members.add(c)
                    nxt.append(c)
        frontier = nxt
    return frozenset(members)


def all_subgroups(G: FiniteGroup) -> list[SubgroupHandle]:
    """Every subgroup, as joins of cyclic subgroups; sorted by (order, members)."""
    cyclic = {_closure(G, [g]) for g in range(len(G))}
    found = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        nxt = set()
        for A in frontier:
            for B in cyclic:
                if not B <= A:
                    J = _closure(G, A | B)
                    if J not in found:
                        found.add(J)
                        nxt.add(J)
        frontier = nxt
    return [SubgroupHandle(G, s) for s in sorted(found, key=lambda s: (len(s), sorted(s)))]


@dataclass(frozen=True)
class CosetSpace:
    group: FiniteGroup
    subgroup: SubgroupHandle
    cosets: tuple[tuple[int, ...], ...]
    representatives: tuple[int, ...]
    coset_of: np.ndarray  # coset index of every element position

    def __len__(self) -> int:
        return len(self.cosets)

    def ids(self, k: int) -> tuple:
        return tuple(self.group.elements[g] for g in self.cosets[k])


def left_cosets(G: FiniteGroup, H: SubgroupHandle) -> CosetSpace:
    """Left cosets ``gH``, ordered by least member.

    The representative is the least member, except that the coset ``H``
    is always represented by the identity.
    """
    coset_of = np.full(len(G), -1, dtype=int)
    cosets, reps = [], []
    hm = list(H.members)
    for g in range(len(G)):
        if coset_of[g] >= 0:
            continue
        block = tuple(sorted(int(x) for x in G.table[g, hm]))
        coset_of[list(block)] = len(cosets)
        cosets.append(block)
        reps.append(G.e if G.e in block else block[0])
    return CosetSpace(G, H, tuple(cosets), tuple(reps), coset_of)


def coset_action(G: FiniteGroup, cosets: CosetSpace) -> np.ndarray:
    """``perm[g, i]`` is the coset index of ``g * (coset i)``; checked to be an action."""
    reps = np.asarray(cosets.representatives, dtype=int)
    perm = cosets.coset_of[G.table[:, reps]]
    if not np.array_equal(perm[G.e], np.arange(len(cosets))):
        raise CertificateError("identity does not fix every coset")
    # perm[table[g, h]] == perm[g][perm[h]]
    # perm[:, perm][g, h, i] = perm[g, perm[h, i]]
    if not np.array_equal(perm[G.table], perm[:, perm]):
        raise CertificateError("left multiplication on cosets is not an action")
    return perm


def stabilizer(perm: np.ndarray, i: int) -> list[int]:
    return [int(g) for g in np.flatnonzero(perm[:, i] == i)]


# -- a small library of groups -------------------------------------------


def cyclic_group(n: int) -> FiniteGroup:
    return group_from_function(range(n), lambda a, b: (a + b) % n, 0, name=f"Z{n}")


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; ids ``r{k}`` and ``s{k}`` (s_k = s r^k)."""
    elements = [("r", k) for k in range(n)] + [("s", k) for k in range(n)]

    def mul(a, b):
        (x, i), (y, j) = a, b
        if x == "r" and y == "r":
            return ("r", (i + j) % n)
        if x == "r":  # r^i s r^j = s r^{j-i}
            return ("s", (j - i) % n)
        if y == "r":  # s r^i r^j
            return ("s", (i + j) % n)
        return ("r", (j - i) % n)  # s r^i s r^j = r^{j-i}

    G = group_from_function(elements, mul, ("r", 0), name=f"D{n}")
    ids = [f"{x}{k}" for x, k in elements]
    return FiniteGroup(ids, G.table, "r0", name=G.name)


def symmetric_group(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))
    return group_from_function(
        perms, lambda a, b: tuple(a[b[i]] for i in range(n)), tuple(range(n)), name=f"S{n}"
    )


def alternating_group(n: int) -> FiniteGroup:
    def even(p):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        return inv % 2 == 0

    perms = [p for p in itertools.permutations(range(n)) if even(p)]
    return group_from_function(
        perms, lambda a, b: tuple(a[b[i]] for i in range(n)), tuple(range(n)), name=f"A{n}"
    )


def quaternion_group() -> FiniteGroup:
    # unit quaternions {±1, ±i, ±j, ±k} as (sign, unit)
    units = {("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
             ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
             ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
             ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1")}
    elements = [(s, u) for s in (1, -1) for u in "1ijk"]

    def mul(a, b):
        s, u = units[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    G = group_from_function(elements, mul, (1, "1"), name="Q8")
    ids = [("" if s > 0 else "-") + u for s, u in elements]
    return FiniteGroup(ids, G.table, "1", name="Q8")


def direct_product(G1: FiniteGroup, G2: FiniteGroup) -> FiniteGroup:
    n2 = len(G2)
    elements = [(a, b) for a in G1.elements for b in G2.elements]
    table = (G1.table[:, None, :, None] * n2 + G2.table[None, :, None, :]).reshape(
        len(elements), len(elements)
    )
    return FiniteGroup(elements, table, (G1.identity, G2.identity),
                       name=f"{G1.name}x{G2.name}")


def trivial_group() -> FiniteGroup:
    return FiniteGroup(["e"], [[0]], "e", name="1")


def small_groups() -> dict[str, FiniteGroup]:
    """Groups of order 2, 4, 6, 8 and 12 used by the randomized suites."""
    z2 = cyclic_group(2)
    return {
        "Z2": z2,
        "Z4": cyclic_group(4),
        "V4": direct_product(z2, z2),
        "Z6": cyclic_group(6),
        "S3": symmetric_group(3),
        "Z8": cyclic_group(8),
        "Z2xZ4": direct_product(z2, cyclic_group(4)),
        "Z2^3": direct_product(direct_product(z2, z2), z2),
        "D4": dihedral_group(4),
        "Q8": quaternion_group(),
        "Z12": cyclic_group(12),
        "Z2xZ6": direct_product(z2, cyclic_group(6)),
        "A4": alternating_group(4),
        "D6": dihedral_group(6),
        "Dic3": _dicyclic3(),
    }


def _dicyclic3() -> FiniteGroup:
    # Z3 x| Z4 with the generator of Z4 inverting Z3
    elements = [(a, b) for a in range(3) for b in range(4)]

    def mul(x, y):
        (a, b), (c, d) = x, y
        sign = -1 if b % 2 else 1
        return ((a + sign * c) % 3, (b + d) % 4)

    return group_from_function(elements, mul, (0, 0), name="Dic3")
