"""Finitely presented ZG-modules given by integer data.

A module is ``Z^m / span(relations)`` with a left G-action by integer
matrices on ``Z^m`` that preserves the relation lattice.  With no relations
it is a lattice (Z-free of finite rank).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import intmat
from .groupring import GroupData, MalformedInputError
from .intmat import AbelianGroup, as_intmat, matmul


class LatticeSolver:
    """Reusable exact coordinates with respect to a fixed lattice basis."""

    def __init__(self, basis: np.ndarray):
        self.basis = basis
        self._snf = intmat.smith_normal_form(basis) if basis.shape[1] and basis.shape[0] else None

    def coords(self, vecs: np.ndarray) -> np.ndarray:
        n = self.basis.shape[1]
        if vecs.shape[1] == 0 or n == 0:
            if n == 0 and not intmat.is_zero(vecs):
                raise ValueError("vectors do not lie in the zero lattice")
            return intmat.zeros(n, vecs.shape[1])
        snf = self._snf
        c = matmul(snf.U, vecs)
        y = intmat.zeros(n, vecs.shape[1])
        for i in range(c.shape[0]):
            for j in range(c.shape[1]):
                v = c[i, j]
                if i < snf.rank:
                    q, r = divmod(v, snf.D[i, i])
                    if r:
                        raise ValueError("vectors do not lie in the lattice")
                    y[i, j] = q
                elif v != 0:
                    raise ValueError("vectors do not lie in the lattice")
        return matmul(snf.V, y)


@dataclass(eq=False)
class FPModule:
    group: GroupData
    action: tuple[np.ndarray, ...]
    relations: np.ndarray

    def __post_init__(self):
        m = self.generators
        if len(self.action) != self.group.order:
            raise MalformedInputError("need one action matrix per group element")
        for a in self.action:
            if a.shape != (m, m):
                raise MalformedInputError("action matrices must be generators x generators")
        if self.relations.shape[0] != m:
            raise MalformedInputError("relation matrix must have one row per generator")

    @property
    def generators(self) -> int:
        return self.action[0].shape[0] if self.action else 0

    rank = generators

    @property
    def is_lattice(self) -> bool:
        return self.relations.shape[1] == 0

    def check(self) -> None:
        """Action is a homomorphism into automorphisms preserving the relations."""
        g, m = self.group, self.generators
        if not (self.action[0] == intmat.identity(m)).all():
            raise MalformedInputError("identity must act trivially")
        for a in range(g.order):
            for b in range(g.order):
                if not (matmul(self.action[a], self.action[b]) == self.action[g.mult[a][b]]).all():
                    raise MalformedInputError("action is not a homomorphism")
        if self.relations.shape[1]:
            solver = LatticeSolver(intmat.image_basis(self.relations))
            for a in self.action:
                solver.coords(matmul(a, self.relations))

    def underlying(self) -> AbelianGroup:
        return intmat.cokernel_group(self.relations) if self.generators else AbelianGroup()

    def is_torsion_free(self) -> bool:
        return not self.underlying().torsion

    def to_lattice(self) -> "FPModule":
        """Isomorphic module without relations; requires Z-torsion-freeness."""
        if self.is_lattice:
            return self
        snf = intmat.smith_normal_form(self.relations)
        if any(d != 1 for d in snf.diagonal):
            raise ValueError("module has torsion, not a lattice")
        r, m = snf.rank, self.generators
        proj = snf.U[r:, :]
        sect = snf.U_inv[:, r:]
        action = tuple(matmul(matmul(proj, a), sect) for a in self.action)
        return FPModule(self.group, action, intmat.zeros(m - r, 0))

    def rho_tilde(self, coeffs: Sequence[int]) -> np.ndarray:
        """Matrix of ``x -> x . a`` for the right action ``x . g = g^-1 x``."""
        m = self.generators
        out = intmat.zeros(m, m)
        inv = self.group.inverse
        for g, c in enumerate(coeffs):
            if c:
                out = out + c * self.action[inv[g]]
        return out

    def to_json(self) -> dict:
        return {
            "generators": self.generators,
            "relations": [[int(x) for x in row] for row in self.relations],
            "action": [[[int(x) for x in row] for row in a] for a in self.action],
        }

    @classmethod
    def from_json(cls, group: GroupData, data: dict) -> "FPModule":
        m = int(data.get("generators", data.get("rank", 0)))
        act = tuple(as_intmat(a, shape=(m, m)) for a in data["action"])
        rel = as_intmat(data.get("relations", []), shape=(m, 0))
        if rel.shape[0] != m:
            rel = intmat.zeros(m, 0) if rel.size == 0 else rel
        mod = cls(group, act, rel)
        mod.check()
        return mod

    def direct_sum(self, other: "FPModule") -> "FPModule":
        m1, m2 = self.generators, other.generators
        act = []
        for a, b in zip(self.action, other.action):
            z = intmat.zeros(m1 + m2, m1 + m2)
            z[:m1, :m1] = a
            z[m1:, m1:] = b
            act.append(z)
        rel = intmat.zeros(m1 + m2, self.relations.shape[1] + other.relations.shape[1])
        rel[:m1, :self.relations.shape[1]] = self.relations
        rel[m1:, self.relations.shape[1]:] = other.relations
        return FPModule(self.group, tuple(act), rel)

    def restrict(self, subgroup: Sequence[int]) -> tuple[GroupData, "FPModule"]:
        """Restriction to a subgroup, with the subgroup re-indexed from 0."""
        sub = list(subgroup)
        pos = {g: i for i, g in enumerate(sub)}
        table = [[pos[self.group.mult[a][b]] for b in sub] for a in sub]
        from .groupring import group_from_table
        h = group_from_table(f"{self.group.name}|{len(sub)}", [self.group.elements[g] for g in sub],
                             table, [self.group.omega[g] for g in sub])
        return h, FPModule(h, tuple(self.action[g] for g in sub), self.relations)


def lattice_module(group: GroupData, action: Sequence) -> FPModule:
    act = tuple(as_intmat(a) for a in action)
    m = act[0].shape[0] if act else 0
    mod = FPModule(group, act, intmat.zeros(m, 0))
    mod.check()
    return mod


def zero_module(group: GroupData) -> FPModule:
    return FPModule(group, tuple(intmat.zeros(0, 0) for _ in range(group.order)), intmat.zeros(0, 0))


def trivial_module(group: GroupData) -> FPModule:
    return FPModule(group, tuple(intmat.identity(1) for _ in range(group.order)), intmat.zeros(1, 0))


def character_module(group: GroupData, chi: Sequence[int]) -> FPModule:
    act = tuple(as_intmat([[int(c)]]) for c in chi)
    return lattice_module(group, act)


def regular_module(group: GroupData) -> FPModule:
    """ZG with left multiplication."""
    n = group.order
    act = []
    for g in range(n):
        a = intmat.zeros(n, n)
        for x in range(n):
            a[group.mult[g][x], x] = 1
        act.append(a)
    return FPModule(group, tuple(act), intmat.zeros(n, 0))


def augmentation_ideal(group: GroupData) -> FPModule:
    """Kernel of ZG -> Z, basis ``g - e`` for g != e."""
    n = group.order
    act = []
    for h in range(n):
        a = intmat.zeros(n - 1, n - 1)
        for g in range(1, n):
            # h(g - e) = (hg - e) - (h - e)
            hg = group.mult[h][g]
            if hg != 0:
                a[hg - 1, g - 1] += 1
            if h != 0:
                a[h - 1, g - 1] -= 1
        act.append(a)
    return FPModule(group, tuple(act), intmat.zeros(n - 1, 0))


def permutation_module(group: GroupData, subgroup: Sequence[int]) -> FPModule:
    """Z[G/H] on left cosets, G acting by left multiplication."""
    sub = set(subgroup)
    cosets: list[frozenset] = []
    for g in range(group.order):
        c = frozenset(group.mult[g][h] for h in sub)
        if c not in cosets:
            cosets.append(c)
    idx = {}
    for i, c in enumerate(cosets):
        for x in c:
            idx[x] = i
    k = len(cosets)
    act = []
    for g in range(group.order):
        a = intmat.zeros(k, k)
        for i, c in enumerate(cosets):
            rep = min(c)
            a[idx[group.mult[g][rep]], i] = 1
        act.append(a)
    return FPModule(group, tuple(act), intmat.zeros(k, 0))


def sign_characters(group: GroupData) -> list[tuple[int, ...]]:
    """All homomorphisms G -> {+-1}, found through the index-2 subgroups."""
    chars = [(1,) * group.order]
    for h in group.subgroups():
        if 2 * len(h) == group.order:
            hs = set(h)
            chi = tuple(1 if g in hs else -1 for g in range(group.order))
            chars.append(chi)
    return chars


def conjugate_module(mod: FPModule, u: np.ndarray, u_inv: np.ndarray) -> FPModule:
    """Same module in the generator basis changed by a unimodular matrix."""
    act = tuple(matmul(matmul(u, a), u_inv) for a in mod.action)
    rel = matmul(u, mod.relations) if mod.relations.shape[1] else intmat.zeros(mod.generators, 0)
    return FPModule(mod.group, act, rel)


def random_unimodular(n: int, rng: random.Random, steps: int = 6) -> tuple[np.ndarray, np.ndarray]:
    u, ui = intmat.identity(n), intmat.identity(n)
    if n < 2:
        return u, ui
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        q = rng.choice([-2, -1, 1, 2])
        u[i] = u[i] + q * u[j]
        ui[:, j] = ui[:, j] - q * ui[:, i]
    return u, ui


def random_lattices(group: GroupData, count: int, seed: int = 0, max_rank: int = 3) -> list[FPModule]:
    """Deterministic pseudo-random lattices of rank <= max_rank.

    Built from sign characters and permutation modules on cosets of small
    index, summed and then disguised by a random unimodular change of basis.
    """
    rng = random.Random(seed)
    pieces: list[FPModule] = [character_module(group, chi) for chi in sign_characters(group)]
    for h in group.subgroups():
        idx = group.order // len(h)
        if 1 < idx <= max_rank:
            pieces.append(permutation_module(group, h))
    if group.order <= max_rank:
        pieces.append(regular_module(group))
    out = []
    for _ in range(count):
        mod = rng.choice(pieces)
        while True:
            extra = rng.choice(pieces)
            if mod.generators + extra.generators > max_rank or rng.random() < 0.4:
                break
            mod = mod.direct_sum(extra)
        u, ui = random_unimodular(mod.generators, rng)
        out.append(conjugate_module(mod, u, ui))
    return out
