"""Finite free chain complexes over ZG, their homology and cohomology.

``boundaries[i]`` is the boundary from degree ``bottom_degree + i + 1`` to
degree ``bottom_degree + i``; it has ``ranks[i + 1]`` columns and
``ranks[i]`` rows.  Chains are column vectors and ZG acts on them from the
right; the left module structure used for Hom into coefficient modules is
``g . v = v g^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import intmat
from .groupring import (GroupData, GroupRingMatrix, MalformedInputError, chain_action,
                        cyclic_group, direct_sum, flatten)
from .intmat import AbelianGroup, matmul
from .modules import FPModule, LatticeSolver


class InvalidComplexError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FreeChainComplex:
    group: GroupData
    bottom_degree: int
    ranks: tuple[int, ...]
    boundaries: tuple[GroupRingMatrix, ...]

    @classmethod
    def from_degrees(cls, group: GroupData, ranks: Mapping[int, int],
                     boundaries: Mapping[int, GroupRingMatrix] | None = None) -> "FreeChainComplex":
        """Build from ``{degree: rank}`` and ``{degree: boundary out of degree}``;
        missing boundaries are zero."""
        boundaries = dict(boundaries or {})
        degs = [d for d, r in ranks.items() if r]
        if not degs:
            return cls(group, 0, (), ())
        lo, hi = min(degs), max(degs)
        rk = tuple(int(ranks.get(d, 0)) for d in range(lo, hi + 1))
        bd = []
        for d in range(lo + 1, hi + 1):
            m = boundaries.get(d)
            if m is None:
                m = GroupRingMatrix.zeros(group, ranks.get(d - 1, 0), ranks.get(d, 0))
            bd.append(m)
        for d in boundaries:
            if not lo < d <= hi and not boundaries[d].is_zero():
                raise MalformedInputError(f"nonzero boundary out of degree {d} outside support")
        return cls(group, lo, rk, tuple(bd))

    # shape ------------------------------------------------------------
    @property
    def top_degree(self) -> int:
        return self.bottom_degree + len(self.ranks) - 1

    @property
    def is_empty(self) -> bool:
        return not any(self.ranks)

    def degrees(self) -> range:
        return range(self.bottom_degree, self.top_degree + 1)

    def rank(self, d: int) -> int:
        i = d - self.bottom_degree
        return self.ranks[i] if 0 <= i < len(self.ranks) else 0

    def rank_dict(self) -> dict[int, int]:
        return {d: self.rank(d) for d in self.degrees() if self.rank(d)}

    def boundary(self, d: int) -> GroupRingMatrix:
        """The boundary C_d -> C_{d-1} (a zero matrix outside the support)."""
        i = d - self.bottom_degree - 1
        if 0 <= i < len(self.boundaries):
            return self.boundaries[i]
        return GroupRingMatrix.zeros(self.group, self.rank(d - 1), self.rank(d))

    def flat_boundary(self, d: int) -> np.ndarray:
        return flatten(self.boundary(d))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * self.rank(d) for d in self.degrees()) if self.ranks else 0

    def euler_characteristic_flat(self) -> int:
        return self.group.order * self.euler_characteristic()

    def boundary_dict(self) -> dict[int, GroupRingMatrix]:
        return {d: self.boundary(d) for d in range(self.bottom_degree + 1, self.top_degree + 1)}

    def replace(self, ranks: Mapping[int, int] | None = None,
                boundaries: Mapping[int, GroupRingMatrix] | None = None) -> "FreeChainComplex":
        rk = self.rank_dict() if ranks is None else dict(ranks)
        bd = self.boundary_dict()
        bd.update(boundaries or {})
        bd = {d: m for d, m in bd.items() if m.rows and m.cols}
        return FreeChainComplex.from_degrees(self.group, rk, bd)

    def direct_sum(self, other: "FreeChainComplex") -> "FreeChainComplex":
        if other.group != self.group:
            raise MalformedInputError("direct sum of complexes over different groups")
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        degs = set(self.degrees()) | set(other.degrees())
        ranks = {d: self.rank(d) + other.rank(d) for d in degs}
        bd = {d: direct_sum(self.boundary(d), other.boundary(d)) for d in degs}
        return FreeChainComplex.from_degrees(self.group, ranks, bd)

    def __eq__(self, other):
        if not isinstance(other, FreeChainComplex):
            return NotImplemented
        return (self.group == other.group and self.rank_dict() == other.rank_dict()
                and all(self.boundary(d) == other.boundary(d)
                        for d in set(self.degrees()) | set(other.degrees())))

    __hash__ = None


@dataclass
class Verdict:
    valid: bool
    degree: int | None = None
    reason: str = ""
    witness_column: int | None = None

    def to_json(self) -> dict:
        return {"valid": self.valid, "degree": self.degree, "reason": self.reason,
                "witness_column": self.witness_column}


def validate(c: FreeChainComplex) -> Verdict:
    if len(c.boundaries) != max(len(c.ranks) - 1, 0):
        return Verdict(False, None, "number of boundary matrices does not match ranks")
    for d in range(c.bottom_degree + 1, c.top_degree + 1):
        m = c.boundary(d)
        if m.group != c.group:
            return Verdict(False, d, "boundary over a different group")
        if m.shape != (c.rank(d - 1), c.rank(d)):
            return Verdict(False, d, f"boundary out of degree {d} has shape {m.shape}, "
                                     f"expected {(c.rank(d - 1), c.rank(d))}")
    for d in range(c.bottom_degree + 2, c.top_degree + 1):
        prod = c.boundary(d - 1) @ c.boundary(d)
        if not prod.is_zero():
            col = next(j for j in range(prod.cols) if any(v != 0 for v in prod.coeffs[:, j, :].flat))
            return Verdict(False, d, "boundary composed with boundary is nonzero", col)
    return Verdict(True)


def require_valid(c: FreeChainComplex) -> None:
    v = validate(c)
    if not v.valid:
        raise InvalidComplexError(f"invalid complex at degree {v.degree}: {v.reason}")


# -------------------------------------------------------------------------
# homology


def restricted_action(basis: np.ndarray, action: Sequence[np.ndarray],
                      solver: LatticeSolver | None = None) -> tuple[np.ndarray, ...]:
    """Matrices of an action restricted to an invariant sublattice."""
    solver = solver or LatticeSolver(basis)
    return tuple(solver.coords(matmul(a, basis)) for a in action)


@dataclass
class HomologyResult:
    degree: int
    group: AbelianGroup
    module: FPModule
    cycles: np.ndarray
    witnesses: np.ndarray = field(repr=False)

    @property
    def is_zero(self) -> bool:
        return self.group.is_zero

    def nonzero_class(self) -> np.ndarray | None:
        """A flattened cycle that is not a boundary, if any."""
        if self.witnesses.shape[1] == 0:
            return None
        return self.witnesses[:, 0]

    def to_json(self) -> dict:
        return {"degree": self.degree, "group": str(self.group), "invariants": self.group.to_json(),
                "module": self.module.to_json()}


def homology(c: FreeChainComplex, j: int, with_module: bool = True) -> HomologyResult:
    """H_j = ker d_j / im d_{j+1} as a finitely presented ZG-module."""
    g = c.group
    n = c.rank(j)
    size = n * g.order
    if n == 0:
        empty = FPModule(g, tuple(intmat.zeros(0, 0) for _ in range(g.order)), intmat.zeros(0, 0))
        return HomologyResult(j, AbelianGroup(), empty, intmat.zeros(0, 0), intmat.zeros(0, 0))
    d_out = c.flat_boundary(j)
    d_in = c.flat_boundary(j + 1)
    cycles = intmat.kernel_basis(d_out) if d_out.shape[0] else intmat.identity(size)
    sq = intmat.subquotient(cycles, d_in, size)
    cycles = sq.cycles
    if with_module:
        solver = LatticeSolver(cycles)
        action = restricted_action(cycles, chain_action(g, n), solver) if cycles.shape[1] else \
            tuple(intmat.zeros(0, 0) for _ in range(g.order))
        module = FPModule(g, action, sq.coords)
    else:
        module = FPModule(g, tuple(intmat.zeros(0, 0) for _ in range(g.order)), intmat.zeros(0, 0))
    return HomologyResult(j, sq.group, module, cycles, sq.generators)


def boundary_module(c: FreeChainComplex, j: int) -> FPModule:
    """B_{j-1} = im d_j as a lattice inside the flattened C_{j-1}."""
    g = c.group
    flat = c.flat_boundary(j)
    basis = intmat.image_basis(flat)
    if basis.shape[1] == 0:
        return FPModule(g, tuple(intmat.zeros(0, 0) for _ in range(g.order)), intmat.zeros(0, 0))
    action = restricted_action(basis, chain_action(g, c.rank(j - 1)))
    return FPModule(g, action, intmat.zeros(basis.shape[1], 0))


# -------------------------------------------------------------------------
# cohomology with local coefficients


def coboundary_matrix(c: FreeChainComplex, r: FPModule, k: int) -> np.ndarray:
    """Integer matrix of delta: Hom(C_k, R) -> Hom(C_{k+1}, R), delta(a) = (-1)^k a o d.

    A cochain is recorded by its values on the basis of C_k, so
    Hom(C_k, R) = R^{rank C_k}.
    """
    d = c.boundary(k + 1)
    m = r.generators
    nk, nk1 = c.rank(k), c.rank(k + 1)
    out = intmat.zeros(m * nk1, m * nk)
    sign = -1 if k % 2 else 1
    for a in range(nk):
        for b in range(nk1):
            coeffs = d.coeffs[a, b, :]
            if any(v != 0 for v in coeffs):
                out[b * m:(b + 1) * m, a * m:(a + 1) * m] = sign * r.rho_tilde(coeffs)
    return out


def _block_relations(r: FPModule, copies: int) -> np.ndarray:
    m, s = r.generators, r.relations.shape[1]
    out = intmat.zeros(m * copies, s * copies)
    for i in range(copies):
        out[i * m:(i + 1) * m, i * s:(i + 1) * s] = r.relations
    return out


def cohomology_local(c: FreeChainComplex, r: FPModule, j: int) -> intmat.Subquotient:
    """H^j(C; R), computed on cochains with values in the presented module R."""
    if r.group != c.group:
        raise MalformedInputError("coefficient module lives over a different group")
    f = coboundary_matrix(c, r, j - 1)
    g = coboundary_matrix(c, r, j)
    return intmat.presented_homology(f, g, _block_relations(r, c.rank(j)),
                                     _block_relations(r, c.rank(j + 1)))


# -------------------------------------------------------------------------
# pairs


@dataclass(frozen=True, eq=False)
class ComplexPair:
    """A basis-aligned subcomplex X of T: ``sub[d]`` lists the basis indices of
    T in degree d that span X_d."""

    total: FreeChainComplex
    sub: Mapping[int, tuple[int, ...]]

    def __post_init__(self):
        for d, idx in self.sub.items():
            if any(not 0 <= i < self.total.rank(d) for i in idx):
                raise MalformedInputError(f"subcomplex index out of range in degree {d}")

    def sub_indices(self, d: int) -> list[int]:
        return sorted(self.sub.get(d, ()))

    def quotient_indices(self, d: int) -> list[int]:
        s = set(self.sub.get(d, ()))
        return [i for i in range(self.total.rank(d)) if i not in s]

    def check_closed(self) -> None:
        t = self.total
        for d in t.degrees():
            cols = self.sub_indices(d)
            outside = self.quotient_indices(d - 1)
            if cols and outside:
                blk = t.boundary(d).block(outside, cols)
                if not blk.is_zero():
                    raise InvalidComplexError(f"designated columns in degree {d} are not closed "
                                              "under the boundary")

    def subcomplex(self) -> FreeChainComplex:
        t = self.total
        ranks = {d: len(self.sub_indices(d)) for d in t.degrees()}
        bd = {d: t.boundary(d).block(self.sub_indices(d - 1), self.sub_indices(d))
              for d in t.degrees()}
        return FreeChainComplex.from_degrees(t.group, ranks, bd)

    def quotient(self) -> FreeChainComplex:
        t = self.total
        ranks = {d: len(self.quotient_indices(d)) for d in t.degrees()}
        bd = {d: t.boundary(d).block(self.quotient_indices(d - 1), self.quotient_indices(d))
              for d in t.degrees()}
        return FreeChainComplex.from_degrees(t.group, ranks, bd)


def relative_homology(pair: ComplexPair, j: int) -> HomologyResult:
    pair.check_closed()
    return homology(pair.quotient(), j)


# -------------------------------------------------------------------------
# standard models


def point_complex(group: GroupData) -> FreeChainComplex:
    return FreeChainComplex.from_degrees(group, {0: 1})


def sphere_complex(n: int, group: GroupData) -> FreeChainComplex:
    """One cell in degrees 0 and n with zero boundary (for n >= 2 over any group)."""
    if n < 1:
        raise MalformedInputError("sphere dimension must be positive")
    if n == 1:
        return FreeChainComplex.from_degrees(group, {0: 1, 1: 1})
    return FreeChainComplex.from_degrees(group, {0: 1, n: 1})


def projective_space_complex(n: int) -> FreeChainComplex:
    """The universal cover of RP^n over C2 = {e, t}: boundaries alternate t - 1 and 1 + t.

    The orientation character is trivial for odd n and nontrivial for even n.
    """
    g = cyclic_group(2, omega_generator=1 if n % 2 else -1, name="C2")
    minus = GroupRingMatrix.from_entries(g, [[[[1, 1], [-1, 0]]]])
    plus = GroupRingMatrix.from_entries(g, [[[[1, 0], [1, 1]]]])
    bd = {j: (minus if j % 2 else plus) for j in range(1, n + 1)}
    return FreeChainComplex.from_degrees(g, {j: 1 for j in range(n + 1)}, bd)
