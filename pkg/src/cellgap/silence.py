"""Deciding cohomology silence in a degree through a retraction criterion.

A complex C is silent in degree k (every H^k(C; R) vanishes) exactly when

* (b1) the boundary D = d_k is von Neumann regular, D B D = D for some B over ZG,
* (b2) H_k(C) = 0.

Both directions come with certificates.  A positive answer carries B and a
matrix A with ``d_{k+1} A + B d_k = 1``, which proves that every k-cycle is a
boundary.  A negative answer carries a coefficient module R, a cocycle in
Hom(C_k, R) and a functional separating it from the coboundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import intmat
from .complex import (FreeChainComplex, boundary_module, coboundary_matrix, homology,
                      require_valid, _block_relations)
from .groupring import GroupRingMatrix, flatten, support_blocks
from .intmat import matmul
from .modules import FPModule, LatticeSolver


@dataclass
class CounterexampleCocycle:
    """A nonzero class in H^k(C; R).

    ``cocycle`` lists the values on the free generators of C_k,
    ``relation_coeffs`` shows that its coboundary lies in the relations of R
    and ``functional``/``modulus`` separate it from the coboundaries.
    """

    module: FPModule
    cocycle: np.ndarray
    relation_coeffs: np.ndarray
    functional: np.ndarray
    modulus: int
    origin: str


@dataclass
class SilenceCertificate:
    degree: int
    silent: bool
    retraction: GroupRingMatrix | None = None
    contraction: GroupRingMatrix | None = None
    homology_witness: np.ndarray | None = None
    homology_functional: tuple[np.ndarray, int] | None = None
    counterexample: CounterexampleCocycle | None = field(default=None, repr=False)
    reason: str = ""

    @property
    def kind(self) -> str:
        return "silent" if self.silent else "not-silent"

    def to_json(self) -> dict:
        out: dict = {"degree": self.degree, "kind": self.kind, "reason": self.reason}
        if self.retraction is not None:
            out["retraction"] = self.retraction.to_json()
        if self.contraction is not None:
            out["contraction"] = self.contraction.to_json()
        if self.homology_witness is not None:
            out["homology_witness"] = [int(v) for v in self.homology_witness]
            psi, m = self.homology_functional
            out["homology_functional"] = {"row": [int(v) for v in psi], "modulus": m}
        if self.counterexample is not None:
            cx = self.counterexample
            out["counterexample"] = {
                "origin": cx.origin,
                "module": cx.module.to_json(),
                "cocycle": [int(v) for v in cx.cocycle],
                "relation_coeffs": [int(v) for v in cx.relation_coeffs],
                "functional": [int(v) for v in cx.functional],
                "modulus": cx.modulus,
            }
        return out


# -------------------------------------------------------------------------
# the retraction system


def identity_columns(group_order: int, n: int) -> list[int]:
    """Flattened positions of the free generators (element index 0 of each block)."""
    return [i * group_order for i in range(n)]


def regularity_system(d: GroupRingMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Integer system ``M b = v`` equivalent to ``d B d = d``.

    Unknowns are the coefficients ``B[i, j, g]`` in row-major order; equations
    are the coefficients of ``d B d``, read off the identity columns of the
    flattened product.
    """
    g = d.group
    n = g.order
    rows, cols = d.shape  # C_k has ``cols`` generators
    flat = flatten(d)
    idc = identity_columns(n, cols)
    right = flat[:, idc]  # (rows*n) x cols
    unknowns = cols * rows * n
    system = intmat.zeros(rows * n * cols, unknowns)
    col = 0
    for i in range(cols):
        left = flat[:, i * n:(i + 1) * n]
        for j in range(rows):
            rj = right[j * n:(j + 1) * n, :]
            for h in range(n):
                lh = intmat.zeros(n, n)
                for y in range(n):
                    lh[g.mult[h][y], y] = 1
                block = matmul(left, matmul(lh, rj))
                system[:, col] = block.reshape(-1)
                col += 1
    target = right.reshape(-1)
    return system, target


def find_retraction(d: GroupRingMatrix) -> GroupRingMatrix | None:
    """Some B with ``d B d == d``, or None if d is not regular."""
    rows, cols = d.shape
    if rows == 0 or cols == 0 or d.is_zero():
        return GroupRingMatrix.zeros(d.group, cols, rows)
    blocks = support_blocks(d)
    if len(blocks) > 1 or len(blocks[0][0]) < rows or len(blocks[0][1]) < cols:
        # solve block by block so that a block-diagonal d gets a block-diagonal B
        out = GroupRingMatrix.zeros(d.group, cols, rows)
        for r, c in blocks:
            b = find_retraction(d.block(r, c))
            if b is None:
                return None
            out.coeffs[np.ix_(c, r, range(d.group.order))] = b.coeffs
        return out
    system, target = regularity_system(d)
    sol = intmat.solve_integer_linear(system, target)
    if sol is None:
        return None
    coeffs = np.array(sol, dtype=object).reshape(cols, rows, d.group.order)
    return GroupRingMatrix(d.group, coeffs)


def solve_left_factor(d: GroupRingMatrix, rhs: GroupRingMatrix) -> GroupRingMatrix | None:
    """Some A over ZG with ``d A == rhs`` (lifting free generators), or None."""
    g = d.group
    n = g.order
    if rhs.cols == 0:
        return GroupRingMatrix.zeros(g, d.cols, 0)
    if d.cols == 0:
        return GroupRingMatrix.zeros(g, 0, rhs.cols) if rhs.is_zero() else None
    flat_rhs = flatten(rhs)[:, identity_columns(n, rhs.cols)]
    sol = intmat.solve_integer_linear(flatten(d), flat_rhs)
    if sol is None:
        return None
    coeffs = np.array(sol, dtype=object).reshape(d.cols, n, rhs.cols).transpose(0, 2, 1)
    return GroupRingMatrix(g, np.ascontiguousarray(coeffs))


# -------------------------------------------------------------------------
# counterexamples


def _cocycle_certificate(c: FreeChainComplex, k: int, module: FPModule, alpha: np.ndarray,
                         origin: str) -> CounterexampleCocycle:
    nk = c.rank(k)
    delta_next = coboundary_matrix(c, module, k)
    rel_next = _block_relations(module, c.rank(k + 1))
    image = matmul(delta_next, alpha.reshape(-1, 1))
    if rel_next.shape[1]:
        coeffs = intmat.solve_integer_linear(rel_next, image[:, 0])
        if coeffs is None:
            raise AssertionError("counterexample cochain is not a cocycle")
    else:
        if not intmat.is_zero(image):
            raise AssertionError("counterexample cochain is not a cocycle")
        coeffs = intmat.zeros(0, 1)[:, 0]
    span = intmat.hstack([coboundary_matrix(c, module, k - 1), _block_relations(module, nk)],
                         module.generators * nk)
    sep = intmat.separating_functional(span, alpha)
    if sep is None:
        raise AssertionError("counterexample cochain is a coboundary")
    return CounterexampleCocycle(module, alpha, np.array(coeffs, dtype=object), sep[0], sep[1],
                                 origin)


def _boundary_counterexample(c: FreeChainComplex, k: int) -> CounterexampleCocycle:
    """R = B_{k-1} with the cocycle given by the boundary map itself."""
    mod = boundary_module(c, k)
    flat = c.flat_boundary(k)
    basis = intmat.image_basis(flat)
    vals = LatticeSolver(basis).coords(flat[:, identity_columns(c.group.order, c.rank(k))])
    alpha = vals.T.reshape(-1)  # generator-major
    return _cocycle_certificate(c, k, mod, alpha, "boundary-module")


def _homology_counterexample(c: FreeChainComplex, k: int, b: GroupRingMatrix,
                             h) -> CounterexampleCocycle:
    """R = H_k with the cocycle projecting C_k onto its cycles."""
    mod = h.module
    p = c.rank(k) * c.group.order
    proj = intmat.identity(p) - matmul(flatten(b), c.flat_boundary(k))
    vals = LatticeSolver(h.cycles).coords(proj[:, identity_columns(c.group.order, c.rank(k))])
    alpha = vals.T.reshape(-1)
    return _cocycle_certificate(c, k, mod, alpha, "homology-module")


# -------------------------------------------------------------------------
# decision


def silent_in_degree(c: FreeChainComplex, k: int) -> SilenceCertificate:
    if k < 1:
        raise ValueError("silence is only decided in degrees k >= 1")
    require_valid(c)
    d = c.boundary(k)
    b = find_retraction(d)
    if b is None:
        cx = _boundary_counterexample(c, k)
        return SilenceCertificate(k, False, counterexample=cx,
                                  reason="boundary is not von Neumann regular")
    h = homology(c, k)
    if not h.is_zero:
        witness = h.nonzero_class()
        sep = intmat.separating_functional(c.flat_boundary(k + 1), witness)
        cx = _homology_counterexample(c, k, b, h)
        return SilenceCertificate(k, False, retraction=b, homology_witness=witness,
                                  homology_functional=sep, counterexample=cx,
                                  reason=f"H_{k} = {h.group}")
    one = GroupRingMatrix.identity(c.group, c.rank(k))
    a = solve_left_factor(c.boundary(k + 1), one - b @ d)
    if a is None:
        raise AssertionError("cycles are boundaries but no contraction was found")
    return SilenceCertificate(k, True, retraction=b, contraction=a)


@dataclass
class RangeReport:
    certificates: list[SilenceCertificate]

    @property
    def silent(self) -> bool:
        return all(c.silent for c in self.certificates)

    def to_json(self) -> dict:
        return {"silent": self.silent, "degrees": [c.to_json() for c in self.certificates]}


def silent_in_range(c: FreeChainComplex, k: int, l: int) -> RangeReport:
    if k > l:
        raise ValueError("empty degree range")
    return RangeReport([silent_in_degree(c, j) for j in range(k, l + 1)])


# -------------------------------------------------------------------------
# verification by matrix arithmetic only


def verify_certificate(c: FreeChainComplex, cert: SilenceCertificate) -> bool:
    k = cert.degree
    d = c.boundary(k)
    if cert.silent:
        b, a = cert.retraction, cert.contraction
        if b is None or a is None or b.shape != (d.cols, d.rows):
            return False
        if not d @ b @ d == d:
            return False
        one = GroupRingMatrix.identity(c.group, c.rank(k))
        return c.boundary(k + 1) @ a + b @ d == one
    cx = cert.counterexample
    if cx is None:
        return False
    mod = cx.module
    nk = c.rank(k)
    delta = coboundary_matrix(c, mod, k)
    rel_next = _block_relations(mod, c.rank(k + 1))
    lhs = matmul(delta, cx.cocycle.reshape(-1, 1))
    rhs = matmul(rel_next, np.array(cx.relation_coeffs, dtype=object).reshape(-1, 1)) \
        if rel_next.shape[1] else intmat.zeros(lhs.shape[0], 1)
    if not (lhs == rhs).all():
        return False
    span = intmat.hstack([coboundary_matrix(c, mod, k - 1), _block_relations(mod, nk)],
                         mod.generators * nk)
    if not intmat.check_separating(span, cx.cocycle, cx.functional, cx.modulus):
        return False
    if cert.homology_witness is not None:
        z = cert.homology_witness.reshape(-1, 1)
        if not intmat.is_zero(matmul(c.flat_boundary(k), z)):
            return False
        psi, m = cert.homology_functional
        if not intmat.check_separating(c.flat_boundary(k + 1), z, psi, m):
            return False
    return True


__all__ = ["SilenceCertificate", "CounterexampleCocycle", "RangeReport", "silent_in_degree",
           "silent_in_range", "find_retraction", "solve_left_factor", "verify_certificate"]
