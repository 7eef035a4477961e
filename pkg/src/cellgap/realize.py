"""Chain models realizing a projective class as the obstruction of a complex.

Given a base complex Y ending in degree k-1 and an idempotent E on F = ZG^r,
``realize_finite`` wedges a bouquet of (k-1)-spheres onto Y (the F summand)
and then attaches cells whose boundaries alternate between E and 1 - E up to
degree l+1.  ``realize_stage`` builds the nested finite stages in which each
new block of k-cells hits one copy of F by E and the next copy by 1 - E.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complex import FreeChainComplex, require_valid
from .groupring import GroupRingMatrix, MalformedInputError, hconcat, vconcat


@dataclass(frozen=True)
class RealizationInput:
    y: FreeChainComplex
    e: GroupRingMatrix
    k: int
    l: int

    def __post_init__(self):
        if not 3 <= self.k < self.l:
            raise MalformedInputError("need 3 <= k < l")
        if self.e.group != self.y.group:
            raise MalformedInputError("idempotent and base complex over different groups")
        if self.e.rows != self.e.cols or not self.e.is_idempotent():
            raise MalformedInputError("E must be a square idempotent")
        if not self.y.is_empty and self.y.top_degree > self.k - 1:
            if any(self.y.rank(d) for d in range(self.k, self.y.top_degree + 1)):
                raise MalformedInputError("base complex must vanish above degree k-1")
        require_valid(self.y)

    @property
    def r(self) -> int:
        return self.e.rows


def _base_parts(inp: RealizationInput, extra: int):
    """Ranks and boundaries of Y with ``extra`` free generators added in degree k-1."""
    y, k, g = inp.y, inp.k, inp.y.group
    ranks = {d: y.rank(d) for d in y.degrees()} if not y.is_empty else {}
    bd = {d: y.boundary(d) for d in ranks if d - 1 in ranks and d < k}
    ranks[k - 1] = y.rank(k - 1) + extra
    if k - 1 in bd or y.rank(k - 2):
        old = y.boundary(k - 1)
        bd[k - 1] = hconcat([old, GroupRingMatrix.zeros(g, y.rank(k - 2), extra)], g, y.rank(k - 2))
    return ranks, bd


def realize_finite(inp: RealizationInput) -> FreeChainComplex:
    y, e, k, l = inp.y, inp.e, inp.k, inp.l
    g, r = y.group, inp.r
    ranks, bd = _base_parts(inp, r)
    if r == 0:
        return FreeChainComplex.from_degrees(g, ranks, bd)
    one = GroupRingMatrix.identity(g, r)
    q = one - e
    bd[k] = vconcat([GroupRingMatrix.zeros(g, y.rank(k - 1), r), e], g, r)
    for d in range(k, l + 2):
        ranks[d] = r
    for d in range(k + 1, l + 2):
        bd[d] = q if (d - k) % 2 == 1 else e
    out = FreeChainComplex.from_degrees(g, ranks, bd)
    require_valid(out)
    return out


def realize_stage(inp: RealizationInput, j: int) -> FreeChainComplex:
    if j < 1:
        raise MalformedInputError("stage index must be at least 1")
    y, e, k = inp.y, inp.e, inp.k
    g, r = y.group, inp.r
    ranks, bd = _base_parts(inp, j * r)
    cells = (j - 1) * r
    if cells:
        yk = y.rank(k - 1)
        d = GroupRingMatrix.zeros(g, yk + j * r, cells)
        q = GroupRingMatrix.identity(g, r) - e
        for s in range(j - 1):
            row, col = yk + s * r, s * r
            d.coeffs[row:row + r, col:col + r, :] = e.coeffs
            d.coeffs[row + r:row + 2 * r, col:col + r, :] = q.coeffs
        ranks[k] = cells
        bd[k] = d
    out = FreeChainComplex.from_degrees(g, ranks, bd)
    require_valid(out)
    return out


def stage_inclusion(inp: RealizationInput, j: int) -> dict[int, tuple[int, ...]]:
    """Basis indices of stage j inside stage j+1."""
    stage = realize_stage(inp, j)
    return {d: tuple(range(stage.rank(d))) for d in stage.degrees()}
