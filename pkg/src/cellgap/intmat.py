"""Exact integer matrix algebra.

Matrices are numpy arrays with ``dtype=object`` holding Python ints, so
entries never overflow.  Everything here is built on one Smith normal form
routine that also tracks the unimodular transforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def as_intmat(rows, shape=None) -> np.ndarray:
    """Coerce nested lists / arrays into an object-dtype integer matrix."""
    if isinstance(rows, np.ndarray) and rows.dtype == object and rows.ndim == 2:
        return rows
    a = np.array(rows, dtype=object)
    if a.size == 0:
        if a.ndim == 2:
            return zeros(*a.shape)
        return zeros(*(shape or (0, 0)))
    if a.ndim == 1:
        a = a.reshape(1, -1)
    out = np.empty(a.shape, dtype=object)
    for idx, v in np.ndenumerate(a):
        out[idx] = int(v)
    return out


def zeros(m: int, n: int) -> np.ndarray:
    out = np.empty((m, n), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return np.dot(a, b)


def is_zero(a: np.ndarray) -> bool:
    return all(v == 0 for v in a.flat)


def hstack(blocks, rows: int) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return zeros(rows, 0)
    return np.concatenate(blocks, axis=1)


def vstack(blocks, cols: int) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return zeros(0, cols)
    return np.concatenate(blocks, axis=0)


def det(a: np.ndarray) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = [[int(v) for v in row] for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass
class SmithForm:
    """``U @ A @ V == D``; ``U_inv`` is kept because lattice code needs it."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    U_inv: np.ndarray
    rank: int = field(init=False)

    def __post_init__(self):
        r = 0
        while r < min(self.D.shape) and self.D[r, r] != 0:
            r += 1
        self.rank = r

    @property
    def diagonal(self) -> list[int]:
        return [int(self.D[i, i]) for i in range(self.rank)]


def smith_normal_form(a) -> SmithForm:
    """Smith normal form with transforms.

    Pivot choice is the smallest nonzero absolute value in the remaining
    block, which keeps intermediate coefficients small on the inputs seen here.
    """
    d = as_intmat(a).copy()
    m, n = d.shape
    u, u_inv, v = identity(m), identity(m), identity(n)

    def swap_rows(i, j):
        if i != j:
            d[[i, j]] = d[[j, i]]
            u[[i, j]] = u[[j, i]]
            u_inv[:, [i, j]] = u_inv[:, [j, i]]

    def swap_cols(i, j):
        if i != j:
            d[:, [i, j]] = d[:, [j, i]]
            v[:, [i, j]] = v[:, [j, i]]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        d[dst] = d[dst] + q * d[src]
        u[dst] = u[dst] + q * u[src]
        u_inv[:, src] = u_inv[:, src] - q * u_inv[:, dst]

    def add_col(dst, src, q):
        d[:, dst] = d[:, dst] + q * d[:, src]
        v[:, dst] = v[:, dst] + q * v[:, src]

    def smallest(t):
        best = None
        for i in range(t, m):
            row = d[i]
            for j in range(t, n):
                x = row[j]
                if x != 0 and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
                    if best[0] == 1:
                        return best
        return best

    t = 0
    while t < min(m, n):
        best = smallest(t)
        if best is None:
            break
        _, i0, j0 = best
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            p = d[t, t]
            dirty = False
            for i in range(t + 1, m):
                if d[i, t] != 0:
                    q = d[i, t] // p
                    add_row(i, t, -q)
                    if d[i, t] != 0:
                        dirty = True
            for j in range(t + 1, n):
                if d[t, j] != 0:
                    q = d[t, j] // p
                    add_col(j, t, -q)
                    if d[t, j] != 0:
                        dirty = True
            if dirty:
                # a remainder smaller than the pivot exists in row/col t
                best = None
                for i in range(t, m):
                    x = d[i, t]
                    if x != 0 and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, t)
                for j in range(t, n):
                    x = d[t, j]
                    if x != 0 and (best is None or abs(x) < best[0]):
                        best = (abs(x), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i, j] % p != 0:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if d[t, t] < 0:
            d[t] = -d[t]
            u[t] = -u[t]
            u_inv[:, t] = -u_inv[:, t]
        t += 1
    return SmithForm(u, d, v, u_inv)


def invariant_factors(a) -> list[int]:
    return smith_normal_form(a).diagonal


def rank(a) -> int:
    a = as_intmat(a)
    if 0 in a.shape:
        return 0
    return smith_normal_form(a).rank


def rank_mod_p(a, p: int) -> int:
    """Rank over Z/p.  Cheap necessary-condition test; never used for answers."""
    m = (as_intmat(a) % p).astype(np.int64)
    if m.size == 0:
        return 0
    r = 0
    rows, cols = m.shape
    for c in range(cols):
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r])) % p
        r += 1
        if r == rows:
            break
    return r


def solve_integer_linear(a, b) -> np.ndarray | None:
    """Some integer ``x`` with ``a @ x == b``, or None if there is none.

    ``b`` may be a vector or a matrix of right-hand sides (solved jointly).
    """
    a = as_intmat(a)
    b_arr = np.array(b, dtype=object)
    vector = b_arr.ndim == 1
    b_mat = as_intmat(b_arr.reshape(-1, 1) if vector else b_arr, shape=(a.shape[0], 0))
    if b_mat.shape[0] != a.shape[0]:
        raise ValueError("right-hand side has wrong length")
    n = a.shape[1]
    if a.shape[0] == 0:
        x = zeros(n, b_mat.shape[1])
        return x[:, 0] if vector else x
    snf = smith_normal_form(a)
    c = matmul(snf.U, b_mat)
    y = zeros(n, b_mat.shape[1])
    for i in range(c.shape[0]):
        for col in range(c.shape[1]):
            val = c[i, col]
            if i < snf.rank:
                q, rem = divmod(val, snf.D[i, i])
                if rem:
                    return None
                y[i, col] = q
            elif val != 0:
                return None
    x = matmul(snf.V, y)
    return x[:, 0] if vector else x


def kernel_basis(a) -> np.ndarray:
    """Columns form a Z-basis of ``{x : a @ x == 0}``."""
    a = as_intmat(a)
    n = a.shape[1]
    if a.shape[0] == 0:
        return identity(n)
    snf = smith_normal_form(a)
    return snf.V[:, snf.rank:].copy()


def image_basis(a) -> np.ndarray:
    """Columns form a Z-basis of the lattice spanned by the columns of ``a``."""
    a = as_intmat(a)
    m = a.shape[0]
    if a.shape[1] == 0 or m == 0:
        return zeros(m, 0)
    snf = smith_normal_form(a)
    r = snf.rank
    out = zeros(m, r)
    for i in range(r):
        out[:, i] = snf.U_inv[:, i] * snf.D[i, i]
    return out


def lattice_coords(basis, vecs) -> np.ndarray:
    """Integer ``X`` with ``basis @ X == vecs``; raises if vecs leave the lattice."""
    basis = as_intmat(basis)
    vecs = as_intmat(vecs, shape=(basis.shape[0], 0))
    if vecs.shape[1] == 0:
        return zeros(basis.shape[1], 0)
    x = solve_integer_linear(basis, vecs)
    if x is None:
        raise ValueError("vectors do not lie in the lattice")
    return x


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group Z^free_rank + sum Z/t (t > 1, t_i | t_{i+1})."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def exponent(self) -> int:
        """0 for infinite groups."""
        if self.free_rank:
            return 0
        return self.torsion[-1] if self.torsion else 1

    def __str__(self):
        parts = [f"Z/{t}" for t in self.torsion]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data) -> "AbelianGroup":
        return cls(int(data["free_rank"]), tuple(int(t) for t in data["torsion"]))

    def direct_sum(self, other: "AbelianGroup") -> "AbelianGroup":
        return cokernel_group(_diag_matrix(self.torsion + other.torsion),
                              extra_free=self.free_rank + other.free_rank)


def _diag_matrix(entries) -> np.ndarray:
    out = zeros(len(entries), len(entries))
    for i, e in enumerate(entries):
        out[i, i] = e
    return out


def cokernel_group(rel, extra_free: int = 0) -> AbelianGroup:
    """Structure of ``Z^rows / (column span of rel)`` plus ``extra_free`` copies of Z."""
    rel = as_intmat(rel)
    m = rel.shape[0]
    if m == 0:
        return AbelianGroup(extra_free)
    diag = invariant_factors(rel) if rel.shape[1] else []
    torsion = tuple(d for d in diag if d > 1)
    return AbelianGroup(m - len(diag) + extra_free, torsion)


@dataclass
class Subquotient:
    """``cycles / boundaries`` for two column lattices with boundaries inside cycles.

    ``generators`` are columns (in the ambient coordinates) mapping to the
    cyclic summands of ``group``, in the order torsion first, then free.
    """

    group: AbelianGroup
    cycles: np.ndarray
    coords: np.ndarray
    generators: np.ndarray


def subquotient(cycle_gens, boundary_gens, ambient: int) -> Subquotient:
    cycles = image_basis(as_intmat(cycle_gens, shape=(ambient, 0)))
    z = cycles.shape[1]
    bnd = as_intmat(boundary_gens, shape=(ambient, 0))
    coords = lattice_coords(cycles, bnd) if z else zeros(0, bnd.shape[1])
    if z == 0:
        return Subquotient(AbelianGroup(), cycles, coords, zeros(ambient, 0))
    if coords.shape[1] == 0:
        return Subquotient(AbelianGroup(z), cycles, coords, cycles.copy())
    snf = smith_normal_form(coords)
    diag = snf.diagonal
    torsion_idx = [i for i, dv in enumerate(diag) if dv > 1]
    free_idx = list(range(snf.rank, z))
    new_basis = matmul(cycles, snf.U_inv)
    gens = new_basis[:, torsion_idx + free_idx] if torsion_idx or free_idx else zeros(ambient, 0)
    group = AbelianGroup(len(free_idx), tuple(diag[i] for i in torsion_idx))
    return Subquotient(group, cycles, coords, gens)


def presented_homology(f, g, rel_mid, rel_next) -> Subquotient:
    """Homology at the middle of ``A --f--> B --g--> C`` with B, C given as
    quotients ``Z^b / rel_mid`` and ``Z^c / rel_next`` (relations as columns).

    The cycles are ``{x : g x in span(rel_next)}``; the boundaries are
    ``span(f) + span(rel_mid)``.
    """
    g = as_intmat(g)
    b = g.shape[1]
    rel_next = as_intmat(rel_next, shape=(g.shape[0], 0))
    if g.shape[0] == 0:
        cyc = identity(b)
    else:
        ker = kernel_basis(hstack([g, -rel_next], g.shape[0]))
        cyc = ker[:b, :]
    f = as_intmat(f, shape=(b, 0))
    rel_mid = as_intmat(rel_mid, shape=(b, 0))
    return subquotient(cyc, hstack([f, rel_mid], b), b)


def separating_functional(span_gens, x) -> tuple[np.ndarray, int] | None:
    """A row ``psi`` and modulus ``m`` (0 meaning over Z) with ``psi @ span_gens``
    divisible by m and ``psi @ x`` not, proving x lies outside the span.

    Returns None when x is in the span.
    """
    x = as_intmat(np.array(x, dtype=object).reshape(-1, 1))
    n = x.shape[0]
    span = as_intmat(span_gens, shape=(n, 0))
    if span.shape[1] == 0:
        for i in range(n):
            if x[i, 0] != 0:
                psi = zeros(1, n)
                psi[0, i] = 1
                return psi[0], 0
        return None
    snf = smith_normal_form(span)
    y = matmul(snf.U, x)
    for i in range(snf.rank, n):
        if y[i, 0] != 0:
            return snf.U[i].copy(), 0
    for i in range(snf.rank):
        d = snf.D[i, i]
        if y[i, 0] % d:
            return snf.U[i] % d, int(d)
    return None


def check_separating(span_gens, x, psi, m: int) -> bool:
    """Arithmetic check of a ``separating_functional`` certificate."""
    psi = as_intmat(np.array(psi, dtype=object).reshape(1, -1))
    x = as_intmat(np.array(x, dtype=object).reshape(-1, 1))
    span = as_intmat(span_gens, shape=(x.shape[0], 0))
    val = matmul(psi, x)[0, 0]
    img = matmul(psi, span) if span.shape[1] else zeros(1, 0)
    if m == 0:
        return val != 0 and is_zero(img)
    return val % m != 0 and all(v % m == 0 for v in img.flat)
