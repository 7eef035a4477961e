"""Finite groups, integral group rings and matrices over them.

A group is stored as its full multiplication table with the identity at
index 0.  Group-ring elements are dense coefficient vectors indexed by the
element order of the table; that order is also the basis order used when a
matrix is flattened to an integer matrix, so flattened output is reproducible.

Matrices act on column vectors from the left.  ZG then acts on chains from
the right, and composition of maps is the ordinary matrix product.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import intmat
from .intmat import as_intmat


class MalformedInputError(ValueError):
    """Raised for structurally invalid input (bad table, bad index, ...)."""


@dataclass(frozen=True, eq=False)
class GroupData:
    name: str
    elements: tuple[str, ...]
    mult: tuple[tuple[int, ...], ...]
    omega: tuple[int, ...]

    def __post_init__(self):
        n = len(self.elements)
        if n == 0:
            raise MalformedInputError("a group needs at least one element")
        if len(self.mult) != n or any(len(row) != n for row in self.mult):
            raise MalformedInputError("multiplication table must be |G| x |G|")
        if any(not 0 <= x < n for row in self.mult for x in row):
            raise MalformedInputError("multiplication table entry out of range")
        if len(self.omega) != n or any(w not in (1, -1) for w in self.omega):
            raise MalformedInputError("omega must assign +1 or -1 to every element")

    @property
    def order(self) -> int:
        return len(self.elements)

    identity = 0

    @cached_property
    def table(self) -> np.ndarray:
        return np.array(self.mult, dtype=np.int64)

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = []
        for g in range(self.order):
            row = self.mult[g]
            inv.append(row.index(0))
        return tuple(inv)

    @cached_property
    def left_mult_index(self) -> np.ndarray:
        """``idx[x, y] = x * y^-1``, so ``L(a)[x, y] = a[idx[x, y]]``."""
        inv = self.inverse
        t = self.table
        return t[:, list(inv)]

    def check(self) -> None:
        """Exhaustive check of the group axioms and that omega is a homomorphism."""
        n, t = self.order, self.mult
        for g in range(n):
            if t[0][g] != g or t[g][0] != g:
                raise MalformedInputError("element 0 must be the identity")
        for g in range(n):
            if sorted(t[g]) != list(range(n)):
                raise MalformedInputError(f"row {g} of the table is not a permutation")
            if sorted(t[h][g] for h in range(n)) != list(range(n)):
                raise MalformedInputError(f"column {g} of the table is not a permutation")
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise MalformedInputError(f"table is not associative at ({a},{b},{c})")
        for a, b in itertools.product(range(n), repeat=2):
            if self.omega[t[a][b]] != self.omega[a] * self.omega[b]:
                raise MalformedInputError("omega is not a homomorphism")

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = self.mult[x][g]
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.mult
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def with_omega(self, omega: Sequence[int]) -> "GroupData":
        g = GroupData(self.name, self.elements, self.mult, tuple(int(w) for w in omega))
        g.check()
        return g

    def generated_subgroup(self, gens: Iterable[int]) -> tuple[int, ...]:
        seen = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.mult[x][s]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return tuple(sorted(seen))

    def subgroups(self) -> list[tuple[int, ...]]:
        """All subgroups (fine for the small groups this package targets)."""
        found = {(0,)}
        layer = {(0,)}
        while layer:
            new = set()
            for h in layer:
                for g in range(self.order):
                    if g in h:
                        continue
                    s = self.generated_subgroup(h + (g,))
                    if s not in found:
                        found.add(s)
                        new.add(s)
            layer = new
        return sorted(found, key=lambda s: (len(s), s))

    def sylow_subgroups(self) -> dict[int, tuple[int, ...]]:
        """One Sylow p-subgroup for every prime p dividing the order."""
        out = {}
        n = self.order
        subs = self.subgroups()
        for p in _prime_factors(n):
            pk = 1
            while n % (pk * p) == 0:
                pk *= p
            out[p] = next(s for s in subs if len(s) == pk)
        return out

    def minimal_generators(self, subgroup: Sequence[int]) -> list[int]:
        """A small generating set of a subgroup, chosen greedily."""
        target = tuple(sorted(subgroup))
        gens: list[int] = []
        current = (0,)
        for g in sorted(target, key=lambda x: (-self.element_order(x), x)):
            if g not in current:
                gens.append(g)
                current = self.generated_subgroup(gens)
            if current == target:
                break
        return gens

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "elements": list(self.elements),
            "table": [list(r) for r in self.mult],
            "omega": list(self.omega),
        }

    def __eq__(self, other):
        if not isinstance(other, GroupData):
            return NotImplemented
        return self.mult == other.mult and self.omega == other.omega

    def __hash__(self):
        return hash((self.mult, self.omega))

    def __repr__(self):
        return f"GroupData({self.name!r}, order={self.order})"


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def group_from_table(name, elements, table, omega=None) -> GroupData:
    n = len(table)
    elements = tuple(elements) if elements else tuple(f"g{i}" for i in range(n))
    omega = tuple(omega) if omega is not None else (1,) * n
    g = GroupData(name, elements, tuple(tuple(int(x) for x in row) for row in table),
                  tuple(int(w) for w in omega))
    g.check()
    return g


def group_from_permutations(name, generators: Sequence[Sequence[int]], omega_generators=None,
                            omega=None) -> GroupData:
    """Close a set of permutations (lists of images) under composition.

    Elements are numbered in breadth-first order from the identity, with
    generators tried in the given order; ``(p*q)(i) = p(q(i))``.
    """
    gens = [tuple(int(x) for x in p) for p in generators]
    if not gens:
        raise MalformedInputError("need at least one permutation generator")
    deg = len(gens[0])
    if any(sorted(p) != list(range(deg)) for p in gens):
        raise MalformedInputError("generators must be permutations of 0..n-1")
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    gen_word = {ident: ()}
    i = 0
    while i < len(elems):
        x = elems[i]
        for k, s in enumerate(gens):
            y = tuple(x[s[j]] for j in range(deg))
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
                gen_word[y] = gen_word[x] + (k,)
        i += 1
    n = len(elems)
    table = [[index[tuple(p[q[j]] for j in range(deg))] for q in elems] for p in elems]
    if omega is None:
        if omega_generators is None:
            omega = [1] * n
        else:
            omega = []
            for p in elems:
                w = 1
                for k in gen_word[p]:
                    w *= int(omega_generators[k])
                omega.append(w)
    names = ["e"] + ["".join(f"s{k}" for k in gen_word[p]) for p in elems[1:]]
    return group_from_table(name, names, table, omega)


def cyclic_group(n: int, omega_generator: int = 1, name: str | None = None) -> GroupData:
    """C_n = <t>, element i is t^i."""
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    elements = ["e"] + [("t" if i == 1 else f"t^{i}") for i in range(1, n)]
    omega = [omega_generator ** i for i in range(n)]
    return group_from_table(name or f"C{n}", elements, table, omega)


def trivial_group() -> GroupData:
    return cyclic_group(1, name="trivial")


def elementary_abelian_2(rank: int, name: str | None = None) -> GroupData:
    n = 2 ** rank
    table = [[i ^ j for j in range(n)] for i in range(n)]
    return group_from_table(name or "x".join(["C2"] * rank), None, table)


def symmetric_group_s3() -> GroupData:
    return group_from_permutations("S3", [[1, 0, 2], [0, 2, 1]])


def dihedral_group(n: int) -> GroupData:
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return group_from_permutations(f"D{n}", [rot, ref])


def quaternion_group() -> GroupData:
    """Q8 with elements 1, i, j, k, -1, -i, -j, -k (in that order)."""
    # unit products among 1, i, j, k as (sign, index)
    unit = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def split(x):
        return (1, x) if x < 4 else (-1, x - 4)

    table = []
    for a in range(8):
        sa, ua = split(a)
        row = []
        for b in range(8):
            sb, ub = split(b)
            s, u = unit[(ua, ub)]
            row.append(u if sa * sb * s == 1 else u + 4)
        table.append(row)
    return group_from_table("Q8", ["1", "i", "j", "k", "-1", "-i", "-j", "-k"], table)


def direct_product(g: GroupData, h: GroupData) -> GroupData:
    """G x H with element (a, b) at index a * |H| + b."""
    ng, nh = g.order, h.order
    table = []
    for a in range(ng):
        for b in range(nh):
            table.append([g.mult[a][c] * nh + h.mult[b][d] for c in range(ng) for d in range(nh)])
    elements = [f"({x},{y})" for x in g.elements for y in h.elements]
    omega = [g.omega[a] * h.omega[b] for a in range(ng) for b in range(nh)]
    return group_from_table(f"{g.name}x{h.name}", elements, table, omega)


def identify(g: GroupData) -> str | None:
    """Canonical isomorphism-class name for the groups the registry knows about.

    Cyclic groups are recognised at any order; beyond that, groups of order
    at most 8 are separated by commutativity and element-order profile.
    """
    n = g.order
    orders = sorted(g.element_order(x) for x in range(n))
    if n == 1:
        return "trivial"
    if orders[-1] == n:
        return f"C{n}"
    profile = tuple(orders)
    abelian = g.is_abelian()
    known = {
        (4, True, (1, 2, 2, 2)): "C2xC2",
        (6, False, (1, 2, 2, 2, 3, 3)): "S3",
        (8, True, (1, 2, 2, 2, 4, 4, 4, 4)): "C4xC2",
        (8, True, (1, 2, 2, 2, 2, 2, 2, 2)): "C2xC2xC2",
        (8, False, (1, 2, 2, 2, 2, 2, 4, 4)): "D4",
        (8, False, (1, 2, 4, 4, 4, 4, 4, 4)): "Q8",
    }
    return known.get((n, abelian, profile))


# --------------------------------------------------------------------------
# group ring elements


@dataclass(frozen=True)
class GroupRingElement:
    """Finite-support map element index -> integer, zero coefficients dropped."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: Mapping[int, int]) -> "GroupRingElement":
        return cls(tuple(sorted((int(g), int(c)) for g, c in coeffs.items() if c != 0)))

    @classmethod
    def from_vector(cls, vec: Sequence[int]) -> "GroupRingElement":
        return cls(tuple((g, int(c)) for g, c in enumerate(vec) if c != 0))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> "GroupRingElement":
        acc: dict[int, int] = {}
        for coeff, g in pairs:
            acc[int(g)] = acc.get(int(g), 0) + int(coeff)
        return cls.from_dict(acc)

    def to_pairs(self) -> list[list[int]]:
        return [[c, g] for g, c in self.terms]

    def vector(self, group: GroupData) -> np.ndarray:
        v = intmat.zeros(1, group.order)[0]
        for g, c in self.terms:
            if not 0 <= g < group.order:
                raise MalformedInputError(f"element index {g} out of range for {group.name}")
            v[g] = c
        return v

    def __bool__(self):
        return bool(self.terms)


def gr_mul(a: GroupRingElement, b: GroupRingElement, group: GroupData) -> GroupRingElement:
    """Convolution product in ZG."""
    a.vector(group), b.vector(group)  # range check
    out = [0] * group.order
    for g, x in a.terms:
        row = group.mult[g]
        for h, y in b.terms:
            out[row[h]] += x * y
    return GroupRingElement.from_vector(out)


def involute(a: GroupRingElement, group: GroupData) -> GroupRingElement:
    """sum n_g g  ->  sum omega(g) n_g g^-1."""
    inv, om = group.inverse, group.omega
    for g, _ in a.terms:
        if not 0 <= g < group.order:
            raise MalformedInputError(f"element index {g} out of range for {group.name}")
    return GroupRingElement.from_dict({inv[g]: om[g] * c for g, c in a.terms})


# --------------------------------------------------------------------------
# matrices over ZG


class GroupRingMatrix:
    """Dense ``rows x cols`` matrix over ZG, coefficients in an object array
    of shape ``(rows, cols, |G|)``.  Treated as immutable."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: GroupData, coeffs: np.ndarray):
        if coeffs.ndim != 3 or coeffs.shape[2] != group.order:
            raise MalformedInputError("coefficient array must have shape (rows, cols, |G|)")
        self.group = group
        self.coeffs = coeffs

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, group: GroupData, rows: int, cols: int) -> "GroupRingMatrix":
        c = np.empty((rows, cols, group.order), dtype=object)
        c.fill(0)
        return cls(group, c)

    @classmethod
    def identity(cls, group: GroupData, n: int) -> "GroupRingMatrix":
        m = cls.zeros(group, n, n)
        for i in range(n):
            m.coeffs[i, i, 0] = 1
        return m

    @classmethod
    def from_entries(cls, group: GroupData, entries, rows: int | None = None,
                     cols: int | None = None) -> "GroupRingMatrix":
        """``entries`` is a list of rows; an entry is a GroupRingElement, an int
        (multiple of the identity) or a list of ``[coeff, element_index]`` pairs."""
        rows = len(entries) if rows is None else rows
        if cols is None:
            cols = len(entries[0]) if entries else 0
        m = cls.zeros(group, rows, cols)
        if len(entries) != rows:
            raise MalformedInputError(f"expected {rows} rows, got {len(entries)}")
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise MalformedInputError(f"row {i} has {len(row)} entries, expected {cols}")
            for j, e in enumerate(row):
                m.coeffs[i, j, :] = _to_element(e).vector(group)
        return m

    @classmethod
    def scalar_diag(cls, group: GroupData, diag: Sequence[int]) -> "GroupRingMatrix":
        m = cls.zeros(group, len(diag), len(diag))
        for i, d in enumerate(diag):
            m.coeffs[i, i, 0] = int(d)
        return m

    # structure ----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[0], self.coeffs.shape[1]

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]

    def entry(self, i: int, j: int) -> GroupRingElement:
        return GroupRingElement.from_vector(self.coeffs[i, j, :])

    def entries(self) -> list[list[GroupRingElement]]:
        return [[self.entry(i, j) for j in range(self.cols)] for i in range(self.rows)]

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.coeffs.flat)

    def __eq__(self, other):
        if not isinstance(other, GroupRingMatrix):
            return NotImplemented
        return (self.group == other.group and self.shape == other.shape
                and bool((self.coeffs == other.coeffs).all()))

    def __hash__(self):
        return hash((self.shape, tuple(self.coeffs.flat)))

    def __repr__(self):
        return f"GroupRingMatrix({self.rows}x{self.cols} over {self.group.name})"

    def to_json(self) -> list:
        return [[self.entry(i, j).to_pairs() for j in range(self.cols)] for i in range(self.rows)]

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "GroupRingMatrix"):
        if self.group != other.group:
            raise MalformedInputError("matrices live over different groups")

    def __add__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise MalformedInputError(f"shape mismatch {self.shape} + {other.shape}")
        return GroupRingMatrix(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        if self.shape != other.shape:
            raise MalformedInputError(f"shape mismatch {self.shape} - {other.shape}")
        return GroupRingMatrix(self.group, self.coeffs - other.coeffs)

    def __neg__(self) -> "GroupRingMatrix":
        return GroupRingMatrix(self.group, -self.coeffs)

    def scale(self, k: int) -> "GroupRingMatrix":
        return GroupRingMatrix(self.group, self.coeffs * int(k))

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise MalformedInputError(f"shape mismatch {self.shape} @ {other.shape}")
        g = self.group
        out = GroupRingMatrix.zeros(g, self.rows, other.cols)
        if self.cols == 0 or self.rows == 0 or other.cols == 0:
            return out
        a, b, c = self.coeffs, other.coeffs, out.coeffs
        live_a = [x for x in range(g.order) if any(v != 0 for v in a[:, :, x].flat)]
        live_b = [y for y in range(g.order) if any(v != 0 for v in b[:, :, y].flat)]
        for x in live_a:
            ax = a[:, :, x]
            row = g.mult[x]
            for y in live_b:
                c[:, :, row[y]] += np.dot(ax, b[:, :, y])
        return out

    def involute_transpose(self) -> "GroupRingMatrix":
        """Entrywise involution followed by transposition (the dual map)."""
        g = self.group
        inv = list(g.inverse)
        om = np.array(g.omega, dtype=object)
        c = self.coeffs[:, :, inv] * om[inv]
        return GroupRingMatrix(g, np.ascontiguousarray(c.transpose(1, 0, 2)))

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> "GroupRingMatrix":
        c = self.coeffs[np.ix_(list(rows), list(cols), range(self.group.order))]
        return GroupRingMatrix(self.group, c.copy())

    def map_group(self, target: GroupData, mapping: Sequence[int]) -> "GroupRingMatrix":
        """Push coefficients along an injective map of element indices."""
        out = GroupRingMatrix.zeros(target, self.rows, self.cols)
        for x, y in enumerate(mapping):
            out.coeffs[:, :, y] += self.coeffs[:, :, x]
        return out

    def flatten(self) -> np.ndarray:
        return flatten(self)

    def trace_flat(self) -> int:
        """Trace of the flattened integer matrix: |G| times the identity coefficient sum."""
        if self.rows != self.cols:
            raise MalformedInputError("trace of a non-square matrix")
        return self.group.order * sum(int(self.coeffs[i, i, 0]) for i in range(self.rows))

    def is_idempotent(self) -> bool:
        return self.rows == self.cols and self @ self == self


def _to_element(e) -> GroupRingElement:
    if isinstance(e, GroupRingElement):
        return e
    if isinstance(e, (int, np.integer)):
        return GroupRingElement.from_dict({0: int(e)})
    return GroupRingElement.from_pairs(e)


def direct_sum(*mats: GroupRingMatrix, group: GroupData | None = None) -> GroupRingMatrix:
    """Block-diagonal sum."""
    if not mats:
        if group is None:
            raise ValueError("empty direct sum needs a group")
        return GroupRingMatrix.zeros(group, 0, 0)
    g = mats[0].group
    out = GroupRingMatrix.zeros(g, sum(m.rows for m in mats), sum(m.cols for m in mats))
    r = c = 0
    for m in mats:
        if m.group != g:
            raise MalformedInputError("direct sum of matrices over different groups")
        out.coeffs[r:r + m.rows, c:c + m.cols, :] = m.coeffs
        r += m.rows
        c += m.cols
    return out


def hconcat(mats: Sequence[GroupRingMatrix], group: GroupData, rows: int) -> GroupRingMatrix:
    mats = [m for m in mats if m.cols]
    if not mats:
        return GroupRingMatrix.zeros(group, rows, 0)
    return GroupRingMatrix(group, np.concatenate([m.coeffs for m in mats], axis=1))


def vconcat(mats: Sequence[GroupRingMatrix], group: GroupData, cols: int) -> GroupRingMatrix:
    mats = [m for m in mats if m.rows]
    if not mats:
        return GroupRingMatrix.zeros(group, 0, cols)
    return GroupRingMatrix(group, np.concatenate([m.coeffs for m in mats], axis=0))


def _components(n: int, edges) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        parent[find(a)] = find(b)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return sorted(groups.values())


def support_blocks(m: GroupRingMatrix) -> list[tuple[list[int], list[int]]]:
    """Row and column index sets of the connected pieces of the nonzero pattern.

    Rows and columns touching no nonzero entry are left out.
    """
    nz = [(i, j) for i in range(m.rows) for j in range(m.cols) if any(m.coeffs[i, j, :])]
    comps = _components(m.rows + m.cols, [(i, m.rows + j) for i, j in nz])
    out = []
    for comp in comps:
        rows = [x for x in comp if x < m.rows]
        cols = [x - m.rows for x in comp if x >= m.rows]
        if rows and cols:
            out.append((rows, cols))
    return out


def diagonal_blocks(m: GroupRingMatrix) -> list[list[int]]:
    """Finest partition of the indices of a square matrix into diagonal blocks."""
    nz = [(i, j) for i in range(m.rows) for j in range(m.cols) if any(m.coeffs[i, j, :])]
    return _components(m.rows, nz)


def left_mult_matrix(a: GroupRingElement, group: GroupData) -> np.ndarray:
    """|G| x |G| integer matrix of x -> a x in the basis of group elements."""
    return a.vector(group)[group.left_mult_index]


def flatten(m: GroupRingMatrix) -> np.ndarray:
    """Regular representation: each entry becomes its left-multiplication block."""
    g = m.group
    n = g.order
    if m.rows == 0 or m.cols == 0:
        return intmat.zeros(m.rows * n, m.cols * n)
    blocks = m.coeffs[:, :, g.left_mult_index]  # (r, c, n, n)
    return np.ascontiguousarray(blocks.transpose(0, 2, 1, 3)).reshape(m.rows * n, m.cols * n)


def unflatten(flat: np.ndarray, group: GroupData) -> GroupRingMatrix:
    """Inverse of ``flatten`` on matrices that commute with the right action."""
    n = group.order
    r, c = flat.shape[0] // n, flat.shape[1] // n
    blocks = flat.reshape(r, n, c, n)
    coeffs = np.ascontiguousarray(blocks[:, :, :, 0].transpose(0, 2, 1))
    return GroupRingMatrix(group, coeffs)


def omega_sign_matrix(group: GroupData, n: int) -> np.ndarray:
    """Diagonal integer matrix with omega(g) on each flattened basis vector."""
    out = intmat.zeros(n * group.order, n * group.order)
    for i in range(n):
        for g in range(group.order):
            k = i * group.order + g
            out[k, k] = group.omega[g]
    return out


def right_action_matrix(group: GroupData, h: int, n: int = 1) -> np.ndarray:
    """Flattened matrix of ``v -> v h`` on ZG^n (a permutation matrix)."""
    size = group.order
    block = intmat.zeros(size, size)
    for y in range(size):
        block[group.mult[y][h], y] = 1
    if n == 1:
        return block
    out = intmat.zeros(n * size, n * size)
    for i in range(n):
        out[i * size:(i + 1) * size, i * size:(i + 1) * size] = block
    return out


def chain_action(group: GroupData, n: int) -> list[np.ndarray]:
    """Left ZG-action on flattened ZG^n given by ``g . v = v g^-1``."""
    return [right_action_matrix(group, group.inverse[g], n) for g in range(group.order)]


def is_unit_entry(e: GroupRingElement) -> bool:
    """True for trivial units +-g."""
    return len(e.terms) == 1 and abs(e.terms[0][1]) == 1


def as_matrix(group: GroupData, m) -> GroupRingMatrix:
    if isinstance(m, GroupRingMatrix):
        return m
    return GroupRingMatrix.from_entries(group, m)


__all__ = [
    "MalformedInputError", "GroupData", "GroupRingElement", "GroupRingMatrix",
    "gr_mul", "involute", "flatten", "unflatten", "direct_sum", "identify",
    "cyclic_group", "trivial_group", "symmetric_group_s3", "dihedral_group",
    "quaternion_group", "elementary_abelian_2", "direct_product",
    "group_from_table", "group_from_permutations", "as_intmat",
]
