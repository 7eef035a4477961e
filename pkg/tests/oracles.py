"""Independent reference computations used by the tests.

Nothing here imports the package's solvers: group-ring products are done by
brute-force convolution over the multiplication table, integer invariants
come from sympy, and the retraction search is exhaustive over a box.
"""

from __future__ import annotations

import itertools

import numpy as np
import sympy
from sympy.matrices.normalforms import invariant_factors


def convolve(a: dict[int, int], b: dict[int, int], mult) -> dict[int, int]:
    out: dict[int, int] = {}
    for g, x in a.items():
        for h, y in b.items():
            k = mult[g][h]
            out[k] = out.get(k, 0) + x * y
    return {k: v for k, v in out.items() if v}


def left_mult(vec, mult) -> np.ndarray:
    """Matrix of x -> a x, built column by column from products a * y."""
    n = len(mult)
    out = np.zeros((n, n), dtype=np.int64)
    for y in range(n):
        for g, c in enumerate(vec):
            out[mult[g][y], y] += int(c)
    return out


def flat(coeffs, mult) -> np.ndarray:
    """Flatten a (rows, cols, |G|) coefficient array using ``left_mult``."""
    r, c, n = coeffs.shape
    out = np.zeros((r * n, c * n), dtype=np.int64)
    for i in range(r):
        for j in range(c):
            out[i * n:(i + 1) * n, j * n:(j + 1) * n] = left_mult(coeffs[i, j], mult)
    return out


def z_rank(a) -> int:
    a = np.asarray(a, dtype=np.int64)
    if a.size == 0:
        return 0
    return sympy.Matrix(a.tolist()).rank()


def torsion(a) -> list[int]:
    a = np.asarray(a, dtype=np.int64)
    if a.size == 0:
        return []
    facs = invariant_factors(sympy.Matrix(a.tolist()), domain=sympy.ZZ)
    return sorted(abs(int(f)) for f in facs if abs(int(f)) > 1)


def homology(d_out, d_in, n: int) -> tuple[int, list[int]]:
    """(free rank, torsion) of ker d_out / im d_in on Z^n."""
    r_out = z_rank(d_out) if d_out is not None and np.size(d_out) else 0
    r_in = z_rank(d_in) if d_in is not None and np.size(d_in) else 0
    tors = torsion(d_in) if d_in is not None and np.size(d_in) else []
    return n - r_out - r_in, tors


def rationally_regular(d: np.ndarray, units: list[np.ndarray]) -> bool:
    """Does ``d X d = d`` have a rational solution X in the span of ``units``?"""
    cols = [(d @ u @ d).ravel() for u in units]
    if not cols:
        return not d.any()
    m = sympy.Matrix(np.stack(cols, axis=1).tolist())
    rhs = sympy.Matrix(d.ravel().tolist())
    return m.rank() == m.row_join(rhs).rank()


def regular_in_box(coeff_d, mult, box: int = 4) -> bool:
    """Exhaustive search for B over ZG with all coefficients in [-box, box] and d B d = d."""
    rows, cols, n = coeff_d.shape
    d = flat(coeff_d, mult)
    if not d.any():
        return True
    units = []
    for i, j, g in itertools.product(range(cols), range(rows), range(n)):
        c = np.zeros((cols, rows, n), dtype=np.int64)
        c[i, j, g] = 1
        units.append(flat(c, mult))
    if not rationally_regular(d, units):
        return False
    t = np.stack([(d @ u @ d).ravel() for u in units], axis=1)
    target = d.ravel()
    values = np.arange(-box, box + 1)
    m = len(units)
    # enumerate the box in chunks of the leading coordinates
    lead = min(m, 3)
    if m > lead:
        tail = np.array(list(itertools.product(values, repeat=m - lead)), dtype=np.int64)
        tail_img = tail @ t[:, lead:].T
    else:
        tail_img = np.zeros((1, len(target)), dtype=np.int64)
    for head in itertools.product(values, repeat=lead):
        base = t[:, :lead] @ np.array(head, dtype=np.int64)
        if np.any(np.all(tail_img + base == target, axis=1)):
            return True
    return False


def tate_group_finite(d: int, sigma: np.ndarray, eps: int) -> list[int]:
    """ker(1 - eps s)/im(1 + eps s) on (Z/d)^n by enumerating every element.

    The quotient is killed by 2, so it is (Z/2)^r with 2^r = |ker| / |im|."""
    n = sigma.shape[0]
    elems = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(-1, n)
    img = elems @ sigma.T % d
    ker = {tuple(x) for x, y in zip(elems, img) if not np.any((x - eps * y) % d)}
    im = {tuple((x + eps * y) % d) for x, y in zip(elems, img)}
    assert im <= ker
    ratio = len(ker) // len(im)
    r = ratio.bit_length() - 1
    assert 2 ** r == ratio
    return [2] * r
