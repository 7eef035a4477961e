import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from cellgap import intmat
from cellgap.groupring import (GroupRingElement, GroupRingMatrix, MalformedInputError,
                               cyclic_group, diagonal_blocks, dihedral_group, direct_product,
                               elementary_abelian_2, flatten, gr_mul, group_from_permutations, group_from_table,
                               identify, involute, omega_sign_matrix, quaternion_group,
                               support_blocks, symmetric_group_s3, trivial_group)

GROUPS = [trivial_group(), cyclic_group(2), cyclic_group(2, -1), cyclic_group(3), cyclic_group(4),
          elementary_abelian_2(2), symmetric_group_s3(), dihedral_group(4), quaternion_group(),
          elementary_abelian_2(3)]


def elem(*pairs):
    return GroupRingElement.from_pairs(pairs)


@st.composite
def group_and_elements(draw, count=3):
    g = draw(st.sampled_from(GROUPS))
    vecs = [draw(st.lists(st.integers(-3, 3), min_size=g.order, max_size=g.order))
            for _ in range(count)]
    return g, [GroupRingElement.from_vector(v) for v in vecs]


@st.composite
def group_and_matrices(draw):
    g = draw(st.sampled_from(GROUPS[:7]))
    a, b, c = (draw(st.integers(1, 2)) for _ in range(3))

    def mat(r, s):
        vals = draw(st.lists(st.integers(-2, 2), min_size=r * s * g.order, max_size=r * s * g.order))
        return GroupRingMatrix(g, np.array(vals, dtype=object).reshape(r, s, g.order))

    return g, mat(a, b), mat(b, c)


# -- groups ------------------------------------------------------------------


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.name)
def test_group_axioms_and_omega(g):
    g.check()
    for x, y in itertools.product(range(g.order), repeat=2):
        assert g.omega[g.mult[x][y]] == g.omega[x] * g.omega[y]


def test_permutation_generators_close_to_s3():
    g = group_from_permutations("S3", [[1, 0, 2], [0, 2, 1]])
    assert g.order == 6
    assert identify(g) == "S3"


@pytest.mark.parametrize("table, omega", [
    ([[0, 1], [0, 1]], None),  # no inverses
    ([[0, 1], [1, 0]], [1, 2]),  # omega not a sign
    ([[1, 0], [0, 1]], None),  # identity not at index 0
    ([[0, 1], [1, 0]], [-1, 1]),  # omega(e) = -1 is not a homomorphism
])
def test_bad_group_tables_rejected(table, omega):
    with pytest.raises(MalformedInputError):
        group_from_table("bad", None, table, omega)


def test_identify_direct_products():
    assert identify(direct_product(cyclic_group(2), cyclic_group(2))) == "C2xC2"
    assert identify(elementary_abelian_2(3)) == "C2xC2xC2"


# -- gr_mul / involute ---------------------------------------------------------


def test_mul_c2_norm_times_difference():
    g = cyclic_group(2)
    assert gr_mul(elem((1, 0), (1, 1)), elem((1, 0), (-1, 1)), g) == GroupRingElement()


def test_mul_identity():
    g = symmetric_group_s3()
    a = GroupRingElement.from_vector([1, -2, 0, 3, 0, 5])
    assert gr_mul(a, elem((1, 0)), g) == a
    assert gr_mul(elem((1, 0)), a, g) == a


def test_mul_c3_square():
    g = cyclic_group(3)
    got = gr_mul(elem((1, 0), (1, 1)), elem((1, 0), (1, 1)), g)
    # oracle: brute-force convolution
    want = oracles.convolve({0: 1, 1: 1}, {0: 1, 1: 1}, g.mult)
    assert dict((k, v) for k, v in got.terms) == want == {0: 1, 1: 2, 2: 1}


def test_mul_out_of_range():
    with pytest.raises(MalformedInputError):
        gr_mul(elem((1, 5)), elem((1, 0)), cyclic_group(2))


@given(group_and_elements())
def test_mul_matches_convolution(data):
    g, (a, b, _) = data
    want = oracles.convolve(dict(a.terms), dict(b.terms), g.mult)
    assert dict(gr_mul(a, b, g).terms) == want


@given(group_and_elements())
def test_ring_axioms(data):
    g, (a, b, c) = data
    assert gr_mul(gr_mul(a, b, g), c, g) == gr_mul(a, gr_mul(b, c, g), g)
    bc = GroupRingElement.from_vector(b.vector(g) + c.vector(g))
    lhs = gr_mul(a, bc, g)
    rhs = GroupRingElement.from_vector(gr_mul(a, b, g).vector(g) + gr_mul(a, c, g).vector(g))
    assert lhs == rhs


def test_involute_c2_twisted():
    g = cyclic_group(2, -1)
    assert involute(elem((2, 0), (3, 1)), g) == elem((2, 0), (-3, 1))


def test_involute_c3_inverts():
    g = cyclic_group(3)
    assert involute(elem((1, 0), (2, 1)), g) == elem((1, 0), (2, 2))


@given(group_and_elements())
def test_involution_antihomomorphism(data):
    g, (a, b, _) = data
    assert involute(involute(a, g), g) == a
    assert involute(gr_mul(a, b, g), g) == gr_mul(involute(b, g), involute(a, g), g)


# -- flatten -------------------------------------------------------------------


def test_flatten_norm_element():
    g = cyclic_group(2)
    m = GroupRingMatrix.from_entries(g, [[[[1, 0], [1, 1]]]])
    assert flatten(m).tolist() == [[1, 1], [1, 1]]


@pytest.mark.parametrize("g", GROUPS[:6], ids=lambda g: g.name)
def test_flatten_identity_and_zero(g):
    assert (flatten(GroupRingMatrix.identity(g, 2)) == intmat.identity(2 * g.order)).all()
    assert intmat.is_zero(flatten(GroupRingMatrix.zeros(g, 2, 3)))


@given(group_and_matrices())
def test_flatten_multiplicative_additive_and_matches_oracle(data):
    g, a, b = data
    assert (flatten(a @ b) == intmat.matmul(flatten(a), flatten(b))).all()
    assert (flatten(a + a) == 2 * flatten(a)).all()
    assert (np.array(flatten(a), dtype=np.int64) == oracles.flat(a.coeffs.astype(np.int64), g.mult)).all()


@given(group_and_matrices())
def test_flatten_involution_is_signed_transpose(data):
    # flatten(conj(M)^T) = S flatten(M)^T S with S the diagonal of omega signs
    g, a, _ = data
    s_rows = omega_sign_matrix(g, a.cols)
    s_cols = omega_sign_matrix(g, a.rows)
    lhs = flatten(a.involute_transpose())
    rhs = intmat.matmul(intmat.matmul(s_rows, flatten(a).T), s_cols)
    assert (lhs == rhs).all()


# -- Smith normal form and integer solving ------------------------------------


def _is_unimodular(u):
    return abs(intmat.det(u)) == 1


def test_snf_diag_2_3():
    snf = intmat.smith_normal_form([[2, 0], [0, 3]])
    assert snf.diagonal == [1, 6]


def test_snf_identity_and_zero():
    assert intmat.smith_normal_form(intmat.identity(3)).diagonal == [1, 1, 1]
    snf = intmat.smith_normal_form(intmat.zeros(2, 3))
    assert snf.rank == 0 and intmat.is_zero(snf.D)


small_matrix = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


@given(small_matrix)
def test_snf_contract(rows):
    a = intmat.as_intmat(rows)
    snf = intmat.smith_normal_form(a)
    assert (intmat.matmul(intmat.matmul(snf.U, a), snf.V) == snf.D).all()
    assert _is_unimodular(snf.U) and _is_unimodular(snf.V)
    assert (intmat.matmul(snf.U, snf.U_inv) == intmat.identity(a.shape[0])).all()
    diag = snf.diagonal
    assert all(d > 0 for d in diag)
    assert all(b % a_ == 0 for a_, b in zip(diag, diag[1:]))
    off = snf.D.copy()
    for i in range(min(off.shape)):
        off[i, i] = 0
    assert intmat.is_zero(off)
    # oracle: sympy invariant factors
    assert [d for d in diag if d > 1] == oracles.torsion(np.array(rows))
    assert snf.rank == oracles.z_rank(np.array(rows))


@pytest.mark.parametrize("a, b, expected", [
    ([[2]], [4], [2]),
    ([[2]], [3], None),
    ([[1, 1], [0, 2]], [1, 2], [0, 1]),
])
def test_solve_examples(a, b, expected):
    x = intmat.solve_integer_linear(a, b)
    if expected is None:
        assert x is None
    else:
        assert list(x) == expected


@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_solve_agrees_with_box_search(m, n, data):
    entries = st.integers(-3, 3)
    a = np.array([[data.draw(entries) for _ in range(n)] for _ in range(m)], dtype=object)
    if data.draw(st.booleans()):
        x0 = np.array([data.draw(entries) for _ in range(n)], dtype=object)
        b = a.dot(x0)
    else:
        b = np.array([data.draw(entries) for _ in range(m)], dtype=object)
    found = any((a.dot(np.array(x, dtype=object)) == b).all()
                for x in itertools.product(range(-3, 4), repeat=n))
    x = intmat.solve_integer_linear(a, b)
    if found:
        assert x is not None
    if x is not None:
        assert (a.dot(x) == b).all()
    else:
        assert not found


def test_solve_finds_solutions_outside_the_box():
    # x = 7 is the only solution; the box search oracle is one-sided
    assert list(intmat.solve_integer_linear([[1]], [7])) == [7]


@given(small_matrix, st.sampled_from([2, 3, 5]))
def test_rank_mod_p_matches_sympy(rows, p):
    from sympy import GF
    from sympy.polys.matrices import DomainMatrix
    want = DomainMatrix([[GF(p)(v) for v in row] for row in rows], (len(rows), len(rows[0])),
                        GF(p)).rank()
    assert intmat.rank_mod_p(rows, p) == want


def test_support_and_diagonal_blocks():
    g = cyclic_group(2)
    m = GroupRingMatrix.from_entries(g, [[[[1, 0]], [], []], [[], [], [[1, 1]]], [[], [], []]], 3, 3)
    assert support_blocks(m) == [([0], [0]), ([1], [2])]
    assert diagonal_blocks(m) == [[0], [1, 2]]
