import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import builders
import oracles
from cellgap.complex import FreeChainComplex, point_complex, projective_space_complex
from cellgap.groupring import (GroupRingMatrix, MalformedInputError, cyclic_group, direct_sum,
                               elementary_abelian_2, symmetric_group_s3, trivial_group)
from cellgap.intmat import as_intmat
from cellgap.kzero import (InvolutedAbelianGroup, KZeroRep, NotSilentError, check_self_dual,
                           class_difference, class_dual, class_is_trivial, class_negate,
                           class_scale, class_sum, find_free_witness, idempotent_fingerprint, idempotent_module,
                           load_registry, obstruction, projectivity_fingerprint,
                           splitting_idempotent, tate_z2)
from cellgap.modules import regular_module, trivial_module
from cellgap.realize import RealizationInput, realize_finite
from cellgap.silence import find_retraction, silent_in_degree

REGISTRY = load_registry()


def involuted(n, relations, involution):
    return InvolutedAbelianGroup(as_intmat(relations, shape=(n, 0)),
                                 as_intmat(involution, shape=(n, n)))


# -- obstruction ----------------------------------------------------------------


@pytest.mark.parametrize("k", [1, 2, 3])
def test_identity_boundary_obstruction(k):
    g = cyclic_group(3)
    one = GroupRingMatrix.identity(g, 2)
    c = FreeChainComplex.from_degrees(g, {k - 1: 2, k: 2}, {k: one})
    r = obstruction(c, k)
    assert r.positive == (one,) and r.sign == (-1) ** k
    assert r.rank_z() == (-1) ** k * 2 * g.order
    assert class_is_trivial(r, registry={}).trivial


def test_zero_boundary_gives_zero_class():
    g = cyclic_group(2)
    c = FreeChainComplex.from_degrees(g, {1: 0, 2: 0})
    r = obstruction(c, 2)
    assert r.rank_z() == 0


def test_obstruction_refuses_non_silent():
    with pytest.raises(NotSilentError):
        obstruction(projective_space_complex(2), 2)


@pytest.mark.parametrize("group", [cyclic_group(2), cyclic_group(3), symmetric_group_s3()])
def test_realization_obstruction_matches_image(group):
    for e in builders.idempotent_battery(group):
        c = realize_finite(RealizationInput(point_complex(group), e, 3, 4))
        r = obstruction(c, 3)
        (img,) = r.positive
        assert img.trace_flat() == e.trace_flat()
        assert idempotent_fingerprint(img) == idempotent_fingerprint(e)


def test_obstruction_is_idempotent_projecting_onto_boundaries():
    seen = 0
    for c, k in builders.generated_battery(60, seed=2):
        cert = silent_in_degree(c, k)
        if not cert.silent:
            continue
        seen += 1
        (e,) = obstruction(c, k, cert).positive
        assert e.is_idempotent()
        assert e @ c.boundary(k) == c.boundary(k)
    assert seen > 0


# -- class arithmetic ----------------------------------------------------------


def test_sum_with_zero():
    e = GroupRingMatrix.scalar_diag(cyclic_group(2), (1, 0))
    a = KZeroRep.of(e)
    s = class_sum(a, KZeroRep.zero(e.group))
    assert s.positive == a.positive and s.negative == ()


@pytest.mark.parametrize("group", builders.GROUPS_UP_TO_8)
def test_a_minus_a_is_trivial(group):
    e = builders.stably_free_idempotent(group)
    a = KZeroRep.of(e, -1)
    res = class_is_trivial(class_sum(a, class_negate(a)), registry={})
    assert res.trivial and res.reason == "formal cancellation"


def test_scale_and_rank():
    e = GroupRingMatrix.scalar_diag(cyclic_group(3), (1, 0))
    a = KZeroRep.of(e)
    assert class_scale(a, 3).rank_z() == 3 * a.rank_z()
    assert class_scale(a, -2).rank_z() == -2 * a.rank_z()


def test_dual_over_trivial_group_is_transpose():
    g = trivial_group()
    e = GroupRingMatrix(g, np.array([[[1]], [[0]]], dtype=object)) @ \
        GroupRingMatrix(g, np.array([[[1], [3]]], dtype=object))
    assert e.is_idempotent()
    (d,) = class_dual(KZeroRep.of(e)).positive
    assert (d.coeffs == e.coeffs.transpose(1, 0, 2)).all()


@pytest.mark.parametrize("group", builders.GROUPS_UP_TO_8)
def test_double_dual(group):
    for e in builders.idempotent_battery(group):
        a = KZeroRep.of(e)
        assert class_dual(class_dual(a)).positive == a.positive


def test_signed_c2_diagonal_dual():
    g = cyclic_group(2, -1, name="C2-")
    e = GroupRingMatrix.scalar_diag(g, (1, 0))
    assert class_dual(KZeroRep.of(e)).positive == (e,)


def test_non_idempotent_rejected():
    g = cyclic_group(2)
    with pytest.raises(MalformedInputError):
        KZeroRep.of(GroupRingMatrix.scalar_diag(g, (2,)))


# -- fingerprints ----------------------------------------------------------------


@pytest.mark.parametrize("group", builders.GROUPS_UP_TO_8)
def test_free_module_is_projective(group):
    assert projectivity_fingerprint(regular_module(group)).projective


def test_trivial_module_over_c2_not_projective():
    fp = projectivity_fingerprint(trivial_module(cyclic_group(2)))
    assert not fp.projective
    assert str(fp.entries[(2, 0)]) == "Z/2"


@pytest.mark.parametrize("group", [cyclic_group(2), cyclic_group(3), elementary_abelian_2(2)])
def test_image_modules_projective(group):
    for e in builders.idempotent_battery(group):
        mod = idempotent_module(e)
        assert mod.underlying().free_rank == e.trace_flat()
        assert idempotent_fingerprint(e).projective


# -- triviality ----------------------------------------------------------------


def test_trivial_group_always_yes():
    g = trivial_group()
    e = GroupRingMatrix.scalar_diag(g, (1, 0, 1))
    assert class_is_trivial(KZeroRep.of(e), REGISTRY).trivial


def test_identity_blocks_yes_without_registry():
    e = GroupRingMatrix.identity(cyclic_group(5), 2)
    assert class_is_trivial(KZeroRep.of(e), registry={}).trivial


@pytest.mark.parametrize("group", [cyclic_group(2), cyclic_group(3), cyclic_group(4),
                                   symmetric_group_s3(), elementary_abelian_2(3)])
def test_stably_free_witness_found(group):
    e = builders.stably_free_idempotent(group)
    w = find_free_witness(e)
    assert w is not None and w.verify()
    res = class_is_trivial(KZeroRep.of(e), registry={})
    assert res.trivial and res.witness.verify()


def test_registry_short_circuit():
    res = class_is_trivial(KZeroRep.of(builders.stably_free_idempotent(cyclic_group(7))),
                           REGISTRY)
    assert res.trivial and res.witness is None


def test_registry_contents():
    assert REGISTRY["C2xC2xC2"].k0_tilde.torsion == (2,)
    for name in ("trivial", "C2", "C3", "C5", "C4", "C2xC2", "S3"):
        assert REGISTRY[name].k0_tilde.is_zero


def test_splitting_of_non_projective_presentation():
    # coker(1 + t) over C2 is the sign module, not projective
    g = cyclic_group(2)
    assert splitting_idempotent(GroupRingMatrix.from_entries(g, [[[[1, 0], [1, 1]]]])) is None


# -- Tate cohomology ---------------------------------------------------------------


@pytest.mark.parametrize("parity", ["even", "odd"])
def test_tate_z2_trivial_involution(parity):
    assert str(tate_z2(involuted(1, [[2]], [[1]]), parity)) == "Z/2"


@pytest.mark.parametrize("sigma, even, odd", [(1, "Z/2", "0"), (-1, "0", "Z/2")])
def test_tate_on_z(sigma, even, odd):
    a = involuted(1, [], [[sigma]])
    assert (str(tate_z2(a, "even")), str(tate_z2(a, "odd"))) == (even, odd)


def test_bad_parity_and_involution():
    with pytest.raises(MalformedInputError):
        tate_z2(involuted(1, [[2]], [[1]]), "both")
    with pytest.raises(MalformedInputError):
        tate_z2(involuted(1, [], [[2]]), "even")


def _signed_permutations(n):
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            m = np.zeros((n, n), dtype=np.int64)
            for i, (j, s) in enumerate(zip(perm, signs)):
                m[j, i] = s
            if (m @ m == np.eye(n, dtype=np.int64)).all():
                yield m


@pytest.mark.parametrize("d", [2, 3, 4, 6])
@pytest.mark.parametrize("n", [1, 2])
def test_tate_matches_enumeration(d, n):
    for sigma in _signed_permutations(n):
        a = involuted(n, (d * np.eye(n, dtype=np.int64)).tolist(), sigma.tolist())
        for parity, eps in (("even", 1), ("odd", -1)):
            got = tate_z2(a, parity)
            assert got.free_rank == 0
            assert list(got.torsion) == oracles.tate_group_finite(d, sigma, eps)


@given(st.integers(0, 3))
def test_tate_groups_have_exponent_two(k):
    n = k + 1
    a = involuted(n, [], np.eye(n, dtype=np.int64)[::-1].tolist())
    for parity in ("even", "odd"):
        g = tate_z2(a, parity)
        assert all(t == 2 for t in g.torsion) and g.free_rank == 0


# -- self duality ----------------------------------------------------------------


@pytest.mark.parametrize("n", [3, 4, 7])
def test_self_dual_over_trivial_group(n):
    e = GroupRingMatrix.scalar_diag(trivial_group(), (1, 0))
    assert check_self_dual(KZeroRep.of(e), n, REGISTRY).verdict == "consistent"


@pytest.mark.parametrize("n", [3, 5])
def test_diagonal_odd_n_consistent_without_registry(n):
    e = GroupRingMatrix.scalar_diag(cyclic_group(3), (1, 0))
    assert check_self_dual(KZeroRep.of(e), n, registry={}).verdict == "consistent"


def test_self_dual_on_cube_group():
    g = elementary_abelian_2(3)
    rep = check_self_dual(KZeroRep.of(builders.stably_free_idempotent(g)), 4, REGISTRY)
    assert rep.verdict == "consistent"


def test_block_diagonal_classes_cancel_blockwise():
    g = elementary_abelian_2(3)
    e = builders.stably_free_idempotent(g)
    f = GroupRingMatrix.scalar_diag(g, (1, 0))
    both = KZeroRep.of(direct_sum(e, f))
    res = class_is_trivial(class_difference(both, class_sum(KZeroRep.of(e), KZeroRep.of(f))),
                           registry={})
    assert res.trivial and res.reason == "formal cancellation"


def test_spanning_columns_help_witness_search():
    # a retraction can turn E into an idempotent with the same image but large entries
    g = cyclic_group(3)
    e = builders.stably_free_idempotent(g)
    c = realize_finite(RealizationInput(point_complex(g), e, 3, 5))
    messy = c.boundary(3) @ find_retraction(c.boundary(3))
    w = find_free_witness(messy, spanning=c.boundary(3))
    assert w is not None and w.verify() and w.idempotent == messy
