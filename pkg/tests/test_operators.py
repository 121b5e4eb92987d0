"""Operator norm, Jacobi SVD, partial isometries, attainment sets."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gspear import (
    OperatorSpec,
    UnsupportedSpaceError,
    attainment_set,
    attainment_sample,
    euclidean,
    identity,
    is_partial_isometry,
    jacobi_svd,
    lp_space,
    normalize,
    norm_eval,
    op_norm,
    svd_decompose,
)

from conftest import random_instance


def test_op_norm_examples(example_G, l2_2):
    assert op_norm(example_G).value == pytest.approx(1.0, abs=1e-15)
    for p in (1.0, 2.0, math.inf):
        space = lp_space(p, 3)
        assert op_norm(identity(space)).value == pytest.approx(1.0, abs=1e-12)
    D = OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2)
    assert op_norm(D).value == pytest.approx(1.0, abs=1e-14)


def test_op_norm_l1_is_max_column_sum(l1_2):
    T = OperatorSpec([[1.0, 2.0], [3.0, 4.0]], l1_2, l1_2)
    assert op_norm(T).value == pytest.approx(6.0, abs=1e-14)


def test_op_norm_homogeneity(l2_3):
    rng = np.random.default_rng(0)
    for seed in range(5):
        _, T = random_instance(l2_3, seed, normalize_G=False)
        lam = rng.standard_normal()
        assert op_norm(T.scaled(lam)).value == pytest.approx(
            abs(lam) * op_norm(T).value, abs=1e-9
        )


def test_op_norm_ascent_agrees_with_exact():
    """Generic route (smooth p) against the vertex/svd routes via grid bounds."""
    rng = np.random.default_rng(3)
    space = lp_space(1.5, 3)
    from gspear import sphere_sample
    for seed in range(4):
        T = OperatorSpec(rng.standard_normal((3, 3)), space, space)
        res = op_norm(T)
        xs = sphere_sample(space, 20_000, seed)
        grid = max(norm_eval(space, T.apply(x)) for x in xs)
        assert res.value >= grid - 1e-9  # ascent dominates any sample
        assert res.value <= grid + 5e-3  # and cannot exceed the sup by much


def test_jacobi_svd_examples(l2_2):
    dec = svd_decompose(OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2))
    assert_allclose(dec.singular_values, [1.0, 0.5], atol=1e-14)
    dec = svd_decompose(OperatorSpec([[0.0, 1.0], [0.0, 0.0]], l2_2, l2_2))
    assert_allclose(dec.singular_values, [1.0, 0.0], atol=1e-14)


@pytest.mark.parametrize("shape", [(3, 3), (4, 2), (2, 5), (6, 6)])
@pytest.mark.parametrize("cplx", [False, True])
def test_jacobi_svd_against_lapack(shape, cplx):
    rng = np.random.default_rng(hash(shape) % 2**31)
    A = rng.standard_normal(shape)
    if cplx:
        A = A + 1j * rng.standard_normal(shape)
    dec = jacobi_svd(A)
    # reconstruction within the declared tolerance
    R = (dec.left_vectors * dec.singular_values) @ dec.right_vectors.conj().T
    assert np.linalg.norm(A - R) <= 1e-10 * max(np.linalg.norm(A), 1.0)
    # orthonormal factors
    k = min(shape)
    assert_allclose(dec.left_vectors.conj().T @ dec.left_vectors, np.eye(k), atol=1e-10)
    assert_allclose(dec.right_vectors.conj().T @ dec.right_vectors, np.eye(k), atol=1e-10)
    # independent check: LAPACK singular values
    assert_allclose(dec.singular_values, np.linalg.svd(A, compute_uv=False), atol=1e-10)


def test_jacobi_svd_rank_deficient():
    A = np.outer([1.0, 2.0, -1.0], [0.5, 0.5, 0.0, 1.0])
    dec = jacobi_svd(A)
    R = (dec.left_vectors * dec.singular_values) @ dec.right_vectors.conj().T
    assert np.linalg.norm(A - R) <= 1e-12 * np.linalg.norm(A)
    assert (dec.singular_values[1:] <= 1e-12).all()


def test_op_norm_matches_svd(l2_3):
    for seed in range(6):
        _, T = random_instance(l2_3, seed, normalize_G=False)
        s1 = svd_decompose(T).singular_values[0]
        assert abs(op_norm(T).value - s1) <= 1e-10


def test_is_partial_isometry(l2_2, l2_3):
    assert is_partial_isometry(OperatorSpec(np.diag([1.0, 0.0, 1.0]), l2_3, l2_3))
    assert not is_partial_isometry(OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2))
    assert is_partial_isometry(identity(l2_3))


def test_partial_isometry_implies_projection_identity(l2_3):
    rng = np.random.default_rng(5)
    Q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    A = OperatorSpec(Q[:, :2] @ np.eye(2, 3), l2_3, l2_3)
    tol = 1e-10
    assert is_partial_isometry(A, tol=tol)
    M = A.matrix
    assert np.linalg.norm(M @ M.conj().T @ M - M) <= 3 * tol * max(np.linalg.norm(M), 1)


def test_attainment_euclidean(l2_2):
    G = OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2)
    att = attainment_set(G)
    assert att.mode == "subspace"
    assert att.basis.shape == (2, 1)
    assert abs(abs(att.basis[0, 0]) - 1.0) < 1e-12
    # grid confirmation that only +-e1 attains
    thetas = np.linspace(0, 2 * math.pi, 4001)
    xs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    vals = np.linalg.norm(xs @ G.matrix.T, axis=1)
    near = xs[vals >= 1.0 - 1e-6]
    assert np.abs(near[:, 1]).max() < 2e-3


def test_attainment_l1_example(example_G):
    att = attainment_set(example_G)
    assert att.mode == "vertices"
    assert sorted(map(tuple, np.round(att.points, 12))) == [(-1.0, -0.0), (1.0, 0.0)]
    assert att.facets == []


def test_attainment_identity_full_sphere(l2_2):
    att = attainment_set(identity(l2_2))
    assert att.mode == "subspace"
    assert att.basis.shape == (2, 2)


def test_attainment_identity_linf_records_facets(linf_2):
    att = attainment_set(identity(linf_2))
    assert att.mode == "vertices"
    assert len(att.points) == 4
    assert len(att.facets) == 4  # every facet of the square is flat on the sphere


def test_attainment_points_attain(l2_3):
    for seed in range(4):
        G, _ = random_instance(l2_3, seed)
        att = attainment_set(G, tol=1e-8)
        xs = attainment_sample(att, G, 32, seed)
        gnorm = op_norm(G).value
        for x in xs:
            assert norm_eval(l2_3, x) == pytest.approx(1.0, abs=1e-10)
            assert norm_eval(l2_3, G.apply(x)) >= gnorm - 1e-8


def test_attainment_cluster_mode():
    space = lp_space(1.5, 3)
    rng = np.random.default_rng(9)
    G = normalize(OperatorSpec(rng.standard_normal((3, 3)), space, space))
    att = attainment_set(G)
    assert att.mode == "cluster"
    assert len(att.points) >= 1
    for x in att.points:
        assert norm_eval(space, G.apply(x)) >= 1.0 - 1e-6


def test_normalize(l2_3):
    _, T = random_instance(l2_3, 3, normalize_G=False)
    N = normalize(T)
    assert op_norm(N).value == pytest.approx(1.0, abs=1e-12)


def test_svd_rejects_non_euclidean(l1_2):
    with pytest.raises(UnsupportedSpaceError):
        svd_decompose(OperatorSpec(np.eye(2), l1_2, l1_2))


def test_operator_validation(l1_2, l2_3):
    with pytest.raises(Exception):
        OperatorSpec(np.eye(3), l1_2, l1_2)  # shape mismatch
    with pytest.raises(ValueError):
        OperatorSpec(np.eye(2) * 1j, l1_2, l1_2)  # complex entries, real spaces
