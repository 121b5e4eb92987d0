"""Numerical ranges V_G / S_G and the radius nu_G."""

import math

import numpy as np
import pytest

from gspear import (
    OperatorSpec,
    classical_numerical_radius,
    euclidean,
    g_norm,
    identity,
    lp_space,
    nu_g,
    nu_grid,
    s_range_sample,
    v_range_sample,
)

from conftest import random_instance


def circle_radius_oracle(T: OperatorSpec, resolution: int = 100_000) -> float:
    """max |<Tx, x>| over the Euclidean circle, by brute grid."""
    t = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    X = np.column_stack([np.cos(t), np.sin(t)])
    vals = np.einsum("ij,ij->i", X @ T.matrix.T, X)
    return float(np.abs(vals).max())


def test_nu_l1_example(example_G, l1_2):
    rng = np.random.default_rng(2)
    for _ in range(15):
        a, b, c, d = rng.standard_normal(4)
        T = OperatorSpec([[a, b], [c, d]], l1_2, l1_2)
        assert nu_g(T, example_G).value == pytest.approx(abs(a) + abs(c), abs=1e-12)


def test_nu_partial_isometry_counterexample(l2_2):
    G = OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2)
    T = OperatorSpec([[0.0, 0.0], [1.0, 0.0]], l2_2, l2_2)
    assert nu_g(T, G).value == pytest.approx(0.0, abs=1e-14)


def test_nu_shift_operator(l2_2):
    T = OperatorSpec([[0.0, 1.0], [0.0, 0.0]], l2_2, l2_2)
    res = nu_g(T, identity(l2_2))
    assert res.value == pytest.approx(0.5, abs=1e-12)
    assert res.value == pytest.approx(circle_radius_oracle(T), abs=1e-9)


def test_classical_radius_examples(l2_2, l1_2):
    l2_3 = euclidean(3)
    assert classical_numerical_radius(identity(l2_3)) == pytest.approx(1.0, abs=1e-12)
    T = OperatorSpec([[0.0, 1.0], [0.0, 0.0]], l2_2, l2_2)
    assert classical_numerical_radius(T) == pytest.approx(0.5, abs=1e-12)
    # l1 version: vertex x support-functional enumeration gives 1
    T1 = OperatorSpec([[0.0, 1.0], [0.0, 0.0]], l1_2, l1_2)
    assert classical_numerical_radius(T1) == pytest.approx(1.0, abs=1e-12)


def test_nu_below_gnorm(l2_3):
    for seed in range(6):
        G, T = random_instance(l2_3, seed)
        assert nu_g(T, G).value <= g_norm(T, G).value + 1e-10


def test_nu_homogeneity(example_G, l1_2):
    rng = np.random.default_rng(3)
    for _ in range(8):
        T = OperatorSpec(rng.standard_normal((2, 2)), l1_2, l1_2)
        lam = rng.standard_normal()
        assert nu_g(T.scaled(lam), example_G).value == pytest.approx(
            abs(lam) * nu_g(T, example_G).value, abs=1e-9
        )


def test_nu_unitary_invariance(l2_3):
    rng = np.random.default_rng(4)
    I3 = identity(l2_3)
    for seed in range(5):
        _, T = random_instance(l2_3, 40 + seed, normalize_G=False)
        Q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        TQ = OperatorSpec(Q @ T.matrix @ Q.T, l2_3, l2_3)
        assert nu_g(TQ, I3).value == pytest.approx(nu_g(T, I3).value, abs=1e-8)


def test_nu_complex_hilbert():
    l2c = euclidean(2, field="complex")
    T = OperatorSpec(np.diag([1j, -1j]), l2c, l2c)
    assert nu_g(T, identity(l2c)).value == pytest.approx(1.0, abs=1e-9)
    rng = np.random.default_rng(5)
    M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    T2 = OperatorSpec(M, l2c, l2c)
    # complex radius dominates the real symmetric-part bound and <= op norm
    val = nu_g(T2, identity(l2c)).value
    assert val <= np.linalg.svd(M, compute_uv=False)[0] + 1e-10
    assert val >= np.abs(np.linalg.eigvals(M)).max() - 1e-10


def test_v_range_l1_example(example_G, l1_2):
    """Values fill {a + y2 c x1 : |x1| = 1, |y2| <= 1}: the interval a +- |c|
    after sign folding."""
    T = OperatorSpec([[1.0, 2.0], [3.0, 4.0]], l1_2, l1_2)
    sample = v_range_sample(T, example_G, 400, seed=6)
    vals = sample.values().astype(float)
    assert np.abs(vals).max() <= 4.0 + 1e-10
    assert np.abs(vals).max() >= 4.0 - 0.2  # extremes are enumerated
    # witnesses satisfy the defining constraint y*(Gx) = 1
    for v, w in sample.points[:50]:
        assert float(np.dot(w.ystar, example_G.apply(w.x))) == pytest.approx(1.0, abs=1e-10)


def test_v_range_t_equals_g(example_G):
    sample = v_range_sample(example_G, example_G, 60, seed=7)
    np.testing.assert_allclose(sample.values().astype(float), 1.0, atol=1e-12)


def test_v_range_complex_segment():
    l2c = euclidean(2, field="complex")
    T = OperatorSpec(np.diag([1j, -1j]), l2c, l2c)
    sample = v_range_sample(T, identity(l2c), 200, seed=8)
    vals = sample.values()
    assert np.abs(vals.real).max() <= 1e-10  # the segment [-i, i]
    assert np.abs(vals.imag).max() <= 1.0 + 1e-10


def test_s_tilde_l1_example(example_G, l1_2):
    T = OperatorSpec([[1.0, 2.0], [3.0, 4.0]], l1_2, l1_2)
    sample = s_range_sample(T, example_G, 40, seed=9, kind="S_tilde")
    np.testing.assert_allclose(sample.values().astype(float), 4.0, atol=1e-12)


def test_s_range_bounded_by_gnorm(example_G, l1_2):
    T = OperatorSpec([[1.0, 2.0], [3.0, 4.0]], l1_2, l1_2)
    sample = s_range_sample(T, example_G, 100, seed=10, kind="S_G")
    assert np.abs(sample.values().astype(float)).max() <= g_norm(T, example_G).value + 1e-10


def test_s_tilde_identity(l2_2):
    _, T = random_instance(l2_2, 11, normalize_G=False)
    sample = s_range_sample(T, identity(l2_2), 50, seed=11, kind="S_tilde")
    from gspear import op_norm

    assert sample.values().max() <= op_norm(T).value + 1e-10


def test_v_range_values_below_radius(example_G, l1_2):
    T = OperatorSpec([[0.3, -1.2], [0.7, 0.4]], l1_2, l1_2)
    nu = nu_g(T, example_G).value
    sample = v_range_sample(T, example_G, 200, seed=12)
    assert np.abs(sample.values().astype(float)).max() <= nu + 1e-10


def test_nu_smooth_lp_relaxation_vs_grid():
    space = lp_space(1.5, 2)
    for seed in range(3):
        G, T = random_instance(space, 700 + seed)
        rel = nu_g(T, G)
        assert rel.method == "relaxation"
        assert abs(rel.value - nu_grid(T, G)) <= 2e-3
