"""G-norm: exact routes, relaxation, delta profiles, chain inequalities."""

import math

import numpy as np
import pytest

from gspear import (
    NotNormalizedError,
    OperatorSpec,
    delta_profile,
    euclidean,
    g_norm,
    g_norm_chain_check,
    gnorm_grid,
    identity,
    is_norm_probe,
    lp_space,
    norm_eval,
    op_norm,
)

from conftest import random_instance


def test_l1_example_formula(example_G, l1_2):
    """||T||_G = |a| + |c| on the coordinate-projection example."""
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b, c, d = rng.standard_normal(4)
        T = OperatorSpec([[a, b], [c, d]], l1_2, l1_2)
        res = g_norm(T, example_G)
        assert res.value == pytest.approx(abs(a) + abs(c), abs=1e-12)
        assert res.method == "polyhedral_exact" and res.certified
    T = OperatorSpec([[1.0, 2.0], [3.0, 4.0]], l1_2, l1_2)
    res = g_norm(T, example_G)
    assert res.value == 4.0
    np.testing.assert_allclose(res.witness.x, [1.0, 0.0])


def test_identity_reduces_to_op_norm(l2_2):
    T = OperatorSpec([[0.0, 1.0], [0.0, 0.0]], l2_2, l2_2)
    assert g_norm(T, identity(l2_2)).value == pytest.approx(1.0, abs=1e-12)
    for seed in range(8):
        _, T = random_instance(l2_2, seed, normalize_G=False)
        assert abs(g_norm(T, identity(l2_2)).value - op_norm(T).value) <= 1e-8


def test_partial_isometry_proof_instance(l2_2):
    G = OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2)
    T = OperatorSpec([[0.0, 0.0], [1.0, 0.0]], l2_2, l2_2)
    assert g_norm(T, G).value == pytest.approx(1.0, abs=1e-14)


def test_rejects_unnormalized_G(l2_2):
    G = OperatorSpec(np.diag([2.0, 0.5]), l2_2, l2_2)
    with pytest.raises(NotNormalizedError):
        g_norm(identity(l2_2), G)


def test_gnorm_homogeneity_and_triangle(example_G, l1_2):
    rng = np.random.default_rng(1)
    for _ in range(10):
        A = OperatorSpec(rng.standard_normal((2, 2)), l1_2, l1_2)
        B = OperatorSpec(rng.standard_normal((2, 2)), l1_2, l1_2)
        lam = rng.standard_normal()
        ga = g_norm(A, example_G).value
        gb = g_norm(B, example_G).value
        assert g_norm(A.scaled(lam), example_G).value == pytest.approx(
            abs(lam) * ga, abs=1e-9
        )
        assert g_norm(A + B, example_G).value <= ga + gb + 1e-8


def test_seminorm_degeneracy_is_legal(example_G, l1_2):
    T = OperatorSpec([[0.0, 0.0], [0.0, 1.0]], l1_2, l1_2)
    assert g_norm(T, example_G).value == 0.0
    probe = is_norm_probe(example_G, samples=10, seed=0)
    assert not probe["is_norm_plausible"]
    assert probe["min_ratio"] == 0.0
    assert len(probe["degenerate_examples"]) >= 1


def test_is_norm_probe_identity(l2_2):
    probe = is_norm_probe(identity(l2_2), samples=10, seed=1)
    assert probe["is_norm_plausible"]
    assert probe["min_ratio"] > 0.1


def test_hilbert_vs_relaxation_agreement(l2_3):
    """The two routes agree within 1e-6 on Euclidean instances."""
    for seed in range(8):
        G, T = random_instance(l2_3, 100 + seed)
        hx = g_norm(T, G, method="hilbert_exact").value
        rx = g_norm(T, G, method="relaxation")
        assert abs(hx - rx.value) <= 1e-6
        assert rx.value >= hx - 1e-9  # the band only over-estimates


def test_relaxation_certifies_flat_profiles(l2_2):
    res = g_norm(identity(l2_2), identity(l2_2), method="relaxation")
    assert res.value == pytest.approx(1.0, abs=1e-9)
    assert res.certified


def test_relaxation_plateau_is_not_trusted(l2_2):
    """An early plateau (unconstrained max barely outside M_G) must not stop
    the continuation at the plateau value."""
    G = OperatorSpec(np.diag([1.0, 0.99]), l2_2, l2_2)
    T = OperatorSpec(np.diag([0.1, 1.0]), l2_2, l2_2)
    exact = g_norm(T, G, method="hilbert_exact").value
    assert exact == pytest.approx(0.1, abs=1e-12)
    rx = g_norm(T, G, method="relaxation")
    assert abs(rx.value - exact) <= 1e-6


def test_gnorm_grid_oracle_matches_exact(l2_3, l1_2):
    for seed in range(3):
        G, T = random_instance(l2_3, 200 + seed)
        assert abs(g_norm(T, G).value - gnorm_grid(T, G).value) <= 2e-3
    for seed in range(3):
        G, T = random_instance(l1_2, 300 + seed)
        assert abs(g_norm(T, G).value - gnorm_grid(T, G).value) <= 2e-3


def test_delta_profile_identity(l2_2):
    T = OperatorSpec([[1.0, 2.0], [0.5, -1.0]], l2_2, l2_2)
    prof = delta_profile(T, identity(l2_2), deltas=[0.5, 0.25, 0.1, 0.01])
    tn = op_norm(T).value
    for _, s in prof.entries:
        assert s == pytest.approx(tn, abs=1e-9)


def test_delta_profile_l1_example(example_G, l1_2):
    """s(delta) for T = diag(0,1): max |x2| subject to |x1| >= 1 - delta."""
    T = OperatorSpec([[0.0, 0.0], [0.0, 1.0]], l1_2, l1_2)

    # independent 1-parameter brute force over the l1 circle
    def brute(delta, n=200_001):
        t = np.linspace(0, 2 * math.pi, n)
        xs = np.column_stack([np.cos(t), np.sin(t)])
        xs /= np.abs(xs).sum(axis=1)[:, None]
        ok = np.abs(xs[:, 0]) >= 1.0 - delta
        return np.abs(xs[ok, 1]).max()

    deltas = [0.5, 0.25, 0.125]
    prof = delta_profile(T, example_G, deltas=deltas)
    for (d, s), d_ref in zip(prof.entries, deltas):
        assert d == d_ref
        assert s == pytest.approx(d_ref, abs=1e-9)  # closed form: s(delta) = delta
        assert s == pytest.approx(brute(d_ref), abs=1e-4)


def test_delta_profile_monotone_and_bounded(l2_3):
    for seed in range(4):
        G, T = random_instance(l2_3, 400 + seed)
        prof = delta_profile(T, G, deltas=[0.5, 0.2, 0.1, 0.05, 0.01, 1e-3, 1e-5])
        gn = g_norm(T, G).value
        values = prof.values()
        for a, b in zip(values, values[1:]):
            assert a >= b - 1e-8
        assert values[-1] >= gn - 1e-8


def test_delta_profile_kernel_limit(example_G, l1_2):
    """The profile of the degenerate direction collapses to 0 = ||T||_G."""
    T = OperatorSpec([[0.0, 0.0], [0.0, 1.0]], l1_2, l1_2)
    prof = delta_profile(T, example_G, deltas=[2.0**-k for k in range(1, 16)])
    assert prof.values()[-1] <= 1e-4
    assert g_norm(T, example_G).value == 0.0


def test_chain_check_examples(example_G, l1_2, l2_2, l2_3):
    T = OperatorSpec([[1.0, 2.0], [3.0, 4.0]], l1_2, l1_2)
    rec = g_norm_chain_check(T, example_G)
    assert rec["nu"] == pytest.approx(4.0, abs=1e-12)
    assert rec["gnorm"] == pytest.approx(4.0, abs=1e-12)
    assert rec["opnorm"] == pytest.approx(6.0, abs=1e-12)
    assert rec["ok"]

    _, T2 = random_instance(l2_2, 7, normalize_G=False)
    rec2 = g_norm_chain_check(T2, identity(l2_2))
    assert rec2["ok"]
    assert rec2["gnorm"] == pytest.approx(rec2["opnorm"], abs=1e-10)

    G3 = OperatorSpec(np.diag([1.0, 1.0, 0.3]), l2_3, l2_3)
    for seed in range(5):
        _, T3 = random_instance(l2_3, 500 + seed, normalize_G=False)
        assert g_norm_chain_check(T3, G3)["ok"]


def test_gnorm_into_different_codomain(l1_2, l2_2, example_G):
    """T may map into a codomain different from G's."""
    T = OperatorSpec([[1.0, 0.0], [1.0, 1.0]], l1_2, l2_2)
    res = g_norm(T, example_G)
    # on M_G = {+-e1}: ||T e1||_2 = sqrt(2)
    assert res.value == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_smooth_lp_relaxation_circle(l2_2):
    space = lp_space(3.0, 2)
    for seed in range(4):
        G, T = random_instance(space, 600 + seed)
        rx = g_norm(T, G)
        assert rx.method == "relaxation"
        gg = gnorm_grid(T, G)
        assert abs(rx.value - gg.value) <= 2e-3
