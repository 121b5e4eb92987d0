"""Dual-ball atoms and membership, smooth points, the comparison modulus."""

import numpy as np
import pytest

from gspear import (
    OperatorSpec,
    dual_membership,
    euclidean,
    g_norm,
    gnorm_dominance_check,
    identity,
    is_smooth,
    lp_space,
    maximizing_functionals,
    sample_dual_atoms,
    DegenerateSeminormError,
)

from conftest import random_instance


def test_maximizers_diag(l2_2):
    ms = maximizing_functionals(OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2), identity(l2_2))
    assert len(ms.functionals) == 1
    np.testing.assert_allclose(ms.functionals[0].matrix, [[1.0, 0.0], [0.0, 0.0]], atol=1e-12)
    assert ms.diameter == 0.0


def test_maximizers_identity_sphere(l2_2):
    ms = maximizing_functionals(identity(l2_2), identity(l2_2))
    assert ms.diameter > 0.5  # W spans {x x^T : |x| = 1}
    assert not ms.exhaustive


def test_maximizers_l1_example(example_G):
    ms = maximizing_functionals(example_G, example_G)
    mats = sorted(np.round(f.matrix, 12).tolist() for f in ms.functionals)
    assert mats == [[[1.0, 0.0], [-1.0, 0.0]], [[1.0, 0.0], [1.0, 0.0]]]
    assert ms.diameter == pytest.approx(2.0, abs=1e-12)


def test_maximizers_reject_degenerate(example_G, l1_2):
    T = OperatorSpec([[0.0, 0.0], [0.0, 1.0]], l1_2, l1_2)
    with pytest.raises(DegenerateSeminormError):
        maximizing_functionals(T, example_G)


def test_smooth_triple(example_G, l2_2):
    r1 = is_smooth(OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2), identity(l2_2))
    assert r1["smooth"] and r1["functional"] is not None
    assert r1["functional"].action(OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2)) == pytest.approx(1.0)
    r2 = is_smooth(identity(l2_2), identity(l2_2))
    assert not r2["smooth"]
    r3 = is_smooth(example_G, example_G)
    assert not r3["smooth"]


def test_smooth_sign_invariance(l2_2):
    """(x, y*) and (-x, -y*) produce one functional, so rank-one T stays smooth."""
    T = OperatorSpec(np.outer([0.6, 0.8], [1.0, 0.0]), l2_2, l2_2)
    res = is_smooth(T, identity(l2_2))
    assert res["smooth"]


def test_smooth_requires_unit_norm(example_G, l1_2):
    with pytest.raises(ValueError, match="unit G-norm"):
        is_smooth(OperatorSpec([[2.0, 0.0], [0.0, 0.0]], l1_2, l1_2), example_G)


def test_dual_atoms_constraints(example_G):
    atoms = sample_dual_atoms(example_G, 64, seed=0)
    from gspear import dual_norm_eval, norm_eval

    for psi in atoms[:20]:
        assert norm_eval(example_G.domain, psi.x) == pytest.approx(1.0, abs=1e-10)
        assert dual_norm_eval(example_G.codomain, psi.ystar) == pytest.approx(1.0, abs=1e-10)
        assert norm_eval(
            example_G.codomain, example_G.apply(psi.x)
        ) == pytest.approx(1.0, abs=1e-10)


def test_dual_membership_atom_and_zero(example_G):
    atoms = sample_dual_atoms(example_G, 16, seed=1)
    rec = dual_membership(atoms[0].matrix, example_G, atoms=256, seed=1)
    assert rec["inside"] and rec["distance"] <= 1e-9
    rec0 = dual_membership(np.zeros((2, 2)), example_G, atoms=256, seed=1)
    assert rec0["inside"]


def test_dual_membership_unreachable_functional(example_G):
    """S -> S_22 vanishes on every atom column; distance stays bounded away."""
    W = np.outer([0.0, 1.0], [0.0, 1.0])
    rec = dual_membership(W, example_G, atoms=1024, seed=2)
    assert not rec["inside"]
    assert rec["distance"] >= 0.5


def test_dual_ball_consistency(l2_3):
    """max |psi(T)| over atoms stays below and approaches the G-norm."""
    for seed in range(3):
        G, T = random_instance(l2_3, 900 + seed)
        gn = g_norm(T, G).value
        atoms = sample_dual_atoms(G, 4000, seed=seed, align_to=T)
        vals = [abs(psi.action(T)) for psi in atoms]
        assert max(vals) <= gn + 1e-9
        assert max(vals) >= gn - 2e-3


def test_dominance_examples(l2_2):
    Gd = OperatorSpec(np.diag([1.0, 0.5]), l2_2, l2_2)
    I2 = identity(l2_2)
    rec = gnorm_dominance_check(Gd, I2, samples=6, seed=0)
    assert rec["limit_ok"] and rec["dominance_ok"]
    assert all(v == pytest.approx(1.0, abs=1e-9) for _, v in rec["modulus"].grid)

    rec_eq = gnorm_dominance_check(Gd, Gd, samples=5, seed=0)
    assert rec_eq["limit_ok"] and rec_eq["dominance_ok"]
    for t, v in rec_eq["modulus"].grid:
        assert v >= t - 1e-9

    rec_bad = gnorm_dominance_check(I2, Gd, samples=6, seed=0)
    assert not rec_bad["limit_ok"]
    assert rec_bad["modulus"].grid[-1][1] == pytest.approx(0.5, abs=1e-6)
    assert not rec_bad["dominance_ok"]  # fails already on T = e2 (x) e2


def test_dominance_modulus_monotone(l2_3):
    rng = np.random.default_rng(5)
    from gspear import normalize

    G1 = normalize(OperatorSpec(rng.standard_normal((3, 3)), l2_3, l2_3))
    G2 = normalize(OperatorSpec(rng.standard_normal((3, 3)), l2_3, l2_3))
    rec = gnorm_dominance_check(G1, G2, samples=4, seed=5)
    vals = [v for _, v in rec["modulus"].grid]
    assert all(a <= b + 1e-9 for a, b in zip(vals, vals[1:]))


def test_dominance_limit_implies_deck(l2_2):
    """Whenever the modulus certifies the limit, the deck inequality holds."""
    rng = np.random.default_rng(6)
    I2 = identity(l2_2)
    for seed in range(4):
        d = rng.uniform(0.2, 0.9)
        Gd = OperatorSpec(np.diag([1.0, d]), l2_2, l2_2)
        rec = gnorm_dominance_check(Gd, I2, samples=6, seed=seed)
        assert rec["limit_ok"]
        assert rec["dominance_ok"]
