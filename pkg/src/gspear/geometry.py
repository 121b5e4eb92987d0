"""Geometry of the G-norm: dual-ball atoms, smooth points, norm comparison.

The dual unit ball of (L(X,Y), ||.||_G) is the convex hull of the rank-one
functionals psi_{x,y*} = y* (x) x with ||x|| = ||y*|| = ||Gx|| = 1 (finite
dimensions).  Membership in the hull is certified one-sidedly by a
least-distance convex-combination fit over sampled atoms.  A unit-G-norm T
is smooth exactly when all its maximizing rank-one functionals coincide,
which is decided on the action matrices W (W_ij = y*_i x_j) because distinct
witness pairs can induce one functional.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from . import spaces as sp
from . import _solvers as sol
from .errors import DegenerateSeminormError, DimensionMismatchError
from .gnorm import check_g_normalized, g_norm, hilbert_applicable, polyhedral_applicable
from .operators import (
    OperatorSpec,
    SolverBudget,
    WitnessPair,
    _budget,
    attainment_sample,
    attainment_set,
    jacobi_svd,
    op_norm,
    random_operators,
)


@dataclass
class RankOneFunctional:
    """psi(S) = y*(Sx), stored with its action matrix W_ij = ystar_i x_j."""

    x: np.ndarray
    ystar: np.ndarray
    matrix: np.ndarray = None

    def __post_init__(self):
        if self.matrix is None:
            self.matrix = np.outer(self.ystar, self.x)

    def action(self, S: OperatorSpec) -> complex:
        return complex(np.sum(self.matrix * S.matrix))


@dataclass
class MaximizerSet:
    functionals: list
    diameter: float
    exhaustive: bool


@dataclass
class ComparisonModulus:
    """phi_hat(t) = min { ||G2 x|| : ||x|| = 1, ||G1 x|| >= t }, nondecreasing."""

    grid: list  # (t, phi_hat(t))
    limit_ok: bool


def _dedup_matrices(mats, tol):
    out = []
    for W in mats:
        if all(np.max(np.abs(W - K)) > tol for K in out):
            out.append(W)
    return out


def maximizing_functionals(
    T: OperatorSpec,
    G: OperatorSpec,
    tol: float = 1e-6,
    budget: SolverBudget | None = None,
    seed: int = 0,
) -> MaximizerSet:
    """All rank-one functionals psi_{x,y*} with psi(T) = ||T||_G.

    T is rescaled internally to ||T||_G = 1.  Exhaustive over attainment
    vertices times extreme support functionals in the polytopal case and via
    the top singular subspace in the Hilbert case; cluster sampling otherwise.
    (x, y*) and (-x, -y*) induce the same W and are deduplicated.
    """
    budget = _budget(budget)
    gn = g_norm(T, G, tol=1e-9, budget=budget).value
    if gn <= tol:
        raise DegenerateSeminormError(
            "||T||_G is numerically zero: no supporting structure"
        )
    T = T.scaled(1.0 / gn)
    att = attainment_set(G, tol=1e-10, budget=budget)
    pairs = []
    exhaustive = True

    if att.mode == "subspace" and hilbert_applicable(T, G):
        E = att.basis
        dec = jacobi_svd(T.matrix @ E)
        top = dec.singular_values >= dec.singular_values[0] * (1.0 - tol)
        k = int(top.sum())
        if k == 1:
            coeffs = [dec.right_vectors[:, 0]]
        else:
            # a continuum of maximizers: sample the top subspace's sphere
            exhaustive = False
            B = dec.right_vectors[:, top]
            rng = np.random.default_rng(seed)
            C = rng.standard_normal((128, k))
            if np.iscomplexobj(B):
                C = C + 1j * rng.standard_normal((128, k))
            C /= np.linalg.norm(C, axis=1)[:, None]
            coeffs = [B @ c for c in C]
        for c in coeffs:
            x = E @ c
            y = T.apply(x)
            ny = np.linalg.norm(y)
            if abs(ny - 1.0) > 10 * tol:
                continue
            pairs.append((x, np.conj(y) / ny))
    elif att.mode == "vertices":
        for v in att.points:
            tv = T.apply(v)
            if sp.norm_eval(T.codomain, tv) < 1.0 - tol:
                continue
            for ystar in sp.support_functionals(T.codomain, tv, tol=1e-9):
                pairs.append((v, ystar))
        # facets all of whose points maximize contribute interior pairs
        rng = np.random.default_rng(seed)
        for fverts in att.facets:
            tvals = sp._batch_norm(T.codomain, (T.matrix @ fverts.T).T)
            if not np.all(tvals >= 1.0 - tol):
                continue
            centroid = fverts.mean(axis=0)
            if sp.norm_eval(T.codomain, T.apply(centroid)) < 1.0 - tol:
                continue
            exhaustive = False  # a flat of maximizers; sample its interior
            for _ in range(16):
                w = rng.dirichlet(np.ones(len(fverts)))
                x = w @ fverts
                tv = T.apply(x)
                if sp.norm_eval(T.codomain, tv) < 1.0 - tol:
                    continue
                for ystar in sp.support_functionals(T.codomain, tv, tol=1e-9):
                    pairs.append((x, ystar))
    else:
        exhaustive = False
        xs = attainment_sample(att, G, 256, seed)
        for x in xs:
            tv = T.apply(x)
            if sp.norm_eval(T.codomain, tv) < 1.0 - tol:
                continue
            pairs.append((x, sp.support_functional_of(T.codomain, tv)))

    mats = [np.outer(ystar, x) for x, ystar in pairs]
    mats = _dedup_matrices(mats, tol)
    funcs = []
    for x, ystar in pairs:
        W = np.outer(ystar, x)
        if any(np.max(np.abs(W - F.matrix)) <= tol for F in funcs):
            continue
        funcs.append(RankOneFunctional(x=x, ystar=ystar, matrix=W))
    diameter = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            diameter = max(diameter, float(np.linalg.norm(mats[i] - mats[j])))
    return MaximizerSet(functionals=funcs, diameter=diameter, exhaustive=exhaustive)


def is_smooth(
    T: OperatorSpec,
    G: OperatorSpec,
    tol: float = 1e-6,
    budget: SolverBudget | None = None,
    seed: int = 0,
) -> dict:
    """Decide smoothness of a unit-G-norm T in (L(X,Y), ||.||_G)."""
    budget = _budget(budget)
    gn = g_norm(T, G, tol=1e-9, budget=budget).value
    if abs(gn - 1.0) > max(tol, 1e-6):
        raise ValueError(f"||T||_G = {gn!r}; normalize T to unit G-norm first")
    ms = maximizing_functionals(T, G, tol=tol, budget=budget, seed=seed)
    smooth = ms.diameter <= tol
    return {
        "smooth": bool(smooth),
        "functional": ms.functionals[0] if smooth and ms.functionals else None,
        "diameter": float(ms.diameter),
        "heuristic": not ms.exhaustive,
    }


def sample_dual_atoms(
    G: OperatorSpec,
    atoms: int,
    seed: int,
    budget: SolverBudget | None = None,
    align_to: OperatorSpec | None = None,
) -> list[RankOneFunctional]:
    """Atoms of the dual ball: psi_{x,y*} with x in M_G, ||y*|| = 1.

    Emitted in +-pairs (the atom set is symmetric).  When `align_to` is given,
    half of the y* are support functionals of (align_to)x, which makes the
    sampled hull approach sup |psi(T)| = ||T||_G quickly.
    """
    budget = _budget(budget)
    att = attainment_set(G, tol=1e-10, budget=budget)
    half = max(1, atoms // 2)
    xs = attainment_sample(att, G, half, seed)
    ys = sp.dual_sphere_sample(G.codomain, half, seed + 1)
    out = []
    for i, x in enumerate(xs):
        if align_to is not None and i % 2 == 0:
            tv = align_to.apply(x)
            if sp.norm_eval(align_to.codomain, tv) > 1e-12:
                ystar = sp.support_functional_of(align_to.codomain, tv)
            else:
                ystar = ys[i]
        else:
            ystar = ys[i]
        psi = RankOneFunctional(x=x, ystar=ystar)
        out.append(psi)
        out.append(RankOneFunctional(x=x, ystar=-ystar, matrix=-psi.matrix))
    return out


def dual_membership(
    W,
    G: OperatorSpec,
    atoms: int = 2048,
    seed: int = 0,
    tol: float = 1e-9,
    budget: SolverBudget | None = None,
) -> dict:
    """Distance from W to the convex hull of sampled dual-ball atoms.

    ``inside`` (distance <= tol) is certified; "outside" is only heuristic,
    since more atoms can shrink the distance.
    """
    budget = _budget(budget)
    if isinstance(W, RankOneFunctional):
        W = W.matrix
    W = np.asarray(W)
    if W.shape != (G.codomain.dim, G.domain.dim):
        raise DimensionMismatchError(
            f"W has shape {W.shape}, expected {(G.codomain.dim, G.domain.dim)}"
        )
    atom_list = sample_dual_atoms(G, atoms, seed, budget=budget)
    cols = []
    for psi in atom_list:
        M = psi.matrix
        v = M.ravel()
        cols.append(np.concatenate([v.real, v.imag]) if np.iscomplexobj(M) else v)
    b = W.ravel()
    b = np.concatenate([b.real, b.imag]) if np.iscomplexobj(W) else b.astype(float)
    A = np.column_stack(cols)
    scale = max(1.0, float(np.abs(A).max()))
    rho = 10.0 * scale
    A_aug = np.vstack([A, rho * np.ones(A.shape[1])])
    b_aug = np.concatenate([b, [rho]])
    lam, _ = nnls(A_aug, b_aug)
    s = lam.sum()
    if s > 0:
        lam = lam / s
    combo = A @ lam
    distance = float(np.linalg.norm(combo - b))
    return {
        "inside": bool(distance <= tol),
        "distance": distance,
        "atoms_used": len(atom_list),
    }


def gnorm_dominance_check(
    G1: OperatorSpec,
    G2: OperatorSpec,
    tgrid=None,
    samples: int = 25,
    seed: int = 0,
    tol: float = 1e-8,
    limit_tol: float = 1e-6,
    budget: SolverBudget | None = None,
) -> dict:
    """Best-possible comparison modulus phi_hat and a deck test of dominance.

    phi_hat(t) = min ||G2 x|| over the unit sphere subject to ||G1 x|| >= t.
    limit_ok holds when phi_hat at the finest t is within limit_tol of 1; the
    theorem then predicts ||T||_{G1} <= ||T||_{G2} on every operator, which is
    checked on a seeded deck.
    """
    budget = _budget(budget)
    if G1.domain != G2.domain or G1.codomain != G2.codomain:
        raise DimensionMismatchError("G1 and G2 must act between the same spaces")
    check_g_normalized(G1, tol=1e-8, budget=budget)
    check_g_normalized(G2, tol=1e-8, budget=budget)
    if tgrid is None:
        tgrid = [0.5, 0.75, 0.9, 0.99, 0.999, 1.0 - 1e-8]
    tgrid = sorted(float(t) for t in tgrid)
    if tgrid[0] <= 0.0 or tgrid[-1] > 1.0:
        raise ValueError("t values must lie in (0, 1]")

    objective = sol.norm_objective(G2)
    constraint = sol.constraint_pack(G1)
    anchors = sol.mg_seed_points(G1, budget, seed=seed)
    samples_x = list(sp.sphere_sample(G1.domain, 6, seed + 1))

    grid = []
    carried = None  # minimum over coarser (smaller-t) levels is a lower bound
    for t in tgrid:
        starts = anchors[:6] + samples_x
        out = sol.constrained_extremum(
            G1.domain, objective, constraint, t, starts, budget, maximize=False
        )
        if out is None:
            raise RuntimeError(f"no feasible point at t={t}")
        v, _ = out
        # nested feasible sets: phi_hat is nondecreasing in t
        carried = v if carried is None else max(v, carried)
        grid.append((t, float(carried)))
    # enforce monotonicity downward as well (a witness at large t is feasible
    # at small t, so earlier entries can only be lowered)
    for i in range(len(grid) - 2, -1, -1):
        grid[i] = (grid[i][0], min(grid[i][1], grid[i + 1][1]))

    limit_ok = grid[-1][1] >= 1.0 - limit_tol
    modulus = ComparisonModulus(grid=grid, limit_ok=bool(limit_ok))

    deck = random_operators(G1.domain, G1.codomain, samples, seed + 2)
    deck.extend([G1, G2])
    worst = -np.inf
    dominance_ok = True
    for T in deck:
        v1 = g_norm(T, G1, tol=tol, budget=budget).value
        v2 = g_norm(T, G2, tol=tol, budget=budget).value
        worst = max(worst, v1 - v2)
        if v1 > v2 + max(tol, 1e-7):
            dominance_ok = False
    return {
        "modulus": modulus,
        "limit_ok": bool(limit_ok),
        "dominance_ok": bool(dominance_ok),
        "max_violation": float(worst),
    }
