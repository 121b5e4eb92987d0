"""The norm of an operator relative to G.

``g_norm`` computes max{ ||Tx|| : x on the unit sphere, ||Gx|| = 1 } for a
norm-one G.  Where structure permits, the computation is exact: on Euclidean
spaces the feasible set is the unit sphere of the top singular subspace E
and the value is the top singular value of T restricted to E; on polytopal
real domains the feasible set is covered by maximizing vertices (and facets
whose points all maximize), over which the convex map ``x -> ||Tx||`` peaks
at vertices.  The general fallback follows the defining inf-over-delta
construction: evaluate s(delta) = sup{ ||Tx|| : ||Gx|| >= 1 - delta } on a
decreasing grid and keep tightening until consecutive values agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spaces as sp
from . import _solvers as sol
from .errors import DimensionMismatchError, NotNormalizedError
from .gridsearch import gnorm_grid
from .operators import (
    DEFAULT_BUDGET,
    AttainmentSet,
    NormResult,
    OperatorSpec,
    SolverBudget,
    WitnessPair,
    attainment_set,
    better_witness,
    canonical_witness,
    jacobi_svd,
    op_norm,
    random_operators,
    _budget,
)

__all__ = [
    "DeltaProfile",
    "WitnessPair",
    "g_norm",
    "delta_profile",
    "g_norm_chain_check",
    "is_norm_probe",
]


@dataclass
class DeltaProfile:
    """Sampled graph of delta -> s(delta), delta strictly decreasing."""

    entries: list
    certified: bool = True

    def values(self):
        return [s for _, s in self.entries]

    def deltas(self):
        return [d for d, _ in self.entries]


def check_g_normalized(G: OperatorSpec, tol: float, budget: SolverBudget) -> float:
    val = op_norm(G, budget).value
    if abs(val - 1.0) > max(tol, 1e-12):
        raise NotNormalizedError(f"||G|| = {val!r}, expected 1 within {tol}")
    return val


def _require_same_domain(T: OperatorSpec, G: OperatorSpec):
    if T.domain != G.domain:
        raise DimensionMismatchError("T and G must share their domain space")


def hilbert_applicable(T: OperatorSpec, G: OperatorSpec) -> bool:
    return (
        G.domain.is_euclidean
        and G.codomain.is_euclidean
        and T.codomain.is_euclidean
    )


def polyhedral_applicable(G: OperatorSpec) -> bool:
    return G.domain.is_polytopal and G.domain.dim <= 6


def _gnorm_hilbert(T, G, tol, budget) -> NormResult:
    att = attainment_set(G, tol=max(tol, 1e-10), budget=budget)
    E = att.basis
    dec = jacobi_svd(T.matrix @ E)
    value = float(dec.singular_values[0])
    c = dec.right_vectors[:, 0]
    x = E @ c
    return _finish_witness(T, x, value, "hilbert_exact", True)


def _gnorm_polyhedral(T, G, tol, budget) -> NormResult:
    att = attainment_set(G, tol=max(tol, 1e-10), budget=budget)
    best_v, best_x = -1.0, None
    for v in att.points:
        val = sp.norm_eval(T.codomain, T.apply(v))
        xc, _ = canonical_witness(v)
        if best_x is None or better_witness(val, xc, best_v, best_x):
            best_v, best_x = val, xc
    return _finish_witness(T, best_x, best_v, "polyhedral_exact", True)


def _gnorm_relaxation(T, G, tol, budget, deltas=None, seed=0) -> NormResult:
    objective = sol.norm_objective(T)
    constraint = sol.constraint_pack(G)
    entries, x, converged = sol.relaxation_profile(
        objective, constraint, T.domain, tol, budget,
        deltas=deltas, seed=seed, extend=True, G=G,
    )
    value = entries[-1][1]
    res = _finish_witness(T, x, value, "relaxation", converged)
    res.profile = DeltaProfile(entries=entries, certified=converged)
    return res


def _finish_witness(T, x, value, method, certified) -> NormResult:
    ystar = None
    y = T.apply(x)
    if sp.norm_eval(T.codomain, y) > 0:
        try:
            ystar = sp.support_functional_of(T.codomain, y)
        except Exception:
            ystar = None
    x, ystar = canonical_witness(x, ystar)
    res = NormResult(
        value=float(value),
        witness=WitnessPair(x=x, ystar=ystar, value=float(value)),
        method=method,
        certified=certified,
    )
    res.profile = None
    return res


def g_norm(
    T: OperatorSpec,
    G: OperatorSpec,
    method: str = "auto",
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
    seed: int = 0,
) -> NormResult:
    """Norm of T relative to G, with a maximizing witness.

    Methods: ``hilbert_exact`` (all spaces Euclidean), ``polyhedral_exact``
    (real polytopal domain, dim <= 6), ``relaxation`` (delta continuation),
    ``grid`` (independent zoom-grid oracle, real, dim <= 3), or ``auto``.
    T may map into a codomain different from G's.
    """
    budget = _budget(budget)
    _require_same_domain(T, G)
    check_g_normalized(G, tol, budget)

    if method == "auto":
        if hilbert_applicable(T, G):
            method = "hilbert_exact"
        elif polyhedral_applicable(G):
            method = "polyhedral_exact"
        else:
            method = "relaxation"
    if method == "hilbert_exact":
        if not hilbert_applicable(T, G):
            raise sp.UnsupportedSpaceError("hilbert_exact needs Euclidean spaces")
        return _gnorm_hilbert(T, G, tol, budget)
    if method == "polyhedral_exact":
        if not polyhedral_applicable(G):
            raise sp.UnsupportedSpaceError(
                "polyhedral_exact needs a real polytopal domain of dim <= 6"
            )
        return _gnorm_polyhedral(T, G, tol, budget)
    if method == "relaxation":
        return _gnorm_relaxation(T, G, tol, budget, seed=seed)
    if method == "grid":
        return gnorm_grid(T, G, resolution=budget.grid_resolution)
    raise ValueError(f"unknown method {method!r}")


def delta_profile(
    T: OperatorSpec,
    G: OperatorSpec,
    deltas=None,
    budget: SolverBudget | None = None,
    tol: float = 1e-8,
    seed: int = 0,
) -> DeltaProfile:
    """s(delta) over the given strictly decreasing grid in (0, 1]."""
    budget = _budget(budget)
    _require_same_domain(T, G)
    check_g_normalized(G, tol, budget)
    if deltas is not None:
        deltas = list(deltas)
        if any(not (0.0 < d <= 1.0) for d in deltas):
            raise ValueError("deltas must lie in (0, 1]")
        if any(b >= a for a, b in zip(deltas, deltas[1:])) and len(deltas) > 1:
            deltas = sorted(set(deltas), reverse=True)
    entries, _, converged = sol.relaxation_profile(
        sol.norm_objective(T), sol.constraint_pack(G), T.domain,
        tol, budget, deltas=deltas, seed=seed, extend=False, G=G,
    )
    return DeltaProfile(entries=entries, certified=converged)


def g_norm_chain_check(
    T: OperatorSpec,
    G: OperatorSpec,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
) -> dict:
    """Verify nu_G(T) <= ||T||_G <= ||T|| on one instance."""
    from .numrange import nu_g  # local import to avoid a cycle

    budget = _budget(budget)
    nu = nu_g(T, G, tol=tol, budget=budget).value
    gn = g_norm(T, G, tol=tol, budget=budget).value
    on = op_norm(T, budget).value
    return {
        "nu": nu,
        "gnorm": gn,
        "opnorm": on,
        "ok": bool(nu <= gn + tol and gn <= on + tol),
    }


def is_norm_probe(
    G: OperatorSpec,
    samples: int = 50,
    seed: int = 0,
    tol: float = 1e-10,
    budget: SolverBudget | None = None,
) -> dict:
    """Heuristic check whether the G-seminorm looks like a norm.

    Reports the minimum of ||T||_G / ||T|| over matrix units and seeded random
    operators; a zero ratio exhibits a degenerate direction.
    """
    from .operators import matrix_units

    budget = _budget(budget)
    check_g_normalized(G, tol=1e-8, budget=budget)
    deck = matrix_units(G.domain, G.codomain)
    deck += random_operators(G.domain, G.codomain, samples, seed)
    min_ratio, degenerate = np.inf, []
    for T in deck:
        denom = op_norm(T, budget).value
        if denom <= tol:
            continue
        ratio = g_norm(T, G, tol=1e-8, budget=budget).value / denom
        if ratio < min_ratio:
            min_ratio = ratio
        if ratio <= tol:
            degenerate.append(T)
    return {
        "min_ratio": float(min_ratio),
        "is_norm_plausible": bool(min_ratio > tol),
        "degenerate_examples": degenerate,
    }
