"""Sampled estimation of the numerical indices n_G, n_G^(1), n_G^(2).

The indices are infima of ratios (nu_G/||.||, ||.||_G/||.||, nu_G/||.||_G)
over nonzero operators; deck minima are therefore upper bounds of the true
values, never certificates.  A shared deck keeps the product inequality
n1 * n2 <= nG algebraically forced, since the nG-ratio of any single
operator factors through the other two.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .gnorm import check_g_normalized, g_norm
from .numrange import nu_g
from .operators import (
    OperatorSpec,
    SolverBudget,
    _budget,
    identity,
    matrix_units,
    op_norm,
    random_operators,
    _lex_key,
)
from .spear import transport, is_surjective_isometry

_KINDS = ("nG", "n1", "n2")


@dataclass
class IndexEstimate:
    """A deck minimum of the defining ratio: an upper bound on the index."""

    kind: str
    value: float
    argmin_T: OperatorSpec
    samples: int
    seed: int
    seminorm_degenerate: bool = False
    note: str = "sampled upper bound of the infimum"


@dataclass
class _Rated:
    T: OperatorSpec
    opnorm: float
    gnorm: float
    nu: float

    def ratio(self, kind: str):
        if kind == "nG":
            return self.nu / self.opnorm if self.opnorm > 0 else None
        if kind == "n1":
            return self.gnorm / self.opnorm if self.opnorm > 0 else None
        return self.nu / self.gnorm if self.gnorm > 0 else None


def _rate(T, G, tol, budget) -> _Rated:
    return _Rated(
        T=T,
        opnorm=op_norm(T, budget).value,
        gnorm=g_norm(T, G, tol=tol, budget=budget).value,
        nu=nu_g(T, G, tol=tol, budget=budget).value,
    )


def _base_deck(G: OperatorSpec, samples: int, seed: int):
    deck = list(matrix_units(G.domain, G.codomain))
    deck.append(G)
    if G.domain == G.codomain:
        deck.append(identity(G.domain))
    deck.extend(random_operators(G.domain, G.codomain, samples, seed))
    return deck


def _min_over(rated, kind, tol):
    best = None
    for r in rated:
        rho = r.ratio(kind)
        if rho is None:
            continue
        if r.opnorm <= tol:
            continue
        if kind == "n2" and r.gnorm <= tol:
            continue
        if best is None or rho < best[0] - 1e-15 or (
            abs(rho - best[0]) <= 1e-15 and _lex_key(r.T.matrix) < _lex_key(best[1].T.matrix)
        ):
            best = (rho, r)
    return best


def _coordinate_descent(G, start: _Rated, kind, tol, budget, steps):
    """Greedy per-entry perturbation of the current argmin, renormalized per kind."""
    rng_shape = start.T.matrix.shape
    current = start
    extras = []
    h = 0.5
    for _ in range(steps):
        improved = False
        base = current.T.matrix
        for i in range(rng_shape[0]):
            for j in range(rng_shape[1]):
                for s in (1.0, -1.0):
                    M = base.copy()
                    M[i, j] += s * h
                    cand = _rate(OperatorSpec(M, G.domain, G.codomain), G, tol, budget)
                    extras.append(cand)
                    rho_c, rho_b = cand.ratio(kind), current.ratio(kind)
                    if rho_c is not None and rho_b is not None and rho_c < rho_b - 1e-14:
                        if kind == "n2" and cand.gnorm <= tol:
                            continue
                        if cand.opnorm <= tol:
                            continue
                        current = cand
                        improved = True
        if not improved:
            h *= 0.25
            if h < 1e-4:
                break
    return extras


def estimate_index(
    G: OperatorSpec,
    kind: str,
    samples: int = 100,
    seed: int = 0,
    budget: SolverBudget | None = None,
    tol: float = 1e-10,
    refine_steps: int = 8,
) -> IndexEstimate:
    """Deck + local-descent estimate of one index (an upper bound)."""
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    budget = _budget(budget)
    check_g_normalized(G, tol=1e-8, budget=budget)
    rated = [_rate(T, G, 1e-10, budget) for T in _base_deck(G, samples, seed)]
    degenerate = any(r.opnorm > tol and r.gnorm <= tol for r in rated)
    best = _min_over(rated, kind, tol)
    if best is None:
        raise ValueError("no admissible operator in the deck")
    if refine_steps > 0 and best[0] > tol:
        rated.extend(_coordinate_descent(G, best[1], kind, tol, budget, refine_steps))
        best = _min_over(rated, kind, tol)
    rho, r = best
    denom = r.opnorm if kind in ("nG", "n1") else r.gnorm
    return IndexEstimate(
        kind=kind,
        value=float(rho),
        argmin_T=r.T.scaled(1.0 / denom),
        samples=samples,
        seed=seed,
        seminorm_degenerate=degenerate,
    )


def index_chain_check(
    G: OperatorSpec,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-9,
    budget: SolverBudget | None = None,
) -> dict:
    """Estimate all three indices on one shared deck and check the chain.

    product_ok: n1*n2 <= nG (+ tol).  collapse_ok: when the n2 estimate is 1,
    the n1 and nG estimates coincide (vacuous otherwise).
    """
    budget = _budget(budget)
    check_g_normalized(G, tol=1e-8, budget=budget)
    rated = [_rate(T, G, 1e-10, budget) for T in _base_deck(G, samples, seed)]
    pool = list(rated)
    for kind in _KINDS:
        best = _min_over(rated, kind, 1e-12)
        if best is not None and best[0] > 1e-12:
            pool.extend(_coordinate_descent(G, best[1], kind, 1e-12, budget, 4))
    est = {}
    argmins = {}
    for kind in _KINDS:
        rho, r = _min_over(pool, kind, 1e-12)
        est[kind] = float(rho)
        argmins[kind] = r.T
    degenerate = any(r.opnorm > 1e-10 and r.gnorm <= 1e-10 for r in pool)
    n1, n2, nG = est["n1"], est["n2"], est["nG"]
    product_ok = n1 * n2 <= nG + tol
    collapse_ok = (abs(n1 - nG) <= tol) if n2 >= 1.0 - tol else True
    return {
        "n1": n1,
        "n2": n2,
        "nG": nG,
        "argmin": argmins,
        "product_ok": bool(product_ok),
        "collapse_ok": bool(collapse_ok),
        "seminorm_degenerate": bool(degenerate),
    }


def invariance_check(
    G: OperatorSpec,
    U1: OperatorSpec,
    U2: OperatorSpec,
    samples: int = 20,
    seed: int = 0,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
) -> dict:
    """Per-operator equality of ||T||_G and nu_G under isometric transport."""
    budget = _budget(budget)
    if not is_surjective_isometry(U1) or not is_surjective_isometry(U2):
        raise ValueError("U1 and U2 must be surjective isometries")
    Gp = transport(G, U1, U2)
    U1inv = np.linalg.inv(U1.matrix)
    max_gdev, max_ndev = 0.0, 0.0
    for T in _base_deck(G, samples, seed):
        Tp = OperatorSpec(U2.matrix @ T.matrix @ U1inv, U1.codomain, U2.codomain)
        gdev = abs(
            g_norm(T, G, tol=tol, budget=budget).value
            - g_norm(Tp, Gp, tol=tol, budget=budget).value
        )
        ndev = abs(
            nu_g(T, G, tol=tol, budget=budget).value
            - nu_g(Tp, Gp, tol=tol, budget=budget).value
        )
        max_gdev = max(max_gdev, gdev)
        max_ndev = max(max_ndev, ndev)
    return {
        "max_gnorm_dev": float(max_gdev),
        "max_nu_dev": float(max_ndev),
        "ok": bool(max_gdev <= tol and max_ndev <= tol),
    }
