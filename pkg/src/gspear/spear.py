"""Spear and relative-spear certification, and transport along isometries.

A norm-one G is a relative spear when nu_G(T) = ||T||_G for every T; the
equivalent geometric form is max over unimodular omega of ||G + omega T||_G
equal to 1 + ||T||_G.  Universal statements can only be refuted by a finite
deck, so verdicts are either ``certified_no`` (with a reproducible witness)
or ``plausible_yes``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spaces as sp
from . import _solvers as sol
from .errors import DimensionMismatchError, UnsupportedSpaceError
from .gnorm import check_g_normalized, g_norm
from .numrange import nu_g
from .operators import (
    OperatorSpec,
    SolverBudget,
    _budget,
    compose,
    identity,
    jacobi_svd,
    matrix_units,
    op_norm,
    random_operators,
    _lex_key,
)


@dataclass
class Omega:
    """A unimodular scalar; +-1 over the reals, any phase over the complexes."""

    value: complex

    def __post_init__(self):
        if abs(abs(self.value) - 1.0) > 1e-12:
            raise ValueError(f"|omega| = {abs(self.value)!r}, expected 1")


@dataclass
class SpearReport:
    verdict: str  # "certified_no" | "plausible_yes"
    worst_T: OperatorSpec
    gap: float
    samples_used: int
    tol: float
    seed: int
    seminorm_degenerate: bool = False


def _omega_candidates(field_complex: bool):
    if not field_complex:
        return [1.0, -1.0]
    return [np.exp(2j * math.pi * k / 64) for k in range(64)]


def _max_over_omega(evaluate, field_complex: bool):
    """Maximize evaluate(omega) over the unimodular scalars.

    Real scalars: both signs.  Complex: 64-point circle scan followed by
    golden-section refinement of the best local maxima; the map is
    1-Lipschitz in omega (constant ||T||_G), so the scan cannot skip a peak
    wider than one cell.
    """
    cands = _omega_candidates(field_complex)
    vals = [evaluate(w) for w in cands]
    jbest = int(np.argmax(vals))
    best_w, best_v = cands[jbest], vals[jbest]
    if not field_complex:
        return best_w, best_v
    step = 2.0 * math.pi / 64

    def at_angle(t):
        return evaluate(np.exp(1j * t))

    for j in sorted(range(len(cands)), key=lambda j: -vals[j])[:3]:
        t0 = 2.0 * math.pi * j / 64
        t, v = sol.golden_max(at_angle, t0 - step, t0 + step, iters=64)
        if v > best_v:
            best_w, best_v = np.exp(1j * t), v
    return best_w, best_v


def spear_lhs_gnorm(
    T: OperatorSpec,
    G: OperatorSpec,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
):
    """max over omega of ||G + omega T||_G with the maximizing omega."""
    budget = _budget(budget)
    if T.domain != G.domain or T.codomain != G.codomain:
        raise DimensionMismatchError("T and G must act between the same spaces")
    check_g_normalized(G, tol, budget)

    def evaluate(w):
        return g_norm(G + T.scaled(w), G, tol=tol, budget=budget).value

    w, v = _max_over_omega(evaluate, G.domain.is_complex)
    return float(v), Omega(w)


def spear_lhs_opnorm(
    T: OperatorSpec,
    G: OperatorSpec,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
):
    """max over omega of the plain operator norm ||G + omega T||."""
    budget = _budget(budget)
    if T.domain != G.domain or T.codomain != G.codomain:
        raise DimensionMismatchError("T and G must act between the same spaces")
    check_g_normalized(G, tol, budget)

    def evaluate(w):
        return op_norm(G + T.scaled(w), budget).value

    w, v = _max_over_omega(evaluate, G.domain.is_complex)
    return float(v), Omega(w)


def theorem_equiv_check(
    T: OperatorSpec,
    G: OperatorSpec,
    tol: float = 1e-6,
    budget: SolverBudget | None = None,
) -> dict:
    """Both sides of the relative-spear equivalence on one instance."""
    budget = _budget(budget)
    gn = g_norm(T, G, tol=min(tol, 1e-8), budget=budget).value
    nu = nu_g(T, G, tol=min(tol, 1e-8), budget=budget).value
    lhs, _ = spear_lhs_gnorm(T, G, tol=min(tol, 1e-8), budget=budget)
    lhs_holds = abs(lhs - (1.0 + gn)) <= tol
    rhs_holds = abs(nu - gn) <= tol
    return {
        "lhs": lhs,
        "gnorm": gn,
        "nu": nu,
        "lhs_holds": bool(lhs_holds),
        "rhs_holds": bool(rhs_holds),
        "consistent": bool(lhs_holds == rhs_holds),
    }


# -- verdict decks --------------------------------------------------------------------


def _structured_deck(G: OperatorSpec) -> list[OperatorSpec]:
    deck = list(matrix_units(G.domain, G.codomain))
    deck.append(G)
    if G.domain == G.codomain:
        deck.append(identity(G.domain))
    if G.domain.is_euclidean and G.codomain.is_euclidean:
        # the rank-one obstruction family from the partial-isometry argument
        dec = jacobi_svd(G.matrix)
        v1 = dec.right_vectors[:, 0]
        for i in range(1, min(G.shape)):
            deck.append(
                OperatorSpec(
                    np.outer(dec.left_vectors[:, i], v1.conj()), G.domain, G.codomain
                )
            )
    return deck


def _deck(G: OperatorSpec, samples: int, seed: int) -> list[OperatorSpec]:
    return _structured_deck(G) + random_operators(G.domain, G.codomain, samples, seed)


def relative_spear_check(
    G: OperatorSpec,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
) -> SpearReport:
    """Refutation search for nu_G(T) = ||T||_G over a structured + random deck.

    Operators are normalized to ||T||_G = 1; G-seminorm-degenerate operators
    are skipped for this ratio (they do not constrain n^(2)) and surfaced via
    ``seminorm_degenerate``.
    """
    budget = _budget(budget)
    check_g_normalized(G, tol, budget)
    worst_gap, worst_T, degenerate = 0.0, None, False
    used = 0
    for T in _deck(G, samples, seed):
        gn = g_norm(T, G, tol=tol, budget=budget).value
        if gn <= tol:
            if op_norm(T, budget).value > tol:
                degenerate = True
            continue
        used += 1
        Tn = T.scaled(1.0 / gn)
        gap = nu_g(Tn, G, tol=tol, budget=budget).value - 1.0
        if worst_T is None or gap < worst_gap - 1e-15 or (
            abs(gap - worst_gap) <= 1e-15
            and _lex_key(Tn.matrix) < _lex_key(worst_T.matrix)
        ):
            worst_gap, worst_T = gap, Tn
    verdict = "certified_no" if worst_gap < -tol else "plausible_yes"
    return SpearReport(
        verdict=verdict,
        worst_T=worst_T,
        gap=float(worst_gap),
        samples_used=used,
        tol=tol,
        seed=seed,
        seminorm_degenerate=degenerate,
    )


def spear_check(
    G: OperatorSpec,
    samples: int = 100,
    seed: int = 0,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
) -> SpearReport:
    """Refutation search for the spear identity max_omega ||G + omega T|| = 1 + ||T||."""
    budget = _budget(budget)
    check_g_normalized(G, tol, budget)
    worst_gap, worst_T = 0.0, None
    used = 0
    for T in _deck(G, samples, seed):
        on = op_norm(T, budget).value
        if on <= tol:
            continue
        used += 1
        Tn = T.scaled(1.0 / on)
        lhs, _ = spear_lhs_opnorm(Tn, G, tol=tol, budget=budget)
        gap = lhs - 2.0
        if worst_T is None or gap < worst_gap - 1e-15 or (
            abs(gap - worst_gap) <= 1e-15
            and _lex_key(Tn.matrix) < _lex_key(worst_T.matrix)
        ):
            worst_gap, worst_T = gap, Tn
    verdict = "certified_no" if worst_gap < -tol else "plausible_yes"
    return SpearReport(
        verdict=verdict,
        worst_T=worst_T,
        gap=float(worst_gap),
        samples_used=used,
        tol=tol,
        seed=seed,
    )


# -- isometric transport --------------------------------------------------------------


def is_surjective_isometry(U: OperatorSpec, tol: float = 1e-10) -> bool:
    """Decide whether U maps its domain isometrically onto its codomain.

    Euclidean spaces: U*U = I.  Non-Euclidean l_p: Lamperti structure (a
    signed/unimodular permutation) and matching exponents.  Polytopal pairs:
    exact vertex checks of U and its inverse.  A final sampling sweep
    ||Ux|| = ||x|| guards every route.
    """
    dom, cod = U.domain, U.codomain
    if dom.dim != cod.dim:
        return False
    M = U.matrix
    if abs(np.linalg.det(M)) < 1e-14:
        return False

    if dom.is_euclidean and cod.is_euclidean:
        if np.linalg.norm(M.conj().T @ M - np.eye(dom.dim)) > 10 * tol:
            return False
    elif dom.kind == "lp" and cod.kind == "lp" and dom.p == cod.p:
        # Lamperti: one unimodular entry per row and column
        A = np.abs(M)
        if np.any(np.abs(A.max(axis=1) - 1.0) > tol):
            return False
        if np.any(np.abs(A.max(axis=0) - 1.0) > tol):
            return False
        if np.any((A > tol) & (np.abs(A - 1.0) > tol)):
            return False
        if np.any((A > 0.5).sum(axis=1) != 1) or np.any((A > 0.5).sum(axis=0) != 1):
            return False
    elif dom.is_polytopal and cod.is_polytopal and dom.dim <= 6:
        Vd = sp.polytope_vertices(dom)
        for v in Vd:
            if abs(sp.norm_eval(cod, U.apply(v)) - 1.0) > tol:
                return False
        Vc = sp.polytope_vertices(cod)
        Minv = np.linalg.inv(M)
        for v in Vc:
            if abs(sp.norm_eval(dom, Minv @ v) - 1.0) > tol:
                return False
    else:
        return False

    for x in sp.sphere_sample(dom, 32, 20_25):
        if abs(sp.norm_eval(cod, U.apply(x)) - 1.0) > tol:
            return False
    return True


def transport(
    G: OperatorSpec, U1: OperatorSpec, U2: OperatorSpec, tol: float = 1e-10
) -> OperatorSpec:
    """G' = U2 G U1^{-1} between the transported spaces."""
    if U1.domain != G.domain:
        raise DimensionMismatchError("U1 must act on the domain of G")
    if U2.domain != G.codomain:
        raise DimensionMismatchError("U2 must act on the codomain of G")
    if not is_surjective_isometry(U1, tol):
        raise ValueError("U1 is not a surjective isometry")
    if not is_surjective_isometry(U2, tol):
        raise ValueError("U2 is not a surjective isometry")
    M = U2.matrix @ G.matrix @ np.linalg.inv(U1.matrix)
    return OperatorSpec(M, U1.codomain, U2.codomain)
