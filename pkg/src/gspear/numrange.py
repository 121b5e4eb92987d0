"""G-restricted numerical ranges and the numerical radius.

In finite dimensions the constraint y*(Gx) = 1 with ||y*|| = ||G|| = 1 forces
||Gx|| = 1 and y* to support Gx, so range sampling and the radius reduce to a
search over the attainment set of G paired with support functionals of Gx.
On Hilbert spaces that search collapses to the numerical radius of the small
matrix E* G* T E (E an orthonormal basis of the attainment subspace); on
polytopal domains it is a finite enumeration over vertices and extreme
support functionals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spaces as sp
from . import _solvers as sol
from .errors import DimensionMismatchError, UnsupportedSpaceError
from .gnorm import check_g_normalized, polyhedral_applicable
from .operators import (
    NormResult,
    OperatorSpec,
    SolverBudget,
    WitnessPair,
    attainment_sample,
    attainment_set,
    better_witness,
    canonical_witness,
    identity,
    _budget,
)


@dataclass
class RangeSample:
    """Sampled points of S_G, V_G or the ||Tx||-valued variant."""

    kind: str  # "V_G" | "S_G" | "S_tilde"
    points: list  # (value, WitnessPair)

    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.points])


def _require_shared_codomain(T: OperatorSpec, G: OperatorSpec):
    if T.domain != G.domain:
        raise DimensionMismatchError("T and G must share their domain")
    if T.codomain != G.codomain:
        raise DimensionMismatchError("T and G must share their codomain")


def v_range_sample(
    T: OperatorSpec,
    G: OperatorSpec,
    count: int,
    seed: int,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
) -> RangeSample:
    """Sample V_G(T): values y*(Tx) with y*(Gx) = 1.

    x is drawn from the attainment set of G; y* mixes the extreme points of
    the support set J(Gx) (mixtures stay inside J since they agree on Gx).
    """
    budget = _budget(budget)
    _require_shared_codomain(T, G)
    check_g_normalized(G, tol, budget)
    att = attainment_set(G, tol=max(tol, 1e-10), budget=budget)
    xs = attainment_sample(att, G, count, seed)
    rng = np.random.default_rng(seed + 1)
    cod = G.codomain
    points = []
    for x in xs:
        gx = G.apply(x)
        try:
            extremes = sp.support_functionals(cod, gx, tol=1e-9)
        except UnsupportedSpaceError:
            extremes = [sp.support_functional_of(cod, gx)]
        if len(extremes) > 1 and rng.random() < 0.5:
            w = rng.dirichlet(np.ones(len(extremes)))
            ystars = [sum(wi * fi for wi, fi in zip(w, extremes))]
        else:
            ystars = [extremes[rng.integers(len(extremes))]]
        for ystar in ystars:
            val = complex(np.dot(ystar, T.apply(x)))
            if not cod.is_complex:
                val = float(val.real)
            points.append((val, WitnessPair(x=x, ystar=ystar, value=abs(val))))
            if len(points) >= count:
                break
        if len(points) >= count:
            break
    return RangeSample(kind="V_G", points=points)


def s_range_sample(
    T: OperatorSpec,
    G: OperatorSpec,
    count: int,
    seed: int,
    kind: str = "S_G",
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
) -> RangeSample:
    """Sample S_G(T) (pairs x in M_G, y* on the dual sphere) or the
    ||Tx||-valued variant S_tilde (then T may map into any codomain)."""
    budget = _budget(budget)
    if T.domain != G.domain:
        raise DimensionMismatchError("T and G must share their domain")
    if kind not in ("S_G", "S_tilde"):
        raise ValueError(f"unknown sample kind {kind!r}")
    if kind == "S_G" and T.codomain != G.codomain:
        raise DimensionMismatchError("S_G sampling needs a shared codomain")
    check_g_normalized(G, tol, budget)
    att = attainment_set(G, tol=max(tol, 1e-10), budget=budget)
    xs = attainment_sample(att, G, count, seed)
    points = []
    if kind == "S_tilde":
        for x in xs:
            val = sp.norm_eval(T.codomain, T.apply(x))
            points.append((val, WitnessPair(x=x, ystar=None, value=val)))
        return RangeSample(kind="S_tilde", points=points)
    ys = sp.dual_sphere_sample(T.codomain, count, seed + 1)
    for x, ystar in zip(xs, ys):
        val = complex(np.dot(ystar, T.apply(x)))
        if not T.codomain.is_complex:
            val = float(val.real)
        points.append((val, WitnessPair(x=x, ystar=ystar, value=abs(val))))
    return RangeSample(kind="S_G", points=points)


# -- numerical radius ----------------------------------------------------------------


def _small_numerical_radius(M: np.ndarray):
    """Numerical radius of a small matrix over the Euclidean sphere.

    Real case: max |c^T M c| = spectral bound of the symmetric part.  Complex
    case: classical angle sweep max_theta lambda_max(H(e^{i theta} M)).
    """
    M = np.asarray(M)
    if M.shape[0] == 0:
        return 0.0, np.zeros(0)
    if not np.iscomplexobj(M):
        S = 0.5 * (M + M.T)
        w, V = np.linalg.eigh(S)
        lo, hi = w[0], w[-1]
        if abs(lo) >= abs(hi):
            return float(abs(lo)), V[:, 0]
        return float(abs(hi)), V[:, -1]

    def lam(theta):
        H = 0.5 * (np.exp(1j * theta) * M + (np.exp(1j * theta) * M).conj().T)
        return float(np.linalg.eigvalsh(H)[-1])

    thetas = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    vals = [lam(t) for t in thetas]
    jbest = int(np.argmax(vals))
    step = 2.0 * math.pi / 64
    best_t, best_v = thetas[jbest], vals[jbest]
    for j in sorted(range(64), key=lambda j: -vals[j])[:3]:
        t, v = sol.golden_max(lam, thetas[j] - step, thetas[j] + step)
        if v > best_v:
            best_t, best_v = t, v
    H = 0.5 * (np.exp(1j * best_t) * M + (np.exp(1j * best_t) * M).conj().T)
    w, V = np.linalg.eigh(H)
    return float(best_v), V[:, -1]


def nu_g(
    T: OperatorSpec,
    G: OperatorSpec,
    tol: float = 1e-8,
    budget: SolverBudget | None = None,
    seed: int = 0,
) -> NormResult:
    """The numerical radius of T with respect to G.

    Exact on Hilbert spaces (small-matrix numerical radius on the attainment
    subspace) and on real polytopal domains (vertex x extreme-functional
    enumeration); multi-start relaxation otherwise, flagged non-certified.
    """
    budget = _budget(budget)
    _require_shared_codomain(T, G)
    check_g_normalized(G, tol, budget)

    if G.domain.is_euclidean and G.codomain.is_euclidean:
        att = attainment_set(G, tol=max(tol, 1e-10), budget=budget)
        E = att.basis
        M = (G.matrix @ E).conj().T @ (T.matrix @ E)
        value, c = _small_numerical_radius(M)
        x = E @ c
        gx = G.apply(x)
        ystar = np.conj(gx) / np.linalg.norm(gx)
        x, ystar = canonical_witness(x, ystar)
        return NormResult(
            value=value,
            witness=WitnessPair(x=x, ystar=ystar, value=value),
            method="hilbert_exact",
            certified=True,
        )

    if polyhedral_applicable(G):
        att = attainment_set(G, tol=max(tol, 1e-10), budget=budget)
        best_v, best_x, best_y = -1.0, None, None
        for v in att.points:
            gv = G.apply(v)
            tv = T.apply(v)
            for ystar in sp.support_functionals(G.codomain, gv, tol=1e-9):
                val = float(abs(np.dot(ystar, tv)))
                xc, yc = canonical_witness(v, ystar)
                if best_x is None or better_witness(val, xc, best_v, best_x):
                    best_v, best_x, best_y = val, xc, yc
        return NormResult(
            value=best_v,
            witness=WitnessPair(x=best_x, ystar=best_y, value=best_v),
            method="polyhedral_exact",
            certified=True,
        )

    # generic: relaxation continuation on |y*(Tx)| with y* supporting Gx
    objective = sol.vdual_objective(T, G)
    constraint = sol.constraint_pack(G)
    entries, x, _ = sol.relaxation_profile(
        objective, constraint, T.domain, tol, budget, seed=seed, extend=True, G=G
    )
    value = entries[-1][1]
    gx = G.apply(x)
    ystar = sp.support_functional_of(G.codomain, gx)
    x, ystar = canonical_witness(x, ystar)
    return NormResult(
        value=float(value),
        witness=WitnessPair(x=x, ystar=ystar, value=float(value)),
        method="relaxation",
        certified=False,
    )


def classical_numerical_radius(
    T: OperatorSpec, tol: float = 1e-8, budget: SolverBudget | None = None
) -> float:
    """nu(T) = nu_G(T) with G the identity (square operators only)."""
    if T.domain != T.codomain:
        raise DimensionMismatchError("classical numerical radius needs domain == codomain")
    return nu_g(T, identity(T.domain), tol=tol, budget=budget).value
