"""Constrained sphere optimization shared by the relaxation-style solvers.

Problems have the form  extremize f(x)  over  ||x||_X = 1,  ||Gx|| >= c.
Three backends, picked by structure:

* 2-D real spaces: exact-ish circle parametrization (dense grid, feasibility
  arcs located by bisection, golden-section polish).  Works for nonsmooth
  norms as well.
* smooth l_p everywhere: multi-start SLSQP with analytic norm gradients.
* anything else: multi-start COBYLA on a scale-invariant parametrization;
  results are flagged approximate by the callers.

The delta-continuation (`relaxation_profile`) evaluates s(delta) over a
decreasing grid with warm starts, enforces profile monotonicity by witness
propagation (a witness feasible at a small delta is feasible at every larger
one), and optionally extends the grid until consecutive values agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import spaces as sp
from .operators import OperatorSpec, SolverBudget, duality_ascent, canonical_witness

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# -- objective / constraint packs -----------------------------------------------


@dataclass
class FunPack:
    """A scalar function of a unit vector with optional batch and gradient forms."""

    fun: callable
    batch: callable
    grad: callable | None  # realified gradient, None -> numeric differencing
    smooth: bool


def _realify(space: sp.SpaceSpec, z: np.ndarray) -> np.ndarray:
    if space.is_complex:
        n = space.dim
        return z[:n] + 1j * z[n:]
    return z


def _real_dim(space: sp.SpaceSpec) -> int:
    return 2 * space.dim if space.is_complex else space.dim


def _derealify(x: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(x):
        return np.concatenate([x.real, x.imag])
    return np.asarray(x, dtype=float)


def _lp_norm_grad(space: sp.SpaceSpec, y: np.ndarray) -> np.ndarray:
    """Gradient of ||y||_p with respect to the realified coordinates of y."""
    p = space.p
    if space.is_complex:
        r = np.abs(y)
        ny = float(sp._batch_norm(space, y[None, :])[0])
        if ny == 0.0:
            return np.zeros(2 * len(y))
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r > 0, (r / ny) ** (p - 1.0) / np.where(r > 0, r, 1.0), 0.0)
        return np.concatenate([w * y.real, w * y.imag])
    ny = float(sp._batch_norm(space, y[None, :])[0])
    if ny == 0.0:
        return np.zeros(len(y))
    a = np.abs(y)
    return np.sign(y) * (a / ny) ** (p - 1.0)


def _real_block(space: sp.SpaceSpec, A: np.ndarray) -> np.ndarray:
    """Realified matrix acting on stacked (re, im) coordinates."""
    if not space.is_complex:
        return np.asarray(A, dtype=float)
    Ar, Ai = A.real, A.imag
    return np.block([[Ar, -Ai], [Ai, Ar]])


def norm_objective(T: OperatorSpec) -> FunPack:
    """f(x) = ||Tx|| in T's codomain."""
    dom, cod = T.domain, T.codomain
    RT = _real_block(dom, T.matrix)

    def fun(x):
        return float(sp.norm_eval(cod, T.apply(x)))

    def batch(X):
        return sp._batch_norm(cod, X @ T.matrix.T)

    smooth = cod.kind == "lp" and 1.0 < cod.p < math.inf

    def grad(z):
        x = _realify(dom, z)
        y = T.apply(x)
        return RT.T @ _lp_norm_grad(cod, y)

    return FunPack(fun=fun, batch=batch, grad=grad if smooth else None, smooth=smooth)


def support_selection_batch(space: sp.SpaceSpec, Y: np.ndarray) -> np.ndarray:
    """One support functional per row of Y (a measurable selection of J)."""
    if space.kind == "lp" and 1.0 < space.p < math.inf:
        A = np.abs(Y)
        ny = sp._batch_norm(space, Y)
        safe = np.where(ny > 0, ny, 1.0)[:, None]
        ph = np.where(A > 0, Y / np.where(A > 0, A, 1.0), 1.0)
        return np.conj(ph) * (A / safe) ** (space.p - 1.0)
    if space.kind == "lp" and space.p == 1.0:
        A = np.abs(Y)
        ph = np.where(A > 0, Y / np.where(A > 0, A, 1.0), 1.0)
        return np.conj(ph)
    if space.kind == "lp":  # p == inf
        idx = np.argmax(np.abs(Y), axis=1)
        out = np.zeros_like(Y)
        rows = np.arange(len(Y))
        vals = Y[rows, idx]
        out[rows, idx] = np.conj(np.where(np.abs(vals) > 0, vals / np.abs(vals), 1.0))
        return out
    vals = Y.real @ space.functionals.T
    idx = np.argmax(np.abs(vals), axis=1)
    rows = np.arange(len(Y))
    signs = np.where(vals[rows, idx] >= 0, 1.0, -1.0)
    return signs[:, None] * space.functionals[idx]


def vdual_objective(T: OperatorSpec, G: OperatorSpec) -> FunPack:
    """f(x) = |y*(Tx)| with y* a support functional of Gx (shared codomain)."""
    cod = G.codomain

    def fun(x):
        y = G.apply(x)
        if sp.norm_eval(cod, y) == 0.0:
            return 0.0
        ystar = sp.support_functional_of(cod, y)
        return float(abs(np.dot(ystar, T.apply(x))))

    def batch(X):
        Y = X @ G.matrix.T
        S = support_selection_batch(cod, Y)
        return np.abs(np.einsum("ij,ij->i", S, X @ T.matrix.T))

    smooth = cod.kind == "lp" and 1.0 < cod.p < math.inf
    return FunPack(fun=fun, batch=batch, grad=None, smooth=smooth)


def constraint_pack(G: OperatorSpec) -> FunPack:
    return norm_objective(G)


def sphere_pack(space: sp.SpaceSpec) -> FunPack:
    """The domain norm itself, used as the sphere equality constraint."""
    dom = space

    def fun(x):
        return float(sp.norm_eval(dom, x))

    def batch(X):
        return sp._batch_norm(dom, X)

    smooth = dom.kind == "lp" and 1.0 < dom.p < math.inf

    def grad(z):
        x = _realify(dom, z)
        return _lp_norm_grad(dom, x)

    return FunPack(fun=fun, batch=batch, grad=grad if smooth else None, smooth=smooth)


# -- golden-section search -------------------------------------------------------


def golden_max(fun, a: float, b: float, iters: int = 80):
    """Golden-section maximization on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if b - a < 1e-15:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


# -- circle solver (2-D real) ------------------------------------------------------


def _circle_point(space: sp.SpaceSpec, theta: float) -> np.ndarray:
    u = np.array([math.cos(theta), math.sin(theta)])
    return u / sp.norm_eval(space, u)


def circle_extremize(
    space: sp.SpaceSpec,
    objective: FunPack,
    constraint: FunPack,
    level: float,
    ngrid: int = 4096,
    maximize: bool = True,
):
    """Extremize over the 2-D unit sphere subject to g >= level.

    The objective is pi-periodic in the angle (norms are even), so the search
    runs on [0, pi) with circular wrap.
    """
    sgn = 1.0 if maximize else -1.0
    thetas = np.linspace(0.0, math.pi, ngrid, endpoint=False)
    U = np.column_stack([np.cos(thetas), np.sin(thetas)])
    X = U / sp._batch_norm(space, U)[:, None]
    g = constraint.batch(X)
    f = sgn * objective.batch(X)

    def f_at(theta):
        return sgn * objective.fun(_circle_point(space, theta))

    def g_at(theta):
        return constraint.fun(_circle_point(space, theta))

    feas = g >= level
    step = math.pi / ngrid
    best_t, best_v = None, -np.inf

    def consider(theta):
        nonlocal best_t, best_v
        v = f_at(theta)
        if v > best_v:
            best_t, best_v = theta, v

    if not feas.any():
        # level is above max g on the grid; polish g itself to find one point
        j = int(np.argmax(g))
        th, gv = golden_max(g_at, thetas[j] - step, thetas[j] + step)
        if gv < level:
            return None
        consider(th)
    else:
        fi = np.flatnonzero(feas)
        jbest = fi[int(np.argmax(f[fi]))]
        consider(thetas[jbest])
        # refine feasibility-arc endpoints by bisection on g - level
        for j in fi:
            for direction in (-1, 1):
                nb = (j + direction) % ngrid
                if feas[nb]:
                    continue
                a, b = thetas[j], thetas[j] + direction * step
                if g_at(b) >= level:
                    consider(b)
                    continue
                for _ in range(60):
                    midp = 0.5 * (a + b)
                    if g_at(midp) >= level:
                        a = midp
                    else:
                        b = midp
                consider(a)
        # golden polish around the best interior local maxima of f
        local = [
            j
            for j in fi
            if feas[(j - 1) % ngrid]
            and feas[(j + 1) % ngrid]
            and f[j] >= f[(j - 1) % ngrid]
            and f[j] >= f[(j + 1) % ngrid]
        ]
        local.sort(key=lambda j: -f[j])
        for j in local[:12]:
            th, _ = golden_max(
                lambda t: f_at(t) if g_at(t) >= level else -np.inf,
                thetas[j] - step,
                thetas[j] + step,
            )
            if g_at(th) >= level:
                consider(th)

    if best_t is None:
        return None
    x = _circle_point(space, best_t)
    return sgn * best_v, x


# -- smooth / generic multistart solvers ---------------------------------------------


def _solve_single(
    space, objective: FunPack, constraint: FunPack, level, x0, budget, maximize
):
    sgn = -1.0 if maximize else 1.0
    sphere = sphere_pack(space)
    z0 = _derealify(np.asarray(x0))
    smooth = objective.smooth and constraint.smooth and sphere.smooth
    maxiter = min(budget.max_iters, 200)

    if smooth and objective.grad is not None:
        def obj(z):
            return sgn * objective.fun(_realify(space, z))

        def obj_grad(z):
            return sgn * objective.grad(z)

        cons = [
            {
                "type": "eq",
                "fun": lambda z: sphere.fun(_realify(space, z)) - 1.0,
                "jac": sphere.grad,
            },
            {
                "type": "ineq",
                "fun": lambda z: constraint.fun(_realify(space, z)) - level,
                "jac": constraint.grad,
            },
        ]
        res = minimize(
            obj, z0, jac=obj_grad, method="SLSQP", constraints=cons,
            options={"maxiter": maxiter, "ftol": 1e-14},
        )
    else:
        # scale-invariant parametrization keeps COBYLA/SLSQP off the sphere equality
        def decode(z):
            x = _realify(space, z)
            nx = sp.norm_eval(space, x)
            return x / nx if nx > 0 else x

        def obj(z):
            return sgn * objective.fun(decode(z))

        cons = [
            {"type": "ineq", "fun": lambda z: constraint.fun(decode(z)) - level},
            {"type": "ineq", "fun": lambda z: sp.norm_eval(space, _realify(space, z)) - 0.5},
            {"type": "ineq", "fun": lambda z: 2.0 - sp.norm_eval(space, _realify(space, z))},
        ]
        method = "SLSQP" if smooth else "COBYLA"
        res = minimize(
            obj, z0, method=method, constraints=cons,
            options={"maxiter": maxiter}
            if method == "COBYLA"
            else {"maxiter": maxiter, "ftol": 1e-14},
        )
    x = _realify(space, np.asarray(res.x))
    nx = sp.norm_eval(space, x)
    if nx == 0.0:
        return None
    return x / nx


def _repair_feasibility(space, constraint: FunPack, level, x, anchors):
    """Blend x toward a feasible anchor until g >= level (bisection on the blend)."""
    if constraint.fun(x) >= level:
        return x
    for xa in anchors:
        if constraint.fun(xa) < level:
            continue
        lo, hi = 0.0, 1.0

        def point(t):
            u = (1.0 - t) * x + t * xa
            nu = sp.norm_eval(space, u)
            return u / nu if nu > 0 else xa

        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if constraint.fun(point(mid)) >= level:
                hi = mid
            else:
                lo = mid
        cand = point(hi)
        if constraint.fun(cand) >= level:
            return cand
    return None


def constrained_extremum(
    space: sp.SpaceSpec,
    objective: FunPack,
    constraint: FunPack,
    level: float,
    starts,
    budget: SolverBudget,
    maximize: bool = True,
):
    """Best feasible extremum over the given starts; returns (value, x) or None."""
    if space.dim == 2 and not space.is_complex:
        return circle_extremize(
            space, objective, constraint, level,
            ngrid=min(budget.grid_resolution, 4096), maximize=maximize,
        )

    anchors = [x for x in starts if constraint.fun(x) >= level]
    best_v, best_x = None, None
    for x0 in starts:
        x0r = _repair_feasibility(space, constraint, level, x0, anchors or starts)
        if x0r is None:
            continue
        x = _solve_single(space, objective, constraint, level, x0r, budget, maximize)
        if x is None:
            continue
        x = _repair_feasibility(space, constraint, level, x, anchors or [x0r])
        if x is None:
            continue
        v = objective.fun(x)
        if best_v is None or (v > best_v if maximize else v < best_v):
            best_v, best_x = v, x
    # feasible starts themselves are admissible candidates
    for x0 in anchors:
        v = objective.fun(x0)
        if best_v is None or (v > best_v if maximize else v < best_v):
            best_v, best_x = v, x0
    if best_x is None:
        return None
    return best_v, best_x


def mg_seed_points(G: OperatorSpec, budget: SolverBudget, seed: int = 0, count: int = 8):
    """Near-maximizers of ||Gx||: feasible anchors for every relaxation level."""
    n = G.domain.dim
    starts = [np.eye(n, dtype=G.domain.dtype())[i] for i in range(n)]
    starts.extend(sp.sphere_sample(G.domain, max(count, 4), seed))
    out = []
    if G.domain.is_euclidean and G.codomain.is_euclidean:
        # machine-precision anchors: top singular directions
        from .operators import jacobi_svd

        dec = jacobi_svd(G.matrix)
        top = dec.singular_values >= dec.singular_values[0] * (1.0 - 1e-12)
        out.extend(dec.right_vectors[:, k] for k in np.flatnonzero(top))
    for x0 in starts:
        x, _, _ = duality_ascent(G, x0, budget.max_iters)
        out.append(x)
    # order deterministically, best constraint values first
    vals = [sp.norm_eval(G.codomain, G.apply(x)) for x in out]
    order = np.argsort([-v for v in vals], kind="stable")
    return [out[i] for i in order[: 2 * count]]


DEFAULT_DELTA_GRID = tuple(0.5**k for k in range(1, 21))
_DELTA_FLOOR = 0.5**50  # keep 1 - delta resolvable above evaluation round-off


def relaxation_profile(
    objective: FunPack,
    constraint: FunPack,
    domain: sp.SpaceSpec,
    tol: float,
    budget: SolverBudget,
    deltas=None,
    seed: int = 0,
    extend: bool = True,
    G: OperatorSpec | None = None,
):
    """Evaluate s(delta) = sup { f(x) : ||x|| = 1, g(x) >= 1 - delta } on a grid.

    Returns (entries, witness_x, certified): entries are (delta, s) with delta
    decreasing and s monotone nonincreasing (enforced by witness propagation),
    the witness belongs to the smallest delta, and certified records whether
    the tail of the profile settled to within tol.
    """
    if deltas is None:
        deltas = list(DEFAULT_DELTA_GRID)
    deltas = sorted(set(float(d) for d in deltas), reverse=True)
    if not deltas or deltas[0] > 1.0 or deltas[-1] <= 0.0:
        raise ValueError("deltas must lie in (0, 1]")

    anchors = mg_seed_points(G, budget, seed=seed) if G is not None else []
    if anchors:
        # all anchors stay feasible at every level; lead with the best objective
        anchors.sort(key=lambda x: -objective.fun(x))
        kept = []
        for a in anchors:
            ac, _ = canonical_witness(a)
            if all(np.max(np.abs(ac - k)) > 1e-9 for k in kept):
                kept.append(ac)
        anchors = kept
    samples = list(sp.sphere_sample(domain, min(budget.max_starts, 6), seed + 1))

    records = []  # (delta, value, x)
    prev_x = None

    def solve_at(delta, n_anchor=8, n_sample=6):
        starts = list(anchors[:n_anchor])
        if prev_x is not None:
            starts.insert(0, prev_x)
        starts.extend(samples[:n_sample])
        return constrained_extremum(
            domain, objective, constraint, 1.0 - delta, starts, budget, maximize=True
        )

    converged = False
    for k, d in enumerate(deltas):
        # fresh exploration matters at the widest level; afterwards warm-start
        out = solve_at(d) if k == 0 else solve_at(d, n_anchor=3, n_sample=1)
        if out is None:
            raise RuntimeError(f"no feasible point found at delta={d}")
        v, x = out
        records.append((d, v, x))
        prev_x = x
        converged = k > 0 and abs(records[-2][1] - v) <= tol

    if extend:
        d = deltas[-1]
        while not converged and d * 0.5 >= _DELTA_FLOOR:
            d *= 0.5
            out = solve_at(d, n_anchor=2, n_sample=0)
            if out is None:  # anchors cannot reach this level; stop uncertified
                break
            v, x = out
            records.append((d, v, x))
            prev_x = x
            converged = abs(records[-2][1] - v) <= tol

    # monotone pass: a witness at small delta is feasible at every larger delta
    records.sort(key=lambda r: r[0])  # ascending delta
    best_v, best_x = -np.inf, None
    fixed = []
    for d, v, x in records:
        if v > best_v:
            best_v, best_x = v, x
        fixed.append((d, best_v, best_x if best_v > v else x))
    fixed.sort(key=lambda r: -r[0])  # descending delta for the profile

    entries = [(d, v) for d, v, _ in fixed]
    final_x = fixed[-1][2]
    return entries, final_x, converged
