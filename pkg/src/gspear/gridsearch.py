"""Dense sphere-grid oracles for real instances with dim <= 3.

These exist to cross-check the structured solvers with a method that shares
no code path with them: zoomed direction grids, feasibility bands tied to
the current grid spacing, and nothing else.  The feasibility set
``||Gx|| = 1`` has measure zero, so a single-level grid cannot approach it;
each level shrinks the band together with the spacing until the band is
tight enough for the requested accuracy.
"""

from __future__ import annotations

import math

import numpy as np

from . import spaces as sp
from .operators import NormResult, OperatorSpec, WitnessPair, canonical_witness
from .errors import UnsupportedSpaceError

_KEEP_EARLY = 48
_KEEP_LATE = 12


def _check_grid_supported(space: sp.SpaceSpec):
    if space.is_complex or space.dim > 3:
        raise UnsupportedSpaceError("grid oracle supports real spaces with dim <= 3")


def _direction_grid(dim: int, count: int, full: bool = False) -> np.ndarray:
    """Roughly uniform directions.

    By default the antipodal half suffices (even objectives); ``full`` covers
    the whole sphere for sign-sensitive constraints.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]]) if full else np.array([[1.0]])
    if dim == 2:
        span = 2.0 * math.pi if full else math.pi
        t = np.linspace(0.0, span, count, endpoint=False)
        return np.column_stack([np.cos(t), np.sin(t)])
    i = np.arange(count) + 0.5
    phi = math.pi * (1.0 + math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / count
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _grid_spacing(dim: int, count: int) -> float:
    if dim <= 2:
        return math.pi / max(count, 1)
    return math.sqrt(4.0 * math.pi / max(count, 1))


def _local_grid(center: np.ndarray, radius: float, count: int) -> np.ndarray:
    """Directions covering a cap of the given angular radius around center.

    The center itself is always included so located maximizers persist
    across zoom levels.
    """
    dim = len(center)
    if dim == 1:
        return center[None, :]
    if dim == 2:
        t0 = math.atan2(center[1], center[0])
        t = t0 + np.linspace(-radius, radius, count)
        pts = np.column_stack([np.cos(t), np.sin(t)])
        return np.vstack([center[None, :], pts])
    # tangent-plane sunflower spiral
    anchor = np.zeros(3)
    anchor[int(np.argmin(np.abs(center)))] = 1.0
    t1 = np.cross(center, anchor)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(center, t1)
    i = np.arange(count) + 0.5
    rr = radius * np.sqrt(i / count)
    ang = math.pi * (1.0 + math.sqrt(5.0)) * i
    offs = rr[:, None] * (np.cos(ang)[:, None] * t1 + np.sin(ang)[:, None] * t2)
    P = center[None, :] + offs
    P = P / np.linalg.norm(P, axis=1)[:, None]
    return np.vstack([center[None, :], P])


def _local_spacing(dim: int, radius: float, count: int) -> float:
    if dim <= 2:
        return 2.0 * radius / max(count - 1, 1)
    return radius * math.sqrt(4.0 / max(count, 1))


def _diverse_top(points, scores, min_dist, keep):
    order = np.argsort(-scores, kind="stable")
    chosen = []
    for j in order:
        p = points[j]
        if all(np.linalg.norm(p - points[c]) > min_dist for c in chosen):
            chosen.append(j)
        if len(chosen) >= keep:
            break
    return [points[c] for c in chosen]


def _zoom_feasible_max(
    domain: sp.SpaceSpec,
    score,  # callable X (N, n) -> values
    gfun,  # callable X (N, n) -> constraint values, sup over sphere == 1
    resolution: int,
    smooth_band: bool,
    h_floor: float = 2e-7,
    full: bool = False,
):
    """Zoomed maximization of `score` over { x : gfun(x) >= 1 - band(h) }.

    The band is tied to the grid spacing h.  Near a smooth maximizer of g the
    drop off the peak is quadratic in distance, so band ~ h^2 keeps feasible
    grid points while the value bias C * sqrt(band) shrinks linearly in h.
    Polytopal geometry gives kink maxima with a linear drop, so band ~ h there
    (the feasible set then also has width ~ band, and the bias stays ~ h).
    Candidates follow both the best feasible scores and the best g values, the
    latter acting as trackers of the attainment set itself.

    Returns ((value, x), candidates) from the final level.
    """
    dim = domain.dim
    dirs = _direction_grid(dim, resolution, full=full)
    X = dirs / sp._batch_norm(domain, dirs)[:, None]
    h = _grid_spacing(dim, resolution)
    level = 0

    while True:
        band = min(0.5, 8.0 * h * h) if smooth_band else min(0.5, 4.0 * h)
        g = gfun(X)
        feas = g >= 1.0 - band
        if not feas.any():
            feas = g >= g.max() - 1e-12
        vals = np.where(feas, score(X), -np.inf)
        jloc = int(np.argmax(vals))
        best = (float(vals[jloc]), X[jloc].copy())
        keep = _KEEP_EARLY if level < 3 else _KEEP_LATE
        fcands = _diverse_top(X[feas], vals[feas], 2.0 * h, keep)
        if h <= h_floor:
            return best, fcands
        gcands = _diverse_top(X, g, 2.0 * h, 8)
        centers = fcands + gcands
        per = max(64, resolution // max(len(centers), 1))
        radius = 3.0 * h
        blocks = [_local_grid(c / np.linalg.norm(c), radius, per) for c in centers]
        dirs = np.vstack(blocks)
        X = dirs / sp._batch_norm(domain, dirs)[:, None]
        h = _local_spacing(dim, radius, per)
        level += 1


def gnorm_grid(
    T: OperatorSpec, G: OperatorSpec, resolution: int = 10_000
) -> NormResult:
    """Grid oracle for max ||Tx|| over the norm-attainment band of G."""
    _check_grid_supported(T.domain)

    def score(X):
        return sp._batch_norm(T.codomain, X @ T.matrix.T)

    def gfun(X):
        return sp._batch_norm(G.codomain, X @ G.matrix.T)

    smooth = T.domain.is_smooth_lp and G.codomain.is_smooth_lp
    (value, x), _ = _zoom_feasible_max(T.domain, score, gfun, resolution, smooth)
    x, _ = canonical_witness(x)
    return NormResult(
        value=value,
        witness=WitnessPair(x=x, ystar=None, value=value),
        method="grid",
        certified=False,
    )


def _dual_grid(space: sp.SpaceSpec, count: int) -> np.ndarray:
    if space.kind != "lp":
        raise UnsupportedSpaceError(
            "the grid oracle needs an lp codomain to grid the dual sphere"
        )
    dual = sp.lp_space(space.dual_exponent, space.dim, space.field)
    dirs = _direction_grid(space.dim, count)
    Y = dirs / sp._batch_norm(dual, dirs)[:, None]
    return np.vstack([Y, -Y])


def nu_grid(T: OperatorSpec, G: OperatorSpec, resolution: int = 10_000) -> float:
    """Grid oracle for the G-numerical radius: pairs a direction zoom on x with
    a dual-sphere zoom on y*, both band-constrained."""
    _check_grid_supported(T.domain)
    _check_grid_supported(T.codomain)
    cod = G.codomain
    ycount = max(128, resolution // 32)
    Ycoarse = _dual_grid(cod, ycount)
    # the coarse dual grid misses perfect alignment by O(spacing^2)
    yslack = 2.0 * _grid_spacing(cod.dim, ycount) ** 2 + 1e-9

    def gfun(X):
        return sp._batch_norm(cod, X @ G.matrix.T)

    def score(X):
        GX = X @ G.matrix.T
        TX = X @ T.matrix.T
        gx = np.maximum(sp._batch_norm(cod, GX), 1e-300)
        act = (Ycoarse @ GX.T) / gx[None, :]
        val = np.abs(Ycoarse @ TX.T)
        ok = act >= np.maximum(act.max(axis=0) - yslack, 1.0 - 0.5)[None, :]
        return np.where(ok, val, -np.inf).max(axis=0)

    smooth_x = T.domain.is_smooth_lp and G.codomain.is_smooth_lp
    (_, xbest), xcands = _zoom_feasible_max(T.domain, score, gfun, resolution, smooth_x)
    dual = sp.lp_space(cod.dual_exponent, cod.dim, cod.field)
    smooth_y = cod.is_smooth_lp

    value = -np.inf
    for x in [xbest] + [c for c in xcands[:5]]:
        gx_vec = G.apply(x)
        tx_vec = T.apply(x)
        gx = max(sp.norm_eval(cod, gx_vec), 1e-300)

        def yscore(Y):
            return np.abs(Y @ tx_vec)

        def ygfun(Y):
            return (Y @ gx_vec) / gx

        ybest, _ = _zoom_feasible_max(
            dual, yscore, ygfun, resolution // 2, smooth_y, h_floor=1e-6, full=True
        )
        value = max(value, float(ybest[0]))
    return value
