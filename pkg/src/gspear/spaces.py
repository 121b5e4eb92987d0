"""Finite-dimensional normed spaces.

A space is either an l_p space (real or complex, 1 <= p <= inf) or a real
polyhedral space whose norm is ``max_i |F_i . x|`` for a spanning family of
functionals F_i.  The module provides norm and dual-norm evaluation, the
extreme points of the support-functional set J(x), deterministic sphere
sampling, and vertex/facet enumeration for polytopal unit balls.

Functionals pair bilinearly with vectors, ``f(x) = sum_i f_i x_i``; complex
support functionals therefore carry pre-conjugated coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, nnls

from .errors import DimensionMismatchError, UnsupportedSpaceError

REAL = "real"
COMPLEX = "complex"

_VERTEX_DIM_CAP = 6
_SIGN_ENUM_CAP = 12  # at most 2**cap sign patterns enumerated


@dataclass(frozen=True, eq=False)
class SpaceSpec:
    """Descriptor of a finite-dimensional normed space.

    kind "lp" uses exponent ``p`` (math.inf allowed); kind "polyhedral" uses
    ``functionals`` (rows F_i) and is restricted to the real field.
    """

    kind: str
    dim: int
    p: float | None = None
    field: str = REAL
    functionals: np.ndarray | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.field not in (REAL, COMPLEX):
            raise ValueError(f"unknown field {self.field!r}")
        if self.kind == "lp":
            if self.p is None or not (self.p >= 1):
                raise ValueError(f"lp space needs p >= 1, got {self.p}")
            if self.functionals is not None:
                raise ValueError("lp space does not take functionals")
            object.__setattr__(self, "p", float(self.p))
        elif self.kind == "polyhedral":
            if self.field != REAL:
                raise ValueError("polyhedral norms are supported over the reals only")
            if self.functionals is None:
                raise ValueError("polyhedral space needs functionals")
            F = np.asarray(self.functionals, dtype=float)
            if F.ndim != 2 or F.shape[1] != self.dim or F.shape[0] < 1:
                raise ValueError(f"functionals must be (m, {self.dim}), got {F.shape}")
            if np.linalg.matrix_rank(F) < self.dim:
                raise ValueError(
                    "functionals do not span the dual: the gauge is only a seminorm"
                )
            F = F.copy()
            F.flags.writeable = False
            object.__setattr__(self, "functionals", F)
            object.__setattr__(self, "p", None)
        else:
            raise ValueError(f"unknown space kind {self.kind!r}")

    # -- structural predicates -------------------------------------------------

    @property
    def is_complex(self) -> bool:
        return self.field == COMPLEX

    @property
    def is_euclidean(self) -> bool:
        return self.kind == "lp" and self.p == 2.0

    @property
    def is_polytopal(self) -> bool:
        """True when the unit ball is a polytope (polyhedral, l1 or linf, real)."""
        if self.field != REAL:
            return False
        if self.kind == "polyhedral":
            return True
        return self.p in (1.0, math.inf)

    @property
    def is_smooth_lp(self) -> bool:
        return self.kind == "lp" and 1.0 < self.p < math.inf

    @property
    def dual_exponent(self) -> float:
        if self.kind != "lp":
            raise UnsupportedSpaceError("dual exponent only defined for lp spaces")
        if self.p == 1.0:
            return math.inf
        if self.p == math.inf:
            return 1.0
        return self.p / (self.p - 1.0)

    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    # -- equality / serialization ----------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, SpaceSpec):
            return NotImplemented
        if (self.kind, self.dim, self.field) != (other.kind, other.dim, other.field):
            return False
        if self.kind == "lp":
            return self.p == other.p
        return np.array_equal(self.functionals, other.functionals)

    def __hash__(self):
        key = (self.kind, self.dim, self.field, self.p)
        if self.functionals is not None:
            key = key + (self.functionals.tobytes(),)
        return hash(key)

    def __repr__(self):
        if self.kind == "lp":
            p = "inf" if self.p == math.inf else f"{self.p:g}"
            return f"SpaceSpec(lp, p={p}, dim={self.dim}, {self.field})"
        return f"SpaceSpec(polyhedral, m={len(self.functionals)}, dim={self.dim})"

    def to_dict(self) -> dict:
        if self.kind == "lp":
            p = "inf" if self.p == math.inf else self.p
            return {"kind": "lp", "p": p, "dim": self.dim, "field": self.field}
        return {
            "kind": "polyhedral",
            "dim": self.dim,
            "functionals": [list(map(float, row)) for row in self.functionals],
        }

    @staticmethod
    def from_dict(data: dict) -> "SpaceSpec":
        kind = data.get("kind")
        if kind == "lp":
            p = data.get("p")
            if isinstance(p, str):
                if p.lower() not in ("inf", "infinity"):
                    raise ValueError(f"unrecognized p value {p!r}")
                p = math.inf
            return SpaceSpec(
                kind="lp", dim=int(data["dim"]), p=float(p),
                field=data.get("field", REAL),
            )
        if kind == "polyhedral":
            return SpaceSpec(
                kind="polyhedral", dim=int(data["dim"]),
                functionals=np.asarray(data["functionals"], dtype=float),
            )
        raise ValueError(f"unknown space kind {kind!r}")


def lp_space(p: float, dim: int, field: str = REAL) -> SpaceSpec:
    return SpaceSpec(kind="lp", dim=dim, p=p, field=field)


def euclidean(dim: int, field: str = REAL) -> SpaceSpec:
    return lp_space(2.0, dim, field)


def polyhedral_space(functionals) -> SpaceSpec:
    F = np.asarray(functionals, dtype=float)
    return SpaceSpec(kind="polyhedral", dim=F.shape[1], functionals=F)


# -- scalar helpers -------------------------------------------------------------


def phase(z):
    """Unimodular phase of a scalar, with phase(0) = 1."""
    a = abs(z)
    return 1.0 if a == 0 else z / a


def _check_dim(space: SpaceSpec, v, what: str):
    v = np.asarray(v)
    if v.shape != (space.dim,):
        raise DimensionMismatchError(
            f"{what} has shape {v.shape}, expected ({space.dim},)"
        )
    return v.astype(space.dtype())


# -- norms ----------------------------------------------------------------------


def norm_eval(space: SpaceSpec, x) -> float:
    """Norm of ``x`` in the given space."""
    x = _check_dim(space, x, "vector")
    return float(_batch_norm(space, x[None, :])[0])


def _batch_norm(space: SpaceSpec, X: np.ndarray) -> np.ndarray:
    """Row-wise norms of a (N, dim) array."""
    A = np.abs(X)
    if space.kind == "polyhedral":
        return np.max(np.abs(X @ space.functionals.T), axis=1)
    if space.p == 1.0:
        return A.sum(axis=1)
    if space.p == math.inf:
        return A.max(axis=1)
    if space.p == 2.0:
        return np.sqrt((A * A).sum(axis=1))
    # generic p: rescale for overflow safety
    m = A.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return safe * ((A / safe[:, None]) ** space.p).sum(axis=1) ** (1.0 / space.p)


def dual_norm_eval(space: SpaceSpec, f) -> float:
    """``sup { |f(x)| : ||x|| <= 1 }`` for a functional in bilinear pairing."""
    f = _check_dim(space, f, "functional")
    if space.kind == "lp":
        q = space.dual_exponent
        dual = lp_space(q, space.dim, space.field)
        return float(_batch_norm(dual, f[None, :])[0])
    return _polyhedral_gauge(space, f.real)


def _batch_dual_norm(space: SpaceSpec, F: np.ndarray) -> np.ndarray:
    if space.kind == "lp":
        dual = lp_space(space.dual_exponent, space.dim, space.field)
        return _batch_norm(dual, F)
    return np.array([_polyhedral_gauge(space, row) for row in F])


def _polyhedral_gauge(space: SpaceSpec, f: np.ndarray) -> float:
    """Minkowski gauge of co{+-F_i} at f: min sum|c| with sum c_i F_i = f."""
    F = space.functionals
    m = F.shape[0]
    A_eq = np.hstack([F.T, -F.T])
    res = linprog(
        c=np.ones(2 * m), A_eq=A_eq, b_eq=f,
        bounds=[(0, None)] * (2 * m), method="highs",
    )
    if not res.success:  # cannot happen for spanning functionals
        raise UnsupportedSpaceError(f"gauge LP failed: {res.message}")
    return float(res.fun)


# -- support functionals ----------------------------------------------------------


def support_functionals(space: SpaceSpec, x, tol: float = 1e-9) -> list[np.ndarray]:
    """Extreme points of J(x) = { f : ||f||_* = 1, f(x) = ||x|| }.

    For smooth l_p the set is a single functional.  For l_1, l_inf and
    polyhedral spaces the finitely many extreme points are enumerated, with
    ``tol`` as the relative active-constraint band.  Complex l_1/l_inf have a
    continuum of extreme points and are rejected.
    """
    x = _check_dim(space, x, "vector")
    nx = norm_eval(space, x)
    if nx == 0.0:
        raise ValueError("support functionals are undefined at x = 0")

    if space.kind == "lp" and 1.0 < space.p < math.inf:
        p = space.p
        a = np.abs(x)
        f = np.conj(_phase_vec(x)) * (a / nx) ** (p - 1.0)
        return [f.astype(space.dtype())]

    if space.is_complex:
        raise UnsupportedSpaceError(
            "extreme support functionals of complex l1/linf are a continuum; "
            "only smooth complex l_p is supported"
        )

    x = x.real
    if space.kind == "lp" and space.p == 1.0:
        signs = np.sign(x)
        free = np.flatnonzero(np.abs(x) <= tol * nx)
        if len(free) > _SIGN_ENUM_CAP:
            raise UnsupportedSpaceError(
                f"{len(free)} free sign coordinates exceed the enumeration cap"
            )
        out = []
        for pattern in itertools.product((1.0, -1.0), repeat=len(free)):
            f = signs.copy()
            f[f == 0] = 1.0
            f[free] = pattern
            out.append(f)
        return out

    if space.kind == "lp":  # p == inf
        active = np.flatnonzero(np.abs(x) >= (1.0 - tol) * nx)
        out = []
        for i in active:
            f = np.zeros(space.dim)
            f[i] = 1.0 if x[i] >= 0 else -1.0
            out.append(f)
        return out

    # polyhedral: signed active functionals that are extreme in co{+-F}
    F = space.functionals
    vals = F @ x
    active = np.flatnonzero(np.abs(vals) >= (1.0 - tol) * nx)
    cands = []
    for i in active:
        s = 1.0 if vals[i] >= 0 else -1.0
        cands.append(s * F[i])
    cands = _dedup_rows(np.array(cands), 1e-12)
    signed_all = np.vstack([F, -F])
    keep = []
    for g in cands:
        others = signed_all[np.linalg.norm(signed_all - g, axis=1) > 1e-12]
        if not _in_convex_hull(others, g, tol=1e-9):
            keep.append(g)
    return keep


def _phase_vec(x: np.ndarray) -> np.ndarray:
    a = np.abs(x)
    out = np.where(a > 0, x / np.where(a > 0, a, 1.0), 1.0)
    return out


def support_functional_of(space: SpaceSpec, y) -> np.ndarray:
    """One member of J(y): a norm-one functional with f(y) = ||y||."""
    y = _check_dim(space, y, "vector")
    ny = norm_eval(space, y)
    if ny == 0.0:
        raise ValueError("support functional undefined at 0")
    if space.kind == "lp":
        p = space.p
        if p == 1.0:
            f = np.conj(_phase_vec(y))
            return f.astype(space.dtype())
        if p == math.inf:
            j = int(np.argmax(np.abs(y)))
            f = np.zeros(space.dim, dtype=space.dtype())
            f[j] = np.conj(phase(y[j]))
            return f
        a = np.abs(y)
        return (np.conj(_phase_vec(y)) * (a / ny) ** (p - 1.0)).astype(space.dtype())
    vals = space.functionals @ y.real
    j = int(np.argmax(np.abs(vals)))
    s = 1.0 if vals[j] >= 0 else -1.0
    return s * space.functionals[j]


def norming_vector(space: SpaceSpec, f) -> np.ndarray:
    """Unit vector x with f(x) = ||f||_* (a maximizer of Re f over the ball)."""
    f = _check_dim(space, f, "functional")
    if space.kind == "lp":
        p = space.p
        if p == 1.0:
            j = int(np.argmax(np.abs(f)))
            x = np.zeros(space.dim, dtype=space.dtype())
            x[j] = np.conj(phase(f[j]))
            return x
        if p == math.inf:
            return np.conj(_phase_vec(f)).astype(space.dtype())
        q = space.dual_exponent
        nf = dual_norm_eval(space, f)
        if nf == 0.0:
            x = np.zeros(space.dim, dtype=space.dtype())
            x[0] = 1.0
            return x
        a = np.abs(f)
        return (np.conj(_phase_vec(f)) * (a / nf) ** (q - 1.0)).astype(space.dtype())
    f = f.real
    if space.dim <= _VERTEX_DIM_CAP:
        V = polytope_vertices(space)
        vals = V @ f
        j = int(np.argmax(np.abs(vals)))
        return V[j] if vals[j] >= 0 else -V[j]
    F = space.functionals
    A_ub = np.vstack([F, -F])
    res = linprog(
        c=-f, A_ub=A_ub, b_ub=np.ones(A_ub.shape[0]),
        bounds=[(None, None)] * space.dim, method="highs",
    )
    if not res.success:
        raise UnsupportedSpaceError(f"norming LP failed: {res.message}")
    return np.asarray(res.x)


# -- sampling ---------------------------------------------------------------------


def sphere_sample(space: SpaceSpec, count: int, seed: int) -> np.ndarray:
    """Deterministic-for-seed unit vectors: Gaussian directions, radially normalized."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((count, space.dim))
    if space.is_complex:
        X = X + 1j * rng.standard_normal((count, space.dim))
    norms = _batch_norm(space, X)
    bad = norms < 1e-300
    if np.any(bad):
        X[bad] = 0.0
        X[bad, 0] = 1.0
        norms = _batch_norm(space, X)
    return X / norms[:, None]


def dual_sphere_sample(space: SpaceSpec, count: int, seed: int) -> np.ndarray:
    """Unit functionals in the dual norm of ``space``."""
    if space.kind == "lp":
        dual = lp_space(space.dual_exponent, space.dim, space.field)
        return sphere_sample(dual, count, seed)
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((count, space.dim))
    gauges = np.array([_polyhedral_gauge(space, row) for row in X])
    return X / gauges[:, None]


# -- polytopal geometry -------------------------------------------------------------


def polytope_vertices(space: SpaceSpec) -> np.ndarray:
    """All extreme points of the unit ball (real polytopal spaces, dim <= 6)."""
    if not space.is_polytopal:
        raise UnsupportedSpaceError("vertex enumeration needs a polytopal real norm")
    n = space.dim
    if n > _VERTEX_DIM_CAP:
        raise UnsupportedSpaceError(
            f"dim {n} exceeds the vertex-enumeration cap {_VERTEX_DIM_CAP}"
        )
    if space.kind == "lp" and space.p == 1.0:
        eye = np.eye(n)
        return np.vstack([eye, -eye])
    if space.kind == "lp":  # p == inf
        return np.array(list(itertools.product((1.0, -1.0), repeat=n)))
    A = np.vstack([space.functionals, -space.functionals])
    m2 = A.shape[0]
    verts = []
    scale = np.linalg.norm(A, axis=1).max()
    for rows in itertools.combinations(range(m2), n):
        S = A[list(rows)]
        if abs(np.linalg.det(S)) <= 1e-10 * scale**n:
            continue
        v = np.linalg.solve(S, np.ones(n))
        if np.max(A @ v) <= 1.0 + 1e-9:
            verts.append(v)
    if not verts:
        raise UnsupportedSpaceError("vertex enumeration found no vertices")
    return _dedup_rows(np.array(verts), 1e-8)


def polytope_facets(space: SpaceSpec) -> list[np.ndarray]:
    """Vertex arrays of the unit ball's facets (top-dimensional proper faces)."""
    if not space.is_polytopal:
        raise UnsupportedSpaceError("facet enumeration needs a polytopal real norm")
    n = space.dim
    V = polytope_vertices(space)
    if space.kind == "lp" and space.p == 1.0:
        facets = []
        for signs in itertools.product((1.0, -1.0), repeat=n):
            rows = [signs[i] * np.eye(n)[i] for i in range(n)]
            facets.append(np.array(rows))
        return facets
    if space.kind == "lp":  # p == inf
        facets = []
        for i in range(n):
            for s in (1.0, -1.0):
                mask = np.abs(V[:, i] - s) <= 1e-12
                facets.append(V[mask])
        return facets
    A = np.vstack([space.functionals, -space.functionals])
    facets = []
    seen = []
    for row in A:
        mask = row @ V.T >= 1.0 - 1e-9
        if mask.sum() < n:
            continue
        key = tuple(sorted(np.flatnonzero(mask)))
        if key in seen:
            continue
        seen.append(key)
        facets.append(V[mask])
    return facets


# -- small geometric utilities --------------------------------------------------------


def _dedup_rows(X: np.ndarray, tol: float) -> np.ndarray:
    keep = []
    for row in X:
        if all(np.max(np.abs(row - k)) > tol for k in keep):
            keep.append(row)
    return np.array(keep)


def _in_convex_hull(points: np.ndarray, target: np.ndarray, tol: float) -> bool:
    """NNLS membership test: target in co(points)?"""
    if len(points) == 0:
        return False
    A = np.vstack([points.T, np.ones((1, len(points)))])
    b = np.concatenate([target, [1.0]])
    _, resid = nnls(A, b)
    return resid <= tol * max(1.0, np.linalg.norm(b))
