"""Operators between normed spaces: norm, SVD, partial isometries, M_G.

The SVD is a one-sided (Hestenes) Jacobi iteration over real or complex
matrices, capped at dimension 64; tests cross-check it against LAPACK.
Operator norms are exact for Euclidean-to-Euclidean matrices (top singular
value) and for polytopal real domains (vertex maximum of the convex map
``x -> ||Tx||``); everything else falls back to a multi-start duality ascent
seeded from a sphere grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import spaces as sp
from .errors import DimensionMismatchError, UnsupportedSpaceError

_DIM_CAP = 64


@dataclass
class SolverBudget:
    """Effort knobs for every non-exact search: starts, iterations, grid points."""

    max_starts: int = 64
    max_iters: int = 500
    grid_resolution: int = 10_000


DEFAULT_BUDGET = SolverBudget()


def _budget(budget) -> SolverBudget:
    return budget if budget is not None else DEFAULT_BUDGET


@dataclass(eq=False)
class OperatorSpec:
    """A matrix together with its domain and codomain spaces.

    Row i of ``matrix`` holds the coordinates of the i-th coordinate
    functional of the image: ``(Tx)_i = sum_j matrix[i, j] x_j``.
    """

    matrix: np.ndarray
    domain: sp.SpaceSpec
    codomain: sp.SpaceSpec

    def __post_init__(self):
        if self.domain.field != self.codomain.field:
            raise ValueError("domain and codomain must share the scalar field")
        dtype = self.domain.dtype()
        M = np.asarray(self.matrix)
        if dtype == np.float64 and np.iscomplexobj(M) and np.any(M.imag != 0):
            raise ValueError("complex entries in an operator between real spaces")
        M = M.astype(dtype)
        if M.shape != (self.codomain.dim, self.domain.dim):
            raise DimensionMismatchError(
                f"matrix shape {M.shape} does not match "
                f"({self.codomain.dim}, {self.domain.dim})"
            )
        if max(M.shape) > _DIM_CAP:
            raise UnsupportedSpaceError(f"dimensions above {_DIM_CAP} are unsupported")
        self.matrix = M

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=self.matrix.dtype)

    def scaled(self, factor) -> "OperatorSpec":
        return OperatorSpec(self.matrix * factor, self.domain, self.codomain)

    def __add__(self, other: "OperatorSpec") -> "OperatorSpec":
        if self.domain != other.domain or self.codomain != other.codomain:
            raise DimensionMismatchError("operator sum needs matching spaces")
        return OperatorSpec(self.matrix + other.matrix, self.domain, self.codomain)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorSpec):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and np.array_equal(self.matrix, other.matrix)
        )

    def to_dict(self) -> dict:
        if self.domain.is_complex:
            mat = [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]
        else:
            mat = [[float(v) for v in row] for row in self.matrix]
        return {
            "matrix": mat,
            "domain": self.domain.to_dict(),
            "codomain": self.codomain.to_dict(),
        }

    @staticmethod
    def from_dict(data: dict, spaces: dict | None = None) -> "OperatorSpec":
        def resolve(entry, label):
            if isinstance(entry, str):
                if spaces is None or entry not in spaces:
                    raise ValueError(f"unknown space reference {entry!r} in {label}")
                return spaces[entry]
            return sp.SpaceSpec.from_dict(entry)

        domain = resolve(data["domain"], "domain")
        codomain = resolve(data["codomain"], "codomain")
        matrix = _matrix_from_json(data["matrix"], domain.is_complex)
        return OperatorSpec(matrix, domain, codomain)


def _matrix_from_json(rows, is_complex: bool) -> np.ndarray:
    def scalar(v):
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"complex entry must be [re, im], got {v}")
            return complex(v[0], v[1])
        return complex(v) if is_complex else float(v)

    return np.array([[scalar(v) for v in row] for row in rows])


def identity(space: sp.SpaceSpec) -> OperatorSpec:
    return OperatorSpec(np.eye(space.dim), space, space)


def compose(A: OperatorSpec, B: OperatorSpec) -> OperatorSpec:
    """The composition A o B (apply B first)."""
    if B.codomain != A.domain:
        raise DimensionMismatchError("composition needs B.codomain == A.domain")
    return OperatorSpec(A.matrix @ B.matrix, B.domain, A.codomain)


def matrix_units(domain: sp.SpaceSpec, codomain: sp.SpaceSpec) -> list[OperatorSpec]:
    """All rank-one coordinate operators e_i (x) e_j."""
    out = []
    for i in range(codomain.dim):
        for j in range(domain.dim):
            M = np.zeros((codomain.dim, domain.dim))
            M[i, j] = 1.0
            out.append(OperatorSpec(M, domain, codomain))
    return out


def random_operators(
    domain: sp.SpaceSpec, codomain: sp.SpaceSpec, count: int, seed: int
) -> list[OperatorSpec]:
    rng = np.random.default_rng(seed)
    shape = (codomain.dim, domain.dim)
    out = []
    for _ in range(count):
        M = rng.standard_normal(shape)
        if domain.is_complex:
            M = M + 1j * rng.standard_normal(shape)
        out.append(OperatorSpec(M, domain, codomain))
    return out


# -- witnesses ------------------------------------------------------------------


@dataclass
class WitnessPair:
    """A unit vector (and optionally a unit functional) certifying a value."""

    x: np.ndarray
    ystar: np.ndarray | None
    value: float


def canonical_witness(x: np.ndarray, ystar: np.ndarray | None = None):
    """Phase-normalize so the first nonzero coordinate of x is real positive.

    (x, y*) and (-x, -y*) certify the same value; the canonical representative
    makes reports deterministic.
    """
    x = np.asarray(x)
    nz = np.flatnonzero(np.abs(x) > 1e-12)
    if len(nz):
        ph = sp.phase(x[nz[0]])
        x = x / ph
        if ystar is not None:
            ystar = np.asarray(ystar) * ph
    if not np.iscomplexobj(x):
        x = x.real
        if ystar is not None and not np.iscomplexobj(ystar):
            ystar = np.asarray(ystar).real
    return (x, ystar)


def _lex_key(x: np.ndarray) -> tuple:
    flat = np.asarray(x).ravel()
    if np.iscomplexobj(flat):
        return tuple(np.column_stack([flat.real, flat.imag]).ravel())
    return tuple(flat)


def better_witness(value_a, xa, value_b, xb, tol=1e-12):
    """True when (value_a, xa) should replace (value_b, xb): larger value, ties lex."""
    if value_a > value_b + tol:
        return True
    if value_a < value_b - tol:
        return False
    return _lex_key(xa) < _lex_key(xb)


@dataclass
class NormResult:
    value: float
    witness: WitnessPair
    method: str
    certified: bool


# -- one-sided Jacobi SVD ----------------------------------------------------------


@dataclass
class SvdResult:
    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruction_error(self, A: np.ndarray) -> float:
        R = (self.left_vectors * self.singular_values) @ self.left_adjoint_rows()
        return float(np.linalg.norm(A - R))

    def left_adjoint_rows(self) -> np.ndarray:
        return self.right_vectors.conj().T


def jacobi_svd(A, max_sweeps: int = 64, tol: float = 1e-14) -> SvdResult:
    """One-sided Jacobi SVD of a dense matrix (real or complex, dims <= 64).

    Columns of the working matrix are rotated pairwise until mutually
    orthogonal; their norms are the singular values.
    """
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("need a 2-D matrix")
    m, n = A.shape
    if max(m, n) > _DIM_CAP:
        raise UnsupportedSpaceError(f"dimensions above {_DIM_CAP} are unsupported")
    if m < n:
        flipped = jacobi_svd(A.conj().T, max_sweeps=max_sweeps, tol=tol)
        return SvdResult(
            singular_values=flipped.singular_values,
            left_vectors=flipped.right_vectors,
            right_vectors=flipped.left_vectors,
        )

    cplx = np.iscomplexobj(A)
    B = A.astype(np.complex128 if cplx else np.float64).copy()
    V = np.eye(n, dtype=B.dtype)
    scale = np.linalg.norm(B)
    if scale == 0.0:
        return SvdResult(np.zeros(n), _complete_columns(np.zeros((m, 0)), m, n, B.dtype),
                         np.eye(n, dtype=B.dtype))

    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                bi, bj = B[:, i], B[:, j]
                a = float(np.real(np.vdot(bi, bi)))
                b = float(np.real(np.vdot(bj, bj)))
                c = complex(np.vdot(bi, bj))
                if abs(c) <= tol * math.sqrt(a * b) + 1e-300:
                    continue
                rotated = True
                if cplx and c.imag != 0.0:
                    ph = c / abs(c)
                    B[:, j] *= np.conj(ph)
                    V[:, j] *= np.conj(ph)
                    c = abs(c)
                else:
                    c = c.real
                tau = (b - a) / (2.0 * c)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                Bi = cs * B[:, i] - sn * B[:, j]
                Bj = sn * B[:, i] + cs * B[:, j]
                B[:, i], B[:, j] = Bi, Bj
                Vi = cs * V[:, i] - sn * V[:, j]
                Vj = sn * V[:, i] + cs * V[:, j]
                V[:, i], V[:, j] = Vi, Vj
        if not rotated:
            break

    svals = np.linalg.norm(B, axis=0)
    order = np.argsort(-svals, kind="stable")
    svals = svals[order]
    B = B[:, order]
    V = V[:, order]
    U = np.zeros((m, n), dtype=B.dtype)
    for k in range(n):
        if svals[k] > tol * scale:
            U[:, k] = B[:, k] / svals[k]
        else:
            svals[k] = 0.0
    U = _complete_columns(U[:, svals > 0], m, n, B.dtype)
    return SvdResult(singular_values=svals, left_vectors=U, right_vectors=V)


def _complete_columns(U: np.ndarray, m: int, k: int, dtype) -> np.ndarray:
    """Extend orthonormal columns of U (m x r) to m x k by Gram-Schmidt."""
    cols = [U[:, i] for i in range(U.shape[1])]
    basis_pool = list(np.eye(m, dtype=dtype))
    idx = 0
    while len(cols) < k:
        v = basis_pool[idx % m].copy()
        idx += 1
        for u in cols:
            v = v - np.vdot(u, v) * u
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
    return np.column_stack(cols) if cols else np.zeros((m, k), dtype=dtype)


def svd_decompose(A: OperatorSpec) -> SvdResult:
    """Full SVD of an operator between Euclidean spaces."""
    if not (A.domain.is_euclidean and A.codomain.is_euclidean):
        raise UnsupportedSpaceError("SVD requires Euclidean domain and codomain")
    return jacobi_svd(A.matrix)


def is_partial_isometry(A: OperatorSpec, tol: float = 1e-10) -> bool:
    """True iff every singular value lies within ``tol`` of {0, 1}."""
    s = svd_decompose(A).singular_values
    return bool(np.all(np.minimum(np.abs(s), np.abs(s - 1.0)) <= tol))


# -- operator norm -------------------------------------------------------------------


def op_norm(T: OperatorSpec, budget: SolverBudget | None = None) -> NormResult:
    """sup of ||Tx|| over the domain unit sphere, with a maximizing witness."""
    budget = _budget(budget)
    if T.domain.is_euclidean and T.codomain.is_euclidean:
        dec = jacobi_svd(T.matrix)
        x = dec.right_vectors[:, 0]
        return _finish(T, x, float(dec.singular_values[0]), "hilbert", True)
    if T.domain.is_polytopal and T.domain.dim <= 6:
        V = sp.polytope_vertices(T.domain)
        vals = sp._batch_norm(T.codomain, (T.matrix @ V.T).T)
        best_x, best_v = None, -1.0
        for v, val in zip(V, vals):
            xc, _ = canonical_witness(v)
            if best_x is None or better_witness(val, xc, best_v, best_x):
                best_x, best_v = xc, float(val)
        return _finish(T, best_x, best_v, "vertices", True)
    x, val, converged = _multistart_ascent(T, budget)
    return _finish(T, x, val, "ascent", False)


def _finish(T: OperatorSpec, x, value, method, certified) -> NormResult:
    Tx = T.apply(x)
    ystar = None
    nx = sp.norm_eval(T.codomain, Tx)
    if nx > 0:
        try:
            ystar = sp.support_functional_of(T.codomain, Tx)
        except (ValueError, UnsupportedSpaceError):
            ystar = None
    x, ystar = canonical_witness(x, ystar)
    return NormResult(
        value=float(value),
        witness=WitnessPair(x=x, ystar=ystar, value=float(value)),
        method=method,
        certified=certified,
    )


def _ascent_step(T: OperatorSpec, x: np.ndarray) -> np.ndarray:
    y = T.apply(x)
    if sp.norm_eval(T.codomain, y) == 0.0:
        return x
    f = sp.support_functional_of(T.codomain, y)
    g = T.matrix.T @ f  # bilinear pairing: no conjugation
    return sp.norming_vector(T.domain, g)


def duality_ascent(T: OperatorSpec, x0: np.ndarray, max_iters: int):
    """Monotone ascent of ||Tx|| via alternating support/norming vectors."""
    x = np.asarray(x0)
    val = sp.norm_eval(T.codomain, T.apply(x))
    for _ in range(max_iters):
        xn = _ascent_step(T, x)
        vn = sp.norm_eval(T.codomain, T.apply(xn))
        if vn <= val + 1e-15 * (1.0 + val):
            return xn if vn > val else x, max(val, vn), True
        x, val = xn, vn
    return x, val, False


def _ascent_starts(T: OperatorSpec, budget: SolverBudget, seed: int = 0):
    n = T.domain.dim
    starts = [np.eye(n, dtype=T.domain.dtype())[i] for i in range(n)]
    scan = sp.sphere_sample(T.domain, min(budget.grid_resolution, 2048), seed)
    vals = sp._batch_norm(T.codomain, (T.matrix @ scan.T).T)
    order = np.argsort(-vals)
    take = max(0, min(budget.max_starts - n, 16))
    starts.extend(scan[i] for i in order[:take])
    return starts


def _multistart_ascent(T: OperatorSpec, budget: SolverBudget):
    best_x, best_v, all_conv = None, -1.0, True
    for x0 in _ascent_starts(T, budget):
        x, v, conv = duality_ascent(T, x0, budget.max_iters)
        all_conv = all_conv and conv
        xc, _ = canonical_witness(x)
        if best_x is None or better_witness(v, xc, best_v, best_x):
            best_x, best_v = xc, v
    return best_x, best_v, all_conv


def normalize(T: OperatorSpec, budget: SolverBudget | None = None) -> OperatorSpec:
    """Divide the matrix by the operator norm (callers fix ||G|| = 1 explicitly)."""
    val = op_norm(T, budget).value
    if val == 0.0:
        raise ValueError("cannot normalize the zero operator")
    return T.scaled(1.0 / val)


# -- norm-attainment set M_G --------------------------------------------------------


@dataclass
class AttainmentSet:
    """Representation of M_G = { x in S_X : ||Gx|| = ||G|| }.

    subspace mode: orthonormal ``basis`` spans E, M_G = unit sphere of E
    (Euclidean domain and codomain).  vertices mode: maximizing vertices in
    ``points`` plus fully-maximizing facets in ``facets``.  cluster mode:
    deduplicated local maximizers from a multi-start search.
    """

    mode: str
    tol: float
    basis: np.ndarray | None = None
    points: np.ndarray | None = None
    facets: list = field(default_factory=list)
    certified: bool = True
    norm_value: float = 1.0


def attainment_set(
    G: OperatorSpec, tol: float = 1e-8, budget: SolverBudget | None = None
) -> AttainmentSet:
    budget = _budget(budget)
    if G.domain.is_euclidean and G.codomain.is_euclidean:
        dec = jacobi_svd(G.matrix)
        s1 = float(dec.singular_values[0])
        keep = dec.singular_values >= s1 * (1.0 - tol)
        basis = dec.right_vectors[:, keep]
        return AttainmentSet(mode="subspace", tol=tol, basis=basis, norm_value=s1)
    if G.domain.is_polytopal and G.domain.dim <= 6:
        V = sp.polytope_vertices(G.domain)
        vals = sp._batch_norm(G.codomain, (G.matrix @ V.T).T)
        vmax = float(vals.max())
        mask = vals >= vmax * (1.0 - tol)
        facets = []
        for fverts in sp.polytope_facets(G.domain):
            fvals = sp._batch_norm(G.codomain, (G.matrix @ fverts.T).T)
            if not np.all(fvals >= vmax * (1.0 - tol)):
                continue
            centroid = fverts.mean(axis=0)
            if sp.norm_eval(G.codomain, G.apply(centroid)) >= vmax * (1.0 - tol):
                facets.append(fverts)
        return AttainmentSet(
            mode="vertices", tol=tol, points=V[mask], facets=facets, norm_value=vmax
        )
    points, vmax, converged = _cluster_maximizers(G, tol, budget)
    return AttainmentSet(
        mode="cluster", tol=tol, points=points, certified=converged, norm_value=vmax
    )


def _cluster_maximizers(G: OperatorSpec, tol: float, budget: SolverBudget):
    finals = []
    all_conv = True
    for x0 in _ascent_starts(G, budget):
        x, v, conv = duality_ascent(G, x0, budget.max_iters)
        all_conv = all_conv and conv
        finals.append((v, x))
    vmax = max(v for v, _ in finals)
    pts = []
    for v, x in finals:
        if v < vmax * (1.0 - tol):
            continue
        xc, _ = canonical_witness(x)
        if all(np.max(np.abs(xc - q)) > 1e-6 for q in pts):
            pts.append(xc)
    pts.sort(key=_lex_key)
    return np.array(pts), vmax, all_conv


def attainment_sample(
    att: AttainmentSet, G: OperatorSpec, count: int, seed: int
) -> np.ndarray:
    """Unit vectors drawn from the attainment set representation."""
    rng = np.random.default_rng(seed)
    if att.mode == "subspace":
        k = att.basis.shape[1]
        C = rng.standard_normal((count, k))
        if np.iscomplexobj(att.basis):
            C = C + 1j * rng.standard_normal((count, k))
        C /= np.linalg.norm(C, axis=1)[:, None]
        return C @ att.basis.T
    if att.mode == "vertices":
        pool = [v for v in att.points]
        out = []
        for i in range(count):
            if att.facets and i % 2 == 1:
                fverts = att.facets[rng.integers(len(att.facets))]
                w = rng.dirichlet(np.ones(len(fverts)))
                out.append(w @ fverts)
            else:
                out.append(pool[rng.integers(len(pool))])
        return np.array(out)
    if att.points is None or len(att.points) == 0:
        raise ValueError("empty cluster attainment set")
    idx = rng.integers(len(att.points), size=count)
    return att.points[idx]
