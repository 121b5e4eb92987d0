"""Deterministic report emission: JSON and CSV with 17-significant-digit scalars.

The standard json module formats floats with shortest round-trip repr; the
report contract wants a fixed digit count and byte-identical output for
identical results, so the emitter below is hand-rolled over plain data.
"""

from __future__ import annotations

import numpy as np

from .geometry import ComparisonModulus, MaximizerSet, RankOneFunctional
from .gnorm import DeltaProfile
from .hilbert import HilbertAnalysis
from .indices import IndexEstimate
from .numrange import RangeSample
from .operators import AttainmentSet, NormResult, OperatorSpec, WitnessPair
from .spaces import SpaceSpec
from .spear import SpearReport


def fmt_scalar(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if v != v:
        return '"nan"'
    if v == float("inf"):
        return '"inf"'
    if v == float("-inf"):
        return '"-inf"'
    s = f"{v:.17g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 0) -> str:
    """JSON text with insertion-order keys and fixed float formatting."""
    pad = " " * indent
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return fmt_scalar(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{fmt_scalar(obj.real)}, {fmt_scalar(obj.imag)}]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  "{k}": {dumps(v, indent + 2)}' for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(
            isinstance(v, (bool, int, float, complex, np.generic)) for v in seq
        )
        if flat:
            return "[" + ", ".join(dumps(v) for v in seq) + "]"
        inner = ",\n".join(f"{pad}  {dumps(v, indent + 2)}" for v in seq)
        return "[\n" + inner + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _vector(v):
    if v is None:
        return None
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return [complex(z) for z in v]
    return [float(t) for t in v]


def _matrix(M):
    M = np.asarray(M)
    return [_vector(row) for row in M]


def to_jsonable(obj):
    """Plain-data view of any gspear result object (stable key order)."""
    if isinstance(obj, SpaceSpec):
        return obj.to_dict()
    if isinstance(obj, OperatorSpec):
        d = obj.to_dict()
        return {"matrix": d["matrix"], "domain": d["domain"], "codomain": d["codomain"]}
    if isinstance(obj, WitnessPair):
        return {
            "x": _vector(obj.x),
            "ystar": _vector(obj.ystar),
            "value": obj.value,
        }
    if isinstance(obj, NormResult):
        out = {
            "value": obj.value,
            "witness_x": _vector(obj.witness.x),
            "method": obj.method,
            "certified": obj.certified,
        }
        if obj.witness.ystar is not None:
            out["witness_ystar"] = _vector(obj.witness.ystar)
        return out
    if isinstance(obj, SpearReport):
        return {
            "verdict": obj.verdict,
            "worst_T": _matrix(obj.worst_T.matrix) if obj.worst_T is not None else None,
            "gap": obj.gap,
            "samples_used": obj.samples_used,
            "tol": obj.tol,
            "seed": obj.seed,
            "seminorm_degenerate": obj.seminorm_degenerate,
        }
    if isinstance(obj, DeltaProfile):
        return {
            "deltas": [d for d, _ in obj.entries],
            "values": [s for _, s in obj.entries],
            "certified": obj.certified,
        }
    if isinstance(obj, RangeSample):
        return {
            "kind": obj.kind,
            "points": [
                {
                    "re": float(np.real(v)),
                    "im": float(np.imag(v)),
                    "value": w.value,
                    "x": _vector(w.x),
                    "ystar": _vector(w.ystar),
                }
                for v, w in obj.points
            ],
        }
    if isinstance(obj, IndexEstimate):
        return {
            "kind": obj.kind,
            "value": obj.value,
            "argmin_T": _matrix(obj.argmin_T.matrix),
            "samples": obj.samples,
            "seed": obj.seed,
            "seminorm_degenerate": obj.seminorm_degenerate,
            "note": obj.note,
        }
    if isinstance(obj, HilbertAnalysis):
        return {
            "E_basis": _matrix(obj.E_basis),
            "gamma": obj.gamma,
            "conditions": dict(obj.conditions),
            "consistent": obj.consistent,
            "buckets": obj.buckets,
            "dist_records": [
                {"delta": d, "max_dist": m, "bound": b} for d, m, b in obj.dist_records
            ],
            "deck_deviation": obj.deck_deviation,
            "warnings": list(obj.warnings),
        }
    if isinstance(obj, RankOneFunctional):
        return {"x": _vector(obj.x), "ystar": _vector(obj.ystar), "W": _matrix(obj.matrix)}
    if isinstance(obj, MaximizerSet):
        return {
            "functionals": [to_jsonable(f) for f in obj.functionals],
            "diameter": obj.diameter,
            "exhaustive": obj.exhaustive,
        }
    if isinstance(obj, ComparisonModulus):
        return {
            "t": [t for t, _ in obj.grid],
            "phi_hat": [v for _, v in obj.grid],
            "limit_ok": obj.limit_ok,
        }
    if isinstance(obj, AttainmentSet):
        return {
            "mode": obj.mode,
            "tol": obj.tol,
            "basis": _matrix(obj.basis) if obj.basis is not None else None,
            "points": _matrix(obj.points) if obj.points is not None else None,
            "facet_count": len(obj.facets),
            "certified": obj.certified,
        }
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _matrix(obj) if obj.ndim == 2 else _vector(obj)
    if isinstance(obj, (str, bool, int, float, complex)) or obj is None:
        return obj
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"no JSON view for {type(obj)!r}")


def _csv_cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def range_sample_csv(sample: RangeSample) -> str:
    """CSV rows re,im,value,x...,ystar... for plotting."""
    rows = []
    xdim = ydim = 0
    for _, w in sample.points:
        xdim = max(xdim, len(np.atleast_1d(w.x)))
        if w.ystar is not None:
            ydim = max(ydim, len(np.atleast_1d(w.ystar)))
    cplx = any(np.iscomplexobj(w.x) for _, w in sample.points)

    def coords(v, dim):
        out = []
        v = [] if v is None else list(np.atleast_1d(v))
        for i in range(dim):
            z = v[i] if i < len(v) else 0.0
            if cplx:
                out.extend([f"{np.real(z):.17g}", f"{np.imag(z):.17g}"])
            else:
                out.append(f"{float(np.real(z)):.17g}")
        return out

    header = ["re", "im", "value"]
    for i in range(xdim):
        header.extend([f"x{i+1}re", f"x{i+1}im"] if cplx else [f"x{i+1}"])
    for i in range(ydim):
        header.extend([f"ystar{i+1}re", f"ystar{i+1}im"] if cplx else [f"ystar{i+1}"])
    rows.append(",".join(header))
    for v, w in sample.points:
        cells = [
            _csv_cell(float(np.real(v))),
            _csv_cell(float(np.imag(v))),
            _csv_cell(w.value),
        ]
        cells.extend(coords(w.x, xdim))
        cells.extend(coords(w.ystar, ydim))
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


def table_csv(header: list, rows: list) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def emit_report(result, format: str = "json") -> bytes:
    """Serialize a result object; identical results give identical bytes."""
    if format == "json":
        return (dumps(to_jsonable(result)) + "\n").encode()
    if format == "csv":
        if isinstance(result, RangeSample):
            return range_sample_csv(result).encode()
        if isinstance(result, DeltaProfile):
            return table_csv(
                ["delta", "s"], [(d, s) for d, s in result.entries]
            ).encode()
        if isinstance(result, ComparisonModulus):
            return table_csv(["t", "phi_hat"], result.grid).encode()
        flat = to_jsonable(result)
        if isinstance(flat, dict) and all(
            not isinstance(v, (dict, list)) for v in flat.values()
        ):
            return table_csv(list(flat), [list(flat.values())]).encode()
        raise TypeError(f"no CSV layout for {type(result)!r}")
    raise ValueError(f"unknown format {format!r}")
