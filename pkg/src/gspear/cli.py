"""Command-line interface: problem ingestion, dispatch, reports, figures.

Reports are JSON by default (CSV for the range command, matching its
plotting-oriented row format); when ``--out`` is given, diagnostic matplotlib
figures are rendered next to the delimited output unless ``--no-plot``.

Exit codes: 0 success, 1 invariant violation (verify-all), 2 validation
failure, 3 non-converged solver under ``--certified``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path


def _cap_threads():
    threads = os.environ.get("GSPEAR_THREADS")
    if threads:
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, threads)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gspear",
        description="G-norms, G-numerical ranges and spear-operator diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_problem=True):
        p.add_argument("--problem", required=need_problem, help="problem JSON file")
        p.add_argument("--g", default="G", help="operator name for G (default G)")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--method", default=None)
        p.add_argument("--delta-grid", default=None, help="comma-separated deltas")
        p.add_argument("--output", choices=("json", "csv"), default=None)
        p.add_argument("--out", default=None, help="write the report to this path")
        p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
        p.add_argument(
            "--certified",
            action="store_true",
            help="exit 3 when the solver cannot certify convergence",
        )
        return p

    p = common(sub.add_parser("gnorm", help="norm of T relative to G"))
    p.add_argument("--t", default="T", help="operator name for T (default T)")
    p.add_argument("--profile", action="store_true", help="also emit the delta profile")

    p = common(sub.add_parser("nu", help="numerical radius of T relative to G"))
    p.add_argument("--t", default="T")

    p = common(sub.add_parser("range", help="sample S_G / V_G / S-tilde"))
    p.add_argument("--t", default="T")
    p.add_argument("--kind", choices=("vg", "sg", "stilde"), default="vg")
    p.add_argument("--count", type=int, default=None)

    p = common(sub.add_parser("check", help="spear / relative spear verdict"))
    p.add_argument("--kind", choices=("spear", "relative"), required=True)

    p = common(sub.add_parser("index", help="numerical index estimates"))
    p.add_argument("--kind", choices=("ng", "n1", "n2", "all"), default="all")

    p = common(sub.add_parser("hilbert", help="Hilbert-space E/gamma analysis"))
    p.add_argument("--deck-size", type=int, default=8)

    p = common(sub.add_parser("smooth", help="smooth-point test of T"))
    p.add_argument("--t", default="T")

    p = common(sub.add_parser("dual", help="dual-ball membership of an action matrix"))
    p.add_argument("--w", default="W", help="operator name holding the action matrix")
    p.add_argument("--atoms", type=int, default=None)

    p = common(sub.add_parser("dominate", help="G-norm comparison via the modulus"))
    p.add_argument("--g2", required=True, help="problem file holding the second G")
    p.add_argument("--g2-name", default="G")
    p.add_argument("--tgrid", default=None, help="comma-separated t values")

    p = common(sub.add_parser("verify-all", help="run the theorem suite"), need_problem=False)

    return parser


def _params(problem, args, name, default):
    v = getattr(args, name.replace("-", "_"), None)
    if v is not None:
        return v
    if problem is not None and name in problem.params:
        return problem.params[name]
    return default


def _parse_grid(text):
    if text is None:
        return None
    out = []
    for tok in str(text).split(","):
        tok = tok.strip()
        if tok:
            out.append(float(tok))
    return out or None


def _emit(args, result, default_format="json", figures=()):
    from .report import emit_report

    fmt = args.output or default_format
    payload = emit_report(result, fmt)
    if args.out:
        out = Path(args.out)
        out.write_bytes(payload)
        if not args.no_plot:
            for render in figures:
                render(out)
    else:
        sys.stdout.write(payload.decode())
    return 0


def _fig_path(out: Path, tag: str) -> Path:
    return out.with_name(out.stem + f"_{tag}.png")


def _certified_exit(args, certified: bool) -> int:
    return 3 if (args.certified and not certified) else 0


def main(argv=None) -> int:
    _cap_threads()
    args = build_parser().parse_args(argv)
    from .errors import ValidationError

    try:
        code = _dispatch(args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    return code


def _load(args):
    from .problems import load_problem

    if args.problem is None:
        return None
    return load_problem(args.problem)


def _dispatch(args) -> int:
    from .errors import ValidationError

    if args.command == "verify-all":
        return _cmd_verify_all(args)

    problem = _load(args)
    try:
        G = problem.operator(args.g)
    except ValidationError:
        raise
    tol = float(_params(problem, args, "tol", 1e-8))
    seed = int(_params(problem, args, "seed", 0))

    if args.command == "gnorm":
        return _cmd_gnorm(args, problem, G, tol, seed)
    if args.command == "nu":
        return _cmd_nu(args, problem, G, tol)
    if args.command == "range":
        return _cmd_range(args, problem, G, tol, seed)
    if args.command == "check":
        return _cmd_check(args, problem, G, tol, seed)
    if args.command == "index":
        return _cmd_index(args, problem, G, seed)
    if args.command == "hilbert":
        return _cmd_hilbert(args, problem, G, tol, seed)
    if args.command == "smooth":
        return _cmd_smooth(args, problem, G, tol)
    if args.command == "dual":
        return _cmd_dual(args, problem, G, tol, seed)
    if args.command == "dominate":
        return _cmd_dominate(args, problem, G, tol, seed)
    raise ValidationError(f"unknown command {args.command!r}")


def _cmd_gnorm(args, problem, G, tol, seed):
    from .gnorm import delta_profile, g_norm
    from .plotting import save_profile_figure

    T = problem.operator(args.t)
    method = _params(problem, args, "method", "auto")
    res = g_norm(T, G, method=method, tol=tol, seed=seed)
    figures = []
    payload = res
    if args.profile or res.profile is not None:
        prof = res.profile
        if prof is None:
            prof = delta_profile(T, G, deltas=_parse_grid(args.delta_grid), tol=tol)
        payload = {"gnorm": res, "profile": prof}
        figures.append(
            lambda out, prof=prof, v=res.value: save_profile_figure(
                prof, _fig_path(out, "profile"), gnorm_value=v
            )
        )
    rc = _emit(args, payload, figures=figures)
    return rc or _certified_exit(args, res.certified)


def _cmd_nu(args, problem, G, tol):
    from .numrange import nu_g

    T = problem.operator(args.t)
    res = nu_g(T, G, tol=tol)
    rc = _emit(args, res)
    return rc or _certified_exit(args, res.certified)


def _cmd_range(args, problem, G, tol, seed):
    from .numrange import s_range_sample, v_range_sample
    from .plotting import save_range_figure

    T = problem.operator(args.t)
    count = int(_params(problem, args, "count", 200))
    if args.kind == "vg":
        sample = v_range_sample(T, G, count, seed, tol=tol)
    elif args.kind == "sg":
        sample = s_range_sample(T, G, count, seed, kind="S_G", tol=tol)
    else:
        sample = s_range_sample(T, G, count, seed, kind="S_tilde", tol=tol)
    figures = [lambda out: save_range_figure(sample, _fig_path(out, "range"))]
    return _emit(args, sample, default_format="csv", figures=figures)


def _cmd_check(args, problem, G, tol, seed):
    from .spear import relative_spear_check, spear_check

    samples = int(_params(problem, args, "samples", 100))
    if args.kind == "relative":
        report = relative_spear_check(G, samples=samples, seed=seed, tol=tol)
    else:
        report = spear_check(G, samples=samples, seed=seed, tol=tol)
    return _emit(args, report)


def _cmd_index(args, problem, G, seed):
    from .indices import estimate_index, index_chain_check

    samples = int(_params(problem, args, "samples", 100))
    if args.kind == "all":
        result = index_chain_check(G, samples=samples, seed=seed)
        result = {
            "n1": result["n1"],
            "n2": result["n2"],
            "nG": result["nG"],
            "argmin": {k: v.matrix for k, v in result["argmin"].items()},
            "product_ok": result["product_ok"],
            "collapse_ok": result["collapse_ok"],
            "seminorm_degenerate": result["seminorm_degenerate"],
        }
        return _emit(args, result)
    kind = {"ng": "nG", "n1": "n1", "n2": "n2"}[args.kind]
    return _emit(args, estimate_index(G, kind, samples=samples, seed=seed))


def _cmd_hilbert(args, problem, G, tol, seed):
    from .hilbert import hilbert_analyze
    from .plotting import save_hilbert_figure

    deltas = _parse_grid(args.delta_grid) or _parse_grid(
        ",".join(str(d) for d in problem.params.get("delta_grid", []))
    )
    from .operators import random_operators

    deck = random_operators(G.domain, G.codomain, int(args.deck_size), seed + 1)
    analysis = hilbert_analyze(G, deck=deck, delta_grid=deltas, tol=tol, seed=seed)
    figures = [lambda out: save_hilbert_figure(analysis, _fig_path(out, "hilbert"))]
    return _emit(args, analysis, figures=figures)


def _cmd_smooth(args, problem, G, tol):
    from .geometry import is_smooth

    T = problem.operator(args.t)
    result = is_smooth(T, G, tol=max(tol, 1e-6))
    return _emit(args, result)


def _cmd_dual(args, problem, G, tol, seed):
    from .geometry import dual_membership

    W = problem.operator(args.w).matrix
    atoms = int(_params(problem, args, "atoms", 2048))
    result = dual_membership(W, G, atoms=atoms, seed=seed, tol=max(tol, 1e-9))
    return _emit(args, result)


def _cmd_dominate(args, problem, G, tol, seed):
    from .geometry import gnorm_dominance_check
    from .plotting import save_modulus_figure
    from .problems import load_problem

    other = load_problem(args.g2)
    G2 = other.operator(args.g2_name)
    samples = int(_params(problem, args, "samples", 25))
    result = gnorm_dominance_check(
        G, G2, tgrid=_parse_grid(args.tgrid), samples=samples, seed=seed, tol=tol
    )
    modulus = result["modulus"]
    figures = [lambda out: save_modulus_figure(modulus, _fig_path(out, "modulus"))]
    return _emit(args, result, figures=figures)


# -- verify-all -------------------------------------------------------------------


def _cmd_verify_all(args) -> int:
    import numpy as np

    from . import spaces as sp
    from .hilbert import hilbert_analyze
    from .indices import index_chain_check, invariance_check
    from .geometry import gnorm_dominance_check
    from .operators import OperatorSpec, identity, normalize
    from .spear import theorem_equiv_check

    seed = args.seed if args.seed is not None else 0
    samples = args.samples if args.samples is not None else 12
    rows = []

    def record(name, ok, detail):
        rows.append({"check": name, "pass": bool(ok), "detail": detail})
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

    # relative-spear equivalence across lp spaces
    rng = np.random.default_rng(seed)
    bad = 0
    total = 0
    for k in range(samples):
        p = [1.0, 2.0, math.inf][k % 3]
        n = 2 + (k % 2)
        space = sp.lp_space(p, n)
        G = normalize(OperatorSpec(rng.standard_normal((n, n)), space, space))
        T = OperatorSpec(rng.standard_normal((n, n)), space, space)
        total += 1
        if not theorem_equiv_check(T, G, tol=1e-6)["consistent"]:
            bad += 1
    record("equivalence", bad == 0, f"{total - bad}/{total} instances consistent")

    # index chain on shared decks
    bad = 0
    for k in range(max(3, samples // 3)):
        p = [1.0, 2.0, math.inf][k % 3]
        space = sp.lp_space(p, 2)
        G = normalize(OperatorSpec(rng.standard_normal((2, 2)), space, space))
        chain = index_chain_check(G, samples=20, seed=seed + k)
        if not (chain["product_ok"] and chain["collapse_ok"]):
            bad += 1
    record("index-chain", bad == 0, f"{bad} violations")

    # isometry invariance
    l1 = sp.lp_space(1, 2)
    P = OperatorSpec([[0.0, 1.0], [1.0, 0.0]], l1, l1)
    Gh = OperatorSpec([[1.0, 0.0], [0.0, 0.0]], l1, l1)
    inv1 = invariance_check(Gh, P, P, samples=8, seed=seed)
    l23 = sp.euclidean(3)
    Q1 = OperatorSpec(np.linalg.qr(rng.standard_normal((3, 3)))[0], l23, l23)
    Q2 = OperatorSpec(np.linalg.qr(rng.standard_normal((3, 3)))[0], l23, l23)
    G3 = normalize(OperatorSpec(rng.standard_normal((3, 3)), l23, l23))
    inv2 = invariance_check(G3, Q1, Q2, samples=8, seed=seed)
    record(
        "invariance",
        inv1["ok"] and inv2["ok"],
        f"max dev {max(inv1['max_gnorm_dev'], inv2['max_gnorm_dev']):.2e}",
    )

    # Hilbert equivalences
    bad = 0
    for k in range(max(3, samples // 3)):
        n = 2 + (k % 3)
        svals = np.concatenate([[1.0], rng.uniform(0.1, 0.95, size=n - 1)])
        G = OperatorSpec(np.diag(svals), sp.euclidean(n), sp.euclidean(n))
        an = hilbert_analyze(G, seed=seed + k)
        if not (an.consistent and all(an.conditions.values())):
            bad += 1
    record("hilbert-mg", bad == 0, f"{bad} inconsistent analyses")

    # dominance modulus
    l22 = sp.euclidean(2)
    Gd = OperatorSpec(np.diag([1.0, 0.5]), l22, l22)
    I2 = identity(l22)
    dom = gnorm_dominance_check(Gd, I2, samples=6, seed=seed)
    dom_fail = gnorm_dominance_check(I2, Gd, samples=6, seed=seed)
    ok = dom["limit_ok"] and dom["dominance_ok"] and not dom_fail["limit_ok"]
    record("dominance", ok, "modulus certifies dominance; converse fails as expected")

    result = {"checks": rows, "passed": all(r["pass"] for r in rows)}
    if args.out:
        from .report import emit_report

        Path(args.out).write_bytes(emit_report(result, args.output or "json"))
    return 0 if result["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
