"""Command-line interface.

Exit codes: 0 success, 2 precondition violation, 3 invariant violation
(a counterexample was found).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from . import inequalities as ineq
from .conformal import as_point, nonconstant_scalar_witness, transform_ricci_scalar
from .curvature import decompose
from .errors import CRKitError, DomainError, InvariantViolation
from .heisenberg import GridSpec, catalogue_function, gaussian_quotient, minimize_gaussian, richardson_order
from .rigidity import THEOREMS, ManifoldSummary, best_sigma, evaluate, threshold
from .sampling import GENERATORS, INFORMATIONAL, SampleConfig, default_plan, run_plan
from .tensor import HermitianMatrix, from_json_dict, to_json_dict

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_INVARIANT = 3


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"cannot serialise {type(o).__name__}")


def _finite(x: float):
    return x if math.isfinite(x) else str(x)


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read JSON from {path}: {exc}") from exc


# -- subcommands -------------------------------------------------------------------

def cmd_decompose(args, out) -> int:
    r = from_json_dict(_read_json(args.input))
    d = decompose(r)
    _emit(
        {
            "kind": "decomposition",
            "n": d.n,
            "scalar": d.scalar,
            "chern_moser": to_json_dict(d.chern_moser),
            "traceless_ricci": to_json_dict(d.traceless_ricci),
            "ricci": to_json_dict(HermitianMatrix(d.ricci)),
        },
        out,
    )
    return EXIT_OK


def cmd_verify(args, out) -> int:
    cfg = SampleConfig(args.n, args.count, args.seed, args.threshold, args.start)
    gen = GENERATORS[args.inequality]
    tol = ineq.TOL_KATO_C if args.inequality.startswith("kato_C") else ineq.TOL
    bad = 0
    for i in range(cfg.start, cfg.start + cfg.count):
        rec = gen(cfg.n, cfg.seed, i)
        doc = rec.to_dict()
        doc.update({"kind": "slack", "inequality": args.inequality, "n": cfg.n, "seed": cfg.seed, "index": i})
        doc["violated"] = rec.violated(tol)
        bad += doc["violated"]
        _emit(doc, out)
    return EXIT_INVARIANT if bad and args.inequality not in INFORMATIONAL else EXIT_OK


def cmd_sample(args, out) -> int:
    if args.inequality == "all":
        plan = default_plan()
    else:
        plan = [p for p in default_plan() if p[0] == args.inequality]
        if args.n is not None:
            plan = [p for p in plan if p[1] == args.n] or [(args.inequality, args.n, 1000)]
    if args.count is not None:
        plan = [(name, n, args.count) for name, n, _ in plan]
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    summaries = run_plan(plan, seeds, args.threshold, args.workers, args.max_witnesses)
    failed = False
    for s in summaries:
        for w in s.witnesses:
            _emit(w, out)
        doc = s.to_dict()
        doc["min_slack_ratio"] = _finite(doc["min_slack_ratio"])
        _emit(doc, out)
        failed |= s.violations > 0 and not s.informational
    return EXIT_INVARIANT if failed else EXIT_OK


def cmd_conformal(args, out) -> int:
    points = json.loads(args.points) if args.points else [[0.0] * args.n, [1.0] + [0.0] * (args.n - 1)]
    u = catalogue_function(args.u, args.n)
    pts = [as_point(p) for p in points]
    for p in pts:
        if p.n != args.n:
            raise DomainError(f"point {p.z} does not have {args.n} complex coordinates")
        doc = transform_ricci_scalar(u, p).to_dict()
        doc["kind"] = "conformal-point"
        doc["u"] = args.u
        _emit(doc, out)
    if len({round(sum(abs(v) ** 2 for v in p.z), 12) for p in pts}) >= 2:
        _emit(nonconstant_scalar_witness(pts, args.n, u).to_dict(), out)
    return EXIT_OK


def cmd_thresholds(args, out) -> int:
    names = sorted(THEOREMS) if args.theorem == "all" else [args.theorem]
    for name in names:
        info = THEOREMS[name]
        if args.n < info.n_floor:
            if args.theorem == "all":
                continue
        sigma = args.sigma
        if info.uses_sigma and sigma is None:
            sigma, _ = best_sigma(name, args.n)
        try:
            thr = threshold(name, args.n, sigma)
        except DomainError:
            if args.theorem == "all":
                continue
            raise
        _emit({"kind": "threshold", "theorem": name, "n": thr.n, "sigma": thr.sigma, "coefficient": thr.coefficient, "multiplier": thr.multiplier}, out)
    return EXIT_OK


def cmd_evaluate(args, out) -> int:
    summary = ManifoldSummary.from_dict(_read_json(args.summary))
    for rep in evaluate(summary):
        _emit(rep.to_dict(), out)
    return EXIT_OK


def cmd_yamabe(args, out) -> int:
    if args.family != "gaussian":
        raise DomainError("only the gaussian family is available")
    half_z, half_t = args.box
    grid = GridSpec.box(args.n, args.grid, half_z, half_t)
    best = minimize_gaussian(grid, args.rho)
    finer = [grid, grid.refine(), grid.refine().refine()]
    values = [gaussian_quotient(g, best.a, best.b, args.rho) for g in finer]
    _emit(
        {
            "kind": "yamabe-estimate",
            "quotient": best.quotient,
            "params": {"a": best.a, "b": best.b, "interior": best.interior, "evaluations": best.evaluations},
            "grid": {"n": args.n, "samples": args.grid, "box": [half_z, half_t]},
            "refinements": [{"samples": g.shape[0], "quotient": v} for g, v in zip(finer, values)],
            "order_estimate": _finite(richardson_order(values)),
        },
        out,
    )
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crkit", description="Pseudo-Hermitian curvature toolkit")
    p.add_argument("--version", action="version", version=f"crkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("decompose", help="split a Webster tensor into Chern-Moser, Ricci and scalar parts")
    d.add_argument("--input", default="-", help="tensor JSON file (default stdin)")
    d.set_defaults(func=cmd_decompose)

    v = sub.add_parser("verify", help="evaluate one inequality on generated samples")
    v.add_argument("--inequality", required=True, choices=sorted(GENERATORS))
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--count", type=int, default=10)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--start", type=int, default=0, help="first sample index")
    v.add_argument("--threshold", type=float, default=ineq.NEAR_EQUALITY)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="randomised search over the sampling plan")
    s.add_argument("--inequality", default="all", choices=["all", *sorted(GENERATORS)])
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--count", type=int, default=None, help="samples per plan entry (default: plan totals)")
    s.add_argument("--seeds", type=int, default=100, help="number of seeds")
    s.add_argument("--seed-start", type=int, default=0)
    s.add_argument("--threshold", type=float, default=ineq.NEAR_EQUALITY)
    s.add_argument("--max-witnesses", type=int, default=20)
    s.add_argument("--workers", type=int, default=None, help="overrides CRKIT_WORKERS")
    s.set_defaults(func=cmd_sample)

    c = sub.add_parser("conformal-example", help="transformed torsion and curvature for a conformal factor")
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--points", default=None, help='JSON list of z vectors or {"z":..., "t":...} objects')
    c.add_argument("--u", default="abs_z2", help="catalogue id of the conformal factor")
    c.set_defaults(func=cmd_conformal)

    t = sub.add_parser("thresholds", help="pinching coefficients")
    t.add_argument("--theorem", default="all", choices=["all", *THEOREMS])
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--sigma", type=float, default=None, help="decay exponent (default: best admissible)")
    t.set_defaults(func=cmd_thresholds)

    e = sub.add_parser("evaluate", help="check theorem hypotheses against a manifold summary")
    e.add_argument("--summary", required=True, help="summary JSON file")
    e.set_defaults(func=cmd_evaluate)

    y = sub.add_parser("yamabe-estimate", help="upper bound for the CR Yamabe constant of H^n")
    y.add_argument("--n", type=int, default=1)
    y.add_argument("--grid", type=int, default=129, help="samples per axis")
    y.add_argument("--box", type=float, nargs=2, default=(5.0, 7.0), metavar=("Z", "T"), help="half-widths")
    y.add_argument("--family", default="gaussian")
    y.add_argument("--rho", type=float, default=0.0)
    y.set_defaults(func=cmd_yamabe)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except InvariantViolation as exc:
        print(f"crkit: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (CRKitError, ValueError, KeyError) as exc:
        print(f"crkit: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
