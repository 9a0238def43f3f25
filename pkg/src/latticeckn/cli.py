"""Command-line interface.

Exit status: 0 on success, 1 on invalid input or a failed check, 2 when an
iteration did not converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import io
from .ckn import KParams, SParams, ckn_quotient, quotient, validate
from .elliptic import ground_state_K, ground_state_S
from .equivalence import CutoffSpec, DecayFit, cutoff_gradient_norm, decay_exponent_fit, write_scan_csv
from .errors import DimensionMismatch, InsufficientSamples, LatticeCknError, NonConvergence, NotConverged, ParameterError
from .extend import QuadratureRule, equivalence_ratios
from .lattice import Box
from .rearrange import SweepConfig, schwarz
from .suites import SUITES, run_suite
from .varmin import BoxRecord, MinimizeResult, SolverConfig, minimize_K, minimize_S

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NONCONVERGED = 2


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


# -- commands --------------------------------------------------------------------


def cmd_rearrange(args) -> int:
    u = io.read_function(args.inp)
    box = Box(u.N, u.radius() if args.L is None else args.L)
    try:
        us = schwarz(u, box, SweepConfig(max_sweeps=args.max_sweeps))
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    io.write_function(args.out, us)
    return EXIT_OK


def cmd_quotient(args) -> int:
    u = io.read_function(args.inp)
    params = io.read_params(args.params)
    if args.raw:
        N = params.pop("N", u.N)
        if N != u.N:
            raise DimensionMismatch(f"parameter N = {N} but the function lives on Z^{u.N}")
        value = ckn_quotient(u, **params)
        _emit({"quotient": value})
    else:
        p = validate(params)
        _emit({"quotient": quotient(u, p), "q_star": p.q_star, "regime": p.regime})
    return EXIT_OK


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        box_radii=tuple(_ints(args.boxes)),
        tol_exhaust=args.tol,
        tol_kkt=args.tol_kkt,
        seed=args.seed,
        init_noise=args.init_noise,
    )


def _minimize_report(command, params, cfg, res: MinimizeResult, gs, out, seconds, timings) -> dict:
    fields = dict(
        seed=cfg.seed,
        solver=cfg.to_dict(),
        per_box=[r.to_dict() for r in res.per_box],
        energy=res.energy,
        converged=res.converged,
        box_converged=res.box_converged,
        ground_state=gs.to_dict() if gs is not None else None,
        output=str(out) if out else None,
    )
    if timings:
        fields["timings"] = {"total_seconds": seconds}
    return io.make_report(command, params.to_dict(), **fields)


def _run_minimize(args, kind: str) -> int:
    if kind == "S":
        params = SParams(N=args.N, p=args.p, q=args.q, b=args.b)
    else:
        params = KParams(N=args.N, p=args.p, r=args.r, q=args.q, theta=args.theta)
    cfg = _solver_config(args)
    t0 = time.perf_counter()
    res = minimize_S(params, cfg) if kind == "S" else minimize_K(params, cfg)
    gs = None
    if res.box_converged:
        gs = ground_state_S(res, params) if kind == "S" else ground_state_K(res, params)
    seconds = time.perf_counter() - t0
    if args.out:
        io.write_function(args.out, res.u)
    rep = _minimize_report(f"minimize-{kind.lower()}", params, cfg, res, gs, args.out, seconds, args.timings)
    if args.report:
        io.write_report(args.report, rep)
    _emit({k: rep[k] for k in ("energy", "converged", "box_converged", "per_box")})
    return EXIT_OK if res.converged and res.box_converged else EXIT_NONCONVERGED


def cmd_minimize_s(args) -> int:
    return _run_minimize(args, "S")


def cmd_minimize_k(args) -> int:
    return _run_minimize(args, "K")


def _resolve(path: str, base: Path) -> Path:
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    return base / p


def cmd_ground_state(args) -> int:
    rep = io.read_report(args.from_)
    kind = {"minimize-s": "S", "minimize-k": "K"}.get(rep["command"])
    if kind is None:
        raise io.FormatError(f"{args.from_}: report of {rep['command']!r} has no minimizer")
    if not rep.get("output"):
        raise io.FormatError(f"{args.from_}: report does not name a minimizer file")
    params = SParams(**rep["parameters"]) if kind == "S" else KParams(**rep["parameters"])
    u = io.read_function(_resolve(rep["output"], Path(args.from_).parent))
    records = [BoxRecord(**r) for r in rep["per_box"]]
    box = Box(params.N, records[-1].L)
    res = MinimizeResult(kind, u, u.to_dense(box), box, rep["energy"], records, rep["converged"], params)
    try:
        gs = ground_state_S(res, params) if kind == "S" else ground_state_K(res, params)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    if args.out:
        io.write_function(args.out, gs.v)
    summary = gs.to_dict()
    code = EXIT_OK
    if args.check:
        passed = gs.residual_rel <= args.tol and gs.symmetric
        summary["check"] = {"tol": args.tol, "passed": passed}
        code = EXIT_OK if passed else EXIT_INVALID
    _emit(summary)
    return code


def cmd_verify(args) -> int:
    names = [s.strip() for s in args.suite.split(",") if s.strip()]
    bad = [s for s in names if s not in SUITES]
    if bad:
        raise ParameterError("Suite", f"unknown suites {bad}; choose from {', '.join(SUITES)}")
    results = []
    for name in names:
        r = run_suite(name, args.trials, args.seed, args.N, args.L)
        results.append(r)
        status = "PASS" if r.ok else "FAIL"
        print(f"{status} {name} N={r.N} L={r.L} trials={r.trials} seed={r.seed} violations={r.violations}")
    if args.report:
        io.write_report(
            args.report,
            io.make_report("verify", {"suite": names, "trials": args.trials, "N": args.N, "L": args.L}, seed=args.seed,
                           results=[r.to_dict() for r in results]),
        )
    return EXIT_OK if all(r.ok for r in results) else EXIT_INVALID


def cmd_cutoff_scan(args) -> int:
    specs = [CutoffSpec(r=args.r, R=R, N=args.N, a=args.a, b=args.b) for R in _floats(args.Rs)]
    norms = [cutoff_gradient_norm(s) for s in specs]
    summary = {"R": [s.R for s in specs], "norm": norms, "predicted_slope": specs[0].predicted_slope}
    try:
        fit = decay_exponent_fit(specs, norms)
    except InsufficientSamples as exc:
        fit = None
        summary["fit"] = f"skipped: {exc}"
    else:
        summary.update(slope=fit.slope, relative_error=fit.relative_error, monotone=fit.monotone)
    if args.csv:
        write_scan_csv(args.csv, fit or DecayFit([s.R for s in specs], norms, float("nan"), specs[0].predicted_slope))
    _emit(summary)
    return EXIT_OK


def cmd_extend_check(args) -> int:
    u = io.read_function(args.inp)
    if u.is_zero():
        raise ParameterError("NonzeroFunction", "extension ratios need a nonzero function")
    base = equivalence_ratios([u], args.p, QuadratureRule(args.quad_order))
    fine = equivalence_ratios([u], args.p, QuadratureRule(2 * args.quad_order))
    _emit(
        {
            "p": args.p,
            "quad_order": args.quad_order,
            "lp_ratio": base.lp[0],
            "grad_ratio": base.grad[0],
            "lp_change_on_doubling": abs(fine.lp[0] - base.lp[0]),
            "grad_change_on_doubling": abs(fine.grad[0] - base.grad[0]),
        }
    )
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def _add_solver_flags(sp):
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--boxes", default="8,16,24", help="comma-separated box radii")
    sp.add_argument("--tol", type=float, default=1e-3, help="exhaustion tolerance")
    sp.add_argument("--tol-kkt", type=float, default=1e-9)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--init-noise", type=float, default=0.0)
    sp.add_argument("--out", help="write the minimizer here")
    sp.add_argument("--report", help="write the run report here")
    sp.add_argument("--timings", action="store_true", help="include wall-clock times in the report")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="latticeckn", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("rearrange", help="Schwarz rearrangement of a function document")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--L", type=int)
    sp.add_argument("--max-sweeps", type=int)
    sp.set_defaults(func=cmd_rearrange)

    sp = sub.add_parser("quotient", help="CKN quotient of a function")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--params", required=True)
    sp.add_argument("--raw", action="store_true", help="skip parameter validation")
    sp.set_defaults(func=cmd_quotient)

    sp = sub.add_parser("minimize-s", help="approximate the Sobolev/Hardy constant S")
    _add_solver_flags(sp)
    sp.add_argument("--b", type=float, default=0.0)
    sp.set_defaults(func=cmd_minimize_s)

    sp = sub.add_parser("minimize-k", help="approximate the Gagliardo-Nirenberg constant K")
    _add_solver_flags(sp)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.set_defaults(func=cmd_minimize_k)

    sp = sub.add_parser("ground-state", help="scale a reported minimizer into a ground state")
    sp.add_argument("--from", dest="from_", required=True)
    sp.add_argument("--check", action="store_true")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_ground_state)

    sp = sub.add_parser("verify", help="randomized rearrangement property suites")
    sp.add_argument("--suite", default=",".join(SUITES))
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--L", type=int, default=8)
    sp.add_argument("--report")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("cutoff-scan", help="gradient norms of logarithmic cutoffs")
    sp.add_argument("--N", type=int, default=2)
    sp.add_argument("--a", type=float, default=0.0)
    sp.add_argument("--b", type=float, default=0.0)
    sp.add_argument("--r", type=float, default=10.0)
    sp.add_argument("--Rs", default="100,316.2,1000,3162,10000")
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_cutoff_scan)

    sp = sub.add_parser("extend-check", help="continuum extension norm ratios")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--quad-order", type=int, default=4)
    sp.set_defaults(func=cmd_extend_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LatticeCknError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
