"""Acceptance criteria, one test per criterion.

Each test records a single ``PASS``/``FAIL`` line (shown with ``-s`` and in
the terminal summary) and then asserts the criterion at its stated
tolerance.
"""

import contextlib
import hashlib
import math
import os
import time

import numpy as np
import pytest

from latticeckn.cli import main
from latticeckn.ckn import KParams, SParams
from latticeckn.elliptic import Forcing, el_residual, ground_state_K, ground_state_S
from latticeckn.equivalence import CutoffSpec, decay_exponent_fit
from latticeckn.extend import QuadratureRule, equivalence_ratios, extension_grad_lp_norm, extension_lp_norm
from latticeckn.funcspace import LatticeFunction, dense_energy
from latticeckn.io import read_function, read_report
from latticeckn.lattice import Box
from latticeckn.rearrange import is_schwarz_symmetric_dense
from latticeckn.suites import run_suite
from latticeckn.varmin import BoxRecord, MinimizeResult, SProblem, SolverConfig, minimize_K, minimize_S

SIZES = ((1, 32), (2, 12), (3, 6))
S_ARGS = ["minimize-s", "--N", "3", "--p", "2", "--q", "7", "--boxes", "8,16,24", "--seed", "0"]
K_ARGS = ["minimize-k", "--N", "2", "--p", "2", "--r", "2", "--theta", "0.5", "--q", "6", "--seed", "0"]


@contextlib.contextmanager
def _cwd(path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


def _cli_run(d, args) -> dict:
    """Run a minimize command inside ``d`` with relative output paths, so
    reports from different directories are comparable byte for byte."""
    t0 = time.perf_counter()
    with _cwd(d):
        code = main(args + ["--out", "u.json", "--report", "report.json"])
    return {"dir": d, "code": code, "seconds": time.perf_counter() - t0, "report": read_report(d / "report.json")}


def _suite_criterion(criterion, n, suites, trials, limit, label):
    t0 = time.perf_counter()
    results = [run_suite(s, trials, 1000 + k, N, L) for s in suites for k, (N, L) in enumerate(SIZES)]
    seconds = time.perf_counter() - t0
    violations = sum(r.violations for r in results)
    worst = max(r.worst for r in results)
    ok = violations == 0 and seconds < limit
    criterion(n, ok, f"{label}: {violations} violations, worst excess {worst:.3g}, {seconds:.1f}s")
    assert violations == 0
    assert seconds < limit


def test_criterion_01_hardy_littlewood(criterion):
    _suite_criterion(criterion, 1, ["hl"], 200, 60, "Hardy-Littlewood, 200 pairs per size")


def test_criterion_02_polya_szego(criterion):
    _suite_criterion(criterion, 2, ["ps"], 200, 120, "Polya-Szego p in {1, 1.5, 2, 3}, 200 per size")


def test_criterion_03_equimeasurability_idempotence(criterion):
    _suite_criterion(criterion, 3, ["equimeasure", "idempotence"], 500, math.inf, "one-step profiles and idempotence, 500 per size")


def test_criterion_04_weighted_monotonicity(criterion):
    _suite_criterion(criterion, 4, ["weighted"], 200, math.inf, "b in {-1, -1/2, 0}, q in {2, 4}, 200 per size")


def test_criterion_05_gradient(criterion):
    rng = np.random.default_rng(5)
    box = Box(4, 2)
    worst = {}
    for p, tol in ((2.0, 1e-6), (3.0, 1e-6), (1.5, 1e-4)):
        problem = SProblem(SParams(N=4, p=p, q=4 * p / (4 - p) + 1), box)
        errs = []
        for _ in range(20):
            u = rng.uniform(0.5, 1.5, box.shape)
            g = problem.gradient(u)
            idx = tuple(rng.integers(0, box.side, size=box.N))
            h = 1e-4
            up, dn = u.copy(), u.copy()
            up[idx] += h
            dn[idx] -= h
            fd = (dense_energy(up, p) - dense_energy(dn, p)) / (2 * h)
            errs.append(abs(fd - g[idx]) / abs(g[idx]))
        worst[p] = (max(errs), tol)
    ok = all(e <= t for e, t in worst.values())
    criterion(5, ok, "central differences, 20 points each: " + ", ".join(f"p={p:g} rel {e:.2g} (<= {t:g})" for p, (e, t) in worst.items()))
    for e, t in worst.values():
        assert e <= t


@pytest.fixture(scope="module")
def s_run(tmp_path_factory):
    return _cli_run(tmp_path_factory.mktemp("s_run"), S_ARGS)


def test_criterion_06_minimizer_existence(criterion, s_run):
    rep = s_run["report"]
    energies = [b["energy"] for b in rep["per_box"]]
    rel_change = abs(energies[-1] - energies[-2]) / energies[-1]
    u = read_function(s_run["dir"] / "u.json")
    box = Box(3, rep["per_box"][-1]["L"])
    arr = u.to_dense(box)
    checks = {
        "non-increasing": all(b <= a for a, b in zip(energies, energies[1:])),
        "final relative change <= 1e-3": rel_change <= 1e-3,
        "energy <= 12": energies[-1] <= 12.0,
        "Schwarz symmetric": is_schwarz_symmetric_dense(arr, box),
        "nonnegative": bool(np.all(arr >= 0)),
        "runtime < 10 min": s_run["seconds"] < 600,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (
        f"energies {', '.join(f'{e:.6f}' for e in energies)} on L=8,16,24; "
        f"final relative change {rel_change:.2e}; {s_run['seconds']:.0f}s"
    )
    if failed:
        detail += "; failed: " + "; ".join(failed)
    criterion(6, not failed, detail)
    assert not failed, failed


def test_criterion_07_ground_state(criterion, s_run):
    rep = s_run["report"]
    gs = rep["ground_state"]
    assert gs is not None, "last box did not reach stationarity"
    u = read_function(s_run["dir"] / "u.json")
    box = Box(3, rep["per_box"][-1]["L"])
    records = [BoxRecord(**r) for r in rep["per_box"]]
    result = MinimizeResult("S", u, u.to_dense(box), box, rep["energy"], records, rep["converged"], SParams(N=3, p=2, q=7))
    g = ground_state_S(result, SParams(N=3, p=2, q=7))
    forcing = Forcing(p=2, q=7)
    off = {f: el_residual(LatticeFunction.from_dense(f * g.v_dense, box), forcing, box).rel for f in (2.0, 0.5)}
    ok = g.residual_rel <= 1e-6 and all(r > 1e-6 for r in off.values()) and g.residual_rel == gs["residual_rel"]
    criterion(7, ok, f"residual_rel {g.residual_rel:.2e} at t={g.scale:.6f}; at 2t {off[2.0]:.3g}, at t/2 {off[0.5]:.3g}")
    assert g.residual_rel <= 1e-6
    assert all(r > 1e-6 for r in off.values())


@pytest.fixture(scope="module")
def k_run(tmp_path_factory):
    return _cli_run(tmp_path_factory.mktemp("k_run"), K_ARGS)


def test_criterion_08_k_ground_state_and_degeneration(criterion, k_run):
    gs = k_run["report"]["ground_state"]
    assert gs is not None, "last box did not reach stationarity"
    kp = KParams(N=3, p=2, r=2, q=7, theta=1.0)
    sp = SParams(N=3, p=2, q=7)
    cfg = SolverConfig(box_radii=(4, 6), tol_exhaust=1.0)
    rk, rs = minimize_K(kp, cfg), minimize_S(sp, cfg)
    gk, gsS = ground_state_K(rk, kp), ground_state_S(rs, sp)
    energy_gap = abs(rk.energy**2 - rs.energy) / rs.energy
    residual_gap = abs(gk.residual_rel - gsS.residual_rel)
    ok = gs["residual_rel"] <= 1e-6 and energy_gap <= 1e-8 and residual_gap <= 1e-8
    criterion(
        8,
        ok,
        f"K (N=2, p=2, r=2, theta=1/2, q=6) residual_rel {gs['residual_rel']:.2e}, "
        f"lambda1 {gs['lambda1']:.4f}, lambda2 {gs['lambda2']:.4f}; theta=1 vs S: "
        f"energy gap {energy_gap:.1e}, residual gap {residual_gap:.1e}",
    )
    assert gs["residual_rel"] <= 1e-6
    assert energy_gap <= 1e-8 and residual_gap <= 1e-8


def test_criterion_09_extension_equivalence(criterion):
    hat = LatticeFunction.delta(1)
    hat_err = max(
        abs(extension_lp_norm(hat, 2) - math.sqrt(2 / 3)),
        abs(extension_grad_lp_norm(hat, 2) - math.sqrt(2)),
    )
    rng = np.random.default_rng(9)
    box = Box(2, 3)
    sample = []
    for _ in range(100):
        arr = np.where(rng.random(box.shape) < 0.6, rng.uniform(-1, 1, box.shape), 0.0)
        arr[box.index((0, 0))] = 1.0
        sample.append(LatticeFunction.from_dense(arr, box))
    base = equivalence_ratios(sample, 2, QuadratureRule(4))
    fine = equivalence_ratios(sample, 2, QuadratureRule(8))
    spread = max(base.lp_max / base.lp_min, base.grad_max / base.grad_min)
    change = max(np.max(np.abs(np.subtract(fine.lp, base.lp))), np.max(np.abs(np.subtract(fine.grad, base.grad))))
    ok = hat_err <= 1e-10 and spread < 10 and change < 1e-10
    criterion(9, ok, f"hat error {hat_err:.1e}; max/min ratio {spread:.3f} over 100 functions; doubling change {change:.1e}")
    assert hat_err <= 1e-10
    assert spread < 10
    assert change < 1e-10


def test_criterion_10_cutoff_decay(criterion):
    specs = [CutoffSpec(r=10, R=R, N=2) for R in (100, 316.2, 1000, 3162, 10000)]
    fit = decay_exponent_fit(specs)
    ok = fit.relative_error <= 0.15 and fit.monotone
    criterion(10, ok, f"slope {fit.slope:.4f} vs {fit.predicted:g} (rel {fit.relative_error:.3f}); norms {', '.join(f'{n:.4f}' for n in fit.norms)}")
    assert fit.relative_error <= 0.15
    assert fit.monotone


def _digest(path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_criterion_11_determinism(criterion, s_run, k_run, tmp_path):
    same = {}
    for name, args, first in (("S", S_ARGS, s_run), ("K", K_ARGS, k_run)):
        d = tmp_path / name
        d.mkdir()
        _cli_run(d, args)
        same[name] = all(_digest(first["dir"] / f) == _digest(d / f) for f in ("report.json", "u.json"))
    ok = all(same.values())
    criterion(11, ok, "repeated runs of criteria 6-8: " + ", ".join(f"{k} {'bit-identical' if v else 'differs'}" for k, v in same.items()))
    assert ok
