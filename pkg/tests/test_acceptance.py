"""Acceptance checks, one test per criterion.

Each check prints a single ``PASS``/``FAIL`` line with its measured numbers
before asserting, so ``pytest -v`` output doubles as the acceptance report.
Run this file directly (``python tests/test_acceptance.py``) for the lines
alone.
"""

import sys
import time

import numpy as np
import pytest
import scipy.linalg as la

from poddmd import numkit
from poddmd.bench.harness import relative_frobenius_error, run_cell
from poddmd.deim import deim_apply, deim_error_bound, deim_from_snapshots
from poddmd.dmd import dmd_from_snapshots, dmd_predict_series
from poddmd.pdelab import (
    build_advection1d,
    build_burgers1d,
    build_nls1d,
    build_param_function,
    build_parabolic2d,
    integrate_full,
    interpolate_param_deim,
    interpolate_param_dmd,
    param_function,
)
from poddmd.pod import compute_pod_basis
from poddmd.rom import DmdClosure, galerkin_reduce, integrate_reduced, reconstruct_full

RANKS_PARABOLIC = (5, 10, 15, 20)


def report(number, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail}"
    print(line, flush=True)
    return ok


_cache = {}


def solved(name):
    """Full-order solutions shared across checks."""
    if name not in _cache:
        builders = {
            "advection": build_advection1d,
            "parabolic": build_parabolic2d,
            "parabolic-1e4": lambda: build_parabolic2d(nx=100),
            "parabolic-2x": lambda: build_parabolic2d(nx=71),
            "burgers": build_burgers1d,
            "nls": build_nls1d,
        }
        p = builders[name]()
        _cache[name] = (p, integrate_full(p))
    return _cache[name]


def check_pod_error_identity():
    start = time.perf_counter()
    _, full = solved("advection")
    Y = full.states.states
    sigma = np.linalg.svd(Y, compute_uv=False)
    total = np.sum(sigma**2)
    worst = 0.0
    for ell in (5, 10, 15):
        modes = compute_pod_basis(full.states, ell).modes
        lhs = np.sum(np.abs(Y - modes @ (modes.T @ Y)) ** 2)
        worst = max(worst, abs(lhs - np.sum(sigma[ell:] ** 2)) / total)
    secs = time.perf_counter() - start
    ok = worst <= 1e-8 and secs < 10
    return report(1, "POD error identity", ok, f"max gap {worst:.2e} (<=1e-8), {secs:.2f}s (<10s)")


def check_deim_properties(seed=1):
    rng = np.random.default_rng(seed)
    _, full = solved("parabolic")
    F = full.nonlinearity.states
    interp = span = 0.0
    violations = trials = 0
    for selector in ("lu", "qr"):
        for k in (5, 10, 20):
            op = deim_from_snapshots(F, k, selector)
            f = rng.standard_normal(op.n)
            interp = max(interp, np.abs(deim_apply(op, f[op.indices]) - f)[op.indices].max())
            g = op.nonlinearity_modes @ rng.standard_normal(k)
            span = max(span, np.linalg.norm(deim_apply(op, g[op.indices]) - g) / np.linalg.norm(g))
            for _ in range(1000):
                actual, bound = deim_error_bound(op, rng.standard_normal(op.n))
                violations += actual > bound
                trials += 1
    ok = interp <= 1e-10 and span <= 1e-10 and violations == 0
    return report(2, "DEIM properties", ok,
                  f"interp {interp:.1e}, in-span {span:.1e}, "
                  f"bound violations {violations}/{trials}")


def check_dmd_exact_recovery(seed=2):
    rng = np.random.default_rng(seed)
    start = time.perf_counter()
    dt, steps = 0.1, 50
    ev = np.array([-0.05, -0.2 + 1.5j, -0.2 - 1.5j, -0.5 + 0.7j, -0.5 - 0.7j])
    blocks = [np.array([[ev[0].real]])] + [
        np.array([[l.real, l.imag], [-l.imag, l.real]]) for l in ev[1::2]
    ]
    T = rng.standard_normal((5, 5))
    G = T @ la.block_diag(*blocks) @ np.linalg.inv(T)
    Phi = la.expm(dt * G)
    X = np.empty((5, steps + 1))
    X[:, 0] = rng.standard_normal(5)
    for j in range(steps):
        X[:, j + 1] = Phi @ X[:, j]
    model = dmd_from_snapshots(X, dt, 5)
    generator = np.linalg.eigvals(G)
    freq_err = max(np.min(np.abs(model.frequencies - g)) for g in generator)
    rec = dmd_predict_series(model, dt * np.arange(steps + 1))
    rec_err = relative_frobenius_error(rec, X)
    secs = time.perf_counter() - start
    ok = freq_err <= 1e-8 and rec_err <= 1e-8 and secs < 1
    return report(3, "DMD exact recovery", ok,
                  f"omega err {freq_err:.1e}, reconstruction {rec_err:.1e}, {secs:.3f}s")


def check_realness():
    worst = 0.0
    for name in ("advection", "parabolic", "burgers"):
        p, full = solved(name)
        for S in (full.states, full.nonlinearity):
            if not np.any(S.states):
                continue  # advection has no nonlinear term
            for k in (5, 10, 20):
                rec = dmd_predict_series(dmd_from_snapshots(S.states, p.dt, k), S.times)
                worst = max(worst, np.abs(rec.imag).max() / np.abs(rec.real).max())
        if np.any(full.nonlinearity.states):
            basis = compute_pod_basis(full.states, 10)
            model = dmd_from_snapshots(full.nonlinearity.states, p.dt, 10)
            cl = DmdClosure(basis, model)
            proj = cl.weighted @ np.exp(np.multiply.outer(cl.omega, p.times))
            worst = max(worst, cl.imag_residue(p.times) / np.abs(proj.real).max())
    return report(4, "DMD realness on real data", worst <= 1e-8,
                  f"max |imag| / max |real| = {worst:.1e} (<=1e-8)")


def check_linear_rom_exact():
    p, full = solved("advection")
    Y = full.states.states
    d = numkit.numerical_rank(np.linalg.svd(Y, compute_uv=False), Y.shape)
    basis = compute_pod_basis(full.states, d)
    traj = integrate_reduced(galerkin_reduce(None, p.linear, basis, p.y0), None, p.dt, p.steps)
    err = relative_frobenius_error(reconstruct_full(basis, traj), Y)
    return report(5, "linear ROM exactness", err <= 1e-8, f"ell={d}, rel err {err:.1e}")


def _parabolic_sweep():
    if "parabolic-sweep" not in _cache:
        p, full = solved("parabolic")
        _cache["parabolic-sweep"] = {
            (m, r): run_cell(p, full, m, r, r)
            for m in ("pod", "pod-deim-lu", "pod-dmd") for r in RANKS_PARABOLIC
        }
    return _cache["parabolic-sweep"]


def check_parabolic_ordering():
    start = time.perf_counter()
    rows = _parabolic_sweep()
    err = {key: row.rel_frobenius_error for key, row in rows.items()}
    order = all(
        err["pod", r] <= err["pod-deim-lu", r] and err["pod", r] <= err["pod-dmd", r]
        for r in RANKS_PARABOLIC
    )
    decrease = err["pod", 20] < err["pod", 5]
    secs = time.perf_counter() - start
    ok = order and decrease and secs < 300
    detail = ", ".join(
        f"r={r}: {err['pod', r]:.1e}/{err['pod-deim-lu', r]:.1e}/{err['pod-dmd', r]:.1e}"
        for r in RANKS_PARABOLIC
    )
    return report(6, "parabolic2d error ordering (POD/DEIM/DMD)", ok, f"{detail}, {secs:.1f}s")


def check_eval_counts():
    rows = list(_parabolic_sweep().values())
    for name in ("burgers", "nls"):
        p, full = solved(name)
        rows += [run_cell(p, full, m, 10, 10) for m in ("pod", "pod-deim-lu", "pod-dmd")]
    steps = {"parabolic2d": solved("parabolic")[0].steps, "burgers": solved("burgers")[0].steps,
             "nls": solved("nls")[0].steps}
    bad = []
    for r in rows:
        n = steps[r.problem]
        expected = {"pod": n, "pod-deim-lu": r.k * n, "pod-dmd": 0}[r.method]
        if r.nonlinearity_eval_count != expected:
            bad.append(f"{r.problem}/{r.method}/{r.k}: {r.nonlinearity_eval_count}!={expected}")
    return report(7, "online nonlinearity evaluation counts", not bad,
                  f"{len(rows)} runs, mismatches: {bad or 'none'}")


def check_online_ordering(repeats=7):
    p, full = solved("parabolic-1e4")
    t = {m: run_cell(p, full, m, 20, 20, repeats).online_seconds
         for m in ("pod", "pod-deim-lu", "pod-dmd")}
    ok = t["pod-dmd"] < t["pod-deim-lu"] and t["pod-dmd"] < t["pod"]
    return report(8, "online time ordering at n=1e4", ok,
                  f"median of {repeats}: DMD {t['pod-dmd']:.2e}s, "
                  f"DEIM {t['pod-deim-lu']:.2e}s, POD {t['pod']:.2e}s (hardware dependent)")


def check_param_interpolation():
    pset = build_param_function()
    notes, ok = [], True
    for mu in (1.17, 3.1):
        exact = param_function(pset.grid, mu)
        e_dmd = np.array([relative_frobenius_error(interpolate_param_dmd(pset, mu, r), exact)
                          for r in range(1, 11)])
        e_deim = np.array([relative_frobenius_error(interpolate_param_deim(pset, mu, r), exact)
                           for r in range(1, 11)])
        ratio = np.maximum(e_dmd / e_deim, e_deim / e_dmd)
        within = ratio.max() <= 3
        decrease = e_dmd[-1] < e_dmd[0] and e_deim[-1] < e_deim[0]
        ok &= bool(within and decrease)
        worst = int(np.argmax(ratio)) + 1
        notes.append(f"mu={mu}: max ratio {ratio.max():.2f} at rank {worst}, "
                     f"rank 1->10 dmd {e_dmd[0]:.1e}->{e_dmd[-1]:.1e}, "
                     f"deim {e_deim[0]:.1e}->{e_deim[-1]:.1e}")
    return report(9, "paramfn DMD vs DEIM interpolation", ok, "; ".join(notes))


def check_stationarity():
    p, full = solved("parabolic")
    y = full.states.states[:, -1]
    dist = np.abs(y - 1).max()
    x1, x2 = p.grid["x1"], p.grid["x2"]
    wall = np.minimum.reduce([x1, x2, 1 - x1, 1 - x2])
    inner = np.abs(y[wall >= 0.1] - 1).max()
    return report(10, "parabolic2d stationarity at T=3", dist <= 0.05,
                  f"max|y-1| = {dist:.3f} (<=0.05); max|y| = {np.abs(y).max():.6f}; "
                  f"max|y-1| at distance>=0.1 from the walls = {inner:.3f}")


def check_scaling(repeats=5):
    times = {}
    for name in ("parabolic", "parabolic-2x"):
        p, full = solved(name)
        run_cell(p, full, "pod-dmd", 20, 20)  # warm-up
        times[p.n] = run_cell(p, full, "pod-dmd", 20, 20, repeats).online_seconds
    (n1, t1), (n2, t2) = sorted(times.items())
    change = abs(t2 - t1) / t1
    return report(11, "DMD online time vs n", change < 0.2,
                  f"n={n1}: {t1:.2e}s, n={n2}: {t2:.2e}s, change {100 * change:.1f}% (<20%)")


CHECKS = [
    check_pod_error_identity,
    check_deim_properties,
    check_dmd_exact_recovery,
    check_realness,
    check_linear_rom_exact,
    check_parabolic_ordering,
    check_eval_counts,
    check_online_ordering,
    check_param_interpolation,
    check_stationarity,
    check_scaling,
]


@pytest.mark.slow
@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__[6:] for c in CHECKS])
def test_acceptance(check, capsys):
    with capsys.disabled():
        print()
        ok = check()
    assert ok


if __name__ == "__main__":
    results = [check() for check in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
