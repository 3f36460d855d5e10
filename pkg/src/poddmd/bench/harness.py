"""Method x rank sweeps against a shared full-order reference."""

import json
import logging
import statistics
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from ..deim import deim_from_snapshots
from ..dmd import dmd_predict_series, exact_dmd, fit_amplitudes, orthonormalize_modes
from ..errors import PodDmdError
from ..pdelab import (
    build_param_function,
    build_preset,
    integrate_full,
    interpolate_param_deim,
    interpolate_param_dmd,
    param_function,
)
from ..pod import PodBasis, compute_pod_basis
from ..rom import (
    DeimClosure,
    DmdClosure,
    FullLiftClosure,
    galerkin_reduce,
    integrate_reduced,
    reconstruct_full,
)

log = logging.getLogger(__name__)

__all__ = [
    "METHODS",
    "INTERP_METHODS",
    "ExperimentConfig",
    "ResultRow",
    "relative_frobenius_error",
    "run_experiment",
    "run_cell",
]

METHODS = ("pod", "pod-deim-lu", "pod-deim-qr", "pod-dmd", "dmd-free", "dmd-galerkin")
INTERP_METHODS = ("dmd-interp", "deim-interp")
# methods whose result does not depend on the closure rank k
_K_FREE = {"pod", "dmd-free", "dmd-galerkin"}


@dataclass
class ExperimentConfig:
    problem: str = "parabolic2d"
    overrides: dict = field(default_factory=dict)
    methods: list = field(default_factory=lambda: ["pod", "pod-deim-lu", "pod-dmd"])
    pod_ranks: list = field(default_factory=lambda: [5, 10, 15, 20])
    closure_ranks: list = field(default_factory=lambda: [5, 10, 15, 20])
    paired: bool = False
    repeats: int = 3
    seed: int = 0
    output_dir: str = "results"

    def __post_init__(self):
        if not self.methods or not self.pod_ranks or not self.closure_ranks:
            raise ValueError("methods and rank lists must be nonempty")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        known = INTERP_METHODS if self.problem == "paramfn" else METHODS
        bad = [m for m in self.methods if m not in known]
        if bad:
            raise ValueError(f"unknown methods {bad} for problem {self.problem!r}")
        if self.paired and len(self.pod_ranks) != len(self.closure_ranks):
            raise ValueError("paired sweeps need rank lists of equal length")

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            data = json.load(fh)
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def cells(self):
        if self.paired:
            pairs = list(zip(self.pod_ranks, self.closure_ranks))
        else:
            pairs = [(l, k) for l in self.pod_ranks for k in self.closure_ranks]
        return [(m, l, k) for m in self.methods for (l, k) in pairs]


@dataclass
class ResultRow:
    problem: str
    method: str
    ell: int
    k: int
    offline_seconds: float = float("nan")
    online_seconds: float = float("nan")
    nonlinearity_eval_count: int = -1
    rel_frobenius_error: float = float("nan")
    max_imag_residue: float = 0.0
    status: str = "ok"

    def sort_key(self):
        return (self.problem, self.method, self.ell, self.k)


def relative_frobenius_error(approx, reference):
    """``||approx - reference||_F / ||reference||_F``."""
    approx = np.asarray(approx)
    reference = np.asarray(reference)
    if approx.shape != reference.shape:
        raise ValueError(f"shape mismatch {approx.shape} vs {reference.shape}")
    ref = np.linalg.norm(reference)
    if ref == 0:
        raise ZeroDivisionError("reference trajectory is zero")
    return float(np.linalg.norm(approx - reference) / ref)


def _median_run(fn, repeats):
    times, out = [], None
    for _ in range(repeats):
        out = fn()
        times.append(out[1])
    return out[0], statistics.median(times)


def run_cell(problem, full, method, ell, k, repeats=1):
    """One (method, ell, k) cell against the precomputed full solution."""
    Y = full.states.states
    F = full.nonlinearity.states
    times = full.states.times
    dt, steps = problem.dt, problem.steps
    row = ResultRow(problem.name, method, ell, k)

    t0 = time.perf_counter()
    if method in ("pod", "pod-deim-lu", "pod-deim-qr", "pod-dmd"):
        basis = compute_pod_basis(Y, ell)
    if method == "pod":
        make_closure = lambda: FullLiftClosure(basis, problem.nonlinearity)
    elif method.startswith("pod-deim"):
        op = deim_from_snapshots(F, k, selector=method.rsplit("-", 1)[1])
        make_closure = lambda: DeimClosure(basis, op, problem.nonlinearity)
    elif method == "pod-dmd":
        model = exact_dmd(F[:, :-1], F[:, 1:], dt, k)
        model = fit_amplitudes(model, F[:, 0], times[0])
        real = not problem.is_complex
        make_closure = lambda: DmdClosure(basis, model, real=real)
    elif method == "dmd-galerkin":
        model = exact_dmd(Y[:, :-1], Y[:, 1:], dt, ell)
        basis = PodBasis(orthonormalize_modes(model), np.zeros(0))
        make_closure = lambda: FullLiftClosure(basis, problem.nonlinearity)
    elif method == "dmd-free":
        model = exact_dmd(Y[:, :-1], Y[:, 1:], dt, ell)
        model = fit_amplitudes(model, Y[:, 0], times[0])
    else:
        raise ValueError(f"unknown method {method!r}")
    if method != "dmd-free":
        lin = galerkin_reduce(problem.mass, problem.linear, basis, problem.y0)
        closure = make_closure()
    row.offline_seconds = time.perf_counter() - t0

    if method == "dmd-free":
        def once():
            s = time.perf_counter()
            rec = dmd_predict_series(model, times)
            return rec, time.perf_counter() - s

        rec, row.online_seconds = _median_run(once, repeats)
        row.nonlinearity_eval_count = 0
        if not problem.is_complex:
            row.max_imag_residue = float(np.abs(rec.imag).max())
            rec = rec.real
    else:
        def once():
            traj = integrate_reduced(lin, closure, dt, steps, times[0])
            return traj, traj.online_seconds

        traj, row.online_seconds = _median_run(once, repeats)
        row.nonlinearity_eval_count = traj.nonlinearity_eval_count
        row.max_imag_residue = float(traj.max_imag)
        rec = reconstruct_full(basis, traj)
    row.rel_frobenius_error = relative_frobenius_error(rec, Y)
    return row


def _run_paramfn(cfg):
    pset = build_param_function(**{k: v for k, v in cfg.overrides.items() if k != "mu"})
    mus = cfg.overrides.get("mu", [1.17, 3.1])
    mus = [mus] if np.isscalar(mus) else list(mus)
    rows = []
    for mu in mus:
        exact = param_function(pset.grid, mu)
        for method, ell, k in cfg.cells():
            fn = interpolate_param_dmd if method == "dmd-interp" else interpolate_param_deim
            row = ResultRow(f"paramfn@mu={mu:g}", method, ell, k)
            try:
                times = []
                for _ in range(cfg.repeats):
                    s = time.perf_counter()
                    approx = fn(pset, mu, ell)
                    times.append(time.perf_counter() - s)
                row.offline_seconds = 0.0
                row.online_seconds = statistics.median(times)
                row.nonlinearity_eval_count = ell if method == "deim-interp" else 0
                row.rel_frobenius_error = relative_frobenius_error(approx, exact)
            except (PodDmdError, ArithmeticError, ValueError) as exc:
                row.status = f"error: {exc}"
                log.warning("%s %s ell=%d failed: %s", row.problem, method, ell, exc)
            rows.append(row)
    return sorted(rows, key=ResultRow.sort_key)


def run_experiment(cfg: ExperimentConfig, full=None):
    """Run every sweep cell; failures become rows with ``status != "ok"``.

    Returns ``(rows, problem, full)`` where ``full`` is the shared
    full-order solution (computed once unless passed in).
    """
    if cfg.problem == "paramfn":
        return _run_paramfn(cfg), None, None
    problem = build_preset(cfg.problem, **cfg.overrides)
    if full is None:
        full = integrate_full(problem)
    rows, cache = [], {}
    for method, ell, k in cfg.cells():
        key = (method, ell) if method in _K_FREE else (method, ell, k)
        if key in cache:
            rows.append(replace(cache[key], k=k))
            continue
        try:
            row = run_cell(problem, full, method, ell, k, cfg.repeats)
        except (PodDmdError, ArithmeticError, ValueError) as exc:
            row = ResultRow(problem.name, method, ell, k, status=f"error: {exc}")
            log.warning("%s ell=%d k=%d failed: %s", method, ell, k, exc)
        cache[key] = row
        rows.append(row)
    return sorted(rows, key=ResultRow.sort_key), problem, full
