"""Command line entry point: ``poddmd {run,snapshots,dmd-report,interp}``."""

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path

import numpy as np

from ..dmd import exact_dmd, fit_amplitudes
from ..errors import PodDmdError
from ..io import save_snapshots, snapshots_to_csv, write_dmd_report
from ..pdelab import (
    build_param_function,
    build_preset,
    integrate_full,
    interpolate_param_deim,
    interpolate_param_dmd,
    param_function,
)
from ..pod import compute_pod_basis
from .harness import ExperimentConfig, relative_frobenius_error, run_experiment
from .report import emit_csv, emit_plot_script, render_figures, write_spectrum_csv

log = logging.getLogger("poddmd")


def _int_list(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _str_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _parse_override(item):
    key, sep, value = item.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"override must be key=value, got {item!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _overrides(items):
    return dict(_parse_override(i) for i in items or [])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="poddmd", description="POD / POD-DEIM / POD-DMD reduced-order benchmarks"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a method x rank sweep")
    run.add_argument("--config", type=Path, help="JSON experiment config")
    run.add_argument("--problem")
    run.add_argument("--methods", type=_str_list)
    run.add_argument("--ell", type=_int_list, help="POD ranks, comma separated")
    run.add_argument("--k", type=_int_list, help="DEIM/DMD ranks, comma separated")
    run.add_argument("--paired", action="store_true", default=None,
                     help="pair --ell and --k element-wise instead of a grid")
    run.add_argument("--repeats", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", type=str)
    run.add_argument("--override", action="append", metavar="KEY=VALUE")
    run.add_argument("--no-figures", action="store_true")

    snaps = sub.add_parser("snapshots", help="integrate a problem and save snapshots")
    snaps.add_argument("--problem", required=True)
    snaps.add_argument("--override", action="append", metavar="KEY=VALUE")
    snaps.add_argument("--out", type=Path, required=True)
    snaps.add_argument("--csv", action="store_true", help="also write CSV files")

    rep = sub.add_parser("dmd-report", help="DMD eigenvalue / amplitude table")
    rep.add_argument("--snapshots", type=Path, required=True, help=".npz from snapshots")
    rep.add_argument("--key", default="states", choices=["states", "nonlinearity"])
    rep.add_argument("--rank", type=int, required=True)
    rep.add_argument("--out", type=Path, required=True)

    interp = sub.add_parser("interp", help="DMD vs DEIM interpolation of s(x; mu)")
    interp.add_argument("--mu", type=float, action="append", required=True)
    interp.add_argument("--rank", type=int, required=True)
    interp.add_argument("--out", type=Path, required=True)
    interp.add_argument("--no-figures", action="store_true")
    return parser


def _config_from_args(args):
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    updates = {
        "problem": args.problem,
        "methods": args.methods,
        "pod_ranks": args.ell,
        "closure_ranks": args.k,
        "paired": args.paired,
        "repeats": args.repeats,
        "seed": args.seed,
        "output_dir": args.out,
    }
    updates = {k: v for k, v in updates.items() if v is not None}
    if args.problem == "paramfn" and args.methods is None:
        updates["methods"] = ["dmd-interp", "deim-interp"]
    overrides = {**cfg.overrides, **_overrides(args.override)}
    return dataclasses.replace(cfg, overrides=overrides, **updates)


def cmd_run(args):
    cfg = _config_from_args(args)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows, problem, full = run_experiment(cfg)
    csv_path = emit_csv(rows, out / "results.csv")
    emit_plot_script(rows, out / "plot_results.py", csv_name="results.csv")
    if full is not None:
        s_states = compute_pod_basis(full.states, 1).singular_values
        try:
            s_nl = compute_pod_basis(full.nonlinearity.states, 1).singular_values
        except PodDmdError:
            s_nl = None
        write_spectrum_csv(out / "spectrum.csv", s_states, s_nl)
    if not args.no_figures:
        render_figures(csv_path, out)
    failed = [r for r in rows if r.status != "ok"]
    for r in failed:
        log.warning("%s %s ell=%d k=%d: %s", r.problem, r.method, r.ell, r.k, r.status)
    print(f"wrote {len(rows)} rows to {csv_path} ({len(failed)} failed cells)")
    return 0


def cmd_snapshots(args):
    problem = build_preset(args.problem, **_overrides(args.override))
    full = integrate_full(problem)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_snapshots(args.out, full.states, nonlinearity=full.nonlinearity.states)
    if args.csv:
        stem = args.out.with_suffix("")
        snapshots_to_csv(f"{stem}_states.csv", full.states)
        snapshots_to_csv(f"{stem}_nonlinearity.csv", full.nonlinearity)
    print(f"{problem.name}: n={problem.n}, {problem.steps + 1} snapshots, "
          f"full-order time {full.seconds:.3f}s -> {args.out}")
    return 0


def cmd_dmd_report(args):
    with np.load(args.snapshots) as data:
        X = data[args.key]
        times = data["times"]
    dt = float(times[1] - times[0])
    model = exact_dmd(X[:, :-1], X[:, 1:], dt, args.rank)
    model = fit_amplitudes(model, X[:, 0], float(times[0]))
    write_dmd_report(args.out, model)
    print(f"wrote {model.rank} eigenvalues to {args.out}")
    return 0


def cmd_interp(args):
    pset = build_param_function()
    args.out.mkdir(parents=True, exist_ok=True)
    for mu in args.mu:
        exact = param_function(pset.grid, mu)
        dmd = interpolate_param_dmd(pset, mu, args.rank)
        deim = interpolate_param_deim(pset, mu, args.rank)
        path = args.out / f"interp_mu{mu:g}_rank{args.rank}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "exact", "dmd", "deim"])
            for row in zip(pset.grid, exact, dmd, deim):
                w.writerow([repr(float(v)) for v in row])
        e_dmd = relative_frobenius_error(dmd, exact)
        e_deim = relative_frobenius_error(deim, exact)
        print(f"mu={mu:g} rank={args.rank}: rel err dmd={e_dmd:.3e} deim={e_deim:.3e}")
        if not args.no_figures:
            _plot_interp(path, pset.grid, exact, dmd, deim, mu, args.rank)
    return 0


def _plot_interp(csv_path, x, exact, dmd, deim, mu, rank):
    from .figures import plt

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(x, exact, "k-", label="s(x; mu)")
    ax.plot(x, dmd, "--", label=f"DMD, rank {rank}")
    ax.plot(x, deim, ":", label=f"DEIM, rank {rank}")
    ax.set_xlabel("x")
    ax.set_title(f"mu = {mu:g}")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(Path(csv_path).with_suffix(".png"), dpi=120)
    plt.close(fig)


COMMANDS = {
    "run": cmd_run,
    "snapshots": cmd_snapshots,
    "dmd-report": cmd_dmd_report,
    "interp": cmd_interp,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (PodDmdError, ValueError, OSError, KeyError) as exc:
        print(f"poddmd {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
