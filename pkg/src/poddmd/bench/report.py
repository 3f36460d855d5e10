"""CSV output, standalone plot scripts and rendered figures for sweeps."""

import csv
import inspect
import math
from pathlib import Path

import numpy as np

from . import figures
from .harness import ResultRow

__all__ = ["CSV_HEADER", "emit_csv", "read_csv", "emit_plot_script", "render_figures",
           "write_spectrum_csv"]

CSV_HEADER = ["problem", "method", "ell", "k", "offline_s", "online_s", "nl_evals",
              "rel_err", "max_imag"]


def _num(x):
    return "nan" if isinstance(x, float) and math.isnan(x) else repr(float(x))


def emit_csv(rows, path):
    """Write rows sorted by (problem, method, ell, k) under the fixed header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in sorted(rows, key=ResultRow.sort_key):
            w.writerow([
                r.problem, r.method, r.ell, r.k,
                _num(r.offline_seconds), _num(r.online_seconds),
                r.nonlinearity_eval_count,
                _num(r.rel_frobenius_error), _num(r.max_imag_residue),
            ])
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        return [
            ResultRow(
                d["problem"], d["method"], int(d["ell"]), int(d["k"]),
                float(d["offline_s"]), float(d["online_s"]), int(d["nl_evals"]),
                float(d["rel_err"]), float(d["max_imag"]),
            )
            for d in reader
        ]


_SCRIPT_MAIN = '''

TARGETS = {targets!r}

if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    make_figures(os.path.join(here, {csv_name!r}), here)
'''


def emit_plot_script(rows, path, csv_name="results.csv"):
    """Write a self-contained matplotlib script that plots ``csv_name``.

    The script lives next to the CSV, reads only that file and writes one
    PNG per (problem, metric) listed in its ``TARGETS`` table.
    """
    problems = sorted({r.problem for r in rows})
    targets = [
        (p, m, figures.figure_name(p, m)) for p in problems for m in figures.METRICS
    ]
    body = inspect.getsource(figures)
    text = (
        "#!/usr/bin/env python3\n"
        f"# Regenerates figures from {csv_name}.\n"
        + body
        + _SCRIPT_MAIN.format(targets=targets, csv_name=csv_name)
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def render_figures(csv_path, out_dir):
    """Render the figures in-process (same code as the emitted script)."""
    return figures.make_figures(str(csv_path), str(out_dir))


def write_spectrum_csv(path, sigma_states, sigma_nonlinear=None):
    """Singular values and cumulative energy of state / nonlinearity snapshots."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["which", "index", "sigma", "energy"])
        for which, s in (("states", sigma_states), ("nonlinearity", sigma_nonlinear)):
            if s is None or len(s) == 0:
                continue
            s = np.asarray(s)
            energy = np.cumsum(s**2) / np.sum(s**2)
            for i, (si, ei) in enumerate(zip(s, energy)):
                w.writerow([which, i + 1, repr(float(si)), repr(float(ei))])
    return path
