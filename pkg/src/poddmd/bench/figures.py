"""Error and timing figures from a results CSV.

Depends only on the standard library and matplotlib so that its source can
be shipped verbatim inside generated plot scripts.
"""

import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

METRICS = {"rel_err": "relative Frobenius error", "online_s": "online time [s]"}


def figure_name(problem, metric):
    safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in problem)
    return f"{safe}_{metric}.png"


def read_rows(csv_path):
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def make_figures(csv_path, out_dir):
    """Write one PNG per (problem, metric); return the written paths."""
    rows = read_rows(csv_path)
    by_problem = defaultdict(list)
    for r in rows:
        by_problem[r["problem"]].append(r)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for problem in sorted(by_problem):
        prows = by_problem[problem]
        paired = all(r["ell"] == r["k"] for r in prows)
        for metric, label in METRICS.items():
            curves = defaultdict(list)
            for r in prows:
                value = float(r[metric])
                if value != value:  # nan: failed cell
                    continue
                if paired:
                    curves[r["method"]].append((int(r["ell"]), value))
                else:
                    name = f"{r['method']} (ell={r['ell']})"
                    curves[name].append((int(r["k"]), value))
            fig, ax = plt.subplots(figsize=(5.0, 3.6))
            for name in sorted(curves):
                pts = sorted(curves[name])
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", ms=3,
                        label=name)
            ax.set_yscale("log")
            ax.set_xlabel("rank (ell = k)" if paired else "k")
            ax.set_ylabel(label)
            ax.set_title(problem)
            if curves:
                ax.legend(fontsize=7)
            fig.tight_layout()
            path = os.path.join(out_dir, figure_name(problem, metric))
            fig.savefig(path, dpi=120)
            plt.close(fig)
            written.append(path)
    return written
