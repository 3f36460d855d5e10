"""Reading and writing snapshots, operators and models.

The binary container is numpy's ``.npz``.  Snapshot CSV files hold the
sample times in the first row and one grid point per following row; complex
entries are written in Python's ``complex`` notation.
"""

import csv
from pathlib import Path

import numpy as np

from .deim import DeimOperator
from .dmd import DmdModel, report_rows
from .pod import SnapshotSet

__all__ = [
    "save_snapshots",
    "load_snapshots",
    "snapshots_to_csv",
    "snapshots_from_csv",
    "save_deim",
    "load_deim",
    "save_dmd",
    "load_dmd",
    "write_dmd_report",
    "trajectory_to_csv",
]


def save_snapshots(path, snaps: SnapshotSet, **extra):
    arrays = {"states": snaps.states, "times": snaps.times}
    if snaps.weights is not None:
        arrays["weights"] = snaps.weights
    arrays.update(extra)
    np.savez(path, **arrays)


def load_snapshots(path, key="states"):
    with np.load(path) as data:
        weights = data["weights"] if "weights" in data else None
        return SnapshotSet(data[key], data["times"], weights)


def _fmt(v):
    if isinstance(v, complex) or np.iscomplexobj(v):
        return repr(complex(v))
    return repr(float(v))


def _parse(s):
    s = s.strip()
    if "j" in s:
        return complex(s)
    return float(s)


def snapshots_to_csv(path, snaps: SnapshotSet):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_fmt(t) for t in snaps.times)
        for row in snaps.states:
            w.writerow(_fmt(v) for v in row)


def snapshots_from_csv(path):
    with open(path, newline="") as fh:
        rows = [[_parse(v) for v in r] for r in csv.reader(fh) if r]
    times = np.array(rows[0], dtype=float)
    states = np.array(rows[1:])
    return SnapshotSet(states, times)


def save_deim(path, op: DeimOperator):
    np.savez(
        path,
        indices=op.indices,
        lift=op.lift,
        nonlinearity_modes=op.nonlinearity_modes,
        bound_constant=op.bound_constant,
    )


def load_deim(path):
    with np.load(path) as d:
        return DeimOperator(
            d["nonlinearity_modes"], d["indices"], d["lift"], float(d["bound_constant"])
        )


def save_dmd(path, model: DmdModel):
    np.savez(
        path,
        modes=model.modes,
        discrete_eigs=model.discrete_eigs,
        frequencies=model.frequencies,
        amplitudes=(model.amplitudes if model.amplitudes is not None
                    else np.zeros(0, dtype=complex)),
        dt=model.dt,
        t_ref=np.nan if model.t_ref is None else model.t_ref,
        real_data=model.real_data,
    )


def load_dmd(path):
    with np.load(path) as d:
        amps = d["amplitudes"]
        t_ref = float(d["t_ref"])
        return DmdModel(
            d["modes"],
            d["discrete_eigs"],
            d["frequencies"],
            float(d["dt"]),
            amplitudes=amps if amps.size else None,
            t_ref=None if np.isnan(t_ref) else t_ref,
            real_data=bool(d["real_data"]),
        )


DMD_REPORT_HEADER = ["index", "re_lambda", "im_lambda", "re_omega", "im_omega", "abs_b"]


def write_dmd_report(path, model: DmdModel):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DMD_REPORT_HEADER)
        for row in report_rows(model):
            w.writerow([row[0]] + [repr(float(v)) for v in row[1:]])


def trajectory_to_csv(path, traj):
    """One row per time: ``t, c1, ..., c_ell`` (complex coordinates as strings)."""
    ell = traj.reduced_states.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"c{i + 1}" for i in range(ell)])
        for t, col in zip(traj.times, traj.reduced_states.T):
            w.writerow([repr(float(t))] + [_fmt(v) for v in col])
