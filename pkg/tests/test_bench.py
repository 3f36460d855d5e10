import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from poddmd.bench import cli
from poddmd.bench.harness import (
    ExperimentConfig,
    ResultRow,
    relative_frobenius_error,
    run_cell,
    run_experiment,
)
from poddmd.bench.report import (
    CSV_HEADER,
    emit_csv,
    emit_plot_script,
    read_csv,
    render_figures,
)
from poddmd.pdelab import build_parabolic2d, integrate_full

SMALL = {"nx": 12}


@pytest.fixture(scope="module")
def small_run():
    cfg = ExperimentConfig(
        problem="parabolic2d", overrides=SMALL,
        methods=["pod", "pod-deim-lu", "pod-deim-qr", "pod-dmd", "dmd-free", "dmd-galerkin"],
        pod_ranks=[4, 6], closure_ranks=[4, 6], repeats=1,
    )
    return cfg, *run_experiment(cfg)


class TestErrorMetric:
    def test_frobenius(self):
        ref = np.array([[3.0, 0.0], [0.0, 4.0]])
        assert relative_frobenius_error(ref + np.eye(2), ref) == pytest.approx(np.sqrt(2) / 5)

    def test_identical(self):
        assert relative_frobenius_error(np.ones((2, 2)), np.ones((2, 2))) == 0.0

    def test_shape(self):
        with pytest.raises(ValueError):
            relative_frobenius_error(np.ones(3), np.ones(4))

    def test_zero_reference(self):
        with pytest.raises(ZeroDivisionError):
            relative_frobenius_error(np.ones(2), np.zeros(2))


class TestConfig:
    def test_cells_grid_and_paired(self):
        cfg = ExperimentConfig(methods=["pod"], pod_ranks=[1, 2], closure_ranks=[3, 4])
        assert len(cfg.cells()) == 4
        paired = ExperimentConfig(methods=["pod"], pod_ranks=[1, 2], closure_ranks=[3, 4],
                                  paired=True)
        assert paired.cells() == [("pod", 1, 3), ("pod", 2, 4)]

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            ExperimentConfig(methods=["svd"])

    def test_json(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"problem": "burgers", "pod_ranks": [3]}))
        cfg = ExperimentConfig.from_json(path)
        assert cfg.problem == "burgers" and cfg.pod_ranks == [3]
        path.write_text(json.dumps({"colour": 1}))
        with pytest.raises(ValueError):
            ExperimentConfig.from_json(path)


class TestSweep:
    def test_row_count(self, small_run):
        cfg, rows, _, _ = small_run
        assert len(rows) == len(cfg.cells()) == 24
        assert all(r.status == "ok" for r in rows)

    def test_eval_counts(self, small_run):
        _, rows, problem, _ = small_run
        for r in rows:
            expected = {"pod": problem.steps, "pod-deim-lu": r.k * problem.steps,
                        "pod-deim-qr": r.k * problem.steps, "pod-dmd": 0,
                        "dmd-free": 0, "dmd-galerkin": problem.steps}[r.method]
            assert r.nonlinearity_eval_count == expected

    def test_k_free_cells_shared(self, small_run):
        _, rows, _, _ = small_run
        pod = [r for r in rows if r.method == "pod" and r.ell == 4]
        assert pod[0].rel_frobenius_error == pod[1].rel_frobenius_error

    def test_failed_cell_recorded(self):
        cfg = ExperimentConfig(problem="parabolic2d", overrides={"nx": 4},
                               methods=["pod"], pod_ranks=[200], closure_ranks=[1],
                               repeats=1)
        rows, _, _ = run_experiment(cfg)
        assert rows[0].status.startswith("error")

    def test_paramfn(self):
        cfg = ExperimentConfig(problem="paramfn", methods=["dmd-interp", "deim-interp"],
                               pod_ranks=[3], closure_ranks=[3], paired=True, repeats=1)
        rows, problem, full = run_experiment(cfg)
        assert problem is None and len(rows) == 4
        assert {r.problem for r in rows} == {"paramfn@mu=1.17", "paramfn@mu=3.1"}

    def test_run_cell_unknown(self):
        p = build_parabolic2d(nx=4)
        with pytest.raises(ValueError):
            run_cell(p, integrate_full(p), "galerkin", 2, 2)


class TestReport:
    def test_header_only(self, tmp_path):
        emit_csv([], tmp_path / "r.csv")
        assert (tmp_path / "r.csv").read_text().strip() == ",".join(CSV_HEADER)

    def test_roundtrip(self, tmp_path, small_run):
        _, rows, _, _ = small_run
        emit_csv(rows, tmp_path / "r.csv")
        back = read_csv(tmp_path / "r.csv")
        assert [(r.method, r.ell, r.k, r.rel_frobenius_error) for r in back] == [
            (r.method, r.ell, r.k, r.rel_frobenius_error) for r in rows
        ]

    def test_sorted(self, tmp_path):
        rows = [ResultRow("p", "b", 1, 1), ResultRow("p", "a", 2, 1), ResultRow("p", "a", 1, 1)]
        emit_csv(rows, tmp_path / "r.csv")
        back = read_csv(tmp_path / "r.csv")
        assert [(r.method, r.ell) for r in back] == [("a", 1), ("a", 2), ("b", 1)]

    def test_plot_script_deterministic(self, tmp_path, small_run):
        _, rows, _, _ = small_run
        a = emit_plot_script(rows, tmp_path / "a.py").read_bytes()
        b = emit_plot_script(list(reversed(rows)), tmp_path / "b.py").read_bytes()
        assert a == b

    def test_plot_script_runs(self, tmp_path, small_run):
        _, rows, _, _ = small_run
        emit_csv(rows, tmp_path / "results.csv")
        script = emit_plot_script(rows, tmp_path / "plot_results.py")
        subprocess.run([sys.executable, str(script)], check=True, cwd=tmp_path.parent)
        pngs = sorted(p.name for p in tmp_path.glob("*.png"))
        assert pngs == ["parabolic2d_online_s.png", "parabolic2d_rel_err.png"]

    def test_render_in_process(self, tmp_path, small_run):
        _, rows, _, _ = small_run
        emit_csv(rows, tmp_path / "results.csv")
        written = render_figures(tmp_path / "results.csv", tmp_path / "fig")
        assert len(written) == 2


class TestCli:
    def test_run(self, tmp_path, capsys):
        out = tmp_path / "run"
        code = cli.main(["run", "--problem", "parabolic2d", "--override", "nx=10",
                         "--methods", "pod,pod-dmd", "--ell", "3,5", "--k", "3,5",
                         "--paired", "--repeats", "1", "--out", str(out)])
        assert code == 0
        for name in ("results.csv", "plot_results.py", "spectrum.csv",
                     "parabolic2d_rel_err.png", "parabolic2d_online_s.png"):
            assert (out / name).exists(), name
        assert len(read_csv(out / "results.csv")) == 4
        assert "wrote 4 rows" in capsys.readouterr().out

    def test_snapshots_and_report(self, tmp_path):
        snap = tmp_path / "s" / "burgers.npz"
        assert cli.main(["snapshots", "--problem", "burgers-sine", "--override", "n=29",
                         "--override", "t_final=0.2", "--out", str(snap), "--csv"]) == 0
        assert (tmp_path / "s" / "burgers_states.csv").exists()
        rep = tmp_path / "dmd.csv"
        assert cli.main(["dmd-report", "--snapshots", str(snap), "--key", "nonlinearity",
                         "--rank", "4", "--out", str(rep)]) == 0
        with open(rep) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 5 and rows[1][0] == "1"

    def test_interp(self, tmp_path, capsys):
        assert cli.main(["interp", "--mu", "1.17", "--rank", "5", "--out", str(tmp_path),
                         "--no-figures"]) == 0
        assert (tmp_path / "interp_mu1.17_rank5.csv").exists()
        assert "rel err dmd=" in capsys.readouterr().out

    def test_error_exit(self, tmp_path, capsys):
        code = cli.main(["run", "--problem", "nosuch", "--methods", "pod",
                         "--out", str(tmp_path)])
        assert code == 1
        assert "poddmd run" in capsys.readouterr().err

    def test_bad_rank_exit(self, tmp_path):
        snap = tmp_path / "a.npz"
        cli.main(["snapshots", "--problem", "advection", "--override", "t_final=0.05",
                  "--out", str(snap)])
        assert cli.main(["dmd-report", "--snapshots", str(snap), "--rank", "50",
                         "--out", str(tmp_path / "r.csv")]) == 1
