import io

import numpy as np
import pytest

from rgbm.cli import main


def run_cli(argv):
    out = io.StringIO()
    code = main(argv, stdout=out)
    return code, out.getvalue()


def write_toy_libsvm(path, n=120, seed=0):
    rng = np.random.default_rng(seed)
    lines = []
    for _ in range(n):
        x1, x2 = rng.standard_normal(2)
        label = 1 if x1 + x2 > 0 else 0
        lines.append(f"{label} 1:{x1:.5f} 2:{x2:.5f}")
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


@pytest.fixture()
def toy_file(tmp_path):
    return write_toy_libsvm(tmp_path / "toy.svm")


class TestTrain:
    def test_writes_csv_and_model(self, tmp_path, toy_file):
        out_csv = tmp_path / "metrics.csv"
        model = tmp_path / "model.txt"
        code, text = run_cli([
            "train", "--train", str(toy_file), "--loss", "logistic",
            "--loss-param", "0.0001", "--rule", "type3", "--t", "2",
            "--step", "line", "--iters", "25", "--quantiles", "20",
            "--seed", "3", "--out", str(out_csv), "--model-out", str(model),
        ])
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert lines[0] == "iter,elapsed_sec,train_loss,test_loss"
        assert len(lines) == 26
        losses = [float(line.split(",")[2]) for line in lines[1:]]
        assert all(np.isfinite(losses))
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))
        assert model.read_text().startswith("rgbm-model v1 ")
        assert "final train loss" in text
        assert "effective configuration" in text

    def test_reproducible_except_elapsed(self, tmp_path, toy_file):
        outs = []
        for run in range(2):
            out_csv = tmp_path / f"m{run}.csv"
            code, _ = run_cli([
                "train", "--train", str(toy_file), "--loss", "squared",
                "--rule", "type1", "--t", "5", "--step", "line",
                "--iters", "15", "--quantiles", "10", "--seed", "7",
                "--out", str(out_csv),
            ])
            assert code == 0
            rows = [line.split(",") for line in out_csv.read_text().splitlines()]
            outs.append([(r[0], r[2], r[3]) for r in rows])
        assert outs[0] == outs[1]

    def test_explicit_test_file(self, tmp_path, toy_file):
        test_file = write_toy_libsvm(tmp_path / "test.svm", n=40, seed=9)
        out_csv = tmp_path / "metrics.csv"
        code, _ = run_cli([
            "train", "--train", str(toy_file), "--test", str(test_file),
            "--loss", "logistic", "--rule", "type0", "--step", "line",
            "--iters", "5", "--quantiles", "10", "--out", str(out_csv),
        ])
        assert code == 0
        rows = out_csv.read_text().splitlines()[1:]
        assert all(row.split(",")[3] != "" for row in rows)

    def test_zero_iterations(self, tmp_path, toy_file):
        out_csv = tmp_path / "empty.csv"
        model = tmp_path / "empty-model.txt"
        code, text = run_cli([
            "train", "--train", str(toy_file), "--loss", "squared",
            "--iters", "0", "--out", str(out_csv), "--model-out", str(model),
        ])
        assert code == 0
        assert out_csv.read_text() == "iter,elapsed_sec,train_loss,test_loss\n"
        assert "model predicts 0" in text
        # header-only model file: no stump lines
        assert len(model.read_text().splitlines()) == 1

    def test_missing_file_exit_2(self, tmp_path):
        code, _ = run_cli([
            "train", "--train", str(tmp_path / "absent.svm"),
            "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 2

    def test_bad_rule_parameters_nonzero_exit(self, tmp_path, toy_file):
        code, _ = run_cli([
            "train", "--train", str(toy_file), "--rule", "type3", "--t", "99",
            "--iters", "5", "--out", str(tmp_path / "x.csv"),
        ])
        assert code == 1

    def test_config_file_with_flag_override(self, tmp_path, toy_file):
        config = tmp_path / "run.cfg"
        config.write_text(
            f"train={toy_file}\nloss=squared\niters=9\nquantiles=10\nseed=2\n"
            f"out={tmp_path / 'from_config.csv'}\n"
        )
        out_csv = tmp_path / "override.csv"
        code, text = run_cli([
            "train", "--config", str(config), "--iters", "4", "--out", str(out_csv),
        ])
        assert code == 0
        assert len(out_csv.read_text().splitlines()) == 5  # flag wins over config
        assert "iters=4" in text

    def test_classification_smoke_synthetic(self, tmp_path, binary_libsvm_file):
        out_csv = tmp_path / "synth.csv"
        code, _ = run_cli([
            "train", "--train", str(binary_libsvm_file), "--loss", "logistic",
            "--loss-param", "0.0001", "--rule", "type3", "--t", "12",
            "--step", "line", "--iters", "30", "--quantiles", "100",
            "--seed", "1", "--out", str(out_csv),
        ])
        assert code == 0
        rows = out_csv.read_text().splitlines()
        assert len(rows) == 31


class TestConsoleScript:
    def test_entry_point_runs(self):
        import subprocess
        import sys

        proc = subprocess.run(
            [sys.executable, "-m", "rgbm.cli", "pmf", "3", "1"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.startswith("rank\t")


class TestPmf:
    def test_small_table(self):
        code, text = run_cli(["pmf", "4", "2"])
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[0].split("\t") == ["rank", "prob", "scaled", "beta_limit"]
        probs = [float(line.split("\t")[1]) for line in lines[1:5]]
        assert probs == pytest.approx([0.5, 1 / 3, 1 / 6, 0.0])
        assert lines[-1].startswith("sum=1")

    def test_full_draw_single_row(self):
        code, text = run_cli(["pmf", "5", "5"])
        assert code == 0
        probs = [float(line.split("\t")[1]) for line in text.strip().splitlines()[1:6]]
        assert probs == [1.0, 0.0, 0.0, 0.0, 0.0]

    def test_scaled_column_tracks_beta_in_bulk(self):
        # the scaled law and its limit agree within 0.1 away from the head
        code, text = run_cli(["pmf", "40", "10"])
        assert code == 0
        for line in text.strip().splitlines()[7:40]:
            _, _, scaled, beta = line.split("\t")
            if beta != "nan":
                assert abs(float(scaled) - float(beta)) < 0.1

    def test_bad_arguments(self):
        code, _ = run_cli(["pmf", "4", "9"])
        assert code == 1


class TestMca:
    def test_orthogonal_closed_vs_estimate(self):
        code, text = run_cli(["mca", "orthogonal", "--p", "4", "--restarts", "60"])
        assert code == 0
        closed, estimate = (float(part.split("=")[1]) for part in text.split())
        assert closed == pytest.approx(0.5)
        assert abs(estimate - closed) < 1e-3

    def test_binary_closed_vs_estimate(self):
        code, text = run_cli(["mca", "binary", "--p", "2", "--restarts", "60"])
        assert code == 0
        closed, estimate = (float(part.split("=")[1]) for part in text.split())
        assert closed == pytest.approx(0.92388, abs=1e-5)
        assert abs(estimate - closed) < 1e-3

    def test_ordered_norm_orthogonal(self):
        code, text = run_cli([
            "mca", "orthogonal", "--p", "16", "--norm", "ordered", "--t", "4",
            "--restarts", "40",
        ])
        assert code == 0
        closed, estimate = (float(part.split("=")[1]) for part in text.split())
        from rgbm import mca_orthogonal_ordered, selection_pmf

        assert closed == pytest.approx(mca_orthogonal_ordered(selection_pmf(16, 4)))
        assert abs(estimate - closed) < 5e-3

    def test_matrix_file(self, tmp_path):
        path = tmp_path / "mat.txt"
        np.savetxt(path, np.eye(3))
        code, text = run_cli(["mca", "file", "--path", str(path), "--restarts", "40"])
        assert code == 0
        assert "closed_form=n/a" in text

    def test_oversize_refused(self):
        code, _ = run_cli(["mca", "binary", "--p", "8"])
        assert code == 1
