import json
import math

import numpy as np
import pytest

from alphaloss.cli import main, manifest_path_for, replay


def read_csv(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    assert b"\r" not in raw
    text = raw.decode("utf-8")
    lines = text.strip("\n").split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestLossCurves:
    def test_end_to_end(self, tmp_path):
        out = str(tmp_path / "curves.csv")
        code = main(
            ["losscurves", "--alphas", "1,2,inf", "--z-min", "-10", "--z-max", "10",
             "--steps", "21", "--out", out]
        )
        assert code == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "z", "loss", "d1", "d2"]
        assert len(rows) == 3 * 21
        by_key = {(r[0], r[1]): r for r in rows}
        inf_zero = by_key[("inf", "0")]
        assert float(inf_zero[2]) == 0.5
        log_zero = by_key[("1", "0")]
        assert float(log_zero[2]) == pytest.approx(math.log(2), abs=1e-15)
        assert float(log_zero[3]) == -0.5
        # losses are negligible at a large positive margin for every alpha
        for key, row in by_key.items():
            if key[1] == "10":
                assert float(row[2]) < 0.01

    def test_seventeen_significant_digits(self, tmp_path):
        out = str(tmp_path / "curves.csv")
        main(["losscurves", "--alphas", "2", "--z-min", "-1", "--z-max", "1",
              "--steps", "3", "--out", out])
        _, rows = read_csv(out)
        for row in rows:
            for text in row[1:]:
                assert text == "%.17g" % float(text)

    def test_manifest_and_replay_reproduce_bytes(self, tmp_path):
        out = str(tmp_path / "curves.csv")
        main(["losscurves", "--alphas", "1,1.5,inf", "--out", out])
        first = open(out, "rb").read()
        manifest_file = manifest_path_for(out)
        manifest = json.load(open(manifest_file))
        assert manifest["command"] == "losscurves"
        assert manifest["version"]
        assert manifest["outputs"] == [out]
        assert main(["losscurves"] + sum((["--" + k, str(v)] for k, v in manifest["flags"].items()), [])) == 0
        assert open(out, "rb").read() == first
        assert replay(manifest_file) == 0
        assert open(out, "rb").read() == first

    def test_fresh_process_reproduces_bytes(self, tmp_path):
        import subprocess
        import sys

        out = str(tmp_path / "curves.csv")
        argv = ["landscape", "--alphas", "2", "--ns", "40,80", "--trials", "2",
                "--holdout-n", "500", "--epochs", "20", "--seed", "9", "--out", out]
        assert main(argv) == 0
        first = open(out, "rb").read()
        proc = subprocess.run([sys.executable, "-m", "alphaloss.cli"] + argv, capture_output=True)
        assert proc.returncode == 0, proc.stderr
        assert open(out, "rb").read() == first


class TestCalibrationCommand:
    def test_rows_and_warning(self, tmp_path, capsys):
        out = str(tmp_path / "cal.csv")
        code = main(
            ["calibration", "--alphas", "1,2,inf", "--eta-grid", "0.25,0.3,0.5",
             "--grid-step", "0.001", "--out", out]
        )
        assert code == 0
        assert "skipping eta=0.5" in capsys.readouterr().err
        header, rows = read_csv(out)
        assert header == [
            "alpha", "eta", "unconstrained_min", "constrained_min", "gap",
            "argmin", "closed_form_argmin", "min_cond_risk_closed_form",
        ]
        assert len(rows) == 6  # eta = 0.5 skipped for each alpha
        by_key = {(r[0], r[1]): r for r in rows}
        inf_row = by_key[("inf", "0.29999999999999999")]
        assert float(inf_row[7]) == pytest.approx(0.3, abs=1e-12)
        log_row = by_key[("1", "0.25")]
        assert float(log_row[7]) == pytest.approx(0.562335, abs=1e-6)
        for row in rows:
            assert float(row[4]) > 0.0

    def test_replay_identical(self, tmp_path):
        out = str(tmp_path / "cal.csv")
        main(["calibration", "--alphas", "1.5", "--eta-grid", "0.2,0.7", "--out", out])
        first = open(out, "rb").read()
        assert replay(manifest_path_for(out)) == 0
        assert open(out, "rb").read() == first


class TestTrainCommand:
    def test_end_to_end_deterministic(self, tmp_path, synthetic_mnist_dir):
        out = str(tmp_path / "train.csv")
        argv = ["train", "--alpha", "2", "--lr", "0.5", "--epochs", "3", "--seed", "7",
                "--mnist-dir", synthetic_mnist_dir, "--out", out]
        assert main(argv) == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "lr", "epochs", "seed", "train_acc", "val_acc",
                          "test_acc", "final_risk"]
        assert len(rows) == 1
        first = open(out, "rb").read()
        assert main(argv) == 0
        assert open(out, "rb").read() == first
        row = rows[0]
        assert 0.0 <= float(row[4]) <= 1.0
        assert float(row[7]) > 0.0

    def test_zero_lr_reports_init_accuracy(self, tmp_path, synthetic_mnist_dir):
        out_a = str(tmp_path / "a.csv")
        out_b = str(tmp_path / "b.csv")
        base = ["train", "--alpha", "1", "--lr", "0", "--epochs", "1", "--seed", "11",
                "--mnist-dir", synthetic_mnist_dir]
        assert main(base + ["--out", out_a]) == 0
        assert main(base + ["--out", out_b]) == 0
        _, rows_a = read_csv(out_a)
        _, rows_b = read_csv(out_b)
        assert rows_a[0][4:] == rows_b[0][4:]

    def test_env_var_supplies_directory(self, tmp_path, synthetic_mnist_dir, monkeypatch):
        monkeypatch.setenv("ALPHALOSS_MNIST_DIR", synthetic_mnist_dir)
        out = str(tmp_path / "train.csv")
        assert main(["train", "--alpha", "inf", "--lr", "0.1", "--epochs", "1",
                     "--out", out]) == 0

    def test_missing_directory_exits_one(self, tmp_path, capsys, monkeypatch):
        monkeypatch.delenv("ALPHALOSS_MNIST_DIR", raising=False)
        out = str(tmp_path / "train.csv")
        assert main(["train", "--alpha", "2", "--lr", "1", "--out", out]) == 1
        assert "MNIST" in capsys.readouterr().err

    def test_corrupt_data_exits_one(self, tmp_path, capsys):
        bad_dir = tmp_path / "bad"
        bad_dir.mkdir()
        for name in ("train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                     "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"):
            (bad_dir / name).write_bytes(b"\x00" * 20)
        out = str(tmp_path / "train.csv")
        assert main(["train", "--alpha", "2", "--lr", "1", "--mnist-dir", str(bad_dir),
                     "--out", out]) == 1
        assert "magic" in capsys.readouterr().err

    def test_divergence_exits_two(self, tmp_path, synthetic_full_corpus, capsys):
        import gzip

        from alphaloss import IdxImages
        from alphaloss.mnist import dump_idx_images, dump_idx_labels

        # every digit-1 image copies a digit-7 image: the task is inseparable,
        # so a huge step sends some misclassified margin to -inf
        images, labels, test_images, test_labels = synthetic_full_corpus
        pixels = images.pixels.copy()
        ones = np.flatnonzero(labels == 1)
        sevens = np.flatnonzero(labels == 7)
        pixels[ones] = pixels[sevens[np.arange(ones.size) % sevens.size]]
        conflicted = IdxImages(images.count, images.rows, images.cols, pixels)
        bad_dir = tmp_path / "conflicted"
        bad_dir.mkdir()
        (bad_dir / "train-images-idx3-ubyte").write_bytes(dump_idx_images(conflicted))
        (bad_dir / "train-labels-idx1-ubyte").write_bytes(dump_idx_labels(labels))
        (bad_dir / "t10k-images-idx3-ubyte").write_bytes(dump_idx_images(test_images))
        (bad_dir / "t10k-labels-idx1-ubyte").write_bytes(dump_idx_labels(test_labels))

        out = str(tmp_path / "train.csv")
        code = main(["train", "--alpha", "1", "--lr", "1e306", "--epochs", "3",
                     "--mnist-dir", str(bad_dir), "--out", out])
        assert code == 2
        assert "epoch" in capsys.readouterr().err


class TestSweepCommand:
    def test_degenerate_sweep_matches_train(self, tmp_path, synthetic_mnist_dir):
        sweep_out = str(tmp_path / "sweep.csv")
        train_out = str(tmp_path / "train.csv")
        common = ["--epochs", "2", "--seed", "5", "--mnist-dir", synthetic_mnist_dir]
        assert main(["sweep", "--alphas", "2", "--lr-grid", "0.7",
                     "--out", sweep_out] + common) == 0
        assert main(["train", "--alpha", "2", "--lr", "0.7",
                     "--out", train_out] + common) == 0
        sweep_header, sweep_rows = read_csv(sweep_out)
        _, train_rows = read_csv(train_out)
        assert sweep_header == ["alpha", "best_lr", "val_acc", "test_acc"]
        assert sweep_rows[0][1] == "0.69999999999999996"
        assert sweep_rows[0][2] == train_rows[0][5]  # val_acc
        assert sweep_rows[0][3] == train_rows[0][6]  # test_acc

    def test_selects_best_validation_lr(self, tmp_path, synthetic_mnist_dir):
        out = str(tmp_path / "sweep.csv")
        assert main(["sweep", "--alphas", "1,2", "--lr-grid", "0.0,0.5",
                     "--epochs", "2", "--seed", "5",
                     "--mnist-dir", synthetic_mnist_dir, "--out", out]) == 0
        _, rows = read_csv(out)
        assert len(rows) == 2
        # a real gradient step beats the frozen random initialization here
        assert all(row[1] == "0.5" for row in rows)

    def test_manifest_records_seed_runs(self, tmp_path, synthetic_mnist_dir):
        out_a = str(tmp_path / "s1.csv")
        out_b = str(tmp_path / "s2.csv")
        for seed, out in ((1, out_a), (2, out_b)):
            assert main(["sweep", "--alphas", "1.5", "--lr-grid", "0.3", "--epochs", "1",
                         "--seed", str(seed), "--mnist-dir", synthetic_mnist_dir,
                         "--out", out]) == 0
        man_a = json.load(open(manifest_path_for(out_a)))
        man_b = json.load(open(manifest_path_for(out_b)))
        assert man_a["seed"] == 1 and man_b["seed"] == 2
        assert man_a["flags"]["seed"] != man_b["flags"]["seed"]


class TestLandscapeCommand:
    def test_small_run_and_replay(self, tmp_path):
        out = str(tmp_path / "land.csv")
        argv = ["landscape", "--alphas", "1,2", "--ns", "60,120", "--trials", "2",
                "--dim", "3", "--holdout-n", "2000", "--epochs", "40", "--seed", "3",
                "--out", out]
        assert main(argv) == 0
        header, rows = read_csv(out)
        assert header == ["alpha", "n", "trial", "gap", "hoeffding_eps", "zero_one_test_risk"]
        assert len(rows) == 2 * 2 * 2
        for row in rows:
            if row[0] == "1":
                assert row[4] == ""  # no concentration width at the log-loss endpoint
            else:
                assert float(row[4]) > 0.0
        summary = str(tmp_path / "land_summary.csv")
        sum_header, sum_rows = read_csv(summary)
        assert sum_header == ["alpha", "n", "median_gap", "loglog_slope", "diverged"]
        assert len(sum_rows) == 4
        manifest = json.load(open(manifest_path_for(out)))
        assert manifest["outputs"] == [out, summary]
        first = open(out, "rb").read()
        first_summary = open(summary, "rb").read()
        assert replay(manifest_path_for(out)) == 0
        assert open(out, "rb").read() == first
        assert open(summary, "rb").read() == first_summary
