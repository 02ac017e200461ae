import numpy as np
import pytest

from glyphsvm.cli import main
from glyphsvm.features import read_features_csv
from glyphsvm.model_io import load_model
from glyphsvm.pgm import read_pgm, write_pgm


@pytest.fixture(scope="module")
def dataset_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_ds")
    rc = main(
        [
            "datagen",
            "--out-dir", str(root),
            "--classes", "3",
            "--per-class", "8",
            "--seed", "5",
        ]
    )
    assert rc == 0
    return root


def test_datagen_deterministic(tmp_path):
    args = ["datagen", "--classes", "2", "--per-class", "3", "--seed", "9"]
    assert main(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert main(args + ["--out-dir", str(tmp_path / "b")]) == 0
    for cls in ("0", "1"):
        for i in range(3):
            name = f"{cls}/{cls}_{i:04d}.pgm"
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_datagen_invalid_classes(tmp_path, capsys):
    rc = main(["datagen", "--out-dir", str(tmp_path), "--classes", "1"])
    assert rc == 1
    assert "InvalidConfig" in capsys.readouterr().err


def test_train_then_evaluate(dataset_dir, tmp_path, capsys):
    model_path = tmp_path / "m.gsvm"
    rc = main(
        [
            "train",
            "--data", str(dataset_dir),
            "--model", str(model_path),
            "--kernel", "rbf",
            "--gamma", "0.125",
            "--c", "64",
        ]
    )
    assert rc == 0
    model = load_model(model_path)
    assert model.strategy == "ova"
    assert len(model.classifiers) == 3

    report_path = tmp_path / "report.txt"
    rc = main(
        [
            "evaluate",
            "--model", str(model_path),
            "--data", str(dataset_dir),
            "--report", str(report_path),
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "Average" in out and "Error rate" in out
    assert report_path.exists()


def test_evaluate_dimension_mismatch(dataset_dir, tmp_path, capsys):
    model_path = tmp_path / "m8.gsvm"
    assert main(
        [
            "train",
            "--data", str(dataset_dir),
            "--model", str(model_path),
            "--grid-cell", "8",
            "--kernel", "linear",
            "--c", "4",
        ]
    ) == 0
    # hand the evaluator a 68-dim CSV against the 20-dim model
    csv_path = tmp_path / "f68.csv"
    assert main(
        ["features", "--data", str(dataset_dir), "--grid-cell", "4", "--output", str(csv_path)]
    ) == 0
    rc = main(["evaluate", "--model", str(model_path), "--data", str(csv_path)])
    assert rc == 1
    assert "DimensionMismatch" in capsys.readouterr().err


def test_features_command_csv(dataset_dir, tmp_path):
    csv_path = tmp_path / "out.csv"
    rc = main(
        ["features", "--data", str(dataset_dir), "--grid-cell", "4", "--output", str(csv_path)]
    )
    assert rc == 0
    labels, matrix, cfg = read_features_csv(csv_path)
    assert len(labels) == 24
    assert matrix.shape == (24, 68)
    assert cfg.cell_px == 4


def test_gridsearch_single_cell_matches_cv(dataset_dir, tmp_path, capsys):
    args_common = [
        "--data", str(dataset_dir),
        "--grid-cell", "4",
        "--folds", "4",
        "--seed", "2",
    ]
    rc = main(
        [
            "gridsearch",
            "--kernel", "rbf",
            "--c-grid", "16",
            "--gamma-grid", "0.125",
            "--csv-out", str(tmp_path / "grid.csv"),
            "--text-out", str(tmp_path / "grid.txt"),
        ]
        + args_common
    )
    assert rc == 0
    grid_out = capsys.readouterr().out
    rc = main(
        ["cv", "--kernel", "rbf", "--gamma", "0.125", "--c", "16"] + args_common
    )
    assert rc == 0
    cv_out = capsys.readouterr().out
    grid_acc = float(grid_out.rsplit("accuracy=", 1)[1].strip())
    cv_acc = float(cv_out.rsplit(":", 1)[1].strip())
    assert grid_acc == pytest.approx(cv_acc, abs=5e-5)  # grid prints 4 decimals
    csv_lines = (tmp_path / "grid.csv").read_text().splitlines()
    assert csv_lines[0] == "C,param,accuracy"
    assert len(csv_lines) == 2


def test_repeat_eval_report(dataset_dir, tmp_path, capsys):
    rc = main(
        [
            "repeat-eval",
            "--data", str(dataset_dir),
            "--kernel", "rbf",
            "--gamma", "0.125",
            "--c", "16",
            "--repeats", "3",
            "--train-frac", "0.75",
            "--seed", "4",
            "--report", str(tmp_path / "rep.txt"),
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "Iteration 3" in out
    assert (tmp_path / "rep.txt").exists()


def test_preprocess_command(tmp_path, capsys):
    # two hollow blocks on one line
    page = np.full((120, 160), 255, np.uint8)
    for left in (30, 90):
        page[40:80, left : left + 30] = 0
        page[50:70, left + 8 : left + 22] = 255
    page_path = tmp_path / "page.pgm"
    write_pgm(page, page_path)
    out_dir = tmp_path / "chars"
    rc = main(
        ["preprocess", "--input", str(page_path), "--out-dir", str(out_dir), "--emit", "crop"]
    )
    assert rc == 0
    dumped = sorted(out_dir.iterdir())
    assert len(dumped) == 2
    crop = read_pgm(dumped[0])
    assert (crop == 0).any() and (crop == 255).any()


def test_preprocess_debug_dumps(tmp_path):
    page = np.full((80, 120), 255, np.uint8)
    page[30:50, 20:100] = 0
    page_path = tmp_path / "page.pgm"
    write_pgm(page, page_path)
    rc = main(
        [
            "preprocess",
            "--input", str(page_path),
            "--out-dir", str(tmp_path / "out"),
            "--dump-binarized", str(tmp_path / "bin.pgm"),
            "--dump-deskewed", str(tmp_path / "desk.pgm"),
        ]
    )
    assert rc == 0
    assert read_pgm(tmp_path / "bin.pgm").shape == (80, 120)
    assert (tmp_path / "desk.pgm").exists()


def test_sigmoid_requires_slope_and_offset(dataset_dir, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        main(
            [
                "train",
                "--data", str(dataset_dir),
                "--model", str(tmp_path / "s.gsvm"),
                "--kernel", "sigmoid",
            ]
        )
    assert excinfo.value.code == 2


def test_unreadable_input_reports_category(tmp_path, capsys):
    missing = tmp_path / "missing.pgm"
    rc = main(["preprocess", "--input", str(missing), "--out-dir", str(tmp_path / "o")])
    assert rc == 1
    err = capsys.readouterr().err
    assert err.startswith("error: UnreadableFile:")


def test_console_script_installed():
    import shutil
    import subprocess

    exe = shutil.which("glyphsvm")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "datagen" in proc.stdout
