import json

import pandas as pd
import pytest

from qkrylov.cli import main
from qkrylov.output_contract import validate_run_report


def test_cli_help(capsys):
    code = main([])
    captured = capsys.readouterr()
    assert code == 0
    assert "qkrylov" in captured.out
    assert "sylvester" in captured.out


def test_solve_random_writes_valid_report(tmp_path, capsys):
    out = tmp_path / "run.json"
    history = tmp_path / "history.csv"
    code = main(
        [
            "solve",
            "--random",
            "n=8",
            "m=2",
            "--tol",
            "1e-10",
            "--out",
            str(out),
            "--history",
            str(history),
        ]
    )
    assert code == 0
    assert "glqgmres random8 dim=[8,2]" in capsys.readouterr().out
    report = json.loads(out.read_text(encoding="utf-8"))
    assert validate_run_report(report) == []
    assert report["converged"] is True
    assert report["problem"]["rng"] == "philox4x64-10"
    df = pd.read_csv(history)
    assert len(df) == report["iterations"] + 1


def test_same_seed_gives_same_report(tmp_path):
    reports = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        argv = ["solve", "--random", "n=6", "m=3", "--seed", "4", "--method", "glqfom"]
        assert main(argv + ["--out", str(out)]) == 0
        data = json.loads(out.read_text(encoding="utf-8"))
        data.pop("cpu_seconds")
        data["config"].pop("out")
        reports.append(data)
    assert reports[0] == reports[1]


def test_missing_matrix_is_an_input_error(tmp_path, capsys):
    missing = tmp_path / "west0067.mtx"
    code = main(["solve", "--matrix", str(missing)])
    assert code == 1
    assert str(missing) in capsys.readouterr().err


def test_malformed_matrix_reports_line(tmp_path, capsys):
    bad = tmp_path / "bad.mtx"
    bad.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 2.0\n")
    assert main(["solve", "--matrix", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "line 3" in err
    assert "bad.mtx" in err


def test_no_convergence_exit_code(tmp_path):
    out = tmp_path / "run.json"
    code = main(
        ["solve", "--random", "n=10", "m=2", "--tol", "1e-14", "--maxit", "1", "--out", str(out)]
    )
    assert code == 2
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["status"] == "max_iterations"
    assert report["iterations"] == 1


def test_sylvester_planted_prints_error(capsys):
    code = main(
        ["sylvester", "--random", "n=6", "m=3", "--planted", "--tol", "1e-10", "--family", "can445"]
    )
    assert code == 0
    assert "Planted solution error" in capsys.readouterr().out


def test_deblur_writes_restored_png(tmp_path, capsys):
    restored = tmp_path / "restored.png"
    code = main(
        [
            "deblur",
            "--synthetic",
            "16",
            "--blur",
            "uniform:s=2",
            "--maxit",
            "60",
            "--restored",
            str(restored),
        ]
    )
    assert code in (0, 2)
    assert restored.exists()
    out = capsys.readouterr().out
    assert "PSNR" in out
    assert "blurred" in out and "restored" in out


def test_deblur_missing_image(tmp_path, capsys):
    missing = tmp_path / "photo.png"
    assert main(["deblur", "--image", str(missing)]) == 1
    assert str(missing) in capsys.readouterr().err


@pytest.mark.parametrize("parallel", [False, True])
def test_bench_writes_csv(tmp_path, parallel):
    out = tmp_path / "bench.csv"
    argv = ["--quiet", "bench", "--random", "n=6", "m=2", "--tol", "1e-10", "--oracle"]
    argv += ["--out", str(out)]
    if parallel:
        argv.append("--parallel")
    assert main(argv) == 0
    df = pd.read_csv(out)
    assert df["method"].tolist() == ["glqgmres", "glqfom", "glgmres-real", "glfom-real"]
    assert df["dimension"].tolist() == ["[6,2]", "[6,2]", "[24,8]", "[24,8]"]
    assert df["timing_comparable"].tolist() == [not parallel] * 4
    assert (df["oracle_error"] < 1e-7).all()


def test_bench_method_list(tmp_path):
    out = tmp_path / "bench.csv"
    argv = ["--quiet", "bench", "--random", "n=5", "m=1", "--method", "qgmres-stacked,glqgmres"]
    assert main(argv + ["--out", str(out)]) == 0
    df = pd.read_csv(out)
    assert df["dimension"].tolist() == ["[5,1]", "[5,1]"]
