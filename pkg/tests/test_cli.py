"""Command-line interface: subcommands, exit codes, file round trips."""

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from icx import BindingTable, ErrorSpec, InitSpec, ModelSpec, generate_path
from icx.cli import _read_series, main
from icx.experiment import REPORT_HEADER

SUBCOMMANDS = ("simulate", "fit", "select", "binding", "limits", "experiment", "figures")


def test_help_exits_zero_for_every_subcommand(capsys):
    for args in [["--help"]] + [[name, "--help"] for name in SUBCOMMANDS]:
        with pytest.raises(SystemExit) as excinfo:
            main(args)
        assert excinfo.value.code == 0
        assert "usage" in capsys.readouterr().out


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "icx" in capsys.readouterr().out


def test_unknown_subcommand_fails(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2
    capsys.readouterr()


def test_simulate_fit_select_round_trip(tmp_path, capsys, table):
    out = tmp_path / "path.csv"
    code = main(["simulate", "ex:rho=1.05", "-n", "60", "--seed", "7", "-o", str(out)])
    assert code == 0
    assert "wrote 61 rows" in capsys.readouterr().out

    code = main(["fit", str(out), "--estimator", "both"])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0].startswith("ols: rho_hat=")
    assert lines[1].startswith("iie: rho_hat=")

    code = main(["select", str(out), "--criterion", "all"])
    assert code == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == 3
    assert all("k_hat=" in line for line in lines)
    assert lines[0].startswith("aic:")


def test_simulate_output_round_trips_exactly(tmp_path, capsys):
    out = tmp_path / "path.csv"
    assert main(["simulate", "ur", "-n", "30", "--seed", "5", "-o", str(out)]) == 0
    capsys.readouterr()
    values = _read_series(out)
    sample = generate_path(ModelSpec("ur"), ErrorSpec(), InitSpec(), 30, seed=5)
    assert_array_equal(values, sample.values)


def test_simulate_seed_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "ur", "-n", "20", "--seed", "9", "-o", str(a)])
    main(["simulate", "ur", "-n", "20", "--seed", "9", "-o", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_env_seed_is_the_default(tmp_path, capsys, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("ICX_SEED", "42")
    main(["simulate", "ur", "-n", "20", "-o", str(a)])
    monkeypatch.delenv("ICX_SEED")
    main(["simulate", "ur", "-n", "20", "--seed", "42", "-o", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_env_seed_must_be_integer(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ICX_SEED", "not-a-number")
    code = main(["simulate", "ur", "-n", "20", "-o", str(tmp_path / "x.csv")])
    assert code == 1
    assert "ICX_SEED" in capsys.readouterr().err


def test_bad_model_string_exits_one(tmp_path, capsys):
    code = main(["simulate", "me:alpha=2", "-n", "20", "-o", str(tmp_path / "x.csv")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_missing_input_exits_two(tmp_path, capsys):
    code = main(["fit", str(tmp_path / "absent.csv")])
    assert code == 2
    assert "i/o error" in capsys.readouterr().err


def test_constant_series_exits_one(tmp_path, capsys):
    path = tmp_path / "flat.csv"
    path.write_text("t,x\n" + "\n".join(f"{t},0.0" for t in range(6)) + "\n")
    code = main(["select", str(path)])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_read_series_rejects_malformed_rows(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,x\n0,1.0\n1\n")
    with pytest.raises(ValueError, match=":3:"):
        _read_series(path)
    path.write_text("t,x\n0,abc\n")
    with pytest.raises(ValueError, match="bad value"):
        _read_series(path)
    path.write_text("t,x\n0,1.0\n1,2.0\n")
    with pytest.raises(ValueError, match="at least 4 rows"):
        _read_series(path)


def test_read_series_skips_comments_and_header(tmp_path):
    path = tmp_path / "annotated.csv"
    path.write_text("# note\nt,x\n0,1.0\n1,2.0\n\n2,3.0\n3,4.0\n")
    assert_array_equal(_read_series(path), [1.0, 2.0, 3.0, 4.0])


def test_binding_rebuild_and_check(tmp_path, capsys):
    path = tmp_path / "table.csv"
    code = main(
        ["binding", "--rebuild", "--table", str(path), "--c-min", "-3", "--c-max", "3", "--step", "1"]
    )
    assert code == 0
    assert "built binding table: 7 points" in capsys.readouterr().out

    code = main(["binding", "--check", "--table", str(path), "--points", "7", "--seed", "1"])
    assert code == 0
    assert "(ok)" in capsys.readouterr().out

    # Corrupt one tabulated value; the check must fail loudly.
    loaded = BindingTable.load(path)
    bumped = loaded.h_values.copy()
    bumped[2] += 1e-4
    BindingTable(loaded.c_grid, bumped).save(path)
    code = main(["binding", "--check", "--table", str(path), "--points", "7", "--seed", "1"])
    assert code == 1
    assert "FAILED" in capsys.readouterr().out


def test_binding_check_missing_table_exits_two(tmp_path, capsys):
    code = main(["binding", "--check", "--table", str(tmp_path / "absent.csv")])
    assert code == 2
    capsys.readouterr()


def test_limits_closed_form_to_stdout(capsys):
    code = main(["limits", "--case", "t2b", "--pi", "0.5"])
    assert code == 0
    out = capsys.readouterr().out
    assert "case,branch,pi,omega2,probability,draws,se" in out
    assert "closed_form" in out
    assert "0.157299" in out


def test_limits_monte_carlo_writes_file(tmp_path, capsys):
    out = tmp_path / "limits.csv"
    code = main(
        [
            "limits", "--case", "t1", "--pi", "2", "--draws", "500",
            "--steps", "256", "--seed", "1", "-o", str(out),
        ]
    )
    assert code == 0
    text = out.read_text()
    assert "monte_carlo" in text
    assert ",500," in text
    capsys.readouterr()


def test_limits_accepts_inf_pi(capsys):
    code = main(["limits", "--case", "t1", "--pi", "inf"])
    assert code == 0
    assert "1.000000" in capsys.readouterr().out


def test_limits_rejects_bad_case(capsys):
    code = main(["limits", "--case", "t9", "--pi", "1"])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_experiment_subcommand(tmp_path, capsys):
    config = tmp_path / "grid.toml"
    config.write_text(
        """
reps = 50
base_seed = 6

[grid]
models = ["ur"]
n = [20]
estimators = ["ols"]
penalties = ["aic", "bic"]
"""
    )
    out = tmp_path / "report.csv"
    code = main(["experiment", str(config), "-o", str(out)])
    assert code == 0
    assert "2 cells at reps=50" in capsys.readouterr().out
    lines = out.read_text().strip().split("\n")
    assert lines[0] == REPORT_HEADER
    assert len(lines) == 3
    assert lines[1].endswith(",6")  # seed column from the config

    # CLI overrides beat the config file.
    code = main(["experiment", str(config), "-o", str(out), "--reps", "25", "--seed", "8"])
    assert code == 0
    capsys.readouterr()
    lines = out.read_text().strip().split("\n")
    assert ",25," in lines[1]
    assert lines[1].endswith(",8")

    json_out = tmp_path / "report.json"
    code = main(["experiment", str(config), "-o", str(json_out), "--format", "json"])
    assert code == 0
    capsys.readouterr()
    assert '"cells"' in json_out.read_text()


def test_experiment_env_seed_overrides_config(tmp_path, capsys, monkeypatch):
    config = tmp_path / "grid.toml"
    config.write_text(
        """
reps = 20
base_seed = 6

[[cells]]
model = "ur"
n = 20
estimator = "ols"
penalty = "aic"
"""
    )
    out = tmp_path / "report.csv"
    monkeypatch.setenv("ICX_SEED", "99")
    assert main(["experiment", str(config), "-o", str(out)]) == 0
    capsys.readouterr()
    assert out.read_text().strip().split("\n")[1].endswith(",99")


def test_experiment_bad_config_exits_one(tmp_path, capsys):
    config = tmp_path / "bad.toml"
    config.write_text("not toml at all")
    code = main(["experiment", str(config), "-o", str(tmp_path / "out.csv")])
    assert code == 1
    capsys.readouterr()


def test_figures_writes_trajectory_files(tmp_path, capsys):
    out_dir = tmp_path / "figures"
    code = main(["figures", "--n-list", "10,12", "--seed", "3", "-o", str(out_dir)])
    assert code == 0
    assert "wrote 2 trajectory file(s)" in capsys.readouterr().out
    for n in (10, 12):
        lines = (out_dir / f"trajectories_n{n}.csv").read_text().strip().split("\n")
        assert lines[0] == "t,ur,ltue:c=1,me:alpha=0.1,me:alpha=0.5"
        assert len(lines) == n + 2
        columns = np.array([[float(v) for v in line.split(",")[1:]] for line in lines[1:]])
        assert np.all(columns[0] == 0.0)
        assert np.all(np.isfinite(columns))
