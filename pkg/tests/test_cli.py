import csv

import pytest

from fewsim.cli import main
from fewsim.dataset import bundled_dataset_path
from fewsim.middleware import CaseStore


def test_validate_dataset_ok(capsys):
    assert main(["validate-dataset", str(bundled_dataset_path())]) == 0
    out = capsys.readouterr().out
    assert "is valid" in out
    assert "12 districts" in out


def test_validate_dataset_bad_path(tmp_path, capsys):
    assert main(["validate-dataset", str(tmp_path)]) == 1
    assert "invalid dataset" in capsys.readouterr().err


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_malformed_adjust_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--case", "c", "--climate", "ssp245",
              "--adjust", "municipal_wue:0:10", "--data-dir", str(tmp_path)])
    assert exc.value.code == 2


def test_simulate_and_export(tmp_path, capsys):
    data_dir = tmp_path / "store"
    rc = main(["simulate", "--case", "cli_case", "--climate", "ssp245",
               "--adjust", "municipal_wue:0:10:10",
               "--data-dir", str(data_dir), "--workers", "2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "2 scenarios queued" in out
    assert "finished (2/2)" in out

    store = CaseStore(data_dir)
    assert store.has_result("cli_case", "ssp245_base")
    assert store.has_result("cli_case", "ssp245_10")

    out_csv = tmp_path / "results.csv"
    rc = main(["export", "--case", "cli_case", "--out", str(out_csv),
               "--data-dir", str(data_dir)])
    assert rc == 0
    rows = list(csv.DictReader(open(out_csv)))
    assert {r["scenario"] for r in rows} == {"ssp245_base", "ssp245_10"}
    assert any(r["branch"] == "water/demand/municipal" for r in rows)

    idx_csv = tmp_path / "indices.csv"
    rc = main(["export", "--case", "cli_case", "--out", str(idx_csv),
               "--indices", "--year", "2030", "--data-dir", str(data_dir)])
    assert rc == 0
    rows = list(csv.DictReader(open(idx_csv)))
    assert {r["year"] for r in rows} == {"2030"}
    assert len(rows) == 2 * 10  # two scenarios, ten indices


def test_simulate_unknown_variable_fails(tmp_path, capsys):
    rc = main(["simulate", "--case", "bad", "--climate", "ssp245",
               "--adjust", "gravity:0:10:10", "--data-dir", str(tmp_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_export_unknown_case_fails(tmp_path, capsys):
    rc = main(["export", "--case", "ghost", "--out", str(tmp_path / "x.csv"),
               "--data-dir", str(tmp_path)])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_fit_fmlm_writes_coefficients(tmp_path, capsys):
    out = tmp_path / "coefs.csv"
    rc = main(["fit-fmlm", "--out", str(out), "--max-iter", "50"])
    assert rc == 0
    assert out.exists()
    text = capsys.readouterr().out
    assert "loglik=" in text
    rows = list(csv.DictReader(open(out)))
    assert {r["crop"] for r in rows}  # non-empty, base crop omitted
    assert "corn" not in {r["crop"] for r in rows}
