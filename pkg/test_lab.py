"""Tests for input files, experiment commands and the command-line entry point."""

import csv
import json

import numpy as np
import pytest

from app.errors import InvalidP, MatrixFileError
from app.lab.loader import (
    load_group,
    load_map,
    load_operand,
    load_symbol,
    map_from_dict,
    map_to_dict,
    symbol_from_dict,
    symbol_to_dict,
)
from app.lab.report import AMPLIFIED_FILE, REPORT_FILE, cmd_dec_norm, cmd_estimate, cmd_verify, write_csv
from app.lab.sample_data import sample_symbol, write_samples
from app.lab.suites import CB_DEC_TRIALS, QUICK_TRIALS, SUITES, LabContext, schur_dec_schedule, significant
from app.linalg.core import INF
from app.main import EXIT_INPUT, EXIT_OK, main
from app.superop.superoperator import transpose_map


@pytest.fixture
def samples(tmp_path):
    write_samples(tmp_path)
    return tmp_path


@pytest.fixture
def ctx():
    return LabContext(seed=1, trials=1, restarts=2, quick=True)


def test_samples_are_written(samples):
    names = sorted(p.name for p in samples.glob("*.json"))
    assert names == sorted([
        "identity.json",
        "transpose2.json",
        "transpose3.json",
        "pauli_row.json",
        "clock_shift_row.json",
        "pauli_group.json",
        "pauli_symbol.json",
    ])
    assert np.allclose(load_map(samples / "transpose2.json").choi, transpose_map(2).choi)
    assert load_group(samples / "pauli_group.json").center_dimension() == 1
    kind, values, alg = load_symbol(samples / "pauli_symbol.json")
    assert kind == "fourier" and alg.order == 4
    assert np.allclose(values, sample_symbol())


def test_map_and_symbol_dicts():
    t = transpose_map(2) * 1j
    again = map_from_dict(map_to_dict(t, "it"))
    assert np.allclose(again.choi, t.choi)
    kind, values, alg = symbol_from_dict(symbol_to_dict("schur", [[1.0, 2.0j], [0.0, 1.0]]))
    assert kind == "schur" and alg is None
    assert values[0, 1] == 2.0j


def test_operand_of_symbol_file_is_its_multiplier(samples):
    t, alg, kind = load_operand(samples / "pauli_symbol.json")
    assert kind == "fourier"
    assert (t.in_dim, t.out_dim) == (4, 4)
    assert np.allclose(t(alg.lam(1)), sample_symbol()[1] * alg.lam(1))


def test_bad_files_raise_matrix_file_error(tmp_path):
    text = tmp_path / "map.txt"
    text.write_text("{}")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"in_dim": 2, "out_dim": 2, "choi": {"rows": 2, "cols": 2, "re": [1, 0, 0, 1]}}))
    for path in (text, broken, listing, wrong, tmp_path / "missing.json"):
        with pytest.raises(MatrixFileError):
            load_map(path)


def test_dec_norm_command(samples, ctx, tmp_path):
    out = tmp_path / "out"
    report = cmd_dec_norm(samples / "transpose2.json", INF, ctx, out_dir=out)
    assert report.results["dec_norm"] == pytest.approx(2.0, rel=1e-4)
    assert report.results["cb_norm"] == pytest.approx(2.0, rel=1e-4)
    assert (out / "dec_witness.json").exists()
    assert len(report.inputs_digest) == 64

    one = cmd_dec_norm(samples / "transpose2.json", 1.0, ctx)
    assert one.results["dec_norm"] == pytest.approx(2.0, rel=1e-4)
    with pytest.raises(InvalidP):
        cmd_dec_norm(samples / "transpose2.json", 1.5, ctx)

    symbol = cmd_dec_norm(samples / "pauli_symbol.json", 1.5, ctx)
    assert symbol.results["multiplier"] == "fourier"
    assert symbol.results["dec_norm"] == pytest.approx(1.0, rel=1e-4)


def test_estimate_command(samples, ctx):
    report = cmd_estimate(samples / "identity.json", 2.0, 1, ctx)
    assert report.results["value"] == pytest.approx(1.0)
    assert report.results["estimate"]["exact"]


def test_verify_command(ctx):
    report = cmd_verify("unitary-row", ctx)
    assert report.passed
    assert report.results["dec_row_2"] == pytest.approx(2.0, rel=1e-4)
    assert {a.suite for a in report.assertions} == {"unitary-row"}


def test_write_csv(tmp_path):
    path = write_csv(tmp_path / "t.csv", [{"n": 2, "norm": 1.5}, {"n": 3, "norm": 1.7}])
    with path.open() as f:
        rows = list(csv.DictReader(f))
    assert rows == [{"n": "2", "norm": "1.5"}, {"n": "3", "norm": "1.7"}]


def test_significant_rounding():
    assert significant(1.23456789012345, 4) == 1.235
    assert significant(0.0) == 0.0


def test_main_exit_codes(tmp_path, capsys):
    assert main(["samples", "--out", str(tmp_path / "s")]) == EXIT_OK
    assert "identity.json" in capsys.readouterr().out
    bad = tmp_path / "bad.json"
    bad.write_text("[]")
    assert main(["dec-norm", str(bad)]) == EXIT_INPUT
    assert main(["dec-norm", str(tmp_path / "s" / "transpose2.json"), "--p", "3"]) == EXIT_INPUT


def test_main_verify_writes_report(tmp_path, capsys):
    code = main(["verify", "unitary-row", "--quick", "--trials", "1", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / "verify-unitary-row.json").read_text())
    assert data["command"] == "verify unitary-row"
    assert json.loads(capsys.readouterr().out)["seed"] == data["seed"]


def test_schur_dec_schedule_reaches_size_eight():
    full = schur_dec_schedule(20, quick=False)
    assert len(full) == 20
    assert max(full) == 8
    assert full[-4:] == [5, 6, 7, 8]
    assert set(full[:16]) == {2, 3, 4}
    assert max(schur_dec_schedule(2, quick=True)) <= 4
    assert schur_dec_schedule(2, quick=False) == [5, 6]


def test_amplified_norm_battery(ctx):
    report = cmd_verify("amplified-norm", ctx)
    assert report.passed
    names = {a.name for a in report.assertions}
    assert names == {"below_dec", "p2_exact", "cp_unit_attains"}
    rows = report.tables["amplified"]
    assert {row["p"] for row in rows} == {1.5, 2.0, 3.0, "inf"}


def test_trial_counts():
    assert LabContext().count(CB_DEC_TRIALS) == 100
    assert LabContext(quick=True).count(CB_DEC_TRIALS) == QUICK_TRIALS
    assert LabContext(trials=5).count(CB_DEC_TRIALS) == 5


def test_quick_report_runs_every_battery(tmp_path, capsys):
    code = main(["report", "--quick", "--out", str(tmp_path)])
    assert code == EXIT_OK
    data = json.loads((tmp_path / REPORT_FILE).read_text())
    for name in SUITES:
        assert data["results"][f"{name}.passed"] is True
        assert data["results"][f"{name}.wall_time_s"] >= 0.0
    with (tmp_path / AMPLIFIED_FILE).open() as f:
        assert list(csv.DictReader(f))
    capsys.readouterr()
