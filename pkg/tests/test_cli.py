import csv
import functools
import json

import pytest

from bqa import __version__, cli
from bqa.cli import main, read_header
from bqa.evolve import evolve
from bqa.instances import ProblemInstance, save_instance


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def rows(path):
    with open(path) as fh:
        assert fh.readline().startswith("# ")
        return list(csv.DictReader(fh))


def test_levels_header_and_midpoint(capsys):
    code, out, _ = run(["levels", "--points", "3"], capsys)
    assert code == 0
    header, columns, *lines = out.splitlines()
    payload = json.loads(header[2:])
    assert payload["command"] == "levels" and payload["version"] == __version__
    assert payload["config"]["b0_ratio"] == 20.0
    assert columns == "t_over_tf,E0,E1,E2"
    mid = [float(x) for x in lines[1].split(",")]
    assert mid[0] == 0.5
    assert mid[1:] == pytest.approx([-1, 0, 1], abs=1e-12)


def test_output_is_byte_identical_and_replayable(tmp_path, capsys):
    first, second, replayed = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    args = ["single", "--tf", "20", "--samples", "5", "--tf-sweep", "5,20", "--tol", "1e-10"]
    assert run(args + ["--out", str(first)], capsys)[0] == 0
    assert run(args + ["--out", str(second)], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()
    sweep = tmp_path / "a.tf_sweep.csv"
    assert sweep.exists() and len(rows(sweep)) == 2
    assert run(["replay", str(first), "--out", str(replayed)], capsys)[0] == 0
    assert replayed.read_bytes() == first.read_bytes()
    assert (tmp_path / "c.tf_sweep.csv").read_bytes() == sweep.read_bytes()
    command, config = read_header(first)
    assert command == "single" and config["tf_sweep"] == [5.0, 20.0]


def test_field_sweep_antisymmetry(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code, _, _ = run(["field-sweep", "--h-values=-0.5,0,0.5", "--tf", "50", "--tol", "1e-10", "--out", str(out)], capsys)
    assert code == 0
    table = rows(out)
    lo, zero, hi = table
    assert float(lo["p_minus"]) == pytest.approx(float(hi["p_plus"]), abs=1e-8)
    assert float(zero["p_plus"]) == pytest.approx(float(zero["p_minus"]), abs=1e-8)


def test_sampling_default_instance(capsys):
    code, out, _ = run(["sampling", "--method", "qa", "--tf", "100", "--tol", "1e-10"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert json.loads(lines[0][2:])["config"]["instance"]["n"] == 5
    table = list(csv.DictReader(lines[1:]))
    assert len(table) == 6
    assert {r["method"] for r in table} == {"QA"}


def test_random_bench_outputs(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code, _, _ = run(["random-bench", "--n", "3", "--seeds", "0..3", "--tf", "20", "--tol", "1e-9", "--out", str(out)], capsys)
    assert code == 0
    hist = rows(out)
    assert len(hist) == 2 * 2 * 20
    assert sum(int(r["count"]) for r in hist if r["subset"] == "all" and r["method"] == "BQA") == 4
    records = [json.loads(line) for line in (tmp_path / "bench.records.jsonl").read_text().splitlines()]
    assert len(records) == 8
    assert set(records[0]) == {"seed", "method", "success", "zero_leakage", "energy", "nontrivial"}
    summary = rows(tmp_path / "bench.summary.csv")
    assert summary[-1]["subset"] == "nontrivial_fraction"


def test_random_bench_workers_env(tmp_path, capsys, monkeypatch):
    args = ["random-bench", "--n", "3", "--seeds", "0..1", "--tf", "10", "--method", "qa", "--tol", "1e-9"]
    serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
    assert run(args + ["--out", str(serial)], capsys)[0] == 0
    monkeypatch.setenv("BQA_WORKERS", "2")
    assert run(args + ["--out", str(parallel)], capsys)[0] == 0
    assert serial.read_bytes() == parallel.read_bytes()
    monkeypatch.setenv("BQA_WORKERS", "zero")
    assert run(args, capsys)[0] == 1


def test_phase_outputs(tmp_path, capsys):
    out = tmp_path / "phase.csv"
    code, _, _ = run(["phase", "--a-max", "1", "--a-step", "0.5", "--b-step", "0.5", "--out", str(out)], capsys)
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["A", "B", "m_s", "order", "energyDensity"]
    assert len(table) == 3 * 7
    assert rows(tmp_path / "phase.boundary.csv")
    overlay = rows(tmp_path / "phase.protocol.csv")
    assert float(overlay[0]["B"]) == pytest.approx(-10.0)


def test_nested_check(capsys):
    code, out, _ = run(["nested-check", "--tf", "10", "--samples", "4"], capsys)
    assert code == 0
    summary = out.split("# table: summary\n")[1].splitlines()
    values = dict(zip(summary[0].split(","), map(float, summary[1].split(","))))
    assert values["max_probability_deviation"] < 1e-6 and values["max_leakage"] < 1e-9


@pytest.mark.parametrize(
    "args",
    [
        ["single", "--tf", "-3"],
        ["single", "--protocol", "linear"],
        ["random-bench", "--seeds", "5..2"],
        ["random-bench", "--seeds", "a..b"],
        ["ferro", "--method", "sa"],
        ["nosuch"],
        [],
    ],
)
def test_invalid_config_exit_code(args, capsys):
    with pytest.raises(SystemExit) as info:
        main(args)
    assert info.value.code == 1


def test_bad_instance_file_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2, "bonds": [[0, 5, 1.0]]}')
    code, _, err = run(["sampling", "--instance", str(bad)], capsys)
    assert code == 1 and "bonds[0]" in err
    code, _, _ = run(["replay", str(bad)], capsys)
    assert code == 1


def test_capacity_exit_code(tmp_path, capsys):
    big = tmp_path / "big.json"
    save_instance(ProblemInstance(25, [(0, 1, 1.0)], [0.0] * 25), big)
    code, _, err = run(["sampling", "--instance", str(big)], capsys)
    assert code == 3 and "capacity" in err


def test_integration_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "evolve", functools.partial(evolve, max_steps=3))
    code, _, err = run(["single", "--tf", "50", "--tf-sweep", ""], capsys)
    assert code == 2 and "integration failed" in err
