import json

import pytest

from dacopt import artifacts
from dacopt.cli import main
from dacopt.model import Basis, load_basis, save_basis


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)] if argv[0] != "export-lut" else list(argv))


def test_metric_command(tmp_path, capsys):
    assert run(tmp_path, "metric") == 0
    rows = artifacts.read_table_csv((tmp_path / "metric.csv").read_text())
    byname = {r["name"]: r for r in rows}
    assert float(byname["thermometer"]["normalized"]) == 1.0
    assert float(byname["4T+4B"]["normalized"]) == pytest.approx(1.2045, abs=1e-4)
    assert "published-13" in capsys.readouterr().out


def test_simulate_command(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("architectures: [binary, segmented:4]\n")
    assert run(tmp_path, "simulate", "--config", str(cfg), "--realizations", "300", "--seed", "3") == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config"]["seed"] == 3
    assert [a["name"] for a in summary["architectures"]] == ["binary", "4T+4B"]
    sndr = (tmp_path / "4T+4B.sndr.csv").read_text()
    assert len(artifacts.read_table_csv(sndr)) == 300


def test_optimize_basis_then_export_lut(tmp_path):
    basis_file = tmp_path / "b13.yaml"
    save_basis(Basis((1, 2, 4, 6, 8, 9, 12, 16, 17, 25, 32, 61, 66), 8), basis_file)
    assert run(tmp_path, "optimize", "--basis", str(basis_file)) == 0
    mapping = tmp_path / "b13.mapping.csv"
    assert mapping.exists() and (tmp_path / "b13.trace.csv").exists()
    assert main(["export-lut", str(tmp_path / "b13.basis.yaml"), str(mapping), "--out", str(tmp_path)]) == 0
    table = artifacts.parse_lut((tmp_path / "b13.lut.txt").read_text())
    table.check()


def test_optimize_anneal_small(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("n_bits: 4\nanneal:\n  restarts: 2\n  cooling_factor: 0.7\n  steps_per_temperature: 5\n")
    assert run(tmp_path, "optimize", "--config", str(cfg), "--length", "6") == 0
    basis = load_basis(tmp_path / "optimized-6.basis.yaml")
    assert basis.length == 6 and basis.n_bits == 4
    trace = artifacts.read_table_csv((tmp_path / "optimized-6.trace.csv").read_text())
    assert trace[0]["temperature"] != ""


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("n_bits: 8\nweights: [2, 2, 4, 8, 16, 32, 64, 128]\n")
    assert run(tmp_path, "optimize", "--basis", str(bad)) == 3
    assert "incomplete" in capsys.readouterr().err
    assert run(tmp_path, "optimize", "--length", "5") == 3
    assert run(tmp_path, "simulate", "--sigma-delta", "0") == 2
    assert run(tmp_path, "metric", "--config", str(tmp_path / "missing.yaml")) == 2
    cfg = tmp_path / "c.yaml"
    cfg.write_text("pmf: uniform\nsimulation:\n  mode: sampled\n")
    assert run(tmp_path, "simulate", "--config", str(cfg)) == 2


def test_export_lut_bad_mapping(tmp_path):
    basis_file = tmp_path / "b.yaml"
    save_basis(Basis((1, 2), 2), basis_file)
    mapping = tmp_path / "m.csv"
    mapping.write_text("codeword,bits,value\n0,00,0\n1,10,1\n2,01,2\n3,01,2\n")
    assert main(["export-lut", str(basis_file), str(mapping), "--out", str(tmp_path)]) == 4
    assert not (tmp_path / "m.lut.txt").exists()
    mapping.write_text("codeword,bits,value\n0,00,0\n1,1x,1\n")
    assert main(["export-lut", str(basis_file), str(mapping), "--out", str(tmp_path)]) == 2


def test_reproduce_small(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("simulation:\n  realizations: 200\ndescent:\n  restarts: 2\n")
    assert run(tmp_path, "reproduce", "--config", str(cfg)) == 0
    for name in ("fig2_metric.csv", "fig3_mean_sndr.csv", "fig4_yield_sndr.csv",
                 "table1_check.txt", "table2_check.txt"):
        assert (tmp_path / name).exists()
    t2 = (tmp_path / "table2_check.txt").read_text()
    assert ",NO," not in t2
