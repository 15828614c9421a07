import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from arofsim.cli import main
from arofsim.planner import PLAN_PRESETS, sweep_feasibility
from arofsim.reports import (EVM_MATRIX_COLUMNS, SCHEMA_VERSION, RunManifest, read_csv,
                             sha256_file, to_json, write_csv, write_feasibility)

FAST = {"ofdm": {"n_symbols": 4}}


@pytest.fixture
def fast_config(tmp_path):
    p = tmp_path / "fast.yaml"
    p.write_text(yaml.safe_dump(FAST))
    return str(p)


def run_cli(*argv):
    return main([str(a) for a in argv])


class TestReports:
    def test_csv_header(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", "demo", ("a", "b"), [(1, 2.5), (True, float("nan"))],
                      "abc")
        meta, rows = read_csv(p)
        assert meta == {"schema_version": SCHEMA_VERSION, "kind": "demo", "config_hash": "abc"}
        assert rows[0] == {"a": "1", "b": "2.5"}
        assert rows[1]["a"] == "true" and rows[1]["b"] == "nan"
        assert p.read_text().startswith("# schema_version: 1\n")

    def test_json_non_finite_and_sorted(self):
        text = to_json({"b": float("inf"), "a": np.float64(1.5), "c": np.array([1, 2])})
        d = json.loads(text)
        assert list(d) == ["a", "b", "c"] and d["b"] == "inf" and d["c"] == [1, 2]

    def test_feasibility_csv(self, tmp_path):
        table = sweep_feasibility(PLAN_PRESETS["400G"], [200e6, 1.6e9])
        meta, rows = read_csv(write_feasibility(tmp_path / "f.csv", table, "400G", "h"))
        assert meta["kind"] == "feasibility"
        assert rows[0]["preset"] == "400G"
        assert float(rows[0]["free_total_ghz"]) == 17.54

    def test_manifest_checksums(self, tmp_path):
        f = tmp_path / "x.txt"
        f.write_text("hello")
        m = RunManifest("run", "h", [0], "0.1.0", "2026-01-01T00:00:00+00:00")
        m.add_file(f, tmp_path)
        m.add_cell("c", "ok")
        m.write(tmp_path / "manifest.json")
        d = json.loads((tmp_path / "manifest.json").read_text())
        assert d["files"][0]["path"] == "x.txt"
        assert d["files"][0]["sha256"] == sha256_file(f)
        assert d["cells"][0]["status"] == "ok"


class TestCli:
    def test_plan_400g(self, tmp_path, capsys):
        assert run_cli("plan", "--preset", "400G", "--out", tmp_path) == 0
        meta, rows = read_csv(tmp_path / "feasibility_400G.csv")
        assert all(float(r["free_total_ghz"]) == 17.54 for r in rows)
        assert meta["schema_version"] == SCHEMA_VERSION
        summary = json.loads(capsys.readouterr().out)
        assert summary["400G"]["free_total_ghz"] == 17.54
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        listed = {f["path"] for f in manifest["files"]}
        assert {"config.yaml", "feasibility_400G.csv"} <= listed
        assert manifest["config_hash"] == meta["config_hash"]

    def test_run_is_byte_identical(self, tmp_path, fast_config):
        outs = [tmp_path / "a", tmp_path / "b"]
        for o in outs:
            assert run_cli("run", "--config", fast_config, "--preset", "100G-topoB-400MHz",
                           "--seed", 3, "--out", o) == 0
        a, b = ((o / "result.json").read_bytes() for o in outs)
        assert a == b
        d = json.loads(a)
        assert d["topology"] == "B" and d["seed"] == 3 and len(d["config_hash"]) == 64
        for name in ("psd_combined.csv", "psd_wss_arof_low.csv", "constellation_low.csv"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
        _, psd = read_csv(outs[0] / "psd_combined.csv")
        assert list(psd[0]) == ["freq_ghz", "psd_dbm_per_hz"]
        _, const = read_csv(outs[0] / "constellation_high.csv")
        assert list(const[0]) == ["i", "q", "ref_i", "ref_q"]
        files = json.loads((outs[0] / "manifest.json").read_text())["files"]
        for f in files:
            assert f["sha256"] == sha256_file(outs[0] / f["path"])

    def test_sweep_columns(self, tmp_path, fast_config):
        assert run_cli("sweep", "--config", fast_config, "--preset", "100G-topoA-200MHz",
                       "--out", tmp_path) == 0
        meta, rows = read_csv(tmp_path / "evm_matrix.csv")
        assert meta["kind"] == "evm_matrix"
        assert tuple(rows[0]) == EVM_MATRIX_COLUMNS
        assert len(rows) == 1 and rows[0]["pass_3gpp"] == "true/true"
        _, cells = read_csv(tmp_path / "sweep_cells.csv")
        assert cells[0]["status"] == "ok"

    def test_config_error_json(self, tmp_path, capsys):
        bad = tmp_path / "bad.yaml"
        bad.write_text("plant:\n  attenuation: 0.2\n")
        code = run_cli("run", "--config", bad, "--out", tmp_path / "o")
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "ConfigError" and "plant.attenuation" in err["message"]
        assert json.loads((tmp_path / "o" / "error.json").read_text()) == err

    def test_infeasible_run_fails(self, tmp_path, capsys):
        code = run_cli("run", "--preset", "100G-topoA-2.4GHz", "--out", tmp_path)
        assert code != 0
        assert "infeasible" in json.loads(capsys.readouterr().err)["message"]

    def test_written_config_reloads(self, tmp_path, fast_config):
        assert run_cli("plan", "--config", fast_config, "--out", tmp_path) == 0
        first = json.loads((tmp_path / "manifest.json").read_text())["config_hash"]
        assert run_cli("plan", "--config", tmp_path / "config.yaml", "--out", tmp_path / "2") == 0
        assert json.loads((tmp_path / "2" / "manifest.json").read_text())["config_hash"] == first

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "arofsim", "plan", "--preset", "100G",
                               "--out", str(tmp_path)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout)["100G"]["free_total_ghz"] == 12.36
        bad = subprocess.run([sys.executable, "-m", "arofsim", "plan", "--jobs", "0",
                              "--out", str(tmp_path)], capture_output=True, text=True)
        assert bad.returncode != 0 and json.loads(bad.stderr)["error"] == "ConfigError"
