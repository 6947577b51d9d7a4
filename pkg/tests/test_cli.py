import json
import subprocess
import sys

import pytest

from pracsim.cli import main, parse_axis
from pracsim.config import ConfigError


def test_simulate_attack_exit_code(config_dir, tmp_path, capsys):
    code = main(["simulate", "--config", str(config_dir / "panopticon_jailbreak.json"), "--out", str(tmp_path)])
    assert code == 2
    report = json.loads((tmp_path / "panopticon_jailbreak.report.json").read_text())
    assert report["max_acts"] == 1152 and report["attack_success"] is True
    assert (tmp_path / "panopticon_jailbreak.series.csv").exists()
    assert "ATTACK SUCCESS" in capsys.readouterr().out


def test_simulate_safe_exit_code_and_env_out(config_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("PRACSIM_OUT", str(tmp_path))
    assert main(["simulate", "--config", str(config_dir / "moat64_fuzz.json")]) == 0
    assert (tmp_path / "moat64_fuzz.report.json").exists()


def test_simulate_csv_format(config_dir, tmp_path):
    main(["simulate", "--config", str(config_dir / "idle.json"), "--out", str(tmp_path), "--format", "csv"])
    lines = (tmp_path / "idle.report.csv").read_text().splitlines()
    assert lines[0].startswith("# pracsim report")
    assert "max_acts" in lines[1].split(",")


def test_outputs_are_byte_identical(config_dir, tmp_path):
    cfg = str(config_dir / "moat64_fuzz.json")
    for d in ("a", "b"):
        main(["simulate", "--config", cfg, "--out", str(tmp_path / d)])
    for name in ("moat64_fuzz.report.json", "moat64_fuzz.series.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "c"), "--seed", "1234"])
    assert (tmp_path / "c" / "moat64_fuzz.report.json").read_bytes() != \
        (tmp_path / "a" / "moat64_fuzz.report.json").read_bytes()


def test_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"name": "x", "bogus": 1}))
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert "bogus" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.json")]) == 1


def test_sweep_writes_model_and_simulation(config_dir, tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = str(config_dir / "moat64_single_row.json")
    assert main(["sweep", "--config", cfg, "--axis", "ath=32,64", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1].split(",")[:4] == ["index", "ath", "model", "simulated"]
    assert len(lines) == 4
    # refuses to overwrite
    assert main(["sweep", "--config", cfg, "--axis", "ath=32,64", "--out", str(out)]) == 1
    parallel = tmp_path / "parallel.csv"
    assert main(["sweep", "--config", cfg, "--axis", "ath=32,64", "--out", str(parallel), "--jobs", "2"]) == 0
    assert parallel.read_bytes() == out.read_bytes()


def test_parse_axis():
    assert parse_axis("ath=32,64") == ("ath", [32, 64])
    assert parse_axis("ath=16..64:16") == ("ath", [16, 32, 48, 64])
    assert parse_axis("mitigation_period=none,5") == ("mitigation_period", [None, 5])
    for bad in ("ath", "colour=1", "ath=x"):
        with pytest.raises(ConfigError):
            parse_axis(bad)


def test_model_command(capsys):
    assert main(["model", "--what", "ratchet"]) == 0
    out = capsys.readouterr().out
    assert "ratchet,ATH=64 L=1,7325" in out
    assert main(["model", "--what", "storage", "--format", "json"]) == 0
    json.loads(capsys.readouterr().out)


def test_repro_missing_directory(tmp_path):
    assert main(["repro", "--config", str(tmp_path / "nope")]) == 1


def test_repro_subset(capsys):
    assert main(["repro", "--only", "4,10"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 14 and "[FAIL]" not in out


def test_dump_trace(config_dir, tmp_path):
    out = tmp_path / "trace.csv"
    assert main(["dump-trace", "--config", str(config_dir / "moat64_ratchet_micro.json"), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "clock_ns,bank,row"
    assert len(lines) > 4 * 64


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pracsim", "model", "--what", "storage"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "storage" in proc.stdout
