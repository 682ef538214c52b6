import json
from pathlib import Path

import pytest

from normtower.cli import CampaignConfig, ConfigError, emit_markdown, main


def write_cfg(tmp_path: Path, doc: dict) -> Path:
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


BASE = {
    "p": [3],
    "d": [1],
    "n_max": 1,
    "precision": 4,
    "curve": "ss3",
    "checks": ["trace"],
}


def test_config_parsing_and_overrides():
    cfg = CampaignConfig.from_json(dict(BASE), checks_override=["cyclicity"],
                                   seed_override=99)
    assert cfg.checks == ["cyclicity"]
    assert cfg.seed == 99
    assert cfg.curves[3].a4 == -1


def test_config_rejects_empty_d():
    with pytest.raises(ConfigError):
        CampaignConfig.from_json({**BASE, "d": []})


def test_config_rejects_unknown_check():
    with pytest.raises(ConfigError):
        CampaignConfig.from_json({**BASE, "checks": ["bogus"]})


def test_config_curve_map_and_raw_coefficients():
    cfg = CampaignConfig.from_json({**BASE, "p": [3, 5],
                                    "curve": {"3": "ss3", "5": "ss23"}})
    assert cfg.curves[5].a6 == 1
    cfg = CampaignConfig.from_json({**BASE, "curve": {"a4": -1}})
    assert cfg.curves[3].a4 == -1


def test_verify_exit_codes(tmp_path):
    cfg = write_cfg(tmp_path, {**BASE, "out": str(tmp_path / "rep")})
    assert main(["verify", "--config", str(cfg)]) == 0
    missing = tmp_path / "nope.json"
    assert main(["verify", "--config", str(missing)]) == 2
    bad = write_cfg(tmp_path, {**BASE, "d": []})
    assert main(["verify", "--config", str(bad)]) == 2


def test_verify_outputs_are_byte_stable(tmp_path):
    out1 = tmp_path / "r1"
    out2 = tmp_path / "r2"
    cfg = write_cfg(tmp_path, {**BASE, "checks": ["trace", "cyclicity"]})
    assert main(["verify", "--config", str(cfg), "--out", str(out1), "--seed", "5"]) == 0
    assert main(["verify", "--config", str(cfg), "--out", str(out2), "--seed", "5"]) == 0
    assert (out1 / "table.csv").read_bytes() == (out2 / "table.csv").read_bytes()
    assert (out1 / "table.json").read_bytes() == (out2 / "table.json").read_bytes()


def test_table_formats(tmp_path, capsys):
    out = tmp_path / "rep"
    cfg = write_cfg(tmp_path, {**BASE})
    main(["verify", "--config", str(cfg), "--out", str(out)])
    capsys.readouterr()
    assert main(["table", "--report", str(out / "report.json"), "--format", "md"]) == 0
    md = capsys.readouterr().out
    assert md.startswith("| p | d | n |")
    assert main(["table", "--report", str(out / "report.json"), "--format", "csv"]) == 0
    csv_text = capsys.readouterr().out
    assert csv_text.splitlines()[0] == "p,d,n,chi,sign,check,expected,measured,residual_val,pass"
    assert main(["table", "--report", str(out / "report.json"), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema_version"] == 1


def test_report_json_structure(tmp_path):
    out = tmp_path / "rep"
    cfg = write_cfg(tmp_path, {**BASE})
    main(["verify", "--config", str(cfg), "--out", str(out)])
    doc = json.loads((out / "report.json").read_text())
    assert doc["all_pass"] is True
    rec = doc["records"][0]
    assert rec["check"] == "ap_gate"
    assert {"expected", "measured", "ok", "rule", "runtime"} <= rec.keys()


def test_ap_gate_blocks_bad_curve(tmp_path):
    # an ordinary curve at p = 5 fails construction (good reduction but a_p != 0
    # passes CurveParams and must be caught by the gate)
    cfg = write_cfg(tmp_path, {**BASE, "p": [5], "curve": {"a4": -1},
                               "out": str(tmp_path / "rep")})
    rc = main(["verify", "--config", str(cfg)])
    assert rc == 1
    doc = json.loads((tmp_path / "rep" / "report.json").read_text())
    assert doc["records"][0]["check"] == "ap_gate"
    assert doc["records"][0]["ok"] is False
    assert len(doc["records"]) == 1  # nothing runs behind a failed gate
