import json

import app.main as app_main
from app.core import config


def test_load_config_creates_file(tmp_path):
    cfg_path = tmp_path / ".ghpbounds_local" / "config.json"

    # first use writes the defaults
    cfg = config.load_config(cfg_path)
    assert cfg_path.exists(), "config.json should be created"
    assert cfg["defaults"]["seed"] == 0

    with cfg_path.open("r", encoding="utf-8") as f:
        loaded = json.load(f)
    assert isinstance(loaded, dict)
    assert "defaults" in loaded
    assert "logging" in loaded

    # Change a value and persist via private helper
    loaded["defaults"]["mc_budget"] = 1234
    config._persist_cfg(loaded, cfg_path)  # noqa: SLF001 - test private helper intentionally
    with cfg_path.open("r", encoding="utf-8") as f:
        reloaded = json.load(f)
    assert reloaded["defaults"]["mc_budget"] == 1234
    assert config.load_config(cfg_path)["defaults"]["mc_budget"] == 1234


def test_module_entry_point_runs_cli(capsys, tmp_path):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({"logging": {"enabled": False}}), encoding="utf-8")
    code = app_main.main(["sample", "--m", "2", "--n", "10", "--config", str(cfg_path)])
    assert code == 0
    assert capsys.readouterr().out.startswith("x1,x2,label")


def test_load_config_fills_missing_keys(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"defaults": {"seed": 7}}), encoding="utf-8")
    cfg = config.load_config(path)
    assert cfg["defaults"]["seed"] == 7
    assert cfg["defaults"]["threads"] == 1
    assert cfg["defaults"]["mst_method"] == "auto"
    assert cfg["logging"]["enabled"] is True


def test_corrupt_config_falls_back_to_defaults(tmp_path):
    path = tmp_path / "config.json"
    path.write_text("{not json", encoding="utf-8")
    cfg = config.load_config(path)
    assert cfg == config.default_config()
    # a corrupt file is left for the user to fix
    assert path.read_text(encoding="utf-8") == "{not json"


def test_default_config_is_a_copy():
    cfg = config.default_config()
    cfg["defaults"]["seed"] = 99
    assert config.DEFAULT_CFG["defaults"]["seed"] == 0


def test_persist_cfg_never_raises(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    # parent "directory" is a regular file, so the write fails silently
    config._persist_cfg({"a": 1}, blocker / "config.json")
    assert not (blocker / "config.json").exists()
