from __future__ import annotations

import copy
import json
import os
from pathlib import Path
from typing import Any

APP_NAME = "ghp-bounds"
DATA_DIR = Path(os.path.expanduser("~")) / ".ghpbounds_local"
CONFIG_PATH = DATA_DIR / "config.json"

DEFAULT_CFG: dict[str, Any] = {
    "defaults": {
        "seed": 0,
        "mc_budget": 200_000,
        "threads": 1,
        "mst_method": "auto",
    },
    "logging": {"enabled": True, "dir": str(DATA_DIR / "logs")},
}


def default_config() -> dict[str, Any]:
    return copy.deepcopy(DEFAULT_CFG)


def load_config(path: Path | None = None) -> dict[str, Any]:
    """Read the user config, creating it with defaults on first use.

    Missing keys are filled from the defaults; a corrupt file is left alone and
    the defaults are returned.
    """
    cfg_path = Path(path) if path is not None else CONFIG_PATH
    cfg = default_config()
    if cfg_path.exists():
        try:
            with cfg_path.open("r", encoding="utf-8") as f:
                loaded = json.load(f)
            if isinstance(loaded, dict):
                _merge(cfg, loaded)
        except Exception:
            pass
        return cfg
    _persist_cfg(cfg, cfg_path)
    return cfg


def _merge(base: dict[str, Any], override: dict[str, Any]) -> None:
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(base.get(key), dict):
            _merge(base[key], value)
        else:
            base[key] = value


def _persist_cfg(cfg: dict[str, Any], path: Path | None = None) -> None:
    cfg_path = Path(path) if path is not None else CONFIG_PATH
    try:
        cfg_path.parent.mkdir(parents=True, exist_ok=True)
        with cfg_path.open("w", encoding="utf-8") as f:
            json.dump(cfg, f, ensure_ascii=False, indent=2)
    except Exception:
        pass
