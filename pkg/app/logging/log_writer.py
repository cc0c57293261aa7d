from __future__ import annotations

import os
import time
from collections.abc import Mapping
from pathlib import Path
from typing import Any


class LogWriter:
    """Append-only run logs, one file per channel (a CLI subcommand).

    Lines look like ``[2024-05-01 12:30:00] done m=4 n=2000``. Writes through
    `event` never raise: a broken log directory must not fail a run.
    """

    def __init__(self, base_dir: str | Path | None = None) -> None:
        # Default logs dir within the working directory if not provided
        self.base = Path(base_dir or Path.cwd() / "logs")
        self.base.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_config(cls, cfg: Mapping[str, Any]) -> LogWriter | None:
        """Writer for the config's ``logging`` section, None when disabled or unusable."""
        section = cfg.get("logging", {})
        if not isinstance(section, Mapping) or not section.get("enabled", False):
            return None
        try:
            return cls(section.get("dir") or None)
        except Exception:
            return None

    def _path_for(self, channel: str) -> Path:
        safe_chan = (channel or "misc").strip().replace(os.sep, "_")
        return self.base / f"{safe_chan}.log"

    def append(self, channel: str, line: str, ts: float | None = None) -> None:
        path = self._path_for(channel)
        t = ts or time.time()
        stamp = time.strftime("%Y-%m-%d %H:%M:%S", time.localtime(t))
        with path.open("a", encoding="utf-8", errors="ignore") as f:
            f.write(f"[{stamp}] {line}\n")

    def event(self, channel: str, name: str, text: str = "", **fields: Any) -> None:
        """Best-effort ``name key=value ... text`` line."""
        parts = [name, *(f"{k}={_fmt(v)}" for k, v in fields.items())]
        if text:
            parts.append(text)
        try:
            self.append(channel, " ".join(parts))
        except Exception:
            pass

    # Public accessor for consumers that need to open the file
    def path_for(self, channel: str) -> Path:
        return self._path_for(channel)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)
