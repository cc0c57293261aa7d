import time

from app.logging.log_writer import LogWriter


def test_append_creates_channel_file(tmp_path):
    writer = LogWriter(tmp_path / "logs")
    ts = time.mktime((2024, 5, 1, 12, 30, 0, 0, 0, -1))
    writer.append("estimate", "start seed=0", ts=ts)
    writer.append("estimate", "done GHP=[0.5, 0.75]", ts=ts)
    path = writer.path_for("estimate")
    assert path == tmp_path / "logs" / "estimate.log"
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == [
        "[2024-05-01 12:30:00] start seed=0",
        "[2024-05-01 12:30:00] done GHP=[0.5, 0.75]",
    ]


def test_channels_are_separate(tmp_path):
    writer = LogWriter(tmp_path)
    writer.append("oracle", "a")
    writer.append("sweep", "b")
    assert writer.path_for("oracle").read_text(encoding="utf-8").endswith("a\n")
    assert writer.path_for("sweep").read_text(encoding="utf-8").endswith("b\n")


def test_unsafe_channel_names(tmp_path):
    writer = LogWriter(tmp_path)
    assert writer.path_for("a/b").parent == tmp_path
    assert writer.path_for("").name == "misc.log"


def test_event_formats_fields(tmp_path):
    writer = LogWriter(tmp_path)
    writer.event("oracle", "done", "all_hold=True", m=4, ber=0.123456789)
    line = writer.path_for("oracle").read_text(encoding="utf-8").strip()
    assert line.endswith("] done m=4 ber=0.123457 all_hold=True")


def test_event_swallows_write_errors(tmp_path):
    writer = LogWriter(tmp_path)
    writer.path_for("sweep").mkdir()
    writer.event("sweep", "start", seed=0)


def test_from_config(tmp_path):
    assert LogWriter.from_config({"logging": {"enabled": False}}) is None
    assert LogWriter.from_config({"logging": "nope"}) is None
    writer = LogWriter.from_config({"logging": {"enabled": True, "dir": str(tmp_path / "runs")}})
    assert writer is not None
    assert writer.base == tmp_path / "runs"
