from __future__ import annotations

from collections.abc import Sequence


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line; `python -m app.main estimate --input data.csv`."""
    from .cli.commands import main as cli_main

    return cli_main(argv)


if __name__ == "__main__":
    raise SystemExit(main())
