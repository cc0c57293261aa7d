#!/usr/bin/env python3
"""
Regenerate the plot-ready tables behind every experiment figure.
- Runs `python -m app.cli.commands sweep ...` and `bench ...` once per table
- Writes CSV/JSON into ./figures (or the directory given as the first argument)
- Stops at the first failing command and returns its exit code
"""
from __future__ import annotations

import subprocess
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[1]

# (output name, CLI arguments)
TABLES: list[tuple[str, list[str]]] = [
    ("bounds_vs_mu_m4.csv", ["sweep", "--kind", "mu", "--grid", "0.25,0.5,0.75,1,1.5,2,3",
                             "--m", "4", "--sigma2", "0.3", "--trials", "10"]),
    ("tightness_vs_m.csv", ["sweep", "--kind", "m", "--grid", "3,4,5,6,8,10",
                            "--mu", "1", "--sigma2", "0.3", "--trials", "10"]),
    ("tightness_vs_m_mu0.7.csv", ["sweep", "--kind", "m", "--grid", "3,4,5,6,8,10",
                                  "--mu", "0.7", "--sigma2", "0.1", "--trials", "10"]),
    ("mse_convergence.csv", ["sweep", "--kind", "n-convergence", "--grid", "512,2048,8192",
                             "--m", "2", "--mu", "0.7", "--sigma2", "0.1", "--dims", "2,4,8",
                             "--trials", "50"]),
    ("tightness_vs_gamma.csv", ["sweep", "--kind", "gamma", "--grid", "0.1,0.3,0.5,0.7,0.9",
                                "--m", "10", "--mu", "1", "--sigma2", "0.3", "--trials", "5"]),
    ("bench_gamma_0.1.json", ["bench", "--m", "10", "--n", "5000", "--gamma", "0.1"]),
    ("bench_gamma_0.5.json", ["bench", "--m", "10", "--n", "5000", "--gamma", "0.5"]),
    ("bench_gamma_0.9.json", ["bench", "--m", "10", "--n", "5000", "--gamma", "0.9"]),
]


def run(cmd: list[str]) -> int:
    proc = subprocess.run(cmd, cwd=PROJECT_ROOT, text=True)
    return proc.returncode


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else PROJECT_ROOT / "figures"
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, args in TABLES:
        print(f"=== {name} ===")
        cmd = [sys.executable, "-m", "app.cli.commands", *args, "--output", str(out_dir / name)]
        rc = run(cmd)
        if rc != 0:
            print(f"FAILED: {' '.join(cmd)} (exit {rc})", file=sys.stderr)
            return rc
    print(f"\nDONE: {len(TABLES)} tables in {out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
