"""Regenerate pinned high-budget oracle reference values.

Usage: python -m app.tools.make_fixtures [--budget 10000000] [--output PATH]

The committed tests/fixtures/oracle_reference.json holds grid-quadrature values in
the same layout (`"method": "grid-quadrature"`, std_error from halving the grid).
Running this tool replaces them with Monte Carlo estimates.
"""

from __future__ import annotations

import argparse
from pathlib import Path
from typing import Any

from app.cli import io
from app.cli.pipelines import oracle_bounds
from app.synth.circle import CircleConfig, circle_model

PINNED_SEED = 20_160_601
DEFAULT_BUDGET = 10_000_000
DEFAULT_OUTPUT = Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "oracle_reference.json"

# name -> circle configuration
REFERENCE_MODELS: dict[str, CircleConfig] = {
    "circle_m4_mu1_s0.3": CircleConfig(m=4, mu=1.0, sigma2=0.3),
    "circle_m4_mu0.5_s0.3": CircleConfig(m=4, mu=0.5, sigma2=0.3),
    "circle_m3_mu1_s0.3": CircleConfig(m=3, mu=1.0, sigma2=0.3),
    "circle_m10_mu1_s0.3": CircleConfig(m=10, mu=1.0, sigma2=0.3),
    "circle_m2_mu0.7_s0.1": CircleConfig(m=2, mu=0.7, sigma2=0.1),
}


def reference_entry(config: CircleConfig, budget: int, seed: int, threads: int) -> dict[str, Any]:
    model = circle_model(config)
    result = oracle_bounds(model, budget, seed, threads)
    s = result.summary
    return {
        "method": "monte-carlo",
        "model": io.model_to_dict(model),
        "n_samples": budget,
        "seed": seed,
        "ber": s.ber.to_dict(),
        "cond_entropy_bits": s.cond_entropy.to_dict(),
        "delta_sum_generalized": s.gen_total.to_dict(),
        "delta_sum_pairwise": s.pw_total.to_dict(),
        "ghp": [result.ghp.lower, result.ghp.upper],
        "pw": [result.pw.lower, result.pw.upper],
        "js": [result.js.lower, result.js.upper],
        "orderings_hold": result.tightness.all_hold(),
    }


def build_fixtures(budget: int, seed: int, threads: int) -> dict[str, Any]:
    return {
        name: reference_entry(cfg, budget, seed, threads) for name, cfg in REFERENCE_MODELS.items()
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    parser.add_argument("--seed", type=int, default=PINNED_SEED)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--output", type=Path, default=DEFAULT_OUTPUT)
    args = parser.parse_args(argv)
    io.write_json(build_fixtures(args.budget, args.seed, args.threads), args.output)
    print(f"Wrote {len(REFERENCE_MODELS)} reference models to {args.output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
