import json
import math

import numpy as np
import pytest

from app.cli import io
from app.oracle.gaussian import mc_summary
from app.synth.circle import circle_model
from app.tools import make_fixtures


def test_make_fixtures_small_budget(tmp_path, capsys):
    out = tmp_path / "fixtures" / "oracle_reference.json"
    code = make_fixtures.main(["--budget", "2000", "--output", str(out)])
    assert code == 0
    assert "Wrote 5 reference models" in capsys.readouterr().out
    data = json.loads(out.read_text(encoding="utf-8"))
    assert set(data) == set(make_fixtures.REFERENCE_MODELS)
    entry = data["circle_m4_mu1_s0.3"]
    assert entry["seed"] == make_fixtures.PINNED_SEED
    assert entry["n_samples"] == 2000
    assert entry["method"] == "monte-carlo"
    lower, upper = entry["ghp"]
    assert 0.0 <= lower <= upper <= 1.0


def test_reference_entry_is_deterministic():
    cfg = make_fixtures.REFERENCE_MODELS["circle_m3_mu1_s0.3"]
    a = make_fixtures.reference_entry(cfg, 1000, 5, threads=1)
    b = make_fixtures.reference_entry(cfg, 1000, 5, threads=2)
    assert a == b


def test_reference_file_covers_generator_models(oracle_reference):
    assert set(oracle_reference) == set(make_fixtures.REFERENCE_MODELS)
    for name, cfg in make_fixtures.REFERENCE_MODELS.items():
        stored = io.model_from_dict(oracle_reference[name]["model"])
        model = circle_model(cfg)
        np.testing.assert_allclose(stored.means, model.means, atol=1e-12)
        np.testing.assert_allclose(stored.priors.p, model.priors.p)
        np.testing.assert_allclose(stored.sigma2, model.sigma2)


def test_reference_bounds_bracket_ber(oracle_reference):
    for name, entry in oracle_reference.items():
        ber = entry["ber"]["value"]
        for family in ("ghp", "pw", "js"):
            lower, upper = entry[family]
            assert lower <= ber <= upper, (name, family)
        assert entry["ghp"][1] <= entry["pw"][1]
        assert entry["ghp"][0] >= entry["pw"][0]
        assert entry["orderings_hold"] is True


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(make_fixtures.REFERENCE_MODELS))
def test_oracle_agrees_with_reference(oracle_reference, name):
    entry = oracle_reference[name]
    summary = mc_summary(
        circle_model(make_fixtures.REFERENCE_MODELS[name]), 100_000, make_fixtures.PINNED_SEED
    )
    pairs = {
        "ber": summary.ber,
        "cond_entropy_bits": summary.cond_entropy,
        "delta_sum_generalized": summary.gen_total,
        "delta_sum_pairwise": summary.pw_total,
    }
    for key, est in pairs.items():
        ref = entry[key]
        tol = 4.0 * math.hypot(est.std_error, ref["std_error"])
        assert abs(est.value - ref["value"]) <= tol, key
