import math

import numpy as np
import pytest
from scipy.stats import multivariate_normal

from app.bounds.calculus import pw_bounds
from app.core.errors import DimensionMismatch, RangeError
from app.core.rng import make_rng
from app.core.types import Priors
from app.oracle import gaussian
from app.oracle.gaussian import (
    GaussianMixtureModel,
    binary_ber_closed_form,
    draw_mixture,
    hp_divergence,
    mc_ber,
    mc_conditional_entropy,
    mc_deltas,
    mc_hp_integrals,
    mc_pairwise_risk,
    mc_summary,
    posterior,
)
from app.synth.circle import CircleConfig, circle_model, truncated_model


def _model(means, sigma2, priors=None, radius=None):
    means = np.asarray(means, dtype=float)
    m = means.shape[0]
    pri = Priors(priors if priors is not None else np.full(m, 1.0 / m))
    return GaussianMixtureModel(pri, means, np.full(m, sigma2), truncation_radius=radius)


def test_posterior_at_midpoint():
    model = _model([[-1.0, 0.0], [1.0, 0.0]], 0.5)
    np.testing.assert_allclose(posterior(model, [0.0, 0.0]), [0.5, 0.5])


def test_posterior_far_apart():
    model = _model([[0.0], [100.0]], 1.0)
    a = posterior(model, [0.0])
    assert a[0] == pytest.approx(1.0)
    assert a[1] < 1e-300 or a[1] == 0.0


def test_posterior_matches_density_ratio():
    model = _model([[0.0, 0.0], [1.0, 1.0], [2.0, -1.0]], 0.7, priors=[0.2, 0.3, 0.5])
    x = np.array([0.4, 0.1])
    dens = np.array(
        [
            p * multivariate_normal(mean=mu, cov=0.7 * np.eye(2)).pdf(x)
            for p, mu in zip(model.priors.p, model.means)
        ]
    )
    np.testing.assert_allclose(posterior(model, x), dens / dens.sum(), rtol=1e-10)


def test_posterior_batch_shape():
    model = circle_model(CircleConfig(m=3, mu=1.0, sigma2=0.3))
    post = posterior(model, np.zeros((5, 2)))
    assert post.shape == (5, 3)
    np.testing.assert_allclose(post.sum(axis=1), 1.0)


def test_posterior_outside_support_gives_priors():
    model = truncated_model([[0.0, 0.0], [10.0, 0.0]], 1.0, 1.0, Priors([0.3, 0.7]))
    np.testing.assert_allclose(posterior(model, [5.0, 5.0]), [0.3, 0.7])


def test_identical_components():
    model = _model(np.zeros((3, 2)), 1.0)
    summary = mc_summary(model, 20_000, seed=1)
    assert summary.ber.value == pytest.approx(2 / 3)
    assert summary.ber.std_error == pytest.approx(0.0, abs=1e-6)
    assert summary.cond_entropy.value == pytest.approx(math.log2(3))
    np.testing.assert_allclose(summary.delta_m.values[np.triu_indices(3, 1)], 1 / 9)
    np.testing.assert_allclose(summary.delta_pw.values[np.triu_indices(3, 1)], 1 / 6)
    np.testing.assert_allclose(summary.pair_risk[np.triu_indices(3, 1)], 0.5)


def test_far_apart_components():
    model = _model([[0.0, 0.0], [50.0, 0.0], [0.0, 50.0]], 1.0)
    est = mc_ber(model, 20_000, seed=2)
    assert est.value < 1e-12
    gen, pw = mc_deltas(model, 20_000, seed=2)
    assert gen.pair_sum() < 1e-12 and pw.pair_sum() < 1e-12


def test_binary_ber_matches_closed_form():
    model = _model([[-0.5, 0.0], [0.5, 0.0]], 0.25)
    exact = binary_ber_closed_form(model)
    assert exact == pytest.approx(0.158655, abs=1e-5)
    est = mc_ber(model, 400_000, seed=3)
    assert abs(est.value - exact) <= 4 * est.std_error


def test_closed_form_preconditions():
    with pytest.raises(RangeError):
        binary_ber_closed_form(circle_model(CircleConfig(m=3, mu=1.0, sigma2=0.3)))
    with pytest.raises(RangeError):
        binary_ber_closed_form(_model([[0.0], [1.0]], 1.0, priors=[0.3, 0.7]))
    with pytest.raises(RangeError):
        binary_ber_closed_form(_model([[0.0], [1.0]], 1.0, radius=2.0))


def test_standard_error_shrinks_with_budget():
    model = circle_model(CircleConfig(m=3, mu=1.0, sigma2=0.3))
    small = mc_ber(model, 50_000, seed=4)
    large = mc_ber(model, 200_000, seed=4)
    assert large.std_error == pytest.approx(small.std_error / 2, rel=0.1)


def test_thread_count_does_not_change_estimates(monkeypatch):
    monkeypatch.setattr(gaussian, "MC_BLOCK", 1000)
    model = circle_model(CircleConfig(m=4, mu=1.0, sigma2=0.3))
    one = mc_summary(model, 10_500, seed=5, threads=1)
    many = mc_summary(model, 10_500, seed=5, threads=4)
    assert one.ber == many.ber
    assert one.cond_entropy == many.cond_entropy
    np.testing.assert_array_equal(one.delta_m.values, many.delta_m.values)
    np.testing.assert_array_equal(one.delta_pw.values, many.delta_pw.values)


def test_same_seed_same_estimate():
    model = circle_model(CircleConfig(m=3, mu=0.5, sigma2=0.3))
    assert mc_ber(model, 5000, seed=6) == mc_ber(model, 5000, seed=6)
    assert mc_ber(model, 5000, seed=6) != mc_ber(model, 5000, seed=7)


def test_pairwise_delta_dominates_generalized():
    model = circle_model(CircleConfig(m=5, mu=1.0, sigma2=0.3))
    gen, pw = mc_deltas(model, 30_000, seed=8)
    # a_i + a_j <= 1 sample by sample, so this holds up to rounding
    assert np.all(pw.values >= gen.values - 1e-12)
    assert gen.std_errors is not None and pw.std_errors is not None


def test_binary_entropy_one_bit():
    model = _model([[0.0], [0.0]], 1.0)
    est = mc_conditional_entropy(model, 5000, seed=9)
    assert est.value == pytest.approx(1.0)


def test_hp_integrals_identical_components():
    model = _model([[0.0], [0.0]], 1.0)
    hp, ghp = mc_hp_integrals(model, 1, 2, 5000, seed=10)
    assert hp.value == pytest.approx(1.0)
    assert ghp.value == pytest.approx(1.0)
    assert hp_divergence(model, 1, 2, 5000, seed=10).value == pytest.approx(0.0, abs=1e-12)


def test_hp_integrals_disjoint_third_class():
    # class 3 sits far away, so classes 1 and 2 never compete with it
    model = truncated_model([[0.0, 0.0], [1.0, 0.0], [50.0, 0.0]], 0.5, 3.0)
    hp, ghp = mc_hp_integrals(model, 1, 2, 50_000, seed=11)
    assert hp.value == pytest.approx(ghp.value, rel=1e-9)
    d = hp_divergence(model, 1, 2, 50_000, seed=11)
    assert 0.0 <= d.value <= 1.0


def test_hp_integrals_overlapping_third_class():
    model = truncated_model([[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]], 0.5, 3.0)
    hp, ghp = mc_hp_integrals(model, 1, 2, 50_000, seed=12)
    assert hp.value > ghp.value
    d = hp_divergence(model, 1, 2, 50_000, seed=12)
    assert 0.0 <= d.value <= 1.0


def test_hp_integrals_reject_bad_pair():
    model = circle_model(CircleConfig(m=3, mu=1.0, sigma2=0.3))
    with pytest.raises(RangeError):
        mc_hp_integrals(model, 2, 2, 100, seed=0)
    with pytest.raises(RangeError):
        mc_hp_integrals(model, 1, 4, 100, seed=0)


def test_pairwise_risk_reconstructs_pw_statistic():
    model = circle_model(CircleConfig(m=3, mu=1.0, sigma2=0.3))
    summary = mc_summary(model, 30_000, seed=13)
    rep = pw_bounds(summary.delta_pw, model.priors)
    p = model.priors.p
    acc = 0.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        s = p[i] + p[j]
        # u is formed on the sampled pair mass, the weights stay the priors
        u = max(1.0 - 4.0 * summary.delta_pw.values[i, j] / summary.pair_mass[i, j], 0.0)
        acc += s * (0.5 - 0.5 * math.sqrt(u))
    assert rep.lower == pytest.approx((2 / 3) * acc)
    risk, se = mc_pairwise_risk(model, 30_000, seed=13)
    assert np.all(risk <= 0.5 + 1e-12)
    assert np.all(se >= 0.0)


def test_model_validation():
    with pytest.raises(DimensionMismatch):
        GaussianMixtureModel(Priors([0.5, 0.5]), np.zeros((3, 2)), np.ones(3))
    with pytest.raises(DimensionMismatch):
        GaussianMixtureModel(Priors([0.5, 0.5]), np.zeros((2, 2)), np.ones(3))
    with pytest.raises(RangeError):
        GaussianMixtureModel(Priors([0.5, 0.5]), np.zeros((2, 2)), np.array([1.0, 0.0]))
    with pytest.raises(RangeError):
        GaussianMixtureModel(Priors([0.5, 0.5]), np.zeros((2, 2)), np.ones(2), truncation_radius=-1.0)
    with pytest.raises(RangeError):
        mc_ber(circle_model(CircleConfig(m=2, mu=1.0, sigma2=0.3)), 0, seed=0)


def test_scalar_variance_is_broadcast():
    model = GaussianMixtureModel(Priors([0.5, 0.5]), np.zeros((2, 3)), 2.0)
    np.testing.assert_array_equal(model.sigma2, [2.0, 2.0])
    assert model.d == 3


def test_truncated_draws_stay_in_ball():
    model = truncated_model([[0.0, 0.0], [3.0, 0.0]], 1.0, 0.5)
    x, labels = draw_mixture(model, 5000, make_rng(14, 0))
    dist = np.linalg.norm(x - model.means[labels - 1], axis=1)
    assert np.all(dist <= 0.5 + 1e-12)
    assert set(labels.tolist()) == {1, 2}


def test_sampled_pair_mass_matches_priors():
    model = circle_model(CircleConfig(m=3, mu=1.0, sigma2=0.3))
    summary = mc_summary(model, 50_000, seed=15)
    p = model.priors.p
    iu = np.triu_indices(3, 1)
    np.testing.assert_allclose(summary.pair_mass[iu], (p[:, None] + p[None, :])[iu], atol=0.01)
    np.testing.assert_array_equal(summary.delta_pw.pair_mass, summary.pair_mass)


def test_nearly_identical_pair_stays_in_range():
    # classes 1 and 2 coincide; a prior-normalised risk would land above 1/2
    model = _model([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], 0.3)
    for seed in range(10):
        summary = mc_summary(model, 200_000, seed=seed)
        assert summary.pair_risk[0, 1] <= 0.5 + 1e-12
        assert summary.pair_risk[0, 1] == pytest.approx(0.5, abs=1e-12)
        mass = summary.pair_mass[0, 1]
        assert 1.0 - 4.0 * summary.delta_pw.values[0, 1] / mass >= -1e-12
