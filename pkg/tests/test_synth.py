import math

import numpy as np
import pytest
from scipy.stats import chi2, chisquare

from app.core.errors import BadConfig, RangeError
from app.core.types import Priors, empirical_priors
from app.synth.circle import (
    CircleConfig,
    circle_means,
    circle_model,
    imbalanced_priors,
    sample,
    truncated_model,
)


def test_circle_means_on_unit_circle():
    means = circle_means(4, 1.0)
    expected = np.array([[0.0, 1.0], [-1.0, 0.0], [0.0, -1.0], [1.0, 0.0]])
    np.testing.assert_allclose(means, expected, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(means, axis=1), 1.0)


def test_zero_radius_collapses_means():
    np.testing.assert_array_equal(circle_means(5, 0.0), np.zeros((5, 2)))


def test_extra_dimensions_are_noise():
    means = circle_means(3, 2.0, d=5)
    assert means.shape == (3, 5)
    np.testing.assert_array_equal(means[:, 2:], 0.0)


def test_imbalanced_priors():
    pri = imbalanced_priors(0.7, 4)
    assert pri.p[0] == pytest.approx(0.7)
    np.testing.assert_allclose(pri.p[1:], 0.1)
    assert abs(pri.p.sum() - 1.0) <= 1e-12
    with pytest.raises(RangeError):
        imbalanced_priors(1.0, 3)
    with pytest.raises(RangeError):
        imbalanced_priors(0.5, 1)


def test_config_priors():
    np.testing.assert_allclose(CircleConfig(m=5, mu=1.0, sigma2=0.3).priors().p, 0.2)
    pri = CircleConfig(m=3, mu=1.0, sigma2=0.3, gamma=0.5).priors()
    np.testing.assert_allclose(pri.p, [0.5, 0.25, 0.25])


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(m=1, mu=1.0, sigma2=0.3),
        dict(m=3, mu=-1.0, sigma2=0.3),
        dict(m=3, mu=1.0, sigma2=0.0),
        dict(m=3, mu=1.0, sigma2=0.3, d=1),
        dict(m=3, mu=1.0, sigma2=0.3, gamma=0.0),
        dict(m=3, mu=float("nan"), sigma2=0.3),
    ],
)
def test_bad_configs(kwargs):
    with pytest.raises(BadConfig):
        CircleConfig(**kwargs)


def test_sample_is_deterministic():
    model = circle_model(CircleConfig(m=3, mu=1.0, sigma2=0.3))
    a = sample(model, 500, seed=42)
    b = sample(model, 500, seed=42)
    c = sample(model, 500, seed=43)
    np.testing.assert_array_equal(a.points, b.points)
    np.testing.assert_array_equal(a.labels, b.labels)
    assert not np.array_equal(a.points, c.points)


def test_sample_rejects_tiny_n():
    with pytest.raises(RangeError):
        sample(circle_model(CircleConfig(m=2, mu=1.0, sigma2=0.3)), 1, seed=0)


def test_class_counts_and_means():
    config = CircleConfig(m=4, mu=2.0, sigma2=0.5, gamma=0.4)
    model = circle_model(config)
    n = 20_000
    ds = sample(model, n, seed=7)
    assert ds.m == 4
    for k, p in enumerate(model.priors.p, start=1):
        n_k = int(np.sum(ds.labels == k))
        assert abs(n_k - n * p) <= 4 * math.sqrt(n * p * (1 - p))
        centre = ds.class_points(k).mean(axis=0)
        tol = 4 * math.sqrt(config.sigma2 / n_k)
        assert np.all(np.abs(centre - model.means[k - 1]) <= tol)


def test_squared_radii_follow_chi_square():
    config = CircleConfig(m=3, mu=1.5, sigma2=0.4, d=3)
    model = circle_model(config)
    ds = sample(model, 100_000, seed=8)
    centred = ds.points - model.means[ds.labels - 1]
    r2 = np.einsum("nd,nd->n", centred, centred) / config.sigma2
    edges = chi2.ppf(np.linspace(0.0, 1.0, 11), df=3)
    edges[-1] = r2.max() + 1.0
    observed, _ = np.histogram(r2, bins=edges)
    expected = ds.n / 10
    stat = float(((observed - expected) ** 2 / expected).sum())
    # 9 degrees of freedom, far tail
    assert stat < chi2.ppf(0.9999, df=9)


@pytest.mark.parametrize("m", [3, 5, 10])
def test_empirical_priors_follow_model_priors(m):
    config = CircleConfig(m=m, mu=1.0, sigma2=0.3, gamma=1.0 / m)
    model = circle_model(config)
    np.testing.assert_allclose(model.priors.p, 1.0 / m)
    ds = sample(model, 100_000, seed=m)
    observed = ds.class_counts
    _, p_value = chisquare(observed, f_exp=ds.n * model.priors.p)
    assert p_value > 1e-4
    np.testing.assert_allclose(empirical_priors(ds).p, observed / ds.n)


def test_truncated_model_defaults_to_uniform_priors():
    model = truncated_model([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0]], 1.0, 2.0)
    np.testing.assert_allclose(model.priors.p, 1 / 3)
    assert model.truncation_radius == 2.0
    model = truncated_model([[0.0], [5.0]], 1.0, 2.0, Priors([0.1, 0.9]))
    assert model.d == 1
    with pytest.raises(BadConfig):
        truncated_model([0.0, 1.0], 1.0, 2.0)
