"""Synthetic circle-of-Gaussians experiments.

Class i = 1..m has mean (mu cos(2 pi i / m), mu sin(2 pi i / m), 0, ..., 0) and
variance sigma2 in every coordinate, so coordinates beyond the first two are
pure noise.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..core.errors import BadConfig, RangeError
from ..core.rng import STREAM_SAMPLE, make_rng
from ..core.types import LabeledDataset, Priors
from ..oracle.gaussian import GaussianMixtureModel, draw_mixture


@dataclass(frozen=True)
class CircleConfig:
    m: int
    mu: float
    sigma2: float
    d: int = 2
    gamma: float | None = None

    def __post_init__(self) -> None:
        if self.m < 2:
            raise BadConfig(f"circle model needs m >= 2, got {self.m}")
        if self.d < 2:
            raise BadConfig(f"circle model needs d >= 2, got {self.d}")
        if not math.isfinite(self.mu) or self.mu < 0.0:
            raise BadConfig(f"radius mu must be finite and >= 0, got {self.mu}")
        if not math.isfinite(self.sigma2) or self.sigma2 <= 0.0:
            raise BadConfig(f"sigma2 must be positive, got {self.sigma2}")
        if self.gamma is not None and not 0.0 < self.gamma < 1.0:
            raise BadConfig(f"gamma must lie in (0, 1), got {self.gamma}")

    def priors(self) -> Priors:
        if self.gamma is None:
            return Priors(np.full(self.m, 1.0 / self.m))
        return imbalanced_priors(self.gamma, self.m)


def imbalanced_priors(gamma: float, m: int) -> Priors:
    """p_1 = gamma, the remaining 1 - gamma split evenly over classes 2..m."""
    if m < 2:
        raise RangeError(f"need m >= 2, got {m}")
    if not 0.0 < gamma < 1.0:
        raise RangeError(f"gamma must lie in (0, 1), got {gamma}")
    rest = (1.0 - gamma) / (m - 1)
    p = np.full(m, rest)
    p[0] = gamma
    # fold rounding residue into p_1 so the vector sums to 1
    p[0] += 1.0 - float(p.sum())
    return Priors(p)


def circle_means(m: int, mu: float, d: int = 2) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(1, m + 1) / m
    means = np.zeros((m, d))
    means[:, 0] = mu * np.cos(angles)
    means[:, 1] = mu * np.sin(angles)
    return means


def circle_model(config: CircleConfig) -> GaussianMixtureModel:
    return GaussianMixtureModel(
        priors=config.priors(),
        means=circle_means(config.m, config.mu, config.d),
        sigma2=np.full(config.m, config.sigma2),
    )


def truncated_model(
    means: Sequence[Sequence[float]] | np.ndarray,
    sigma2: float,
    radius: float,
    priors: Priors | None = None,
) -> GaussianMixtureModel:
    """Gaussians cut off at `radius` around each mean; far-apart means give disjoint supports."""
    mu = np.asarray(means, dtype=np.float64)
    if mu.ndim != 2:
        raise BadConfig(f"means must be an m x d matrix, got shape {mu.shape}")
    m = mu.shape[0]
    pri = priors if priors is not None else Priors(np.full(m, 1.0 / m))
    return GaussianMixtureModel(pri, mu, np.full(m, float(sigma2)), truncation_radius=radius)


def sample(model: GaussianMixtureModel, n: int, seed: int) -> LabeledDataset:
    """n i.i.d. labelled draws; a class may come out empty for tiny n."""
    if n < 2:
        raise RangeError(f"need n >= 2 samples, got {n}")
    points, labels = draw_mixture(model, int(n), make_rng(seed, STREAM_SAMPLE))
    return LabeledDataset(points, labels, model.m)
