"""Monte Carlo ground truth for spherical Gaussian mixtures.

Every expectation is taken under the mixture f = sum_k p_k f_k by sampling,
using the posterior vector a(x) = (p_k f_k(x) / f(x))_k:

    BER          = E[1 - max_k a_k]
    delta^m_ij   = E[a_i a_j]
    delta_ij     = E[a_i a_j / (a_i + a_j)]
    H(p) - JS    = E[-sum_k a_k log2 a_k]
    eps_ij       = E[min(a_i, a_j)] / E[a_i + a_j]

Samples are drawn in fixed blocks of MC_BLOCK, block b from stream
(seed, STREAM_MC, b), and block sums are added in block order, so an estimate
depends only on (model, n_samples, seed) and never on the thread count.

E[a_i + a_j] equals p_i + p_j in the population. Ratios are taken against the
sampled mass so that eps_ij <= 1/2 and u_ij >= 0 hold on every estimate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import entr, log_softmax
from scipy.stats import chi2, norm

from ..core.errors import DimensionMismatch, RangeError
from ..core.rng import STREAM_MC, check_seed, make_rng
from ..core.types import Priors
from ..estimators.delta import DeltaKind, DeltaMatrix, DeltaSource

MC_BLOCK = 65_536
ROUNDING_FLOOR = 1e-7
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class GaussianMixtureModel:
    """Mixture of spherical Gaussians N(mean_k, sigma2_k I).

    With `truncation_radius` R every component is restricted to the ball of
    radius R around its mean and renormalised.
    """

    priors: Priors
    means: np.ndarray
    sigma2: np.ndarray
    truncation_radius: float | None = None

    def __post_init__(self) -> None:
        means = np.array(self.means, dtype=np.float64, copy=True)
        if means.ndim == 1:
            means = means.reshape(-1, 1)
        sig = np.array(self.sigma2, dtype=np.float64, copy=True).ravel()
        m = self.priors.m
        if means.ndim != 2 or means.shape[0] != m or means.shape[1] < 1:
            raise DimensionMismatch(f"expected {m} means of equal dimension, got shape {means.shape}")
        if sig.size == 1 and m > 1:
            sig = np.full(m, sig[0])
        if sig.size != m:
            raise DimensionMismatch(f"expected {m} variances, got {sig.size}")
        if not np.all(np.isfinite(means)) or not np.all(np.isfinite(sig)) or np.any(sig <= 0.0):
            raise RangeError("means must be finite and every variance positive")
        if self.truncation_radius is not None:
            r = float(self.truncation_radius)
            if not math.isfinite(r) or r <= 0.0:
                raise RangeError(f"truncation radius must be positive, got {r}")
            object.__setattr__(self, "truncation_radius", r)
        means.setflags(write=False)
        sig.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigma2", sig)

    @property
    def m(self) -> int:
        return self.priors.m

    @property
    def d(self) -> int:
        return int(self.means.shape[1])

    def _log_norm(self) -> np.ndarray:
        base = -0.5 * self.d * np.log(2.0 * np.pi * self.sigma2)
        if self.truncation_radius is None:
            return base
        mass = chi2.cdf(self.truncation_radius**2 / self.sigma2, df=self.d)
        return base - np.log(mass)

    def log_component_density(self, x: np.ndarray) -> np.ndarray:
        """n x m matrix of log f_k(x); -inf outside a truncated support."""
        pts = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if pts.shape[1] != self.d:
            raise DimensionMismatch(f"points have {pts.shape[1]} features, model has {self.d}")
        diff = pts[:, None, :] - self.means[None, :, :]
        sq = np.einsum("nkd,nkd->nk", diff, diff)
        out = self._log_norm()[None, :] - 0.5 * sq / self.sigma2[None, :]
        if self.truncation_radius is not None:
            out = np.where(sq <= self.truncation_radius**2, out, -np.inf)
        return out

    def log_joint(self, x: np.ndarray) -> np.ndarray:
        return np.log(self.priors.p)[None, :] + self.log_component_density(x)


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int | None = None

    def scaled(self, factor: float, shift: float = 0.0) -> McEstimate:
        """Estimate of shift + factor * X."""
        return McEstimate(
            shift + factor * self.value, abs(factor) * self.std_error, self.n_samples, self.seed
        )

    def to_dict(self) -> dict[str, float | int | None]:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def posterior(model: GaussianMixtureModel, x: np.ndarray) -> np.ndarray:
    """Posterior class probabilities, computed in log space.

    A single point gives a length-m vector, an n x d array an n x m matrix.
    Points outside every truncated support get the priors.
    """
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 0 or (arr.ndim == 1 and arr.size == model.d)
    lj = model.log_joint(arr.reshape(-1, model.d))
    dead = ~np.isfinite(lj.max(axis=1))
    if dead.any():
        lj[dead] = np.log(model.priors.p)
    post = np.exp(log_softmax(lj, axis=1))
    return post[0] if single else post


def draw_mixture(
    model: GaussianMixtureModel, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Labels 1..m drawn from the priors, then features from the labelled component."""
    if n < 0:
        raise RangeError(f"sample size must be nonnegative, got {n}")
    labels = rng.choice(model.m, size=n, p=model.priors.p)
    scale = np.sqrt(model.sigma2)[labels][:, None]
    z = rng.standard_normal((n, model.d))
    if model.truncation_radius is not None:
        limit = (model.truncation_radius / scale[:, 0]) ** 2
        outside = np.flatnonzero(np.einsum("nd,nd->n", z, z) > limit)
        while outside.size:
            z[outside] = rng.standard_normal((outside.size, model.d))
            still = np.einsum("nd,nd->n", z[outside], z[outside]) > limit[outside]
            outside = outside[still]
    return model.means[labels] + scale * z, labels + 1


# Per-sample statistics accumulated as (sum, sum of squares).
_SCALARS = ("ber", "entropy", "gen_total", "pw_total")
_MATRICES = ("gen", "pw", "risk", "mass", "cross")


def _block_sums(model: GaussianMixtureModel, seed: int, block: int, size: int) -> dict[str, np.ndarray]:
    rng = make_rng(seed, STREAM_MC, block)
    x, _ = draw_mixture(model, size, rng)
    a = posterior(model, x)
    m = model.m
    out: dict[str, np.ndarray] = {}

    def put(values: np.ndarray) -> tuple[float, float]:
        return float(values.sum()), float(np.dot(values, values))

    ber = 1.0 - a.max(axis=1)
    ent = entr(a).sum(axis=1) / _LN2
    gen_total = np.zeros(size)
    pw_total = np.zeros(size)
    for key in _MATRICES:
        out[key] = np.zeros((2, m, m))
    for i, j in combinations(range(m), 2):
        ai, aj = a[:, i], a[:, j]
        prod = ai * aj
        s = ai + aj
        ratio = np.divide(prod, s, out=np.zeros(size), where=s > 0.0)
        gen_total += prod
        pw_total += ratio
        risk = np.minimum(ai, aj)
        for key, vals in (("gen", prod), ("pw", ratio), ("risk", risk), ("mass", s)):
            out[key][0, i, j], out[key][1, i, j] = put(vals)
        # cross moment for the ratio estimator E[min] / E[a_i + a_j]
        out["cross"][0, i, j] = float(np.dot(risk, s))
    for key, vals in zip(_SCALARS, (ber, ent, gen_total, pw_total)):
        out[key] = np.array(put(vals))
    return out


def _accumulate(
    model: GaussianMixtureModel, n_samples: int, seed: int, threads: int
) -> dict[str, np.ndarray]:
    if n_samples < 1:
        raise RangeError(f"n_samples must be at least 1, got {n_samples}")
    seed = check_seed(seed)
    n_blocks = -(-n_samples // MC_BLOCK)
    sizes = [MC_BLOCK] * (n_blocks - 1) + [n_samples - MC_BLOCK * (n_blocks - 1)]
    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_block_sums, model, seed, b, s) for b, s in enumerate(sizes)]
            parts = [f.result() for f in futures]
    else:
        parts = [_block_sums(model, seed, b, s) for b, s in enumerate(sizes)]
    total = {key: val.copy() for key, val in parts[0].items()}
    for part in parts[1:]:
        for key, val in part.items():
            total[key] += val
    return total


def _mean_se(sums: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    mean = sums[0] / n
    if n < 2:
        return mean, np.zeros_like(mean)
    var = np.maximum(sums[1] / n - mean * mean, 0.0) * n / (n - 1)
    return mean, np.sqrt(var / n)


def _ratio_se(
    num: np.ndarray, den: np.ndarray, num_sq: np.ndarray, cross: np.ndarray, den_sq: np.ndarray, n: int
) -> tuple[np.ndarray, np.ndarray]:
    """Ratio of means num/den and its delta-method standard error; 0 where den is 0."""
    ratio = np.divide(num, den, out=np.zeros_like(num), where=den > 0.0)
    if n < 2:
        return ratio, np.zeros_like(ratio)
    resid = np.maximum(num_sq - 2.0 * ratio * cross + ratio * ratio * den_sq, 0.0) * n / (n - 1)
    se = np.divide(np.sqrt(resid / n), den, out=np.zeros_like(num), where=den > 0.0)
    return ratio, se


def _sym(upper: np.ndarray) -> np.ndarray:
    return upper + upper.T


@dataclass(frozen=True)
class McSummary:
    """All oracle quantities from one shared sample."""

    ber: McEstimate
    cond_entropy: McEstimate
    delta_m: DeltaMatrix
    delta_pw: DeltaMatrix
    pair_risk: np.ndarray
    pair_risk_se: np.ndarray
    pair_mass: np.ndarray
    gen_total: McEstimate
    pw_total: McEstimate
    n_samples: int
    seed: int

    def ordering_tolerance(self, k: float = 3.0) -> float:
        """k standard errors of the noisiest quantity entering the orderings.

        Never below ROUNDING_FLOOR: square roots of radicands near zero turn
        last-bit rounding into ~1e-8 differences even when every SE is zero.
        """
        noise = k * max(
            2.0 * self.gen_total.std_error,
            2.0 * self.pw_total.std_error,
            0.5 * self.cond_entropy.std_error,
        )
        return max(noise, ROUNDING_FLOOR)


def mc_summary(
    model: GaussianMixtureModel, n_samples: int, seed: int, threads: int = 1
) -> McSummary:
    sums = _accumulate(model, int(n_samples), seed, max(1, int(threads)))
    n = int(n_samples)
    seed = check_seed(seed)

    def scalar(key: str) -> McEstimate:
        mean, se = _mean_se(sums[key], n)
        return McEstimate(float(mean), float(se), n, seed)

    gen, gen_se = _mean_se(sums["gen"], n)
    pw, pw_se = _mean_se(sums["pw"], n)
    risk_mean, _ = _mean_se(sums["risk"], n)
    mass, _ = _mean_se(sums["mass"], n)
    risk, risk_se = _ratio_se(
        risk_mean, mass, sums["risk"][1] / n, sums["cross"][0] / n, sums["mass"][1] / n, n
    )
    return McSummary(
        ber=scalar("ber"),
        cond_entropy=scalar("entropy"),
        delta_m=DeltaMatrix(_sym(gen), DeltaKind.GENERALIZED, DeltaSource.ORACLE, _sym(gen_se)),
        delta_pw=DeltaMatrix(
            _sym(pw), DeltaKind.PAIRWISE_HP, DeltaSource.ORACLE, _sym(pw_se), pair_mass=_sym(mass)
        ),
        pair_risk=_sym(risk),
        pair_risk_se=_sym(risk_se),
        pair_mass=_sym(mass),
        gen_total=scalar("gen_total"),
        pw_total=scalar("pw_total"),
        n_samples=n,
        seed=seed,
    )


def mc_ber(model: GaussianMixtureModel, n_samples: int, seed: int, threads: int = 1) -> McEstimate:
    return mc_summary(model, n_samples, seed, threads).ber


def mc_deltas(
    model: GaussianMixtureModel, n_samples: int, seed: int, threads: int = 1
) -> tuple[DeltaMatrix, DeltaMatrix]:
    """(Generalized, PairwiseHP) oracle delta matrices."""
    summary = mc_summary(model, n_samples, seed, threads)
    return summary.delta_m, summary.delta_pw


def mc_conditional_entropy(
    model: GaussianMixtureModel, n_samples: int, seed: int, threads: int = 1
) -> McEstimate:
    return mc_summary(model, n_samples, seed, threads).cond_entropy


def mc_pairwise_risk(
    model: GaussianMixtureModel, n_samples: int, seed: int, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """(risk matrix, std errors); entry (i, j) is the two-class Bayes risk of i vs j."""
    summary = mc_summary(model, n_samples, seed, threads)
    return summary.pair_risk, summary.pair_risk_se


def _check_pair(model: GaussianMixtureModel, i: int, j: int) -> None:
    if i == j or not (1 <= i <= model.m and 1 <= j <= model.m):
        raise RangeError(f"need two distinct classes in 1..{model.m}, got ({i}, {j})")


def mc_hp_integrals(
    model: GaussianMixtureModel, i: int, j: int, n_samples: int, seed: int, threads: int = 1
) -> tuple[McEstimate, McEstimate]:
    """(HP_ij, GHP^m_ij) for classes i, j given 1-based.

    HP_ij = delta_ij / (p_i p_j) and GHP^m_ij = delta^m_ij / (p_i p_j).
    """
    _check_pair(model, i, j)
    summary = mc_summary(model, n_samples, seed, threads)
    pij = float(model.priors.p[i - 1] * model.priors.p[j - 1])

    def est(delta: DeltaMatrix) -> McEstimate:
        se = float(delta.std_errors[i - 1, j - 1]) if delta.std_errors is not None else 0.0
        return McEstimate(delta.entry(i, j), se, summary.n_samples, summary.seed).scaled(1.0 / pij)

    return est(summary.delta_pw), est(summary.delta_m)


def hp_divergence(
    model: GaussianMixtureModel, i: int, j: int, n_samples: int, seed: int, threads: int = 1
) -> McEstimate:
    """D(f_i, f_j) = 1 - (p_i + p_j) HP_ij, in [0, 1]."""
    hp, _ = mc_hp_integrals(model, i, j, n_samples, seed, threads)
    mass = float(model.priors.p[i - 1] + model.priors.p[j - 1])
    return hp.scaled(-mass, shift=1.0)


def binary_ber_closed_form(model: GaussianMixtureModel) -> float:
    """Phi(-|mu_1 - mu_2| / (2 sigma)) for two equal-prior, equal-variance components."""
    if model.m != 2:
        raise RangeError(f"closed form needs exactly 2 classes, got {model.m}")
    p, s = model.priors.p, model.sigma2
    if abs(p[0] - p[1]) > 1e-12 or s[0] != s[1] or model.truncation_radius is not None:
        raise RangeError("closed form needs equal priors, equal variances and no truncation")
    gap = float(np.linalg.norm(model.means[0] - model.means[1]))
    return float(norm.cdf(-gap / (2.0 * math.sqrt(s[0]))))
