"""
dist_core.py - Random variates and density kernels for the normal / NIG model.

The base measure is NIG(mu, tau, s, S) read as

    V ~ Inv-Ga(s, S)        (shape / scale)
    m | V ~ N(mu, tau * V)

Every sampler takes an explicit numpy Generator and keeps no state of its own.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from pypolya.errors import DomainError

_LOG_2PI = math.log(2.0 * math.pi)


def _check_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f'{name} must be positive and finite, got {value}')


@dataclass(frozen=True)
class NigParams:
    mu: float
    tau: float
    s: float
    S: float

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise DomainError(f'mu must be finite, got {self.mu}')
        _check_positive('tau', self.tau)
        _check_positive('s', self.s)
        _check_positive('S', self.S)


@dataclass(frozen=True)
class Component:
    mean: float
    variance: float

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise DomainError(f'component mean must be finite, got {self.mean}')
        _check_positive('component variance', self.variance)


def sample_beta(a: float, b: float, rng: np.random.Generator, size=None):
    _check_positive('a', a)
    _check_positive('b', b)
    return rng.beta(a, b, size=size)


def sample_gamma(shape: float, rate: float, rng: np.random.Generator, size=None):
    """Gamma variate with mean shape / rate."""
    _check_positive('shape', shape)
    _check_positive('rate', rate)
    return rng.gamma(shape, 1.0 / rate, size=size)


def sample_inverse_gamma(
    shape: float, scale: float, rng: np.random.Generator, size=None
):
    """Reciprocal of a Gamma(shape, rate=scale) variate."""
    _check_positive('shape', shape)
    _check_positive('scale', scale)
    return scale / rng.gamma(shape, 1.0, size=size)


def sample_nig_many(
    params: NigParams, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Draw `size` (mean, variance) pairs from NIG(params) as two arrays."""
    variances = sample_inverse_gamma(params.s, params.S, rng, size=size)
    means = rng.normal(params.mu, np.sqrt(params.tau * variances))
    return means, variances


def sample_nig(params: NigParams, rng: np.random.Generator) -> Component:
    means, variances = sample_nig_many(params, 1, rng)
    return Component(float(means[0]), float(variances[0]))


def normal_logpdf(y, mean, variance):
    """Log N(y | mean, variance), broadcasting over arrays."""
    return -0.5 * (_LOG_2PI + np.log(variance) + (y - mean) ** 2 / variance)


def marginal_t_logpdf(y, params: NigParams):
    """
    Log of the prior predictive  integral N(y | m, V) dNIG(m, V).

    That is a Student-t with 2s degrees of freedom, location mu and squared
    scale S(1 + tau) / s.
    """
    spread = 2.0 * params.S * (1.0 + params.tau)
    return (
        special.gammaln(params.s + 0.5)
        - special.gammaln(params.s)
        - 0.5 * (math.log(math.pi) + math.log(spread))
        - (params.s + 0.5) * np.log1p((np.asarray(y) - params.mu) ** 2 / spread)
    )


def marginal_t_density(y, params: NigParams):
    return np.exp(marginal_t_logpdf(y, params))


def nig_posterior_single(y: float, params: NigParams) -> NigParams:
    """Conjugate update of NIG(params) by one observation y ~ N(m, V)."""
    shrink = 1.0 + params.tau
    return NigParams(
        mu=(params.mu + params.tau * y) / shrink,
        tau=params.tau / shrink,
        s=params.s + 0.5,
        S=params.S + (y - params.mu) ** 2 / (2.0 * shrink),
    )


def nig_posterior(ys, params: NigParams) -> NigParams:
    """
    Conjugate update by a batch of observations.

    Algebraically identical to folding nig_posterior_single over ys in any
    order.
    """
    ys = np.asarray(ys, dtype=float)
    n = ys.size
    if n == 0:
        return params
    ybar = float(ys.mean())
    shrink = 1.0 + n * params.tau
    scatter = float(((ys - ybar) ** 2).sum())
    return NigParams(
        mu=(params.mu + params.tau * n * ybar) / shrink,
        tau=params.tau / shrink,
        s=params.s + 0.5 * n,
        S=params.S + 0.5 * (scatter + n * (ybar - params.mu) ** 2 / shrink),
    )


# Above this rate the quantile search starts from a normal approximation.
_POISSON_NORMAL_RATE = 1e4


def poisson_quantile(p: float, rate: float) -> int:
    """Smallest m with P(Pois(rate) <= m) >= p."""
    if not 0.0 <= p < 1.0:
        raise DomainError(f'p must lie in [0, 1), got {p}')
    if not (math.isfinite(rate) and rate >= 0):
        raise DomainError(f'rate must be finite and nonnegative, got {rate}')
    if rate == 0.0 or p == 0.0:
        return 0

    if rate <= _POISSON_NORMAL_RATE:
        log_p = math.log(p)
        upper = int(rate + 12.0 * math.sqrt(rate) + 30.0)
        while True:
            m = np.arange(upper + 1)
            log_pmf = m * math.log(rate) - rate - special.gammaln(m + 1.0)
            log_cdf = np.logaddexp.accumulate(log_pmf)
            hit = np.flatnonzero(log_cdf >= log_p)
            if hit.size:
                return int(hit[0])
            upper *= 2

    # bracket around the normal approximation, then refine on the exact CDF
    z = special.ndtri(p)
    half_width = int(12.0 * math.sqrt(rate)) + 30
    centre = int(rate + z * math.sqrt(rate))
    lo = max(0, centre - half_width)
    hi = centre + half_width
    while lo > 0 and special.pdtr(lo, rate) >= p:
        lo = max(0, lo - half_width)
    while special.pdtr(hi, rate) < p:
        hi += half_width
    m = np.arange(lo, hi + 1)
    cdf = special.pdtr(m, rate)
    return int(m[np.flatnonzero(cdf >= p)[0]])


def sample_categorical(weights, rng: np.random.Generator, size: Optional[int] = None):
    """Index j with probability weights[j] / sum(weights)."""
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or weights.size == 0:
        raise DomainError('weights must be a nonempty 1-d sequence')
    if not np.all(np.isfinite(weights)) or np.any(weights < 0):
        raise DomainError('weights must be finite and nonnegative')
    cumulative = np.cumsum(weights)
    total = cumulative[-1]
    if total <= 0:
        raise DomainError('at least one weight must be positive')
    u = rng.random(size) * total
    # u can round up to total; the last positive weight owns that end
    last = int(np.flatnonzero(weights)[-1])
    index = np.minimum(np.searchsorted(cumulative, u, side='right'), last)
    if size is None:
        return int(index)
    return index
