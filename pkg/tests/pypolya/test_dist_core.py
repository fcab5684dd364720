import math

import numpy as np
import pytest
from scipy import integrate, stats

from pypolya import dist_core
from pypolya.dist_core import NigParams
from pypolya.errors import DomainError


def test_nig_params_rejects_bad_values():
    with pytest.raises(DomainError):
        NigParams(mu=0.0, tau=0.0, s=1.0, S=1.0)
    with pytest.raises(DomainError):
        NigParams(mu=math.nan, tau=1.0, s=1.0, S=1.0)
    with pytest.raises(DomainError):
        dist_core.Component(0.0, -1.0)


def test_marginal_t_matches_student_t(g0):
    y = np.linspace(10, 30, 41)
    scale = math.sqrt(g0.S * (1 + g0.tau) / g0.s)
    expected = stats.t.logpdf(y, df=2 * g0.s, loc=g0.mu, scale=scale)
    np.testing.assert_allclose(dist_core.marginal_t_logpdf(y, g0), expected, rtol=1e-10)


def test_marginal_t_matches_quadrature_over_variance(g0):
    y = 23.5

    def integrand(v):
        normal = stats.norm.pdf(y, g0.mu, math.sqrt(v * (1 + g0.tau)))
        return normal * stats.invgamma.pdf(v, g0.s, scale=g0.S)

    expected, _ = integrate.quad(integrand, 0, np.inf)
    assert dist_core.marginal_t_density(y, g0) == pytest.approx(expected, rel=1e-7)


def test_marginal_t_integrates_to_one(g0):
    total, _ = integrate.quad(lambda y: dist_core.marginal_t_density(y, g0), -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_single_update_known_values():
    post = dist_core.nig_posterior_single(2.0, NigParams(0.0, 1.0, 2.0, 1.0))
    assert post == NigParams(mu=1.0, tau=0.5, s=2.5, S=2.0)


def test_batch_update_equals_sequential_updates(g0, rng):
    ys = rng.normal(21, 3, size=15)
    folded = g0
    for y in ys:
        folded = dist_core.nig_posterior_single(y, folded)
    batch = dist_core.nig_posterior(ys, g0)
    for name in ('mu', 'tau', 's', 'S'):
        assert getattr(batch, name) == pytest.approx(getattr(folded, name), rel=1e-12)
    assert dist_core.nig_posterior([], g0) is g0


def test_inverse_gamma_mean(rng):
    draws = dist_core.sample_inverse_gamma(5.0, 4.0, rng, size=100_000)
    assert draws.mean() == pytest.approx(1.0, abs=0.01)


def test_gamma_uses_rate(rng):
    draws = dist_core.sample_gamma(3.0, 2.0, rng, size=100_000)
    assert draws.mean() == pytest.approx(1.5, abs=0.02)


def test_sample_nig_moments(rng):
    params = NigParams(mu=5.0, tau=0.5, s=4.0, S=3.0)
    means, variances = dist_core.sample_nig_many(params, 200_000, rng)
    assert variances.mean() == pytest.approx(1.0, abs=0.01)
    # Var(m) = tau * E[V]
    assert means.mean() == pytest.approx(5.0, abs=0.01)
    assert means.var() == pytest.approx(0.5, abs=0.01)
    single = dist_core.sample_nig(params, rng)
    assert single.variance > 0


@pytest.mark.parametrize('rate', [0.3, 4.0, 83 * 4.6, 5000.0, 2e4, 1e5])
@pytest.mark.parametrize('p', [0.5, 0.9, 0.99])
def test_poisson_quantile_matches_scipy(p, rate):
    assert dist_core.poisson_quantile(p, rate) == int(stats.poisson.ppf(p, rate))


def test_poisson_quantile_edges():
    assert dist_core.poisson_quantile(0.99, 0.0) == 0
    assert dist_core.poisson_quantile(0.0, 10.0) == 0
    with pytest.raises(DomainError):
        dist_core.poisson_quantile(1.0, 3.0)
    with pytest.raises(DomainError):
        dist_core.poisson_quantile(0.5, -1.0)


def test_categorical_frequencies(rng):
    weights = np.array([0.2, 0.0, 0.5, 0.3])
    picks = dist_core.sample_categorical(weights, rng, size=100_000)
    freq = np.bincount(picks, minlength=4) / picks.size
    assert freq[1] == 0
    np.testing.assert_allclose(freq, weights, atol=0.006)
    assert isinstance(dist_core.sample_categorical([1.0, 2.0], rng), int)


def test_categorical_rejects_bad_weights(rng):
    with pytest.raises(DomainError):
        dist_core.sample_categorical([], rng)
    with pytest.raises(DomainError):
        dist_core.sample_categorical([0.0, 0.0], rng)
    with pytest.raises(DomainError):
        dist_core.sample_categorical([1.0, -0.5], rng)


@pytest.mark.parametrize('a, b', [(1.0, 1.0), (1.0, 83.0), (2.0, 2.0)])
def test_beta_mean_and_variance(a, b, rng):
    n = 100_000
    draws = dist_core.sample_beta(a, b, rng, size=n)
    assert np.all((draws > 0) & (draws < 1))
    mean = a / (a + b)
    variance = a * b / ((a + b) ** 2 * (a + b + 1))
    assert abs(draws.mean() - mean) < 4 * math.sqrt(variance / n)
    squares = (draws - draws.mean()) ** 2
    assert abs(squares.mean() - variance) < 4 * squares.std() / math.sqrt(n)


def test_beta_rejects_bad_parameters(rng):
    with pytest.raises(DomainError):
        dist_core.sample_beta(0.0, 1.0, rng)
    with pytest.raises(DomainError):
        dist_core.sample_beta(1.0, -2.0, rng)


def test_inverse_gamma_reciprocal_is_gamma(rng):
    inverse = 1.0 / dist_core.sample_inverse_gamma(2.0, 1.0, rng, size=20_000)
    direct = dist_core.sample_gamma(2.0, 1.0, rng, size=20_000)
    assert stats.ks_2samp(inverse, direct).pvalue > 1e-3


def test_single_update_matches_importance_sampling(rng):
    prior = NigParams(mu=1.0, tau=1.0, s=2.0, S=1.0)
    post = dist_core.nig_posterior_single(0.0, prior)
    assert post == NigParams(mu=0.5, tau=0.5, s=2.5, S=1.25)

    # self-normalized importance sampling with the prior as proposal
    means, variances = dist_core.sample_nig_many(prior, 1_000_000, rng)
    log_w = dist_core.normal_logpdf(0.0, means, variances)
    w = np.exp(log_w - log_w.max())
    w /= w.sum()
    for sample, exact in [(means, post.mu), (variances, post.S / (post.s - 1))]:
        estimate = float(w @ sample)
        se = math.sqrt(float(w**2 @ (sample - estimate) ** 2))
        assert abs(estimate - exact) < 4 * se


def test_poisson_quantile_is_monotone():
    ps = np.linspace(0.01, 0.99, 25)
    rates = [0.5, 3.0, 40.0, 380.0, 2e4]
    for rate in rates:
        quantiles = [dist_core.poisson_quantile(p, rate) for p in ps]
        assert np.all(np.diff(quantiles) >= 0)
    for p in (0.1, 0.5, 0.99):
        quantiles = [dist_core.poisson_quantile(p, rate) for rate in rates]
        assert np.all(np.diff(quantiles) >= 0)


class _TopOfRange:
    """Stream whose uniforms sit at the very top of [0, 1)."""

    def random(self, size=None):
        return 1.0 if size is None else np.ones(size)


def test_categorical_never_returns_trailing_zero_weight():
    weights = [0.3, 0.7, 0.0, 0.0]
    assert dist_core.sample_categorical(weights, _TopOfRange()) == 1
    picks = dist_core.sample_categorical(weights, _TopOfRange(), size=5)
    np.testing.assert_array_equal(picks, 1)
