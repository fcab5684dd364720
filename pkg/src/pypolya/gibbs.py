"""
gibbs.py - Marginal Gibbs sampler for the Dirichlet process mixture of normals.

Each sweep updates theta_1..theta_n one coordinate at a time through the
Polya-urn full conditional, optionally redraws every distinct component from
its conjugate posterior (remix), then refreshes mu, tau and alpha.

Usage:
    draws = run_chain(data, ModelConfig(iterations=100))
"""

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Callable, Optional, Sequence

import numpy as np

from pypolya.dist_core import (
    Component,
    NigParams,
    marginal_t_logpdf,
    nig_posterior,
    nig_posterior_single,
    normal_logpdf,
    sample_beta,
    sample_categorical,
    sample_gamma,
    sample_inverse_gamma,
    sample_nig,
)
from pypolya.errors import DomainError, ValidationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelConfig:
    """Hyperpriors mu ~ N(a, A), tau ~ Inv-Ga(w, W), alpha ~ Ga(c, C), V ~ Inv-Ga(s, S)."""

    a: float = 20.8
    A: float = 20.8
    w: float = 0.5
    W: float = 50.0
    c: float = 1.0
    C: float = 2.0
    s: float = 2.0
    S: float = 1.0
    fix_alpha: Optional[float] = None
    fix_mu: Optional[float] = None
    fix_tau: Optional[float] = None
    iterations: int = 100
    burnin: int = 2000
    thin: int = 150
    seed: int = 0
    remix: bool = True

    def validate(self) -> 'ModelConfig':
        if not math.isfinite(self.a):
            raise ValidationError(f'a must be finite, got {self.a}')
        for name in ('A', 'w', 'W', 'c', 'C', 's', 'S'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f'{name} must be positive, got {value}')
        for name in ('fix_alpha', 'fix_tau'):
            value = getattr(self, name)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ValidationError(f'{name} must be positive, got {value}')
        if self.fix_mu is not None and not math.isfinite(self.fix_mu):
            raise ValidationError(f'fix_mu must be finite, got {self.fix_mu}')
        if self.iterations < 0 or self.burnin < 0:
            raise ValidationError('iterations and burnin must be nonnegative')
        if self.thin < 1:
            raise ValidationError(f'thin must be at least 1, got {self.thin}')
        return self

    def base_measure(self, mu: float, tau: float) -> NigParams:
        return NigParams(mu, tau, self.s, self.S)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> 'ModelConfig':
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f'Unknown model config keys: {sorted(unknown)}')
        return cls(**data).validate()


@dataclass(frozen=True, eq=False)
class PosteriorDraw:
    """One retained iteration: theta_1..theta_n (as two arrays), mu, tau, alpha."""

    means: np.ndarray
    variances: np.ndarray
    mu: float
    tau: float
    alpha: float
    k: int

    @property
    def n(self) -> int:
        return int(self.means.size)

    @property
    def thetas(self) -> list[Component]:
        return [Component(float(m), float(v)) for m, v in zip(self.means, self.variances)]


class GibbsState:
    """
    Current position of the chain.

    Distinct components live in the first `k` slots of `means`, `variances`
    and `counts`; `labels[i]` points observation i at its slot.
    """

    def __init__(self, data, config: ModelConfig, mu: float, tau: float, alpha: float):
        self.data = np.asarray(data, dtype=float)
        self.config = config
        n = self.data.size
        self.labels = np.full(n, -1, dtype=np.intp)
        self.means = np.empty(n)
        self.variances = np.empty(n)
        self.counts = np.zeros(n, dtype=np.intp)
        self.k = 0
        self._mu = float(mu)
        self._tau = float(tau)
        self.alpha = float(alpha)
        self._log_q0 = None

    @classmethod
    def from_components(
        cls,
        data,
        thetas: Sequence[Component],
        config: ModelConfig,
        mu: float,
        tau: float,
        alpha: float,
    ) -> 'GibbsState':
        """Build a state whose partition groups equal components together."""
        state = cls(data, config, mu, tau, alpha)
        if len(thetas) != state.n:
            raise DomainError('need exactly one component per observation')
        slots: dict[Component, int] = {}
        for i, theta in enumerate(thetas):
            if theta not in slots:
                slots[theta] = state._open(theta.mean, theta.variance)
            state._attach(i, slots[theta])
        return state

    @property
    def n(self) -> int:
        return int(self.data.size)

    @property
    def mu(self) -> float:
        return self._mu

    @mu.setter
    def mu(self, value: float) -> None:
        self._mu = float(value)
        self._log_q0 = None

    @property
    def tau(self) -> float:
        return self._tau

    @tau.setter
    def tau(self, value: float) -> None:
        self._tau = float(value)
        self._log_q0 = None

    @property
    def g0(self) -> NigParams:
        return self.config.base_measure(self._mu, self._tau)

    @property
    def log_q0(self) -> np.ndarray:
        """Prior predictive log density of every observation under the current G0."""
        if self._log_q0 is None:
            self._log_q0 = marginal_t_logpdf(self.data, self.g0)
        return self._log_q0

    @property
    def thetas(self) -> list[Component]:
        return [
            Component(float(self.means[j]), float(self.variances[j]))
            for j in self.labels
        ]

    @property
    def partition(self) -> dict[Component, list[int]]:
        groups: dict[Component, list[int]] = {}
        for i, j in enumerate(self.labels):
            key = Component(float(self.means[j]), float(self.variances[j]))
            groups.setdefault(key, []).append(i)
        return groups

    def snapshot(self) -> PosteriorDraw:
        means = self.means[self.labels]
        variances = self.variances[self.labels]
        means.flags.writeable = False
        variances.flags.writeable = False
        return PosteriorDraw(means, variances, self._mu, self._tau, self.alpha, self.k)

    def _open(self, mean: float, variance: float) -> int:
        j = self.k
        self.means[j] = mean
        self.variances[j] = variance
        self.counts[j] = 0
        self.k += 1
        return j

    def _attach(self, i: int, j: int) -> None:
        self.labels[i] = j
        self.counts[j] += 1

    def _detach(self, i: int) -> None:
        j = self.labels[i]
        self.labels[i] = -1
        self.counts[j] -= 1
        if self.counts[j] == 0:
            last = self.k - 1
            if j != last:
                self.means[j] = self.means[last]
                self.variances[j] = self.variances[last]
                self.counts[j] = self.counts[last]
                self.labels[self.labels == last] = j
            self.k = last


def check_state(state: GibbsState) -> None:
    """Assert the partition bookkeeping agrees with the labels."""
    k = state.k
    assert 1 <= k <= state.n, f'k={k} outside [1, {state.n}]'
    assert np.all((state.labels >= 0) & (state.labels < k)), 'dangling label'
    counts = np.bincount(state.labels, minlength=k)
    assert np.array_equal(counts, state.counts[:k]), 'counts out of sync'
    keys = np.column_stack([state.means[:k], state.variances[:k]])
    assert np.unique(keys, axis=0).shape[0] == k, 'duplicate components'


def _validate_data(data) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    if data.ndim != 1:
        raise ValidationError('data must be a 1-d sequence of reals')
    if data.size == 0:
        raise DomainError('data must contain at least one observation')
    if not np.all(np.isfinite(data)):
        raise ValidationError('data must be finite')
    return data


def init_state(data, config: ModelConfig, rng: np.random.Generator) -> GibbsState:
    """Hyperparameters from their priors (or fixed), theta_i from G0 | y_i."""
    data = _validate_data(data)
    config.validate()
    if config.fix_mu is not None:
        mu = config.fix_mu
    else:
        mu = rng.normal(config.a, math.sqrt(config.A))
    if config.fix_tau is not None:
        tau = config.fix_tau
    else:
        tau = sample_inverse_gamma(config.w, config.W, rng)
    if config.fix_alpha is not None:
        alpha = config.fix_alpha
    else:
        alpha = sample_gamma(config.c, config.C, rng)

    state = GibbsState(data, config, mu, tau, alpha)
    g0 = state.g0
    for i, y in enumerate(data):
        theta = sample_nig(nig_posterior_single(y, g0), rng)
        state._attach(i, state._open(theta.mean, theta.variance))
    return state


def update_theta(
    state: GibbsState, i: int, rng: np.random.Generator, *, likelihood: bool = True
) -> GibbsState:
    """
    Resample theta_i given the other thetas.

    New component with weight alpha * q0(y_i), otherwise join slot j with
    weight n_j * N(y_i | theta_j). With likelihood=False the data are ignored
    and the move is a plain Polya-urn draw.
    """
    y = state.data[i]
    state._detach(i)
    k = state.k
    log_weights = np.empty(k + 1)
    log_weights[:k] = np.log(state.counts[:k])
    if likelihood:
        log_weights[:k] += normal_logpdf(y, state.means[:k], state.variances[:k])
        log_weights[k] = math.log(state.alpha) + state.log_q0[i]
    else:
        log_weights[k] = math.log(state.alpha)

    j = sample_categorical(np.exp(log_weights - log_weights.max()), rng)
    if j == k:
        g0 = state.g0
        theta = sample_nig(nig_posterior_single(y, g0) if likelihood else g0, rng)
        j = state._open(theta.mean, theta.variance)
    state._attach(i, j)
    return state


def remix_clusters(state: GibbsState, rng: np.random.Generator) -> GibbsState:
    """Redraw each distinct component from G0 updated by its allocated data."""
    g0 = state.g0
    for j in range(state.k):
        theta = sample_nig(nig_posterior(state.data[state.labels == j], g0), rng)
        state.means[j] = theta.mean
        state.variances[j] = theta.variance
    return state


def update_mu(state: GibbsState, rng: np.random.Generator) -> GibbsState:
    config = state.config
    if config.fix_mu is not None:
        return state
    k = state.k
    scaled = state.tau * state.variances[:k]
    precision = 1.0 / config.A + float(np.sum(1.0 / scaled))
    mean = (config.a / config.A + float(np.sum(state.means[:k] / scaled))) / precision
    state.mu = rng.normal(mean, math.sqrt(1.0 / precision))
    return state


def update_tau(state: GibbsState, rng: np.random.Generator) -> GibbsState:
    config = state.config
    if config.fix_tau is not None:
        return state
    k = state.k
    spread = float(np.sum((state.means[:k] - state.mu) ** 2 / state.variances[:k]))
    state.tau = sample_inverse_gamma(config.w + 0.5 * k, config.W + 0.5 * spread, rng)
    return state


def update_alpha(state: GibbsState, rng: np.random.Generator) -> GibbsState:
    """Auxiliary-variable update: x ~ Beta(alpha + 1, n), then a Gamma mixture."""
    config = state.config
    if config.fix_alpha is not None:
        return state
    n, k = state.n, state.k
    x = sample_beta(state.alpha + 1.0, n, rng)
    rate = config.C - math.log(x)
    odds = (config.c + k - 1.0) / (n * rate)
    shape = config.c + k if rng.random() < odds / (1.0 + odds) else config.c + k - 1.0
    state.alpha = sample_gamma(shape, rate, rng)
    return state


def sweep(
    state: GibbsState, rng: np.random.Generator, *, likelihood: bool = True
) -> GibbsState:
    for i in range(state.n):
        update_theta(state, i, rng, likelihood=likelihood)
    if state.config.remix:
        remix_clusters(state, rng)
    update_mu(state, rng)
    update_tau(state, rng)
    update_alpha(state, rng)
    if log.isEnabledFor(logging.DEBUG):
        check_state(state)
    return state


def run_chain(
    data, config: ModelConfig, progress: Optional[Callable[[], None]] = None
) -> list[PosteriorDraw]:
    """
    Burn in, then keep every `thin`-th of `iterations * thin` sweeps.

    `progress` is called once per sweep when given.
    """
    rng = np.random.default_rng(config.seed)
    state = init_state(data, config, rng)
    log.info(
        'Sampling n=%d: burnin=%d, iterations=%d, thin=%d',
        state.n,
        config.burnin,
        config.iterations,
        config.thin,
    )
    for _ in range(config.burnin):
        sweep(state, rng)
        if progress:
            progress()

    draws: list[PosteriorDraw] = []
    for t in range(config.iterations):
        for _ in range(config.thin):
            sweep(state, rng)
            if progress:
                progress()
        draws.append(state.snapshot())
        log.debug(
            'draw %d: k=%d mu=%.4f tau=%.4f alpha=%.4f',
            t,
            state.k,
            state.mu,
            state.tau,
            state.alpha,
        )
    return draws


def count_components(draw: PosteriorDraw) -> int:
    """Number of distinct (mean, variance) pairs; ties only arise by copying."""
    keys = np.column_stack([draw.means, draw.variances])
    return int(np.unique(keys, axis=0).shape[0])
