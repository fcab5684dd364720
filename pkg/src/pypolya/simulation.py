"""
simulation.py - Synthetic truths drawn from the prior and the coverage study.

A replication draws hyperparameters and a mixture from the DP prior, samples
labelled data from it, fits the marginal model, completes every draw, and
checks whether the marginal and completed moment regions contain the true
population moments (and those of the truncated marginal mixture).

Usage:
    study = run_study(ModelConfig(iterations=100), CompletionConfig(), reps=50)
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import repeat
from typing import Callable, Optional

import numpy as np

from pypolya.analysis import (
    MomentRegion,
    eval_density,
    mixture_moments,
    moment_grid,
    moment_region,
    moments_trapezoid,
)
from pypolya.completion import (
    CompletionConfig,
    MixtureDensity,
    Provenance,
    complete_all,
    complete_atoms,
    draw_mixture,
)
from pypolya.dist_core import NigParams, sample_categorical, sample_gamma, sample_inverse_gamma
from pypolya.errors import DomainError, ValidationError
from pypolya.gibbs import ModelConfig, run_chain

log = logging.getLogger(__name__)

MOMENT_METHODS = ('exact', 'trapezoid')


def sample_prior_hyperparameters(
    model: ModelConfig, rng: np.random.Generator
) -> tuple[float, NigParams]:
    """alpha ~ Ga(c, C), mu ~ N(a, A), tau ~ Inv-Ga(w, W); fixed values win."""
    model.validate()
    if model.fix_alpha is not None:
        alpha = model.fix_alpha
    else:
        alpha = float(sample_gamma(model.c, model.C, rng))
    if model.fix_mu is not None:
        mu = model.fix_mu
    else:
        mu = float(rng.normal(model.a, math.sqrt(model.A)))
    if model.fix_tau is not None:
        tau = model.fix_tau
    else:
        tau = float(sample_inverse_gamma(model.w, model.W, rng))
    return alpha, model.base_measure(mu, tau)


def sample_prior_mixture(
    alpha: float, g0: NigParams, eps: float, ups: float, rng: np.random.Generator
) -> MixtureDensity:
    """Truncated stick-breaking draw of G ~ DP(alpha, G0)."""
    if alpha <= 0:
        raise DomainError(f'alpha must be positive for a prior draw, got {alpha}')
    return complete_atoms([], [], alpha, g0, eps, ups, rng, provenance=Provenance.PRIOR)


def generate_labeled_data(
    mix: MixtureDensity, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """labels_i ~ Multi(weights), y_i ~ N(means[labels_i], variances[labels_i])."""
    if n < 1:
        raise DomainError(f'n must be positive, got {n}')
    labels = sample_categorical(mix.weights, rng, size=n)
    y = rng.normal(mix.means[labels], np.sqrt(mix.variances[labels]))
    return y, labels


def truncated_marginal(mix: MixtureDensity, labels) -> MixtureDensity:
    """Occupied components of `mix`, weighted by how many observations each generated."""
    labels = np.asarray(labels, dtype=np.intp)
    if labels.size == 0:
        raise DomainError('labels must be nonempty')
    if labels.min() < 0 or labels.max() >= len(mix):
        raise DomainError(f'labels must index the {len(mix)} mixture components')
    counts = np.bincount(labels, minlength=len(mix))
    occupied = counts > 0
    return MixtureDensity(
        counts[occupied] / labels.size,
        mix.means[occupied],
        mix.variances[occupied],
        Provenance.TRUNCATED_MARGINAL,
    )


def population_moments(mix: MixtureDensity, method: str = 'exact') -> tuple[float, float]:
    if method == 'exact':
        return mixture_moments(mix)
    if method == 'trapezoid':
        moments = moments_trapezoid(eval_density(mix, moment_grid(mix)))
        return moments.mean, moments.variance
    raise ValidationError(f'moment method must be one of {MOMENT_METHODS}, got {method!r}')


@dataclass(frozen=True)
class ReplicationResult:
    index: int
    alpha: float
    components: int
    occupied: int
    true_moments: tuple[float, float]
    truncated_moments: tuple[float, float]
    marginal_region: MomentRegion
    completed_region: MomentRegion

    @property
    def marginal_covers_truth(self) -> bool:
        return self.marginal_region.contains(self.true_moments)

    @property
    def completed_covers_truth(self) -> bool:
        return self.completed_region.contains(self.true_moments)

    @property
    def marginal_covers_truncated(self) -> bool:
        return self.marginal_region.contains(self.truncated_moments)

    @property
    def completed_covers_truncated(self) -> bool:
        return self.completed_region.contains(self.truncated_moments)

    def to_dict(self) -> dict:
        return {
            'index': self.index,
            'alpha': self.alpha,
            'components': self.components,
            'occupied': self.occupied,
            'true_mean': self.true_moments[0],
            'true_variance': self.true_moments[1],
            'truncated_mean': self.truncated_moments[0],
            'truncated_variance': self.truncated_moments[1],
            'marginal_covers_truth': self.marginal_covers_truth,
            'completed_covers_truth': self.completed_covers_truth,
            'marginal_covers_truncated': self.marginal_covers_truncated,
            'completed_covers_truncated': self.completed_covers_truncated,
        }


@dataclass(frozen=True)
class StudyResult:
    replications: list[ReplicationResult]
    n: int
    level: float

    def rate(self, name: str) -> float:
        if not self.replications:
            return math.nan
        return float(np.mean([getattr(r, name) for r in self.replications]))

    def summary(self) -> dict:
        return {
            'replications': len(self.replications),
            'n': self.n,
            'level': self.level,
            'marginal_covers_truth': self.rate('marginal_covers_truth'),
            'completed_covers_truth': self.rate('completed_covers_truth'),
            'marginal_covers_truncated': self.rate('marginal_covers_truncated'),
            'completed_covers_truncated': self.rate('completed_covers_truncated'),
        }


def _child_seed(seed: np.random.SeedSequence) -> int:
    return int(seed.generate_state(1, dtype=np.uint32)[0])


def run_replication(
    model: ModelConfig,
    completion: CompletionConfig,
    n: int,
    level: float,
    seed: np.random.SeedSequence,
    index: int = 0,
    moments: str = 'exact',
) -> ReplicationResult:
    """
    One prior truth, one fitted chain, one set of completed draws.

    Posterior moment points always come from the trapezoid rule; `moments`
    only picks how the true and truncated population moments are computed.
    """
    truth_seed, chain_seed, completion_seed = seed.spawn(3)
    rng = np.random.default_rng(truth_seed)
    alpha, g0 = sample_prior_hyperparameters(model, rng)
    truth = sample_prior_mixture(alpha, g0, completion.eps, completion.ups, rng)
    y, labels = generate_labeled_data(truth, n, rng)
    truncated = truncated_marginal(truth, labels)

    draws = run_chain(y, replace(model, seed=_child_seed(chain_seed)))
    if not draws:
        raise ValidationError('the study needs at least one retained draw per chain')
    completed = complete_all(
        draws, model, replace(completion, seed=_child_seed(completion_seed))
    )
    marginal_points = [population_moments(draw_mixture(d), 'trapezoid') for d in draws]
    completed_points = [population_moments(m, 'trapezoid') for m in completed]

    result = ReplicationResult(
        index=index,
        alpha=alpha,
        components=len(truth),
        occupied=len(truncated),
        true_moments=population_moments(truth, moments),
        truncated_moments=population_moments(truncated, moments),
        marginal_region=moment_region(marginal_points, level),
        completed_region=moment_region(completed_points, level),
    )
    log.info(
        'replication %d: alpha=%.3f occupied=%d/%d covers marginal=%s completed=%s',
        index,
        alpha,
        result.occupied,
        result.components,
        result.marginal_covers_truth,
        result.completed_covers_truth,
    )
    return result


def run_study(
    model: ModelConfig,
    completion: CompletionConfig,
    reps: int,
    n: int = 82,
    level: float = 0.95,
    seed: int = 0,
    workers: int = 1,
    moments: str = 'exact',
    progress: Optional[Callable[[], None]] = None,
) -> StudyResult:
    """
    Independent replications; replication r uses child r of SeedSequence(seed),
    so results do not depend on `workers`.
    """
    if reps < 0:
        raise ValidationError(f'reps must be nonnegative, got {reps}')
    if not 0.0 < level < 1.0:
        raise ValidationError(f'level must lie in (0, 1), got {level}')
    if moments not in MOMENT_METHODS:
        raise ValidationError(f'moment method must be one of {MOMENT_METHODS}, got {moments!r}')
    model.validate()
    completion.validate()
    seeds = np.random.SeedSequence(seed).spawn(reps)
    log.info('Running %d replications with n=%d', reps, n)
    if workers > 1 and reps > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(
                    run_replication,
                    repeat(model),
                    repeat(completion),
                    repeat(n),
                    repeat(level),
                    seeds,
                    range(reps),
                    repeat(moments),
                )
            )
    else:
        results = []
        for index, child in enumerate(seeds):
            results.append(
                run_replication(model, completion, n, level, child, index, moments)
            )
            if progress:
                progress()
    return StudyResult(results, n, level)
