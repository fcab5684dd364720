"""
completion.py - Polya completion of marginal posterior draws.

A draw theta_1..theta_n is continued as a Polya-urn sequence with parameters
alpha + n and G_n = (alpha G0 + sum_i delta_theta_i) / (alpha + n). Using the
stick-breaking form, sticks are Beta(1, alpha + n) and atoms are i.i.d. from
G_n. The number of sticks M is fixed in advance from a Poisson quantile so
that the unassigned mass is below eps with probability at least 1 - ups.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from itertools import repeat
from typing import Sequence

import numpy as np

from pypolya.dist_core import (
    Component,
    NigParams,
    poisson_quantile,
    sample_beta,
    sample_nig_many,
)
from pypolya.errors import DomainError, ValidationError
from pypolya.gibbs import ModelConfig, PosteriorDraw

log = logging.getLogger(__name__)

# Beta(1, b) draws round to 0 or 1 for extreme b; keep them strictly inside.
_V_LOW = np.finfo(float).tiny
_V_HIGH = 1.0 - np.finfo(float).epsneg


@dataclass(frozen=True)
class CompletionConfig:
    eps: float = 0.01
    ups: float = 0.01
    seed: int = 0

    def validate(self) -> 'CompletionConfig':
        if not 0.0 < self.eps < 1.0:
            raise ValidationError(f'eps must lie in (0, 1), got {self.eps}')
        if not 0.0 < self.ups < 1.0:
            raise ValidationError(f'ups must lie in (0, 1), got {self.ups}')
        return self

    def to_dict(self) -> dict:
        return asdict(self)


class Provenance(str, Enum):
    COMPLETED = 'completed'
    PRIOR = 'prior'
    TRUNCATED_MARGINAL = 'truncated-marginal'
    MARGINAL = 'marginal'


@dataclass(frozen=True, eq=False)
class MixtureDensity:
    """Finite normal mixture sum_j weights[j] N(. | means[j], variances[j])."""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        for name in ('weights', 'means', 'variances'):
            array = np.array(getattr(self, name), dtype=float)
            array.flags.writeable = False
            object.__setattr__(self, name, array)
        object.__setattr__(self, 'provenance', Provenance(self.provenance))
        if not (self.weights.shape == self.means.shape == self.variances.shape):
            raise DomainError('weights, means and variances must have equal length')
        if self.weights.size == 0:
            raise DomainError('a mixture needs at least one component')
        if np.any(self.weights <= 0) or np.any(self.variances <= 0):
            raise DomainError('weights and variances must be positive')
        if abs(float(self.weights.sum()) - 1.0) > 1e-12:
            raise DomainError(f'weights sum to {self.weights.sum()!r}, not 1')

    def __len__(self) -> int:
        return int(self.weights.size)

    @property
    def components(self) -> list[Component]:
        return [Component(float(m), float(v)) for m, v in zip(self.means, self.variances)]

    @classmethod
    def from_atoms(cls, weights, means, variances, provenance) -> 'MixtureDensity':
        """Merge tied atoms by adding their weights and drop zero-weight atoms."""
        weights = np.asarray(weights, dtype=float)
        keys = np.column_stack([means, variances])
        unique, inverse = np.unique(keys, axis=0, return_inverse=True)
        merged = np.bincount(inverse.ravel(), weights=weights, minlength=len(unique))
        keep = merged > 0
        return cls(merged[keep], unique[keep, 0], unique[keep, 1], provenance)


def truncation_level(alpha: float, n: int, eps: float, ups: float) -> int:
    """M = 2 + the (1 - ups) quantile of Pois(-(alpha + n) log eps)."""
    if not 0.0 < eps < 1.0 or not 0.0 < ups < 1.0:
        raise DomainError(f'eps and ups must lie in (0, 1), got {eps}, {ups}')
    if alpha < 0 or n < 0 or alpha + n <= 0:
        raise DomainError(f'need alpha + n > 0, got alpha={alpha}, n={n}')
    return 2 + poisson_quantile(1.0 - ups, (alpha + n) * -math.log(eps))


def stick_weights(v) -> np.ndarray:
    """
    w_j = v_j prod_{i<j} (1 - v_i) for j < M; the last weight takes the
    remainder prod_{i<M} (1 - v_i), which equals 1 - sum_{j<M} w_j.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DomainError('need at least one stick')
    if not np.all((v > 0) & (v < 1)):
        raise DomainError('sticks must lie strictly inside (0, 1)')
    remaining = np.concatenate([[1.0], np.cumprod(1.0 - v[:-1])])
    weights = v * remaining
    weights[-1] = remaining[-1]
    return weights


def _draw_atoms(
    means: np.ndarray,
    variances: np.ndarray,
    alpha: float,
    g0: NigParams,
    size: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    n = means.size
    total = alpha + n
    if alpha < 0 or total <= 0:
        raise DomainError(f'need alpha >= 0 and alpha + n > 0, got {alpha}, {n}')
    fresh = rng.uniform(0.0, total, size=size) < alpha
    atom_means = np.empty(size)
    atom_variances = np.empty(size)
    n_fresh = int(fresh.sum())
    if n_fresh:
        atom_means[fresh], atom_variances[fresh] = sample_nig_many(g0, n_fresh, rng)
    if n_fresh < size:
        picks = rng.integers(n, size=size - n_fresh)
        atom_means[~fresh] = means[picks]
        atom_variances[~fresh] = variances[picks]
    return atom_means, atom_variances


def draw_atom(draw: PosteriorDraw, g0: NigParams, rng: np.random.Generator) -> Component:
    """One atom from G_n: fresh from G0 w.p. alpha / (alpha + n), else a theta_i."""
    means, variances = _draw_atoms(draw.means, draw.variances, draw.alpha, g0, 1, rng)
    return Component(float(means[0]), float(variances[0]))


def complete_atoms(
    means,
    variances,
    alpha: float,
    g0: NigParams,
    eps: float,
    ups: float,
    rng: np.random.Generator,
    provenance: Provenance = Provenance.COMPLETED,
) -> MixtureDensity:
    """Stick-breaking completion of the urn started at (means, variances)."""
    means = np.asarray(means, dtype=float)
    variances = np.asarray(variances, dtype=float)
    n = means.size
    m = truncation_level(alpha, n, eps, ups)
    v = np.clip(sample_beta(1.0, alpha + n, rng, size=m), _V_LOW, _V_HIGH)
    weights = stick_weights(v)
    atom_means, atom_variances = _draw_atoms(means, variances, alpha, g0, m, rng)
    return MixtureDensity.from_atoms(weights, atom_means, atom_variances, provenance)


def complete(
    draw: PosteriorDraw,
    g0: NigParams,
    config: CompletionConfig,
    rng: np.random.Generator,
) -> MixtureDensity:
    return complete_atoms(
        draw.means, draw.variances, draw.alpha, g0, config.eps, config.ups, rng
    )


def _complete_one(
    draw: PosteriorDraw,
    model: ModelConfig,
    config: CompletionConfig,
    seed: np.random.SeedSequence,
) -> MixtureDensity:
    rng = np.random.default_rng(seed)
    return complete(draw, model.base_measure(draw.mu, draw.tau), config, rng)


def complete_all(
    draws: Sequence[PosteriorDraw],
    model: ModelConfig,
    config: CompletionConfig,
    workers: int = 1,
) -> list[MixtureDensity]:
    """
    Complete every draw. Draw t uses child t of SeedSequence(config.seed), so
    the result does not depend on `workers`.
    """
    if not draws:
        raise DomainError('need at least one posterior draw')
    config.validate()
    seeds = np.random.SeedSequence(config.seed).spawn(len(draws))
    log.info(
        'Completing %d draws (eps=%g, ups=%g, workers=%d)',
        len(draws),
        config.eps,
        config.ups,
        workers,
    )
    if workers > 1:
        chunksize = max(1, len(draws) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(
                pool.map(
                    _complete_one,
                    draws,
                    repeat(model),
                    repeat(config),
                    seeds,
                    chunksize=chunksize,
                )
            )
    return [_complete_one(d, model, config, s) for d, s in zip(draws, seeds)]


def draw_mixture(draw: PosteriorDraw) -> MixtureDensity:
    """Marginal-model density: distinct thetas weighted by their tie counts."""
    keys = np.column_stack([draw.means, draw.variances])
    unique, counts = np.unique(keys, axis=0, return_counts=True)
    return MixtureDensity(counts / draw.n, unique[:, 0], unique[:, 1], Provenance.MARGINAL)


def sequential_stick_count(
    alpha: float, n: int, eps: float, rng: np.random.Generator, chunk: int = 256
) -> int:
    """
    Number of Beta(1, alpha + n) sticks drawn until prod (1 - v_j) < eps.

    The reference for the Poisson law behind truncation_level; the sticks are
    drawn in chunks and the stopping index located afterwards.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f'eps must lie in (0, 1), got {eps}')
    target = -math.log(eps)
    used = 0
    total = 0.0
    while True:
        v = sample_beta(1.0, alpha + n, rng, size=chunk)
        running = total + np.cumsum(-np.log1p(-v))
        hit = np.flatnonzero(running > target)
        if hit.size:
            return used + int(hit[0]) + 1
        used += chunk
        total = float(running[-1])
