"""
analysis.py - Functionals of sampled mixture densities on grids.

Densities, distribution functions, grid mode counts, trapezoid moments,
pointwise means and pointwise / simultaneous bands over collections of
sampled functions.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy import integrate, stats

from pypolya.completion import MixtureDensity
from pypolya.dist_core import NigParams, marginal_t_density
from pypolya.errors import DomainError
from pypolya.gibbs import PosteriorDraw

log = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 1000
DEFAULT_GRID_PAD = 0.15
DEFAULT_MODE_RESOLUTION = 512
MIN_BAND_SAMPLES = 20

# caps the (grid x atoms) block evaluated at once
_EVAL_BLOCK = 2_000_000


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise DomainError('grid and values must be 1-d and of equal length')
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise DomainError('grid must be strictly increasing')
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'values', values)


class BandKind(str, Enum):
    POINTWISE = 'pointwise'
    SIMULTANEOUS = 'simultaneous'


@dataclass(frozen=True, eq=False)
class BandSet:
    grid: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    kind: BandKind
    level: float

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    mass: float
    low_mass: bool


@dataclass(frozen=True)
class MomentRegion:
    """Axis-aligned central region for (mean, variance) samples."""

    lower: tuple[float, float]
    upper: tuple[float, float]
    level: float

    def contains(self, point) -> bool:
        mean, variance = point
        return (
            self.lower[0] <= mean <= self.upper[0]
            and self.lower[1] <= variance <= self.upper[1]
        )


def data_range(data) -> tuple[float, float]:
    """(min, max) of the data; a single repeated value is widened to a unit span."""
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise DomainError('need at least one observation')
    lo, hi = float(data.min()), float(data.max())
    if hi > lo:
        return lo, hi
    return lo - 0.5, hi + 0.5


def default_grid(
    data, points: int = DEFAULT_GRID_POINTS, pad: float = DEFAULT_GRID_PAD
) -> np.ndarray:
    """Equally spaced grid over the data range widened by `pad` on each side."""
    lo, hi = data_range(data)
    span = hi - lo
    return np.linspace(lo - pad * span, hi + pad * span, points)


def moment_grid(mix: MixtureDensity, width: float = 8.0, max_points: int = 10001):
    """Grid covering every atom to +-width sd, at most half the smallest sd apart."""
    sd = np.sqrt(mix.variances)
    lo = float(np.min(mix.means - width * sd))
    hi = float(np.max(mix.means + width * sd))
    points = int(np.clip(math.ceil(2.0 * (hi - lo) / sd.min()) + 1, 2001, max_points))
    return np.linspace(lo, hi, points)


def _mixture_sum(kernel, mix: MixtureDensity, grid: np.ndarray) -> np.ndarray:
    sd = np.sqrt(mix.variances)
    values = np.zeros(grid.size)
    block = max(1, _EVAL_BLOCK // max(grid.size, 1))
    for start in range(0, len(mix), block):
        stop = start + block
        values += (
            kernel(grid[:, None], mix.means[None, start:stop], sd[None, start:stop])
            @ mix.weights[start:stop]
        )
    return values


def eval_density(mix: MixtureDensity, grid) -> GridFunction:
    grid = np.asarray(grid, dtype=float)
    return GridFunction(grid, _mixture_sum(stats.norm.pdf, mix, grid))


def eval_cdf(mix: MixtureDensity, grid) -> GridFunction:
    grid = np.asarray(grid, dtype=float)
    values = _mixture_sum(stats.norm.cdf, mix, grid)
    # rounding in the flat tails can undo monotonicity by an ulp
    values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
    return GridFunction(grid, values)


def eval_predictive(draw: PosteriorDraw, g0: NigParams, grid) -> GridFunction:
    """Predictive density alpha/(alpha+n) q0(y) + 1/(alpha+n) sum_i N(y | theta_i)."""
    grid = np.asarray(grid, dtype=float)
    total = draw.alpha + draw.n
    kernels = stats.norm.pdf(
        grid[:, None], draw.means[None, :], np.sqrt(draw.variances)[None, :]
    ).sum(axis=1)
    values = (draw.alpha * marginal_t_density(grid, g0) + kernels) / total
    return GridFunction(grid, values)


def count_modes(
    mix: MixtureDensity, data_range, resolution: int = DEFAULT_MODE_RESOLUTION
) -> np.ndarray:
    """Interior grid points of [lo, hi] where the density beats both neighbours."""
    lo, hi = data_range
    if not lo < hi:
        raise DomainError(f'need lo < hi, got {data_range}')
    if resolution < 3:
        raise DomainError(f'resolution must be at least 3, got {resolution}')
    grid = np.linspace(lo, hi, resolution)
    f = eval_density(mix, grid).values
    peaks = (f[1:-1] > f[:-2]) & (f[1:-1] > f[2:])
    return grid[1:-1][peaks]


def mode_count_histogram(mode_lists: Sequence[Sequence[float]]) -> dict[int, int]:
    counts = Counter(len(modes) for modes in mode_lists)
    return dict(sorted(counts.items()))


def moments_trapezoid(fn: GridFunction) -> Moments:
    """Trapezoid mean and variance of a density, renormalized by its grid mass."""
    x, f = fn.grid, fn.values
    mass = float(integrate.trapezoid(f, x))
    if mass <= 0:
        raise DomainError('density has no mass on the grid')
    mean = float(integrate.trapezoid(x * f, x)) / mass
    variance = float(integrate.trapezoid((x - mean) ** 2 * f, x)) / mass
    low_mass = mass < 0.99
    if low_mass:
        log.warning('grid holds only %.4f of the density mass', mass)
    return Moments(mean, variance, mass, low_mass)


def mixture_moments(mix: MixtureDensity) -> tuple[float, float]:
    """Closed-form mixture mean and variance."""
    mean = float(mix.weights @ mix.means)
    second = float(mix.weights @ (mix.variances + mix.means**2))
    return mean, second - mean**2


def _stack(fns: Sequence[GridFunction]) -> tuple[np.ndarray, np.ndarray]:
    if not fns:
        raise DomainError('need at least one function')
    grid = fns[0].grid
    for fn in fns[1:]:
        if not np.array_equal(fn.grid, grid):
            raise DomainError('functions must share one grid')
    return grid, np.vstack([fn.values for fn in fns])


def pointwise_mean(fns: Sequence[GridFunction]) -> GridFunction:
    grid, values = _stack(fns)
    return GridFunction(grid, values.mean(axis=0))


def bands(fns: Sequence[GridFunction], level: float, kind) -> BandSet:
    """
    Pointwise: per-point central quantiles.

    Simultaneous: rank the paths by sup distance to the pointwise mean and
    take the envelope of the ceil(level * T) closest, widened where needed
    to contain the pointwise band at the same level.
    """
    kind = BandKind(kind)
    if not 0.0 < level < 1.0:
        raise DomainError(f'level must lie in (0, 1), got {level}')
    grid, values = _stack(fns)
    total = values.shape[0]
    if total < MIN_BAND_SAMPLES:
        raise DomainError(
            f'need at least {MIN_BAND_SAMPLES} functions for bands, got {total}'
        )
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(values, [tail, 1.0 - tail], axis=0)
    if kind is BandKind.SIMULTANEOUS:
        distance = np.abs(values - values.mean(axis=0)).max(axis=1)
        keep = np.argsort(distance, kind='stable')[: math.ceil(level * total)]
        lower = np.minimum(lower, values[keep].min(axis=0))
        upper = np.maximum(upper, values[keep].max(axis=0))
    return BandSet(grid, lower, upper, kind, level)


def moment_region(points, level: float) -> MomentRegion:
    """Central `level` interval of each coordinate of (mean, variance) samples."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] == 0:
        raise DomainError('points must be a nonempty (T, 2) array')
    tail = (1.0 - level) / 2.0
    lower, upper = np.quantile(points, [tail, 1.0 - tail], axis=0)
    return MomentRegion(tuple(map(float, lower)), tuple(map(float, upper)), level)
