"""
records.py - Newline-delimited JSON interchange for draws and mixtures.

Line 1 is a header describing the run; every following line is one record.

    {"format_version": "1", "kind": "draws", "model_family": "dp-normal-nig",
     "config": {...}, "seed": 0, "n": 82, "T": 100, "data": [...]}
    {"t": 0, "mu": ..., "tau": ..., "alpha": ..., "k": ..., "means": [...], "variances": [...]}

Mixture files use kind "mixtures", add a "completion" object to the header and
carry {"t", "provenance", "weights", "means", "variances"} records.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from pypolya import util
from pypolya.completion import CompletionConfig, MixtureDensity
from pypolya.errors import FormatError, PolyaError
from pypolya.gibbs import ModelConfig, PosteriorDraw

FORMAT_VERSION = '1'
MODEL_FAMILY = 'dp-normal-nig'
DRAWS = 'draws'
MIXTURES = 'mixtures'


@dataclass
class RunFile:
    kind: str
    model: ModelConfig
    data: np.ndarray
    draws: list[PosteriorDraw] = field(default_factory=list)
    mixtures: list[MixtureDensity] = field(default_factory=list)
    completion: Optional[CompletionConfig] = None

    @property
    def n(self) -> int:
        return int(self.data.size)

    @property
    def T(self) -> int:
        return len(self.draws) if self.kind == DRAWS else len(self.mixtures)


def _header(kind: str, model: ModelConfig, data, count: int, **extra) -> dict:
    header = {
        'format_version': FORMAT_VERSION,
        'kind': kind,
        'model_family': MODEL_FAMILY,
        'config': model.to_dict(),
        'seed': model.seed,
        'n': int(np.size(data)),
        'T': count,
        'data': [float(y) for y in data],
    }
    header.update(extra)
    return header


def draw_record(t: int, draw: PosteriorDraw) -> dict:
    return {
        't': t,
        'mu': draw.mu,
        'tau': draw.tau,
        'alpha': draw.alpha,
        'k': draw.k,
        'means': draw.means.tolist(),
        'variances': draw.variances.tolist(),
    }


def mixture_record(t: int, mix: MixtureDensity) -> dict:
    return {
        't': t,
        'provenance': mix.provenance.value,
        'weights': mix.weights.tolist(),
        'means': mix.means.tolist(),
        'variances': mix.variances.tolist(),
    }


def write_draws(
    path: Optional[Path], model: ModelConfig, data, draws: Sequence[PosteriorDraw]
) -> None:
    header = _header(DRAWS, model, data, len(draws))
    records = (draw_record(t, d) for t, d in enumerate(draws))
    util.write_ndjson([header, *records], path)


def write_mixtures(
    path: Optional[Path],
    model: ModelConfig,
    completion: CompletionConfig,
    data,
    mixtures: Sequence[MixtureDensity],
) -> None:
    header = _header(
        MIXTURES, model, data, len(mixtures), completion=completion.to_dict()
    )
    records = (mixture_record(t, m) for t, m in enumerate(mixtures))
    util.write_ndjson([header, *records], path)


def _check_header(header: dict, path) -> None:
    if not isinstance(header, dict):
        raise FormatError(f'{path}: first line must be a header object')
    if header.get('format_version') != FORMAT_VERSION:
        raise FormatError(
            f'{path}: unsupported format version {header.get("format_version")!r}'
        )
    if header.get('model_family') != MODEL_FAMILY:
        raise FormatError(
            f'{path}: unknown model family {header.get("model_family")!r}'
        )
    if header.get('kind') not in (DRAWS, MIXTURES):
        raise FormatError(f'{path}: unknown record kind {header.get("kind")!r}')


def _parse_draw(record: dict) -> PosteriorDraw:
    means = np.array(record['means'], dtype=float)
    variances = np.array(record['variances'], dtype=float)
    if means.shape != variances.shape:
        raise FormatError('means and variances differ in length')
    means.flags.writeable = False
    variances.flags.writeable = False
    return PosteriorDraw(
        means,
        variances,
        float(record['mu']),
        float(record['tau']),
        float(record['alpha']),
        int(record['k']),
    )


def _parse_mixture(record: dict) -> MixtureDensity:
    return MixtureDensity(
        record['weights'], record['means'], record['variances'], record['provenance']
    )


def read_run(path: Path, kind: Optional[str] = None) -> RunFile:
    """Read a draws or mixtures file; `kind` restricts which one is accepted."""
    try:
        lines = iter(util.read_ndjson(path))
        header = next(lines, None)
        if header is None:
            raise FormatError(f'{path}: empty file')
        _check_header(header, path)
        if kind is not None and header['kind'] != kind:
            raise FormatError(f'{path}: expected a {kind} file, got {header["kind"]}')
        model = ModelConfig.from_dict(header['config'])
        run = RunFile(header['kind'], model, np.asarray(header['data'], dtype=float))
        if run.kind == MIXTURES:
            run.completion = CompletionConfig(**header['completion']).validate()
            run.mixtures = [_parse_mixture(r) for r in lines]
        else:
            run.draws = [_parse_draw(r) for r in lines]
        announced = (header['n'], header['T'])
        if (run.n, run.T) != announced:
            raise FormatError(
                f'{path}: header announces n={announced[0]}, T={announced[1]} '
                f'but the file holds n={run.n}, T={run.T}'
            )
    except json.JSONDecodeError as e:
        raise FormatError(f'{path}: invalid JSON: {e}') from None
    except FormatError:
        raise
    except PolyaError as e:
        raise FormatError(f'{path}: {e}') from None
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f'{path}: malformed record: {e!r}') from None
    return run
