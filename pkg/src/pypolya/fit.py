#!/usr/bin/env python3
"""
fit.py - Run the marginal Gibbs sampler and write a draws file.

Input is a text file with one value per line (`#` comments allowed) or the
name of a builtin dataset.

Usage:
    fit.py galaxies --iters 100 -o galaxies.draws.ndjson
    fit.py data.txt --config model.ini --fix-alpha 1 --seed 7 > draws.ndjson
"""

import argparse
import signal
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from rich.progress import BarColumn, Progress, TextColumn, TimeRemainingColumn

from pypolya import config, datasets, records, util
from pypolya.errors import ValidationError
from pypolya.gibbs import ModelConfig, run_chain

# pipe-safe: exit quietly on broken pipes
signal.signal(signal.SIGPIPE, signal.SIG_DFL)


def load_data(source: str) -> np.ndarray:
    """A builtin dataset name, or a path to a values file."""
    path = Path(source)
    if source in datasets.BUILTIN and not path.is_file():
        return datasets.load_builtin(source)
    if not path.is_file():
        raise ValidationError(
            f'{source} is neither a file nor a builtin dataset '
            f'({", ".join(sorted(datasets.BUILTIN))})'
        )
    return util.read_values(path)


def fit(data, model: ModelConfig, show_progress: bool = False):
    if not show_progress:
        return run_chain(data, model)
    total = model.burnin + model.iterations * model.thin
    with Progress(
        TextColumn('[progress.description]{task.description}'),
        BarColumn(),
        TextColumn('{task.completed}/{task.total} sweeps'),
        TimeRemainingColumn(),
        console=util.stderr_console,
        transient=True,
    ) as progress:
        task = progress.add_task('Sampling', total=total)
        return run_chain(data, model, progress=lambda: progress.advance(task))


def setup_parser(parser: argparse.ArgumentParser) -> None:
    """Add fit-specific arguments to a parser."""
    parser.add_argument('input', help='Values file, or a builtin dataset (galaxies)')
    parser.add_argument(
        '--config', type=util.existing_file, help='Model config file (ini or json)'
    )
    parser.add_argument('--iters', type=util.nonnegative_int, help='Draws to keep')
    parser.add_argument('--burnin', type=util.nonnegative_int, help='Burn-in sweeps')
    parser.add_argument('--thin', type=util.positive_int, help='Sweeps per kept draw')
    parser.add_argument('--seed', type=int, help='Random seed')
    parser.add_argument('--fix-alpha', type=float, help='Hold alpha at this value')
    parser.add_argument('--fix-mu', type=float, help='Hold mu at this value')
    parser.add_argument('--fix-tau', type=float, help='Hold tau at this value')
    parser.add_argument(
        '--no-remix',
        action='store_true',
        help='Skip redrawing distinct components after each sweep',
    )
    parser.add_argument(
        '--progress', action='store_true', help='Show a progress bar on stderr'
    )
    parser.add_argument('-o', '--out', help='Output draws file (default: stdout)')
    parser.set_defaults(func=run)


def run(args: argparse.Namespace) -> None:
    model = config.resolve_model_config(args)
    data = load_data(args.input)
    draws = fit(data, model, show_progress=args.progress)
    records.write_draws(args.out, model, data, draws)


def main(argv: Optional[Sequence[str]] = None) -> None:
    if argv is None:
        argv = sys.argv[1:]
    parser = argparse.ArgumentParser(description='Fit the marginal DP mixture model')
    setup_parser(parser)
    args = parser.parse_args(argv)
    args.func(args)


if __name__ == '__main__':
    main()
